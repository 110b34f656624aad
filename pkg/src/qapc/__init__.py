"""QAP to king's-graph MWIS compiler with exact certification."""

__version__ = "0.1.0"
