"""File formats, SVG rendering and the command-line interface."""
from .formats import ParseError, circuit_from_json, circuit_to_json, format_instance, parse_instance
from .svg import RenderError, RenderSpec, render, render_circuit, render_graph

__all__ = [
    "ParseError",
    "RenderError",
    "RenderSpec",
    "circuit_from_json",
    "circuit_to_json",
    "format_instance",
    "parse_instance",
    "render",
    "render_circuit",
    "render_graph",
]
