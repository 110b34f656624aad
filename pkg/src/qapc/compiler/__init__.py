"""Tile-to-lattice compilation: fragments, certification, stitching."""
from .certify import CertificationError, CompilationCertificate, certify_graph
from .fragments import TileFragment, certify_fragment, decorate_fragment
from .library import FragmentLibrary, default_library

__all__ = [
    "CertificationError",
    "CompilationCertificate",
    "FragmentLibrary",
    "TileFragment",
    "certify_fragment",
    "certify_graph",
    "decorate_fragment",
    "default_library",
]
