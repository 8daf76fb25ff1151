"""Strong-coupling resummation of lattice boundary-layer series."""

__version__ = "0.1.0"
