"""spheremag: spherical Hardy-Hodge machinery and reconstruction of induced magnetizations."""

__version__ = "0.1.0"
