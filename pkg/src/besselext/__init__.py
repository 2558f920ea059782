"""Bessel-type Sturm-Liouville operators with inverse-square endpoint singularities."""
__version__ = "0.1.0"
