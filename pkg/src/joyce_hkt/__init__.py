"""Joyce hypercomplex structures on compact Lie groups and HKT verification."""

__version__ = "0.1.0"
