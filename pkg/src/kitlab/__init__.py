"""Exact finite computations with groupoids, Boolean kits, stabilized profunctors and stable species."""
__version__ = "0.1.0"
