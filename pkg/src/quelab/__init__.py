"""quelab: numerical laboratory for quantum ergodicity on arithmetic hyperbolic manifolds."""

__version__ = "0.1.0"
