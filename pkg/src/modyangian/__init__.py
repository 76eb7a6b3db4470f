"""Exact computations in the modular extended orthogonal Yangian X(o_N)
and the truncated current algebra U(o_N[t]) over F_p."""

__version__ = "0.1.0"
