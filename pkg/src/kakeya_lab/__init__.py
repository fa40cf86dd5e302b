"""Exact experiments around Kakeya sets over F_q[[t]]: Lubin-Tate torsion,
the polynomial method over a ramified extension, and the discrete maximal function."""

__version__ = "0.1.0"
