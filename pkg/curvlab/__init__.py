"""Numerical curvature laboratory for pseudo-Riemannian and contact metrics."""

__version__ = "0.1.0"
