"""Numerical and symbolic workbench for period identities of low-weight
Siegel modular forms: gamma factors and criticality, Euler factorizations
over quadratic fields, period lattices and comparison matrices, smoothed
L-value evaluation, formal pi-power bookkeeping, and the GSp(4,R)
K-type combinatorics."""

__version__ = "0.1.0"
