"""Bayesian R_t estimation under case-reporting measurement error and serial interval uncertainty."""

__version__ = "0.1.0"
