"""Human-in-the-loop dataset labeling with classifier-amplified annotation."""

__version__ = "0.1.0"
