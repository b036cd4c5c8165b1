"""Energy extremals of a barotropic flow coupled to a rotating sphere."""

__version__ = "0.1.0"
