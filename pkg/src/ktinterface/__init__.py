"""Multi-block Kurganov-Tadmor solver with boundary-point-only interfaces."""

__version__ = "0.1.0"
