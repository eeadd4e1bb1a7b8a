"""Mass-adaptive admittance control simulator."""

__version__ = "1.0.0"
