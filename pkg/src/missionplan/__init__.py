"""Multi-UAV, multi-GCS mission planning with a constraint-gated NSGA-II."""

__version__ = "0.1.0"
