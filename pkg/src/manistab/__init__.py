"""Heat-kernel manifold filters and networks on sampled point clouds, with stability checks."""

__version__ = "0.1.0"
