"""Edge unfoldings of convex polyhedra under affine stretching."""

__version__ = "0.1.0"
