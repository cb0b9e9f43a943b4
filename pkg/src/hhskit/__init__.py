"""Hierarchically hyperbolic structures on finite graphs."""
