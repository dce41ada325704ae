"""Intermediation pricing on complex networks."""
