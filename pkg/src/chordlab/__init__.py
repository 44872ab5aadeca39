"""Chord diagrams, codimension jumps of equality conditions, and the mod-2
braid-group cohomology that forces them."""

__version__ = "0.1.0"
