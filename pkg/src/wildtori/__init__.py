"""Chains of wild tetrahedra, their polyhedral embeddings and toroidal polyhedra."""

__version__ = "0.1.0"
