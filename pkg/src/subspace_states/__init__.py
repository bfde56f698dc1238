"""Simulation and verification of subspace-state circuits."""
from .errors import DegenerateInput, InvalidArgument, InvalidOperation, ResourceLimit

__version__ = "0.1.0"

__all__ = ["DegenerateInput", "InvalidArgument", "InvalidOperation", "ResourceLimit"]
