"""Curvature positivity toolkit for Kähler curvature tensors."""

from .errors import RicPerpError
from .tensor import holo_sect, nu_max, ric_perp, ricci, validate_tensor

__all__ = ["RicPerpError", "holo_sect", "nu_max", "ric_perp", "ricci", "validate_tensor"]
__version__ = "0.1.0"
