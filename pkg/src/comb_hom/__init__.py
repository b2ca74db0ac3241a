"""Frequency-comb single photons, entangled pairs and their Hong-Ou-Mandel dips."""
from .hom import Shift, coincidence_entangled, coincidence_product, scan
from .shapes import ShapeKind, ShapeSpec
from .states import CombSpec, EntangledSpec, check_scales, comb_state

__all__ = [
    "CombSpec",
    "EntangledSpec",
    "ShapeKind",
    "ShapeSpec",
    "Shift",
    "check_scales",
    "coincidence_entangled",
    "coincidence_product",
    "comb_state",
    "scan",
]
