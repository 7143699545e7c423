"""Hyperbolic simplex volumes, pseudomanifold combinatorics and simplicial-volume bounds."""

from .specfun import catalan, lobachevsky, v_n
from .hypgeom import (GeodesicSimplex, HPoint, ObtusenessClass, classify_obtuseness,
                      dihedral_angles, signed_volume, straighten)
from .pseudo import Pairing, Pseudomanifold
from .cycles import ChainTerm, IntegralChain, RealChain, RealTerm
from .bounds import BoundReport, ManifoldData, bound_report, census, truncated_volume

__version__ = "0.1.0"

__all__ = [
    "catalan", "lobachevsky", "v_n",
    "GeodesicSimplex", "HPoint", "ObtusenessClass", "classify_obtuseness",
    "dihedral_angles", "signed_volume", "straighten",
    "Pairing", "Pseudomanifold",
    "ChainTerm", "IntegralChain", "RealChain", "RealTerm",
    "BoundReport", "ManifoldData", "bound_report", "census", "truncated_volume",
]
