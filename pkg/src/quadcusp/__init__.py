"""Exact arithmetic for real quadratic orders, abelian varieties with
(pseudo-)real multiplication and the boundary strata of their moduli."""
from __future__ import annotations

from .errors import DomainError, ParseError
from .exact import PCElem, QuadElem, parse_pc, parse_quad
from .orders import (
    FracIdeal,
    QIdeal,
    QOrder,
    count_components,
    ideal_conj,
    ideal_mul,
    parse_ideal,
    primitive_ideals_of_norm,
    satisfies_pfc,
    smart_basis,
)
from .lattices import QLattice, hnf, snf, symplectic_basis, symplectic_type
from .modvariety import GammaElem, Mat2, SmartData, in_gamma, M_of
from .pseudocubic import FLattice, HMap, dual_lattice, extension_class_equal, o_h
from .boundary import (
    CrossRatioEq,
    Weighting,
    admissibility,
    cross_ratio_equations,
    dual_basis,
    exponent_lattice,
    is_admissible,
    q_map,
)
from .prym import prym_pipeline

__version__ = "0.1.0"
