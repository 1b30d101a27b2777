"""Hodge ideals of strongly Koszul free divisors.

Exact polynomial and Weyl algebra Groebner bases over the rationals, the
Bernstein-Sato data of a divisor, and the Hodge ideals I_k(D) computed from a
Saito basis of logarithmic vector fields and the b-function of h.
"""

from __future__ import annotations

__version__ = "0.1.0"

from ._engine import BudgetExceeded
from .divisor import (
    BFunction,
    DivisorError,
    DivisorSpec,
    bfunction_validate,
    check_saito_criterion,
    check_strong_koszul,
    compute_bfunction,
    normalize_basis,
)
from .fileformat import DivisorFile, corpus_names, format_divisor_file, load_corpus, parse_divisor_file, parse_divisor_text
from .groebner import (
    MonomialOrder,
    PolyIdeal,
    PolySubmodule,
    eliminate,
    groebner_basis,
    ideal_dimension,
    ideal_equal,
    minimal_generators,
    module_component_intersect,
    syzygies,
)
from .hodge import (
    HodgeComputation,
    HodgeResult,
    InvariantError,
    check_inclusions,
    generating_level,
    hodge_ideal,
    hodge_ideal_0,
    hodge_module_generators,
    ord_filtration,
    psi_bar,
)
from .parsing import ParseError
from .poly import Poly, Ring
from .weyl import WeylElement, WeylIdeal, WeylOrder, WeylRing, weyl_eliminate, weyl_groebner

__all__ = [
    "BFunction", "BudgetExceeded", "DivisorError", "DivisorFile", "DivisorSpec", "HodgeComputation",
    "HodgeResult", "InvariantError", "MonomialOrder", "ParseError", "Poly", "PolyIdeal", "PolySubmodule",
    "Ring", "WeylElement", "WeylIdeal", "WeylOrder", "WeylRing", "bfunction_validate", "check_inclusions",
    "check_saito_criterion", "check_strong_koszul", "compute_bfunction", "corpus_names", "eliminate",
    "format_divisor_file", "generating_level", "groebner_basis", "hodge_ideal", "hodge_ideal_0",
    "hodge_module_generators", "ideal_dimension", "ideal_equal", "load_corpus", "minimal_generators",
    "module_component_intersect", "normalize_basis", "ord_filtration", "parse_divisor_file",
    "parse_divisor_text", "psi_bar", "syzygies", "weyl_eliminate", "weyl_groebner",
]
