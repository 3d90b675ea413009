"""Symbolic and numeric checks of the Hochschild 3-cycle c_V on matrix quantum groups."""

__version__ = "0.1.0"

from .coeff import Coefficient
from .expr import (
    CONTRACT,
    Expr,
    RuleSet,
    StructuralError,
    Term,
    counit,
    evaluate_scalar_network,
    make_term,
    multiply,
    normalize,
    parse,
    render,
)
from .forms import (
    BilinearFormSpec,
    CasimirDecomposition,
    DegenerateFormError,
    LieBasis,
    NotSemisimpleError,
    bracket_decompose,
    casimir_on_V,
    so_E_basis,
    total_pairing,
    trace_dual_basis,
    verify_selfdual_equivalence,
)
from .hochschild import (
    DerivationCompatibilityError,
    DerivationMatrix,
    boundary,
    build_cV,
    cap,
    derivation_apply,
    hh0_commutator_check,
    pairing_symbolic,
    verify_cycle,
)
from .numeric import GroupPoint, evaluate_chain, numeric_zero_check, random_group_point
from .report import VerificationReport
