"""holantlab: a workbench for Boolean-domain Holant problems.

Exact signature algebra over cyclotomic fields, gadget constructions,
unique prime factorization of signatures, entanglement analysis,
tractability classification with machine-checkable reduction traces,
and a partition-function evaluator for signature grids.
"""

from .classify import (
    DichotomyVerdict,
    first_order_orthogonality,
    in_A,
    in_Akd,
    in_L,
    in_P,
    in_T,
    in_T1,
    verdict_csp,
    verdict_csp2,
    verdict_cspk,
    verdict_holantc,
    verdict_holant_odd,
)
from .entangle import (
    BellReport,
    EntanglementReport,
    ReductionTrace,
    analyze,
    check_bell_property,
    find_preserving_pin,
    odd_arity_normalize,
    pauli_orbit,
    reduce_to_base,
    replay,
    trace_is_faithful,
)
from .factor import Factorization, divides, is_reducible_across, upf
from .gadget import (
    Transform2x2,
    hat,
    holo,
    mate,
    pin,
    proportional,
    self_loop,
    tensor,
    z_inverse,
    z_transform,
)
from .grid import SignatureGrid, holant_eval, holo_grid, plan_contraction, two_stretch
from .scalar import EXACT, FLOAT, Cyclo, backend_by_name
from .signature import Signature, builtin

__version__ = "0.1.0"

__all__ = [
    "BellReport",
    "Cyclo",
    "DichotomyVerdict",
    "EXACT",
    "EntanglementReport",
    "FLOAT",
    "Factorization",
    "ReductionTrace",
    "Signature",
    "SignatureGrid",
    "Transform2x2",
    "analyze",
    "backend_by_name",
    "builtin",
    "check_bell_property",
    "divides",
    "find_preserving_pin",
    "first_order_orthogonality",
    "hat",
    "holant_eval",
    "holo",
    "holo_grid",
    "in_A",
    "in_Akd",
    "in_L",
    "in_P",
    "in_T",
    "in_T1",
    "is_reducible_across",
    "mate",
    "odd_arity_normalize",
    "pauli_orbit",
    "pin",
    "plan_contraction",
    "proportional",
    "reduce_to_base",
    "replay",
    "self_loop",
    "tensor",
    "trace_is_faithful",
    "two_stretch",
    "upf",
    "verdict_csp",
    "verdict_csp2",
    "verdict_cspk",
    "verdict_holantc",
    "verdict_holant_odd",
    "z_inverse",
    "z_transform",
]
