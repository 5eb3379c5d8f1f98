"""Steenrod operations on H*(B(Z/p)^d) and gap-based realizability checks."""

from .action import (
    BasicMonomial,
    PolyElement,
    apply_sq,
    from_exponents,
    milnor_qt,
    mono,
    poly,
    qts_apply,
    span_degrees,
    sq0_level,
    sq0_power,
    sq0_root,
)
from .exchange import (
    Co2Report,
    ExchangeWitness,
    LSClass,
    RunReport,
    chain_components,
    co2_check,
    compute_support,
    find_ls_classes,
    is_g_exchange,
    pr2_check,
    vanishing_run,
)
from .milnor import (
    MilnorElement,
    OperationSum,
    commutator,
    milnor,
    milnor_degree,
    milnor_multiply,
    milnor_to_admissible,
    qts_milnor,
    sq,
)
from .obstruct import (
    FiniteModuleTable,
    GapReport,
    ModuleDescription,
    TypeTCertificate,
    Verdict,
    adams_check,
    condition1_check,
    gap_scan,
    type_t_check,
    type_t_filtration_check,
    verdict,
)
from .oddp import (
    OddElement,
    OddMonomial,
    adams_check_odd,
    apply_beta,
    apply_p,
    cond2_check,
    le5_run_check,
    le6_check,
    odd_element,
    p0_level,
    p0_power,
    qts_apply_odd,
    verdict_odd,
)

__version__ = "0.1.0"
