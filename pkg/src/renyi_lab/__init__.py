"""Renyi-alpha entanglement of qubit systems: closed forms, convex-roof oracle,
monogamy and polygamy checks, and threshold sweeps."""

__version__ = "0.1.0"

from .concurrence import (
    concurrence_of_assistance,
    pure_concurrence,
    wootters_concurrence,
    wootters_spectrum,
)
from .entropy import AlphaParam, quantum_renyi_entropy, renyi_entropy
from .errors import (
    BracketError,
    ConjecturalAlphaError,
    ConjecturalAlphaWarning,
    DomainError,
    InvalidStateError,
    NonMonotoneTransitionError,
    RenyiLabError,
)
from .linalg import DensityMatrix, PureState, haar_random_pure, partial_trace, reduced_state
from .renyi_ent import (
    f_alpha,
    f_alpha_d1,
    f_alpha_d2,
    h_alpha,
    l_alpha,
    m_alpha,
    renyi_entanglement_pure,
    renyi_entanglement_two_qubit,
    reoa_lower_bound,
)
from .roof import Measure, RoofBudget, convex_roof_min, roof_max
