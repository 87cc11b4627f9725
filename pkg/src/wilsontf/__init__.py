"""Wilson bases of exponential decay: tight-window construction, Wilson
and short-time Fourier analysis, weighted time-frequency norms, and
decay-based regularity classification."""

from .blocks import BlockPartition, partition_series, verify_partition
from .classify import (
    DecayFit,
    MembershipReport,
    classify_gs,
    fit_coefficient_decay,
    fit_stft_decay,
    gs_sup_check,
    membership_series,
    pair_distribution,
)
from .grid import FunctionSpec, GridSpec, Signal, dft, inner, sample, shift_modulate
from .norms import (
    NormReport,
    coorbit_norm,
    fourier_coorbit_norm,
    lemma2_sandwich,
    modulation_norm,
    sequence_norm,
    weighted_l2_norm,
)
from .stft import PhasePlaneArray, check_fundamental_identity, check_orthogonality_relation, stft
from .weights import WeightSpec, check_weight_axioms
from .wilson import (
    CoefficientTable,
    WilsonIndex,
    WilsonSystem,
    analyze,
    gram_residual,
    synthesize,
    wilson_atom,
)
from .zakwin import (
    TightWindow,
    ZakArray,
    default_tight_window,
    fit_exponential_decay,
    inverse_zak,
    tight_window,
    zak,
)

__version__ = "0.1.0"
