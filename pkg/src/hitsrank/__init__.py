"""HITS rank convergence on the adversarial Gamma_{h,k,n} graph family.

Graph construction and I/O live in :mod:`hitsrank.graph`, the exact and float
score engines in :mod:`hitsrank.engine`, weak top-k sets and convergence
steps in :mod:`hitsrank.ranking`, and the exact lemma checks in
:mod:`hitsrank.verify`.
"""

from .engine import (
    PebbleTrace,
    ScoreTrace,
    dominant_eigenvector_per_component,
    hits_float_run,
    pebble_run,
    power_by_squaring,
    score_run,
)
from .errors import (
    AmbiguousDominance,
    ConstraintViolation,
    DegenerateScoreVector,
    DigitCapExceeded,
    HitsRankError,
    HorizonTooShort,
    InvalidParameter,
    NotGammaGraph,
    NotSymmetric,
    ParseError,
)
from .graph import (
    GammaGraph,
    GammaParams,
    Graph,
    build_gamma,
    build_gamma_bar,
    build_gamma_copy,
    gamma_from_hkn,
    graph_io_roundtrip,
    load_graph,
    save_graph,
    validate_params,
)
from .kernels import BACKEND
from .ranking import (
    ConvergenceReport,
    TopKSet,
    convergence_tau,
    limit_top_k,
    measure_convergence,
    overlap_series,
    weak_top_k,
)
from .verify import (
    TheoremQuantities,
    VerificationReport,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_symmetry,
    check_theorem_window,
    theorem_quantities,
    verify_gamma,
)

__version__ = "0.1.0"
