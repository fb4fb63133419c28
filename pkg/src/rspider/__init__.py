"""Variance-reduced stochastic optimization on geodesic manifolds.

Modules:
    geometry    -- sphere / flat-space geodesic primitives
    oracle      -- finite-sum objectives with oracle-call accounting
    optim       -- the variance-reduced solvers and baselines
    diagnostics -- regularity probes and rate statistics
    bench       -- sweep runner and command-line interface
"""

from .geometry import (
    AntipodalError,
    Euclidean,
    GeometryError,
    Manifold,
    ManifoldPoint,
    Sphere,
    TangentVector,
)
from .oracle import (
    ComponentObjective,
    FiniteSumObjective,
    IfoCounter,
    PcaProblem,
    SyntheticSpec,
    generate_gap_matrix,
    leading_eigpair,
    load_problem,
    packed_spectrum,
    problem_from_spectrum,
    save_problem,
    variance_bound_estimate,
)
from .optim import (
    FrozenState,
    GdConfig,
    OptimizerError,
    RunTrace,
    SpiderConfig,
    TraceRecord,
    params_finite,
    params_stochastic,
    rsgd,
    rsvrg,
    spider_gd1,
    spider_gd2,
    spider_nonconvex,
)
from .diagnostics import (
    CONVERGED,
    STALLED,
    ProbeReport,
    epochs_to_double,
    fd_gradient_check,
    pl_constant_estimate,
    smoothness_probe,
    variance_probe,
)
from .bench import ExperimentConfig, cli_main, run_cell, run_sweep

__version__ = "0.1.0"
