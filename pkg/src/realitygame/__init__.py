"""Simulation and analysis of the reality game.

Players with fixed strategies bet pari-mutuel on a coin whose bias depends
on the wealth-weighted bets through a reality map ``q(p)``.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    GeneralBetMatrix,
    Outcome,
    PlayerPopulation,
    apply_outcome,
    payoff_general,
    total_bet,
)
from .errors import (  # noqa: E402
    DegenerateAllZero,
    DomainError,
    EmptySeries,
    NonPositiveData,
    NotDifferentiable,
    ParseError,
    RealityGameError,
    UnstableFixedPoint,
    ValidationError,
    ZeroPool,
)
from .maps import (  # noqa: E402
    CONTINUUM,
    ArctanFamily,
    Constant,
    DiscontinuityAttractor,
    FixedPointInfo,
    Identity,
    Multimodal,
    RealityMap,
    SelfDefeating,
    TablePiecewiseLinear,
    classify,
    fixed_points,
    slope_at,
)
from .engine import EnsembleStats, RunConfig, Trajectory, ensemble, run, step  # noqa: E402
from .rational import (  # noqa: E402
    RationalContext,
    equilibrium_stability,
    expected_log_return,
    log_return_derivative,
    optimal_strategy,
    stability_threshold,
)
from .analytics import (  # noqa: E402
    ConvergencePrediction,
    PowerLawFit,
    fit_power_law,
    inefficiency,
    inefficiency_series,
    predict_convergence,
    subjective_heads_distribution,
    subjective_wealth_given_heads,
)
from .specfile import ExperimentSpec, load_spec, parse_spec  # noqa: E402
from .svg import Axes, Series, render_svg  # noqa: E402
