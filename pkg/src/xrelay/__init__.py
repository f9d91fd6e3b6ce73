"""MIMO two-way X relay channel: aligned transceivers, PNC exchange, DOF sweeps."""

__version__ = "0.1.0"

from .analysis import (
    DofReport,
    dof_report,
    dof_upper_bound,
    reduced_achievable_full,
    sajic_achievable_dof,
    time_share_dof,
)
from .diagnostics import DesignReport, assert_valid, diagnose
from .errors import (
    AlignmentInfeasible,
    DesignInvalid,
    InfeasibleRegime,
    RankDeficient,
    ReducedInfeasible,
    XRelayError,
)
from .exchange import ExchangeResult, MessageSet, run_exchange
from .model import (
    PAIRS,
    ChannelRealization,
    NetworkConfig,
    StreamAllocation,
    allocate_streams,
    draw_channels,
)
from .numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    column_space_intersection,
    left_null_space_basis,
    null_space_basis,
    numerical_rank,
    pseudo_inverse,
    row_space_intersection,
)
from .rates import (
    RateCurve,
    RatePoint,
    ergodic_sweep,
    instantaneous_rates,
    sum_rate,
    timeshare_sweep,
)
from .reduced import ReducedDesign, design_reduced, reduced_split_budget
from .sajic import (
    TransceiverDesign,
    design_bc_receive,
    design_bc_transmit,
    design_full,
    design_mac,
)

__all__ = [name for name in dir() if not name.startswith("_")]
