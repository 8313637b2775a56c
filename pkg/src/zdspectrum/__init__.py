"""Zero-determinant payoff pinning for repeated spectrum-access games."""

__version__ = "0.1.0"

from .errors import (
    BInfeasibleError,
    DegenerateError,
    InfeasibleError,
    InputError,
    NotControllableError,
    TargetInfeasibleError,
    ZDError,
)
from .game import MemoryOneStrategy, OpponentPolicy, PayoffMatrix, StateSpace, state_index, state_space
from .markov import (
    StationaryDistribution,
    TransitionMatrix,
    build_transition_matrix,
    collapse_column,
    determinant_payoff,
    determinant_payoff_n,
    long_run_payoff,
    stationary,
)
from .synthesis import (
    BRange,
    ControlReport,
    ZdParameters,
    b_range,
    check_controllability,
    controllability,
    synthesize_multiplayer,
    synthesize_opponent_control,
    synthesize_own,
)
from .spectrum import (
    DownlinkScenario,
    GameParameters,
    PowerAllocation,
    Provider,
    User,
    build_game,
    maxmin_allocation_interfered,
    maxmin_allocation_solo,
)
from .simulation import SimulationConfig, SimulationTrace, convergence_study, power_sweep, simulate
