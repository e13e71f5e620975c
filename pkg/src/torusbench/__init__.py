"""torusbench: deterministic benchmark for the collective intelligence of
heterogeneous agent groups on a toroidal gridworld.

Agents chase a moving good object and avoid a moving evil one, exchanging
information through talking, stigmergy, or imitation. A group's intelligence
score is its average per-agent per-iteration reward over seeded episodes.
"""

from .agents import (
    AgentSpec,
    AgentState,
    CommMethod,
    Policy,
    greedy_step_toward,
    local_search_decide,
    oracle_decide,
    random_decide,
)
from .comms import (
    REWARD_ALPHABET,
    SharedInfo,
    imitation_select,
    merged_reward_map,
    stigmergy_exchange,
    talking_exchange,
)
from .episode import (
    DEFAULT_PATTERN_SEED,
    EpisodeConfig,
    GroupScore,
    MissingKindError,
    RewardLog,
    episode_seed,
    evaluate,
    group_score,
    run_episode,
    weighted_average_baseline,
)
from .grid import (
    Action,
    ConfigurationError,
    Environment,
    MovementPattern,
    Observation,
    Position,
    apply_action,
    environment_entropy_bits,
    observe,
    pattern_complexity_bits,
    random_pattern,
    reward_at,
    step_special_objects,
    torus_chebyshev,
)
from .notation import (
    AgentKind,
    GroupNotation,
    GroupParseError,
    composition_of,
    kind_of,
    parse_group,
    render_group,
    roster_from_notation,
)

__version__ = "0.1.0"
