"""courtvec: dense player embeddings from possession outcomes.

Train a shared-embedding network that predicts the 23-class outcome
distribution of a possession from the ten players on court, validate it
with K-L divergence, analyze the embedding space, and run Monte Carlo
game/series simulations and lineup what-ifs on top of it.
"""

__version__ = "0.1.0"

from .analysis import (
    CorrelationRow,
    EmbeddingKMeans,
    EmbeddingScaler,
    KMeansResult,
    PcaResult,
    PrincipalComponents,
    StandardizedEmbeddings,
    elbow_curve,
    kmeans,
    metric_correlations,
    nearest_neighbors,
    pca,
    standardize,
)
from .checkpoint import checkpoint_sha256, load_checkpoint, save_checkpoint
from .errors import (
    ArgumentError,
    CheckpointError,
    CourtVecError,
    DataError,
    DegenerateDimensionError,
    DegenerateModelError,
    DivergenceError,
    LineupError,
    OutcomeError,
    ParseError,
    RegistryError,
    ResolutionError,
    RulesError,
    RuntimeFailure,
    SupportError,
    UnmappedEventError,
)
from .estimator import PossessionOutcomeModel
from .evaluation import (
    EmpiricalDistribution,
    MatchupKey,
    ValidationReport,
    empirical_distribution,
    group_by_matchup,
    kl_divergence,
    kl_vs_plays_curve,
    uniform_baseline,
    validate_matchups,
)
from .fifth_man import CandidateRow, FifthManQuery, rank_fifth_man
from .network import (
    EmbeddingModel,
    ModelConfig,
    ModelGradients,
    forward,
    forward_batch,
    init_model,
    loss_and_gradients,
)
from .outcomes import N_OUTCOMES, OUTCOME_LABELS, OUTCOME_POINTS, OUTCOME_SECTIONS
from .plays import (
    Play,
    chronological_split,
    normalize_plays,
    parse_plays,
    plays_to_arrays,
    write_plays,
)
from .registry import PlayerRecord, PlayerRegistry, build_registry, write_registry
from .rules import OutcomeMapping, RawEvent, Rule, default_mapping, map_raw_outcome, parse_rules
from .simulation import (
    GameResult,
    SeriesResult,
    head_to_head_table,
    most_frequent_lineups,
    most_frequent_players,
    outcome_points,
    simulate_game,
    simulate_series,
)
from .synth import PlantedGenerator, generate_plays, plant_generator, random_matchups
from .training import TrainConfig, train
