"""Dataset pruning engine for dense-labeling tasks.

Ranks training samples by learning difficulty from streamed per-epoch dice
records, detects when the ranking has stabilized, and materializes pruned
subsets plus diagnostic reports. No training loop is embedded: everything is
driven by score streams and dumped volumes.
"""

__version__ = "0.1.0"

from .volumes import MaskVolume, ProbabilityVolume, SaliencyStack, binarize
from .metrics import dice, el2n, el2nx, naive_l2_score, vog
from .dynamics import (
    DadWindow,
    DynamicsSnapshot,
    ScoreRecord,
    StopDecision,
    TrajectoryStore,
    dad_score,
    full_horizon_dad,
    moving_distance,
    should_stop,
    snapshot,
    stability_scan,
    subset_overlap,
    variability,
)
from .pruning import PruneManifest, Ranking, prune, rank
from .formats import (
    ingest_scores,
    read_manifest,
    read_volume,
    score_volumes,
    write_manifest,
    write_volume,
)
from .report import render_datamap, render_l_curve, rank_listing
from .simulate import (
    SimSampleSpec,
    simulate_mask_sequence,
    simulate_trajectories,
)

__all__ = [
    "__version__",
    "MaskVolume",
    "ProbabilityVolume",
    "SaliencyStack",
    "binarize",
    "dice",
    "el2n",
    "el2nx",
    "naive_l2_score",
    "vog",
    "DadWindow",
    "DynamicsSnapshot",
    "ScoreRecord",
    "StopDecision",
    "TrajectoryStore",
    "dad_score",
    "full_horizon_dad",
    "moving_distance",
    "should_stop",
    "snapshot",
    "stability_scan",
    "subset_overlap",
    "variability",
    "PruneManifest",
    "Ranking",
    "prune",
    "rank",
    "ingest_scores",
    "read_manifest",
    "read_volume",
    "score_volumes",
    "write_manifest",
    "write_volume",
    "render_datamap",
    "render_l_curve",
    "rank_listing",
    "SimSampleSpec",
    "simulate_mask_sequence",
    "simulate_trajectories",
]
