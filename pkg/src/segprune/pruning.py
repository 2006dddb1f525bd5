"""Ranking samples by score and materializing pruned subsets.

Selection is purely rank-based: any strictly monotone rescoring leaves the
kept sets unchanged. Difficulty orientation is encoded once, here: for
dice-derived scores a LOW value means hard to learn, for error-type scores
(el2n, el2nx, vog, naive_l2) a HIGH value does.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import __version__
from .dynamics import DynamicsSnapshot
from .errors import RankingError, ValidationError

# Metrics where a larger score marks an easier sample. Anything not listed
# ranks like an error norm (larger = harder).
_EASE_INCREASING = frozenset({"dad", "dice"})

# Guards against binary float error when p is a decimal fraction, e.g.
# 0.45 * 10 landing a hair under 4.5.
_EPS = 1e-9


def higher_is_easier(metric: str) -> bool:
    return metric.lower() in _EASE_INCREASING


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + _EPS))

def _floor_guarded(x: float) -> int:
    return int(math.floor(x + _EPS))


@dataclass(frozen=True)
class Ranking:
    """Samples in ascending score order, ties broken by sample id."""

    entries: tuple[tuple[str, float], ...]
    metric: str = "dad"
    scoring_epoch: int | None = None

    def __post_init__(self):
        ids = [sid for sid, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise RankingError("duplicate sample ids in ranking")
        scores = [s for _, s in self.entries]
        if any(b < a for a, b in zip(scores, scores[1:])):
            raise RankingError("scores must be non-decreasing")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(sid for sid, _ in self.entries)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.entries)


def rank(
    scores: "DynamicsSnapshot | dict[str, float]",
    metric: str = "dad",
    scoring_epoch: int | None = None,
) -> Ranking:
    """Build the canonical ranking from a snapshot or a score mapping.

    Snapshots rank by their windowed-mean coordinate. NaN scores are
    rejected, never sorted.
    """
    if isinstance(scores, DynamicsSnapshot):
        if scoring_epoch is None:
            scoring_epoch = scores.epoch
        scores = scores.mu_by_id()
    if not scores:
        raise RankingError("no samples to rank")
    for sid, s in scores.items():
        if math.isnan(float(s)):
            raise RankingError(f"sample {sid!r} has NaN score")
    ordered = tuple(sorted(((sid, float(s)) for sid, s in scores.items()),
                           key=lambda kv: (kv[1], kv[0])))
    return Ranking(entries=ordered, metric=metric, scoring_epoch=scoring_epoch)


STRATEGIES = ("ambiguous", "easy", "hard", "random")


@dataclass(frozen=True)
class PruneManifest:
    """Durable record of one pruning decision."""

    strategy: str
    fraction_pruned: float
    scoring_epoch: int | None
    metric: str
    kept: tuple[str, ...]
    dropped: tuple[str, ...]
    seed: int | None = None
    engine_version: str = __version__

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if not 0.0 <= self.fraction_pruned < 1.0:
            raise ValidationError(
                f"fraction_pruned must be in [0, 1), got {self.fraction_pruned}"
            )
        if set(self.kept) & set(self.dropped):
            raise ValidationError("kept and dropped overlap")

    @property
    def sample_count(self) -> int:
        return len(self.kept) + len(self.dropped)


def split_sizes(n: int, p: float, metric: str = "dad") -> tuple[int, int, int]:
    """(head_trim, kept, tail_trim) along the ascending ranking.

    Kept size is exactly round((1-p) n), half-up. The hard end sheds
    floor(p n / 2); the easy end absorbs the remainder, since easy samples
    are the redundant ones. For ease-increasing metrics the hard end is the
    head of the ranking, otherwise the tail.
    """
    kept = _round_half_up((1.0 - p) * n)
    dropped = n - kept
    hard_trim = _floor_guarded(p * n / 2.0)
    easy_trim = dropped - hard_trim
    if higher_is_easier(metric):
        return hard_trim, kept, easy_trim
    return easy_trim, kept, hard_trim


def prune(
    ranking: Ranking,
    strategy: str,
    p: float,
    seed: int | None = None,
) -> PruneManifest:
    """Materialize a pruned subset from a ranking.

    Strategies:
      ambiguous  keep the middle band, trimming both extremes
      hard       keep the hardest (1-p) n samples
      easy       keep the easiest (1-p) n samples
      random     keep a uniform (1-p) n subset; requires a seed

    Kept/dropped id lists come out in ranking (score) order.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if not 0.0 <= p < 1.0:
        raise ValidationError(f"fraction p must be in [0, 1), got {p}")
    n = len(ranking)
    if n == 0:
        raise RankingError("empty ranking")
    head_trim, kept_n, tail_trim = split_sizes(n, p, ranking.metric)
    if kept_n == 0:
        raise ValidationError(f"keeping round((1-{p}) * {n}) = 0 samples; nothing left")

    ids = ranking.ids
    easier_high = higher_is_easier(ranking.metric)
    if strategy == "ambiguous":
        kept_pos = range(head_trim, head_trim + kept_n)
    elif strategy == "hard":
        kept_pos = range(0, kept_n) if easier_high else range(n - kept_n, n)
    elif strategy == "easy":
        kept_pos = range(n - kept_n, n) if easier_high else range(0, kept_n)
    else:
        if seed is None:
            raise ValidationError("random strategy requires a seed")
        kept_pos = sorted(random.Random(seed).sample(range(n), kept_n))

    kept_set = set(kept_pos)
    kept = tuple(ids[i] for i in sorted(kept_set))
    dropped = tuple(ids[i] for i in range(n) if i not in kept_set)
    return PruneManifest(
        strategy=strategy,
        fraction_pruned=float(p),
        scoring_epoch=ranking.scoring_epoch,
        metric=ranking.metric,
        kept=kept,
        dropped=dropped,
        seed=seed if strategy == "random" else None,
    )


def band_of(ranking: Ranking, p: float) -> dict[str, str]:
    """Assign each sample to hard / ambiguous / easy for a given fraction.

    Band boundaries are exactly the ambiguous strategy's trim boundaries,
    so band counts always reconcile with a prune at the same p.
    """
    n = len(ranking)
    head_trim, kept_n, _ = split_sizes(n, p, ranking.metric)
    head_band = "hard" if higher_is_easier(ranking.metric) else "easy"
    tail_band = "easy" if higher_is_easier(ranking.metric) else "hard"
    bands: dict[str, str] = {}
    for i, sid in enumerate(ranking.ids):
        if i < head_trim:
            bands[sid] = head_band
        elif i < head_trim + kept_n:
            bands[sid] = "ambiguous"
        else:
            bands[sid] = tail_band
    return bands
