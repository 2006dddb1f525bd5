"""Per-sample score trajectories and the quantities derived from them.

The store holds one dice value per (sample, epoch) for every complete epoch.
On top of it sit the windowed difficulty score (trailing mean of dice), its
variability (trailing population std), per-epoch snapshots of both, the
moving-distance curve between snapshots, and the 1%-of-peak stop rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompleteWindow,
    InsufficientData,
    SampleSetMismatch,
    StreamError,
    UnknownSample,
    ValidationError,
)

STOP_THRESHOLD = 0.01


@dataclass(frozen=True)
class DadWindow:
    """Trailing window length, in epochs.

    A window at epoch ``t`` covers exactly the ``delta_t`` most recent
    epochs ``[t - delta_t + 1, t]`` and divides by ``delta_t``; a window of
    one returns the value at ``t`` itself. Ten or more epochs smooth out
    per-epoch jitter, hence the default.
    """

    delta_t: int = 10

    def __post_init__(self):
        if int(self.delta_t) < 1:
            raise ValidationError(f"window length must be >= 1, got {self.delta_t}")
        object.__setattr__(self, "delta_t", int(self.delta_t))


def _as_window(window: "DadWindow | int") -> DadWindow:
    return window if isinstance(window, DadWindow) else DadWindow(window)


@dataclass
class ScoreRecord:
    """One (sample, epoch) observation: dice plus optional named extras."""

    sample_id: str
    epoch: int
    dice: float
    extras: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.sample_id, str) or not self.sample_id:
            raise ValidationError(f"sample_id must be a nonempty string, got {self.sample_id!r}")
        if int(self.epoch) < 0:
            raise ValidationError(f"epoch must be >= 0, got {self.epoch}")
        self.epoch = int(self.epoch)
        self.dice = float(self.dice)
        if not 0.0 <= self.dice <= 1.0:
            raise ValidationError(f"dice must be in [0, 1], got {self.dice}")


class TrajectoryStore:
    """Append-only matrix of dice trajectories over complete epochs.

    Built once from records, read many times; epochs at which some known
    sample is missing are excluded with a warning, so every analytic
    operation sees a dense (sample x epoch) grid.
    """

    def __init__(
        self,
        samples: tuple[str, ...],
        epochs: tuple[int, ...],
        dice_matrix: np.ndarray,
        extras: dict[str, np.ndarray] | None = None,
        warnings: tuple[str, ...] = (),
    ):
        self._samples = tuple(samples)
        self._epochs = tuple(epochs)
        self._index = {s: i for i, s in enumerate(self._samples)}
        self._epoch_index = {e: j for j, e in enumerate(self._epochs)}
        self._dice = np.asarray(dice_matrix, dtype=np.float64)
        self._extras = {k: np.asarray(v, dtype=np.float64) for k, v in (extras or {}).items()}
        self.warnings = tuple(warnings)

    @classmethod
    def build(cls, records) -> "TrajectoryStore":
        """Assemble a store from an iterable of ScoreRecords.

        Duplicate (sample, epoch) pairs are rejected. Epochs not covering
        the full sample set (the union of ids seen anywhere) are excluded
        and reported through ``store.warnings``.
        """
        by_key: dict[tuple[str, int], ScoreRecord] = {}
        for rec in records:
            key = (rec.sample_id, rec.epoch)
            if key in by_key:
                raise StreamError(0, f"duplicate record for {key}")
            by_key[key] = rec
        if not by_key:
            raise InsufficientData("no records")

        samples = tuple(sorted({sid for sid, _ in by_key}))
        all_epochs = sorted({e for _, e in by_key})
        complete, warnings = [], []
        for e in all_epochs:
            missing = [s for s in samples if (s, e) not in by_key]
            if missing:
                shown = ", ".join(missing[:5])
                warnings.append(
                    f"excluded partial epoch {e} (missing {len(missing)} samples: {shown})"
                )
            else:
                complete.append(e)
        if not complete:
            raise InsufficientData("no complete epochs")

        n, t = len(samples), len(complete)
        dice = np.empty((n, t), dtype=np.float64)
        extra_names = sorted({k for rec in by_key.values() for k in rec.extras})
        extras = {k: np.full((n, t), np.nan) for k in extra_names}
        for i, s in enumerate(samples):
            for j, e in enumerate(complete):
                rec = by_key[(s, e)]
                dice[i, j] = rec.dice
                for k, v in rec.extras.items():
                    extras[k][i, j] = float(v)
        return cls(samples, tuple(complete), dice, extras, tuple(warnings))

    @property
    def samples(self) -> tuple[str, ...]:
        return self._samples

    @property
    def epochs(self) -> tuple[int, ...]:
        return self._epochs

    @property
    def sample_count(self) -> int:
        return len(self._samples)

    @property
    def epoch_count(self) -> int:
        return len(self._epochs)

    @property
    def metric_names(self) -> tuple[str, ...]:
        return ("dice",) + tuple(sorted(self._extras))

    def _sample_row(self, sample_id: str) -> int:
        try:
            return self._index[sample_id]
        except KeyError:
            raise UnknownSample(f"sample {sample_id!r} not in store") from None

    def dice_at(self, sample_id: str, epoch: int) -> float:
        i = self._sample_row(sample_id)
        if epoch not in self._epoch_index:
            raise IncompleteWindow(sample_id, [epoch])
        return float(self._dice[i, self._epoch_index[epoch]])

    def window_values(
        self, sample_id: str, t: int, window: "DadWindow | int", metric: str = "dice"
    ) -> np.ndarray:
        """Values of ``metric`` over the trailing window ending at epoch t."""
        delta = _as_window(window).delta_t
        i = self._sample_row(sample_id)
        wanted = range(t - delta + 1, t + 1)
        missing = [e for e in wanted if e not in self._epoch_index]
        if missing:
            raise IncompleteWindow(sample_id, missing)
        cols = [self._epoch_index[e] for e in wanted]
        if metric == "dice":
            return self._dice[i, cols]
        if metric not in self._extras:
            raise UnknownSample(f"metric {metric!r} not in store")
        vals = self._extras[metric][i, cols]
        if np.isnan(vals).any():
            bad = [e for e, v in zip(wanted, vals) if math.isnan(v)]
            raise IncompleteWindow(sample_id, bad)
        return vals

    def window_matrix(self, t: int, window: "DadWindow | int") -> np.ndarray:
        """Dice values for all samples over the window, shape (n, delta_t)."""
        delta = _as_window(window).delta_t
        wanted = range(t - delta + 1, t + 1)
        missing = [e for e in wanted if e not in self._epoch_index]
        if missing:
            raise IncompleteWindow(self._samples[0] if self._samples else "?", missing)
        cols = [self._epoch_index[e] for e in wanted]
        return self._dice[:, cols]


def dad_score(
    store: TrajectoryStore, sample_id: str, t: int, window: DadWindow | int = DadWindow()
) -> float:
    """Trailing mean of dice over the window ending at epoch t.

    High values mean the model segments the sample consistently well, i.e.
    the sample is easy to learn.
    """
    return float(np.mean(store.window_values(sample_id, t, window)))


def full_horizon_dad(store: TrajectoryStore, sample_id: str, t_max: int | None = None) -> float:
    """Mean dice over every recorded epoch up to and including ``t_max``.

    Kept for degeneracy analysis: once trajectories converge this average
    flattens toward a constant and stops separating samples.
    """
    i = store._sample_row(sample_id)
    if t_max is None:
        cols = range(store.epoch_count)
    else:
        cols = [j for j, e in enumerate(store.epochs) if e <= t_max]
    if not len(cols):
        raise InsufficientData(f"no epochs at or before {t_max}")
    return float(np.mean(store._dice[i, list(cols)]))


def variability(
    store: TrajectoryStore, sample_id: str, t: int, window: DadWindow | int = DadWindow()
) -> float:
    """Population standard deviation of dice over the same trailing window.

    Zero for a constant trajectory; large values flag samples the model
    keeps re-learning and forgetting. Never exceeds 0.5 for [0, 1] data.
    """
    return float(np.std(store.window_values(sample_id, t, window)))


@dataclass(frozen=True)
class SampleDynamics:
    sample_id: str
    mu: float
    sigma: float


@dataclass(frozen=True)
class DynamicsSnapshot:
    """Per-sample (windowed mean, windowed std) at a reference epoch.

    Entries are ordered by sample id; these are the coordinates of one
    frame of the data map.
    """

    epoch: int
    entries: tuple[SampleDynamics, ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(e.sample_id for e in self.entries)

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return {e.sample_id: (e.mu, e.sigma) for e in self.entries}

    def mu_by_id(self) -> dict[str, float]:
        return {e.sample_id: e.mu for e in self.entries}


def snapshot(
    store: TrajectoryStore, t: int, window: DadWindow | int = DadWindow()
) -> DynamicsSnapshot:
    """Compute (mu, sigma) for every sample at epoch t in one pass."""
    mat = store.window_matrix(t, window)
    mus = mat.mean(axis=1)
    sigmas = mat.std(axis=1)
    entries = tuple(
        SampleDynamics(sid, float(m), float(s))
        for sid, m, s in zip(store.samples, mus, sigmas)
    )
    return DynamicsSnapshot(epoch=int(t), entries=entries)


def moving_distance(
    prev: DynamicsSnapshot, curr: DynamicsSnapshot, signed: bool = False
) -> float:
    """Total movement of the sample cloud between two snapshots.

    Sums |d mu| + |d sigma| over samples. ``signed=True`` sums the raw
    differences instead, under which opposite movements cancel; it exists
    for comparison runs and is not used by the stop rule.
    """
    prev_map = prev.as_dict()
    curr_map = curr.as_dict()
    if prev_map.keys() != curr_map.keys():
        only_prev = prev_map.keys() - curr_map.keys()
        only_curr = curr_map.keys() - prev_map.keys()
        raise SampleSetMismatch(set(only_prev), set(only_curr))
    total = 0.0
    for sid in sorted(prev_map):
        dmu = curr_map[sid][0] - prev_map[sid][0]
        dsig = curr_map[sid][1] - prev_map[sid][1]
        if signed:
            total += dmu + dsig
        else:
            total += abs(dmu) + abs(dsig)
    return total


@dataclass(frozen=True)
class StopDecision:
    """Outcome of the 1%-of-peak rule with its diagnostics."""

    stop: bool
    l_current: float
    l_max: float
    ratio: float
    threshold: float = STOP_THRESHOLD


def should_stop(history, threshold: float = STOP_THRESHOLD) -> StopDecision:
    """Decide whether the ranking has stabilized.

    Stops once the newest moving distance falls below ``threshold`` times
    the maximum seen so far. A history of one can never stop: the first
    observation has no prior peak to compare against.
    """
    history = list(history)
    if not history:
        raise ValidationError("moving-distance history is empty")
    l_current = float(history[-1])
    l_max = float(max(history))
    ratio = l_current / l_max if l_max > 0 else float("nan")
    stop = len(history) >= 2 and l_current < threshold * l_max
    return StopDecision(stop=stop, l_current=l_current, l_max=l_max, ratio=ratio,
                        threshold=threshold)


def find_stop_index(l_values, threshold: float = STOP_THRESHOLD) -> int | None:
    """Index into ``l_values`` where the stop rule first fires, or None."""
    values = [float(v) for v in l_values]
    for i in range(len(values)):
        if should_stop(values[: i + 1], threshold).stop:
            return i
    return None


def subset_overlap(a, b) -> float:
    """Fraction of shared ids between two equal-size subsets."""
    a, b = set(a), set(b)
    if not a or not b:
        raise ValidationError("subsets must be nonempty")
    if len(a) != len(b):
        raise ValidationError(f"subset sizes differ: {len(a)} vs {len(b)}")
    return len(a & b) / len(a)


@dataclass(frozen=True)
class ScanResult:
    """Moving-distance curve over a store plus the stop decision."""

    points: tuple[tuple[int, float], ...]
    stop_epoch: int | None
    snapshots: dict[int, DynamicsSnapshot]
    threshold: float

    @property
    def l_values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.points)

    @property
    def l_max(self) -> float:
        return max(self.l_values) if self.points else float("nan")


def stability_scan(
    store: TrajectoryStore,
    window: DadWindow | int = DadWindow(),
    cadence: int | None = None,
    signed: bool = False,
    threshold: float = STOP_THRESHOLD,
) -> ScanResult:
    """Walk the store, snapshotting every ``cadence`` epochs, and build L.

    Cadence defaults to the window length, giving consecutive
    non-overlapping windows. The scan always covers the full store; the
    result records where the stop rule would first have fired.
    """
    win = _as_window(window)
    cadence = win.delta_t if cadence is None else int(cadence)
    if cadence < 1:
        raise ValidationError(f"cadence must be >= 1, got {cadence}")
    epochs = store.epochs
    if len(epochs) < win.delta_t:
        raise InsufficientData(
            f"store has {len(epochs)} epochs, window needs {win.delta_t}"
        )
    if epochs[-1] - epochs[0] + 1 != len(epochs):
        missing = sorted(set(range(epochs[0], epochs[-1] + 1)) - set(epochs))
        raise IncompleteWindow(store.samples[0], missing)

    snap_epochs = list(range(epochs[win.delta_t - 1], epochs[-1] + 1, cadence))
    snapshots = {t: snapshot(store, t, win) for t in snap_epochs}
    points: list[tuple[int, float]] = []
    history: list[float] = []
    stop_epoch: int | None = None
    for prev_t, curr_t in zip(snap_epochs, snap_epochs[1:]):
        l_val = moving_distance(snapshots[prev_t], snapshots[curr_t], signed=signed)
        history.append(l_val)
        points.append((curr_t, l_val))
        if stop_epoch is None and should_stop(history, threshold).stop:
            stop_epoch = curr_t
    return ScanResult(
        points=tuple(points),
        stop_epoch=stop_epoch,
        snapshots=snapshots,
        threshold=threshold,
    )
