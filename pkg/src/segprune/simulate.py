"""Synthetic training dynamics with planted difficulty.

Learning curves are saturating exponentials: flat initialization noise
around 0.1 until an onset epoch, then a rise toward a per-sample plateau.
That is the simplest family with the three phases real dense-prediction
runs show (noise, learning, saturation), and it makes the intended
difficulty order a known ground truth that ranking code can be tested
against.

Every sample draws from its own seeded substream, so trajectories are
reproducible and independent of which other samples share the ensemble.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .dynamics import ScoreRecord
from .errors import CalibrationError, ValidationError
from .metrics import dice
from .volumes import MaskVolume, ProbabilityVolume

DEFAULT_TAU0 = 20.0
PRE_ONSET_LEVEL = 0.1
CALIBRATION_TOL = 0.01
CALIBRATION_ENVELOPE = 0.05
BISECTION_STEPS = 30


@dataclass(frozen=True)
class SimSampleSpec:
    """One synthetic sample's learning-curve parameters.

    ``plateau`` is the asymptotic dice, ``tau`` the rise time constant in
    epochs, ``onset`` the epoch where learning starts (scores before it are
    initialization noise around 0.1), ``eta`` the Gaussian noise amplitude.
    ``difficulty`` records the planted ground truth for samples built via
    :meth:`from_difficulty`; it does not feed the curve directly.
    """

    sample_id: str
    plateau: float
    tau: float
    onset: int = 0
    eta: float = 0.0
    difficulty: float | None = None

    def __post_init__(self):
        if not isinstance(self.sample_id, str) or not self.sample_id:
            raise ValidationError(f"sample_id must be a nonempty string, got {self.sample_id!r}")
        if not 0.0 < self.plateau <= 1.0:
            raise ValidationError(f"plateau must be in (0, 1], got {self.plateau}")
        if self.tau <= 0.0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if self.onset < 0:
            raise ValidationError(f"onset must be >= 0, got {self.onset}")
        if self.eta < 0.0:
            raise ValidationError(f"eta must be >= 0, got {self.eta}")
        if self.difficulty is not None and not 0.0 <= self.difficulty <= 1.0:
            raise ValidationError(f"difficulty must be in [0, 1], got {self.difficulty}")

    @classmethod
    def from_difficulty(
        cls,
        sample_id: str,
        difficulty: float,
        eta: float = 0.0,
        onset: int = 0,
        tau0: float = DEFAULT_TAU0,
    ) -> "SimSampleSpec":
        """Derive curve parameters from a difficulty in [0, 1].

        Harder samples saturate lower and slower: plateau 1 - 0.3 d, time
        constant tau0 (1 + 4 d).
        """
        return cls(
            sample_id=sample_id,
            plateau=1.0 - 0.3 * difficulty,
            tau=tau0 * (1.0 + 4.0 * difficulty),
            onset=onset,
            eta=eta,
            difficulty=float(difficulty),
        )

    def mean_value(self, epoch: int) -> float:
        """Noise-free curve value at an epoch (the eta = 0 trajectory)."""
        if epoch < self.onset:
            return PRE_ONSET_LEVEL
        return self.plateau * (1.0 - math.exp(-(epoch - self.onset) / self.tau))

    def convergence_epoch(self) -> float:
        """Epoch by which the curve sits within ~0.7% of its plateau."""
        return self.onset + 5.0 * self.tau


def _substream(seed: int, sample_id: str, *extra: int) -> np.random.Generator:
    digest = hashlib.sha256(sample_id.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([seed, key, *extra]))


def trajectory_values(spec: SimSampleSpec, t_max: int, seed: int) -> np.ndarray:
    """Dice values for epochs 1..t_max, clamped to [0, 1]."""
    if t_max < 1:
        raise ValidationError(f"t_max must be >= 1, got {t_max}")
    rng = _substream(seed, spec.sample_id)
    noise = spec.eta * rng.standard_normal(t_max)
    epochs = np.arange(1, t_max + 1, dtype=np.float64)
    since_onset = np.maximum(epochs - spec.onset, 0.0)
    curve = spec.plateau * (1.0 - np.exp(-since_onset / spec.tau))
    values = np.where(epochs < spec.onset, PRE_ONSET_LEVEL, curve) + noise
    return np.clip(values, 0.0, 1.0)


def simulate_trajectories(
    specs: list[SimSampleSpec], t_max: int, seed: int
) -> list[ScoreRecord]:
    """Score records for every sample over epochs 1..t_max, epoch-major.

    Deterministic per seed; each sample's values are unchanged by adding or
    removing other samples.
    """
    if not specs:
        raise ValidationError("specs must be non-empty")
    ids = [s.sample_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate sample ids in specs")
    columns = {s.sample_id: trajectory_values(s, t_max, seed) for s in specs}
    records = []
    for e in range(1, t_max + 1):
        for spec in specs:
            records.append(ScoreRecord(
                sample_id=spec.sample_id,
                epoch=e,
                dice=float(columns[spec.sample_id][e - 1]),
            ))
    return records


def planted_ensemble(
    n: int,
    seed: int,
    eta: float = 0.02,
    onset_max: int = 30,
    tau0: float = DEFAULT_TAU0,
) -> list[SimSampleSpec]:
    """n samples with evenly spread difficulties and seeded random onsets.

    The planted order (by difficulty) is the ground truth that a DAD
    ranking should recover at any mid-training window.
    """
    if n < 2:
        raise ValidationError(f"need >= 2 samples, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xE45EB]))
    onsets = rng.integers(0, onset_max + 1, size=n)
    width = len(str(n - 1))
    return [
        SimSampleSpec.from_difficulty(
            sample_id=f"s{i:0{width}d}",
            difficulty=i / (n - 1),
            eta=eta,
            onset=int(onsets[i]),
            tau0=tau0,
        )
        for i in range(n)
    ]


def converging_ensemble(
    n: int,
    seed: int,
    eta: float = 0.01,
    onset_max: int = 10,
    tau0: float = 5.0,
) -> list[SimSampleSpec]:
    """Like :func:`planted_ensemble` but all plateaus pinned to 1.0.

    Every sample eventually reaches the same score, so late windows carry
    no ranking signal: the ensemble that makes score collapse observable.
    """
    specs = planted_ensemble(n, seed, eta=eta, onset_max=onset_max, tau0=tau0)
    return [
        SimSampleSpec(
            sample_id=s.sample_id,
            plateau=1.0,
            tau=s.tau,
            onset=s.onset,
            eta=s.eta,
            difficulty=s.difficulty,
        )
        for s in specs
    ]


def convergence_horizon(specs: list[SimSampleSpec], factor: float = 1.0) -> int:
    """Smallest epoch count covering factor x the slowest sample's convergence."""
    if not specs:
        raise ValidationError("specs must be non-empty")
    return int(math.ceil(factor * max(s.convergence_epoch() for s in specs)))


# ---------------------------------------------------------------------------
# Mask-sequence generation
# ---------------------------------------------------------------------------

def random_blob_mask(dims: tuple[int, ...], seed: int, foreground: float = 0.2) -> MaskVolume:
    """A smooth random blob mask with roughly the requested foreground share."""
    if not 0.0 < foreground < 1.0:
        raise ValidationError(f"foreground share must be in (0, 1), got {foreground}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB10B]))
    field = ndimage.gaussian_filter(rng.standard_normal(dims), sigma=max(min(dims) / 8.0, 1.0))
    mask = (field > np.quantile(field, 1.0 - foreground)).astype(np.uint8)
    if int(mask.sum()) == 0:
        raise ValidationError(f"no foreground at dims {dims}; raise the share")
    return MaskVolume(tuple(dims), mask)


def _flip_orders(truth: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Flip priorities: boundary voxels first, seeded jitter for salt scatter."""
    fg = truth.astype(bool)
    dist_in = ndimage.distance_transform_edt(fg)
    dist_out = ndimage.distance_transform_edt(~fg)
    jitter = 1.5 * rng.random(truth.shape)
    flat_fg = np.flatnonzero(fg.ravel())
    flat_bg = np.flatnonzero(~fg.ravel())
    key = (dist_in + jitter).ravel()
    fg_order = flat_fg[np.argsort(key[flat_fg], kind="stable")]
    key = (dist_out + jitter).ravel()
    bg_order = flat_bg[np.argsort(key[flat_bg], kind="stable")]
    return fg_order, bg_order


def _corrupt(truth: np.ndarray, strength: float, fg_order: np.ndarray,
             bg_order: np.ndarray) -> np.ndarray:
    n_fg = fg_order.size
    k_erode = min(int(round(strength * n_fg)), n_fg)
    k_dilate = min(int(round(strength * n_fg)), bg_order.size)
    flat = truth.ravel().copy()
    flat[fg_order[:k_erode]] = 0
    flat[bg_order[:k_dilate]] = 1
    return flat.reshape(truth.shape)


def _calibrate(truth_vol: MaskVolume, target: float, fg_order: np.ndarray,
               bg_order: np.ndarray) -> np.ndarray:
    """Bisect corruption strength until measured dice hits the target."""
    truth = truth_vol.data
    lo, hi = 0.0, 1.0
    best, best_err = truth, abs(1.0 - target)
    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2.0
        cand = _corrupt(truth, mid, fg_order, bg_order)
        d = dice(MaskVolume(truth_vol.dims, cand), truth_vol)
        err = abs(d - target)
        if err < best_err:
            best, best_err = cand, err
        if err <= CALIBRATION_TOL:
            break
        if d > target:
            lo = mid
        else:
            hi = mid
    if best_err > CALIBRATION_ENVELOPE:
        raise CalibrationError(
            f"cannot reach dice {target:.4f} on this volume; best miss {best_err:.4f}"
        )
    return best


def simulate_mask_sequence(
    truth: MaskVolume, spec: SimSampleSpec, t_max: int, seed: int
) -> list[ProbabilityVolume]:
    """Per-epoch probability volumes whose thresholded dice follows the curve.

    Corruption erodes and dilates the truth boundary with a salted flip
    order, re-randomized each epoch; a bisection against the dice metric
    picks the strength hitting the sample's noise-free target within +-0.05.
    At target 1.0 the thresholded output is the truth mask itself.
    """
    if t_max < 1:
        raise ValidationError(f"t_max must be >= 1, got {t_max}")
    if truth.foreground_count == 0:
        raise ValidationError("truth mask has no foreground")
    out = []
    for e in range(1, t_max + 1):
        rng = _substream(seed, spec.sample_id, e)
        target = min(max(spec.mean_value(e), 0.0), 1.0)
        fg_order, bg_order = _flip_orders(truth.data, rng)
        corrupted = _calibrate(truth, target, fg_order, bg_order)
        # 0.75 c + 0.25 u keeps binarize(vol) == corrupted for any jitter u
        soft = 0.75 * corrupted.astype(np.float32) + 0.25 * rng.random(
            truth.dims, dtype=np.float32
        )
        out.append(ProbabilityVolume(truth.dims, soft.astype(np.float32)))
    return out
