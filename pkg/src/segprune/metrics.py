"""Per-sample difficulty metrics over mask and probability volumes.

All functions are pure, deterministic, and accumulate in canonical C voxel
order. Whole-volume error norms are divided by sqrt(voxel count) so scores
stay comparable across volumes of different sizes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyForeground, ShapeMismatch
from .volumes import MaskVolume, ProbabilityVolume, SaliencyStack


def _require_same_dims(a, b) -> None:
    if a.dims != b.dims:
        raise ShapeMismatch(a.dims, b.dims)


def dice(pred: MaskVolume, truth: MaskVolume) -> float:
    """Overlap between two binary masks: 2|P∩T| / (|P| + |T|).

    Two all-background masks agree perfectly and score 1.0; one empty mask
    against a nonempty one scores 0.0.
    """
    _require_same_dims(pred, truth)
    inter = int(np.count_nonzero(np.logical_and(pred.data, truth.data)))
    total = pred.foreground_count + truth.foreground_count
    if total == 0:
        return 1.0
    return 2.0 * inter / total


def naive_l2_score(pred: ProbabilityVolume, truth: MaskVolume) -> float:
    """Whole-volume L2 error, normalized by sqrt(voxel count).

    The baseline difficulty score that a dense-labeling task breaks: with a
    small foreground the value is dominated by the many background voxels.
    """
    _require_same_dims(pred, truth)
    diff = pred.data.astype(np.float64) - truth.data.astype(np.float64)
    return math.sqrt(float(np.sum(diff * diff))) / math.sqrt(pred.voxel_count)


def el2n(pred: ProbabilityVolume, truth: MaskVolume) -> float:
    """L2 norm of the per-voxel probability error over the whole volume.

    Normalized by sqrt(voxel count); a maximally wrong hard prediction
    scores 1.0.
    """
    _require_same_dims(pred, truth)
    diff = pred.data.astype(np.float64) - truth.data.astype(np.float64)
    return math.sqrt(float(np.sum(diff * diff))) / math.sqrt(pred.voxel_count)


def el2nx(pred: ProbabilityVolume, truth: MaskVolume) -> float:
    """L2 error restricted to foreground voxels of the ground truth.

    Background predictions never enter the sum, so the score reflects only
    how well the target region itself is predicted. Normalized by
    sqrt(foreground voxel count).
    """
    _require_same_dims(pred, truth)
    fg = truth.data == 1
    n_fg = int(np.count_nonzero(fg))
    if n_fg == 0:
        raise EmptyForeground("truth mask has no foreground voxels")
    diff = pred.data[fg].astype(np.float64) - 1.0
    return math.sqrt(float(np.sum(diff * diff))) / math.sqrt(n_fg)


def vog(saliency: SaliencyStack) -> float:
    """Mean over voxels of the across-epoch population variance of saliency.

    Dataset-level normalization (mean/std across samples) is the caller's
    job; this returns the raw per-sample scalar.
    """
    stacked = np.stack(saliency.volumes, axis=0)
    per_voxel_var = np.var(stacked, axis=0, ddof=0)
    return float(np.mean(per_voxel_var))
