import numpy as np


def dice_score(pred: np.ndarray, truth: np.ndarray) -> float:
    """Overlap between binary masks; both empty counts as perfect.

    Predictions arriving as probabilities are cut at 0.5 with ties going
    to foreground, matching how the engine binarizes dumped volumes.
    """
    p = np.asarray(pred)
    if p.dtype != np.uint8 and p.dtype != bool:
        p = np.asarray(pred, dtype=np.float32) >= 0.5
    p = p.astype(bool)
    t = np.asarray(truth).astype(bool)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {t.shape}")
    denom = int(p.sum()) + int(t.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int(np.logical_and(p, t).sum()) / denom
