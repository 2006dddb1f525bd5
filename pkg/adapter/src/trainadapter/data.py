"""Synthetic 2D shapes with a difficulty dial and optional junk labels.

Difficulty lowers foreground contrast and raises blur, so hard samples
are genuinely harder to segment, not just noisier. Junk samples model
annotation errors: the image is normal but the mask is inverted, so
fitting them means unlearning the true mapping. No model can score well
on them, which parks them at the hard extreme of any dynamics ranking.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter


@dataclass(frozen=True)
class SegSample:
    sample_id: str
    image: np.ndarray  # float32, (size, size), [0, 1]
    mask: np.ndarray  # uint8, (size, size)
    difficulty: float
    junk: bool = False


def _ellipse_mask(rng: np.random.Generator, size: int) -> np.ndarray:
    mask = np.zeros((size, size), dtype=np.uint8)
    yy, xx = np.mgrid[0:size, 0:size]
    for _ in range(int(rng.integers(1, 4))):
        cy, cx = rng.uniform(0.2 * size, 0.8 * size, 2)
        ry = rng.uniform(0.08 * size, 0.22 * size)
        rx = rng.uniform(0.08 * size, 0.22 * size)
        mask |= (((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0).astype(
            np.uint8
        )
    return mask


def _render(
    rng: np.random.Generator, mask: np.ndarray, difficulty: float
) -> np.ndarray:
    contrast = 1.0 - 0.8 * difficulty
    blur = 0.5 + 1.5 * difficulty
    img = 0.2 + contrast * 0.6 * mask.astype(np.float32)
    img = gaussian_filter(img, sigma=blur)
    img += rng.normal(0.0, 0.04, img.shape)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def make_dataset(
    n: int,
    seed: int,
    size: int = 64,
    junk_fraction: float = 0.0,
    max_difficulty: float = 1.0,
) -> list[SegSample]:
    """n samples with difficulties evenly spread over [0, max_difficulty].

    round(junk_fraction * n) samples at random difficulty slots get the
    inverted mask. Held-out sets typically cap max_difficulty below 1 so
    they only score on images whose mask is actually recoverable.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if not 0.0 <= junk_fraction < 1.0:
        raise ValueError(f"junk fraction must be in [0, 1), got {junk_fraction}")
    if not 0.0 < max_difficulty <= 1.0:
        raise ValueError(f"max difficulty must be in (0, 1], got {max_difficulty}")
    rng = np.random.default_rng(seed)
    n_junk = round(junk_fraction * n)
    junk_idx = set(rng.choice(n, size=n_junk, replace=False).tolist())
    width = len(str(n - 1))
    samples = []
    for i in range(n):
        difficulty = max_difficulty * i / (n - 1) if n > 1 else 0.0
        mask = _ellipse_mask(rng, size)
        image = _render(rng, mask, difficulty)
        if i in junk_idx:
            mask = (1 - mask).astype(np.uint8)  # annotation error
        samples.append(
            SegSample(
                sample_id=f"img{i:0{width}d}",
                image=image,
                mask=mask,
                difficulty=difficulty,
                junk=i in junk_idx,
            )
        )
    return samples
