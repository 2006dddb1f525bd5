"""Brute-force reference implementations, deliberately independent.

Everything here is plain-Python summation over flat voxel lists (math
module only, no numpy) so a bug in the library's vectorized code cannot
hide in its own oracle.
"""

import math
from fractions import Fraction


def dice_oracle(pred, truth):
    inter = sum(1 for p, t in zip(pred, truth) if p == 1 and t == 1)
    total = sum(pred) + sum(truth)
    if total == 0:
        return 1.0
    return 2.0 * inter / total


def l2_oracle(pred, truth):
    acc = 0.0
    for p, t in zip(pred, truth):
        acc += (float(p) - float(t)) ** 2
    return math.sqrt(acc) / math.sqrt(len(pred))


def el2nx_oracle(pred, truth):
    acc, count = 0.0, 0
    for p, t in zip(pred, truth):
        if t == 1:
            acc += (float(p) - 1.0) ** 2
            count += 1
    return math.sqrt(acc) / math.sqrt(count)


def vog_oracle(volumes):
    """volumes: list of flat per-epoch voxel lists, all the same length."""
    k = len(volumes)
    n = len(volumes[0])
    total = 0.0
    for v in range(n):
        vals = [float(vol[v]) for vol in volumes]
        mean = sum(vals) / k
        total += sum((x - mean) ** 2 for x in vals) / k
    return total / n


def kept_size_oracle(n, p):
    """Exact half-up round of (1 - p) n in rational arithmetic."""
    kept = (1 - Fraction(str(p))) * n
    return int(kept + Fraction(1, 2)) if kept % 1 != 0 else int(kept)


def ambiguous_kept_oracle(n, p):
    """Positions kept by a symmetric trim, enumerated index by index.

    Drops floor(p n / 2) from the hard end and the remaining dropped
    count from the easy end of an ascending easier-is-higher ranking.
    """
    kept = kept_size_oracle(n, p)
    hard_trim = int(Fraction(str(p)) * n / 2)
    return list(range(hard_trim, hard_trim + kept))
