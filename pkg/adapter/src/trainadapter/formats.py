"""Engine wire formats, written from this side of the fence.

The volume layout is magic ``DDT1``, a dtype byte (0 = uint8 mask,
1 = float32), an axis-count byte, little-endian uint32 dims, then the
row-major payload. Score lines are one JSON object per line. Both must
match what the engine reads byte for byte, so keep this file boring.
"""

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"DDT1"
VOLUME_SUFFIX = ".ddt1"


def _header(dtype_byte: int, shape: tuple[int, ...]) -> bytes:
    if len(shape) not in (2, 3):
        raise ValueError(f"volumes must have 2 or 3 axes, got {len(shape)}")
    return (
        MAGIC
        + bytes([dtype_byte, len(shape)])
        + b"".join(struct.pack("<I", d) for d in shape)
    )


def write_mask(path: Path, mask: np.ndarray) -> None:
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("mask voxels must be 0 or 1")
    Path(path).write_bytes(_header(0, arr.shape) + arr.tobytes())


def write_prob(path: Path, prob: np.ndarray) -> None:
    arr = np.ascontiguousarray(prob, dtype=np.float32)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    Path(path).write_bytes(
        _header(1, arr.shape) + arr.astype("<f4").tobytes()
    )


def score_line(sample_id: str, epoch: int, dice: float) -> str:
    return json.dumps({"sample_id": sample_id, "epoch": epoch, "dice": dice})


def read_manifest_ids(path: Path) -> list[str]:
    """Kept sample ids from an engine prune manifest."""
    obj = json.loads(Path(path).read_text())
    if obj.get("format") != "prune-manifest-v1":
        raise ValueError(f"not a prune manifest: {path}")
    return list(obj["kept"])
