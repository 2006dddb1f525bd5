"""Dense volume containers: binary label grids and per-voxel probabilities.

Volumes are small, dense numpy arrays in canonical C order. Dims are
``(width, height)`` or ``(width, height, depth)``, matching the on-disk
layout where the last axis varies fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, ValidationError

Dims = tuple[int, ...]


def _check_dims(dims: Dims) -> Dims:
    dims = tuple(int(d) for d in dims)
    if len(dims) not in (2, 3):
        raise ValidationError(f"dims must have 2 or 3 axes, got {dims}")
    if any(d < 1 for d in dims):
        raise ValidationError(f"dims must be positive, got {dims}")
    return dims


def _shape_data(data, dims: Dims, dtype) -> np.ndarray:
    arr = np.asarray(data, dtype=dtype)
    n = int(np.prod(dims))
    if arr.ndim == 1:
        if arr.size != n:
            raise ValidationError(
                f"data length {arr.size} does not match dims {dims} ({n} voxels)"
            )
        arr = arr.reshape(dims)
    elif arr.shape != dims:
        raise ValidationError(f"data shape {arr.shape} does not match dims {dims}")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MaskVolume:
    """Binary segmentation grid: exactly one 0/1 value per voxel."""

    dims: Dims
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", _check_dims(self.dims))
        arr = _shape_data(self.data, self.dims, np.uint8)
        if arr.size and int(arr.max(initial=0)) > 1:
            raise ValidationError("mask voxels must be exactly 0 or 1")
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr) -> "MaskVolume":
        arr = np.asarray(arr)
        return cls(dims=arr.shape, data=arr)

    @property
    def voxel_count(self) -> int:
        return int(self.data.size)

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.data))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaskVolume):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.data, other.data)


@dataclass(frozen=True)
class ProbabilityVolume:
    """Per-voxel foreground probabilities, every value in [0, 1]."""

    dims: Dims
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", _check_dims(self.dims))
        arr = _shape_data(self.data, self.dims, np.float32)
        # NaN fails both comparisons, so this also rejects NaN payloads.
        ok = np.logical_and(arr >= 0.0, arr <= 1.0)
        if not bool(ok.all()):
            bad = int(np.argmin(ok.ravel()))
            raise ValidationError(
                f"probability voxel {bad} = {arr.ravel()[bad]!r} outside [0, 1]"
            )
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr) -> "ProbabilityVolume":
        arr = np.asarray(arr)
        return cls(dims=arr.shape, data=arr)

    @property
    def voxel_count(self) -> int:
        return int(self.data.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbabilityVolume):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.data, other.data)


def binarize(prob: ProbabilityVolume, threshold: float = 0.5) -> MaskVolume:
    """Threshold probabilities into a mask.

    Ties (values exactly at the threshold) map to foreground; the rule is
    fixed so downstream dice values are reproducible.
    """
    return MaskVolume(prob.dims, (prob.data >= threshold).astype(np.uint8))


@dataclass(frozen=True)
class SaliencyStack:
    """One real-valued volume per training epoch, all with identical dims.

    Carries gradient/saliency magnitudes produced upstream; the engine only
    aggregates them.
    """

    epochs: tuple[int, ...]
    volumes: tuple[np.ndarray, ...]

    def __post_init__(self):
        epochs = tuple(int(e) for e in self.epochs)
        vols = tuple(np.ascontiguousarray(np.asarray(v, dtype=np.float64)) for v in self.volumes)
        if len(vols) != len(epochs):
            raise ValidationError(
                f"{len(epochs)} epochs but {len(vols)} volumes"
            )
        if len(vols) < 2:
            raise InsufficientData(
                f"saliency stack needs at least 2 volumes, got {len(vols)}"
            )
        if any(b <= a for a, b in zip(epochs, epochs[1:])):
            raise ValidationError(f"epochs must be strictly increasing, got {epochs}")
        dims = vols[0].shape
        _check_dims(dims)
        for i, v in enumerate(vols):
            if v.shape != dims:
                raise ValidationError(f"volume {i} has dims {v.shape}, expected {dims}")
        for v in vols:
            v.flags.writeable = False
        object.__setattr__(self, "epochs", epochs)
        object.__setattr__(self, "volumes", vols)

    @property
    def dims(self) -> Dims:
        return tuple(self.volumes[0].shape)
