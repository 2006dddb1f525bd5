"""File formats: DDT1 binary volumes, JSONL score streams, prune manifests.

These layouts are the engine's public contract; adapters on the training
side produce them independently. Everything round-trips bit-exactly and
every corruption class maps to a structured error instead of a crash.

DDT1 layout (little-endian throughout)::

    offset 0   4 bytes   magic "DDT1"
    offset 4   1 byte    dtype: 0 = uint8 mask, 1 = float32 probabilities
    offset 5   1 byte    ndim: 2 or 3
    offset 6   ndim * 4  dims as uint32 (width, height[, depth])
    then       product(dims) * dtype-size bytes, row-major (last axis fastest)

Score streams are JSON objects, one per line, appended epoch by epoch::

    {"sample_id": "s001", "epoch": 3, "dice": 0.8125, "el2n": 0.04}

``sample_id`` (nonempty string), ``epoch`` (integer >= 0) and ``dice``
(number in [0, 1]) are required; any further keys must be numeric metrics.
"""

from __future__ import annotations

import json
import struct
import warnings as _warnings
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .dynamics import ScoreRecord, TrajectoryStore
from .errors import FormatError, StreamError, ValidationError
from .metrics import dice as dice_metric
from .pruning import PruneManifest
from .volumes import MaskVolume, ProbabilityVolume, binarize

MAGIC = b"DDT1"
DTYPE_MASK = 0
DTYPE_FLOAT32 = 1
# Desk-scale tool: refuse absurd headers before allocating anything.
MAX_VOXELS = 1 << 32


# ---------------------------------------------------------------------------
# DDT1 volumes
# ---------------------------------------------------------------------------

def volume_to_bytes(vol: MaskVolume | ProbabilityVolume) -> bytes:
    """Serialize a volume to the DDT1 byte layout."""
    if isinstance(vol, MaskVolume):
        dtype_byte, payload = DTYPE_MASK, vol.data.astype(np.uint8).tobytes(order="C")
    elif isinstance(vol, ProbabilityVolume):
        dtype_byte, payload = DTYPE_FLOAT32, vol.data.astype("<f4").tobytes(order="C")
    else:
        raise ValidationError(f"cannot serialize {type(vol).__name__}")
    ndim = len(vol.dims)
    header = MAGIC + bytes([dtype_byte, ndim]) + struct.pack(f"<{ndim}I", *vol.dims)
    return header + payload


def volume_from_bytes(buf: bytes) -> MaskVolume | ProbabilityVolume:
    """Parse DDT1 bytes, raising FormatError with a byte offset on corruption."""
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise FormatError("bad-magic", 0, f"expected {MAGIC!r}, got {buf[:4]!r}")
    if len(buf) < 6:
        raise FormatError("truncated-header", len(buf), "header cut short")
    dtype_byte = buf[4]
    if dtype_byte not in (DTYPE_MASK, DTYPE_FLOAT32):
        raise FormatError("bad-dtype", 4, f"dtype byte {dtype_byte} not in {{0, 1}}")
    ndim = buf[5]
    if ndim not in (2, 3):
        raise FormatError("bad-ndim", 5, f"ndim byte {ndim} not in {{2, 3}}")
    header_end = 6 + 4 * ndim
    if len(buf) < header_end:
        raise FormatError("truncated-header", len(buf), f"need {header_end} header bytes")
    dims = struct.unpack(f"<{ndim}I", buf[6:header_end])
    if any(d == 0 for d in dims):
        raise FormatError("bad-dims", 6, f"zero-sized axis in dims {dims}")
    n_voxels = 1
    for d in dims:
        n_voxels *= d
    if n_voxels > MAX_VOXELS:
        raise FormatError("dims-overflow", 6, f"dims {dims} declare {n_voxels} voxels")
    item = 1 if dtype_byte == DTYPE_MASK else 4
    expected = n_voxels * item
    actual = len(buf) - header_end
    if actual < expected:
        raise FormatError(
            "truncated-payload", header_end + actual,
            f"payload has {actual} of {expected} bytes",
        )
    if actual > expected:
        raise FormatError(
            "trailing-data", header_end + expected,
            f"{actual - expected} bytes past declared payload",
        )
    payload = buf[header_end:]
    if dtype_byte == DTYPE_MASK:
        data = np.frombuffer(payload, dtype=np.uint8)
        bad = np.nonzero(data > 1)[0]
        if bad.size:
            off = header_end + int(bad[0])
            raise FormatError("bad-mask-byte", off, f"mask byte {data[bad[0]]} not in {{0, 1}}")
        return MaskVolume(dims, data.reshape(dims))
    data = np.frombuffer(payload, dtype="<f4")
    ok = np.logical_and(data >= 0.0, data <= 1.0)
    if not bool(ok.all()):
        idx = int(np.argmin(ok))
        off = header_end + 4 * idx
        raise FormatError("value-range", off, f"probability {data[idx]!r} outside [0, 1]")
    return ProbabilityVolume(dims, data.reshape(dims).astype(np.float32))


def write_volume(path: str | Path, vol: MaskVolume | ProbabilityVolume) -> None:
    Path(path).write_bytes(volume_to_bytes(vol))


def read_volume(path: str | Path) -> MaskVolume | ProbabilityVolume:
    return volume_from_bytes(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Score streams
# ---------------------------------------------------------------------------

def format_score_line(record: ScoreRecord) -> str:
    """One stream line, without the trailing newline. Extras sorted by name."""
    obj: dict = {"sample_id": record.sample_id, "epoch": record.epoch, "dice": record.dice}
    for k in sorted(record.extras):
        obj[k] = record.extras[k]
    return json.dumps(obj)


def append_scores(path: str | Path, records: Iterable[ScoreRecord]) -> int:
    """Append records as complete lines; returns how many were written."""
    count = 0
    with open(path, "a", encoding="utf-8") as fh:
        for rec in records:
            fh.write(format_score_line(rec) + "\n")
            count += 1
    return count


def _parse_score_obj(line_no: int, text: str) -> ScoreRecord:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StreamError(line_no, f"not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise StreamError(line_no, f"expected an object, got {type(obj).__name__}")
    for key in ("sample_id", "epoch", "dice"):
        if key not in obj:
            raise StreamError(line_no, f"missing required key {key!r}")
    sid = obj["sample_id"]
    if not isinstance(sid, str) or not sid:
        raise StreamError(line_no, f"sample_id must be a nonempty string, got {sid!r}")
    epoch = obj["epoch"]
    if not isinstance(epoch, int) or isinstance(epoch, bool) or epoch < 0:
        raise StreamError(line_no, f"epoch must be an integer >= 0, got {epoch!r}")
    dval = obj["dice"]
    if not isinstance(dval, (int, float)) or isinstance(dval, bool):
        raise StreamError(line_no, f"dice must be a number, got {dval!r}")
    if not 0.0 <= float(dval) <= 1.0:
        raise StreamError(line_no, f"dice {dval} outside [0, 1]")
    extras: dict[str, float] = {}
    for k, v in obj.items():
        if k in ("sample_id", "epoch", "dice"):
            continue
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise StreamError(line_no, f"metric {k!r} must be numeric, got {v!r}")
        extras[k] = float(v)
    return ScoreRecord(sample_id=sid, epoch=epoch, dice=float(dval), extras=extras)


class ScoreStreamParser:
    """Incremental line parser: feed text in arbitrary chunks.

    A line only counts once its newline arrives; ``finish()`` settles the
    leftover tail, accepting it when it parses cleanly (a writer that simply
    never wrote the final newline) and reporting it as truncated otherwise.
    """

    def __init__(self):
        self._buffer = ""
        self._line_no = 0
        self.warnings: list[str] = []

    def feed(self, chunk: str) -> list[tuple[int, ScoreRecord]]:
        self._buffer += chunk
        out: list[tuple[int, ScoreRecord]] = []
        while True:
            nl = self._buffer.find("\n")
            if nl < 0:
                break
            line, self._buffer = self._buffer[:nl], self._buffer[nl + 1:]
            self._line_no += 1
            if not line.strip():
                continue
            out.append((self._line_no, _parse_score_obj(self._line_no, line)))
        return out

    def finish(self) -> list[tuple[int, ScoreRecord]]:
        tail = self._buffer
        self._buffer = ""
        if not tail.strip():
            return []
        self._line_no += 1
        try:
            return [(self._line_no, _parse_score_obj(self._line_no, tail))]
        except StreamError as exc:
            self.warnings.append(
                f"discarded truncated final line {self._line_no}: {exc}"
            )
            return []


def iter_score_lines(source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        yield Path(source).read_text(encoding="utf-8")
    else:
        for chunk in source:
            yield chunk


def ingest_scores(source) -> TrajectoryStore:
    """Read a stream (path or iterable of text chunks) into a store.

    Duplicate (sample, epoch) records are an error naming both lines.
    Partial epochs are excluded with a warning; a truncated final line is
    reported but never poisons the records before it. Warnings end up on
    ``store.warnings``.
    """
    parser = ScoreStreamParser()
    records: list[ScoreRecord] = []
    seen: dict[tuple[str, int], int] = {}

    def take(parsed):
        for line_no, rec in parsed:
            key = (rec.sample_id, rec.epoch)
            if key in seen:
                raise StreamError(
                    line_no,
                    f"duplicate record for {key}: first at line {seen[key]}",
                    other_line_no=seen[key],
                )
            seen[key] = line_no
            records.append(rec)

    for chunk in iter_score_lines(source):
        take(parser.feed(chunk))
    take(parser.finish())

    store = TrajectoryStore.build(records)
    if parser.warnings:
        store.warnings = tuple(parser.warnings) + store.warnings
    return store


# ---------------------------------------------------------------------------
# Batch scoring of dumped volumes
# ---------------------------------------------------------------------------

VOLUME_SUFFIX = ".ddt1"


def score_volumes(
    pred_dir: str | Path,
    truth_dir: str | Path,
    epoch: int,
    extra_metrics: tuple[str, ...] = (),
) -> list[ScoreRecord]:
    """Score every prediction dump against its ground truth.

    Files pair by name across the two directories; the filename stem is the
    sample id. Probability predictions are thresholded at 0.5 (ties to
    foreground) before dice. ``extra_metrics`` may request "el2n" / "el2nx",
    which need probability predictions.
    """
    from .metrics import el2n as el2n_metric, el2nx as el2nx_metric

    pred_dir, truth_dir = Path(pred_dir), Path(truth_dir)
    pred_files = {p.name: p for p in pred_dir.glob("*" + VOLUME_SUFFIX)}
    truth_files = {p.name: p for p in truth_dir.glob("*" + VOLUME_SUFFIX)}
    unmatched = sorted(set(pred_files) ^ set(truth_files))
    if unmatched:
        raise ValidationError(
            f"unmatched volume files across directories: {unmatched[:5]}"
        )
    bad = sorted(set(extra_metrics) - {"el2n", "el2nx"})
    if bad:
        raise ValidationError(f"unknown extra metrics: {bad}")
    if not pred_files:
        _warnings.warn(f"no {VOLUME_SUFFIX} volumes found under {pred_dir}", stacklevel=2)

    records = []
    for name in sorted(pred_files):
        pred = read_volume(pred_files[name])
        truth = read_volume(truth_files[name])
        if not isinstance(truth, MaskVolume):
            raise ValidationError(f"ground truth {name} is not a mask volume")
        extras: dict[str, float] = {}
        if isinstance(pred, ProbabilityVolume):
            pred_mask = binarize(pred)
            if "el2n" in extra_metrics:
                extras["el2n"] = el2n_metric(pred, truth)
            if "el2nx" in extra_metrics:
                extras["el2nx"] = el2nx_metric(pred, truth)
        else:
            if extra_metrics:
                raise ValidationError(
                    f"{name} is a mask dump; {sorted(extra_metrics)} need probabilities"
                )
            pred_mask = pred
        records.append(ScoreRecord(
            sample_id=Path(name).stem,
            epoch=epoch,
            dice=dice_metric(pred_mask, truth),
            extras=extras,
        ))
    return records


# ---------------------------------------------------------------------------
# Prune manifests
# ---------------------------------------------------------------------------

MANIFEST_FORMAT = "prune-manifest-v1"


def manifest_to_json(manifest: PruneManifest) -> str:
    """Serialize with a fixed key order so manifests diff cleanly."""
    obj: dict = {
        "format": MANIFEST_FORMAT,
        "engine_version": manifest.engine_version,
        "strategy": manifest.strategy,
        "metric": manifest.metric,
        "scoring_epoch": manifest.scoring_epoch,
        "fraction_pruned": manifest.fraction_pruned,
    }
    if manifest.strategy == "random":
        obj["seed"] = manifest.seed
    obj["sample_count"] = manifest.sample_count
    obj["kept"] = list(manifest.kept)
    obj["dropped"] = list(manifest.dropped)
    return json.dumps(obj, indent=2) + "\n"


def parse_manifest(text: str) -> PruneManifest:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"manifest is not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict) or obj.get("format") != MANIFEST_FORMAT:
        raise ValidationError(
            f"not a {MANIFEST_FORMAT} document: format={obj.get('format')!r}"
            if isinstance(obj, dict) else "manifest root must be an object"
        )
    manifest = PruneManifest(
        strategy=obj["strategy"],
        fraction_pruned=float(obj["fraction_pruned"]),
        scoring_epoch=obj["scoring_epoch"],
        metric=obj["metric"],
        kept=tuple(obj["kept"]),
        dropped=tuple(obj["dropped"]),
        seed=obj.get("seed"),
        engine_version=obj["engine_version"],
    )
    if manifest.sample_count != obj.get("sample_count"):
        raise ValidationError(
            f"sample_count {obj.get('sample_count')} does not match "
            f"{manifest.sample_count} listed ids"
        )
    return manifest


def write_manifest(path: str | Path, manifest: PruneManifest) -> None:
    Path(path).write_text(manifest_to_json(manifest), encoding="utf-8")


def read_manifest(path: str | Path) -> PruneManifest:
    return parse_manifest(Path(path).read_text(encoding="utf-8"))
