"""Per-epoch score logging with append-only discipline."""

from pathlib import Path

import numpy as np

from .config import AdapterConfig
from .formats import VOLUME_SUFFIX, score_line, write_mask, write_prob
from .metrics import dice_score


class EpochScoreLogger:
    """Appends one dice line per sample per epoch to the score stream.

    Each epoch is written as one buffered block and flushed on close, so
    an interruption can only ever truncate the final line, which the
    engine's ingestion already tolerates. Volumes are dumped every
    ``dump_cadence`` epochs; ground truths once, on the first dump.
    """

    def __init__(self, config: AdapterConfig, sample_ids: list[str]):
        if len(set(sample_ids)) != len(sample_ids):
            raise ValueError("sample ids must be unique")
        self.config = config
        self.sample_ids = list(sample_ids)
        self.epochs_logged = 0
        self._truth_dumped = False

    def stop_requested(self) -> bool:
        return self.config.stop_requested()

    def on_epoch_end(
        self,
        epoch: int,
        predictions: list[np.ndarray],
        truths: list[np.ndarray],
    ) -> None:
        if len(predictions) != len(self.sample_ids):
            raise ValueError(
                f"expected {len(self.sample_ids)} predictions, "
                f"got {len(predictions)}"
            )
        if len(truths) != len(self.sample_ids):
            raise ValueError(
                f"expected {len(self.sample_ids)} truths, got {len(truths)}"
            )
        lines = [
            score_line(sid, epoch, dice_score(pred, truth))
            for sid, pred, truth in zip(self.sample_ids, predictions, truths)
        ]
        with open(self.config.stream_path, "a") as fh:
            fh.write("\n".join(lines) + "\n")
        self.epochs_logged += 1

        if epoch % self.config.dump_cadence == 0:
            self._dump(epoch, predictions, truths)

    def _dump(self, epoch: int, predictions, truths) -> None:
        if not self._truth_dumped:
            truth_dir = self.config.dump_dir / "truth"
            truth_dir.mkdir(parents=True, exist_ok=True)
            for sid, truth in zip(self.sample_ids, truths):
                write_mask(truth_dir / f"{sid}{VOLUME_SUFFIX}", truth)
            self._truth_dumped = True
        epoch_dir = self.config.dump_dir / f"epoch_{epoch:04d}"
        epoch_dir.mkdir(parents=True, exist_ok=True)
        for sid, pred in zip(self.sample_ids, predictions):
            write_prob(epoch_dir / f"{sid}{VOLUME_SUFFIX}", pred)

    def dumped_epochs(self) -> list[int]:
        return sorted(
            int(p.name.split("_")[1])
            for p in self.config.dump_dir.glob("epoch_*")
            if p.is_dir()
        )
