"""Two-phase demo: train with logging, prune via the engine, retrain.

The engine is driven exclusively through its CLI and file formats; this
module never imports it.
"""

import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import AdapterConfig
from .data import make_dataset
from .formats import read_manifest_ids
from .logger import EpochScoreLogger
from .model import evaluate_dice, train_model

ENGINE = (sys.executable, "-m", "segprune")


def run_engine(*args: object) -> None:
    subprocess.run([*ENGINE, *map(str, args)], check=True, capture_output=True)


@dataclass
class DemoResult:
    full_dice: float
    retrained_dice: dict[str, float]
    manifests: dict[str, Path]
    stream_path: Path
    kept_counts: dict[str, int] = field(default_factory=dict)


def demo_train(
    out_dir: Path,
    *,
    seed: int = 0,
    n_train: int = 96,
    n_test: int = 48,
    epochs: int = 24,
    p: float = 0.4,
    strategies: tuple[str, ...] = ("ambiguous", "easy", "hard"),
    junk_fraction: float = 0.2,
    dump_cadence: int = 1000,
) -> DemoResult:
    """Full-data training, engine pruning at each strategy, retraining.

    The test set is clean (no junk labels) and shares nothing with
    training beyond the generator's distribution.
    """
    out_dir = Path(out_dir)
    train = make_dataset(n_train, seed=seed, junk_fraction=junk_fraction)
    test = make_dataset(
        n_test, seed=seed + 100_003, junk_fraction=0.0, max_difficulty=0.9
    )
    by_id = {s.sample_id: s for s in train}

    config = AdapterConfig(
        stream_path=out_dir / "scores.jsonl",
        dump_dir=out_dir / "dumps",
        dump_cadence=dump_cadence,
        stop_path=out_dir / "STOP",
    )
    config.stream_path.unlink(missing_ok=True)
    logger = EpochScoreLogger(config, [s.sample_id for s in train])
    model = train_model(train, epochs=epochs, seed=seed, logger=logger)
    result = DemoResult(
        full_dice=evaluate_dice(model, test),
        retrained_dice={},
        manifests={},
        stream_path=config.stream_path,
    )

    for strategy in strategies:
        manifest_path = out_dir / f"manifest_{strategy}.json"
        run_engine(
            "prune",
            "--stream", config.stream_path,
            "--strategy", strategy,
            "--p", p,
            "--out", manifest_path,
        )
        kept = [by_id[sid] for sid in read_manifest_ids(manifest_path)]
        retrained = train_model(kept, epochs=epochs, seed=seed + 1)
        result.manifests[strategy] = manifest_path
        result.kept_counts[strategy] = len(kept)
        result.retrained_dice[strategy] = evaluate_dice(retrained, test)
    return result


def main() -> int:
    import argparse

    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("demo_run"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=24)
    ap.add_argument("--p", type=float, default=0.4)
    args = ap.parse_args()
    result = demo_train(
        args.out, seed=args.seed, epochs=args.epochs, p=args.p
    )
    print(f"full-data test dice: {result.full_dice:.4f}")
    for strategy, score in result.retrained_dice.items():
        print(
            f"{strategy} retention (kept {result.kept_counts[strategy]}): "
            f"{score:.4f}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
