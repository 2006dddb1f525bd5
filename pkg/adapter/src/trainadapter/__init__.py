"""Training-loop adapter for the segprune engine.

Everything here talks to the engine exclusively through its on-disk
formats (JSONL score stream, DDT1 volumes, prune manifests) and its CLI;
nothing imports the engine package.
"""

from .config import AdapterConfig
from .data import SegSample, make_dataset
from .demo import DemoResult, demo_train
from .formats import read_manifest_ids, write_mask, write_prob
from .logger import EpochScoreLogger
from .metrics import dice_score
from .model import TinySegNet, evaluate_dice, predict_probs, train_model

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "DemoResult",
    "EpochScoreLogger",
    "SegSample",
    "TinySegNet",
    "demo_train",
    "dice_score",
    "evaluate_dice",
    "make_dataset",
    "predict_probs",
    "read_manifest_ids",
    "train_model",
    "write_mask",
    "write_prob",
    "__version__",
]
