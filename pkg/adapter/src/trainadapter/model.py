"""Minimal encoder-decoder and a CPU-friendly training loop."""

import numpy as np
import torch
from torch import nn

from .data import SegSample
from .logger import EpochScoreLogger
from .metrics import dice_score


class TinySegNet(nn.Module):
    """One downsample, one upsample, one skip. Logits out."""

    def __init__(self, width: int = 8):
        super().__init__()
        self.enc = nn.Sequential(
            nn.Conv2d(1, width, 3, padding=1), nn.ReLU(inplace=True)
        )
        self.down = nn.Sequential(
            nn.Conv2d(width, 2 * width, 3, stride=2, padding=1),
            nn.ReLU(inplace=True),
            nn.Conv2d(2 * width, 2 * width, 3, padding=1),
            nn.ReLU(inplace=True),
        )
        self.up = nn.ConvTranspose2d(2 * width, width, 2, stride=2)
        self.head = nn.Conv2d(2 * width, 1, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        skip = self.enc(x)
        deep = self.down(skip)
        return self.head(torch.cat([self.up(deep), skip], dim=1))


def _batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]


def predict_probs(model: nn.Module, images: torch.Tensor) -> list[np.ndarray]:
    """Per-sample sigmoid maps as float32 arrays, batched for memory."""
    model.eval()
    out = []
    with torch.no_grad():
        for start in range(0, len(images), 32):
            probs = torch.sigmoid(model(images[start : start + 32]))
            out.extend(p.squeeze(0).numpy().astype(np.float32) for p in probs)
    model.train()
    return out


def train_model(
    samples: list[SegSample],
    *,
    epochs: int,
    seed: int,
    logger: EpochScoreLogger | None = None,
    batch_size: int = 16,
    lr: float = 2e-3,
    width: int = 8,
) -> nn.Module:
    """Train on the given samples; log per-sample dice after each epoch.

    Checks the stop signal at epoch boundaries only, so the stream never
    ends on a half-written epoch.
    """
    torch.manual_seed(seed)
    model = TinySegNet(width=width)
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    loss_fn = nn.BCEWithLogitsLoss()
    images = torch.from_numpy(
        np.stack([s.image for s in samples])[:, None, :, :]
    )
    masks = torch.from_numpy(
        np.stack([s.mask for s in samples]).astype(np.float32)[:, None, :, :]
    )
    shuffler = torch.Generator().manual_seed(seed)

    for epoch in range(1, epochs + 1):
        if logger is not None and logger.stop_requested():
            break
        for idx in _batches(len(samples), batch_size, shuffler):
            opt.zero_grad()
            loss = loss_fn(model(images[idx]), masks[idx])
            loss.backward()
            opt.step()
        if logger is not None:
            preds = predict_probs(model, images)
            logger.on_epoch_end(epoch, preds, [s.mask for s in samples])
    return model


def evaluate_dice(model: nn.Module, samples: list[SegSample]) -> float:
    """Mean dice over a held-out set."""
    images = torch.from_numpy(
        np.stack([s.image for s in samples])[:, None, :, :]
    )
    preds = predict_probs(model, images)
    return float(
        np.mean([dice_score(p, s.mask) for p, s in zip(preds, samples)])
    )
