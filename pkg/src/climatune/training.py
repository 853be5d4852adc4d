"""Training loop, early stopping, and binary checkpoints.

Single-example gradient steps over shuffled windows, validation loss
tracked per epoch, best-validation parameters restored at the end.
Checkpoints are a small versioned binary container written byte-for-byte
deterministically so identical runs produce identical files.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import TrainingWindow, Vocabulary
from .errors import CheckpointError, ModelError
from .model import ModelConfig, ModelParams, backward, check_finite, init_params, loss, model_forward

_MAGIC = b"CLTN"
_VERSION = 1


@dataclass
class TrainConfig:
    """Everything the loop needs; defaults fit a desk-scale corpus."""

    hidden: int = 256
    d_pitch: int = 64
    d_duration: int = 16
    sql: int = 16
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # "adam" | "momentum"
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    max_epochs: int = 500
    patience: int = 10
    min_delta: float = 1e-4
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.patience < 1:
            raise ModelError(f"patience must be >= 1, got {self.patience}")
        if not 0.0 < self.val_fraction <= 0.5:
            raise ModelError(f"validation fraction must be in (0, 0.5], got {self.val_fraction}")
        if self.optimizer not in ("adam", "momentum"):
            raise ModelError(f"unknown optimizer {self.optimizer!r}")

    def model_config(self, vocab: Vocabulary) -> ModelConfig:
        return ModelConfig(
            pitch_vocab=vocab.pitch_size,
            duration_vocab=vocab.duration_size,
            hidden=self.hidden,
            d_pitch=self.d_pitch,
            d_duration=self.d_duration,
        )

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "d_pitch": self.d_pitch,
            "d_duration": self.d_duration,
            "sql": self.sql,
            "learning_rate": self.learning_rate,
            "optimizer": self.optimizer,
            "momentum": self.momentum,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_eps": self.adam_eps,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "min_delta": self.min_delta,
            "val_fraction": self.val_fraction,
            "seed": self.seed,
        }


@dataclass
class TrainHistory:
    """Per-epoch losses plus where training stopped and peaked."""

    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0

    def to_json(self) -> str:
        payload = {
            "best_epoch": self.best_epoch,
            "stopped_epoch": self.stopped_epoch,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "TrainHistory":
        d = json.loads(text)
        return TrainHistory(
            train_loss=list(d["train_loss"]),
            val_loss=list(d["val_loss"]),
            stopped_epoch=int(d["stopped_epoch"]),
            best_epoch=int(d["best_epoch"]),
        )


def split_train_val(
    windows: Sequence[TrainingWindow], fraction: float, seed: int
) -> tuple[list[TrainingWindow], list[TrainingWindow]]:
    """Seeded shuffle, then carve off max(1, round(n * fraction))."""
    n = len(windows)
    if n < 2:
        raise ModelError(f"need at least 2 windows to split, got {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_val = min(max(1, round(n * fraction)), n - 1)
    val = [windows[i] for i in perm[:n_val]]
    train = [windows[i] for i in perm[n_val:]]
    return train, val


class _Optimizer:
    def __init__(self, config: TrainConfig, params: ModelParams):
        self.config = config
        self.step_count = 0
        self.m = {name: np.zeros_like(arr) for name, arr in params.tensors()}
        if config.optimizer == "adam":
            self.v = {name: np.zeros_like(arr) for name, arr in params.tensors()}

    def step(self, params: ModelParams, grads: ModelParams) -> None:
        c = self.config
        self.step_count += 1
        if c.optimizer == "momentum":
            for name, arr in params.tensors():
                buf = self.m[name]
                buf *= c.momentum
                buf += getattr(grads, name)
                arr -= c.learning_rate * buf
            return
        t = self.step_count
        bias1 = 1.0 - c.beta1**t
        bias2 = 1.0 - c.beta2**t
        for name, arr in params.tensors():
            g = getattr(grads, name)
            m = self.m[name]
            v = self.v[name]
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * g * g
            arr -= c.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + c.adam_eps)


def _mean_loss(windows: Sequence[TrainingWindow], params: ModelParams) -> float:
    total = 0.0
    for w in windows:
        z_p, z_d, _ = model_forward(w.inputs, params)
        total += loss(z_p, z_d, w.target)
    return total / len(windows)


def train(
    windows: Sequence[TrainingWindow],
    vocab: Vocabulary,
    config: TrainConfig,
    verbose: bool = False,
) -> tuple[ModelParams, TrainHistory]:
    """Optimize until validation loss stalls for `patience` epochs.

    Returns the parameters from the best-validation epoch, not the last
    one, plus the full loss history.
    """
    train_set, val_set = split_train_val(windows, config.val_fraction, config.seed)
    rng = np.random.default_rng(config.seed)
    params = init_params(config.model_config(vocab), rng)
    opt = _Optimizer(config, params)
    history = TrainHistory()
    best_val = np.inf
    best_params = params.copy()
    counter_best = np.inf
    wait = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train_set))
        total = 0.0
        for idx in order:
            w = train_set[idx]
            z_p, z_d, trace = model_forward(w.inputs, params)
            step_loss = loss(z_p, z_d, w.target)
            if not np.isfinite(step_loss):
                raise ModelError(
                    f"non-finite loss {step_loss} at epoch {epoch} on window "
                    f"from {w.source_id!r}"
                )
            total += step_loss
            opt.step(params, backward(trace, w.target, params))
        history.train_loss.append(total / len(train_set))
        vloss = _mean_loss(val_set, params)
        history.val_loss.append(vloss)
        if verbose:
            print(f"epoch {epoch:4d}  train {history.train_loss[-1]:.6f}  val {vloss:.6f}")

        if vloss < best_val:
            best_val = vloss
            best_params = params.copy()
            history.best_epoch = epoch
        if vloss < counter_best - config.min_delta:
            counter_best = vloss
            wait = 0
        else:
            wait += 1
        history.stopped_epoch = epoch
        if wait >= config.patience:
            break

    report = check_finite(best_params)
    if report is not None:
        raise ModelError(f"training produced {report}")
    return best_params, history


@dataclass
class Checkpoint:
    """A trained model plus the vocabularies and config it was born with."""

    params: ModelParams
    vocab: Vocabulary
    config: TrainConfig


def save_checkpoint(
    params: ModelParams, vocab: Vocabulary, config: TrainConfig, path: str | Path
) -> None:
    """Versioned binary container, written deterministically.

    Layout: magic, version, header length, JSON header (tensor index,
    vocabularies and their hashes, config), float64 little-endian
    payload, sha256 of the payload.
    """
    tensors = list(params.tensors())
    index = []
    offset = 0
    blobs = []
    for name, arr in tensors:
        blob = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        index.append({"name": name, "shape": list(arr.shape), "offset": offset, "length": len(blob)})
        offset += len(blob)
        blobs.append(blob)
    header = {
        "config": config.to_dict(),
        "duration_hash": vocab.duration_hash(),
        "duration_vocab": list(vocab.duration_tokens),
        "pitch_hash": vocab.pitch_hash(),
        "pitch_vocab": list(vocab.pitch_tokens),
        "tensors": index,
    }
    header_bytes = json.dumps(header, ensure_ascii=False, separators=(",", ":"), sort_keys=True).encode("utf-8")
    payload = b"".join(blobs)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(payload)
        fh.write(hashlib.sha256(payload).digest())


def load_checkpoint(path: str | Path, expected_vocab: Optional[Vocabulary] = None) -> Checkpoint:
    """Read and verify a checkpoint; refuse mismatched vocabularies."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < 16 or raw[:4] != _MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint (bad magic)")
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != _VERSION:
        raise CheckpointError(f"checkpoint version {version} unsupported (expected {_VERSION})")
    (header_len,) = struct.unpack_from("<Q", raw, 8)
    header_end = 16 + header_len
    if len(raw) < header_end + 32:
        raise CheckpointError(f"{path} is truncated")
    header = json.loads(raw[16:header_end].decode("utf-8"))
    payload = raw[header_end:-32]
    digest = raw[-32:]
    expected_len = sum(t["length"] for t in header["tensors"])
    if len(payload) != expected_len:
        raise CheckpointError(
            f"{path} is truncated: payload {len(payload)} bytes, expected {expected_len}"
        )
    if hashlib.sha256(payload).digest() != digest:
        raise CheckpointError(f"{path} failed its checksum; file is corrupted or truncated")
    vocab = Vocabulary(tuple(header["pitch_vocab"]), tuple(header["duration_vocab"]))
    if vocab.pitch_hash() != header["pitch_hash"] or vocab.duration_hash() != header["duration_hash"]:
        raise CheckpointError(f"{path} header hashes disagree with its own vocabularies")
    if expected_vocab is not None:
        for label, got, want in (
            ("pitch", vocab.pitch_hash(), expected_vocab.pitch_hash()),
            ("duration", vocab.duration_hash(), expected_vocab.duration_hash()),
        ):
            if got != want:
                raise CheckpointError(
                    f"{label} vocabulary mismatch: checkpoint {got}, expected {want}"
                )
    arrays = {}
    for entry in header["tensors"]:
        start = entry["offset"]
        blob = payload[start : start + entry["length"]]
        arrays[entry["name"]] = np.frombuffer(blob, dtype="<f8").reshape(entry["shape"]).copy()
    params = ModelParams(**arrays)
    config = TrainConfig(**header["config"])
    return Checkpoint(params=params, vocab=vocab, config=config)


def checkpoint_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
