"""Adversarial training of the stem generator.

The generator maps a 10xV noise matrix through two 100-unit LSTMs (with a
20% dropout layer between them) to a 10xV softmax sequence. The
discriminator reads a sequence with a single 100-unit LSTM and scores it
with a sigmoid unit. Both losses are Wasserstein-style differences of mean
scores; because scores pass through the sigmoid they stay bounded, so the
discriminator loss lives in [-1, 1] and the generator loss in [0, 1].
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import codec, neural
from .corpus import Alphabet
from .errors import CheckpointError, DataError, EmptyTrainingSetError, NumericFault
from .neural import (
    LSTM,
    Dense,
    ParamSet,
    RMSProp,
    dropout_backward,
    dropout_forward,
    sigmoid,
    softmax_backward,
    softmax_rows,
)

log = logging.getLogger(__name__)

DEFAULT_HIDDEN = 100
DROPOUT_RATE = 0.2


@dataclass
class TrainConfig:
    epochs: int = 500
    batch_size: int = 32
    lr_g: float = 1e-3
    lr_d: float = 1e-3
    seed: int = 0
    sample_every: int = 100

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")
        if self.batch_size < 1:
            raise DataError("batch size must be >= 1")
        if self.lr_g < 0 or self.lr_d < 0:
            raise DataError("learning rates must be non-negative")
        if self.sample_every < 1:
            raise DataError("sample cadence must be >= 1")


@dataclass
class LossHistory:
    """Per-step (discriminator, generator) losses plus periodic samples."""

    d_loss: list[float] = field(default_factory=list)
    g_loss: list[float] = field(default_factory=list)
    samples: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.d_loss)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "d_loss", "g_loss"])
            for step, (d, g) in enumerate(zip(self.d_loss, self.g_loss), start=1):
                writer.writerow([step, repr(d), repr(g)])

    def write_samples(self, path: str | Path) -> None:
        lines = [f"{step}\t{raw}" for step, raw in self.samples]
        text = "\n".join(lines) + "\n" if lines else ""
        Path(path).write_text(text, encoding="utf-8")


class Generator:
    """recurrent(100, sequences) -> dropout -> recurrent(100, sequences) ->
    per-step dense softmax; input and output are both (10, V)."""

    def __init__(self, vocab: int, hidden: int = DEFAULT_HIDDEN, *,
                 rng: np.random.Generator):
        self.vocab = vocab
        self.hidden = hidden
        self.lstm1 = LSTM(vocab, hidden, return_sequences=True, rng=rng)
        self.lstm2 = LSTM(hidden, hidden, return_sequences=True, rng=rng)
        self.out = Dense(hidden, vocab, rng=rng)

    def params(self) -> ParamSet:
        named = {}
        for prefix, layer in (("lstm1", self.lstm1), ("lstm2", self.lstm2),
                              ("out", self.out)):
            for key, arr in layer.params().items():
                named[f"{prefix}.{key}"] = arr
        return named

    def forward(self, z: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None):
        """Noise (B, 10, V) to softmax rows of the same shape.

        Dropout is active only with train=True, which then needs an rng for
        the mask draw.
        """
        h1, tape1 = self.lstm1.forward(z)
        if train:
            if rng is None:
                raise TypeError("train=True requires an rng for the dropout mask")
            dropped, mask = dropout_forward(h1, DROPOUT_RATE, rng)
        else:
            dropped, mask = h1, None
        h2, tape2 = self.lstm2.forward(dropped)
        logits, tape3 = self.out.forward(h2)
        y = softmax_rows(logits)
        return y, (tape1, mask, tape2, tape3, y)

    def backward(self, tape, dy: np.ndarray) -> ParamSet:
        tape1, mask, tape2, tape3, y = tape
        dlogits = softmax_backward(y, dy)
        dense_grads, dh2 = self.out.backward(tape3, dlogits)
        lstm2_grads, ddropped = self.lstm2.backward(tape2, dh2)
        dh1 = dropout_backward(mask, ddropped) if mask is not None else ddropped
        lstm1_grads, _ = self.lstm1.backward(tape1, dh1)
        grads = {f"lstm1.{k}": v for k, v in lstm1_grads.items()}
        grads.update({f"lstm2.{k}": v for k, v in lstm2_grads.items()})
        grads.update({f"out.{k}": v for k, v in dense_grads.items()})
        return grads


class Discriminator:
    """recurrent(100, final state) -> dense(1) -> sigmoid score per example."""

    def __init__(self, vocab: int, hidden: int = DEFAULT_HIDDEN, *,
                 rng: np.random.Generator):
        self.vocab = vocab
        self.hidden = hidden
        self.lstm = LSTM(vocab, hidden, return_sequences=False, rng=rng)
        self.out = Dense(hidden, 1, rng=rng)

    def params(self) -> ParamSet:
        named = {}
        for prefix, layer in (("lstm", self.lstm), ("out", self.out)):
            for key, arr in layer.params().items():
                named[f"{prefix}.{key}"] = arr
        return named

    def forward(self, x: np.ndarray):
        h, tape1 = self.lstm.forward(x)
        logits, tape2 = self.out.forward(h)
        scores = sigmoid(logits[:, 0])
        return scores, (tape1, tape2, scores)

    def backward(self, tape, dscores: np.ndarray):
        """Returns (parameter gradients, gradient w.r.t. the input batch)."""
        tape1, tape2, scores = tape
        dlogits = (dscores * scores * (1.0 - scores))[:, None]
        dense_grads, dh = self.out.backward(tape2, dlogits)
        lstm_grads, dx = self.lstm.backward(tape1, dh)
        grads = {f"lstm.{k}": v for k, v in lstm_grads.items()}
        grads.update({f"out.{k}": v for k, v in dense_grads.items()})
        return grads, dx


@dataclass
class GanModel:
    generator: Generator
    discriminator: Discriminator
    alphabet: Alphabet
    seed: int
    history: LossHistory | None = None


def sample_noise(rng: np.random.Generator, vocab: int,
                 batch: int | None = None) -> np.ndarray:
    """Independent uniform(0,1) draws shaped (10, V), or (batch, 10, V)."""
    if batch is None:
        return rng.random((codec.FRAME_LEN, vocab))
    return rng.random((batch, codec.FRAME_LEN, vocab))


def discriminator_loss(real_scores, fake_scores) -> float:
    """mean(fake) - mean(real); -1 when the critic is perfectly right."""
    real_scores = np.asarray(real_scores, dtype=float)
    fake_scores = np.asarray(fake_scores, dtype=float)
    if real_scores.size == 0 or fake_scores.size == 0:
        raise DataError("empty score batch")
    return float(fake_scores.mean() - real_scores.mean())


def generator_loss(fake_scores) -> float:
    """1 - mean(fake); 1 when the critic rejects everything the generator makes."""
    fake_scores = np.asarray(fake_scores, dtype=float)
    if fake_scores.size == 0:
        raise DataError("empty score batch")
    return float(1.0 - fake_scores.mean())


def train(stems: list[str], alphabet: Alphabet, cfg: TrainConfig,
          hidden_size: int = DEFAULT_HIDDEN) -> tuple[GanModel, LossHistory]:
    """Alternate one discriminator and one generator update per step.

    Each discriminator batch mixes generator output with real encoded stems,
    scored independently. Stems longer than the 10-slot frame are excluded
    with a warning. All randomness flows from cfg.seed.
    """
    usable = [s for s in stems if len(s) <= codec.FRAME_LEN]
    for s in stems:
        if len(s) > codec.FRAME_LEN:
            log.warning("stem %r longer than frame, excluded from training", s)
    if not usable:
        raise EmptyTrainingSetError("no stems fit the encoding frame")

    rng = np.random.default_rng(cfg.seed)
    vocab = len(alphabet)
    generator = Generator(vocab, hidden_size, rng=rng)
    discriminator = Discriminator(vocab, hidden_size, rng=rng)
    opt_g = RMSProp(generator.params(), lr=cfg.lr_g)
    opt_d = RMSProp(discriminator.params(), lr=cfg.lr_d)

    real = np.stack([codec.encode_stem(s, alphabet) for s in usable])
    history = LossHistory()
    step = 0
    for _epoch in range(cfg.epochs):
        order = rng.permutation(len(real))
        for start in range(0, len(real), cfg.batch_size):
            step += 1
            real_batch = real[order[start : start + cfg.batch_size]]
            n = len(real_batch)

            # Discriminator update: fakes sampled with dropout off.
            z = sample_noise(rng, vocab, batch=n)
            fake, _ = generator.forward(z, train=False)
            real_scores, real_tape = discriminator.forward(real_batch)
            fake_scores, fake_tape = discriminator.forward(fake)
            d_loss = discriminator_loss(real_scores, fake_scores)
            grads_fake, _ = discriminator.backward(
                fake_tape, np.full(n, 1.0 / n))
            grads_real, _ = discriminator.backward(
                real_tape, np.full(n, -1.0 / n))
            opt_d.step({k: grads_fake[k] + grads_real[k] for k in grads_fake})

            # Generator update through the frozen discriminator.
            z = sample_noise(rng, vocab, batch=n)
            y, gen_tape = generator.forward(z, train=True, rng=rng)
            scores, disc_tape = discriminator.forward(y)
            g_loss = generator_loss(scores)
            _, dy = discriminator.backward(disc_tape, np.full(n, -1.0 / n))
            opt_g.step(generator.backward(gen_tape, dy))

            if not (np.isfinite(d_loss) and np.isfinite(g_loss)):
                raise NumericFault("non-finite loss", step=step)
            history.d_loss.append(d_loss)
            history.g_loss.append(g_loss)
            if step % cfg.sample_every == 0:
                z = sample_noise(rng, vocab, batch=1)
                probe, _ = generator.forward(z, train=False)
                history.samples.append((step, codec.decode(probe[0], alphabet)))

    model = GanModel(generator, discriminator, alphabet, cfg.seed, history)
    return model, history


def sample_raw(model: GanModel, n: int, rng: np.random.Generator,
               batch: int = 256) -> list[str]:
    """n raw decoded strings, each exactly 10 glyphs; dropout disabled."""
    out: list[str] = []
    while len(out) < n:
        take = min(batch, n - len(out))
        z = sample_noise(rng, len(model.alphabet), batch=take)
        y, _ = model.generator.forward(z, train=False)
        out.extend(codec.decode(y[i], model.alphabet) for i in range(take))
    return out


def save_model(path: str | Path, model: GanModel) -> None:
    """Write generator and discriminator parameters plus the alphabet.

    The file round-trips byte-exactly: saving a loaded model reproduces the
    original bytes.
    """
    params = {f"gen.{k}": v for k, v in model.generator.params().items()}
    params.update({f"disc.{k}": v for k, v in model.discriminator.params().items()})
    meta = {
        "kind": "gan",
        "pad": model.alphabet.pad_glyph,
        "symbols": list(model.alphabet.real_symbols),
        "hidden": model.generator.hidden,
        "frame": codec.FRAME_LEN,
        "vocab": model.generator.vocab,
        "seed": model.seed,
    }
    neural.save_checkpoint(path, params, meta)


def load_model(path: str | Path) -> GanModel:
    params, meta = neural.load_checkpoint(path)
    if meta.get("kind") != "gan":
        raise CheckpointError(f"{path} is not a GAN checkpoint")
    alphabet = Alphabet(symbols=(meta["pad"], *meta["symbols"]))
    vocab, hidden = int(meta["vocab"]), int(meta["hidden"])
    rng = np.random.default_rng(0)
    generator = Generator(vocab, hidden, rng=rng)
    discriminator = Discriminator(vocab, hidden, rng=rng)
    for target, prefix in ((generator, "gen"), (discriminator, "disc")):
        for name, arr in target.params().items():
            stored = params.get(f"{prefix}.{name}")
            if stored is None or stored.shape != arr.shape:
                raise CheckpointError(f"checkpoint missing or misshapen {prefix}.{name}")
            arr[...] = stored
    return GanModel(generator, discriminator, alphabet, int(meta["seed"]))


def classify_regime(history: LossHistory) -> str:
    """Label the training dynamics.

    "saturated": the discriminator has pinned its win, generator loss near
    the maximum and discriminator loss near the minimum over the final 20%
    of steps. Anything else counts as "oscillating".
    """
    n = len(history)
    if n < 100:
        raise DataError(f"history too short to classify ({n} steps)")
    tail = max(1, n // 5)
    g_tail = float(np.mean(history.g_loss[-tail:]))
    d_tail = float(np.mean(history.d_loss[-tail:]))
    if g_tail > 0.95 and d_tail < -0.95:
        return "saturated"
    return "oscillating"
