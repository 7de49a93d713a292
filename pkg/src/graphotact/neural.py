"""Minimal differentiable building blocks with hand-derived backward passes.

Everything runs in float64 on plain numpy arrays. Inputs are batched as
(batch, steps, features). Each layer's forward returns the output plus a
tape of recorded intermediates; backward consumes the tape and an upstream
gradient and returns exact parameter gradients. check_gradients validates
any analytic gradient against central finite differences.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CheckpointError, NumericFault

Array = np.ndarray
ParamSet = dict[str, Array]

INIT_SCALE = 0.08
FORGET_BIAS = 1.0


def sigmoid(x: Array) -> Array:
    """Numerically stable logistic function. Keeps the input's float dtype."""
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax_rows(x: Array) -> Array:
    """Softmax over the last axis with log-sum-exp stabilization."""
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_backward(y: Array, dy: Array) -> Array:
    """Gradient through softmax given its output y."""
    return (dy - (dy * y).sum(axis=-1, keepdims=True)) * y


def dropout_forward(x: Array, rate: float, rng: np.random.Generator):
    """Inverted dropout: scales survivors by 1/(1-rate) at train time.

    Returns (output, mask); reuse the mask for the backward pass. At sample
    time simply skip the layer.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate {rate} outside [0, 1)")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_backward(mask: Array, dy: Array) -> Array:
    return dy * mask


@dataclass
class LSTMTape:
    """Forward intermediates needed for exact backpropagation through time."""

    x: Array
    gate_i: Array
    gate_f: Array
    gate_g: Array
    gate_o: Array
    cell: Array
    tanh_cell: Array
    hidden: Array


class LSTM:
    """One LSTM layer over (batch, steps, features); zero initial states.

    Input, forget, and output gates use sigmoid; candidate and hidden
    activations use tanh. The fused weight matrices stack the gate blocks
    in the order input, forget, candidate, output. Weights start uniform in
    [-0.08, 0.08] with the forget-gate bias at 1.0.
    """

    def __init__(self, in_dim: int, hidden: int, return_sequences: bool,
                 rng: np.random.Generator):
        self.in_dim = in_dim
        self.hidden = hidden
        self.return_sequences = return_sequences
        self.Wx = rng.uniform(-INIT_SCALE, INIT_SCALE, (in_dim, 4 * hidden))
        self.Wh = rng.uniform(-INIT_SCALE, INIT_SCALE, (hidden, 4 * hidden))
        self.b = np.zeros(4 * hidden)
        self.b[hidden : 2 * hidden] = FORGET_BIAS

    def params(self) -> ParamSet:
        return {"Wx": self.Wx, "Wh": self.Wh, "b": self.b}

    def forward(self, x: Array):
        if x.ndim != 3 or x.shape[2] != self.in_dim:
            raise ValueError(f"expected (batch, steps, {self.in_dim}), got {x.shape}")
        batch, steps, _ = x.shape
        hid = self.hidden
        # Input projections for every step in one matmul. Buffers follow the
        # promoted dtype so extended-precision gradient probes stay exact.
        zx = (x.reshape(-1, self.in_dim) @ self.Wx + self.b).reshape(batch, steps, 4 * hid)
        gi = np.empty((batch, steps, hid), dtype=zx.dtype)
        gf = np.empty_like(gi)
        gg = np.empty_like(gi)
        go = np.empty_like(gi)
        cell = np.empty_like(gi)
        hidden = np.empty_like(gi)
        h = np.zeros((batch, hid), dtype=zx.dtype)
        c = np.zeros((batch, hid), dtype=zx.dtype)
        for t in range(steps):
            z = zx[:, t] + h @ self.Wh
            i = sigmoid(z[:, :hid])
            f = sigmoid(z[:, hid : 2 * hid])
            g = np.tanh(z[:, 2 * hid : 3 * hid])
            o = sigmoid(z[:, 3 * hid :])
            c = f * c + i * g
            h = o * np.tanh(c)
            gi[:, t], gf[:, t], gg[:, t], go[:, t] = i, f, g, o
            cell[:, t] = c
            hidden[:, t] = h
        tanh_cell = np.tanh(cell)
        if not np.isfinite(h).all():
            raise NumericFault("non-finite LSTM activations")
        tape = LSTMTape(x, gi, gf, gg, go, cell, tanh_cell, hidden)
        out = hidden if self.return_sequences else hidden[:, -1]
        return out, tape

    def backward(self, tape: LSTMTape, d_out: Array):
        """Exact gradients of the recorded forward.

        d_out is (batch, steps, hidden) when the layer returns sequences,
        otherwise (batch, hidden) applied at the final step. Returns
        ({"Wx", "Wh", "b"} gradients, gradient w.r.t. the input).
        """
        batch, steps, _ = tape.x.shape
        hid = self.hidden
        dtype = np.result_type(tape.x.dtype, self.Wh.dtype)
        dz_all = np.empty((batch, steps, 4 * hid), dtype=dtype)
        dh_next = np.zeros((batch, hid), dtype=dtype)
        dc_next = np.zeros((batch, hid), dtype=dtype)
        for t in reversed(range(steps)):
            dh = dh_next.copy()
            if self.return_sequences:
                dh += d_out[:, t]
            elif t == steps - 1:
                dh += d_out
            i, f, g, o = tape.gate_i[:, t], tape.gate_f[:, t], tape.gate_g[:, t], tape.gate_o[:, t]
            tc = tape.tanh_cell[:, t]
            c_prev = tape.cell[:, t - 1] if t > 0 else np.zeros((batch, hid))
            dc = dc_next + dh * o * (1.0 - tc * tc)
            dz = dz_all[:, t]
            dz[:, :hid] = dc * g * i * (1.0 - i)
            dz[:, hid : 2 * hid] = dc * c_prev * f * (1.0 - f)
            dz[:, 2 * hid : 3 * hid] = dc * i * (1.0 - g * g)
            dz[:, 3 * hid :] = dh * tc * o * (1.0 - o)
            dh_next = dz @ self.Wh.T
            dc_next = dc * f
        h_prev = np.concatenate(
            [np.zeros((batch, 1, hid)), tape.hidden[:, :-1]], axis=1
        )
        dz_flat = dz_all.reshape(-1, 4 * hid)
        grads = {
            "Wx": tape.x.reshape(-1, self.in_dim).T @ dz_flat,
            "Wh": h_prev.reshape(-1, hid).T @ dz_flat,
            "b": dz_flat.sum(axis=0),
        }
        dx = (dz_flat @ self.Wx.T).reshape(batch, steps, self.in_dim)
        return grads, dx


class Dense:
    """Affine map over the last axis: y = x @ W + b."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.W = rng.uniform(-INIT_SCALE, INIT_SCALE, (in_dim, out_dim))
        self.b = np.zeros(out_dim)

    def params(self) -> ParamSet:
        return {"W": self.W, "b": self.b}

    def forward(self, x: Array):
        return x @ self.W + self.b, x

    def backward(self, tape_x: Array, dy: Array):
        x_flat = tape_x.reshape(-1, self.in_dim)
        dy_flat = dy.reshape(-1, self.out_dim)
        grads = {"W": x_flat.T @ dy_flat, "b": dy_flat.sum(axis=0)}
        dx = (dy_flat @ self.W.T).reshape(tape_x.shape)
        return grads, dx


class RMSProp:
    """Adaptive update with a running average of squared gradients.

    params are updated in place; state carries the per-parameter averages.
    """

    def __init__(self, params: ParamSet, lr: float = 1e-3, decay: float = 0.9,
                 eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.decay = decay
        self.eps = eps
        self.sq = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, grads: ParamSet) -> None:
        for name, p in self.params.items():
            g = grads[name]
            if not np.isfinite(g).all():
                raise NumericFault(f"non-finite gradient for {name}")
            sq = self.sq[name]
            sq *= self.decay
            sq += (1.0 - self.decay) * g * g
            p -= self.lr * g / (np.sqrt(sq) + self.eps)


@dataclass
class GradCheckFailure:
    name: str
    index: tuple
    analytic: float
    numeric: float
    rel_err: float


@dataclass
class GradCheckReport:
    n_checked: int = 0
    max_rel_err: float = 0.0
    failures: list[GradCheckFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_gradients(params: ParamSet, loss_fn, grad_fn, step: float = 1e-5,
                    tolerance: float = 1e-4) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    loss_fn() evaluates the scalar loss under the current params; grad_fn()
    returns the analytic gradients for the same loss. Both must be
    deterministic (re-seed any internal randomness per call). Every element
    of every parameter is probed; relative error uses the denominator
    max(|analytic|, |numeric|, 1e-8). A zero-parameter model passes
    vacuously.
    """
    analytic = grad_fn()
    report = GradCheckReport()
    for name in sorted(params):
        p = params[name]
        grad = analytic[name]
        it = np.nditer(p, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            saved = p[idx]
            p[idx] = saved + step
            plus = loss_fn()
            p[idx] = saved - step
            minus = loss_fn()
            p[idx] = saved
            numeric = (plus - minus) / (2.0 * step)
            a = float(grad[idx])
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            report.n_checked += 1
            report.max_rel_err = max(report.max_rel_err, rel)
            if rel > tolerance:
                report.failures.append(GradCheckFailure(name, idx, a, numeric, rel))
            it.iternext()
    return report


# Checkpoint format: magic, u32 version, u32-length JSON header, u32 array
# count, then per array a u16-length utf-8 name, u8 ndim, u32 dims, and the
# float64 little-endian data. Round trips must be byte-exact.
CKPT_MAGIC = b"GTACNET\x00"
CKPT_VERSION = 1


def save_checkpoint(path: str | Path, params: ParamSet, meta: dict) -> None:
    blob = checkpoint_bytes(params, meta)
    Path(path).write_bytes(blob)


def checkpoint_bytes(params: ParamSet, meta: dict) -> bytes:
    header = json.dumps(meta, sort_keys=True, ensure_ascii=True,
                        separators=(",", ":")).encode("ascii")
    out = [CKPT_MAGIC, struct.pack("<I", CKPT_VERSION),
           struct.pack("<I", len(header)), header,
           struct.pack("<I", len(params))]
    for name in sorted(params):
        # asarray, not ascontiguousarray: the latter promotes 0-d to 1-d.
        arr = np.asarray(params[name], dtype="<f8", order="C")
        encoded = name.encode("utf-8")
        out.append(struct.pack("<H", len(encoded)))
        out.append(encoded)
        out.append(struct.pack("<B", arr.ndim))
        out.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        out.append(arr.tobytes())
    return b"".join(out)


def load_checkpoint(path: str | Path) -> tuple[ParamSet, dict]:
    blob = Path(path).read_bytes()
    try:
        return _parse_checkpoint(blob)
    except (struct.error, ValueError, UnicodeDecodeError, json.JSONDecodeError,
            IndexError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc


def _parse_checkpoint(blob: bytes) -> tuple[ParamSet, dict]:
    if blob[: len(CKPT_MAGIC)] != CKPT_MAGIC:
        raise CheckpointError("bad magic: not a checkpoint file")
    off = len(CKPT_MAGIC)

    def take(fmt):
        nonlocal off
        size = struct.calcsize(fmt)
        vals = struct.unpack_from(fmt, blob, off)
        off += size
        return vals

    (version,) = take("<I")
    if version != CKPT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (header_len,) = take("<I")
    meta = json.loads(blob[off : off + header_len].decode("ascii"))
    off += header_len
    (count,) = take("<I")
    params: ParamSet = {}
    for _ in range(count):
        (name_len,) = take("<H")
        name = blob[off : off + name_len].decode("utf-8")
        off += name_len
        (ndim,) = take("<B")
        shape = take(f"<{ndim}I")
        n = int(np.prod(shape)) if ndim else 1
        arr = np.frombuffer(blob, dtype="<f8", count=n, offset=off).reshape(shape)
        off += 8 * n
        params[name] = arr.astype(float)
    if off != len(blob):
        raise CheckpointError("trailing bytes after checkpoint payload")
    return params, meta
