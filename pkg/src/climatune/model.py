"""Dense numeric kernel: embeddings, LSTM, attention, heads, gradients.

Everything is plain float64 numpy with explicit loops over time steps.
The model embeds each (pitch, duration) index pair, concatenates the two
embeddings, runs a single-layer LSTM over the window, attends over the
per-step hidden states with the final hidden state as the bilinear
query, and feeds the attention context through two softmax heads.

backward() is hand-written reverse mode over that exact graph and is
held to finite-difference agreement by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ModelError

EPSILON_TEMPERATURE = 1e-3
PAD_INDEX = 0


@dataclass
class ModelConfig:
    """Shape parameters; vocabulary sizes come from the corpus."""

    pitch_vocab: int
    duration_vocab: int
    hidden: int = 256
    d_pitch: int = 64
    d_duration: int = 16

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 1:
                raise ModelError(f"{f.name} must be a positive integer, got {v!r}")

    @property
    def d_input(self) -> int:
        return self.d_pitch + self.d_duration


@dataclass
class LstmState:
    """Cell state C and hidden/output h, both of hidden size."""

    C: np.ndarray
    h: np.ndarray

    @staticmethod
    def zeros(hidden: int) -> "LstmState":
        return LstmState(np.zeros(hidden), np.zeros(hidden))


@dataclass
class ModelParams:
    """Every trainable tensor, named. Gradients reuse this container."""

    emb_pitch: np.ndarray  # (n_p, d_p)
    emb_duration: np.ndarray  # (n_d, d_d)
    W_f: np.ndarray  # (H, H + d_x) over [h, x]
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    b_f: np.ndarray  # (H,)
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray
    W_attn: np.ndarray  # (H, H)
    W_pitch: np.ndarray  # (n_p, H)
    b_pitch: np.ndarray  # (n_p,)
    W_duration: np.ndarray  # (n_d, H)
    b_duration: np.ndarray  # (n_d,)

    def tensors(self) -> Iterator[tuple[str, np.ndarray]]:
        for f in fields(self):
            yield f.name, getattr(self, f.name)

    def config(self) -> ModelConfig:
        return ModelConfig(
            pitch_vocab=self.emb_pitch.shape[0],
            duration_vocab=self.emb_duration.shape[0],
            hidden=self.W_attn.shape[0],
            d_pitch=self.emb_pitch.shape[1],
            d_duration=self.emb_duration.shape[1],
        )

    def copy(self) -> "ModelParams":
        return ModelParams(**{name: arr.copy() for name, arr in self.tensors()})

    def zeros_like(self) -> "ModelParams":
        return ModelParams(**{name: np.zeros_like(arr) for name, arr in self.tensors()})

    def allclose(self, other: "ModelParams") -> bool:
        return all(np.array_equal(a, getattr(other, name)) for name, a in self.tensors())


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """Uniform(-k, k) with k = 1/sqrt(fan-in); forget-gate bias 1."""
    H, dx = config.hidden, config.d_input

    def uniform(shape, fan_in):
        k = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-k, k, size=shape)

    return ModelParams(
        emb_pitch=uniform((config.pitch_vocab, config.d_pitch), config.d_pitch),
        emb_duration=uniform((config.duration_vocab, config.d_duration), config.d_duration),
        W_f=uniform((H, H + dx), H + dx),
        W_i=uniform((H, H + dx), H + dx),
        W_c=uniform((H, H + dx), H + dx),
        W_o=uniform((H, H + dx), H + dx),
        b_f=np.ones(H),
        b_i=np.zeros(H),
        b_c=np.zeros(H),
        b_o=np.zeros(H),
        W_attn=uniform((H, H), H),
        W_pitch=uniform((config.pitch_vocab, H), H),
        b_pitch=np.zeros(config.pitch_vocab),
        W_duration=uniform((config.duration_vocab, H), H),
        b_duration=np.zeros(config.duration_vocab),
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_cell_forward(x: np.ndarray, state: LstmState, params: ModelParams) -> LstmState:
    """One step: f, i, candidate, o gates over [h, x], then C and h."""
    state, _ = _lstm_step(x, state, params)
    return state


def _lstm_step(x: np.ndarray, state: LstmState, params: ModelParams):
    H = params.W_attn.shape[0]
    dx = params.W_f.shape[1] - H
    if x.shape != (dx,):
        raise ModelError(f"input has shape {x.shape}, expected ({dx},)")
    if state.h.shape != (H,) or state.C.shape != (H,):
        raise ModelError(
            f"state shapes {state.h.shape}/{state.C.shape}, expected ({H},)/({H},)"
        )
    z = np.concatenate([state.h, x])
    f = _sigmoid(params.W_f @ z + params.b_f)
    i = _sigmoid(params.W_i @ z + params.b_i)
    g = np.tanh(params.W_c @ z + params.b_c)
    C = f * state.C + i * g
    o = _sigmoid(params.W_o @ z + params.b_o)
    tc = np.tanh(C)
    h = o * tc
    gates = {"z": z, "f": f, "i": i, "g": g, "o": o, "C_prev": state.C, "C": C, "tc": tc}
    return LstmState(C=C, h=h), gates


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / e.sum()


def attention(hidden_states: np.ndarray, query: np.ndarray, w_attn: np.ndarray):
    """Bilinear scores, softmax weights, convex context combination."""
    if hidden_states.ndim != 2 or hidden_states.shape[0] < 1:
        raise ModelError(f"need a (steps, hidden) matrix, got shape {hidden_states.shape}")
    scores = hidden_states @ (w_attn @ query)
    weights = softmax(scores)
    context = weights @ hidden_states
    return context, weights


@dataclass
class ForwardTrace:
    """Everything backward() needs, captured during model_forward."""

    window: tuple[tuple[int, int], ...]
    xs: np.ndarray  # (sql, d_x)
    gates: list[dict]  # per-step z/f/i/g/o/C_prev/C/tc
    hidden: np.ndarray  # (sql, H)
    scores: np.ndarray  # (sql,)
    weights: np.ndarray  # (sql,)
    context: np.ndarray  # (H,)
    z_pitch: np.ndarray
    z_duration: np.ndarray


def model_forward(
    window: Sequence[tuple[int, int]], params: ModelParams
) -> tuple[np.ndarray, np.ndarray, ForwardTrace]:
    """Embed, run the LSTM over the window, attend, apply both heads."""
    cfg = params.config()
    xs = np.empty((len(window), cfg.d_input))
    for t, (pi, di) in enumerate(window):
        if not 0 <= pi < cfg.pitch_vocab:
            raise ModelError(f"pitch index {pi} outside vocab of {cfg.pitch_vocab}")
        if not 0 <= di < cfg.duration_vocab:
            raise ModelError(f"duration index {di} outside vocab of {cfg.duration_vocab}")
        xs[t] = np.concatenate([params.emb_pitch[pi], params.emb_duration[di]])
    state = LstmState.zeros(cfg.hidden)
    gates = []
    hidden = np.empty((len(window), cfg.hidden))
    for t in range(len(window)):
        state, g = _lstm_step(xs[t], state, params)
        gates.append(g)
        hidden[t] = state.h
    context, weights = attention(hidden, state.h, params.W_attn)
    scores = hidden @ (params.W_attn @ state.h)
    z_p = params.W_pitch @ context + params.b_pitch
    z_d = params.W_duration @ context + params.b_duration
    trace = ForwardTrace(
        window=tuple(window),
        xs=xs,
        gates=gates,
        hidden=hidden,
        scores=scores,
        weights=weights,
        context=context,
        z_pitch=z_p,
        z_duration=z_d,
    )
    return z_p, z_d, trace


def temperature_softmax(z: np.ndarray, temperature: float) -> np.ndarray:
    """Softmax of z/T; below epsilon it degenerates to exact argmax.

    Ties at the argmax resolve to the lowest index. Max-subtraction keeps
    the exponentials in range for any finite logits.
    """
    z = np.asarray(z, dtype=np.float64)
    if temperature < EPSILON_TEMPERATURE:
        q = np.zeros_like(z)
        q[int(np.argmax(z))] = 1.0
        return q
    e = np.exp((z - np.max(z)) / temperature)
    return e / e.sum()


def _cross_entropy(z: np.ndarray, target: int) -> float:
    m = np.max(z)
    return float(m + np.log(np.exp(z - m).sum()) - z[target])


def loss(z_pitch: np.ndarray, z_duration: np.ndarray, target: tuple[int, int]) -> float:
    """Sum of both heads' categorical cross-entropies at T=1."""
    tp, td = target
    if tp == PAD_INDEX or td == PAD_INDEX:
        raise ModelError("PAD target reached the loss; mask such windows upstream")
    if not 0 <= tp < len(z_pitch):
        raise ModelError(f"pitch target {tp} outside vocab of {len(z_pitch)}")
    if not 0 <= td < len(z_duration):
        raise ModelError(f"duration target {td} outside vocab of {len(z_duration)}")
    return _cross_entropy(z_pitch, tp) + _cross_entropy(z_duration, td)


def backward(
    trace: ForwardTrace, target: tuple[int, int], params: ModelParams, scale: float = 1.0
) -> ModelParams:
    """Exact reverse-mode gradients of loss() w.r.t. every parameter."""
    tp, td = target
    grads = params.zeros_like()
    H = params.W_attn.shape[0]
    d_p = params.emb_pitch.shape[1]
    n = len(trace.window)

    dz_p = softmax(trace.z_pitch)
    dz_p[tp] -= 1.0
    dz_p *= scale
    dz_d = softmax(trace.z_duration)
    dz_d[td] -= 1.0
    dz_d *= scale

    grads.W_pitch += np.outer(dz_p, trace.context)
    grads.b_pitch += dz_p
    grads.W_duration += np.outer(dz_d, trace.context)
    grads.b_duration += dz_d
    dctx = params.W_pitch.T @ dz_p + params.W_duration.T @ dz_d

    # Attention: context mixes hidden states three ways -- through the
    # weights, directly, and through the query (the final hidden state).
    w = trace.weights
    dw = trace.hidden @ dctx
    dh = np.outer(w, dctx)  # direct context path
    ds = w * (dw - float(dw @ w))  # softmax backward
    a = params.W_attn @ trace.hidden[-1]
    da = trace.hidden.T @ ds
    dh += np.outer(ds, a)  # score path, hidden side
    grads.W_attn += np.outer(da, trace.hidden[-1])
    dh[-1] += params.W_attn.T @ da  # score path, query side

    dh_next = np.zeros(H)
    dC_next = np.zeros(H)
    for t in range(n - 1, -1, -1):
        g = trace.gates[t]
        dh_t = dh[t] + dh_next
        do = dh_t * g["tc"]
        dC = dC_next + dh_t * g["o"] * (1.0 - g["tc"] ** 2)
        df = dC * g["C_prev"]
        di = dC * g["g"]
        dg = dC * g["i"]
        dC_next = dC * g["f"]
        d_af = df * g["f"] * (1.0 - g["f"])
        d_ai = di * g["i"] * (1.0 - g["i"])
        d_ao = do * g["o"] * (1.0 - g["o"])
        d_ag = dg * (1.0 - g["g"] ** 2)
        z = g["z"]
        grads.W_f += np.outer(d_af, z)
        grads.W_i += np.outer(d_ai, z)
        grads.W_c += np.outer(d_ag, z)
        grads.W_o += np.outer(d_ao, z)
        grads.b_f += d_af
        grads.b_i += d_ai
        grads.b_c += d_ag
        grads.b_o += d_ao
        dz = (
            params.W_f.T @ d_af
            + params.W_i.T @ d_ai
            + params.W_c.T @ d_ag
            + params.W_o.T @ d_ao
        )
        dh_next = dz[:H]
        dx = dz[H:]
        pi, di_idx = trace.window[t]
        grads.emb_pitch[pi] += dx[:d_p]
        grads.emb_duration[di_idx] += dx[d_p:]
    return grads


def check_finite(params: ModelParams) -> Optional[str]:
    """None when every entry is finite, else a report naming the first."""
    for name, arr in params.tensors():
        bad = np.argwhere(~np.isfinite(arr))
        if len(bad):
            idx = tuple(int(i) for i in bad[0])
            return f"non-finite value {arr[idx]} in {name} at index {idx}"
    return None
