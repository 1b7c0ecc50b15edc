"""Bidirectional LSTM regressor in plain numpy.

Each feature row is read as a short sequence. A forward cell runs over the
steps in order, a reverse cell runs backwards, and their final hidden states
are concatenated into one affine output unit. Training is full-batch Adam on
mean squared error with an L2 penalty on weights (biases excluded), global
gradient-norm clipping, and a single step-down of the learning rate.

Gate blocks are stacked in the order input, forget, output, candidate.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import TrainingFailedError
from .base import Regressor

SEQ_LAYOUTS = ("per_feature_steps", "flat_steps")


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LstmCellParams:
    Wx: np.ndarray  # (4H, I)
    Wh: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    def __post_init__(self):
        H4, I = self.Wx.shape
        if H4 % 4 or self.Wh.shape != (H4, H4 // 4) or self.b.shape != (H4,):
            raise ValueError(
                f"inconsistent LSTM shapes Wx={self.Wx.shape} Wh={self.Wh.shape} b={self.b.shape}"
            )

    @property
    def hidden_size(self):
        return self.Wh.shape[1]

    @property
    def input_size(self):
        return self.Wx.shape[1]

    @classmethod
    def zeros(cls, input_size, hidden_size):
        H = hidden_size
        return cls(np.zeros((4 * H, input_size)), np.zeros((4 * H, H)), np.zeros(4 * H))

    @classmethod
    def initialize(cls, input_size, hidden_size, rng):
        """Orthogonal recurrent blocks, uniform(+-1/sqrt(I)) input weights, forget bias 1."""
        H, I = hidden_size, input_size
        bound = 1.0 / np.sqrt(I)
        Wx = rng.uniform(-bound, bound, size=(4 * H, I))
        blocks = []
        for _ in range(4):
            q, r = np.linalg.qr(rng.standard_normal((H, H)))
            blocks.append(q * np.sign(np.diag(r)))
        b = np.zeros(4 * H)
        b[H : 2 * H] = 1.0
        return cls(Wx, np.vstack(blocks), b)


def _gates(z, c, H):
    s = sigmoid(z[..., : 3 * H])
    i, f, o = s[..., :H], s[..., H : 2 * H], s[..., 2 * H :]
    g = np.tanh(z[..., 3 * H :])
    c_next = f * c + i * g
    tc = np.tanh(c_next)
    return o * tc, c_next, (i, f, o, g, tc)


def _gate_backward(dh_next, dc_next, c, gates):
    """Gradient w.r.t. the gate pre-activations and the previous cell state."""
    i, f, o, g, tc = gates
    dc = dc_next + dh_next * o * (1.0 - tc**2)
    dz = np.concatenate(
        [
            dc * g * i * (1.0 - i),
            dc * c * f * (1.0 - f),
            dh_next * tc * o * (1.0 - o),
            dc * i * (1.0 - g**2),
        ],
        axis=-1,
    )
    return dz, dc * f


def _cell_forward(x, h, c, p):
    z = x @ p.Wx.T + h @ p.Wh.T + p.b
    h_next, c_next, gates = _gates(z, c, p.hidden_size)
    return h_next, c_next, (x, h, c, gates)


def _cell_backward(dh_next, dc_next, cache, p, grads):
    """Accumulate parameter gradients into ``grads``; return (dx, dh, dc)."""
    x, h, c, gates = cache
    dz, dc_prev = _gate_backward(dh_next, dc_next, c, gates)
    grads["Wx"] += dz.T @ x
    grads["Wh"] += dz.T @ h
    grads["b"] += dz.sum(axis=0)
    return dz @ p.Wx, dz @ p.Wh, dc_prev


def lstm_cell_step(x, h, c, p):
    """One LSTM step; accepts single vectors or batches along the leading axis."""
    x, h, c = (np.asarray(a, dtype=np.float64) for a in (x, h, c))
    if x.shape[-1] != p.input_size or h.shape[-1] != p.hidden_size or c.shape != h.shape:
        raise ValueError(
            f"shape mismatch: x{x.shape} h{h.shape} c{c.shape} for I={p.input_size}, H={p.hidden_size}"
        )
    h_next, c_next, _ = _cell_forward(x, h, c, p)
    return h_next, c_next


def lstm_cell_grad(x, h, c, p, dh_next, dc_next):
    """Gradients of ``sum(dh_next*h' + dc_next*c')`` for one step (batched)."""
    x, h, c = (np.atleast_2d(np.asarray(a, dtype=np.float64)) for a in (x, h, c))
    _, _, cache = _cell_forward(x, h, c, p)
    grads = {k: np.zeros_like(v) for k, v in (("Wx", p.Wx), ("Wh", p.Wh), ("b", p.b))}
    dx, dh, dc = _cell_backward(np.atleast_2d(dh_next), np.atleast_2d(dc_next), cache, p, grads)
    return grads, dx, dh, dc


# --- network --------------------------------------------------------------

PARAM_NAMES = ("fwd.Wx", "fwd.Wh", "fwd.b", "bwd.Wx", "bwd.Wh", "bwd.b", "out.w", "out.b")
WEIGHT_NAMES = ("fwd.Wx", "fwd.Wh", "bwd.Wx", "bwd.Wh", "out.w")


def init_params(input_size, hidden_size, rng):
    fwd = LstmCellParams.initialize(input_size, hidden_size, rng)
    bwd = LstmCellParams.initialize(input_size, hidden_size, rng)
    bound = 1.0 / np.sqrt(2 * hidden_size)
    return {
        "fwd.Wx": fwd.Wx, "fwd.Wh": fwd.Wh, "fwd.b": fwd.b,
        "bwd.Wx": bwd.Wx, "bwd.Wh": bwd.Wh, "bwd.b": bwd.b,
        "out.w": rng.uniform(-bound, bound, size=2 * hidden_size),
        "out.b": np.zeros(1),
    }


def _cell(params, prefix):
    return LstmCellParams(params[f"{prefix}.Wx"], params[f"{prefix}.Wh"], params[f"{prefix}.b"])


def _run(seq, p):
    """Run one cell over all steps of ``seq`` (B, T, C); input projections are batched."""
    B, T, _ = seq.shape
    H = p.hidden_size
    xproj = seq @ p.Wx.T + p.b
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    trace = []
    for t in range(T):
        h_prev, c_prev = h, c
        h, c, gates = _gates(xproj[:, t] + h_prev @ p.Wh.T, c_prev, H)
        trace.append((h_prev, c_prev, gates))
    return h, trace


def _run_backward(seq, p, trace, dh):
    B, T, C = seq.shape
    H = p.hidden_size
    dz_all = np.empty((B, T, 4 * H))
    h_prev_all = np.empty((B, T, H))
    dc = np.zeros_like(dh)
    for t in range(T - 1, -1, -1):
        h_prev, c_prev, gates = trace[t]
        dz, dc = _gate_backward(dh, dc, c_prev, gates)
        dz_all[:, t] = dz
        h_prev_all[:, t] = h_prev
        dh = dz @ p.Wh
    dz_flat = dz_all.reshape(B * T, 4 * H)
    return (
        dz_flat.T @ seq.reshape(B * T, C),
        dz_flat.T @ h_prev_all.reshape(B * T, H),
        dz_flat.sum(axis=0),
    )


def _directions(params, seq):
    # the reverse cell reads the time-reversed sequence
    return (("fwd", _cell(params, "fwd"), seq), ("bwd", _cell(params, "bwd"), seq[:, ::-1]))


def forward(params, seq):
    """Predictions (B,) for sequences of shape (B, T, C)."""
    finals = [_run(s, p)[0] for _, p, s in _directions(params, seq)]
    return np.concatenate(finals, axis=1) @ params["out.w"] + params["out.b"][0]


def loss_and_grad(params, seq, y, l2=0.0):
    """Mean squared error plus ``l2 * sum(weights**2)`` and its exact gradient."""
    B = seq.shape[0]
    runs = [(prefix, p, s, *_run(s, p)) for prefix, p, s in _directions(params, seq)]
    H = runs[0][1].hidden_size
    feat = np.concatenate([r[3] for r in runs], axis=1)
    pred = feat @ params["out.w"] + params["out.b"][0]
    resid = pred - y
    loss = float(np.mean(resid**2)) + l2 * sum(float(np.sum(params[k] ** 2)) for k in WEIGHT_NAMES)

    dpred = 2.0 * resid / B
    grads = {"out.w": feat.T @ dpred, "out.b": np.array([dpred.sum()])}
    dfeat = np.outer(dpred, params["out.w"])
    for d, (prefix, p, s, _, trace) in enumerate(runs):
        dWx, dWh, db = _run_backward(s, p, trace, dfeat[:, d * H : (d + 1) * H])
        grads[f"{prefix}.Wx"], grads[f"{prefix}.Wh"], grads[f"{prefix}.b"] = dWx, dWh, db

    for k in WEIGHT_NAMES:
        grads[k] = grads[k] + 2.0 * l2 * params[k]
    return loss, grads


def clip_by_global_norm(grads, max_norm):
    norm = float(np.sqrt(sum(np.sum(g**2) for g in grads.values())))
    if norm > max_norm:
        scale = max_norm / norm
        grads = {k: g * scale for k, g in grads.items()}
    return grads, norm


@dataclass(frozen=True)
class BilstmConfig:
    hidden_units: int = 16
    initial_lr: float = 0.01
    l2_coefficient: float = 1e-4
    max_epochs: int = 500
    grad_clip_norm: float = 1.0
    lr_drop_epoch: int = 350
    lr_drop_factor: float = 0.2
    seq_layout: str = "per_feature_steps"
    channels: int = 5  # values per step for per_feature_steps
    seed: int = 0

    def __post_init__(self):
        if self.hidden_units < 1 or self.max_epochs < 1 or self.channels < 1:
            raise ValueError("hidden_units, max_epochs and channels must be >= 1")
        if not self.initial_lr > 0 or self.l2_coefficient < 0:
            raise ValueError("initial_lr must be > 0 and l2_coefficient >= 0")
        if not self.grad_clip_norm > 0:
            raise ValueError("grad_clip_norm must be > 0")
        if self.lr_drop_epoch > self.max_epochs:
            raise ValueError("lr_drop_epoch must not exceed max_epochs")
        if self.seq_layout not in SEQ_LAYOUTS:
            raise ValueError(f"seq_layout must be one of {SEQ_LAYOUTS}")


@dataclass
class TrainingHistory:
    loss: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)  # before clipping
    clipped_norm: list = field(default_factory=list)
    learning_rate: list = field(default_factory=list)


class BiLSTMRegressor(Regressor):
    kind = "bilstm"

    def __init__(self, config=None):
        self.config = config or BilstmConfig()
        self.params = None
        self.y_min = 0.0
        self.y_scale = 1.0
        self.history = TrainingHistory()

    def _min_rows(self):
        return 4

    def to_sequences(self, X):
        D = X.shape[1]
        if self.config.seq_layout == "flat_steps":
            return X.reshape(X.shape[0], D, 1)
        C = self.config.channels
        if D % C:
            raise ValueError(f"{D} features do not divide into steps of {C} channels")
        return X.reshape(X.shape[0], D // C, C)

    def _fit(self, X, y):
        cfg = self.config
        seq = self.to_sequences(X)
        self.y_min = float(y.min())
        span = float(y.max() - y.min())
        self.y_scale = span if span > 0 else 1.0
        target = (y - self.y_min) / self.y_scale

        rng = np.random.default_rng(cfg.seed)
        params = init_params(seq.shape[2], cfg.hidden_units, rng)
        m = {k: np.zeros_like(v) for k, v in params.items()}
        v = {k: np.zeros_like(p) for k, p in params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        self.history = hist = TrainingHistory()

        for epoch in range(1, cfg.max_epochs + 1):
            loss, grads = loss_and_grad(params, seq, target, cfg.l2_coefficient)
            if not np.isfinite(loss):
                raise TrainingFailedError(f"loss became non-finite at epoch {epoch}", epoch=epoch)
            grads, norm = clip_by_global_norm(grads, cfg.grad_clip_norm)
            lr = cfg.initial_lr * (cfg.lr_drop_factor if epoch > cfg.lr_drop_epoch else 1.0)
            hist.loss.append(loss)
            hist.grad_norm.append(norm)
            hist.clipped_norm.append(float(np.sqrt(sum(np.sum(g**2) for g in grads.values()))))
            hist.learning_rate.append(lr)
            corr1 = 1.0 - beta1**epoch
            corr2 = 1.0 - beta2**epoch
            for k in params:
                m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
                v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
                params[k] = params[k] - lr * (m[k] / corr1) / (np.sqrt(v[k] / corr2) + eps)
        if not all(np.all(np.isfinite(p)) for p in params.values()):
            raise TrainingFailedError("parameters became non-finite", epoch=cfg.max_epochs)
        self.params = params

    def _predict(self, X):
        return self.y_min + self.y_scale * forward(self.params, self.to_sequences(X))

    def get_state(self):
        arrays = dict(self.params)
        arrays["target_scaling"] = np.array([self.y_min, self.y_scale])
        return asdict(self.config), arrays

    @classmethod
    def from_state(cls, config, arrays):
        model = cls(BilstmConfig(**config))
        model.params = {k: arrays[k].copy() for k in PARAM_NAMES}
        model.y_min, model.y_scale = (float(v) for v in arrays["target_scaling"])
        return model


def bilstm_fit(X, y, cfg=None):
    return BiLSTMRegressor(cfg).fit(X, y)
