"""Variational mode decomposition of 1-D signals and column-wise feature expansion.

Frequencies are in normalized cycles per sample, so every center frequency
lies in [0, 0.5]. The solver works on the one-sided (non-negative frequency)
spectrum of the mirror-extended signal and alternates three updates until the
modes stop changing:

* each mode spectrum is a Wiener filter of what the other modes leave
  unexplained, with gain ``1 / (1 + 2 * alpha * (f - omega_k)**2)``;
* each center frequency moves to the power-weighted mean frequency of its mode;
* the Lagrange multiplier takes a dual-ascent step of size ``tau``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SignalTooShortError

OMEGA_INITS = ("uniform_spread", "zero", "random")


@dataclass(frozen=True)
class VmdConfig:
    alpha: float = 356.0
    tau: float = 0.0
    n_modes: int = 5
    dc_component: bool = False
    omega_init: str = "uniform_spread"
    tolerance: float = 1e-7
    max_iterations: int = 500
    seed: int = 0  # only used by omega_init="random"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.omega_init not in OMEGA_INITS:
            raise ValueError(f"omega_init must be one of {OMEGA_INITS}")


@dataclass(frozen=True, eq=False)
class VmdOutput:
    modes: np.ndarray  # (K, N)
    omegas: np.ndarray  # (K,), ascending
    iterations_used: int
    final_update_norm: float

    @property
    def n_modes(self):
        return self.modes.shape[0]


def initial_omegas(cfg, n):
    K = cfg.n_modes
    if cfg.omega_init == "uniform_spread":
        omega = (np.arange(1, K + 1) - 0.5) / (2 * K)
    elif cfg.omega_init == "zero":
        omega = np.zeros(K)
    else:
        rng = np.random.default_rng(cfg.seed)
        lo = 1.0 / n
        omega = np.sort(np.exp(np.log(lo) + (np.log(0.5) - np.log(lo)) * rng.random(K)))
    if cfg.dc_component:
        omega[0] = 0.0
    return omega


def _mirror(signal):
    n = signal.shape[0]
    half = n // 2
    return np.concatenate([signal[:half][::-1], signal, signal[half:][::-1]]), half


def decompose(signal, cfg=None):
    """Split ``signal`` into ``cfg.n_modes`` band-limited modes.

    Returns modes sorted by ascending center frequency (stable, so colliding
    frequencies keep their original order).
    """
    cfg = cfg or VmdConfig()
    f = np.asarray(signal, dtype=np.float64).reshape(-1)
    n = f.shape[0]
    if n < 8:
        raise SignalTooShortError(f"signal has {n} samples, need at least 8")
    if not np.all(np.isfinite(f)):
        raise ValueError("signal contains non-finite values")

    extended, offset = _mirror(f)
    T = extended.shape[0]
    freqs = np.fft.rfftfreq(T)
    f_hat = np.fft.rfft(extended)

    K = cfg.n_modes
    omega = initial_omegas(cfg, n)
    u_hat = np.zeros((K, freqs.shape[0]), dtype=np.complex128)
    lam = np.zeros_like(f_hat)
    total = np.zeros_like(f_hat)
    two_alpha = 2.0 * cfg.alpha

    iterations = 0
    update = 0.0
    for _ in range(cfg.max_iterations):
        previous = u_hat.copy()
        for k in range(K):
            others = total - u_hat[k]
            u_hat[k] = (f_hat - others - lam / 2) / (1.0 + two_alpha * (freqs - omega[k]) ** 2)
            total = others + u_hat[k]
            if cfg.dc_component and k == 0:
                continue
            power = np.abs(u_hat[k]) ** 2
            mass = power.sum()
            if mass > 0:
                omega[k] = freqs @ power / mass
        if cfg.tau > 0:
            lam = lam + cfg.tau * (total - f_hat)
        iterations += 1

        update = 0.0
        for k in range(K):
            change = np.sum(np.abs(u_hat[k] - previous[k]) ** 2)
            scale = max(np.sum(np.abs(previous[k]) ** 2), np.sum(np.abs(u_hat[k]) ** 2))
            if scale > 0:
                update += change / scale
        if update <= cfg.tolerance:
            break

    modes = np.fft.irfft(u_hat, n=T, axis=1)[:, offset : offset + n]
    omega = np.clip(omega, 0.0, 0.5)
    order = np.argsort(omega, kind="stable")
    return VmdOutput(
        modes=np.ascontiguousarray(modes[order]),
        omegas=omega[order],
        iterations_used=iterations,
        final_update_norm=float(update),
    )


def reconstruct(out):
    return out.modes.sum(axis=0)


def mode_names(feature_names, n_modes):
    return [f"{name}_m{k}" for name in feature_names for k in range(1, n_modes + 1)]


def expand_features(ds, cfg=None, executor=None, return_outputs=False):
    """Replace each feature column by its ``K`` modes (``<feature>_m1 .. _mK``).

    Columns are decomposed in row order. ``executor`` (anything with ``map``)
    may run the columns concurrently; output order does not depend on it.
    """
    cfg = cfg or VmdConfig()
    if ds.row_count < 8:
        raise SignalTooShortError(f"expand_features needs at least 8 rows, got {ds.row_count}")

    def run(j):
        name = ds.feature_names[j]
        try:
            return decompose(ds.features[:, j], cfg)
        except (SignalTooShortError, ValueError) as exc:
            raise type(exc)(f"feature '{name}': {exc}") from exc

    columns = range(len(ds.feature_names))
    outputs = list(executor.map(run, columns) if executor is not None else map(run, columns))
    expanded = np.concatenate([o.modes.T for o in outputs], axis=1)
    result = ds.with_features(expanded, mode_names(ds.feature_names, cfg.n_modes))
    if return_outputs:
        return result, dict(zip(ds.feature_names, outputs))
    return result
