"""Decay of an excited level into a discretized bath of field modes.

Uniformly spaced modes with uniform coupling (a cavity-like bath): the
unitary survival probability is near-exponential at the golden-rule rate
until the finite mode spacing causes a coherent revival at 2*pi/spacing.
Monitoring dephases the excited/decayed coherences each step, which
suppresses the revival and leaves an almost exactly exponential decay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError, UnsupportedConfigError
from ..localization import ObservableTrace


@dataclass
class DecayConfig:
    n_modes: int = 161
    mode_spacing: float = 0.5
    coupling: float = 0.5641895835477563  # golden-rule rate 4.0
    detuning_offsets: np.ndarray | None = None
    monitored: bool = False
    monitor_rate: float = 80.0
    t_final: float = 16.0
    dt: float = 0.005
    record_stride: int = 10

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.mode_spacing <= 0 or self.coupling <= 0:
            raise ValueError("mode_spacing and coupling must be positive")
        if self.monitor_rate < 0:
            raise ValueError("monitor_rate must be >= 0")
        if self.detuning_offsets is not None:
            off = np.asarray(self.detuning_offsets, dtype=float)
            if off.shape != (self.n_modes,):
                raise ValueError("detuning_offsets must have one entry per mode")
            self.detuning_offsets = off

    def detunings(self) -> np.ndarray:
        base = (np.arange(self.n_modes) - (self.n_modes - 1) / 2.0) * self.mode_spacing
        if self.detuning_offsets is not None:
            base = base + self.detuning_offsets
        return base

    def uniform_spacing(self) -> bool:
        return self.detuning_offsets is None or bool(np.allclose(self.detuning_offsets, self.detuning_offsets[0]))


def golden_rule_rate(cfg: DecayConfig) -> float:
    """Fermi golden rule for a flat band: 2 pi g^2 / mode spacing."""
    return 2.0 * math.pi * cfg.coupling**2 / cfg.mode_spacing


def _hamiltonian(cfg: DecayConfig) -> np.ndarray:
    n = cfg.n_modes
    h = np.zeros((n + 1, n + 1))
    h[0, 1:] = cfg.coupling
    h[1:, 0] = cfg.coupling
    h[np.arange(1, n + 1), np.arange(1, n + 1)] = cfg.detunings()
    return h


def _check_span(cfg: DecayConfig):
    span = cfg.n_modes * cfg.mode_spacing
    if cfg.n_modes > 1 and span < 4.0 * golden_rule_rate(cfg):
        raise PreconditionError(
            f"bath span {span:.3g} does not cover the linewidth {golden_rule_rate(cfg):.3g}"
        )


def decay_survival(cfg: DecayConfig) -> ObservableTrace:
    """Survival probability P(t) of the excited level.

    Unmonitored: exact unitary evolution via the eigenbasis.  Monitored:
    per-step unitary followed by dephasing exp(-monitor_rate*dt) of the
    excited/decayed coherences (populations untouched).
    """
    return decay_run(cfg)[0]


def decay_run(cfg: DecayConfig) -> tuple[ObservableTrace, np.ndarray | None]:
    """Like decay_survival; also returns the final density matrix (monitored only)."""
    _check_span(cfg)
    h = _hamiltonian(cfg)
    evals, vecs = np.linalg.eigh(h)
    out = ObservableTrace()
    if not cfg.monitored:
        weights = np.abs(vecs[0, :]) ** 2
        n_rec = round(cfg.t_final / (cfg.dt * cfg.record_stride))
        times = np.arange(n_rec + 1) * cfg.dt * cfg.record_stride
        amps = (weights[None, :] * np.exp(-1j * np.outer(times, evals))).sum(axis=1)
        for t, a in zip(times, amps):
            out.append(float(t), {"survival": float(abs(a) ** 2)})
        return out, None
    u = (vecs * np.exp(-1j * evals * cfg.dt)) @ vecs.conj().T
    f = math.exp(-cfg.monitor_rate * cfg.dt)
    n = cfg.n_modes
    rho = np.zeros((n + 1, n + 1), dtype=complex)
    rho[0, 0] = 1.0
    out.append(0.0, {"survival": 1.0})
    n_steps = round(cfg.t_final / cfg.dt)
    for step in range(1, n_steps + 1):
        rho = u @ rho @ u.conj().T
        rho[0, 1:] *= f
        rho[1:, 0] *= f
        if step % cfg.record_stride == 0 or step == n_steps:
            out.append(step * cfg.dt, {"survival": float(rho[0, 0].real)})
    return out, rho


def revival_time(cfg: DecayConfig) -> float:
    """Recurrence time 2 pi / mode spacing of the uniformly spaced bath."""
    if not cfg.uniform_spacing():
        raise UnsupportedConfigError("revival time is defined only for uniform mode spacing")
    return 2.0 * math.pi / cfg.mode_spacing


def survival_peak(trace: ObservableTrace, t_min: float) -> tuple[float, float]:
    """Location and height of the survival maximum after t_min."""
    t, rec = trace.as_arrays()
    p = rec["survival"]
    mask = t >= t_min
    i = int(np.argmax(p[mask]))
    return float(t[mask][i]), float(p[mask][i])


def exponential_fit(trace: ObservableTrace, t_max: float | None = None) -> tuple[float, float, float]:
    """Fit P = A exp(-rate t); returns (rate, amplitude, max relative residual).

    When t_max is None the window is chosen self-consistently as [0, 3/rate].
    """
    t, rec = trace.as_arrays()
    p = rec["survival"]

    def fit(window):
        m = (t <= window) & (p > 0)
        coef = np.polyfit(t[m], np.log(p[m]), 1)
        return -coef[0], math.exp(coef[1]), m

    if t_max is None:
        rate, _, _ = fit(max(t[len(t) // 4], t[1]))
        t_max = 3.0 / rate
    rate, amp, m = fit(t_max)
    model = amp * np.exp(-rate * t[m])
    resid = float(np.max(np.abs(p[m] - model) / model))
    return float(rate), float(amp), resid
