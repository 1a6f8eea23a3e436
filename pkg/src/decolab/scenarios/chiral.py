"""Chiral two-level molecule under continuous environmental monitoring.

The molecule starts in the left-handed state |L>; tunneling between the
handedness states is a sigma_x Hamiltonian with parity splitting omega,
while scattering off the surroundings dephases the chirality basis at rate
gamma (Lindblad sigma_z convention: coherences decay at 2*gamma).
Depending on gamma/omega the motion is approximately unitary, follows a
master equation, or freezes (quantum Zeno effect).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from ..localization import ObservableTrace
from ..premeasure import MonitoringChannel

# regime thresholds on gamma/omega
UNITARY_BELOW = 0.1
ZENO_ABOVE = 10.0


@dataclass
class ChiralConfig:
    omega: float = 1.0
    gamma: float = 0.0
    t_final: float = 20.0
    dt: float = 0.001
    record_stride: int = 10

    def __post_init__(self):
        if self.omega < 0 or self.gamma < 0:
            raise ValueError("omega and gamma must be >= 0")
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("dt and t_final must be positive")


def _check_step(cfg: ChiralConfig):
    bound = 0.05 / max(cfg.omega, cfg.gamma, 1e-30)
    if cfg.dt > bound:
        raise PreconditionError(f"dt = {cfg.dt} exceeds the step bound 0.05/max(omega, gamma) = {bound:.3g}")


def chiral_dynamics(cfg: ChiralConfig) -> ObservableTrace:
    """Evolve |L><L| under tunneling + chirality monitoring; record P_L and coherence.

    Each step is a Strang split: exact half tunneling unitary, full
    dephasing factor exp(-2*gamma*dt) on the chirality coherences, half
    unitary.  With gamma = 0 the composition is the exact Rabi evolution.
    """
    return chiral_run(cfg)[0]


def chiral_run(cfg: ChiralConfig) -> tuple[ObservableTrace, np.ndarray]:
    """Like chiral_dynamics, but also returns the final 2x2 density matrix."""
    _check_step(cfg)
    half = np.array([
        [math.cos(cfg.omega * cfg.dt / 4.0), -1j * math.sin(cfg.omega * cfg.dt / 4.0)],
        [-1j * math.sin(cfg.omega * cfg.dt / 4.0), math.cos(cfg.omega * cfg.dt / 4.0)],
    ])  # exp(-i (omega/2) sigma_x dt/2)
    # same dephasing factor monitor_step applies, inlined for the hot loop
    channel = MonitoringChannel(rate=2.0 * cfg.gamma, dt=cfg.dt)
    damp = math.exp(-channel.rate * channel.dt)
    rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    out = ObservableTrace()
    out.append(0.0, {"p_left": 1.0, "coherence": 0.0, "trace": 1.0})
    n_steps = round(cfg.t_final / cfg.dt)
    for step in range(1, n_steps + 1):
        rho = half @ rho @ half.conj().T
        rho[0, 1] *= damp
        rho[1, 0] *= damp
        rho = half @ rho @ half.conj().T
        rho /= np.trace(rho).real  # counter rounding drift of the trig unitary
        if step % cfg.record_stride == 0 or step == n_steps:
            out.append(step * cfg.dt, {
                "p_left": float(rho[0, 0].real),
                "coherence": float(2.0 * abs(rho[0, 1])),
                "trace": float(np.trace(rho).real),
            })
    return out, rho


def classify_regime(cfg: ChiralConfig) -> str:
    """'unitary', 'master' or 'zeno' from the declared gamma/omega thresholds."""
    if cfg.omega == 0.0:
        return "zeno" if cfg.gamma > 0 else "unitary"
    ratio = cfg.gamma / cfg.omega
    if ratio < UNITARY_BELOW:
        return "unitary"
    if ratio > ZENO_ABOVE:
        return "zeno"
    return "master"


def relaxation_rate(trace: ObservableTrace, t_min: float | None = None) -> float:
    """Fitted decay rate of P_L - 1/2 toward equilibrium (strong-monitoring regime)."""
    t, rec = trace.as_arrays()
    z = 2.0 * (rec["p_left"] - 0.5)
    if t_min is None:
        t_min = 0.05 * t[-1]
    mask = (t >= t_min) & (z > 1e-6)
    if mask.sum() < 4:
        raise ValueError("trace too short or already relaxed; cannot fit a rate")
    coef = np.polyfit(t[mask], np.log(z[mask]), 1)
    return float(-coef[0])


def time_to_reach(trace: ObservableTrace, level: float) -> float:
    """First recorded time where P_L drops to `level` (inf if never)."""
    t, rec = trace.as_arrays()
    below = np.nonzero(rec["p_left"] <= level)[0]
    return float(t[below[0]]) if len(below) else math.inf
