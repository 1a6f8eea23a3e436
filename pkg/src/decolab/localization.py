"""Position-localization master equation on a uniform 1-D grid.

d rho/dt = -i [p^2/2m, rho] - lam (x - x')^2 rho,  hbar = 1.

The kinetic part is applied spectrally (periodic boundaries), the
localization part has an exact entrywise flow exp(-lam (x-x')^2 dt) which
is a Schur product with a positive-semidefinite Gaussian kernel, so both
sub-steps preserve hermiticity, trace and positivity.  Time stepping is
Strang splitting: kinetic half, localization full, kinetic half.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvariantError


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two >= 16")
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def p(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass
class GridDensityMatrix:
    """rho(x_i, x_j) with continuum normalization sum_i rho_ii dx = 1.

    mass may be math.inf (kinetic term skipped); lam >= 0 is the
    localization rate with units 1/(length^2 * time).
    """

    grid: GridSpec
    rho: np.ndarray
    mass: float
    lam: float

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        n = self.grid.n_points
        if self.rho.shape != (n, n):
            raise ValueError("rho shape must match the grid")
        if not (self.mass > 0):
            raise ValueError("mass must be positive (math.inf allowed)")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        if herm > 1e-10:
            raise ValueError(f"not hermitian: deviation {herm}")
        tr = float(np.real(np.sum(np.diag(self.rho)))) * self.grid.dx
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"trace {tr} != 1")

    def trace(self) -> float:
        return float(np.real(np.sum(np.diag(self.rho)))) * self.grid.dx

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of rho*dx (the discrete probability operator)."""
        return float(np.linalg.eigvalsh(self.rho)[0]) * self.grid.dx

    def audit(self) -> dict[str, float]:
        return {
            "trace_drift": abs(self.trace() - 1.0),
            "hermiticity_drift": float(np.max(np.abs(self.rho - self.rho.conj().T))),
            "min_eigenvalue": self.min_eigenvalue(),
        }


@dataclass
class GaussianMoments:
    mean_x: float
    mean_p: float
    var_xx: float
    cov_xp: float
    var_pp: float

    def __post_init__(self):
        if self.var_xx <= 0 or self.var_pp <= 0:
            raise ValueError("variances must be positive")
        if self.var_xx * self.var_pp - self.cov_xp**2 < 0.25 - 1e-9:
            raise ValueError("moments violate the uncertainty bound")


@dataclass
class ObservableTrace:
    times: list[float] = field(default_factory=list)
    records: dict[str, list[float]] = field(default_factory=dict)

    def append(self, t: float, values: dict[str, float]):
        if self.times and t <= self.times[-1]:
            raise ValueError("times must be strictly increasing")
        self.times.append(t)
        for k, v in values.items():
            self.records.setdefault(k, []).append(v)

    def as_arrays(self) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        return np.asarray(self.times), {k: np.asarray(v) for k, v in self.records.items()}


class CoherenceLength(NamedTuple):
    length: float
    below_floor: bool


def gaussian_packet(grid: GridSpec, center: float, sigma: float, momentum: float = 0.0) -> np.ndarray:
    """Normalized Gaussian wave function with position spread sigma."""
    x = grid.x
    psi = np.exp(-((x - center) ** 2) / (4.0 * sigma**2) + 1j * momentum * x)
    psi /= np.linalg.norm(psi) * math.sqrt(grid.dx)
    return psi.astype(complex)


def pure_density(grid: GridSpec, psi: np.ndarray, mass: float, lam: float) -> GridDensityMatrix:
    rho = np.outer(psi, psi.conj())
    return GridDensityMatrix(grid, rho, mass, lam)


def localization_step(s: GridDensityMatrix, dt: float) -> GridDensityMatrix:
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x = s.grid.x
    kernel = np.exp(-s.lam * dt * (x[:, None] - x[None, :]) ** 2)
    return GridDensityMatrix(s.grid, s.rho * kernel, s.mass, s.lam)


def _kinetic_phase(grid: GridSpec, mass: float, dt: float) -> np.ndarray:
    return np.exp(-1j * grid.p**2 / (2.0 * mass) * dt)


def _apply_left(rho: np.ndarray, phase: np.ndarray) -> np.ndarray:
    return np.fft.ifft(phase[:, None] * np.fft.fft(rho, axis=0), axis=0)


def _free_conjugate(rho: np.ndarray, phase: np.ndarray) -> np.ndarray:
    """U rho U^dag with U = F^-1 diag(phase) F, via the adjoint identity."""
    r1 = _apply_left(rho, phase)
    return _apply_left(r1.conj().T, phase).conj().T


def kinetic_half_step(s: GridDensityMatrix, dt: float) -> GridDensityMatrix:
    """Unitary free evolution over dt/2: rho -> U rho U^dag, U = F^-1 e^{-i p^2 dt/4m} F."""
    if not math.isfinite(s.mass):
        return GridDensityMatrix(s.grid, s.rho.copy(), s.mass, s.lam)
    phase = _kinetic_phase(s.grid, s.mass, dt / 2.0)
    rho = _free_conjugate(s.rho, phase)
    # enforce exact hermiticity against FFT rounding
    rho = 0.5 * (rho + rho.conj().T)
    return GridDensityMatrix(s.grid, rho, s.mass, s.lam)


OBSERVABLES = ("trace", "mean_x", "mean_p", "var_xx", "cov_xp", "var_pp",
               "coherence_length", "offdiag_peak", "purity")


def moments_of(s: GridDensityMatrix) -> GaussianMoments:
    """First and second moments of x and p computed spectrally from rho."""
    grid, rho, dx = s.grid, s.rho, s.grid.dx
    x = grid.x
    diag = np.real(np.diag(rho)) * dx
    mean_x = float(np.sum(x * diag))
    var_xx = float(np.sum((x - mean_x) ** 2 * diag))
    p = grid.p
    prho = np.fft.ifft(p[:, None] * np.fft.fft(rho, axis=0), axis=0)
    pprho = np.fft.ifft(p[:, None] ** 2 * np.fft.fft(rho, axis=0), axis=0)
    mean_p = float(np.real(np.sum(np.diag(prho))) * dx)
    mean_pp = float(np.real(np.sum(np.diag(pprho))) * dx)
    mean_xp = float(np.real(np.sum(x * np.diag(prho))) * dx)
    return GaussianMoments(
        mean_x=mean_x,
        mean_p=mean_p,
        var_xx=var_xx,
        cov_xp=mean_xp - mean_x * mean_p,
        var_pp=mean_pp - mean_p**2,
    )


def coherence_length(s: GridDensityMatrix) -> CoherenceLength:
    """Half-width at 1/e of |rho(x0+u/2, x0-u/2)| around the diagonal maximum."""
    diag = np.real(np.diag(s.rho))
    if np.sum(diag) * s.grid.dx <= 0:
        raise ValueError("state has no trace")
    i0 = int(np.argmax(diag))
    n = s.grid.n_points
    kmax = min(i0, n - 1 - i0)
    profile = np.abs(np.array([s.rho[i0 + k, i0 - k] for k in range(kmax + 1)]))
    target = profile[0] / math.e
    below = np.nonzero(profile < target)[0]
    if len(below) == 0:
        return CoherenceLength(float("inf"), False)
    k1 = below[0]
    if k1 == 0:
        return CoherenceLength(0.0, True)
    # linear interpolation between samples k1-1 and k1; u = 2 k dx
    f0, f1 = profile[k1 - 1], profile[k1]
    frac = (f0 - target) / (f0 - f1)
    u = 2.0 * s.grid.dx * (k1 - 1 + frac)
    return CoherenceLength(float(u), u < 2.0 * s.grid.dx)


def _record(s: GridDensityMatrix, names) -> dict[str, float]:
    out: dict[str, float] = {}
    moment_keys = {"mean_x", "mean_p", "var_xx", "cov_xp", "var_pp"}
    if moment_keys & set(names):
        m = moments_of(s)
        for k in moment_keys & set(names):
            out[k] = getattr(m, k)
    if "trace" in names:
        out["trace"] = s.trace()
    if "coherence_length" in names:
        out["coherence_length"] = coherence_length(s).length
    if "offdiag_peak" in names:
        a = np.abs(s.rho)
        np.fill_diagonal(a, 0.0)
        out["offdiag_peak"] = float(a.max())
    if "purity" in names:
        out["purity"] = float(np.real(np.trace(s.rho @ s.rho))) * s.grid.dx**2
    return out


def suggested_dt(s: GridDensityMatrix) -> float:
    """Heuristic step bound 0.1*min(m dx^2, 1/(lam L^2)); inf terms drop out."""
    candidates = []
    if math.isfinite(s.mass):
        candidates.append(s.mass * s.grid.dx**2)
    if s.lam > 0:
        candidates.append(1.0 / (s.lam * s.grid.length**2))
    return 0.1 * min(candidates) if candidates else math.inf


def evolve(
    s0: GridDensityMatrix,
    t_final: float,
    dt: float,
    recorder=("trace", "var_xx", "cov_xp", "var_pp", "offdiag_peak"),
    record_stride: int = 1,
    audit_tol: float = 1e-6,
) -> tuple[GridDensityMatrix, ObservableTrace]:
    """Strang-split evolution to t_final, recording observables along the way.

    Aborts with InvariantError if trace or hermiticity drifts beyond
    audit_tol mid-run.
    """
    n_steps = round(t_final / dt)
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError("dt must divide t_final")
    trace = ObservableTrace()
    trace.append(0.0, _record(s0, recorder))
    s = s0
    x = s.grid.x
    loc_kernel = np.exp(-s.lam * dt * (x[:, None] - x[None, :]) ** 2)
    kin_phase = None if not math.isfinite(s.mass) else _kinetic_phase(s.grid, s.mass, dt / 2.0)
    rho = s.rho.copy()
    for step in range(1, n_steps + 1):
        if kin_phase is not None:
            rho = _free_conjugate(rho, kin_phase)
        rho *= loc_kernel
        if kin_phase is not None:
            rho = _free_conjugate(rho, kin_phase)
            rho = 0.5 * (rho + rho.conj().T)
        tr_drift = abs(float(np.real(np.sum(np.diag(rho)))) * s.grid.dx - 1.0)
        if tr_drift > audit_tol:
            raise InvariantError(f"step {step}: trace drift {tr_drift:.3e}")
        if step % record_stride == 0 or step == n_steps:
            cur = GridDensityMatrix(s.grid, rho, s.mass, s.lam)
            trace.append(step * dt, _record(cur, recorder))
    out = GridDensityMatrix(s.grid, rho, s.mass, s.lam)
    herm = out.audit()["hermiticity_drift"]
    if herm > audit_tol:
        raise InvariantError(f"final state: hermiticity drift {herm:.3e}")
    return out, trace


def moment_ode_oracle(m0: GaussianMoments, mass: float, lam: float, t: float) -> GaussianMoments:
    """Second-moment flow of the master equation, integrated independently.

    Closed system (derived by integrating the equation against x, p, x^2,
    (xp+px)/2, p^2; the localization term feeds only var_pp):
        d<x>/dt   = <p>/m          d<p>/dt    = 0
        d var_xx  = 2 cov_xp / m   d cov_xp   = var_pp / m
        d var_pp  = 2 lam
    Integrated with an adaptive RK scheme at tight tolerance so it stays an
    independent oracle for the grid solver.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return GaussianMoments(m0.mean_x, m0.mean_p, m0.var_xx, m0.cov_xp, m0.var_pp)
    inv_m = 0.0 if not math.isfinite(mass) else 1.0 / mass

    def rhs(_t, y):
        mean_x, mean_p, var_xx, cov_xp, var_pp = y
        return [mean_p * inv_m, 0.0, 2.0 * cov_xp * inv_m, var_pp * inv_m, 2.0 * lam]

    y0 = [m0.mean_x, m0.mean_p, m0.var_xx, m0.cov_xp, m0.var_pp]
    sol = solve_ivp(rhs, (0.0, t), y0, rtol=1e-11, atol=1e-13, dense_output=False)
    y = sol.y[:, -1]
    return GaussianMoments(*[float(v) for v in y])
