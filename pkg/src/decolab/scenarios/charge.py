"""Charge superselection from the monitoring by the particle's own field.

A superposition over charge values q is correlated with one field state
per radial shell; tracing the shells leaves rho_qq' = c_q conj(c_q')
times the per-shell overlap raised to the shell count.  Mutually
orthogonal shell states give an exactly diagonal mixture diag(|c_q|^2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hilbert import DensityMatrix, SubsystemSplit


@dataclass
class ChargeModel:
    amplitudes: np.ndarray            # c_q, sum |c_q|^2 = 1
    shells: int                        # number of radial shells R
    per_shell_overlap: np.ndarray      # Gram matrix of shell field states per charge pair

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if abs(np.sum(np.abs(self.amplitudes) ** 2) - 1.0) > 1e-12:
            raise ValueError("charge amplitudes must be normalized")
        if self.shells < 0:
            raise ValueError("shell count must be >= 0")
        g = np.asarray(self.per_shell_overlap, dtype=complex)
        q = len(self.amplitudes)
        if g.shape != (q, q):
            raise ValueError("overlap table must be square over the charge values")
        if np.max(np.abs(np.diag(g) - 1.0)) > 1e-12:
            raise ValueError("overlap table must have unit diagonal")
        if np.max(np.abs(g - g.conj().T)) > 1e-12:
            raise ValueError("overlap table must be hermitian")
        if np.linalg.eigvalsh(g)[0] < -1e-10:
            raise ValueError("overlap table must be positive semidefinite")
        self.per_shell_overlap = g

    @property
    def n_charges(self) -> int:
        return len(self.amplitudes)


def charge_reduced_density(model: ChargeModel) -> DensityMatrix:
    """Reduced state of the local charge after tracing all field shells.

    rho_qq' = c_q conj(c_q') (overlap_q'q)^R; with R = 0 this is the pure
    superposition, with orthogonal shells it is exactly diag(|c_q|^2).
    """
    c = model.amplitudes
    rho = np.outer(c, c.conj())
    # factor <Phi_q'|Phi_q> per shell: the transposed Gram entry
    rho *= model.per_shell_overlap.T ** model.shells
    split = SubsystemSplit((model.n_charges,), ("charge",))
    return DensityMatrix(rho, split)
