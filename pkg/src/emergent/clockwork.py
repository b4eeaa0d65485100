"""Relational time from a cyclic clock entangled with a system.

A ``d``-tick clock carries the standard basis as tick states and a
Hamiltonian whose one-step propagator exp(-i H_c) is exactly the cyclic
shift tick ``k`` -> ``k+1 (mod d)``.  The history state superposes the
system's Schrodinger orbit over ticks; conditioning on a tick recovers
the evolved system state, and the total-energy constraint annihilates
the history state exactly when the system spectrum lies on the tick
lattice {2 pi m / d, m = 0..d-1}.

H_c eigenvalue branch: the eigenvalue on the Fourier mode paired with a
lattice eigenvalue E = 2 pi m / d must be -E for the constraint to
vanish, so the spectrum is {-2 pi m / d, m = 0..d-1} (offset branch with
eigenvalue 0 on the uniform mode).  Any 2 pi shift per mode would give
the same shift unitary but a nonzero constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ValidationError
from .quantum import Factorization, LabeledState

__all__ = [
    "ClockModel",
    "HistoryState",
    "build_clock",
    "build_history_state",
    "conditional_state",
    "tick_weights",
    "schrodinger_oracle",
    "constraint_residual",
]

SYSTEM_LABEL = "s"
CLOCK_LABEL = "c"


@dataclass(frozen=True)
class ClockModel:
    """Cyclic clock: tick basis, Hamiltonian, and its exact shift unitary."""

    dim: int
    hamiltonian: np.ndarray
    shift: np.ndarray

    def tick_state(self, k: int) -> np.ndarray:
        if not 0 <= k < self.dim:
            raise ValidationError(f"tick {k} outside 0..{self.dim - 1}")
        vec = np.zeros(self.dim, dtype=complex)
        vec[k] = 1.0
        return vec


@dataclass(frozen=True)
class HistoryState:
    """Entangled system-clock state over factors (s, c)."""

    state: LabeledState
    system_dim: int
    clock: ClockModel


def build_clock(d: int) -> ClockModel:
    """Construct the ``d``-tick clock.

    The Fourier mode ``|f_m> = d^{-1/2} sum_k exp(-2 pi i m k / d) |k>``
    is a shift eigenvector with eigenvalue exp(+2 pi i m / d); assigning
    H_c eigenvalue ``-2 pi m / d`` to it makes exp(-i H_c) the exact
    cyclic shift and cancels lattice system energies in the constraint.
    """
    if d < 2:
        raise ValidationError(f"clock needs d >= 2 ticks, got {d}")
    k = np.arange(d)
    modes = np.exp(-2j * math.pi * np.outer(k, k) / d) / math.sqrt(d)  # column m = |f_m>
    eigenvalues = -2.0 * math.pi * np.arange(d) / d
    h_c = (modes * eigenvalues) @ modes.conj().T
    h_c = 0.5 * (h_c + h_c.conj().T)
    shift = (modes * np.exp(-1j * eigenvalues)) @ modes.conj().T
    return ClockModel(dim=d, hamiltonian=h_c, shift=shift)


def _check_system(h_s: np.ndarray, psi0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h_s = np.asarray(h_s, dtype=complex)
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if h_s.ndim != 2 or h_s.shape[0] != h_s.shape[1]:
        raise ValidationError(f"system Hamiltonian must be square, got {h_s.shape}")
    if np.max(np.abs(h_s - h_s.conj().T)) > 1e-10:
        raise ValidationError("system Hamiltonian is not Hermitian within 1e-10")
    if psi0.shape[0] != h_s.shape[0]:
        raise ValidationError(
            f"initial state length {psi0.shape[0]} != system dimension {h_s.shape[0]}"
        )
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"initial state norm {norm} deviates from 1")
    return h_s, psi0


def build_history_state(h_s: np.ndarray, psi0: np.ndarray, clock: ClockModel) -> HistoryState:
    """Uniform superposition of the Schrodinger orbit against clock ticks.

    Psi = d^{-1/2} sum_k [exp(-i H_s k) psi0] (x) |k>, built by repeated
    application of the one-step propagator (Pade expm), which keeps this
    route independent of the eigendecomposition oracle.
    """
    h_s, psi0 = _check_system(h_s, psi0)
    d = clock.dim
    ds = h_s.shape[0]
    u_step = scipy.linalg.expm(-1j * h_s)
    columns = np.empty((ds, d), dtype=complex)
    psi = psi0
    for k in range(d):
        columns[:, k] = psi
        psi = u_step @ psi
    amps = columns.reshape(-1) / math.sqrt(d)  # row-major (s, c) order
    fact = Factorization(((SYSTEM_LABEL, ds), (CLOCK_LABEL, d)))
    return HistoryState(state=LabeledState(fact, amps), system_dim=ds, clock=clock)


def conditional_state(history: HistoryState, k: int) -> LabeledState:
    """System state conditioned on clock tick ``k``, renormalized."""
    d = history.clock.dim
    if not 0 <= k < d:
        raise ValidationError(f"tick {k} outside 0..{d - 1}")
    columns = history.state.amplitudes.reshape(history.system_dim, d)
    vec = columns[:, k]
    norm = np.linalg.norm(vec)
    if norm <= 1e-15:
        raise ValidationError(f"conditional state at tick {k} has no weight")
    fact = Factorization(((SYSTEM_LABEL, history.system_dim),))
    return LabeledState(fact, vec / norm)


def tick_weights(history: HistoryState) -> np.ndarray:
    """Probability of each clock tick; uniform 1/d by construction."""
    columns = history.state.amplitudes.reshape(history.system_dim, history.clock.dim)
    return np.sum(np.abs(columns) ** 2, axis=0)


def schrodinger_oracle(h_s: np.ndarray, psi0: np.ndarray, k: int) -> LabeledState:
    """exp(-i H_s k) psi0 via eigendecomposition; the independent check."""
    h_s, psi0 = _check_system(h_s, psi0)
    lams, vecs = np.linalg.eigh(h_s)
    phases = np.exp(-1j * lams * k)
    out = vecs @ (phases * (vecs.conj().T @ psi0))
    fact = Factorization(((SYSTEM_LABEL, h_s.shape[0]),))
    return LabeledState(fact, out / np.linalg.norm(out))


def constraint_residual(history: HistoryState, h_s: np.ndarray) -> float:
    """|| (H_s (x) I + I (x) H_c) Psi ||, zero only on lattice spectra."""
    h_s = np.asarray(h_s, dtype=complex)
    ds, d = history.system_dim, history.clock.dim
    if h_s.shape != (ds, ds):
        raise ValidationError(f"Hamiltonian shape {h_s.shape} != ({ds}, {ds})")
    columns = history.state.amplitudes.reshape(ds, d)
    residual = h_s @ columns + columns @ history.clock.hamiltonian.T
    return float(np.linalg.norm(residual))
