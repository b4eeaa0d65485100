"""Thermal states from energy-constrained entanglement with a degenerate bath.

A system level E_n is paired with the bath level at -E_n; the global
pure state spreads evenly over all matching bath basis states, so the
reduced system populations are proportional to the bath degeneracies
D(-E_n).  When ln D is locally linear in bath energy the populations
are Gibbs with inverse temperature beta = d ln D / d(bath energy).

The bath factor is materialized on its accessible subspace only (the
blocks actually paired with a system level), which keeps spin baths with
2^N total states tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .quantum import DensityOperator, Factorization, LabeledState

__all__ = [
    "BathModel",
    "synthetic_degeneracy",
    "spin_bath",
    "build_global_state",
    "reduced_system_state",
    "total_energy_residual",
    "beta_from_degeneracy",
    "GibbsFit",
    "fit_beta",
    "ThermalReport",
    "thermal_report",
    "binary_entropy",
    "two_mode_tunneling_state",
]

SYSTEM_LABEL = "s"
BATH_LABEL = "r"

ENERGY_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class BathModel:
    """Energy levels with integer degeneracies, sorted by energy."""

    levels: tuple[tuple[float, int], ...]
    kind: str = "table"

    def __post_init__(self):
        levels = tuple(sorted((float(e), int(g)) for e, g in self.levels))
        if len(levels) < 1:
            raise ValidationError("bath needs at least one level")
        for e, g in levels:
            if g < 1:
                raise ValidationError(f"degeneracy {g} at energy {e} must be >= 1")
            if not math.isfinite(e):
                raise ValidationError("bath energies must be finite")
        energies = [e for e, _ in levels]
        if len(set(energies)) != len(energies):
            raise ValidationError("bath level energies must be distinct")
        object.__setattr__(self, "levels", levels)

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for e, _ in self.levels])

    def degeneracy_at(self, energy: float) -> int:
        scale = max(1.0, float(np.max(np.abs(self.energies))))
        for e, g in self.levels:
            if abs(e - energy) <= ENERGY_MATCH_TOL * scale:
                return g
        raise ValidationError(f"bath has no level at energy {energy}")


def synthetic_degeneracy(beta: float, base: int = 2, depth: int = 8) -> BathModel:
    """Bath whose degeneracy is exactly exponential in its energy.

    Levels sit at e_k = -k ln(base)/beta with degeneracy base^(depth-k),
    so D(e) = base^depth * exp(beta e) holds exactly on the lattice and
    the induced populations are exactly Gibbs at inverse temperature
    ``beta``.
    """
    if beta == 0.0:
        raise ValidationError("beta must be nonzero; use an explicit level table")
    if base < 2 or depth < 1:
        raise ValidationError("need integer base >= 2 and depth >= 1")
    spacing = math.log(base) / beta
    levels = tuple((-k * spacing, base ** (depth - k)) for k in range(depth + 1))
    return BathModel(levels=levels, kind="synthetic")


def spin_bath(n_spins: int, spacing: float) -> BathModel:
    """N two-level spins: energy -n*spacing with degeneracy C(N, n)."""
    if n_spins < 1 or spacing <= 0:
        raise ValidationError("need n_spins >= 1 and spacing > 0")
    levels = tuple((-n * spacing, math.comb(n_spins, n)) for n in range(n_spins + 1))
    return BathModel(levels=levels, kind="spin")


def build_global_state(system_levels: Sequence[float], bath: BathModel) -> LabeledState:
    """Even superposition over all zero-total-energy (system, bath) pairs.

    Every system level must have a matching bath level at the opposite
    energy.  The bath factor covers the matched blocks only, in system
    level order, so its dimension is sum_n D(-E_n).
    """
    energies = [float(e) for e in system_levels]
    if len(energies) < 2:
        raise ValidationError("need at least two system levels")
    if len(set(energies)) != len(energies):
        raise ValidationError("system levels must be distinct")
    degs = [bath.degeneracy_at(-e) for e in energies]

    ds = len(energies)
    dr = int(sum(degs))
    total = float(sum(degs))
    amps = np.zeros((ds, dr), dtype=complex)
    offset = 0
    for n, g in enumerate(degs):
        amps[n, offset : offset + g] = 1.0 / math.sqrt(total)
        offset += g
    fact = Factorization(((SYSTEM_LABEL, ds), (BATH_LABEL, dr)))
    return LabeledState(fact, amps.reshape(-1))


def _columns(state: LabeledState) -> np.ndarray:
    ds, dr = state.factorization.dims
    return state.amplitudes.reshape(ds, dr)


def reduced_system_state(state: LabeledState) -> DensityOperator:
    """System reduced density, computed without forming the global matrix."""
    cols = _columns(state)
    rho = cols @ cols.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    fact = Factorization(((SYSTEM_LABEL, cols.shape[0]),))
    return DensityOperator(fact, rho)


def total_energy_residual(
    state: LabeledState, system_levels: Sequence[float], bath: BathModel
) -> float:
    """|| (H_s (x) I + I (x) H_r) Psi || for the diagonal pair Hamiltonians."""
    energies = [float(e) for e in system_levels]
    degs = [bath.degeneracy_at(-e) for e in energies]
    cols = _columns(state)
    if cols.shape[0] != len(energies):
        raise ValidationError("system level count does not match state")
    bath_energy = np.concatenate(
        [np.full(g, -e) for e, g in zip(energies, degs)]
    )
    resid = cols * np.asarray(energies)[:, None] + cols * bath_energy[None, :]
    return float(np.linalg.norm(resid))


def beta_from_degeneracy(bath: BathModel, at_energy: float) -> float:
    """Centered finite difference of ln D against bath energy.

    ``at_energy`` must be bracketed by bath levels; when it coincides
    with a level the two neighbors are used, otherwise the two
    surrounding levels.
    """
    levels = bath.levels
    if len(levels) < 3:
        raise ValidationError("need at least three bath levels to bracket a slope")
    energies = np.array([e for e, _ in levels])
    scale = max(1.0, float(np.max(np.abs(energies))))
    on_level = np.nonzero(np.abs(energies - at_energy) <= ENERGY_MATCH_TOL * scale)[0]
    if on_level.size:
        i = int(on_level[0])
        if i == 0 or i == len(levels) - 1:
            raise ValidationError(f"energy {at_energy} sits on an unbracketed edge level")
        lo, hi = i - 1, i + 1
    else:
        hi = int(np.searchsorted(energies, at_energy))
        if hi == 0 or hi == len(levels):
            raise ValidationError(f"energy {at_energy} is outside the bath level range")
        lo = hi - 1
    e_lo, g_lo = levels[lo]
    e_hi, g_hi = levels[hi]
    return (math.log(g_hi) - math.log(g_lo)) / (e_hi - e_lo)


@dataclass(frozen=True)
class GibbsFit:
    """Least-squares Gibbs fit of populations against energies."""

    beta: float
    log_z: float
    max_deviation: float


def fit_beta(system_levels: Sequence[float], populations: Sequence[float]) -> GibbsFit:
    """Fit -ln p_n = beta E_n + ln Z and report the worst population misfit."""
    e = np.asarray(system_levels, dtype=float)
    p = np.asarray(populations, dtype=float)
    if e.shape != p.shape or e.size < 2:
        raise ValidationError("need matching energies and populations, at least two")
    if np.any(p <= 0.0):
        raise ValidationError("populations must be strictly positive to fit")
    y = -np.log(p)
    design = np.stack([e, np.ones_like(e)], axis=1)
    (beta, log_z), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = np.exp(-(beta * e + log_z))
    return GibbsFit(
        beta=float(beta),
        log_z=float(log_z),
        max_deviation=float(np.max(np.abs(p - fitted))),
    )


@dataclass(frozen=True)
class ThermalReport:
    """Populations against the degeneracy-slope prediction."""

    system_levels: tuple[float, ...]
    populations: tuple[float, ...]
    beta_fit: float
    beta_theory: float
    max_gibbs_deviation: float
    bath_kind: str
    bath_states: int


def thermal_report(
    system_levels: Sequence[float], bath: BathModel, at_energy: float | None = None
) -> ThermalReport:
    """Build the global state, reduce it, fit Gibbs, compare to theory.

    ``at_energy`` picks where the theory slope is evaluated; default is
    the bath level matched by the median system level.
    """
    state = build_global_state(system_levels, bath)
    rho = reduced_system_state(state)
    pops = np.real(np.diag(rho.matrix))
    if at_energy is None:
        matched = sorted(-float(e) for e in system_levels)
        at_energy = matched[len(matched) // 2]
    fit = fit_beta(system_levels, pops)
    theory = beta_from_degeneracy(bath, at_energy)
    return ThermalReport(
        system_levels=tuple(float(e) for e in system_levels),
        populations=tuple(float(p) for p in pops),
        beta_fit=fit.beta,
        beta_theory=theory,
        max_gibbs_deviation=fit.max_deviation,
        bath_kind=bath.kind,
        bath_states=state.factorization.dims[1],
    )


def binary_entropy(t: float) -> float:
    """-t ln t - (1-t) ln(1-t), continuous at the endpoints."""
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"probability {t} outside [0, 1]")
    out = 0.0
    for w in (t, 1.0 - t):
        if w > 0.0:
            out -= w * math.log(w)
    return out


def two_mode_tunneling_state(transmission: float) -> tuple[LabeledState, float]:
    """One quantum split across a reflected and a transmitted mode.

    Returns the two-qubit occupation state
    sqrt(1-t)|1,0> + sqrt(t)|0,1> on factors (refl, trans) and its
    entanglement entropy, the binary entropy of ``t``.
    """
    t = float(transmission)
    entropy = binary_entropy(t)  # validates the range
    amps = np.zeros(4, dtype=complex)
    amps[2] = math.sqrt(1.0 - t)  # |1>_refl |0>_trans
    amps[1] = math.sqrt(t)  # |0>_refl |1>_trans
    fact = Factorization((("refl", 2), ("trans", 2)))
    return LabeledState(fact, amps), entropy
