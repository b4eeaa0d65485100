"""Entropy-based entanglement witnesses for thermal states.

The chain: a thermal state whose entropy lies below the entanglement
of the (unique) ground state must itself be entangled.  The witness is
one-sided; the partial-transpose certifier used to validate it lives in
the test battery, not here.

Relative entropy of entanglement is evaluated two ways: exactly for
pure states (reduced entropy) and by a seeded brute-force search over
mixtures of product states for arbitrary two-qubit inputs.  The search
minimizes S(rho || sigma) with an analytic gradient through the matrix
logarithm, so it is fast enough to serve as an oracle battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .constants import CODATA2018, PhysicalConstants
from .errors import ConvergenceError, ValidationError
from .quantum import (
    DensityOperator,
    Factorization,
    LabeledState,
    reduced_density,
    relative_entropy,
    von_neumann_entropy,
)

__all__ = [
    "VERDICT_ENTANGLED",
    "VERDICT_INCONCLUSIVE",
    "MAX_GIBBS_DIM",
    "ThermalSystem",
    "GibbsEnsemble",
    "WitnessReport",
    "ReeResult",
    "gibbs_state",
    "entanglement_entropy_pure",
    "entropy_witness",
    "critical_temperature",
    "heat_capacity",
    "ree_brute_force",
    "scaling_model_entropy",
    "cmb_frequency_bound",
    "critical_heat_capacity",
]

VERDICT_ENTANGLED = "entangled"
VERDICT_INCONCLUSIVE = "inconclusive"

MAX_GIBBS_DIM = 4096
HERMITICITY_TOL = 1e-10
# ground gaps below this fraction of the spectral width count as degenerate
DEGENERACY_FRACTION = 1e-9
ENTROPY_CLAMP = 1e-12


def _check_hamiltonian(h) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"Hamiltonian must be square, got shape {h.shape}")
    if h.shape[0] > MAX_GIBBS_DIM:
        raise ValidationError(f"dimension {h.shape[0]} exceeds the {MAX_GIBBS_DIM} limit")
    scale = max(np.max(np.abs(h)), 1.0)
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL * scale:
        raise ValidationError("Hamiltonian is not Hermitian")
    return h


def _normalized_bipartition(factorization: Factorization, bipartition):
    if bipartition is None or len(bipartition) != 2:
        raise ValidationError("bipartition must be two label groups")
    left = tuple(bipartition[0])
    right = tuple(bipartition[1])
    if not left or not right:
        raise ValidationError("both sides of the bipartition must be nonempty")
    combined = left + right
    if len(set(combined)) != len(combined) or set(combined) != set(factorization.labels):
        raise ValidationError(
            f"bipartition {bipartition} must partition the factors {factorization.labels} exactly"
        )
    return left, right


@dataclass(frozen=True)
class ThermalSystem:
    """Hamiltonian with a declared tensor split for the witness chain."""

    hamiltonian: np.ndarray
    factorization: Factorization
    bipartition: tuple[tuple[str, ...], tuple[str, ...]]

    def __post_init__(self):
        h = _check_hamiltonian(self.hamiltonian)
        if h.shape[0] != self.factorization.total_dim:
            raise ValidationError(
                f"Hamiltonian dimension {h.shape[0]} does not match factors "
                f"(total {self.factorization.total_dim})"
            )
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(
            self, "bipartition", _normalized_bipartition(self.factorization, self.bipartition)
        )


@dataclass(frozen=True)
class GibbsEnsemble:
    """Scalar thermodynamics of one Gibbs state.

    Entropy is in nats; free_energy = -k_B T log_z holds by construction
    and ground_weight >= exp(-entropy) by the Boltzmann chain.
    """

    temperature: float
    k_B: float
    log_z: float
    z: float
    internal_energy: float
    free_energy: float
    entropy: float
    ground_weight: float


def _boltzmann(energies: np.ndarray, kt: float):
    """Shifted weights, populations, and the true log partition sum."""
    e0 = float(energies[0])
    x = (energies - e0) / kt
    w = np.exp(-x)
    total = float(np.sum(w))
    p = w / total
    log_z = math.log(total) - e0 / kt
    return x, p, log_z, e0


def gibbs_state(
    hamiltonian,
    temperature: float,
    k_B: float = 1.0,
    factorization: Factorization | None = None,
) -> tuple[DensityOperator, GibbsEnsemble]:
    """exp(-H / k_B T) / Z with the ensemble scalars from the spectrum."""
    h = _check_hamiltonian(hamiltonian)
    if temperature <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    if k_B <= 0.0:
        raise ValidationError(f"k_B must be positive, got {k_B}")
    dim = h.shape[0]
    if factorization is None:
        factorization = Factorization((("s", dim),))
    elif factorization.total_dim != dim:
        raise ValidationError("factorization does not match the Hamiltonian dimension")
    energies, vectors = np.linalg.eigh(h)
    kt = k_B * temperature
    x, p, log_z, e0 = _boltzmann(energies, kt)
    matrix = (vectors * p) @ vectors.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    u = e0 + kt * float(np.sum(p * x))
    f = -kt * log_z
    s = (u - f) / kt
    ensemble = GibbsEnsemble(
        temperature=temperature,
        k_B=k_B,
        log_z=log_z,
        z=math.exp(log_z) if log_z < 709.0 else math.inf,
        internal_energy=u,
        free_energy=f,
        entropy=s,
        ground_weight=float(p[0]),
    )
    return DensityOperator(factorization, matrix), ensemble


def entanglement_entropy_pure(psi: LabeledState, bipartition) -> float:
    """Reduced-state von Neumann entropy across the bipartition, nats."""
    left, _ = _normalized_bipartition(psi.factorization, bipartition)
    return von_neumann_entropy(reduced_density(psi, keep=left))


@dataclass(frozen=True)
class WitnessReport:
    """Entropy-vs-ground-entanglement comparison at one temperature."""

    s_thermal: float
    e_ground: float
    verdict: str
    margin: float
    degenerate_ground: bool = False


def _spectral_analysis(system: ThermalSystem):
    energies, vectors = np.linalg.eigh(system.hamiltonian)
    width = float(energies[-1] - energies[0])
    gap = float(energies[1] - energies[0]) if len(energies) > 1 else 0.0
    degenerate = width <= 0.0 or gap < DEGENERACY_FRACTION * width
    return energies, vectors, degenerate


def _thermal_entropy(energies: np.ndarray, kt: float) -> float:
    x, p, log_z, _ = _boltzmann(energies, kt)
    del log_z
    mask = p > ENTROPY_CLAMP
    return float(-np.sum(p[mask] * np.log(p[mask])))


def entropy_witness(
    system: ThermalSystem, temperature: float, k_B: float = 1.0
) -> WitnessReport:
    """Compare S(rho_T) against the ground-state entanglement.

    Verdict is ``entangled`` exactly when S < E; a (near-)degenerate
    ground space makes E ill-defined and forces ``inconclusive``.
    """
    if temperature <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    energies, vectors, degenerate = _spectral_analysis(system)
    s_thermal = _thermal_entropy(energies, k_B * temperature)
    if degenerate:
        return WitnessReport(
            s_thermal=s_thermal,
            e_ground=math.nan,
            verdict=VERDICT_INCONCLUSIVE,
            margin=math.nan,
            degenerate_ground=True,
        )
    ground = LabeledState(system.factorization, vectors[:, 0])
    e_ground = entanglement_entropy_pure(ground, system.bipartition)
    verdict = VERDICT_ENTANGLED if s_thermal < e_ground else VERDICT_INCONCLUSIVE
    return WitnessReport(
        s_thermal=s_thermal,
        e_ground=e_ground,
        verdict=verdict,
        margin=e_ground - s_thermal,
    )


def critical_temperature(
    system: ThermalSystem, k_B: float = 1.0, rel_tol: float = 1e-6
) -> float | None:
    """Unique T* with S(rho_T*) = E(ground), or None when the witness
    never fires (zero ground entanglement or a degenerate ground space).

    S is monotone in T, so plain bisection after bracket expansion.
    """
    if k_B <= 0.0:
        raise ValidationError(f"k_B must be positive, got {k_B}")
    energies, vectors, degenerate = _spectral_analysis(system)
    if degenerate:
        return None
    ground = LabeledState(system.factorization, vectors[:, 0])
    target = entanglement_entropy_pure(ground, system.bipartition)
    if target <= 1e-12:
        return None
    width = float(energies[-1] - energies[0])
    kt_low = 1e-9 * width
    for _ in range(200):
        if _thermal_entropy(energies, kt_low) < target:
            break
        kt_low /= 10.0
    else:
        return None
    kt_high = width
    for _ in range(200):
        if _thermal_entropy(energies, kt_high) >= target:
            break
        kt_high *= 2.0
    else:
        return None
    while kt_high - kt_low > rel_tol * 0.5 * (kt_high + kt_low):
        kt_mid = 0.5 * (kt_low + kt_high)
        if _thermal_entropy(energies, kt_mid) < target:
            kt_low = kt_mid
        else:
            kt_high = kt_mid
    return 0.5 * (kt_low + kt_high) / k_B


def heat_capacity(hamiltonian, temperature: float, k_B: float = 1.0) -> float:
    """C / k_B = Var(H) / (k_B T)^2 from the Gibbs spectrum.

    The fluctuation form is exact; a centered difference of T dS/dT is
    evaluated from the same spectrum and must agree to 1e-6 relative
    whenever C is large enough for the comparison to be meaningful.
    """
    h = _check_hamiltonian(hamiltonian)
    if temperature <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    if k_B <= 0.0:
        raise ValidationError(f"k_B must be positive, got {k_B}")
    energies = np.linalg.eigvalsh(h)
    kt = k_B * temperature
    x, p, _, _ = _boltzmann(energies, kt)
    mean = float(np.sum(p * x))
    capacity = float(np.sum(p * x * x)) - mean * mean
    if capacity > 1e-8:
        step = 1e-5
        s_up = _thermal_entropy(energies, kt * (1.0 + step))
        s_dn = _thermal_entropy(energies, kt * (1.0 - step))
        fd = (s_up - s_dn) / math.log((1.0 + step) / (1.0 - step))
        if abs(fd - capacity) > 1e-6 * capacity:
            raise ConvergenceError(
                "fluctuation and finite-difference heat capacities disagree",
                partial=capacity,
                diagnostics={"finite_difference": fd},
            )
    return capacity


# ---------------------------------------------------------------------------
# Brute-force relative entropy of entanglement (two qubits)

RIDGE = 1e-12


@dataclass(frozen=True)
class ReeResult:
    """Upper bound on the relative entropy of entanglement.

    restart_values holds each restart's achieved minimum in run order;
    converged means a second restart confirmed the best value within the
    stabilization tolerance.
    """

    upper_bound: float
    restart_values: tuple[float, ...]
    converged: bool
    separable_state: DensityOperator


def _qubit_kets(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    half = 0.5 * theta
    return np.stack([np.cos(half), np.exp(1j * phi) * np.sin(half)], axis=1)


def _qubit_kets_dtheta(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    half = 0.5 * theta
    return np.stack([-0.5 * np.sin(half), 0.5 * np.exp(1j * phi) * np.cos(half)], axis=1)


def _qubit_kets_dphi(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    half = 0.5 * theta
    zeros = np.zeros_like(theta, dtype=complex)
    return np.stack([zeros, 1j * np.exp(1j * phi) * np.sin(half)], axis=1)


def _log_loewner(lam: np.ndarray) -> np.ndarray:
    """Divided-difference table of log on the spectrum."""
    diff = lam[:, None] - lam[None, :]
    close = np.abs(diff) <= 1e-12 * np.max(lam)
    safe = np.where(close, 1.0, diff)
    table = (np.log(lam)[:, None] - np.log(lam)[None, :]) / safe
    midpoint = 0.5 * (lam[:, None] + lam[None, :])
    return np.where(close, 1.0 / midpoint, table)


def _ree_objective(x: np.ndarray, rho: np.ndarray, tr_rho_ln_rho: float, m: int):
    params = x.reshape(m, 5)
    kets_a = _qubit_kets(params[:, 0], params[:, 1])
    kets_b = _qubit_kets(params[:, 2], params[:, 3])
    kets = np.einsum("mi,mj->mij", kets_a, kets_b).reshape(m, 4)
    logits = params[:, 4] - np.max(params[:, 4])
    weights = np.exp(logits)
    weights /= np.sum(weights)

    sigma = (kets.T * weights) @ kets.conj()
    sigma = (1.0 - RIDGE) * sigma + (RIDGE / 4.0) * np.eye(4)
    sigma = 0.5 * (sigma + sigma.conj().T)
    lam, v = np.linalg.eigh(sigma)
    a_mat = v.conj().T @ rho @ v
    value = tr_rho_ln_rho - float(np.real(np.sum(np.diag(a_mat) * np.log(lam))))

    # d tr(rho ln sigma) = tr(G d sigma), G from the Frechet derivative
    g_mat = v @ (a_mat * _log_loewner(lam)) @ v.conj().T
    scale = -(1.0 - RIDGE)

    per_product = np.real(np.einsum("ki,ij,kj->k", kets.conj(), g_mat, kets))
    q = scale * per_product
    grad_logits = weights * (q - float(np.sum(weights * q)))

    da_theta = _qubit_kets_dtheta(params[:, 0], params[:, 1])
    da_phi = _qubit_kets_dphi(params[:, 0], params[:, 1])
    db_theta = _qubit_kets_dtheta(params[:, 2], params[:, 3])
    db_phi = _qubit_kets_dphi(params[:, 2], params[:, 3])
    d_kets = (
        np.einsum("mi,mj->mij", da_theta, kets_b).reshape(m, 4),
        np.einsum("mi,mj->mij", da_phi, kets_b).reshape(m, 4),
        np.einsum("mi,mj->mij", kets_a, db_theta).reshape(m, 4),
        np.einsum("mi,mj->mij", kets_a, db_phi).reshape(m, 4),
    )
    grad = np.empty_like(params)
    for col, dk in zip((0, 1, 2, 3), d_kets):
        overlap = np.einsum("ki,ij,kj->k", kets.conj(), g_mat, dk)
        grad[:, col] = scale * weights * 2.0 * np.real(overlap)
    grad[:, 4] = grad_logits
    return value, grad.reshape(-1)


def ree_brute_force(
    rho: DensityOperator,
    bipartition=None,
    n_products: int = 16,
    n_restarts: int = 16,
    seed: int = 0,
    stabilization_tol: float = 1e-4,
) -> ReeResult:
    """Minimize S(rho || sigma) over mixtures of ``n_products`` product
    states with seeded randomized restarts (two-qubit inputs only).

    The mixture always includes a maximally-mixed ridge, so every
    candidate sigma is separable and the result is a true upper bound.
    Deterministic for a fixed seed.
    """
    if rho.factorization.dims != (2, 2):
        raise ValidationError("brute-force search supports exactly two qubits")
    if bipartition is not None:
        _normalized_bipartition(rho.factorization, bipartition)
    if n_products < 2 or n_restarts < 1:
        raise ValidationError("need at least two products and one restart")
    matrix = rho.matrix
    eigenvalues = np.linalg.eigvalsh(matrix)
    kept = eigenvalues[eigenvalues > ENTROPY_CLAMP]
    tr_rho_ln_rho = float(np.sum(kept * np.log(kept)))

    rng = np.random.default_rng(seed)
    values = []
    best_value = math.inf
    best_x = None
    for _ in range(n_restarts):
        x0 = np.empty((n_products, 5))
        x0[:, 0] = rng.uniform(0.0, math.pi, n_products)
        x0[:, 2] = rng.uniform(0.0, math.pi, n_products)
        x0[:, 1] = rng.uniform(0.0, 2.0 * math.pi, n_products)
        x0[:, 3] = rng.uniform(0.0, 2.0 * math.pi, n_products)
        x0[:, 4] = 0.5 * rng.standard_normal(n_products)
        result = scipy.optimize.minimize(
            _ree_objective,
            x0.reshape(-1),
            args=(matrix, tr_rho_ln_rho, n_products),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 400},
        )
        values.append(float(result.fun))
        if result.fun < best_value:
            best_value = float(result.fun)
            best_x = result.x

    params = best_x.reshape(n_products, 5)
    kets_a = _qubit_kets(params[:, 0], params[:, 1])
    kets_b = _qubit_kets(params[:, 2], params[:, 3])
    kets = np.einsum("mi,mj->mij", kets_a, kets_b).reshape(n_products, 4)
    logits = params[:, 4] - np.max(params[:, 4])
    weights = np.exp(logits)
    weights /= np.sum(weights)
    sigma = (kets.T * weights) @ kets.conj()
    sigma = (1.0 - RIDGE) * sigma + (RIDGE / 4.0) * np.eye(4)
    sigma = 0.5 * (sigma + sigma.conj().T)
    separable = DensityOperator(rho.factorization, sigma)
    # report through the standalone relative entropy, not the objective
    upper = float(max(relative_entropy(rho, separable), 0.0))

    ordered = sorted(values)
    confirmed = len(ordered) >= 2 and ordered[1] - ordered[0] <= stabilization_tol
    return ReeResult(
        upper_bound=upper,
        restart_values=tuple(values),
        converged=confirmed,
        separable_state=separable,
    )


# ---------------------------------------------------------------------------
# Phenomenological low-temperature scaling and the sky-survey bound

def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if value <= 0.0:
            raise ValidationError(f"{name} must be positive, got {value}")


def scaling_model_entropy(
    n_modes: float,
    temperature: float,
    omega_char: float,
    p_exponent: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """S = N (k_B T / hbar omega)^p, the low-T model behind the bound."""
    _check_positive(n_modes=n_modes, temperature=temperature, omega_char=omega_char)
    if p_exponent < 1.0:
        raise ValidationError(f"exponent must be >= 1, got {p_exponent}")
    ratio = constants.k_B * temperature / (constants.hbar * omega_char)
    return n_modes * ratio**p_exponent


def cmb_frequency_bound(
    temperature: float,
    rel_fluctuation: float,
    p_exponent: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """Characteristic frequency (rad/s scale in Hz units) below which the
    observed fluctuation level requires entanglement:
    omega = (k_B T / hbar) (dT/T)^(2/p)."""
    _check_positive(temperature=temperature, rel_fluctuation=rel_fluctuation)
    if p_exponent < 1.0:
        raise ValidationError(f"exponent must be >= 1, got {p_exponent}")
    return (constants.k_B * temperature / constants.hbar) * rel_fluctuation ** (2.0 / p_exponent)


def critical_heat_capacity(
    temperature: float,
    omega_char: float,
    p_exponent: float = 1.0,
    constants: PhysicalConstants = CODATA2018,
) -> float:
    """C_crit / k_B = (k_B T / hbar omega)^p; capacities below it cannot
    come from unentangled low-T spectra under the scaling model."""
    _check_positive(temperature=temperature, omega_char=omega_char)
    if p_exponent < 1.0:
        raise ValidationError(f"exponent must be >= 1, got {p_exponent}")
    return (constants.k_B * temperature / (constants.hbar * omega_char)) ** p_exponent
