"""Flat-universe expansion with a horizon heat source.

The density obeys d rho/dt = -3(1+omega) rho H + 3 alpha rho^2 H with
H = sqrt(8 pi G rho / (3 c^2)).  The quadratic source has the closed-form
first integral

    rho(a) = D a^{-3(1+omega)} / (1 + (alpha D / (1+omega)) a^{-3(1+omega)})

which plateaus at (1+omega)/alpha for small a (exponential expansion) and
dilutes as an ordinary omega-fluid for large a.  The integrator never
evaluates the closed form, so the two routes stay independent checks of
each other.

Integration runs in (ln a, ln rho) in natural units regardless of the
unit system on the parameters; inputs and outputs are converted at the
boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .constants import CODATA2018, STEFAN_BOLTZMANN, UnitSystem
from .errors import ConvergenceError, ValidationError

__all__ = [
    "EPOCH_INFLATION",
    "EPOCH_RADIATION",
    "CosmoParams",
    "CosmoState",
    "Epoch",
    "Trajectory",
    "InfluxComparison",
    "default_alpha",
    "params_from_initial",
    "state_from_density",
    "friedmann_H",
    "closed_form_density",
    "integrate_universe",
    "detect_epochs",
    "heat_influx",
    "source_term_ratio",
]

EPOCH_INFLATION = "inflation"
EPOCH_RADIATION = "radiation"

INIT_CONSISTENCY_TOL = 1e-8


def _active_constants(units: UnitSystem):
    """(hbar, c, k_B, G, sigma) in the active unit system."""
    mode = units.mode.lower()
    if mode == "natural":
        return 1.0, 1.0, 1.0, 1.0, math.pi**2 / 60.0
    if mode == "si":
        c = CODATA2018
        return c.hbar, c.c, c.k_B, c.G, STEFAN_BOLTZMANN
    raise ValidationError(f"unsupported unit system {units.mode!r}; use 'SI' or 'Natural'")


def default_alpha(units: UnitSystem) -> float:
    """Coupling hbar G^2 / (45 c^7) of the quadratic density source, in
    1/energy-density units (1/45 in natural units)."""
    hbar, c, _, G, _ = _active_constants(units)
    return hbar * G**2 / (45.0 * c**7)


@dataclass(frozen=True)
class CosmoParams:
    """Fluid and source parameters.

    omega_eos : equation-of-state ratio p = omega rho, > -1
    alpha     : source coupling, 1/energy-density, >= 0
    D         : integration constant of the closed-form density, > 0
    curvature_k : only the flat case 0 is implemented
    units     : unit system the caller's numbers live in
    """

    omega_eos: float
    alpha: float
    D: float
    units: UnitSystem
    curvature_k: int = 0

    def __post_init__(self):
        if not self.omega_eos > -1.0:
            raise ValidationError(f"equation of state must exceed -1, got {self.omega_eos}")
        if self.alpha < 0.0:
            raise ValidationError(f"source coupling must be >= 0, got {self.alpha}")
        if not self.D > 0.0:
            raise ValidationError(f"density constant must be positive, got {self.D}")
        if self.curvature_k != 0:
            raise ValidationError("only flat spatial sections (curvature_k = 0) are implemented")
        _active_constants(self.units)

    @property
    def dilution_power(self) -> float:
        return 3.0 * (1.0 + self.omega_eos)

    def plateau_density(self) -> float:
        """Early-time constant density (1+omega)/alpha."""
        if self.alpha <= 0.0:
            raise ValidationError("no plateau without a source (alpha = 0)")
        return (1.0 + self.omega_eos) / self.alpha


@dataclass(frozen=True)
class CosmoState:
    """One snapshot (t, a, rho, H) in the parameter unit system."""

    t: float
    a: float
    rho: float
    hubble: float


@dataclass(frozen=True)
class Epoch:
    label: str
    t_start: float
    t_end: float


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[CosmoState, ...]
    epochs: tuple[Epoch, ...]


@dataclass(frozen=True)
class InfluxComparison:
    """Black-body influx over the modeled source 3 alpha rho^2 H.

    ratio uses the horizon temperature hbar H / (2 pi k_B); ratio_stated
    the 4 pi variant.  Neither equals 1; both are H-independent.
    """

    ratio: float
    ratio_stated: float


def friedmann_H(rho: float, params: CosmoParams) -> float:
    """Expansion rate sqrt(8 pi G rho / (3 c^2)) of the flat universe."""
    if rho < 0.0:
        raise ValidationError(f"density must be >= 0, got {rho}")
    _, c, _, G, _ = _active_constants(params.units)
    return math.sqrt(8.0 * math.pi * G * rho / (3.0 * c * c))


def closed_form_density(a: float, params: CosmoParams) -> float:
    """Exact density at scale factor a (first integral of the flow)."""
    if a <= 0.0:
        raise ValidationError(f"scale factor must be positive, got {a}")
    # evaluate in logs; a^-n overflows for deep-inflation starts
    log_x = -params.dilution_power * math.log(a)
    beta = params.alpha / (1.0 + params.omega_eos)
    if beta > 0.0:
        log_bdx = math.log(beta * params.D) + log_x
        if log_bdx > 0.0:
            # source-dominated side: rho = (1/beta) / (1 + 1/(beta D x))
            return (1.0 / beta) / (1.0 + math.exp(-log_bdx))
        log_rho = math.log(params.D) + log_x - math.log1p(math.exp(log_bdx))
    else:
        log_rho = math.log(params.D) + log_x
    return math.exp(log_rho) if log_rho <= 709.0 else math.inf


def params_from_initial(
    omega_eos: float,
    alpha: float,
    a0: float,
    rho0: float,
    units: UnitSystem | None = None,
) -> CosmoParams:
    """Build parameters with D inferred from one (a0, rho0) point.

    Inverts the closed form; requires alpha * rho0 < 1 + omega (densities
    at or above the plateau do not lie on any D > 0 branch).
    """
    units = UnitSystem.natural(CODATA2018) if units is None else units
    if a0 <= 0.0 or rho0 <= 0.0:
        raise ValidationError("need a0 > 0 and rho0 > 0")
    margin = 1.0 - alpha * rho0 / (1.0 + omega_eos)
    if margin <= 0.0:
        raise ValidationError(
            "initial density is at or above the plateau (1+omega)/alpha; "
            "no positive density constant reproduces it"
        )
    n = 3.0 * (1.0 + omega_eos)
    D = rho0 * a0**n / margin
    return CosmoParams(omega_eos=omega_eos, alpha=alpha, D=D, units=units)


def state_from_density(t: float, a: float, rho: float, params: CosmoParams) -> CosmoState:
    """Snapshot with the expansion rate filled in from the density."""
    return CosmoState(t=t, a=a, rho=rho, hubble=friedmann_H(rho, params))


# ---------------------------------------------------------------------------
# Integration (natural units, log variables)

def _natural_scales(units: UnitSystem):
    """(time, density) scale factors taking caller units to natural."""
    if units.mode.lower() == "natural":
        return 1.0, 1.0
    nat = UnitSystem.natural(CODATA2018)
    return nat.scale("time"), nat.scale("density")


def _to_natural(params: CosmoParams) -> CosmoParams:
    _, rho_scale = _natural_scales(params.units)
    return CosmoParams(
        omega_eos=params.omega_eos,
        alpha=params.alpha * rho_scale,
        D=params.D / rho_scale,
        units=UnitSystem.natural(CODATA2018),
        curvature_k=params.curvature_k,
    )


def integrate_universe(
    params: CosmoParams,
    init: CosmoState,
    t_end: float,
    n_samples: int = 256,
    t_eval=None,
    rtol: float = 1e-10,
    threshold: float = 0.5,
) -> Trajectory:
    """Integrate the expansion from ``init`` to ``t_end``.

    State is (ln a, ln rho); the sampled trajectory carries (t, a, rho, H)
    back in the parameter unit system, with epochs labeled at the given
    source/dilution threshold.

    Raises
    ------
    ValidationError
        Inconsistent initial condition (H vs density at 1e-8 relative) or
        an empty integration window.
    ConvergenceError
        Step-size underflow; densities starting above the plateau run
        away in finite time.  The partial trajectory rides along.
    """
    if init.a <= 0.0 or init.rho <= 0.0:
        raise ValidationError("need a > 0 and rho > 0 to start")
    if not t_end > init.t:
        raise ValidationError(f"t_end {t_end} must exceed the initial time {init.t}")
    expected_h = friedmann_H(init.rho, params)
    if abs(init.hubble - expected_h) > INIT_CONSISTENCY_TOL * abs(expected_h):
        raise ValidationError(
            f"initial expansion rate {init.hubble} inconsistent with the "
            f"density (expected {expected_h})"
        )
    if n_samples < 2:
        raise ValidationError("need at least two output samples")

    t_scale, rho_scale = _natural_scales(params.units)
    nat = _to_natural(params)
    omega, alpha = nat.omega_eos, nat.alpha
    n_power = nat.dilution_power

    t0 = init.t / t_scale
    t1 = t_end / t_scale
    if t_eval is None:
        grid = np.linspace(t0, t1, n_samples)
    else:
        grid = np.asarray(t_eval, dtype=float) / t_scale
        if grid.ndim != 1 or grid.size < 1:
            raise ValidationError("t_eval must be a 1-D list of times")
        if np.any(np.diff(grid) <= 0.0) or grid[0] < t0 or grid[-1] > t1:
            raise ValidationError("t_eval must increase strictly inside [t0, t_end]")

    def rhs(t, y):
        del t
        ln_rho = y[1]
        with np.errstate(over="ignore"):
            rho = np.exp(ln_rho)
            h = np.sqrt(8.0 * math.pi * rho / 3.0)
            return [h, h * (-n_power + 3.0 * alpha * rho)]

    sol = scipy.integrate.solve_ivp(
        rhs,
        (t0, t1),
        [math.log(init.a), math.log(init.rho / rho_scale)],
        method="DOP853",
        t_eval=grid,
        rtol=rtol,
        atol=1e-14,
    )

    samples = []
    for t_nat, ln_a, ln_rho in zip(sol.t, sol.y[0], sol.y[1]):
        rho = math.exp(float(ln_rho)) * rho_scale
        samples.append(state_from_density(float(t_nat) * t_scale, math.exp(float(ln_a)), rho, params))
    if not sol.success:
        reached = (sol.t[-1] if sol.t.size else t0) * t_scale
        partial = Trajectory(samples=tuple(samples), epochs=())
        raise ConvergenceError(
            f"integration stalled at t = {reached:.6g} before t_end = {t_end:.6g} "
            "(step size underflow; density likely ran away above the plateau)",
            partial=partial,
            diagnostics={"reached_time": reached, "solver_message": sol.message},
        )
    bare = Trajectory(samples=tuple(samples), epochs=())
    return Trajectory(samples=bare.samples, epochs=detect_epochs(bare, params, threshold=threshold))


def detect_epochs(
    traj: Trajectory, params: CosmoParams, threshold: float = 0.5
) -> tuple[Epoch, ...]:
    """Label contiguous runs of samples by source strength.

    A sample is ``inflation`` while the quadratic source exceeds
    ``threshold`` times the dilution term, i.e. alpha rho > threshold
    (1 + omega); ``radiation`` otherwise.  Monotone expansion gives at
    most one transition.
    """
    if threshold <= 0.0:
        raise ValidationError(f"threshold must be positive, got {threshold}")
    if not traj.samples:
        return ()
    cut = threshold * (1.0 + params.omega_eos)
    labels = [
        EPOCH_INFLATION if params.alpha * s.rho > cut else EPOCH_RADIATION
        for s in traj.samples
    ]
    epochs = []
    start = traj.samples[0].t
    for i in range(1, len(labels)):
        if labels[i] != labels[i - 1]:
            epochs.append(Epoch(label=labels[i - 1], t_start=start, t_end=traj.samples[i].t))
            start = traj.samples[i].t
    epochs.append(Epoch(label=labels[-1], t_start=start, t_end=traj.samples[-1].t))
    return tuple(epochs)


# ---------------------------------------------------------------------------
# Black-body influx cross-check

def heat_influx(hubble: float, params: CosmoParams) -> float:
    """Horizon black-body heating per unit volume, (3H/c) sigma T^4 with
    T = hbar H / (2 pi k_B).  Scales as H^5."""
    if hubble <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble}")
    hbar, c, k_B, _, sigma = _active_constants(params.units)
    temperature = hbar * hubble / (2.0 * math.pi * k_B)
    return (3.0 * hubble / c) * sigma * temperature**4


def source_term_ratio(params: CosmoParams, hubble: float = 1.0) -> InfluxComparison:
    """First-principles influx over the modeled source 3 alpha rho^2 H,
    evaluated on-shell (rho from the expansion rate).

    Both readings are independent of H; at the default coupling the
    horizon-temperature ratio is exactly 1/3 and the 4 pi variant exactly
    1/48.  Neither is 1: the modeled source overshoots the black-body
    budget, and the report leaves the mismatch visible.
    """
    if params.alpha <= 0.0:
        raise ValidationError("source comparison needs alpha > 0")
    if hubble <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble}")
    hbar, c, k_B, G, sigma = _active_constants(params.units)
    rho = 3.0 * c * c * hubble * hubble / (8.0 * math.pi * G)
    source = 3.0 * params.alpha * rho * rho * hubble
    influx = heat_influx(hubble, params)
    stated_temperature = hbar * hubble / (4.0 * math.pi * k_B)
    influx_stated = (3.0 * hubble / c) * sigma * stated_temperature**4
    return InfluxComparison(ratio=influx / source, ratio_stated=influx_stated / source)
