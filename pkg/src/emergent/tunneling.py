"""Barrier penetration rates: WKB quadrature, shrinking-horizon emission,
minisuperspace nucleation, and the hot-universe variants.

Desk-scale rates use natural units (set the scales via the ``constants``
module when SI output is needed).  Horizon emission exposes two routes:
the closed-form exponent and a contour-integral oracle that integrates
the radial pole with an explicit -i eps displacement and extrapolates
eps -> 0, so the closed form is never checked against itself.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate

from .constants import CODATA2018, PhysicalConstants, UnitSystem
from .errors import ConvergenceError, DimensionalError, ValidationError

__all__ = [
    "BarrierProfile",
    "TunnelingResult",
    "quarter_circle_barrier",
    "wkb_rate",
    "parikh_wilczek_exponent",
    "parikh_wilczek_contour",
    "hawking_temperature",
    "wdw_action_integral",
    "wdw_tunneling_probability",
    "universe_tunneling_exponent",
    "universe_temperature",
    "universe_mass",
    "chain_consistency_report",
]

WKB_REL_TOL = 1e-8


@dataclass(frozen=True)
class BarrierProfile:
    """Imaginary wavenumber magnitude k(r) across a classically forbidden
    region [r_inner, r_outer]."""

    k_of_r: Callable[[float], float]
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not self.r_inner < self.r_outer:
            raise ValidationError(
                f"need r_inner < r_outer, got [{self.r_inner}, {self.r_outer}]"
            )


@dataclass(frozen=True)
class TunnelingResult:
    """Rate Gamma = exp(-exponent) with quadrature diagnostics."""

    gamma: float
    exponent: float
    error_estimate: float
    effective_temperature: float | None = None


def quarter_circle_barrier(k0: float, width: float) -> BarrierProfile:
    """k(r) = k0 sqrt(1 - (r/L)^2) on [0, L]; the action integral is
    exactly k0 pi L / 4."""
    if k0 <= 0 or width <= 0:
        raise ValidationError("need k0 > 0 and width > 0")

    def k_of_r(r: float) -> float:
        x = r / width
        return k0 * math.sqrt(max(0.0, 1.0 - x * x))

    return BarrierProfile(k_of_r=k_of_r, r_inner=0.0, r_outer=width)


def wkb_rate(
    profile: BarrierProfile,
    mode_energy: float | None = None,
    k_B: float = 1.0,
    rel_tol: float = WKB_REL_TOL,
) -> TunnelingResult:
    """Gamma = exp(-2 integral k dr) by adaptive quadrature.

    Parameters
    ----------
    profile : BarrierProfile
    mode_energy : optional energy of the tunneling mode; when given, the
        Boltzmann reading exp(-E / k_B T_eff) = Gamma defines the
        returned effective temperature E / (k_B * exponent).
    rel_tol : required relative error estimate on the action integral.

    Raises
    ------
    ConvergenceError
        When the quadrature error estimate exceeds ``rel_tol``; the
        partial estimate rides along for diagnostics.
    """
    # quad rejects epsrel below ~50 machine epsilons; the rel_tol contract
    # is enforced on the returned estimate either way
    epsrel = max(min(rel_tol, 1e-10), 1e-13)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
        integral, abserr = scipy.integrate.quad(
            profile.k_of_r,
            profile.r_inner,
            profile.r_outer,
            epsabs=0.0,
            epsrel=epsrel,
            limit=300,
        )
    if integral < 0.0:
        raise ValidationError("barrier integral is negative; k(r) must be >= 0")
    scale = max(abs(integral), 1e-300)
    if abserr / scale > rel_tol:
        raise ConvergenceError(
            f"quadrature error {abserr:.3e} exceeds {rel_tol:.1e} of the integral",
            partial=integral,
            diagnostics={"abserr": abserr},
        )
    exponent = 2.0 * integral
    temperature = None
    if mode_energy is not None:
        if mode_energy <= 0 or exponent <= 0:
            raise ValidationError("effective temperature needs positive energy and exponent")
        temperature = mode_energy / (k_B * exponent)
    return TunnelingResult(
        gamma=math.exp(-exponent),
        exponent=exponent,
        error_estimate=2.0 * abserr,
        effective_temperature=temperature,
    )


# ---------------------------------------------------------------------------
# Shrinking-horizon emission (natural units G = c = hbar = k_B = 1)

def _check_emission(mass: float, omega: float) -> None:
    if mass <= 0.0:
        raise ValidationError(f"mass must be positive, got {mass}")
    if not 0.0 < omega < mass:
        raise ValidationError(f"quantum energy {omega} must lie in (0, mass)")


def parikh_wilczek_exponent(mass: float, omega: float) -> float:
    """Exponent 8 pi omega (M - omega/2) for emission of energy omega
    from a horizon of mass M, natural units."""
    _check_emission(mass, omega)
    return 8.0 * math.pi * omega * (mass - 0.5 * omega)


def parikh_wilczek_contour(
    mass: float,
    omega: float,
    eps_fractions: tuple[float, ...] = (0.02, 0.01, 0.005, 0.0025, 0.00125),
    quad_tol: float = 1e-12,
) -> float:
    """Contour-integral route to the emission exponent.

    Evaluates -2 Im of the double integral of 1/(1 - sqrt(2(M-w)/r))
    over r in [2M, 2(M-omega)] and w in [0, omega], displacing the
    radial pole with r -> r - i eps.  The eps -> 0 limit is taken by
    fitting the endpoint asymptotics
    a + b eps ln eps + c eps + d eps^2 ln eps + e eps^2
    over several pole widths (eps = fraction * 2 omega); the log terms
    arise because the pole exits through both integration endpoints.
    Lands within ~1e-7 relative of the limit for omega <= 0.1 mass.
    """
    _check_emission(mass, omega)
    r_out, r_in = 2.0 * (mass - omega), 2.0 * mass

    def inner_im(w: float, eps: float) -> float:
        # Im of the r-integral along r - i eps, oriented r_out -> r_in
        r0 = 2.0 * (mass - w)

        def f_im(r: float) -> float:
            z = complex(r, -eps)
            return (1.0 / (1.0 - cmath.sqrt(2.0 * (mass - w) / z))).imag

        points = [r0] if r_out < r0 < r_in else None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
            val, _ = scipy.integrate.quad(
                f_im, r_out, r_in, points=points,
                epsabs=quad_tol, epsrel=quad_tol, limit=500,
            )
        return val

    exponents = []
    eps_values = [frac * 2.0 * omega for frac in eps_fractions]
    for eps in eps_values:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
            outer, _ = scipy.integrate.quad(
                inner_im, 0.0, omega, args=(eps,),
                epsabs=quad_tol, epsrel=1e-11, limit=300,
            )
        # J = -int_{r_out}^{r_in}; exponent = -2 Im int dw J = +2 * outer
        exponents.append(2.0 * outer)

    eps_arr = np.array(eps_values)
    logs = np.log(eps_arr)
    design = np.stack(
        [np.ones_like(eps_arr), eps_arr * logs, eps_arr, eps_arr**2 * logs, eps_arr**2],
        axis=1,
    )
    coeffs, *_ = np.linalg.lstsq(design, np.array(exponents), rcond=None)
    return float(coeffs[0])


def hawking_temperature(mass_kg: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Emission temperature hbar c^3 / (8 pi G k_B M) in kelvin."""
    if mass_kg <= 0.0:
        raise ValidationError(f"mass must be positive, got {mass_kg}")
    c = constants
    return c.hbar * c.c**3 / (8.0 * math.pi * c.G * c.k_B * mass_kg)


# ---------------------------------------------------------------------------
# Minisuperspace nucleation

def wdw_action_integral(a0: float, method: str = "quadrature") -> float:
    """integral_0^{a0} a sqrt(1 - a^2/a0^2) da, two routes.

    The quadrature route substitutes u = 1 - a^2/a0^2 first (the
    integrand has a square-root endpoint), giving (a0^2/2) integral_0^1
    sqrt(u) du; the closed route returns a0^2/3.
    """
    if a0 <= 0.0:
        raise ValidationError(f"turning-point radius must be positive, got {a0}")
    if method == "closed":
        return a0 * a0 / 3.0
    if method == "quadrature":
        val, abserr = scipy.integrate.quad(
            lambda u: 0.5 * a0 * a0 * math.sqrt(u), 0.0, 1.0, epsabs=0.0, epsrel=1e-12
        )
        if abserr > 1e-10 * val:
            raise ConvergenceError("nucleation integral did not converge", partial=val)
        return val
    raise ValidationError(f"unknown method {method!r}; use 'quadrature' or 'closed'")


def wdw_tunneling_probability(a0: float, grav: float = 1.0, method: str = "quadrature") -> float:
    """Nucleation probability exp(-(3 pi / 2 G) * integral) = exp(-pi a0^2 / 2G)."""
    if grav <= 0.0:
        raise ValidationError(f"gravitational constant must be positive, got {grav}")
    action = (3.0 * math.pi / (2.0 * grav)) * wdw_action_integral(a0, method=method)
    return math.exp(-action)


# ---------------------------------------------------------------------------
# Hot-universe exponent, temperature, mass, and the chain comparison

VARIANTS = ("PaperLiteral", "DimensionallyConsistent")


def universe_tunneling_exponent(
    hubble: float,
    variant: str = "DimensionallyConsistent",
    units: str = "natural",
    constants: PhysicalConstants = CODATA2018,
    allow_dimensional_override: bool = False,
) -> float:
    """Probability exponent for the whole-universe rate estimate.

    ``DimensionallyConsistent`` is c^5/(hbar G H^2), dimensionless in
    any units.  ``PaperLiteral`` is c^5/(hbar G^2 H), which is 1/H in
    natural units but carries residual dimensions in SI; requesting it
    in SI raises unless ``allow_dimensional_override`` is set.
    """
    if hubble <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble}")
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if units not in ("natural", "si"):
        raise ValidationError(f"unknown units {units!r}; expected 'natural' or 'si'")
    c = constants
    if units == "natural":
        return 1.0 / hubble if variant == "PaperLiteral" else 1.0 / (hubble * hubble)
    if variant == "DimensionallyConsistent":
        return c.c**5 / (c.hbar * c.G * hubble * hubble)
    if not allow_dimensional_override:
        raise DimensionalError(
            "PaperLiteral exponent c^5/(hbar G^2 H) is not dimensionless in SI; "
            "pass allow_dimensional_override=True to evaluate it anyway"
        )
    return c.c**5 / (c.hbar * c.G**2 * hubble)


def universe_temperature(
    hubble_si: float, constants: PhysicalConstants = CODATA2018, stated: bool = False
) -> float:
    """Horizon temperature in kelvin for an expansion rate in 1/s.

    Default is the Hawking-type horizon value hbar H / (2 pi k_B);
    ``stated=True`` returns the Gibbs-argument variant with 4 pi in the
    denominator (half the default), kept separate because the two
    appear side by side and only their ratio is meaningful here.
    """
    if hubble_si <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble_si}")
    denom = 4.0 * math.pi if stated else 2.0 * math.pi
    return constants.hbar * hubble_si / (denom * constants.k_B)


def universe_mass(hubble_si: float, constants: PhysicalConstants = CODATA2018) -> float:
    """Mass within the horizon, c^3 / (4 G H), in kilograms."""
    if hubble_si <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble_si}")
    return constants.c**3 / (4.0 * constants.G * hubble_si)


@dataclass(frozen=True)
class ChainEntry:
    """One exponent variant chained back to an implied temperature."""

    variant: str
    exponent: float
    implied_temperature: float
    ratio_to_stated: float


@dataclass(frozen=True)
class ChainReport:
    """Boltzmann-chain comparison, natural units throughout."""

    hubble: float
    horizon_mass: float
    stated_temperature: float
    entries: tuple[ChainEntry, ...]


def chain_consistency_report(
    hubble_si: float, constants: PhysicalConstants = CODATA2018
) -> ChainReport:
    """Chain exp(-M_u/T) = exp(-exponent) into an implied temperature per
    variant and compare with the stated 4-pi temperature.

    Works in natural units (where both variants are dimensionless):
    M_u = 1/(4H) and T_stated = H/(4 pi).  The dimensionally consistent
    exponent 1/H^2 implies T = H/4, an H-independent factor pi above the
    stated value; the literal exponent 1/H implies T = 1/4.  No claim is
    made about which reading is correct; the report just fixes the
    numbers.
    """
    if hubble_si <= 0.0:
        raise ValidationError(f"expansion rate must be positive, got {hubble_si}")
    nat = UnitSystem.natural(constants)
    # H is an inverse time, so H_nat = H_si * t_Planck
    h_nat = hubble_si * nat.scale("time")
    mass = 1.0 / (4.0 * h_nat)
    stated = h_nat / (4.0 * math.pi)
    entries = []
    for variant in VARIANTS:
        exponent = universe_tunneling_exponent(h_nat, variant=variant, units="natural")
        implied = mass / exponent
        entries.append(
            ChainEntry(
                variant=variant,
                exponent=exponent,
                implied_temperature=implied,
                ratio_to_stated=implied / stated,
            )
        )
    return ChainReport(
        hubble=h_nat,
        horizon_mass=mass,
        stated_temperature=stated,
        entries=tuple(entries),
    )
