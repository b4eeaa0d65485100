"""Command-line front end.

Every module is exposed as one subcommand writing CSV + JSON reports
into an output directory (``--out``, or the EMERGENT_OUTDIR environment
variable).  Outputs are byte-deterministic for a fixed (config, seed)
pair; ``--plot`` additionally renders PNG figures next to the delimited
files.  Exit codes: 0 success, 1 selftest failure, 2 invalid input,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import clockwork, cosmo, figures, thermal, tunneling, witness
from .constants import CODATA2018, UnitSystem
from .errors import ConvergenceError, ValidationError
from .quantum import Factorization, LabeledState, state_fidelity
from .report import SCHEMA_VERSION, format_float, write_csv, write_json, write_png
from .schemas import (
    BARRIER_TABLE_SCHEMA,
    CLOCK_SYSTEM_SCHEMA,
    COSMO_CONFIG_SCHEMA,
    THERMAL_LEVELS_SCHEMA,
    WITNESS_SYSTEM_SCHEMA,
    validate_config,
)

OUTDIR_ENV = "EMERGENT_OUTDIR"
SOLAR_MASS_KG = 1.989e30


# ---------------------------------------------------------------------------
# input plumbing

def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON: {exc}") from exc


def _entry_to_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    return complex(entry[0], entry[1])


def _parse_matrix(rows, source: str) -> np.ndarray:
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValidationError(f"{source}: matrix rows have unequal lengths")
    return np.array([[_entry_to_complex(cell) for cell in row] for row in rows])


def _parse_vector(entries) -> np.ndarray:
    return np.array([_entry_to_complex(cell) for cell in entries])


def _require(args, names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise ValidationError(f"missing required flag --{name}")


def _outdir(args) -> str:
    directory = args.out or os.environ.get(OUTDIR_ENV) or "."
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create output directory {directory}: {exc}") from exc
    return directory


def _parallel_map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _unit_system(args) -> UnitSystem:
    if args.units == "SI":
        return UnitSystem.si()
    return UnitSystem.natural(CODATA2018)


# ---------------------------------------------------------------------------
# selftest harness: each check is a named exact example from the module

def _run_selftest(subcommand: str, checks) -> int:
    failures = 0
    for label, check in checks:
        try:
            passed = bool(check())
            detail = ""
        except Exception as exc:  # a raising check is a failing check
            passed = False
            detail = f"  ({exc})"
        if not passed:
            failures += 1
        print(f"selftest {subcommand}.{label}: {'ok' if passed else 'FAIL'}{detail}")
    return 0 if failures == 0 else 1


def _clock_selftest() -> int:
    def shift_is_cyclic():
        clock = clockwork.build_clock(5)
        for k in range(5):
            advanced = clock.shift @ clock.tick_state(k)
            if np.max(np.abs(advanced - clock.tick_state((k + 1) % 5))) > 1e-12:
                return False
        return True

    def ticks_weigh_evenly():
        clock = clockwork.build_clock(8)
        h = np.diag([0.0, 1.0])
        history = clockwork.build_history_state(h, np.array([1.0, 0.0]), clock)
        return np.max(np.abs(clockwork.tick_weights(history) - 1.0 / 8)) < 1e-12

    def first_tick_is_initial():
        clock = clockwork.build_clock(8)
        h = np.diag([0.0, 1.0])
        psi0 = np.array([1.0, 1.0]) / math.sqrt(2)
        history = clockwork.build_history_state(h, psi0, clock)
        conditional = clockwork.conditional_state(history, 0)
        return np.max(np.abs(conditional.amplitudes - psi0)) < 1e-10

    return _run_selftest(
        "clock",
        [
            ("shift_is_cyclic", shift_is_cyclic),
            ("ticks_weigh_evenly", ticks_weigh_evenly),
            ("first_tick_is_initial", first_tick_is_initial),
        ],
    )


def _thermal_selftest() -> int:
    def slope_is_exact():
        bath = thermal.synthetic_degeneracy(1.0)
        energy = bath.energies[len(bath.energies) // 2]
        return abs(thermal.beta_from_degeneracy(bath, energy) - 1.0) < 1e-12

    def populations_are_gibbs():
        bath = thermal.synthetic_degeneracy(1.0)
        levels = [0.0, math.log(2.0), 2.0 * math.log(2.0)]
        report = thermal.thermal_report(levels, bath)
        return report.max_gibbs_deviation < 1e-12 and abs(report.beta_fit - 1.0) < 1e-10

    return _run_selftest(
        "thermal",
        [
            ("slope_is_exact", slope_is_exact),
            ("populations_are_gibbs", populations_are_gibbs),
        ],
    )


def _tunnel_selftest() -> int:
    def nucleation_closed_form():
        quadrature = tunneling.wdw_action_integral(1.0, method="quadrature")
        return abs(quadrature - 1.0 / 3.0) < 1e-10

    def nucleation_probability():
        p = tunneling.wdw_tunneling_probability(1.0, grav=1.0)
        return abs(p - math.exp(-math.pi / 2.0)) < 1e-10

    def solar_temperature():
        t = tunneling.hawking_temperature(SOLAR_MASS_KG)
        return abs(t - 6.17e-8) / 6.17e-8 < 1e-3

    def barrier_profile_endpoints():
        profile = tunneling.quarter_circle_barrier(2.0, 1.5)
        return abs(profile.k_of_r(0.0) - 2.0) < 1e-12 and abs(profile.k_of_r(1.5)) < 1e-6

    return _run_selftest(
        "tunnel",
        [
            ("nucleation_closed_form", nucleation_closed_form),
            ("nucleation_probability", nucleation_probability),
            ("solar_temperature", solar_temperature),
            ("barrier_profile_endpoints", barrier_profile_endpoints),
        ],
    )


def _cosmo_selftest() -> int:
    natural = UnitSystem.natural(CODATA2018)

    def critical_density_gives_unit_rate():
        params = cosmo.CosmoParams(omega_eos=1.0 / 3.0, alpha=0.0, D=1.0, units=natural)
        return abs(cosmo.friedmann_H(3.0 / (8.0 * math.pi), params) - 1.0) < 1e-12

    def dilution_power_law():
        params = cosmo.CosmoParams(omega_eos=1.0 / 3.0, alpha=0.0, D=7.0, units=natural)
        return abs(cosmo.closed_form_density(10.0, params) - 7.0e-4) < 1e-15

    def default_source_strength():
        return abs(cosmo.default_alpha(natural) - 1.0 / 45.0) < 1e-15

    def empty_trajectory_has_no_epochs():
        params = cosmo.CosmoParams(omega_eos=1.0 / 3.0, alpha=0.0, D=1.0, units=natural)
        return cosmo.detect_epochs(cosmo.Trajectory(samples=(), epochs=()), params) == ()

    return _run_selftest(
        "cosmo",
        [
            ("critical_density_gives_unit_rate", critical_density_gives_unit_rate),
            ("dilution_power_law", dilution_power_law),
            ("default_source_strength", default_source_strength),
            ("empty_trajectory_has_no_epochs", empty_trajectory_has_no_epochs),
        ],
    )


def _witness_selftest() -> int:
    two_qubits = Factorization((("a", 2), ("b", 2)))
    split = (("a",), ("b",))

    def singlet_entropy():
        amps = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
        value = witness.entanglement_entropy_pure(LabeledState(two_qubits, amps), split)
        return abs(value - math.log(2.0)) < 1e-12

    def skewed_entropy():
        amps = np.array([math.sqrt(0.9), 0.0, 0.0, math.sqrt(0.1)])
        value = witness.entanglement_entropy_pure(LabeledState(two_qubits, amps), split)
        return abs(value - (-0.9 * math.log(0.9) - 0.1 * math.log(0.1))) < 1e-12

    def two_level_capacity_peak():
        value = witness.heat_capacity(np.diag([0.0, 1.0]), 1.0)
        expected = math.exp(-1.0) / (1.0 + math.exp(-1.0)) ** 2
        return abs(value - expected) < 1e-12

    def product_ground_is_inconclusive():
        system = witness.ThermalSystem(np.diag([0.0, 1.0, 2.0, 3.0]), two_qubits, split)
        return witness.entropy_witness(system, 1.0).verdict == "inconclusive"

    def sky_bound_formula():
        bound = witness.cmb_frequency_bound(3.0, 1e-5, 1.0)
        inline = CODATA2018.k_B * 3.0 / CODATA2018.hbar * 1e-10
        return abs(bound - inline) / inline < 1e-12

    return _run_selftest(
        "witness",
        [
            ("singlet_entropy", singlet_entropy),
            ("skewed_entropy", skewed_entropy),
            ("two_level_capacity_peak", two_level_capacity_peak),
            ("product_ground_is_inconclusive", product_ground_is_inconclusive),
            ("sky_bound_formula", sky_bound_formula),
        ],
    )


# ---------------------------------------------------------------------------
# subcommand handlers

def _handle_clock(args) -> int:
    if args.selftest:
        return _clock_selftest()
    _require(args, ["d", "system"])
    doc = _load_json(args.system)
    validate_config(doc, CLOCK_SYSTEM_SCHEMA, args.system)
    h = _parse_matrix(doc["hamiltonian"], args.system)
    psi0 = _parse_vector(doc["initial_state"])
    if h.shape[0] != h.shape[1] or h.shape[0] != psi0.shape[0]:
        raise ValidationError(
            f"{args.system}: Hamiltonian {h.shape} does not match state length {psi0.shape[0]}"
        )
    norm = float(np.linalg.norm(psi0))
    if norm <= 0.0:
        raise ValidationError(f"{args.system}: initial state has zero norm")
    psi0 = psi0 / norm

    clock = clockwork.build_clock(args.d)
    history = clockwork.build_history_state(h, psi0, clock)
    residual = clockwork.constraint_residual(history, h)

    def fidelity_at(k: int) -> float:
        conditional = clockwork.conditional_state(history, k)
        oracle = clockwork.schrodinger_oracle(h, psi0, k)
        return state_fidelity(conditional, oracle)

    fidelities = _parallel_map(fidelity_at, range(args.d), args.threads)
    deficits = [1.0 - f for f in fidelities]

    outdir = _outdir(args)
    rows = [(k, fidelities[k], residual) for k in range(args.d)]
    write_csv(os.path.join(outdir, "clock.csv"), ("tick", "fidelity", "residual"), rows)
    write_json(
        os.path.join(outdir, "clock.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "clock",
            "clock_dim": args.d,
            "system_dim": int(h.shape[0]),
            "constraint_residual": residual,
            "max_fidelity_deficit": max(deficits),
        },
    )
    if args.plot:
        payload = figures.clock_figure(list(range(args.d)), deficits, residual)
        write_png(os.path.join(outdir, "clock.png"), payload)
    return 0


def _build_bath(args):
    if args.bath == "synthetic":
        return thermal.synthetic_degeneracy(args.beta, base=args.base, depth=args.depth)
    if args.bath == "spin":
        _require(args, ["N"])
        return thermal.spin_bath(args.N, args.spacing)
    _require(args, ["levels"])
    doc = _load_json(args.levels)
    validate_config(doc, THERMAL_LEVELS_SCHEMA, args.levels)
    rows = []
    for index, (energy, degeneracy) in enumerate(doc["levels"]):
        if degeneracy != int(degeneracy):
            raise ValidationError(
                f"{args.levels}: $.levels[{index}]: degeneracy {degeneracy} is not an integer"
            )
        rows.append((float(energy), int(degeneracy)))
    return thermal.BathModel(tuple(rows))


def _default_system_levels(args, bath) -> list[float]:
    if args.bath == "synthetic":
        # bath levels sit at -k ln(base)/beta, so mirror the first three
        step = math.log(args.base) / args.beta
        return [0.0, step, 2.0 * step]
    if args.bath == "spin":
        center = max(1, min(args.N - 1, round(0.75 * args.N)))
        return [(center - 1) * args.spacing, center * args.spacing, (center + 1) * args.spacing]
    # table bath: mirror the three middle levels
    energies = sorted(-e for e, _ in bath.levels)
    mid = len(energies) // 2
    picks = energies[max(0, mid - 1) : mid + 2]
    if len(picks) < 2:
        raise ValidationError("table bath needs at least two levels or --system-levels")
    return picks


def _handle_thermal(args) -> int:
    if args.selftest:
        return _thermal_selftest()
    bath = _build_bath(args)
    if args.system_levels:
        try:
            levels = [float(token) for token in args.system_levels.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad --system-levels: {exc}") from exc
    else:
        levels = _default_system_levels(args, bath)
    report = thermal.thermal_report(levels, bath)

    z = sum(math.exp(-report.beta_fit * e) for e in report.system_levels)
    fitted = [math.exp(-report.beta_fit * e) / z for e in report.system_levels]
    outdir = _outdir(args)
    rows = list(zip(report.system_levels, report.populations, fitted))
    write_csv(os.path.join(outdir, "thermal.csv"), ("energy", "population", "gibbs_fit"), rows)
    write_json(
        os.path.join(outdir, "thermal.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "thermal",
            "bath_kind": report.bath_kind,
            "bath_states": report.bath_states,
            "system_levels": list(report.system_levels),
            "populations": list(report.populations),
            "beta_fit": report.beta_fit,
            "beta_theory": report.beta_theory,
            "max_gibbs_deviation": report.max_gibbs_deviation,
        },
    )
    if args.plot:
        payload = figures.thermal_figure(report.system_levels, report.populations, fitted)
        write_png(os.path.join(outdir, "thermal.png"), payload)
    return 0


def _handle_tunnel(args) -> int:
    if args.selftest:
        return _tunnel_selftest()
    _require(args, ["preset"])
    outdir = _outdir(args)

    if args.preset == "blackhole":
        mass_kg = args.mass_solar * SOLAR_MASS_KG
        temperature = tunneling.hawking_temperature(mass_kg)
        sweep = args.mass_solar * np.geomspace(0.1, 10.0, 25)
        temps = _parallel_map(
            lambda m: tunneling.hawking_temperature(m * SOLAR_MASS_KG), sweep, args.threads
        )
        rows = [(m, m * SOLAR_MASS_KG, t) for m, t in zip(sweep, temps)]
        write_csv(
            os.path.join(outdir, "tunnel.csv"),
            ("mass_solar", "mass_kg", "temperature_K"),
            rows,
        )
        write_json(
            os.path.join(outdir, "tunnel.json"),
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "tunnel",
                "preset": "blackhole",
                "mass_solar": args.mass_solar,
                "mass_kg": mass_kg,
                "temperature_K": temperature,
            },
        )
        if args.plot:
            payload = figures.tunnel_figure(
                list(sweep), temps, "mass (solar)", "temperature (K)"
            )
            write_png(os.path.join(outdir, "tunnel.png"), payload)
        return 0

    if args.preset == "universe":
        chain = tunneling.chain_consistency_report(args.hubble)
        rows = [
            (entry.variant, entry.exponent, entry.implied_temperature, entry.ratio_to_stated)
            for entry in chain.entries
        ]
        write_csv(
            os.path.join(outdir, "tunnel.csv"),
            ("variant", "exponent", "implied_temperature", "ratio_to_stated"),
            rows,
        )
        write_json(
            os.path.join(outdir, "tunnel.json"),
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "tunnel",
                "preset": "universe",
                "hubble_si": args.hubble,
                "horizon_mass_natural": chain.horizon_mass,
                "stated_temperature_natural": chain.stated_temperature,
                "temperature_K": tunneling.universe_temperature(args.hubble),
                "stated_temperature_K": tunneling.universe_temperature(args.hubble, stated=True),
                "mass_kg": tunneling.universe_mass(args.hubble),
                "exponent_si": tunneling.universe_tunneling_exponent(
                    args.hubble, variant="DimensionallyConsistent", units="si"
                ),
            },
        )
        if args.plot:
            hubbles = args.hubble * np.geomspace(0.1, 10.0, 25)
            masses = [tunneling.universe_mass(h) for h in hubbles]
            payload = figures.tunnel_figure(
                list(hubbles), masses, "expansion rate (1/s)", "horizon mass (kg)"
            )
            write_png(os.path.join(outdir, "tunnel.png"), payload)
        return 0

    # custom barrier table
    _require(args, ["barrier"])
    doc = _load_json(args.barrier)
    validate_config(doc, BARRIER_TABLE_SCHEMA, args.barrier)
    rs = np.asarray(doc["r"], dtype=float)
    ks = np.asarray(doc["k"], dtype=float)
    if rs.shape != ks.shape:
        raise ValidationError(f"{args.barrier}: r and k must have the same length")
    if np.any(np.diff(rs) <= 0):
        raise ValidationError(f"{args.barrier}: r must be strictly increasing")
    if np.any(~np.isfinite(rs)) or np.any(~np.isfinite(ks)):
        raise ValidationError(f"{args.barrier}: table entries must be finite")
    if np.any(ks < 0):
        raise ValidationError(f"{args.barrier}: k must be nonnegative inside the barrier")
    profile = tunneling.BarrierProfile(
        k_of_r=lambda r: float(np.interp(r, rs, ks)), r_inner=float(rs[0]), r_outer=float(rs[-1])
    )
    result = tunneling.wkb_rate(profile, mode_energy=args.mode_energy)
    write_csv(os.path.join(outdir, "tunnel.csv"), ("r", "k"), list(zip(rs, ks)))
    write_json(
        os.path.join(outdir, "tunnel.json"),
        {
            "schema_version": SCHEMA_VERSION,
            "subcommand": "tunnel",
            "preset": "custom-barrier",
            "gamma": result.gamma,
            "exponent": result.exponent,
            "error_estimate": result.error_estimate,
            "effective_temperature": result.effective_temperature,
        },
    )
    if args.plot:
        payload = figures.tunnel_figure(list(rs), list(np.maximum(ks, 1e-300)), "r", "k(r)")
        write_png(os.path.join(outdir, "tunnel.png"), payload)
    return 0


def _epoch_label(t: float, epochs) -> str:
    for epoch in epochs:
        if t <= epoch.t_end:
            return epoch.label
    return epochs[-1].label if epochs else ""


def _handle_cosmo(args) -> int:
    if args.selftest:
        return _cosmo_selftest()
    _require(args, ["config"])
    doc = _load_json(args.config)
    validate_config(doc, COSMO_CONFIG_SCHEMA, args.config)
    units = _unit_system(args)
    alpha = doc["alpha"]
    if alpha == "default":
        alpha = cosmo.default_alpha(units)
    params = cosmo.params_from_initial(
        omega_eos=doc["omega_eos"],
        alpha=float(alpha),
        a0=doc["a0"],
        rho0=doc["rho0"],
        units=units,
    )
    init = cosmo.state_from_density(0.0, doc["a0"], doc["rho0"], params)
    trajectory = cosmo.integrate_universe(
        params, init, t_end=doc["t_end"], n_samples=doc.get("n_samples", 256)
    )

    outdir = _outdir(args)
    rows = [
        (s.t, s.a, s.rho, s.hubble, _epoch_label(s.t, trajectory.epochs))
        for s in trajectory.samples
    ]
    write_csv(os.path.join(outdir, "cosmo.csv"), ("t", "a", "rho", "H", "epoch"), rows)
    final = trajectory.samples[-1]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "cosmo",
        "units": units.mode,
        "omega_eos": params.omega_eos,
        "alpha": params.alpha,
        "density_coefficient": params.D,
        "epochs": [
            {"label": e.label, "t_start": e.t_start, "t_end": e.t_end}
            for e in trajectory.epochs
        ],
        "final_state": {"t": final.t, "a": final.a, "rho": final.rho, "H": final.hubble},
    }
    if params.alpha > 0.0:
        summary["plateau_density"] = params.plateau_density()
    write_json(os.path.join(outdir, "cosmo.json"), summary)
    if args.plot:
        times = np.array([s.t for s in trajectory.samples])
        scales = np.array([s.a for s in trajectory.samples])
        densities = np.array([s.rho for s in trajectory.samples])
        write_png(os.path.join(outdir, "cosmo.png"), figures.cosmo_figure(times, scales, densities))
    return 0


def _handle_witness(args) -> int:
    if getattr(args, "witness_mode", None) == "cmb":
        bound = witness.cmb_frequency_bound(args.T, args.dTrel, args.p)
        capacity = witness.critical_heat_capacity(args.T, bound, args.p)
        print(f"omega_bound_hz = {format_float(bound)}")
        print(f"critical_heat_capacity_kB = {format_float(capacity)}")
        outdir = _outdir(args)
        write_json(
            os.path.join(outdir, "witness_cmb.json"),
            {
                "schema_version": SCHEMA_VERSION,
                "subcommand": "witness cmb",
                "temperature_K": args.T,
                "rel_fluctuation": args.dTrel,
                "p_exponent": args.p,
                "omega_bound_hz": bound,
                "critical_heat_capacity_kB": capacity,
            },
        )
        return 0

    if args.selftest:
        return _witness_selftest()
    _require(args, ["hamiltonian"])
    doc = _load_json(args.hamiltonian)
    validate_config(doc, WITNESS_SYSTEM_SCHEMA, args.hamiltonian)
    for index, (label, dim) in enumerate(doc["factors"]):
        if not isinstance(label, str) or not isinstance(dim, int):
            raise ValidationError(
                f"{args.hamiltonian}: $.factors[{index}]: expected [label, integer dimension]"
            )
    factorization = Factorization(tuple((lab, dim) for lab, dim in doc["factors"]))
    bipartition = tuple(tuple(side) for side in doc["bipartition"])
    h = _parse_matrix(doc["hamiltonian"], args.hamiltonian)
    system = witness.ThermalSystem(h, factorization, bipartition)

    if args.tmin <= 0 or args.tmax <= args.tmin or args.tpoints < 2:
        raise ValidationError("need 0 < tmin < tmax and at least two grid points")
    grid = np.geomspace(args.tmin, args.tmax, args.tpoints)

    def evaluate(temperature: float):
        report = witness.entropy_witness(system, temperature)
        capacity = witness.heat_capacity(h, temperature)
        return report, capacity

    results = _parallel_map(evaluate, grid, args.threads)
    t_star = witness.critical_temperature(system)

    outdir = _outdir(args)
    rows = [
        (t, rep.s_thermal, cap, rep.verdict, rep.margin)
        for t, (rep, cap) in zip(grid, results)
    ]
    write_csv(
        os.path.join(outdir, "witness.csv"),
        ("T", "S_thermal", "C", "verdict", "margin"),
        rows,
    )
    first = results[0][0]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": "witness",
        "system_dim": int(h.shape[0]),
        "e_ground": first.e_ground,
        "degenerate_ground": first.degenerate_ground,
        "critical_temperature": t_star,
        "grid": [
            {
                "T": float(t),
                "S_thermal": rep.s_thermal,
                "C": cap,
                "verdict": rep.verdict,
                "margin": rep.margin,
            }
            for t, (rep, cap) in zip(grid, results)
        ],
    }
    if args.ree:
        if factorization.dims != (2, 2):
            raise ValidationError("--ree needs a two-qubit system")
        rho, _ = witness.gibbs_state(h, float(grid[0]), factorization=factorization)
        ree = witness.ree_brute_force(rho, seed=args.seed)
        summary["ree"] = {
            "temperature": float(grid[0]),
            "upper_bound": ree.upper_bound,
            "converged": ree.converged,
            "restart_values": list(ree.restart_values),
        }
    write_json(os.path.join(outdir, "witness.json"), summary)
    if args.plot:
        entropies = [rep.s_thermal for rep, _ in results]
        payload = figures.witness_figure(grid, entropies, first.e_ground, t_star)
        write_png(os.path.join(outdir, "witness.png"), payload)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emergent",
        description="Clock, bath, barrier, expansion, and witness calculations "
        "with deterministic CSV/JSON reports.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help=f"output directory (default ${OUTDIR_ENV} or .)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    common.add_argument("--units", choices=("Natural", "SI"), default="Natural")
    common.add_argument("--threads", type=int, default=1, help="bound on sweep parallelism")
    common.add_argument("--plot", action="store_true", help="also render PNG figures")
    common.add_argument("--selftest", action="store_true", help="run built-in exact examples")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    clock = sub.add_parser("clock", parents=[common], help="conditional clock evolution")
    clock.add_argument("--d", type=int, default=None, help="clock dimension")
    clock.add_argument("--system", default=None, help="system JSON (hamiltonian, initial_state)")
    clock.set_defaults(handler=_handle_clock)

    thermal_p = sub.add_parser("thermal", parents=[common], help="bath-induced Gibbs states")
    thermal_p.add_argument("--bath", choices=("synthetic", "spin", "table"), default="synthetic")
    thermal_p.add_argument("--beta", type=float, default=1.0, help="synthetic bath slope")
    thermal_p.add_argument("--base", type=int, default=2, help="synthetic degeneracy base")
    thermal_p.add_argument("--depth", type=int, default=8, help="synthetic level count")
    thermal_p.add_argument("--N", type=int, default=None, help="spin bath size")
    thermal_p.add_argument("--spacing", type=float, default=1.0, help="spin level spacing")
    thermal_p.add_argument("--levels", default=None, help="bath level table JSON")
    thermal_p.add_argument(
        "--system-levels", default=None, help="comma-separated system energies"
    )
    thermal_p.set_defaults(handler=_handle_thermal)

    tunnel = sub.add_parser("tunnel", parents=[common], help="barrier transmission presets")
    tunnel.add_argument("--preset", choices=("blackhole", "universe", "custom-barrier"))
    tunnel.add_argument("--mass-solar", type=float, default=1.0)
    tunnel.add_argument("--hubble", type=float, default=2.2e-18, help="expansion rate in 1/s")
    tunnel.add_argument("--barrier", default=None, help="barrier table JSON (r, k)")
    tunnel.add_argument("--mode-energy", type=float, default=None)
    tunnel.set_defaults(handler=_handle_tunnel)

    cosmo_p = sub.add_parser("cosmo", parents=[common], help="expansion history integration")
    cosmo_p.add_argument("--config", default=None, help="run config JSON")
    cosmo_p.set_defaults(handler=_handle_cosmo)

    witness_p = sub.add_parser("witness", parents=[common], help="thermal entanglement witness")
    witness_p.add_argument("--hamiltonian", default=None, help="system JSON")
    witness_p.add_argument("--tmin", type=float, default=0.1)
    witness_p.add_argument("--tmax", type=float, default=10.0)
    witness_p.add_argument("--tpoints", type=int, default=25)
    witness_p.add_argument("--ree", action="store_true", help="also bound the coldest grid state")
    witness_p.set_defaults(handler=_handle_witness, witness_mode=None)
    witness_sub = witness_p.add_subparsers(dest="witness_mode")
    cmb = witness_sub.add_parser("cmb", parents=[common], help="sky fluctuation bound")
    cmb.add_argument("--T", type=float, default=3.0, help="background temperature in K")
    cmb.add_argument("--dTrel", type=float, default=1e-5, help="relative fluctuation")
    cmb.add_argument("--p", type=float, default=1.0, help="scaling exponent")
    cmb.set_defaults(handler=_handle_witness)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
