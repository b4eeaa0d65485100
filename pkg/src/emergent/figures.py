"""Optional figure rendering for the CLI report path.

Figures are rendered with the Agg backend into PNG bytes and written
through the same atomic path as the delimited output.  The Software
metadata chunk is stripped so reruns are byte-identical.
"""

from __future__ import annotations

import io

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def _render(fig) -> bytes:
    buffer = io.BytesIO()
    fig.savefig(buffer, format="png", dpi=100, metadata={"Software": None})
    return buffer.getvalue()


def clock_figure(ticks, fidelity_deficits, residual) -> bytes:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    floor = np.maximum(np.asarray(fidelity_deficits, dtype=float), 1e-18)
    ax.semilogy(ticks, floor, marker=".", lw=1.0)
    ax.set_xlabel("clock tick")
    ax.set_ylabel("fidelity deficit")
    ax.set_title(f"conditional evolution (constraint residual {residual:.3e})")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    payload = _render(fig)
    plt.close(fig)
    return payload


def thermal_figure(energies, populations, fitted) -> bytes:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(energies, populations, "o", label="reduced state")
    ax.semilogy(energies, fitted, "-", label="exponential fit")
    ax.set_xlabel("system level energy")
    ax.set_ylabel("population")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    payload = _render(fig)
    plt.close(fig)
    return payload


def tunnel_figure(xs, ys, xlabel, ylabel) -> bytes:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(xs, ys, marker=".", lw=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    payload = _render(fig)
    plt.close(fig)
    return payload


def cosmo_figure(times, scales, densities) -> bytes:
    plt = _pyplot()
    fig, (left, right) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    left.loglog(np.maximum(times, np.min(times[times > 0], initial=1e-30)), scales, lw=1.2)
    left.set_xlabel("t")
    left.set_ylabel("a(t)")
    left.grid(True, which="both", alpha=0.3)
    right.loglog(scales, densities, lw=1.2)
    right.set_xlabel("a")
    right.set_ylabel("rho(a)")
    right.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    payload = _render(fig)
    plt.close(fig)
    return payload


def witness_figure(temperatures, entropies, e_ground, t_star) -> bytes:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(temperatures, entropies, lw=1.2, label="thermal entropy")
    if e_ground == e_ground:  # skip the degenerate (nan) case
        ax.axhline(e_ground, color="k", ls="--", lw=1.0, label="ground entanglement")
    if t_star is not None:
        ax.axvline(t_star, color="r", ls=":", lw=1.0, label="critical temperature")
    ax.set_xlabel("temperature")
    ax.set_ylabel("entropy (nats)")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    payload = _render(fig)
    plt.close(fig)
    return payload
