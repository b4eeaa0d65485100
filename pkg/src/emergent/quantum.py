"""Dense labeled tensor-factor states, entropies, and purification.

Everything here is plain numpy: states are 1-D complex arrays in
row-major factor order, density operators are (D, D) Hermitian arrays.
All entropies are natural-log (nats).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "EIGENVALUE_CLAMP",
    "Factorization",
    "LabeledState",
    "DensityOperator",
    "density_from_state",
    "partial_trace",
    "reduced_density",
    "von_neumann_entropy",
    "relative_entropy",
    "purify",
    "state_fidelity",
    "state_to_json",
    "state_from_json",
    "density_to_json",
    "density_from_json",
]

#: Eigenvalues at or below this are treated as exact zeros in entropies,
#: support checks, and purification rank counts.
EIGENVALUE_CLAMP = 1e-10

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10


@dataclass(frozen=True)
class Factorization:
    """Ordered tensor factors as (label, dim) pairs with unique labels."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(lab), int(dim)) for lab, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [lab for lab, _ in factors]
        if len(labels) != len(set(labels)):
            raise ValidationError(f"factor labels must be unique, got {labels}")
        if not factors:
            raise ValidationError("factorization needs at least one factor")
        for lab, dim in factors:
            if dim < 1:
                raise ValidationError(f"factor {lab!r} has dimension {dim} < 1")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def dim(self, label: str) -> int:
        for lab, dim in self.factors:
            if lab == label:
                return dim
        raise ValidationError(f"no factor labeled {label!r} in {self.labels}")

    def positions(self, labels: Iterable[str]) -> list[int]:
        """Axis positions of the given labels, in factor order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise ValidationError(f"unknown factor labels {sorted(unknown)}")
        return [i for i, (lab, _) in enumerate(self.factors) if lab in wanted]

    def subset(self, labels: Iterable[str]) -> "Factorization":
        keep = set(labels)
        return Factorization(tuple(f for f in self.factors if f[0] in keep))


def _as_factorization(factors) -> Factorization:
    if isinstance(factors, Factorization):
        return factors
    return Factorization(tuple(factors))


@dataclass(frozen=True)
class LabeledState:
    """Pure state vector over an ordered factorization.

    ``amplitudes[i]`` is the coefficient of the row-major multi-index over
    the factor dimensions.  Norm must be 1 within 1e-10 unless the state
    is explicitly flagged ``normalized=False``.
    """

    factorization: Factorization
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        fact = _as_factorization(self.factorization)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != fact.total_dim:
            raise ValidationError(
                f"amplitude length {amps.shape[0]} != total dimension {fact.total_dim}"
            )
        if self.normalized:
            norm = float(np.linalg.norm(amps))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValidationError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "factorization", fact)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.factorization.dims)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive, unit-trace operator over a factorization."""

    factorization: Factorization
    matrix: np.ndarray

    def __post_init__(self):
        fact = _as_factorization(self.factorization)
        mat = np.asarray(self.matrix, dtype=complex)
        D = fact.total_dim
        if mat.shape != (D, D):
            raise ValidationError(f"matrix shape {mat.shape} != ({D}, {D})")
        if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL:
            raise ValidationError("matrix is not Hermitian within 1e-10 entrywise")
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr} deviates from 1 beyond {TRACE_TOL}")
        lo = float(np.min(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))))
        if lo < -EIGENVALUE_CLAMP:
            raise ValidationError(f"negative eigenvalue {lo} below -{EIGENVALUE_CLAMP}")
        mat.setflags(write=False)
        object.__setattr__(self, "factorization", fact)
        object.__setattr__(self, "matrix", mat)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def density_from_state(state: LabeledState) -> DensityOperator:
    """Rank-one projector |psi><psi| on the same factorization."""
    amps = state.amplitudes
    if not state.normalized:
        amps = amps / np.linalg.norm(amps)
    return DensityOperator(state.factorization, np.outer(amps, amps.conj()))


def partial_trace(rho: DensityOperator, keep: Sequence[str]) -> DensityOperator:
    """Trace out every factor not named in ``keep``.

    Parameters
    ----------
    rho : DensityOperator
    keep : sequence of factor labels to retain, any order; the result keeps
        the original factor order.

    Returns
    -------
    DensityOperator on the retained factors.
    """
    fact = rho.factorization
    keep_pos = fact.positions(keep)
    if not keep_pos:
        raise ValidationError("must keep at least one factor")
    dims = fact.dims
    n = len(dims)
    tensor = rho.matrix.reshape(dims + dims)
    row_subs = list(range(n))
    col_subs = [i if i not in keep_pos else n + i for i in range(n)]
    out_subs = [i for i in keep_pos] + [n + i for i in keep_pos]
    reduced = np.einsum(tensor, row_subs + col_subs, out_subs)
    kept_fact = Factorization(tuple(fact.factors[i] for i in keep_pos))
    Dk = kept_fact.total_dim
    reduced = reduced.reshape(Dk, Dk)
    # enforce exact Hermiticity against einsum rounding
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityOperator(kept_fact, reduced)


def reduced_density(state: LabeledState, keep: Sequence[str]) -> DensityOperator:
    """Partial trace of |psi><psi| down to the ``keep`` factors."""
    return partial_trace(density_from_state(state), keep)


def von_neumann_entropy(rho: DensityOperator, clamp: float = EIGENVALUE_CLAMP) -> float:
    """-sum(lam ln lam) over eigenvalues above ``clamp``, in nats."""
    lams = rho.eigenvalues()
    lams = lams[lams > clamp]
    return float(-np.sum(lams * np.log(lams)))


def relative_entropy(
    sigma: DensityOperator, rho: DensityOperator, clamp: float = EIGENVALUE_CLAMP
) -> float:
    """Quantum relative entropy S(sigma || rho) = tr sigma (ln sigma - ln rho).

    Parameters
    ----------
    sigma, rho : DensityOperator on identical factorizations.
    clamp : eigenvalues at or below this count as zero.

    Returns
    -------
    float, >= 0.  ``math.inf`` when sigma has weight outside the support
    of rho (a deliberate divergence signal, not an overflow).
    """
    if sigma.factorization.factors != rho.factorization.factors:
        raise ValidationError("relative entropy needs matching factorizations")
    s_lams = sigma.eigenvalues()
    term1 = float(np.sum(s_lams[s_lams > clamp] * np.log(s_lams[s_lams > clamp])))

    r_lams, r_vecs = np.linalg.eigh(rho.matrix)
    # weight of sigma on each eigenvector of rho
    weights = np.real(np.einsum("ij,jk,ki->i", r_vecs.conj().T, sigma.matrix, r_vecs))
    term2 = 0.0
    for lam, w in zip(r_lams, weights):
        if lam > clamp:
            term2 += w * math.log(lam)
        elif w > clamp:
            return math.inf
    return max(term1 - term2, 0.0)


def purify(rho: DensityOperator, ancilla_label: str | None = None) -> LabeledState:
    """Standard-basis purification with ancilla dimension = rank(rho).

    Eigenvalues above the clamp are kept, sorted descending, and paired
    with ancilla basis vectors |0>, |1>, ... in that order, so
    tracing out the ancilla returns ``rho`` and the ancilla carries no
    structure beyond the Schmidt weights.
    """
    fact = rho.factorization
    if ancilla_label is None:
        for candidate in ("2", "anc", "env"):
            if candidate not in fact.labels:
                ancilla_label = candidate
                break
        else:
            raise ValidationError("no free ancilla label; pass ancilla_label")
    elif ancilla_label in fact.labels:
        raise ValidationError(f"ancilla label {ancilla_label!r} already in use")

    lams, vecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(lams)[::-1]
    lams, vecs = lams[order], vecs[:, order]
    mask = lams > EIGENVALUE_CLAMP
    lams, vecs = lams[mask], vecs[:, mask]
    rank = int(lams.shape[0])
    if rank == 0:
        raise ValidationError("operator has no spectral weight above the clamp")

    D = fact.total_dim
    amps = np.zeros(D * rank, dtype=complex)
    for n in range(rank):
        amps[n::rank] = math.sqrt(lams[n]) * vecs[:, n]
    # renormalize: clamped-away weight is at most rank * clamp
    amps = amps / np.linalg.norm(amps)
    out_fact = Factorization(fact.factors + ((ancilla_label, rank),))
    return LabeledState(out_fact, amps)


def state_fidelity(a: LabeledState, b: LabeledState) -> float:
    """|<a|b>|^2 for pure states on matching factorizations."""
    if a.factorization.factors != b.factorization.factors:
        raise ValidationError("fidelity needs matching factorizations")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# JSON round trip: factor descriptor plus row-major [re, im] pairs.

def _complex_out(values: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in values]


def _complex_in(pairs) -> np.ndarray:
    try:
        return np.array([complex(re, im) for re, im in pairs], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"complex entries must be [re, im] pairs: {exc}") from exc


def state_to_json(state: LabeledState) -> dict:
    return {
        "schema_version": "1",
        "kind": "state",
        "factors": [[lab, dim] for lab, dim in state.factorization.factors],
        "amplitudes": _complex_out(state.amplitudes),
        "normalized": bool(state.normalized),
    }


def state_from_json(doc: dict) -> LabeledState:
    if doc.get("kind") != "state":
        raise ValidationError(f"expected kind 'state', got {doc.get('kind')!r}")
    fact = Factorization(tuple((lab, dim) for lab, dim in doc["factors"]))
    return LabeledState(fact, _complex_in(doc["amplitudes"]), doc.get("normalized", True))


def density_to_json(rho: DensityOperator) -> dict:
    return {
        "schema_version": "1",
        "kind": "density",
        "factors": [[lab, dim] for lab, dim in rho.factorization.factors],
        "matrix": _complex_out(rho.matrix.reshape(-1)),
    }


def density_from_json(doc: dict) -> DensityOperator:
    if doc.get("kind") != "density":
        raise ValidationError(f"expected kind 'density', got {doc.get('kind')!r}")
    fact = Factorization(tuple((lab, dim) for lab, dim in doc["factors"]))
    D = fact.total_dim
    mat = _complex_in(doc["matrix"])
    if mat.shape[0] != D * D:
        raise ValidationError(f"matrix needs {D * D} entries, got {mat.shape[0]}")
    return DensityOperator(fact, mat.reshape(D, D))
