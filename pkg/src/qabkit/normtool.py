"""Finite-dimensional operator diagnostics in the l2 norm.

``lower_bound`` is the best constant delta with ||u x|| >= delta ||x||, i.e. the
smallest singular value.  ``witness_collapse`` builds, for a family of
operators u_n with functionals phi_n, vectors b_n with phi_n(b_n) = 1 and
||u_n b_n|| <= 1/n: the pair (-u_n b_n, phi_n(b_n)) then approaches (0, 1),
so in a completed pushout the new coordinate collapses to zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_TOL = 1e-9
FINITE_DIM_CAVEAT = "finite-dimensional: all three mono classes coincide, as do the epi classes"


class EmptyOperator(ValueError):
    pass


@dataclass(frozen=True)
class NumOperator:
    matrix: np.ndarray
    norm: str = "l2"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("operator matrix must be two-dimensional")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        if self.norm != "l2":
            raise ValueError("only the l2 norm is supported")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def seminorm(self, x) -> float:
        """p(x) = ||u x||."""
        return float(np.linalg.norm(self(x)))

    def scaled(self, a: float) -> "NumOperator":
        return NumOperator(a * self.matrix, self.norm)


def lower_bound(u: NumOperator) -> float:
    m, n = u.shape
    if n == 0:
        raise EmptyOperator("operator has an empty source")
    if m < n:
        return 0.0
    return float(np.linalg.svd(u.matrix, compute_uv=False)[-1])


@dataclass(frozen=True)
class OperatorReport:
    delta: float
    sigma_max: float
    rank: int
    shape: tuple
    tol: float
    is_mono: bool
    is_universal_mono: bool
    is_strict_mono: bool
    is_epi: bool
    is_universal_epi: bool
    is_strict_epi: bool
    degenerate: bool
    caveat: str = FINITE_DIM_CAVEAT

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["shape"] = list(self.shape)
        return d


def classify_operator(u: NumOperator, tol: float = DEFAULT_TOL) -> OperatorReport:
    """Mono/epi flags at relative tolerance ``tol`` (relative to sigma_max).

    ``degenerate`` marks an operator that is injective in exact arithmetic
    terms (sigma_min > 0) but not bounded below at this tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, n = u.shape
    sv = np.linalg.svd(u.matrix, compute_uv=False) if min(m, n) else np.zeros(0)
    smax = float(sv[0]) if sv.size else 0.0
    scale = smax if smax > 0 else 1.0
    rank = int(np.sum(sv > tol * scale))
    delta = lower_bound(u) if n else float("inf")
    mono = n == 0 or delta > tol * scale
    epi = rank == m
    degenerate = (not mono) and n > 0 and m >= n and delta > 0
    return OperatorReport(delta, smax, rank, (m, n), tol, mono, mono, mono, epi, epi, epi, bool(degenerate))


# -- families and collapse witnesses ----------------------------------------------------


@dataclass(frozen=True)
class OperatorFamily:
    """n -> (u_n, phi_n)."""

    name: str
    operator: Callable[[int], NumOperator]
    functional: Callable[[int], np.ndarray]


def trunc_diag_family() -> OperatorFamily:
    return OperatorFamily(
        "trunc-diag",
        lambda n: NumOperator(np.diag(1.0 / np.arange(1, n + 1))),
        lambda n: np.ones(n),
    )


def identity_family() -> OperatorFamily:
    return OperatorFamily("identity", lambda n: NumOperator(np.eye(n)), lambda n: np.ones(n))


def scaled_identity_family() -> OperatorFamily:
    return OperatorFamily(
        "scaled-identity",
        lambda n: NumOperator(np.eye(n) / n),
        lambda n: np.eye(n)[0],
    )


FAMILIES = {
    "trunc-diag": trunc_diag_family,
    "identity": identity_family,
    "scaled-identity": scaled_identity_family,
}


@dataclass(frozen=True)
class CollapseWitness:
    n: int
    b: np.ndarray
    phi_b: float
    p_b: float

    def satisfies_bounds(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.phi_b - 1.0) <= tol and self.p_b <= 1.0 / self.n + tol

    def row(self, delta: float | None = None) -> dict:
        out = {"n": self.n, "phi_bn": self.phi_b, "p_bn": self.p_b}
        if delta is not None:
            out["delta"] = delta
        return out


@dataclass
class CollapseReport:
    family: str
    max_n: int
    collapsing: bool
    witnesses: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    failed_at: int | None = None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "max_n": self.max_n,
            "collapsing": self.collapsing,
            "failed_at": self.failed_at,
            "rows": [w.row(d) for w, d in zip(self.witnesses, self.deltas)],
        }


def _large_value_vector(u: NumOperator, phi: np.ndarray, n: int, rel: float = 1e-12):
    """Some a with p(a) <= 1 and |phi(a)| >= n, or None.

    First the unit vector in the bottom singular subspace closest to phi,
    rescaled to p(a) = 1; failing that, the maximizer of |phi| on {p <= 1}.
    """
    _, s, vt = np.linalg.svd(u.matrix, full_matrices=True)
    s_full = np.zeros(vt.shape[0])
    s_full[: s.size] = s
    smax = s_full.max() if s_full.size else 0.0
    coef = vt @ phi  # phi on the right singular vectors
    null = s_full <= rel * max(smax, 1.0)
    if np.any(null & (np.abs(coef) > rel)):
        i = int(np.argmax(np.where(null, np.abs(coef), -1.0)))
        return vt[i] * (n / coef[i])
    bottom = np.isclose(s_full, s_full.min(), rtol=1e-9, atol=0.0)
    x = vt[bottom].T @ coef[bottom]
    if np.linalg.norm(x) > 0:
        x = x / np.linalg.norm(x)
        a = x / u.seminorm(x)
        if abs(phi @ a) >= n * (1 - rel):
            return a
    safe = np.where(null, 1.0, s_full)
    c = np.where(null, 0.0, coef / safe)
    if not np.any(c):
        return None
    a = (vt.T @ (c / safe)) / np.linalg.norm(c)
    if abs(phi @ a) >= n * (1 - rel):
        return a
    return None


def witness_collapse(family: OperatorFamily, max_n: int = 100) -> CollapseReport:
    """b_n = a_n / phi(a_n) for n = 1..max_n, or a non-collapsing report.

    The report is all-or-nothing: if no a_n exists for some n the family is
    reported non-collapsing and no witnesses are returned.
    """
    witnesses, deltas = [], []
    for n in range(1, max_n + 1):
        u, phi = family.operator(n), np.asarray(family.functional(n), dtype=float)
        a = _large_value_vector(u, phi, n)
        if a is None:
            return CollapseReport(family.name, max_n, False, failed_at=n)
        b = a / (phi @ a)
        witnesses.append(CollapseWitness(n, b, float(phi @ b), u.seminorm(b)))
        deltas.append(lower_bound(u))
    return CollapseReport(family.name, max_n, True, witnesses, deltas)
