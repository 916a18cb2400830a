"""Finitely presented abelian groups (and Z_(p)-modules) as an abelian category.

An object is ``R^g / colspan(relations)``; a morphism is a matrix acting on
generators that respects the relation lattices.  Kernels, cokernels and the
objects produced by (co)limits are always returned in standard form
``Z/d_1 + ... + Z/d_t + Z^r`` together with the structure arrows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

from .linalg import (
    ZZ,
    ExactMatrix,
    Ring,
    column_lattice_basis,
    kernel_basis,
    solve,
)


class IllDefined(ValueError):
    """The matrix does not send relations to relations."""


class FactorizationError(ValueError):
    """A requested factorization through a mono/epi does not exist."""


@dataclass(frozen=True, repr=False)
class FpObject:
    relations: ExactMatrix  # generators x relations

    def __repr__(self):
        return f"FpObject({self})"

    @property
    def ring(self) -> Ring:
        return self.relations.ring

    @property
    def ngens(self) -> int:
        return self.relations.nrows

    @cached_property
    def _std(self):
        dec = self.relations.smith
        g = self.ngens
        d = [dec.d[i] if i < len(dec.d) else 0 for i in range(g)]
        kept = [i for i in range(g) if not self.ring.is_unit(d[i])]
        factors = tuple(int(d[i]) for i in kept if d[i] != 0)
        rank = sum(1 for i in kept if d[i] == 0)
        return rank, factors, dec.U.rows_at(kept), dec.U_inv.cols_at(kept)

    @property
    def rank(self) -> int:
        return self._std[0]

    @property
    def factors(self) -> tuple[int, ...]:
        """Invariant factors other than 1, each dividing the next."""
        return self._std[1]

    @property
    def normal_form(self) -> tuple[int, tuple[int, ...]]:
        return self.rank, self.factors

    @cached_property
    def is_standard(self) -> bool:
        t = len(self.factors)
        return (
            self.ngens == t + self.rank
            and self.relations == ExactMatrix.diag(self.factors, self.ngens, t, self.ring)
        )

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.factors

    def is_finite(self) -> bool:
        return self.rank == 0

    def is_torsion_free(self) -> bool:
        return not self.factors

    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for d in self.factors:
            out *= d
        return out

    def isomorphic(self, other: "FpObject") -> bool:
        return self.ring == other.ring and self.normal_form == other.normal_form

    @classmethod
    def standard(cls, rank: int = 0, factors=(), ring: Ring = ZZ) -> "FpObject":
        factors = tuple(factors)
        g = len(factors) + rank
        return cls(ExactMatrix.diag(factors, g, len(factors), ring))

    @classmethod
    def zero(cls, ring: Ring = ZZ) -> "FpObject":
        return cls.standard(0, (), ring)

    def standardized(self) -> "FpObject":
        if self.is_standard:
            return self
        return FpObject.standard(self.rank, self.factors, self.ring)

    def to_standard(self) -> "FpMorphism":
        """Isomorphism onto :meth:`standardized`."""
        return FpMorphism(self, self.standardized(), self._std[2], check=False)

    def from_standard(self) -> "FpMorphism":
        return FpMorphism(self.standardized(), self, self._std[3], check=False)

    def __str__(self):
        base = "Z" if not self.ring.is_local else self.ring.name
        parts = [f"{base}/{d}" for d in self.factors]
        if self.rank == 1:
            parts.append(base)
        elif self.rank > 1:
            parts.append(f"{base}^{self.rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        body = self.ring.to_json()
        body["generators"] = self.ngens
        body["relations"] = [[str(Fraction(x)) for x in row] for row in self.relations.data]
        return {"object": body}

    @classmethod
    def from_json(cls, d: dict) -> "FpObject":
        body = d.get("object", d)
        ring = Ring.from_json(body)
        g = int(body["generators"])
        rows = body.get("relations") or [[] for _ in range(g)]
        if len(rows) != g:
            raise ValueError(f"relations must have one row per generator ({g})")
        r = len(rows[0]) if rows else 0
        return cls(ExactMatrix([[Fraction(str(x)) for x in row] for row in rows], ring, ncols=r))

    # -- elements of finite objects -----------------------------------------
    def elements(self) -> Iterator[tuple[int, ...]]:
        """Elements in standard coordinates (finite objects only)."""
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return itertools.product(*(range(d) for d in self.factors))


def make_object(relations, ring: Ring = ZZ, generators: int | None = None) -> FpObject:
    if isinstance(relations, ExactMatrix):
        return FpObject(relations)
    rows = [list(r) for r in relations]
    if generators is not None and not rows:
        rows = [[] for _ in range(generators)]
    ncols = len(rows[0]) if rows else 0
    return FpObject(ExactMatrix(rows, ring, ncols=ncols))


class FpMorphism:
    """A homomorphism given by its action on generators."""

    __slots__ = ("src", "dst", "matrix", "__dict__")

    def __init__(self, src: FpObject, dst: FpObject, matrix: ExactMatrix, check: bool = True):
        if matrix.ring != src.ring or src.ring != dst.ring:
            raise ValueError("ring mismatch")
        if matrix.shape != (dst.ngens, src.ngens):
            raise ValueError(f"matrix shape {matrix.shape} != ({dst.ngens}, {src.ngens})")
        if dst.is_standard and dst.factors:
            matrix = _reduce_rows(matrix, dst.factors)
        self.src = src
        self.dst = dst
        self.matrix = matrix
        if check and solve(dst.relations, matrix @ src.relations) is None:
            raise IllDefined(f"matrix does not respect relations ({src} -> {dst})")

    def __repr__(self):
        return f"FpMorphism({self.src} -> {self.dst}, {self.matrix.tolist()})"

    # composition: g @ f is "g after f"
    def __matmul__(self, other: "FpMorphism") -> "FpMorphism":
        if other.dst != self.src:
            raise ValueError("composition endpoints differ")
        return FpMorphism(other.src, self.dst, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "FpMorphism") -> "FpMorphism":
        _same_ends(self, other)
        return FpMorphism(self.src, self.dst, self.matrix + other.matrix, check=False)

    def __neg__(self):
        return FpMorphism(self.src, self.dst, -self.matrix, check=False)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, FpMorphism):
            return NotImplemented
        return self.src == other.src and self.dst == other.dst and equal_morphisms(self, other)

    __hash__ = None

    def is_zero(self) -> bool:
        return solve(self.dst.relations, self.matrix) is not None

    def is_mono(self) -> bool:
        return kernel(self)[0].is_zero()

    def is_epi(self) -> bool:
        return cokernel(self)[0].is_zero()

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def std_matrix(self) -> ExactMatrix:
        """Matrix between the standard forms of source and target."""
        return self.dst.to_standard().matrix @ self.matrix @ self.src.from_standard().matrix

    def apply(self, element) -> tuple:
        """Image of an element given in standard coordinates (finite targets)."""
        M = self.std_matrix()
        fac = self.dst.standardized().factors
        out = []
        for i, row in enumerate(M.data):
            v = sum(a * b for a, b in zip(row, element))
            out.append(int(v) % fac[i] if i < len(fac) else v)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "morphism": {
                "matrix": [[str(Fraction(x)) for x in row] for row in self.matrix.data],
                "src": self.src.to_json()["object"],
                "dst": self.dst.to_json()["object"],
            }
        }

    @classmethod
    def from_json(cls, d: dict) -> "FpMorphism":
        body = d.get("morphism", d)
        src = FpObject.from_json(body["src"])
        dst = FpObject.from_json(body["dst"])
        rows = body["matrix"]
        M = ExactMatrix([[Fraction(str(x)) for x in r] for r in rows], src.ring, ncols=src.ngens)
        return cls(src, dst, M)


def _reduce_rows(M: ExactMatrix, factors) -> ExactMatrix:
    ring = M.ring
    rows = []
    for i, row in enumerate(M.data):
        if i < len(factors):
            d = factors[i]
            if ring.is_local:
                # denominators are units mod d, so every entry has an integer representative
                row = tuple(ring.coerce(x.numerator * pow(x.denominator, -1, d) % d) for x in row)
            else:
                row = tuple(x % d for x in row)
        rows.append(row)
    return ExactMatrix._raw(tuple(rows), ring, M.ncols)


def _same_ends(f, g):
    if f.src != g.src or f.dst != g.dst:
        raise ValueError("morphisms have different endpoints")


def make_morphism(P, src: FpObject, dst: FpObject) -> FpMorphism:
    if not isinstance(P, ExactMatrix):
        P = ExactMatrix(P, src.ring, ncols=src.ngens)
    return FpMorphism(src, dst, P)


def equal_morphisms(f: FpMorphism, g: FpMorphism) -> bool:
    _same_ends(f, g)
    return solve(f.dst.relations, f.matrix - g.matrix) is not None


def identity(A: FpObject) -> FpMorphism:
    return FpMorphism(A, A, ExactMatrix.identity(A.ngens, A.ring), check=False)


def zero_morphism(A: FpObject, B: FpObject) -> FpMorphism:
    return FpMorphism(A, B, ExactMatrix.zeros(B.ngens, A.ngens, A.ring), check=False)


# -- biproducts -----------------------------------------------------------------


@dataclass(frozen=True)
class Biproduct:
    obj: FpObject
    injections: tuple
    projections: tuple


def direct_sum(*objs: FpObject) -> Biproduct:
    ring = objs[0].ring if objs else ZZ
    R = ExactMatrix.zeros(0, 0, ring)
    for A in objs:
        R = R.block_diag(A.relations)
    S = FpObject(R)
    total = S.ngens
    inj, proj = [], []
    offset = 0
    for A in objs:
        rows = [[1 if i == offset + j else 0 for j in range(A.ngens)] for i in range(total)]
        E = ExactMatrix(rows, ring, ncols=A.ngens)
        inj.append(FpMorphism(A, S, E, check=False))
        proj.append(FpMorphism(S, A, E.T, check=False))
        offset += A.ngens
    return Biproduct(S, tuple(inj), tuple(proj))


# -- kernels and cokernels ----------------------------------------------------------


def kernel(f: FpMorphism) -> tuple[FpObject, FpMorphism]:
    """Kernel object in standard form and its inclusion into ``f.src``."""
    A, B = f.src, f.dst
    big = f.matrix.hstack(B.relations)
    Kb = kernel_basis(big)
    L0 = Kb.rows_at(range(A.ngens))
    Lb = column_lattice_basis(L0)
    Y = solve(Lb, A.relations)
    if Y is None:  # pragma: no cover - relations always lie in the preimage
        raise ArithmeticError("relation lattice not contained in preimage")
    K0 = FpObject(Y)
    k0 = FpMorphism(K0, A, Lb, check=False)
    return K0.standardized(), k0 @ K0.from_standard()


def cokernel(f: FpMorphism) -> tuple[FpObject, FpMorphism]:
    """Cokernel object in standard form and the projection from ``f.dst``."""
    B = f.dst
    C0 = FpObject(B.relations.hstack(f.matrix))
    c0 = FpMorphism(B, C0, ExactMatrix.identity(B.ngens, B.ring), check=False)
    return C0.standardized(), C0.to_standard() @ c0


def image(f: FpMorphism) -> tuple[FpObject, FpMorphism]:
    C, c = cokernel(f)
    return kernel(c)


def factor_through_mono(h: FpMorphism, m: FpMorphism) -> FpMorphism:
    """The t with ``m @ t == h`` (m mono, h landing in the image of m)."""
    if h.dst != m.dst:
        raise ValueError("factor_through_mono: targets differ")
    big = m.matrix.hstack(m.dst.relations)
    X = solve(big, h.matrix)
    if X is None:
        raise FactorizationError("morphism does not factor through the mono")
    T = X.rows_at(range(m.src.ngens))
    try:
        return FpMorphism(h.src, m.src, T)
    except IllDefined as exc:  # m was not mono
        raise FactorizationError(str(exc)) from exc


def factor_through_epi(h: FpMorphism, e: FpMorphism) -> FpMorphism:
    """The t with ``t @ e == h`` (e epi, h vanishing on the kernel of e)."""
    if h.src != e.src:
        raise ValueError("factor_through_epi: sources differ")
    C = e.dst
    big = e.matrix.hstack(C.relations)
    X = solve(big, ExactMatrix.identity(C.ngens, C.ring))
    if X is None:
        raise FactorizationError("not an epimorphism")
    section = X.rows_at(range(e.src.ngens))
    try:
        t = FpMorphism(C, h.dst, h.matrix @ section)
    except IllDefined as exc:
        raise FactorizationError(str(exc)) from exc
    if not equal_morphisms(t @ e, h):
        raise FactorizationError("morphism does not vanish on the kernel")
    return t


def is_iso_objects(A: FpObject, B: FpObject) -> bool:
    return A.isomorphic(B)


# -- canonical decomposition ------------------------------------------------------


@dataclass(frozen=True)
class CanonicalDecomposition:
    morphism: FpMorphism
    kernel_obj: FpObject
    ker: FpMorphism
    cokernel_obj: FpObject
    coker: FpMorphism
    coim_obj: FpObject
    coim: FpMorphism
    im_obj: FpObject
    im: FpMorphism
    fbar: FpMorphism

    @cached_property
    def is_strict(self) -> bool:
        return self.fbar.is_iso()

    def check(self) -> bool:
        f = self.morphism
        return (
            equal_morphisms(self.im @ self.fbar @ self.coim, f)
            and (f @ self.ker).is_zero()
            and (self.coker @ f).is_zero()
        )


def decompose(f: FpMorphism) -> CanonicalDecomposition:
    K, k = kernel(f)
    C, c = cokernel(f)
    Coim, coim = cokernel(k)
    Im, im = kernel(c)
    f1 = factor_through_mono(f, im)
    fbar = factor_through_epi(f1, coim)
    return CanonicalDecomposition(f, K, k, C, c, Coim, coim, Im, im, fbar)


# -- pushouts and pullbacks -------------------------------------------------------------


@dataclass(frozen=True)
class PushoutSquare:
    """Pushout of ``f: A -> B`` along ``g: A -> X``.

    ``f_prime: X -> Y`` is the pushed-out copy of f, ``g_prime: B -> Y`` the
    other leg, and ``psi: Ker f -> Ker f'`` the induced map on kernels.
    """

    f: FpMorphism
    g: FpMorphism
    obj: FpObject
    f_prime: FpMorphism
    g_prime: FpMorphism
    ker_f: tuple
    ker_f_prime: tuple
    psi: FpMorphism
    ambient: "PushoutSquare | None" = None
    projection: FpMorphism | None = None

    def commutes(self) -> bool:
        return equal_morphisms(self.g_prime @ self.f, self.f_prime @ self.g)

    def psi_is_epi(self) -> bool:
        return self.psi.is_epi()


@dataclass(frozen=True)
class PullbackSquare:
    """Pullback of ``f: A -> B`` along ``g: X -> B``.

    ``f_prime: D -> X`` is the pulled-back copy of f, ``g_prime: D -> A`` the
    other leg; ``kernel_map: Ker f' -> Ker f`` is induced by ``g_prime``.
    """

    f: FpMorphism
    g: FpMorphism
    obj: FpObject
    f_prime: FpMorphism
    g_prime: FpMorphism
    kernel_map: FpMorphism | None = None
    ambient: "PullbackSquare | None" = None
    inclusion: FpMorphism | None = None

    def commutes(self) -> bool:
        return equal_morphisms(self.f @ self.g_prime, self.g @ self.f_prime)


def pushout(f: FpMorphism, g: FpMorphism) -> PushoutSquare:
    if f.src != g.src:
        raise ValueError("pushout: morphisms must share a source")
    bp = direct_sum(f.dst, g.dst)
    iB, iX = bp.injections
    h = iB @ f - iX @ g
    Y, c = cokernel(h)
    g_prime = c @ iB
    f_prime = c @ iX
    kf = kernel(f)
    kfp = kernel(f_prime)
    psi = factor_through_mono(g @ kf[1], kfp[1])
    return PushoutSquare(f, g, Y, f_prime, g_prime, kf, kfp, psi)


def pullback(f: FpMorphism, g: FpMorphism) -> PullbackSquare:
    if f.dst != g.dst:
        raise ValueError("pullback: morphisms must share a target")
    bp = direct_sum(f.src, g.src)
    pA, pX = bp.projections
    h = f @ pA - g @ pX
    D, k = kernel(h)
    g_prime = pA @ k
    f_prime = pX @ k
    _, kfp = kernel(f_prime)
    _, kf = kernel(f)
    kernel_map = factor_through_mono(g_prime @ kfp, kf)
    return PullbackSquare(f, g, D, f_prime, g_prime, kernel_map)


# -- subobjects of finite objects -------------------------------------------------------


def morphism_from_elements(elements, A: FpObject) -> FpMorphism:
    """The map R^k -> A sending basis vectors to the given standard-coordinate elements."""
    S = A.standardized()
    k = len(elements)
    cols = [[e[i] for e in elements] for i in range(S.ngens)]
    M = ExactMatrix(cols, A.ring, ncols=k)
    free = FpObject.standard(k, (), A.ring)
    return A.from_standard() @ FpMorphism(free, S, M, check=False)


def subgroup_elements(A: FpObject, gens) -> frozenset:
    fac = A.standardized().factors
    zero = tuple(0 for _ in fac)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % d for a, b, d in zip(x, g, fac))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def enumerate_subgroups(A: FpObject, max_order: int = 2 ** 12) -> list[tuple[frozenset, tuple]]:
    """All subgroups of a finite object as ``(element set, generators)`` pairs.

    Breadth-first closure from the trivial subgroup, deduplicated by element set.
    """
    n = A.order()
    if n is None:
        raise ValueError("subgroup enumeration needs a finite object")
    if n > max_order:
        raise ValueError(f"order {n} exceeds budget {max_order}")
    elems = list(A.elements())
    trivial = subgroup_elements(A, ())
    found = {trivial: ()}
    queue = [trivial]
    while queue:
        H = queue.pop()
        gens = found[H]
        for x in elems:
            if x in H:
                continue
            H2 = subgroup_elements(A, gens + (x,))
            if H2 not in found:
                found[H2] = gens + (x,)
                queue.append(H2)
    return sorted(found.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


def subobject(A: FpObject, gens) -> tuple[FpObject, FpMorphism]:
    """The subobject generated by standard-coordinate elements, with its inclusion."""
    if not gens:
        Z = FpObject.zero(A.ring)
        return Z, zero_morphism(Z, A)
    return image(morphism_from_elements(list(gens), A))


def pullback_cone_factor(square: PullbackSquare, a: FpMorphism, x: FpMorphism) -> FpMorphism:
    """The unique u with ``g_prime @ u == a`` and ``f_prime @ u == x``."""
    bp = direct_sum(square.f.src, square.g.src)
    iA, iX = bp.injections
    legs = iA @ square.g_prime + iX @ square.f_prime
    return factor_through_mono(iA @ a + iX @ x, legs)


def pushout_cocone_factor(square: PushoutSquare, b: FpMorphism, y: FpMorphism) -> FpMorphism:
    """The unique u with ``u @ g_prime == b`` and ``u @ f_prime == y``."""
    bp = direct_sum(square.f.dst, square.g.dst)
    pB, pX = bp.projections
    legs = square.g_prime @ pB + square.f_prime @ pX
    return factor_through_epi(b @ pB + y @ pX, legs)
