"""Exact matrices over the integers and over the localization Z_(p).

Everything downstream (presentations, kernels, cokernels, pushouts) is
expressed through :func:`snf`, :func:`solve` and :func:`kernel_basis`.
Entries are Python ints for the ring ``Z`` and ``Fraction`` for ``Z_(p)``;
no floating point anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from sympy import isprime


class RingError(ValueError):
    """An entry or parameter is not valid for the ring."""


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class Ring:
    """``Ring()`` is Z; ``Ring(p)`` is Z localized at the prime p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not isprime(self.p):
            raise RingError(f"{self.p} is not prime")

    @property
    def is_local(self) -> bool:
        return self.p is not None

    @property
    def name(self) -> str:
        return "Z" if self.p is None else f"Z_({self.p})"

    def to_json(self) -> dict:
        if self.p is None:
            return {"ring": "Z"}
        return {"ring": "Z_(p)", "p": self.p}

    @classmethod
    def from_json(cls, d: dict) -> "Ring":
        tag = d.get("ring", "Z")
        if tag == "Z":
            return cls()
        if tag in ("Z_(p)", "Zp", "p-local"):
            return cls(int(d["p"]))
        raise RingError(f"unknown ring tag {tag!r}")

    def coerce(self, x):
        x = Fraction(x)
        if self.p is None:
            if x.denominator != 1:
                raise RingError(f"{x} is not an integer")
            return x.numerator
        if x.denominator % self.p == 0:
            raise RingError(f"{x} has {self.p} in its denominator")
        return x

    def norm(self, x) -> int:
        if self.p is None:
            return abs(x)
        return valuation(x, self.p)

    def is_unit(self, x) -> bool:
        if x == 0:
            return False
        if self.p is None:
            return abs(x) == 1
        return valuation(x, self.p) == 0

    def quo_rem(self, a, b):
        """Division with remainder; the remainder has smaller norm than b."""
        if self.p is None:
            q = a // b
            r = a - q * b
            # symmetric remainder keeps entries small
            if 2 * abs(r) > abs(b):
                q += 1 if (b > 0) == (r > 0) else -1
                r = a - q * b
            return q, r
        if a == 0 or valuation(a, self.p) >= valuation(b, self.p):
            return Fraction(a) / b, Fraction(0)
        return Fraction(0), Fraction(a)

    def divides(self, a, b) -> bool:
        """Does a divide b in the ring?"""
        if a == 0:
            return b == 0
        if self.p is None:
            return b % a == 0
        return b == 0 or valuation(b, self.p) >= valuation(a, self.p)

    def canonical(self, x):
        """Split x = u * c with u a unit and c the canonical associate."""
        if x == 0:
            return (1 if self.p is None else Fraction(1)), x
        if self.p is None:
            return (1, x) if x > 0 else (-1, -x)
        k = valuation(x, self.p)
        c = Fraction(self.p) ** k
        return Fraction(x) / c, c


ZZ = Ring()


def _fmt(x) -> str:
    return str(Fraction(x))


class ExactMatrix:
    """Immutable matrix with entries in a :class:`Ring`."""

    __slots__ = ("data", "nrows", "ncols", "ring", "__dict__")

    def __init__(self, rows: Iterable[Sequence], ring: Ring = ZZ, ncols: int | None = None):
        data = tuple(tuple(ring.coerce(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
        self.data = data
        self.nrows = len(data)
        self.ncols = ncols
        self.ring = ring

    @classmethod
    def _raw(cls, data, ring, ncols):
        m = cls.__new__(cls)
        m.data = data
        m.nrows = len(data)
        m.ncols = ncols
        m.ring = ring
        return m

    # -- constructors ----------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int, ring: Ring = ZZ) -> "ExactMatrix":
        z = ring.coerce(0)
        return cls._raw(tuple((z,) * n for _ in range(m)), ring, n)

    @classmethod
    def identity(cls, n: int, ring: Ring = ZZ) -> "ExactMatrix":
        z, o = ring.coerce(0), ring.coerce(1)
        return cls._raw(tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), ring, n)

    @classmethod
    def diag(cls, entries: Sequence, m: int | None = None, n: int | None = None, ring: Ring = ZZ):
        k = len(entries)
        m = k if m is None else m
        n = k if n is None else n
        rows = [[entries[i] if (i == j and i < k) else 0 for j in range(n)] for i in range(m)]
        return cls(rows, ring, ncols=n)

    # -- basic protocol ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.ring == other.ring and self.data == other.data

    def __hash__(self):
        return hash((self.data, self.ncols, self.ring))

    def __repr__(self):
        body = "; ".join(" ".join(_fmt(x) for x in row) for row in self.data)
        return f"ExactMatrix<{self.ring.name} {self.nrows}x{self.ncols}>[{body}]"

    def tolist(self) -> list[list]:
        return [list(row) for row in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    # -- arithmetic ----------------------------------------------------------
    def _check_ring(self, other):
        if self.ring != other.ring:
            raise RingError(f"ring mismatch {self.ring.name} vs {other.ring.name}")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.data)) if other.nrows else [()] * other.ncols
        z = self.ring.coerce(0)
        data = tuple(
            tuple(sum((a * b for a, b in zip(row, col) if a and b), z) for col in cols)
            for row in self.data
        )
        return ExactMatrix._raw(data, self.ring, other.ncols)

    def __add__(self, other):
        self._check_ring(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        data = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data))
        return ExactMatrix._raw(data, self.ring, self.ncols)

    def __neg__(self):
        return ExactMatrix._raw(tuple(tuple(-a for a in r) for r in self.data), self.ring, self.ncols)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        c = self.ring.coerce(c)
        return ExactMatrix._raw(tuple(tuple(c * a for a in r) for r in self.data), self.ring, self.ncols)

    @property
    def T(self) -> "ExactMatrix":
        if not self.nrows:
            return ExactMatrix.zeros(self.ncols, 0, self.ring)
        return ExactMatrix._raw(tuple(zip(*self.data)), self.ring, self.nrows)

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        mats = (self,) + others
        for m in others:
            self._check_ring(m)
            if m.nrows != self.nrows:
                raise ValueError("hstack row mismatch")
        data = tuple(sum((m.data[i] for m in mats), ()) for i in range(self.nrows))
        return ExactMatrix._raw(data, self.ring, sum(m.ncols for m in mats))

    def vstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        for m in others:
            self._check_ring(m)
            if m.ncols != self.ncols:
                raise ValueError("vstack column mismatch")
        data = self.data + sum((m.data for m in others), ())
        return ExactMatrix._raw(data, self.ring, self.ncols)

    def rows_at(self, idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix._raw(tuple(self.data[i] for i in idx), self.ring, self.ncols)

    def cols_at(self, idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix._raw(tuple(tuple(r[j] for j in idx) for r in self.data), self.ring, len(idx))

    def block_diag(self, other: "ExactMatrix") -> "ExactMatrix":
        top = self.hstack(ExactMatrix.zeros(self.nrows, other.ncols, self.ring))
        bottom = ExactMatrix.zeros(other.nrows, self.ncols, self.ring).hstack(other)
        return top.vstack(bottom)

    def det(self):
        """Determinant by fraction-valued Gaussian elimination."""
        if self.nrows != self.ncols:
            raise ValueError("det of non-square matrix")
        n = self.nrows
        a = [[Fraction(x) for x in row] for row in self.data]
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                return self.ring.coerce(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det *= a[c][c]
            for r in range(c + 1, n):
                if a[r][c]:
                    k = a[r][c] / a[c][c]
                    a[r] = [x - k * y for x, y in zip(a[r], a[c])]
        return self.ring.coerce(det)

    @cached_property
    def smith(self) -> "SmithDecomposition":
        return snf(self)

    def rank(self) -> int:
        return sum(1 for d in self.smith.d if d != 0)

    # -- serialization -------------------------------------------------------
    def to_json(self) -> dict:
        out = self.ring.to_json()
        out["rows"] = self.nrows
        out["cols"] = self.ncols
        out["entries"] = [[_fmt(x) for x in row] for row in self.data]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "ExactMatrix":
        ring = Ring.from_json(d)
        entries = [[Fraction(str(x).replace("−", "-")) for x in row] for row in d["entries"]]
        return cls(entries, ring, ncols=d.get("cols"))


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == S`` with ``S`` diagonal; ``d`` lists the diagonal."""

    U: ExactMatrix
    S: ExactMatrix
    V: ExactMatrix
    d: tuple
    U_inv: ExactMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)


def _smith_lists(a: list[list], n: int, ring: Ring):
    m = len(a)
    zero, one = ring.coerce(0), ring.coerce(1)
    U = [[one if i == j else zero for j in range(m)] for i in range(m)]
    Ui = [[one if i == j else zero for j in range(m)] for i in range(m)]
    V = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            U[i], U[j] = U[j], U[i]
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
        for row in Ui:
            row[src] -= q * row[dst]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    nv = ring.norm(a[i][j])
                    if best is None or nv < best[0]:
                        best = (nv, i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            clean = True
            for i in range(t + 1, m):
                if a[i][t] != 0:
                    q, r = ring.quo_rem(a[i][t], a[t][t])
                    if q:
                        add_row(i, t, -q)
                    if r != 0:
                        clean = False
            for j in range(t + 1, n):
                if a[t][j] != 0:
                    q, r = ring.quo_rem(a[t][j], a[t][t])
                    if q:
                        add_col(j, t, -q)
                    if r != 0:
                        clean = False
            if not clean:
                cand = [(ring.norm(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t] != 0]
                cand += [(ring.norm(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j] != 0]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = None
            if not ring.is_local:
                piv = a[t][t]
                for i in range(t + 1, m):
                    if any(a[i][j] % piv for j in range(t + 1, n)):
                        bad = i
                        break
            if bad is not None:
                add_row(t, bad, one)
                continue
            break
        u, _ = ring.canonical(a[t][t])
        if u != one:
            inv = one / u if ring.is_local else u
            a[t] = [x * inv for x in a[t]]
            U[t] = [x * inv for x in U[t]]
            for row in Ui:
                row[t] = row[t] * u
        t += 1
    return U, V, Ui


def snf(M: ExactMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms: ``U @ M @ V == S``.

    Over Z the invariant factors are nonnegative and each divides the next;
    over Z_(p) each nonzero one is a power of p.
    """
    ring = M.ring
    m, n = M.shape
    a = [list(row) for row in M.data]
    U, V, Ui = _smith_lists(a, n, ring)
    S = ExactMatrix._raw(tuple(tuple(r) for r in a), ring, n)
    d = tuple(a[i][i] for i in range(min(m, n)))
    return SmithDecomposition(
        U=ExactMatrix._raw(tuple(tuple(r) for r in U), ring, m),
        S=S,
        V=ExactMatrix._raw(tuple(tuple(r) for r in V), ring, n),
        d=d,
        U_inv=ExactMatrix._raw(tuple(tuple(r) for r in Ui), ring, m),
    )


def snf_local(M: ExactMatrix, p: int) -> SmithDecomposition:
    """Smith normal form over Z_(p); integer input is coerced to the local ring."""
    ring = Ring(p)
    if M.ring != ring:
        if M.ring.is_local:
            raise RingError(f"matrix is over {M.ring.name}, not Z_({p})")
        M = ExactMatrix(M.data, ring, ncols=M.ncols)
    return snf(M)


def invariant_factors(M: ExactMatrix) -> tuple:
    return M.smith.d


def kernel_basis(M: ExactMatrix) -> ExactMatrix:
    """Columns form a basis of ``{x : M x = 0}`` over the ring."""
    dec = M.smith
    K = dec.V.cols_at(range(dec.rank, M.ncols))
    cols = []
    for col in zip(*K.data) if K.nrows else ():
        lead = next(x for x in col if x != 0)
        u, _ = M.ring.canonical(lead)
        cols.append([x / u if M.ring.is_local else x * u for x in col])
    if not cols:
        return K
    return ExactMatrix(list(zip(*cols)), M.ring, ncols=len(cols))


def column_lattice_basis(M: ExactMatrix) -> ExactMatrix:
    """A basis (full column rank) of the column span of M over the ring."""
    dec = M.smith
    r = dec.rank
    cols = [[dec.U_inv[i, j] * dec.d[j] for j in range(r)] for i in range(M.nrows)]
    return ExactMatrix(cols, M.ring, ncols=r)


def solve(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix | None:
    """Some X over the ring with ``A @ X == B``, or None if there is none."""
    if A.nrows != B.nrows:
        raise ValueError("solve: row mismatch")
    ring = A.ring
    dec = A.smith
    C = dec.U @ B
    r = dec.rank
    for i in range(r, A.nrows):
        if any(x != 0 for x in C.data[i]):
            return None
    rows = []
    for i in range(A.ncols):
        if i < r:
            di = dec.d[i]
            row = []
            for x in C.data[i]:
                if not ring.divides(di, x):
                    return None
                row.append(x // di if not ring.is_local else Fraction(x) / di)
            rows.append(row)
        else:
            rows.append([0] * B.ncols)
    Y = ExactMatrix(rows, ring, ncols=B.ncols)
    return dec.V @ Y


def in_column_span(A: ExactMatrix, B: ExactMatrix) -> bool:
    return solve(A, B) is not None
