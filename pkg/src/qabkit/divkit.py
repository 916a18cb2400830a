"""Symbolic calculus for finite sums of Z, Z/n, Q, Z[1/p], Prufer(p) and Q/Z.

Every basic summand is modelled as a subquotient L/M of Q, with L and M
subgroups of the form g*Z[1/S]:

    Z = Z/0       Z/n = (1/n)Z / Z     Q = Q/0
    Z[1/p] = Z[1/p]/0     Prufer(p) = Z[1/p] / Z     Q/Z = Q/Z

A morphism block from summand s to summand t is multiplication by a rational
c with c*L_s in L_t and c*M_s in M_t.  The canonical maps (Q -> Q/Z,
Z/n -> Prufer(p), Prufer(p) -> Q/Z, Z[1/p] -> Prufer(p)) are all c = 1.
Composition is matrix multiplication of scalars, so it is closed by
construction.  Kernels and cokernels are computed by a case analysis over the
connected components of the block matrix; anything outside the cases raises
:class:`NotRepresentable`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import sympy

from .linalg import valuation
from .universality import ClassificationReport, NotRepresentable


class IllDefined(ValueError):
    pass


def _primes(x: Fraction) -> set:
    x = Fraction(x)
    return set(sympy.factorint(abs(x.numerator))) | set(sympy.factorint(x.denominator))


def _v(x: Fraction, p: int) -> int:
    return valuation(x, p)


# -- rank-one subgroups of Q --------------------------------------------------------------


@dataclass(frozen=True)
class Rank1:
    """The subgroup gen * Z[1/inv] of Q; ``inv=None`` means every prime (so Q)."""

    gen: Fraction
    inv: frozenset | None

    @staticmethod
    def make(gen, inv=frozenset()) -> "Rank1":
        gen = Fraction(gen)
        if gen == 0:
            return Rank1(Fraction(0), frozenset())
        if inv is None:
            return Rank1(Fraction(1), None)
        inv = frozenset(inv)
        g = abs(gen)
        for p in inv:
            v = _v(g, p)
            g /= Fraction(p) ** v
        return Rank1(g, inv)

    @property
    def is_zero(self) -> bool:
        return self.gen == 0

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        if x == 0:
            return True
        if self.is_zero:
            return False
        if self.inv is None:
            return True
        r = x / self.gen
        return all(q in self.inv for q in sympy.factorint(r.denominator))

    def contains(self, other: "Rank1") -> bool:
        if other.is_zero:
            return True
        if self.is_zero:
            return False
        if self.inv is None:
            return True
        if other.inv is None or not other.inv <= self.inv:
            return False
        return other.gen in self

    def __eq__(self, other):
        return isinstance(other, Rank1) and self.gen == other.gen and self.inv == other.inv

    def __hash__(self):
        return hash((self.gen, self.inv))

    def scale(self, c) -> "Rank1":
        c = Fraction(c)
        if c == 0 or self.is_zero:
            return Rank1.make(0)
        return Rank1.make(c * self.gen, self.inv)

    def __and__(self, other: "Rank1") -> "Rank1":
        if self.is_zero or other.is_zero:
            return Rank1.make(0)
        if self.inv is None:
            return other
        if other.inv is None:
            return self
        keep = self.inv & other.inv
        g = Fraction(1)
        for q in _primes(self.gen) | _primes(other.gen):
            if q in keep:
                continue
            vals = [_v(h.gen, q) for h in (self, other) if q not in h.inv]
            g *= Fraction(q) ** max(vals)
        return Rank1.make(g, keep)

    def __add__(self, other: "Rank1") -> "Rank1":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.inv is None or other.inv is None:
            return Rank1.make(1, None)
        keep = self.inv | other.inv
        g = Fraction(1)
        for q in _primes(self.gen) | _primes(other.gen):
            if q not in keep:
                g *= Fraction(q) ** min(_v(self.gen, q), _v(other.gen, q))
        return Rank1.make(g, keep)

    def __str__(self):
        if self.is_zero:
            return "0"
        if self.inv is None:
            return "Q"
        base = "Z" if not self.inv else f"Z[1/{'*'.join(map(str, sorted(self.inv)))}]"
        return base if self.gen == 1 else f"{self.gen}*{base}"


ZERO = Rank1.make(0)
INTEGERS = Rank1.make(1)
RATIONALS = Rank1.make(1, None)


def localized(p: int) -> Rank1:
    return Rank1.make(1, {p})


# -- basic summands ---------------------------------------------------------------------

KIND_ORDER = {"Z": 0, "Zmod": 1, "ZinvP": 2, "Q": 3, "Prufer": 4, "QmodZ": 5, "Tail": 6}


@dataclass(frozen=True)
class BasicSummand:
    kind: str
    param: int | None = None

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown summand kind {self.kind!r}")
        if self.kind == "Zmod" and (self.param is None or self.param < 2):
            raise ValueError("Z/n needs n >= 2")
        if self.kind in ("ZinvP", "Prufer") and not (self.param and sympy.isprime(self.param)):
            raise ValueError(f"{self.kind} needs a prime parameter")

    @property
    def L(self) -> Rank1:
        k, p = self.kind, self.param
        if k == "Z":
            return INTEGERS
        if k == "Zmod":
            return Rank1.make(Fraction(1, p))
        if k in ("ZinvP", "Prufer"):
            return localized(p)
        if k in ("Q", "QmodZ"):
            return RATIONALS
        raise NotRepresentable(f"{self} has no rank-one model")

    @property
    def M(self) -> Rank1:
        if self.kind in ("Z", "Q", "ZinvP"):
            return ZERO
        if self.kind == "Tail":
            raise NotRepresentable(f"{self} has no rank-one model")
        return INTEGERS

    @property
    def is_divisible(self) -> bool:
        return self.kind in ("Q", "Prufer", "QmodZ", "Tail")

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.param or 0)

    def __str__(self):
        k, p = self.kind, self.param
        return {
            "Z": "Z",
            "Zmod": f"Z/{p}",
            "ZinvP": f"Z[1/{p}]",
            "Q": "Q",
            "Prufer": f"Prufer({p})",
            "QmodZ": "Q/Z",
            "Tail": f"Tail(>{p})",
        }[k]


def identify(L: Rank1, M: Rank1):
    """Name the subquotient L/M.

    Returns ``(summand, to_model, from_model)`` where the two scalars are
    mutually inverse isomorphisms between L/M and the summand's model, or None
    when that direction is not a scalar.  ``summand`` is None for L = M.
    """
    if not L.contains(M):
        raise ValueError("identify needs M inside L")
    if M.contains(L):
        return None, Fraction(0), Fraction(0)
    if M.is_zero:
        if L.inv is None:
            return BasicSummand("Q"), Fraction(1), Fraction(1)
        if not L.inv:
            return BasicSummand("Z"), 1 / L.gen, L.gen
        if len(L.inv) == 1:
            (p,) = L.inv
            return BasicSummand("ZinvP", p), 1 / L.gen, L.gen
        raise NotRepresentable(f"{L} is not a basic summand")
    if M.inv is not None and not M.inv:
        h = M.gen
        if L.inv is None:
            return BasicSummand("QmodZ"), 1 / h, h
        Ls = L.scale(1 / h)
        if not Ls.inv:
            n = 1 / Ls.gen
            assert n.denominator == 1
            return BasicSummand("Zmod", int(n)), 1 / h, h
        if len(Ls.inv) == 1 and Ls.gen == 1:
            (p,) = Ls.inv
            return BasicSummand("Prufer", p), 1 / h, h
        raise NotRepresentable(f"{L}/{M} splits as a finite group plus Prufer groups")
    if M.inv is not None and len(M.inv) == 1 and L.inv == M.inv:
        n = M.gen / L.gen
        assert n.denominator == 1
        return BasicSummand("Zmod", int(n)), None, M.gen
    raise NotRepresentable(f"{L}/{M} is not a basic summand")


# -- objects ----------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<qz>Q/Z)|(?P<zinv>Z\[1/(?P<zp>\d+)\])|(?P<zmod>Z/(?P<n>\d+))"
    r"|(?P<pr>Prufer\((?P<pp>\d+)\))|(?P<q>Q)|(?P<z>Z)|(?P<zero>0))\s*$"
)


@dataclass(frozen=True)
class StdObject:
    summands: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "StdObject":
        """Parse ``"Q + Z/4 + Prufer(3) + Q/Z + Z[1/3]"``."""
        out = []
        for part in text.split("+"):
            m = _TOKEN.match(part)
            if not m:
                raise ValueError(f"cannot parse summand {part.strip()!r}")
            if m["qz"]:
                out.append(BasicSummand("QmodZ"))
            elif m["zinv"]:
                out.append(BasicSummand("ZinvP", int(m["zp"])))
            elif m["zmod"]:
                n = int(m["n"])
                if n == 1:
                    continue
                out.append(BasicSummand("Zmod", n) if n else BasicSummand("Z"))
            elif m["pr"]:
                out.append(BasicSummand("Prufer", int(m["pp"])))
            elif m["q"]:
                out.append(BasicSummand("Q"))
            elif m["z"]:
                out.append(BasicSummand("Z"))
        return cls(tuple(out))

    def __len__(self):
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    def __getitem__(self, i) -> BasicSummand:
        return self.summands[i]

    def __str__(self):
        return " + ".join(map(str, self.summands)) or "0"

    def is_zero(self) -> bool:
        return not self.summands

    def is_divisible(self) -> bool:
        return all(s.is_divisible for s in self.summands)

    def is_reduced(self) -> bool:
        return not any(s.is_divisible for s in self.summands)

    def sorted(self) -> "StdObject":
        return StdObject(tuple(sorted(self.summands, key=lambda s: s.sort_key)))

    def isomorphic(self, other: "StdObject") -> bool:
        """Sorted-summand equality, with the finite cyclic part compared by invariant factors."""
        from .fpmod import FpObject, direct_sum

        def split(obj):
            fin = [s.param for s in obj if s.kind == "Zmod"]
            rest = sorted((s.sort_key for s in obj if s.kind != "Zmod"))
            if fin:
                inv = direct_sum(*(FpObject.standard(0, (n,)) for n in fin)).obj.factors
            else:
                inv = ()
            return rest, inv

        return split(self) == split(other)

    def to_json(self) -> str:
        return str(self)


def direct_sum_std(*objs: StdObject) -> tuple[StdObject, list, list]:
    """Direct sum with injections and projections."""
    S = StdObject(tuple(s for o in objs for s in o))
    inj, proj, off = [], [], 0
    n = len(S)
    for o in objs:
        blocks = [[Fraction(int(i == off + j)) for j in range(len(o))] for i in range(n)]
        inj.append(StdMorphism(o, S, blocks))
        proj.append(StdMorphism(S, o, [list(r) for r in zip(*blocks)] if n else [[] for _ in o]))
        off += len(o)
    return S, inj, proj


# -- morphisms ---------------------------------------------------------------------------


def block_is_valid(c, s: BasicSummand, t: BasicSummand) -> bool:
    c = Fraction(c)
    if c == 0:
        return True
    return t.L.contains(s.L.scale(c)) and t.M.contains(s.M.scale(c))


def block_is_zero(c, s: BasicSummand, t: BasicSummand) -> bool:
    c = Fraction(c)
    return c == 0 or t.M.contains(s.L.scale(c))


def _reduce_scalar(c: Fraction, s: BasicSummand, t: BasicSummand) -> Fraction:
    """Canonical representative of c modulo the maps that vanish."""
    if block_is_zero(c, s, t):
        return Fraction(0)
    Ls, Mt = s.L, t.M
    if Ls.inv is not None and not Ls.inv and Mt.inv is not None and not Mt.inv and not Mt.is_zero:
        period = Mt.gen / Ls.gen
        c = c - period * (c // period)
    return c


GEN_NAMES = {
    ("Q", "QmodZ"): "proj",
    ("ZinvP", "Prufer"): "proj",
    ("ZinvP", "QmodZ"): "proj",
    ("Prufer", "QmodZ"): "incl",
    ("Zmod", "Prufer"): "embed",
    ("Zmod", "QmodZ"): "embed",
    ("Zmod", "Zmod"): "mult",
    ("ZinvP", "Q"): "incl",
    ("Z", "Q"): "incl",
    ("Z", "ZinvP"): "incl",
}


def gen_name(s: BasicSummand, t: BasicSummand) -> str:
    if s.kind == "Z":
        return GEN_NAMES.get((s.kind, t.kind), "point")
    if s.kind == t.kind:
        return "mult"
    return GEN_NAMES.get((s.kind, t.kind), "scale")


class StdMorphism:
    """Block matrix of scalars; ``blocks[i][j]`` acts from src summand j to dst summand i."""

    __slots__ = ("src", "dst", "blocks")

    def __init__(self, src: StdObject, dst: StdObject, blocks, check: bool = True):
        rows = [list(r) for r in blocks] if len(dst) else []
        if len(rows) != len(dst) or any(len(r) != len(src) for r in rows):
            raise ValueError(f"block matrix must be {len(dst)}x{len(src)}")
        out = []
        for i, row in enumerate(rows):
            t = dst[i]
            new = []
            for j, c in enumerate(row):
                s = src[j]
                c = Fraction(c)
                if c != 0 and "Tail" in (s.kind, t.kind):
                    raise NotRepresentable("morphism touches the unexpanded tail of Q/Z")
                if check and not block_is_valid(c, s, t):
                    raise IllDefined(f"scalar {c} is not a homomorphism {s} -> {t}")
                new.append(_reduce_scalar(c, s, t))
            out.append(tuple(new))
        self.src, self.dst, self.blocks = src, dst, tuple(out)

    def __repr__(self):
        return f"StdMorphism({self.src} -> {self.dst}, {[[str(c) for c in r] for r in self.blocks]})"

    __str__ = __repr__

    def entry(self, i, j) -> Fraction:
        return self.blocks[i][j]

    def __matmul__(self, other: "StdMorphism") -> "StdMorphism":
        if other.dst != self.src:
            raise ValueError(f"cannot compose {self} after {other}")
        n = len(self.src)
        blocks = [
            [sum((self.blocks[i][k] * other.blocks[k][j] for k in range(n)), Fraction(0)) for j in range(len(other.src))]
            for i in range(len(self.dst))
        ]
        return StdMorphism(other.src, self.dst, blocks, check=False)

    def _combine(self, other, sign):
        if (self.src, self.dst) != (other.src, other.dst):
            raise ValueError("endpoints differ")
        blocks = [[a + sign * b for a, b in zip(r1, r2)] for r1, r2 in zip(self.blocks, other.blocks)]
        return StdMorphism(self.src, self.dst, blocks, check=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return StdMorphism(self.src, self.dst, [[-c for c in r] for r in self.blocks], check=False)

    def __eq__(self, other):
        if not isinstance(other, StdMorphism) or (self.src, self.dst) != (other.src, other.dst):
            return False
        return all(
            block_is_zero(a - b, self.src[j], self.dst[i])
            for i, (r1, r2) in enumerate(zip(self.blocks, other.blocks))
            for j, (a, b) in enumerate(zip(r1, r2))
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c == 0 for r in self.blocks for c in r)

    def apply(self, x) -> tuple:
        """Image of an element given by one rational representative per summand."""
        x = [Fraction(v) for v in x]
        for v, s in zip(x, self.src):
            if v not in s.L:
                raise ValueError(f"{v} does not represent an element of {s}")
        return tuple(
            _reduce_element(sum((c * v for c, v in zip(row, x)), Fraction(0)), t)
            for row, t in zip(self.blocks, self.dst)
        )

    def to_json(self) -> dict:
        return {
            "src": str(self.src),
            "dst": str(self.dst),
            "blocks": [
                [{"gen": gen_name(self.src[j], self.dst[i]), "scale": str(c)} for j, c in enumerate(r)]
                for i, r in enumerate(self.blocks)
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "StdMorphism":
        body = d.get("morphism", d)
        src, dst = StdObject.parse(body["src"]), StdObject.parse(body["dst"])
        blocks = []
        for row in body["blocks"]:
            new = []
            for b in row:
                if isinstance(b, dict):
                    new.append(Fraction(0) if b.get("gen") == "zero" else Fraction(str(b.get("scale", "1"))))
                else:
                    new.append(Fraction(str(b)))
            blocks.append(new)
        return cls(src, dst, blocks)


def _reduce_element(v: Fraction, s: BasicSummand) -> Fraction:
    M = s.M
    if M.is_zero:
        return v
    if M.inv is not None and not M.inv:
        h = M.gen
        return v - h * (v // h)
    return v


def elements_equal(x, y, obj: StdObject) -> bool:
    return all((Fraction(a) - Fraction(b)) in s.M for a, b, s in zip(x, y, obj))


def std_identity(A: StdObject) -> StdMorphism:
    return StdMorphism(A, A, [[int(i == j) for j in range(len(A))] for i in range(len(A))], check=False)


def std_zero(A: StdObject, B: StdObject) -> StdMorphism:
    return StdMorphism(A, B, [[0] * len(A) for _ in range(len(B))], check=False)


def single(src: str, dst: str, scale=1) -> StdMorphism:
    """A morphism between one-summand objects, e.g. ``single("Q", "Q/Z")``."""
    return StdMorphism(StdObject.parse(src), StdObject.parse(dst), [[scale]])


# -- kernels and cokernels ---------------------------------------------------------------


def _components(f: StdMorphism):
    """Connected components of the bipartite graph of nonzero blocks, as (rows, cols)."""
    nr, nc = len(f.dst), len(f.src)
    parent = list(range(nr + nc))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(nr):
        for j in range(nc):
            if f.blocks[i][j] != 0:
                parent[find(i)] = find(nr + j)
    groups: dict = {}
    for x in range(nr + nc):
        groups.setdefault(find(x), []).append(x)
    out = []
    for members in groups.values():
        rows = sorted(x for x in members if x < nr)
        cols = sorted(x - nr for x in members if x >= nr)
        out.append((rows, cols))
    return sorted(out, key=lambda rc: (min(rc[1]) if rc[1] else len(f.src), rc[0]))


def _preimage(c: Fraction, M: Rank1) -> Rank1:
    return M.scale(1 / c)


def _lifts(c: Fraction, S: BasicSummand, T: BasicSummand):
    """Scalars lam with c*lam acting as the identity on the image of c: S -> T."""
    yield 1 / c
    Ls, Mt = S.L, T.M
    if Ls.inv is None or Ls.inv or Mt.is_zero or Mt.inv is None or Mt.inv:
        return
    s, h = Ls.gen, Mt.gen
    i = (Ls.scale(c) + Mt).gen
    A, B = c * s / i, h / i
    if A.denominator != 1 or B.denominator != 1 or B <= 1:
        return
    try:
        alpha = pow(int(A), -1, int(B))
    except ValueError:
        return
    yield alpha * s / i


def std_kernel(f: StdMorphism) -> tuple[StdObject, StdMorphism]:
    """Kernel in abelian groups, as a standard object with its inclusion."""
    A = f.src
    pieces = []  # (summand, {src index: scalar})
    for rows, cols in _components(f):
        if not cols:
            continue
        if not rows:
            for s in cols:
                pieces.append((A[s], {s: Fraction(1)}))
            continue
        if len(cols) == 1:
            (s,) = cols
            L = A[s].L
            for t in rows:
                L = L & _preimage(f.blocks[t][s], f.dst[t].M)
            summand, _, frm = identify(L, A[s].M)
            if summand is not None:
                pieces.append((summand, {s: frm}))
            continue
        if len(rows) == 1 and len(cols) == 2:
            pieces.extend(_kernel_of_row(f, rows[0], cols))
            continue
        raise NotRepresentable(f"kernel of a {len(rows)}x{len(cols)} block component")
    return _assemble_sub(pieces, A)


def _kernel_of_row(f, t, cols):
    A, T = f.src, f.dst[t]
    c = {s: f.blocks[t][s] for s in cols}
    for a, b in (cols, cols[::-1]):
        # leg b injective: the b-coordinate is determined by the a-coordinate
        if A[b].M.contains(A[b].L & _preimage(c[b], T.M)):
            La = A[a].L & _preimage(c[a], A[b].L.scale(c[b]) + T.M)
            summand, _, frm = identify(La, A[a].M)
            if summand is None:
                return []
            for lam in _lifts(c[b], A[b], T):
                w = -c[a] * lam * frm
                if block_is_valid(w, summand, A[b]):
                    return [(summand, {a: frm, b: w})]
            raise NotRepresentable("kernel coordinate is not a scalar multiple")
    for a, b in (cols, cols[::-1]):
        # c_a = -c_b * u for a valid u: A[a] -> A[b], kernel = graph of u plus Ker c_b
        u = -c[a] / c[b]
        if block_is_valid(u, A[a], A[b]):
            out = [(A[a], {a: Fraction(1), b: u})]
            Lb = A[b].L & _preimage(c[b], T.M)
            summand, _, frm = identify(Lb, A[b].M)
            if summand is not None:
                out.append((summand, {b: frm}))
            return out
    raise NotRepresentable("kernel of a two-term row with no injective or factoring leg")


def _assemble_sub(pieces, A: StdObject):
    K = StdObject(tuple(p[0] for p in pieces))
    blocks = [[piece[1].get(i, Fraction(0)) for piece in pieces] for i in range(len(A))]
    return K, StdMorphism(K, A, blocks)


def std_cokernel(f: StdMorphism) -> tuple[StdObject, StdMorphism]:
    """Cokernel in abelian groups, as a standard object with its projection."""
    B = f.dst
    pieces = []  # (summand, {dst index: scalar})
    for rows, cols in _components(f):
        if not rows:
            continue
        if not cols:
            for t in rows:
                pieces.append((B[t], {t: Fraction(1)}))
            continue
        if len(rows) == 1:
            (t,) = rows
            Lc = B[t].M
            for s in cols:
                Lc = Lc + f.src[s].L.scale(f.blocks[t][s])
            summand, to, _ = identify(B[t].L, Lc)
            if summand is not None:
                if to is None:
                    raise NotRepresentable(f"projection onto {summand} is not a scalar")
                pieces.append((summand, {t: to}))
            continue
        if len(cols) == 1 and len(rows) == 2:
            pieces.extend(_cokernel_of_column(f, rows, cols[0]))
            continue
        raise NotRepresentable(f"cokernel of a {len(rows)}x{len(cols)} block component")
    C = StdObject(tuple(p[0] for p in pieces))
    blocks = [[piece[1].get(j, Fraction(0)) for j in range(len(B))] for piece in pieces]
    return C, StdMorphism(B, C, blocks)


def _cokernel_of_column(f, rows, s):
    B, S = f.dst, f.src[s]
    c = {t: f.blocks[t][s] for t in rows}
    for a, b in (rows, rows[::-1]):
        # leg b surjective: every class has a representative with b-coordinate 0
        if (S.L.scale(c[b]) + B[b].M).contains(B[b].L):
            Lq = (S.L & _preimage(c[b], B[b].M)).scale(c[a]) + B[a].M
            summand, to, _ = identify(B[a].L, Lq)
            if summand is None:
                return []
            if to is None:
                raise NotRepresentable(f"projection onto {summand} is not a scalar")
            for lam in _lifts(c[b], S, B[b]):
                w = -c[a] * lam * to
                if block_is_valid(w, B[b], summand):
                    return [(summand, {a: to, b: w})]
            raise NotRepresentable("cokernel projection is not a scalar multiple")
    for a, b in (rows, rows[::-1]):
        # c_b = u * c_a for a valid u: B[a] -> B[b]; cokernel = B[b] + Coker c_a
        u = c[b] / c[a]
        if block_is_valid(u, B[a], B[b]):
            out = [(B[b], {b: Fraction(1), a: -u})]
            summand, to, _ = identify(B[a].L, S.L.scale(c[a]) + B[a].M)
            if summand is not None:
                if to is None:
                    raise NotRepresentable(f"projection onto {summand} is not a scalar")
                out.append((summand, {a: to}))
            return out
    raise NotRepresentable("cokernel of a two-term column with no surjective or factoring leg")


def factor_through_mono(h: StdMorphism, m: StdMorphism) -> StdMorphism:
    """The t with ``m @ t == h``, found by solving the scalar system over Q."""
    if h.dst != m.dst:
        raise ValueError("targets differ")
    if len(m.src) == 0:
        if not h.is_zero():
            raise NotRepresentable("nonzero map into the zero object")
        return std_zero(h.src, m.src)
    Mm = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in r] for r in m.blocks])
    Hm = sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in r] for r in h.blocks])
    if len(h.src) == 0:
        return std_zero(h.src, m.src)
    try:
        sol, params = Mm.gauss_jordan_solve(Hm)
    except ValueError as exc:
        raise NotRepresentable("no scalar factorization") from exc
    sol = sol.subs({p: 0 for p in params})
    blocks = [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in sol.row(i)] for i in range(sol.rows)]
    try:
        t = StdMorphism(h.src, m.src, blocks)
    except IllDefined as exc:
        raise NotRepresentable(str(exc)) from exc
    if not (m @ t) == h:
        raise NotRepresentable("scalar factorization does not reproduce the map")
    return t


# -- divisible part and squares ---------------------------------------------------------


def divisible_part(M: StdObject) -> tuple[StdObject, StdMorphism]:
    idx = [i for i, s in enumerate(M) if s.is_divisible]
    D = StdObject(tuple(M[i] for i in idx))
    blocks = [[int(i == j) for j in idx] for i in range(len(M))]
    return D, StdMorphism(D, M, blocks, check=False)


def reduced_part(M: StdObject) -> StdObject:
    return StdObject(tuple(s for s in M if not s.is_divisible))


def expand_qmodz(bound: int) -> tuple[StdObject, StdMorphism]:
    """Q/Z as Prufer(p) for p <= bound plus an explicit tail summand.

    The returned map sends each Prufer summand into Q/Z by inclusion; the tail
    has no scalar model, so any construction that touches it is NotRepresentable.
    """
    primes = list(sympy.primerange(2, bound + 1))
    parts = tuple(BasicSummand("Prufer", p) for p in primes) + (BasicSummand("Tail", bound),)
    E = StdObject(parts)
    QZ = StdObject((BasicSummand("QmodZ"),))
    return E, StdMorphism(E, QZ, [[1] * len(primes) + [0]])


@dataclass
class DivPushoutSquare:
    f: StdMorphism
    g: StdMorphism
    obj: StdObject
    f_prime: StdMorphism  # X -> Y
    g_prime: StdMorphism  # B -> Y
    ker_f: tuple | None = None
    ker_f_prime: tuple | None = None
    psi: StdMorphism | None = None

    def commutes(self) -> bool:
        return (self.g_prime @ self.f) == (self.f_prime @ self.g)


@dataclass
class DivPullbackSquare:
    f: StdMorphism
    g: StdMorphism
    obj: StdObject
    f_prime: StdMorphism  # D -> X
    g_prime: StdMorphism  # D -> A
    ambient_obj: StdObject | None = None
    ambient_f_prime: StdMorphism | None = None
    ambient_g_prime: StdMorphism | None = None
    inclusion: StdMorphism | None = None

    def commutes(self) -> bool:
        return (self.f @ self.g_prime) == (self.g @ self.f_prime)


def _stack(f: StdMorphism, g: StdMorphism):
    """[f; -g]: A -> B + X."""
    S, (iB, iX), _ = direct_sum_std(f.dst, g.dst)
    return iB @ f - iX @ g, iB, iX


def std_pushout(f: StdMorphism, g: StdMorphism) -> DivPushoutSquare:
    if f.src != g.src:
        raise ValueError("pushout needs a shared source")
    h, iB, iX = _stack(f, g)
    Y, c = std_cokernel(h)
    sq = DivPushoutSquare(f, g, Y, c @ iX, c @ iB)
    try:
        sq.ker_f = std_kernel(f)
        sq.ker_f_prime = std_kernel(sq.f_prime)
        sq.psi = factor_through_mono(g @ sq.ker_f[1], sq.ker_f_prime[1])
    except NotRepresentable:
        pass
    return sq


def std_pullback(f: StdMorphism, g: StdMorphism) -> DivPullbackSquare:
    """Pullback in abelian groups."""
    if f.dst != g.dst:
        raise ValueError("pullback needs a shared target")
    _, _, (pA, pX) = direct_sum_std(f.src, g.src)
    D, k = std_kernel(f @ pA - g @ pX)
    return DivPullbackSquare(f, g, D, pX @ k, pA @ k, D, pX @ k, pA @ k, std_identity(D))


def div_pullback(f: StdMorphism, g: StdMorphism) -> DivPullbackSquare:
    """Pullback in divisible groups: the divisible part of the ambient pullback."""
    for M in (f.src, f.dst, g.src):
        if not M.is_divisible():
            raise ValueError(f"{M} is not divisible")
    amb = std_pullback(f, g)
    Dd, inc = divisible_part(amb.obj)
    return DivPullbackSquare(
        f, g, Dd, amb.f_prime @ inc, amb.g_prime @ inc, amb.obj, amb.f_prime, amb.g_prime, inc
    )


# -- classification in Div ------------------------------------------------------------------


def _kernel_rule(K: StdObject) -> tuple[bool, dict]:
    """Quotients of a finite sum of Z and Z/n are reduced; other summands have divisible quotients."""
    for s in K:
        if s.kind in ("Z", "Zmod"):
            continue
        quotient = BasicSummand("Prufer", s.param) if s.kind == "ZinvP" else s
        return False, {"rule": "kernel-summands", "kernel": str(K), "summand": str(s), "divisible_quotient": str(quotient)}
    return True, {"rule": "kernel-summands", "kernel": str(K)}


def _unbounded(R: StdObject) -> bool:
    return any(s.kind in ("Z", "ZinvP") for s in R)


PROBE_PRIMES = (2, 3, 5)


def _prufer_probes(B: StdObject):
    for t, s in enumerate(B):
        primes = (s.param,) if s.kind == "Prufer" else PROBE_PRIMES if s.kind == "QmodZ" else ()
        for p in primes:
            P = StdObject((BasicSummand("Prufer", p),))
            yield StdMorphism(P, B, [[int(i == t)] for i in range(len(B))])


@dataclass
class DivContext:
    token: str = "div"
    scalars_rational: tuple = (0, 1, -1, 2, Fraction(1, 2), 3, Fraction(-1, 3))
    scalars_integer: tuple = (0, 1, -1, 2, -2, 3)
    pool: tuple = field(default_factory=lambda: tuple(
        BasicSummand(*k) for k in (("Q",), ("Prufer", 2), ("Prufer", 3), ("QmodZ",))
    ))

    def check(self, f: StdMorphism) -> None:
        for M in (f.src, f.dst):
            if not M.is_divisible():
                raise ValueError(f"{M} is not divisible")

    def kernel(self, f):
        K, k = std_kernel(f)
        Dk, inc = divisible_part(K)
        return Dk, k @ inc

    def cokernel(self, f):
        return std_cokernel(f)

    def is_mono(self, f) -> bool:
        return divisible_part(std_kernel(f)[0])[0].is_zero()

    def is_epi(self, f) -> bool:
        return std_cokernel(f)[0].is_zero()

    def pullback(self, f, g):
        return div_pullback(f, g)

    def pushout(self, f, g):
        return std_pushout(f, g)

    def universal_mono(self, f) -> tuple[bool, dict]:
        return _kernel_rule(std_kernel(f)[0])

    def universal_epi(self, f) -> tuple[bool, dict]:
        if not self.is_epi(f):
            return False, {"rule": "not-epi", "cokernel": str(std_cokernel(f)[0])}
        K = std_kernel(f)[0]
        R = reduced_part(K)
        if not _unbounded(R):
            return True, {"rule": "bounded-reduced-kernel", "kernel": str(K)}
        for probe in _prufer_probes(f.dst):
            try:
                sq = div_pullback(f, probe)
                epi = self.is_epi(sq.f_prime)
            except NotRepresentable:
                continue
            if not epi:
                return False, {
                    "rule": "prufer-probe",
                    "probe": str(probe.src),
                    "ambient_pullback": str(sq.ambient_obj),
                    "div_pullback": str(sq.obj),
                    "pulled_back_cokernel": str(std_cokernel(sq.f_prime)[0]),
                }
        raise NotRepresentable(f"universal epi undecided: kernel {K} is unbounded and no probe refutes")

    def classify(self, f: StdMorphism) -> ClassificationReport:
        self.check(f)
        K, _ = std_kernel(f)
        Dk, _ = divisible_part(K)
        R = reduced_part(K)
        mono, epi = Dk.is_zero(), self.is_epi(f)
        strict = R.is_zero()  # Coim = A/D(K) -> Im = f(A) has Ab-kernel R
        um, cm = self.universal_mono(f)
        ue, ce = self.universal_epi(f)
        mo_u, _ = _kernel_rule(R)
        if not _unbounded(R):
            po_u = True
        elif Dk.is_zero() and epi:
            po_u = ue  # fbar is f itself
        else:
            raise NotRepresentable("induced map Coim f -> Im f is outside the scalar calculus")
        certs = [
            {"flag": "kernel", "ab_kernel": str(K), "divisible_part": str(Dk), "reduced_part": str(R)},
            {"flag": "is_universal_mono", **cm},
            {"flag": "is_universal_epi", **ce},
        ]
        return ClassificationReport("div", mono, epi, mono and strict, epi and strict, um, ue, mo_u, po_u, certs)

    # random generators ------------------------------------------------------
    def random_object(self, rng) -> StdObject:
        k = 1 if rng.random() < 0.8 else 2
        return StdObject(tuple(self.pool[int(rng.integers(len(self.pool)))] for _ in range(k)))

    def _scalar(self, s, t, rng) -> Fraction:
        if s.kind == "Q" and t.kind in ("Q", "QmodZ"):
            choices = self.scalars_rational
        elif s.kind in ("Prufer", "QmodZ") and t.kind in ("Prufer", "QmodZ"):
            choices = self.scalars_integer
        else:
            return Fraction(0)
        c = Fraction(choices[int(rng.integers(len(choices)))])
        return c if block_is_valid(c, s, t) else Fraction(0)

    def random_morphism(self, A, B, rng) -> StdMorphism:
        return StdMorphism(A, B, [[self._scalar(s, t, rng) for s in A] for t in B])

    def _draw(self, rng, test, tries=50):
        for _ in range(tries):
            f = self.random_morphism(self.random_object(rng), self.random_object(rng), rng)
            try:
                if test(f)[0]:
                    return f
            except NotRepresentable:
                continue
        raise NotRepresentable("generator exhausted")

    def random_universal_mono(self, rng):
        return self._draw(rng, self.universal_mono)

    def random_universal_epi(self, rng):
        return self._draw(rng, self.universal_epi)


def classify_div(f: StdMorphism) -> ClassificationReport:
    return DivContext().classify(f)


def quotient_map_report(p: int = 3) -> dict:
    """The projection Q -> Q/Z: classification and its pullback along Prufer(p) -> Q/Z."""
    f = single("Q", "Q/Z")
    i = single(f"Prufer({p})", "Q/Z")
    rep = classify_div(f)
    sq = div_pullback(f, i)
    amb_epi = std_cokernel(sq.ambient_f_prime)[0].is_zero()
    return {
        "morphism": f.to_json(),
        "ab_kernel": str(std_kernel(f)[0]),
        "classification": rep.to_json(),
        "pullback_along": i.to_json(),
        "ambient_pullback": str(sq.ambient_obj),
        "ambient_leg_is_epi": amb_epi,
        "div_pullback": str(sq.obj),
        "div_leg": f"{sq.f_prime.src} -> {sq.f_prime.dst}",
        "div_leg_is_epi": DivContext().is_epi(sq.f_prime),
        "squares_commute": sq.commutes(),
    }
