"""Classification of morphisms into mono/epi, strict, universal, MO_u/PO_u.

Universality is decided by the kernel-quotient criterion: in a torsion class
with radical ``t``, a morphism ``f`` is a universal mono iff every quotient of
its ambient kernel has zero radical.  Quotients of a finite kernel are
enumerated exhaustively, and a failing quotient is turned into an explicit
collapsing pushout via :func:`realize_kernel_epi`.

Contexts are named by token:

* ``ab``        the ambient abelian category of finitely presented groups
* ``fin-tors``  the torsion class (finite groups)
* ``p-local``   the torsion class over Z_(p) (finite p-groups)
* ``lat``       the torsion-free class (lattices)
* ``div``       divisible groups, see :mod:`qabkit.divkit`
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import fpmod, sampling
from .fpmod import (
    FpMorphism,
    FpObject,
    PushoutSquare,
    equal_morphisms,
    factor_through_epi,
    factor_through_mono,
)
from .linalg import ZZ, ExactMatrix, Ring
from .torsion import AmbientView, TorsionClassView, TorsionFreeClassView, decompose_in, torsion_pair

CONTEXTS = ("ab", "fin-tors", "lat", "p-local", "div")
DEFAULT_PRIME = 3


class UnsupportedContext(ValueError):
    pass


class NotRepresentable(Exception):
    """A construction leaves the representable fragment (counted, never fatal)."""


@dataclass
class ClassificationReport:
    context: str
    is_mono: bool
    is_epi: bool
    is_strict_mono: bool
    is_strict_epi: bool
    is_universal_mono: bool
    is_universal_epi: bool
    in_MO_u: bool
    in_PO_u: bool
    certificates: list = field(default_factory=list)

    FLAGS = (
        "is_mono", "is_epi", "is_strict_mono", "is_strict_epi",
        "is_universal_mono", "is_universal_epi", "in_MO_u", "in_PO_u",
    )

    def chain_holds(self) -> bool:
        """strict => universal => plain, for monos and for epis."""
        mono = (not self.is_strict_mono or self.is_universal_mono) and (
            not self.is_universal_mono or self.is_mono
        )
        epi = (not self.is_strict_epi or self.is_universal_epi) and (
            not self.is_universal_epi or self.is_epi
        )
        return mono and epi

    def flags(self) -> dict:
        return {k: getattr(self, k) for k in self.FLAGS}

    def to_json(self) -> dict:
        return {"context": self.context, "flags": self.flags(), "certificates": self.certificates}


# -- realizing quotients of the kernel ---------------------------------------------------


@dataclass(frozen=True)
class RealizationResult:
    """An epi ``alpha: Ker f -> G`` realized as the kernel map of a pushout of f."""

    f: FpMorphism
    alpha: FpMorphism
    sub_obj: FpObject  # N = Ker alpha
    sub: FpMorphism  # N -> A
    q: FpMorphism  # A -> A/N
    square: PushoutSquare
    theta: FpMorphism  # G -> Ker f', with theta . alpha = psi

    @property
    def kernel_iso(self) -> bool:
        return self.theta.is_iso()

    def alpha_matches(self) -> bool:
        return equal_morphisms(self.theta @ self.alpha, self.square.psi)

    def preimage_identity(self) -> bool:
        """q(a) lies in Ker f' exactly when a lies in Ker f."""
        _, k = self.square.ker_f
        _, k2 = fpmod.kernel(self.square.f_prime @ self.q)
        try:
            factor_through_mono(k, k2)
            factor_through_mono(k2, k)
        except fpmod.FactorizationError:
            return False
        return True

    def verified(self) -> bool:
        return (
            self.square.commutes()
            and self.kernel_iso
            and self.alpha_matches()
            and self.preimage_identity()
        )


def realize_kernel_epi(f: FpMorphism, alpha: FpMorphism) -> RealizationResult:
    K, k = fpmod.kernel(f)
    if alpha.src != K:
        raise ValueError(f"alpha must start at Ker f = {K} in its standard presentation")
    if not alpha.is_epi():
        raise ValueError("alpha is not an epimorphism")
    N, n = fpmod.kernel(alpha)
    i = k @ n
    _, q = fpmod.cokernel(i)
    sq = fpmod.pushout(f, q)
    theta = factor_through_epi(sq.psi, alpha)
    return RealizationResult(f, alpha, N, i, q, sq, theta)


# -- contexts over finitely presented modules -------------------------------------------


def _kernel_quotient_criterion(f: FpMorphism, pair) -> tuple[bool, dict]:
    K, _ = fpmod.kernel(f)
    if K.is_zero():
        return True, {"rule": "kernel-quotients", "kernel": "0"}
    if K.is_finite():
        for _, gens in fpmod.enumerate_subgroups(K):
            _, n = fpmod.subobject(K, gens)
            G, alpha = fpmod.cokernel(n)
            T, _ = pair.radical(G)
            if not T.is_zero():
                return False, _quotient_certificate(f, alpha, gens, T)
        return True, {"rule": "kernel-quotients", "kernel": str(K), "checked": "all subgroups"}
    # a free summand of K maps onto Z/2, which is torsion
    S = K.standardized()
    row = [0] * S.ngens
    row[len(S.factors)] = 1
    Z2 = FpObject.standard(0, (2,), K.ring)
    alpha = FpMorphism(S, Z2, ExactMatrix([row], K.ring, ncols=S.ngens)) @ K.to_standard()
    return False, _quotient_certificate(f, alpha, None, Z2)


def _quotient_certificate(f, alpha, gens, radical_obj) -> dict:
    real = realize_kernel_epi(f, alpha)
    return {
        "rule": "kernel-quotients",
        "kernel": str(alpha.src),
        "subgroup_generators": None if gens is None else [list(g) for g in gens],
        "quotient": str(alpha.dst),
        "radical": str(radical_obj),
        "collapsing_pushout": {
            "target": str(real.square.obj),
            "kernel_of_pushed_arrow": str(real.square.ker_f_prime[0]),
        },
    }


@dataclass
class FpContext:
    """A category context over finitely presented modules."""

    token: str
    view: AmbientView
    ring: Ring = ZZ

    def __post_init__(self):
        self.pair = torsion_pair(self.ring)

    # membership ---------------------------------------------------------
    def contains(self, M: FpObject) -> bool:
        return self.view.contains(M)

    def check(self, f: FpMorphism) -> None:
        for M in (f.src, f.dst):
            if not self.contains(M):
                raise ValueError(f"{M} is not an object of context {self.token!r}")

    # structure ----------------------------------------------------------
    def decompose(self, f):
        return decompose_in(self.view, f)

    def pullback(self, f, g):
        return self.view.pullback(f, g)

    def pushout(self, f, g):
        return self.view.pushout(f, g)

    def is_mono(self, f) -> bool:
        return self.view.is_mono(f)

    def is_epi(self, f) -> bool:
        return self.view.is_epi(f)

    # universality -------------------------------------------------------
    def universal_mono(self, f) -> tuple[bool, dict]:
        kind = self.view.kind
        if kind == "torsion":
            return _kernel_quotient_criterion(f, self.pair)
        if kind == "torsion-free":
            if self.is_mono(f):
                return True, {"rule": "integral", "note": "pushouts of monos between lattices stay injective"}
            return False, {"rule": "not-mono", "kernel": str(self.view.kernel(f)[0])}
        mono = self.is_mono(f)
        return mono, {"rule": "abelian", "kernel": str(self.view.kernel(f)[0])}

    def universal_epi(self, f) -> tuple[bool, dict]:
        epi = self.is_epi(f)
        kind = self.view.kind
        if kind == "torsion-free":
            C, _ = fpmod.cokernel(f)
            F, _ = self.pair.coradical(C)
            return F.is_zero(), {"rule": "cokernel-subobjects", "cokernel": str(C), "coradical": str(F)}
        if kind == "torsion":
            return epi, {"rule": "surjective", "cokernel": str(self.view.cokernel(f)[0])}
        return epi, {"rule": "abelian", "cokernel": str(self.view.cokernel(f)[0])}

    def classify(self, f: FpMorphism) -> ClassificationReport:
        self.check(f)
        mono, epi = self.is_mono(f), self.is_epi(f)
        dec = self.decompose(f)
        strict = dec.is_strict
        um, cm = self.universal_mono(f)
        ue, ce = self.universal_epi(f)
        mo_u, _ = self.universal_mono(dec.fbar)
        po_u, _ = self.universal_epi(dec.fbar)
        certs = [
            {"flag": "decomposition", "coimage": str(dec.coim_obj), "image": str(dec.im_obj), "fbar_iso": strict},
            {"flag": "is_universal_mono", **cm},
            {"flag": "is_universal_epi", **ce},
        ]
        return ClassificationReport(
            self.token, mono, epi, mono and strict, epi and strict, um, ue, mo_u, po_u, certs
        )

    # random generators for the trial harness ----------------------------
    def random_object(self, rng) -> FpObject:
        if self.view.kind == "torsion-free":
            return sampling.random_lattice(rng, 3, self.ring)
        if self.view.kind == "torsion":
            return sampling.random_finite_object(rng, 64, self.ring)
        return sampling.random_object(rng, self.ring)

    def random_morphism(self, A, B, rng) -> FpMorphism:
        return sampling.random_morphism(A, B, rng)

    def random_universal_mono(self, rng) -> FpMorphism:
        if self.view.kind == "torsion-free":
            b = int(rng.integers(1, 4))
            a = int(rng.integers(0, b + 1))
            M = sampling.random_full_rank(rng, b, a, ring=self.ring)
            return FpMorphism(FpObject.standard(a, (), self.ring), FpObject.standard(b, (), self.ring), M)
        B = self.random_object(rng)
        h = self.random_morphism(self.random_object(rng), B, rng)
        return self.view.kernel(self.view.cokernel(h)[1])[1]

    def random_universal_epi(self, rng) -> FpMorphism:
        if self.view.kind == "torsion-free":
            a = int(rng.integers(1, 4))
            b = int(rng.integers(0, a + 1))
            M = sampling.random_full_rank(rng, b, a, ring=self.ring)
            return FpMorphism(FpObject.standard(a, (), self.ring), FpObject.standard(b, (), self.ring), M)
        A = self.random_object(rng)
        h = self.random_morphism(self.random_object(rng), A, rng)
        return self.view.cokernel(h)[1]


def get_context(token: str, p: int = DEFAULT_PRIME):
    if token == "ab":
        return FpContext("ab", AmbientView(ZZ), ZZ)
    if token == "fin-tors":
        return FpContext("fin-tors", TorsionClassView(torsion_pair(ZZ)), ZZ)
    if token == "lat":
        return FpContext("lat", TorsionFreeClassView(torsion_pair(ZZ)), ZZ)
    if token == "p-local":
        ring = Ring(p)
        return FpContext("p-local", TorsionClassView(torsion_pair(ring)), ring)
    if token == "div":
        from .divkit import DivContext

        return DivContext()
    raise UnsupportedContext(f"unknown context {token!r}; expected one of {', '.join(CONTEXTS)}")


def _context_for(f, context):
    if isinstance(context, str):
        return get_context(context)
    return context


def classify(f, context="ab") -> ClassificationReport:
    return _context_for(f, context).classify(f)


def universal_mono_test(f, context="fin-tors") -> tuple[bool, dict]:
    return _context_for(f, context).universal_mono(f)


def universal_epi_test(f, context="fin-tors") -> tuple[bool, dict]:
    return _context_for(f, context).universal_epi(f)


# -- stability trials -------------------------------------------------------------------

AXIOMS = ("1", "1*")
_STREAM = {"1": 1, "1*": 2}


@dataclass
class TrialReport:
    context: str
    seed: int
    trials: int
    completed: dict
    violations: list
    not_representable: int
    exhausted: bool
    elapsed_ms: float

    def to_json(self) -> dict:
        return {
            "context": self.context,
            "seed": self.seed,
            "trials": self.trials,
            "completed": self.completed,
            "violations": self.violations,
            "not_representable": self.not_representable,
            "exhausted": self.exhausted,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _describe(f) -> str:
    return f"{f.src} -> {f.dst} {f.matrix.tolist() if hasattr(f, 'matrix') else f}"


def run_one_trial(token: str, seed: int, index: int, axiom: str, p: int = DEFAULT_PRIME) -> dict:
    """One trial.  Returns {"status": ok|violation|not_representable, ...}."""
    ctx = get_context(token, p)
    rng = sampling.trial_rng(seed, index, _STREAM[axiom])
    try:
        if axiom == "1":
            f = ctx.random_universal_mono(rng)
            ok, _ = ctx.universal_mono(f)
            if not ok:
                return {"status": "not_representable", "reason": "generator produced a non-universal mono"}
            delta = ctx.random_morphism(ctx.random_object(rng), f.dst, rng)
            sq = ctx.pullback(f, delta)
            res, cert = ctx.universal_mono(sq.f_prime)
        else:
            f = ctx.random_universal_epi(rng)
            ok, _ = ctx.universal_epi(f)
            if not ok:
                return {"status": "not_representable", "reason": "generator produced a non-universal epi"}
            g = ctx.random_morphism(f.src, ctx.random_object(rng), rng)
            sq = ctx.pushout(f, g)
            res, cert = ctx.universal_epi(sq.f_prime)
    except NotRepresentable as exc:
        return {"status": "not_representable", "reason": str(exc)}
    if res and sq.commutes():
        return {"status": "ok"}
    return {
        "status": "violation",
        "trial": index,
        "axiom": axiom,
        "f": _describe(f),
        "other_leg": _describe(sq.g),
        "result": _describe(sq.f_prime),
        "commutes": sq.commutes(),
        "certificate": cert,
    }


def _run_batch(args):
    token, seed, indices, axiom, p = args
    return [(i, run_one_trial(token, seed, i, axiom, p)) for i in indices]


def axiom_stability_trial(
    context: str,
    seed: int,
    budget: int,
    axioms=AXIOMS,
    p: int = DEFAULT_PRIME,
    workers: int = 1,
    max_attempt_factor: int = 20,
) -> TrialReport:
    """Run ``budget`` representable trials per axiom.

    Trial ``i`` of axiom ``a`` draws from its own stream ``(seed, i, a)``, so the
    outcome does not depend on ``workers``.  Non-representable draws are counted
    and replaced, up to ``max_attempt_factor * budget`` attempts per axiom.
    """
    get_context(context, p)  # validate token early
    t0 = time.perf_counter()
    completed, violations, skipped, exhausted = {}, [], 0, False
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for axiom in axioms:
            done, index, cap = 0, 0, max_attempt_factor * max(budget, 0)
            while done < budget and index < cap:
                want = budget - done
                idx = list(range(index, min(index + want, cap)))
                index += len(idx)
                if pool is None:
                    results = _run_batch((context, seed, idx, axiom, p))
                else:
                    chunks = [idx[k::workers] for k in range(workers)]
                    results = []
                    for part in pool.map(_run_batch, [(context, seed, c, axiom, p) for c in chunks if c]):
                        results.extend(part)
                    results.sort(key=lambda r: r[0])
                for _, r in results:
                    if r["status"] == "not_representable":
                        skipped += 1
                        continue
                    done += 1
                    if r["status"] == "violation":
                        violations.append(r)
            completed[axiom] = done
            exhausted = exhausted or done < budget
    finally:
        if pool is not None:
            pool.shutdown()
    elapsed = (time.perf_counter() - t0) * 1000
    return TrialReport(context, seed, budget, completed, violations, skipped, exhausted, elapsed)
