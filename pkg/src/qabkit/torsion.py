"""The (torsion, torsion-free) pair and the subcategories it cuts out.

The radical ``t`` sends a group to its torsion subgroup.  Limits in the
torsion class are ambient limits followed by ``t``; colimits in the
torsion-free class are ambient colimits followed by ``M -> M/t(M)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import fpmod
from .fpmod import (
    CanonicalDecomposition,
    FpMorphism,
    FpObject,
    PullbackSquare,
    PushoutSquare,
    factor_through_epi,
    factor_through_mono,
)
from .linalg import ZZ, ExactMatrix, Ring


@dataclass(frozen=True)
class TorsionSES:
    """``0 -> t(M) -> M -> M/t(M) -> 0``."""

    torsion: FpObject
    i: FpMorphism
    obj: FpObject
    p: FpMorphism
    free: FpObject

    def is_exact(self) -> bool:
        K, k = fpmod.kernel(self.p)
        C, c = fpmod.cokernel(self.i)
        if not (self.i.is_mono() and self.p.is_epi() and (self.p @ self.i).is_zero()):
            return False
        # i is the kernel of p and p the cokernel of i
        return (
            factor_through_mono(k, self.i).is_iso()
            and factor_through_epi(c, self.p).is_iso()
        )


@dataclass(frozen=True)
class TorsionPair:
    """Torsion groups / torsion-free groups over Z or Z_(p)."""

    name: str
    ring: Ring = ZZ

    def is_torsion(self, M: FpObject) -> bool:
        return M.rank == 0

    def is_torsion_free(self, M: FpObject) -> bool:
        return not M.factors

    def radical(self, M: FpObject) -> tuple[FpObject, FpMorphism]:
        """Torsion subobject t(M) and its inclusion."""
        S = M.standardized()
        t = len(S.factors)
        T = FpObject.standard(0, S.factors, M.ring)
        inc = ExactMatrix.diag([1] * t, S.ngens, t, M.ring)
        return T, M.from_standard() @ FpMorphism(T, S, inc, check=False)

    def coradical(self, M: FpObject) -> tuple[FpObject, FpMorphism]:
        """Torsion-free quotient M/t(M) and the projection."""
        S = M.standardized()
        t = len(S.factors)
        F = FpObject.standard(S.rank, (), M.ring)
        rows = [[1 if j == t + i else 0 for j in range(S.ngens)] for i in range(S.rank)]
        proj = FpMorphism(S, F, ExactMatrix(rows, M.ring, ncols=S.ngens), check=False)
        return F, proj @ M.to_standard()

    def radical_map(self, f: FpMorphism) -> FpMorphism:
        """t(f): t(M) -> t(N), the restriction of f to torsion subgroups."""
        _, mu_m = self.radical(f.src)
        _, mu_n = self.radical(f.dst)
        return factor_through_mono(f @ mu_m, mu_n)

    def coradical_map(self, f: FpMorphism) -> FpMorphism:
        _, pi_m = self.coradical(f.src)
        _, pi_n = self.coradical(f.dst)
        return factor_through_epi(pi_n @ f, pi_m)


def torsion_pair(ring: Ring = ZZ) -> TorsionPair:
    return TorsionPair("torsion" if not ring.is_local else f"torsion@{ring.p}", ring)


def radical(M: FpObject, pair: TorsionPair | None = None) -> tuple[FpObject, FpMorphism]:
    return (pair or torsion_pair(M.ring)).radical(M)


def torsion_ses(M: FpObject, pair: TorsionPair | None = None) -> TorsionSES:
    pair = pair or torsion_pair(M.ring)
    T, i = pair.radical(M)
    F, p = pair.coradical(M)
    return TorsionSES(T, i, M, p, F)


# -- category views ------------------------------------------------------------------


class AmbientView:
    """The abelian category of finitely presented modules itself."""

    kind = "ambient"

    def __init__(self, ring: Ring = ZZ):
        self.ring = ring
        self.pair = torsion_pair(ring)

    def contains(self, M: FpObject) -> bool:
        return M.ring == self.ring

    def kernel(self, f):
        return fpmod.kernel(f)

    def cokernel(self, f):
        return fpmod.cokernel(f)

    def pushout(self, f, g) -> PushoutSquare:
        return fpmod.pushout(f, g)

    def pullback(self, f, g) -> PullbackSquare:
        return fpmod.pullback(f, g)

    def is_mono(self, f) -> bool:
        return self.kernel(f)[0].is_zero()

    def is_epi(self, f) -> bool:
        return self.cokernel(f)[0].is_zero()


class TorsionClassView(AmbientView):
    """The torsion class: kernels and pullbacks pass through the radical."""

    kind = "torsion"

    def __init__(self, pair: TorsionPair):
        self.ring = pair.ring
        self.pair = pair

    def contains(self, M):
        return M.ring == self.ring and self.pair.is_torsion(M)

    def kernel(self, f):
        K, k = fpmod.kernel(f)
        T, mu = self.pair.radical(K)
        return T, k @ mu

    def pullback(self, f, g) -> PullbackSquare:
        amb = fpmod.pullback(f, g)
        T, mu = self.pair.radical(amb.obj)
        return PullbackSquare(
            f, g, T, amb.f_prime @ mu, amb.g_prime @ mu, ambient=amb, inclusion=mu
        )


class TorsionFreeClassView(AmbientView):
    """The torsion-free class: cokernels and pushouts pass through the coradical."""

    kind = "torsion-free"

    def __init__(self, pair: TorsionPair):
        self.ring = pair.ring
        self.pair = pair

    def contains(self, M):
        return M.ring == self.ring and self.pair.is_torsion_free(M)

    def cokernel(self, f):
        C, c = fpmod.cokernel(f)
        F, pi = self.pair.coradical(C)
        return F, pi @ c

    def pushout(self, f, g) -> PushoutSquare:
        amb = fpmod.pushout(f, g)
        F, pi = self.pair.coradical(amb.obj)
        fp = pi @ amb.f_prime
        kfp = fpmod.kernel(fp)
        psi = factor_through_mono(g @ amb.ker_f[1], kfp[1])
        return PushoutSquare(
            f, g, F, fp, pi @ amb.g_prime, amb.ker_f, kfp, psi, ambient=amb, projection=pi
        )


def pullback_in_torsion_class(f, g, pair: TorsionPair | None = None) -> PullbackSquare:
    return TorsionClassView(pair or torsion_pair(f.src.ring)).pullback(f, g)


def cokernel_in_torsionfree_class(f, pair: TorsionPair | None = None):
    return TorsionFreeClassView(pair or torsion_pair(f.src.ring)).cokernel(f)


def decompose_in(view, f: FpMorphism) -> CanonicalDecomposition:
    """Canonical decomposition computed with the view's kernels and cokernels."""
    K, k = view.kernel(f)
    C, c = view.cokernel(f)
    Coim, coim = view.cokernel(k)
    Im, im = view.kernel(c)
    f1 = factor_through_mono(f, im)
    fbar = factor_through_epi(f1, coim)
    return CanonicalDecomposition(f, K, k, C, c, Coim, coim, Im, im, fbar)
