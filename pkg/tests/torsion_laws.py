"""Torsion-pair law checks on one sampled object/morphism pair.

Shared by the unit tests and the acceptance run; each check returns a list
of failure descriptions (empty when every law holds).
"""
from __future__ import annotations

import numpy as np

from qabkit.fpmod import FpMorphism, IllDefined, equal_morphisms, factor_through_mono, identity
from qabkit.linalg import ExactMatrix
from qabkit.sampling import random_finite_object, random_lattice, random_morphism, random_object
from qabkit.torsion import torsion_pair, torsion_ses

PAIR = torsion_pair()


def check_laws(rng: np.random.Generator) -> list[str]:
    fails = []
    M, N, P = random_object(rng), random_object(rng), random_object(rng)
    f, g = random_morphism(M, N, rng), random_morphism(N, P, rng)

    T, mu = PAIR.radical(M)
    # idempotence: t(t(M)) -> t(M) is an iso
    TT, mu2 = PAIR.radical(T)
    if not (TT.isomorphic(T) and mu2.is_iso()):
        fails.append(f"idempotence fails at {M}")
    # radical vanishes on the torsion-free quotient
    F, pi = PAIR.coradical(M)
    if not PAIR.radical(F)[0].is_zero():
        fails.append(f"t(M/tM) != 0 at {M}")
    if not torsion_ses(M).is_exact():
        fails.append(f"torsion sequence not exact at {M}")
    # Hom(T, F) = 0 along any arrow
    if not (PAIR.coradical(N)[1] @ f @ mu).is_zero():
        fails.append(f"torsion maps to torsion-free part nontrivially: {f}")
    # and directly: every integer matrix from a finite group to a lattice is zero or ill-defined
    A, L = random_finite_object(rng, 36), random_lattice(rng, 2, min_rank=1)
    Pm = ExactMatrix(rng.integers(-3, 4, size=(L.ngens, A.ngens)).tolist(), ncols=A.ngens)
    try:
        h = FpMorphism(A, L, Pm)
        if not h.is_zero():
            fails.append(f"nonzero map {A} -> {L}")
    except IllDefined:
        pass
    # subfunctor: f . mu_M factors through mu_N, functorially
    tf, tg, tgf = PAIR.radical_map(f), PAIR.radical_map(g), PAIR.radical_map(g @ f)
    if not equal_morphisms(tgf, tg @ tf):
        fails.append(f"t(g f) != t(g) t(f) for {f}, {g}")
    if not equal_morphisms(PAIR.radical_map(identity(M)), identity(T)):
        fails.append(f"t(id) != id at {M}")
    _, muN = PAIR.radical(N)
    if not equal_morphisms(muN @ tf, f @ mu):
        fails.append(f"radical square does not commute for {f}")
    # the radical is right adjoint to the inclusion: maps from a torsion object
    # into M factor through t(M)
    X = random_finite_object(rng, 36)
    h = random_morphism(X, M.standardized(), rng) if M.is_standard else None
    if h is not None:
        factor_through_mono(h, mu)
    return fails
