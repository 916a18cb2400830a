"""Seeded random objects and morphisms for the trial harness and the tests."""
from __future__ import annotations

from math import gcd

import numpy as np

from .fpmod import FpMorphism, FpObject, direct_sum
from .linalg import ZZ, ExactMatrix, Ring

SMALL_CYCLIC = (2, 3, 4, 5, 6, 8, 9)


def trial_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator per (seed, trial index), so results do not depend on scheduling."""
    return np.random.default_rng([seed, index, stream])


def random_finite_object(rng, max_order: int = 64, ring: Ring = ZZ, max_summands: int = 3) -> FpObject:
    """Standard-form finite object built from a random list of cyclic orders."""
    if ring.is_local:
        orders = [ring.p ** k for k in range(1, 4)]
    else:
        orders = list(SMALL_CYCLIC)
    cyc = []
    total = 1
    for _ in range(int(rng.integers(0, max_summands + 1))):
        n = int(orders[rng.integers(len(orders))])
        if total * n > max_order:
            break
        cyc.append(n)
        total *= n
    if not cyc:
        return FpObject.zero(ring)
    obj = direct_sum(*(FpObject.standard(0, (n,), ring) for n in cyc)).obj
    return obj.standardized()


def random_lattice(rng, max_rank: int = 3, ring: Ring = ZZ, min_rank: int = 0) -> FpObject:
    return FpObject.standard(int(rng.integers(min_rank, max_rank + 1)), (), ring)


def random_object(rng, ring: Ring = ZZ) -> FpObject:
    """Finite part plus a free part of rank at most 2."""
    T = random_finite_object(rng, 36, ring, 2)
    r = int(rng.integers(0, 3))
    return FpObject.standard(r, T.factors, ring)


def random_morphism(A: FpObject, B: FpObject, rng, bound: int = 4) -> FpMorphism:
    """Random homomorphism between standard-form objects.

    Entry (i, j) from a generator of order d into one of order e must be a
    multiple of e/gcd(d, e); torsion generators map to zero in free coordinates.
    """
    if not (A.is_standard and B.is_standard):
        raise ValueError("random_morphism expects standard-form objects")
    da = list(A.factors) + [0] * A.rank
    eb = list(B.factors) + [0] * B.rank
    rows = []
    for e in eb:
        row = []
        for d in da:
            k = int(rng.integers(-bound, bound + 1))
            if d == 0:
                row.append(k if e == 0 else k % e)
            elif e == 0:
                row.append(0)
            else:
                step = e // gcd(d, e)
                row.append((k * step) % e)
        rows.append(row)
    return FpMorphism(A, B, ExactMatrix(rows, A.ring, ncols=A.ngens), check=False)


def random_full_rank(rng, rows: int, cols: int, bound: int = 3, ring: Ring = ZZ) -> ExactMatrix:
    """Random matrix of rank min(rows, cols)."""
    while True:
        M = ExactMatrix(rng.integers(-bound, bound + 1, size=(rows, cols)).tolist(), ring, ncols=cols)
        if M.rank() == min(rows, cols):
            return M
