"""Sample generators and sweeps shared by the unit tests and the acceptance run."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qabkit import fpmod
from qabkit.fpmod import FpMorphism, make_object
from qabkit.linalg import ExactMatrix
from qabkit.sampling import random_finite_object, random_morphism, random_object, trial_rng
from qabkit.universality import realize_kernel_epi, universal_mono_test

import oracles


def finite_group(orders):
    return make_object([[n if i == j else 0 for j in range(len(orders))] for i, n in enumerate(orders)], generators=len(orders))


def hom_from_images(images, src_orders, dst_orders) -> FpMorphism:
    """The hom whose i-th generator goes to images[i]; columns are the images."""
    cols = [list(map(int, v)) for v in images]
    rows = [[c[i] for c in cols] for i in range(len(dst_orders))]
    return FpMorphism(finite_group(src_orders), finite_group(dst_orders), ExactMatrix(rows, ncols=len(src_orders)))


@dataclass
class SweepResult:
    total: int = 0
    agree: int = 0
    disagreements: list = field(default_factory=list)

    def add(self, ours: bool, theirs: bool, label: str):
        self.total += 1
        if ours == theirs:
            self.agree += 1
        else:
            self.disagreements.append(label)


def mono_sweep(max_order: int = 16) -> SweepResult:
    """Every subgroup inclusion S <= B with |B| <= max_order, against pushout enumeration."""
    res = SweepResult()
    for B in oracles.groups_up_to(max_order):
        for S in oracles.subgroups(B):
            basis = oracles.cyclic_basis(S, B)
            A = tuple(oracles.element_order(x, B) for x in basis)
            f = hom_from_images(basis, A, B)
            ours, _ = universal_mono_test(f, "fin-tors")
            theirs = oracles.universal_mono_by_pushouts(basis, A, B, max_order)
            res.add(ours, theirs, f"{A} -> {B} via {basis}")
    return res


def random_hom_sweep(seed: int, count: int, max_order: int = 8, probe_order: int = 16) -> SweepResult:
    """Arbitrary homs between groups of order <= max_order (mostly non-injective)."""
    rng = np.random.default_rng(seed)
    groups = oracles.groups_up_to(max_order)
    res = SweepResult()
    for _ in range(count):
        A = groups[rng.integers(len(groups))]
        B = groups[rng.integers(len(groups))]
        H = oracles.homomorphisms(A, B)
        images = H[rng.integers(len(H))]
        f = hom_from_images(images, A, B)
        ours, _ = universal_mono_test(f, "fin-tors")
        theirs = oracles.universal_mono_by_pushouts(images, A, B, probe_order)
        res.add(ours, theirs, f"{A} -> {B} via {images.tolist()}")
    return res


def realization_sample(seed: int, index: int, max_kernel: int = 64):
    """A seeded pair (f, alpha) with finite Ker f and alpha: Ker f ->> G."""
    rng = trial_rng(seed, index, 3)
    while True:
        A = random_finite_object(rng, max_kernel)
        B = random_object(rng)
        f = random_morphism(A, B, rng)
        K, _ = fpmod.kernel(f)
        if K.order() <= max_kernel:
            break
    subs = fpmod.enumerate_subgroups(K)
    _, gens = subs[rng.integers(len(subs))]
    _, n = fpmod.subobject(K, gens)
    G, alpha = fpmod.cokernel(n)
    return f, alpha


def check_realization(seed: int, index: int) -> tuple[bool, str]:
    f, alpha = realization_sample(seed, index)
    r = realize_kernel_epi(f, alpha)
    ok = r.verified() and r.square.ker_f_prime[0].isomorphic(alpha.dst)
    return ok, f"{f} / {alpha.dst}"
