import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qabkit.fpmod import FpMorphism, FpObject, direct_sum, equal_morphisms, identity, make_object
from qabkit.linalg import ExactMatrix
from qabkit.torsion import (
    TorsionClassView,
    TorsionFreeClassView,
    cokernel_in_torsionfree_class,
    decompose_in,
    pullback_in_torsion_class,
    radical,
    torsion_pair,
    torsion_ses,
)
from qabkit.fpmod import pullback_cone_factor

from torsion_laws import check_laws

Z = FpObject.standard(1)


def cyc(n):
    return FpObject.standard(0, (n,))


def mor(src, dst, rows):
    return FpMorphism(src, dst, ExactMatrix(rows, ncols=src.ngens))


def test_radical_examples():
    assert radical(FpObject.standard(1, (6,)))[0].normal_form == (0, (6,))
    assert radical(FpObject.standard(2))[0].is_zero()
    M = direct_sum(cyc(4), cyc(9)).obj
    T, mu = radical(M)
    assert T.isomorphic(M) and mu.is_iso()


def test_torsion_ses_examples():
    ses = torsion_ses(FpObject.standard(1, (2,)))
    assert ses.torsion.normal_form == (0, (2,)) and ses.free.normal_form == (1, ())
    assert ses.is_exact()
    ses = torsion_ses(cyc(12))
    assert ses.free.is_zero() and ses.p.is_zero()


def test_twisted_rank_one_quotient_is_torsion_free():
    # coker of Z -> Z^2, 1 -> (2, 1)
    M = make_object([[2], [1]])
    assert M.normal_form == (1, ())
    assert radical(M)[0].is_zero()


def test_torsion_class_pullback_examples():
    f = mor(cyc(4), cyc(2), [[1]])
    sq = pullback_in_torsion_class(f, identity(cyc(2)))
    assert sq.obj.order() == 4 and sq.commutes()
    zero = FpObject.zero()
    sq = pullback_in_torsion_class(mor(zero, cyc(2), [[]]), identity(cyc(2)))
    assert sq.obj.is_zero()


def test_torsion_class_pullback_of_mixed_ambient():
    # legs leaving the class: the ambient pullback Z x_{Z/2} Z has rank 2, its radical is 0
    f = mor(Z, cyc(2), [[1]])
    sq = TorsionClassView(torsion_pair()).pullback(f, f)
    assert sq.ambient.obj.normal_form == (2, ()) and sq.obj.is_zero()


@given(st.integers(0, 2**32 - 1))
def test_torsion_class_pullback_is_limit_for_torsion_cones(seed):
    from qabkit.sampling import random_finite_object, random_morphism

    rng = np.random.default_rng(seed)
    A, X, B = (random_finite_object(rng, 36) for _ in range(3))
    f, g = random_morphism(A, B, rng), random_morphism(X, B, rng)
    sq = pullback_in_torsion_class(f, g)
    assert sq.commutes()
    u = pullback_cone_factor(sq.ambient, sq.g_prime, sq.f_prime)
    assert u.is_mono()


def test_torsionfree_cokernel_examples():
    assert cokernel_in_torsionfree_class(mor(Z, Z, [[2]]))[0].is_zero()
    assert cokernel_in_torsionfree_class(identity(Z))[0].is_zero()
    Z2 = FpObject.standard(2)
    assert cokernel_in_torsionfree_class(mor(Z, Z2, [[1], [0]]))[0].normal_form == (1, ())


def test_lattice_doubling_is_not_strict():
    view = TorsionFreeClassView(torsion_pair())
    d = decompose_in(view, mor(Z, Z, [[2]]))
    assert d.check() and not d.is_strict
    assert view.is_mono(d.morphism) and view.is_epi(d.morphism)


def test_torsionfree_pushout_drops_torsion():
    view = TorsionFreeClassView(torsion_pair())
    sq = view.pushout(mor(Z, Z, [[2]]), mor(Z, Z, [[2]]))
    # ambient pushout is Z + Z/2
    assert sq.ambient.obj.normal_form == (1, (2,))
    assert sq.obj.normal_form == (1, ())
    assert equal_morphisms(sq.g_prime @ sq.f, sq.f_prime @ sq.g)


@given(st.integers(0, 2**32 - 1))
def test_torsion_pair_laws(seed):
    assert check_laws(np.random.default_rng(seed)) == []


def test_local_pair_radical():
    from qabkit.linalg import Ring

    R = Ring(3)
    M = FpObject.standard(1, (9,), R)
    T, mu = torsion_pair(R).radical(M)
    assert T.normal_form == (0, (9,)) and mu.is_mono()
