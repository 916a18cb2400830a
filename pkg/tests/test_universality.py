import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qabkit import fpmod
from qabkit.fpmod import FpMorphism, FpObject, identity
from qabkit.linalg import ExactMatrix, Ring
from qabkit.universality import (
    CONTEXTS,
    UnsupportedContext,
    axiom_stability_trial,
    classify,
    get_context,
    realize_kernel_epi,
    run_one_trial,
    universal_epi_test,
    universal_mono_test,
)

import oracles
import samplers

Z = FpObject.standard(1)
seeds = st.integers(0, 2**32 - 1)


def cyc(n, ring=None):
    return FpObject.standard(0, (n,)) if ring is None else FpObject.standard(0, (n,), ring)


def mor(src, dst, rows):
    return FpMorphism(src, dst, ExactMatrix(rows, src.ring, ncols=src.ngens))


# -- classification examples ---------------------------------------------------------------


def test_lattice_doubling_flags():
    r = classify(mor(Z, Z, [[2]]), "lat")
    assert r.is_mono and r.is_epi and r.is_universal_mono and r.is_universal_epi
    assert not r.is_strict_mono and not r.is_strict_epi
    assert r.chain_holds()


@pytest.mark.parametrize(
    "token,obj",
    [
        ("ab", FpObject.standard(1, (2,))),
        ("fin-tors", FpObject.standard(0, (2, 6))),
        ("lat", FpObject.standard(2)),
        ("p-local", FpObject.standard(0, (3, 9), Ring(3))),
    ],
)
def test_identity_has_every_flag(token, obj):
    r = classify(identity(obj), token)
    assert all(r.flags().values())


def test_zero_kernel_is_universal_mono():
    ok, cert = universal_mono_test(mor(cyc(2), cyc(4), [[2]]), "fin-tors")
    assert ok and cert["kernel"] == "0"


def test_non_universal_mono_gets_collapsing_pushout():
    f = mor(cyc(4), cyc(2), [[1]])
    ok, cert = universal_mono_test(f, "fin-tors")
    assert not ok
    assert cert["collapsing_pushout"]["kernel_of_pushed_arrow"] != "0"


def test_ambient_kernel_with_free_part_fails():
    ok, cert = universal_mono_test(mor(Z, cyc(4), [[1]]), "ab")
    assert not ok
    ok, cert = get_context("fin-tors").universal_mono(mor(Z, cyc(4), [[1]]))
    assert not ok and cert["quotient"] == "Z/2"


def test_unknown_context():
    with pytest.raises(UnsupportedContext):
        classify(identity(Z), "banach")


def test_context_membership_is_checked():
    with pytest.raises(ValueError):
        classify(identity(Z), "fin-tors")


def _random_in(token, rng):
    ctx = get_context(token)
    A, B = ctx.random_object(rng), ctx.random_object(rng)
    return ctx.random_morphism(A, B, rng)


@pytest.mark.parametrize("token", ["ab", "fin-tors", "lat", "p-local"])
@given(seed=seeds)
@settings(max_examples=40)
def test_implication_chain(token, seed):
    r = classify(_random_in(token, np.random.default_rng(seed)), token)
    assert r.chain_holds()


@given(seeds)
def test_ambient_flags_coincide(seed):
    f = _random_in("ab", np.random.default_rng(seed))
    r = classify(f, "ab")
    assert r.is_mono == r.is_strict_mono == r.is_universal_mono
    assert r.is_epi == r.is_strict_epi == r.is_universal_epi


# -- lattices against a rational-rank oracle -------------------------------------------------


def _qrank(M):
    M = np.asarray(M, dtype=float)
    return 0 if M.size == 0 else int(np.linalg.matrix_rank(M))


def _lat_pushout_mono_oracle(F, G):
    """Pushed-out f stays mono in lattices iff no a has f a = 0 and g a != 0 (over Q)."""
    return _qrank(np.vstack([F, G])) == _qrank(F)


def _lat_pullback_epi_oracle(F, G, b):
    """Pulled-back f has finite-index image iff g^{-1}(im f) has full rank."""
    x = G.shape[1]
    imG, imF = _qrank(G), _qrank(F)
    both = _qrank(np.hstack([G, F]))
    ker_g = x - imG
    return ker_g + (imG + imF - both) == x


def _all_small(rows, cols, bound=1):
    for entries in itertools.product(range(-bound, bound + 1), repeat=rows * cols):
        yield np.array(entries, dtype=int).reshape(rows, cols)


@given(seeds)
@settings(max_examples=25)
def test_lattice_universality_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    a, b = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    F = rng.integers(-2, 3, size=(b, a))
    f = mor(FpObject.standard(a), FpObject.standard(b), F.tolist())
    ok_mono, _ = universal_mono_test(f, "lat")
    expect = all(_lat_pushout_mono_oracle(F, G) for c in (1, 2) for G in _all_small(c, a))
    assert ok_mono == expect
    ok_epi, _ = universal_epi_test(f, "lat")
    expect = all(_lat_pullback_epi_oracle(F, G, b) for c in (1, 2) for G in _all_small(b, c))
    assert ok_epi == expect


def test_lattice_pushout_of_mono_matches_library():
    ctx = get_context("lat")
    f = mor(Z, FpObject.standard(2), [[2], [4]])
    for G in _all_small(2, 1, 2):
        g = mor(Z, FpObject.standard(2), G.tolist())
        sq = ctx.pushout(f, g)
        assert ctx.is_mono(sq.f_prime) and sq.commutes()


# -- finite groups against pushout enumeration -------------------------------------------


def test_pushout_kernel_sizes_agree_with_library():
    A, B, X = (2, 4), (4,), (2, 2)
    images = [[2], [1]]
    f = samplers.hom_from_images(images, A, B)
    sizes = oracles.pushout_kernel_sizes(images, A, B, X)
    for g_images, size in zip(oracles.homomorphisms(A, X), sizes):
        g = samplers.hom_from_images(g_images, A, X)
        sq = fpmod.pushout(f, g)
        assert sq.ker_f_prime[0].order() == size


def test_mono_sweep_small():
    res = samplers.mono_sweep(8)
    assert res.total > 40 and res.disagreements == []


def test_random_hom_sweep_small():
    res = samplers.random_hom_sweep(3, 60, max_order=6, probe_order=8)
    assert res.disagreements == []


@pytest.mark.parametrize("p", [2, 3])
def test_local_context_matches_mono(p):
    R = Ring(p)
    ctx = get_context("p-local", p)
    rng = np.random.default_rng(p)
    for _ in range(30):
        A, B = ctx.random_object(rng), ctx.random_object(rng)
        f = ctx.random_morphism(A, B, rng)
        assert ctx.universal_mono(f)[0] == ctx.is_mono(f)
        assert ctx.universal_epi(f)[0] == ctx.is_epi(f)


# -- realization of kernel epis ------------------------------------------------------------


def test_realization_collapse_to_zero():
    f = mor(cyc(4), cyc(2), [[1]])
    K, _ = fpmod.kernel(f)
    alpha = fpmod.zero_morphism(K, FpObject.zero())
    r = realize_kernel_epi(f, alpha)
    assert r.verified() and r.square.ker_f_prime[0].is_zero()


def test_realization_identity_alpha():
    f = mor(cyc(4), cyc(2), [[1]])
    K, _ = fpmod.kernel(f)
    r = realize_kernel_epi(f, identity(K))
    assert r.verified() and r.square.ker_f_prime[0].isomorphic(K)


def test_realization_with_infinite_kernel():
    f = mor(Z, cyc(4), [[2]])
    K, _ = fpmod.kernel(f)
    alpha = mor(K, cyc(3), [[1]])
    r = realize_kernel_epi(f, alpha)
    assert r.verified() and r.square.ker_f_prime[0].normal_form == (0, (3,))


def test_realization_rejects_non_epi():
    f = mor(cyc(4), cyc(2), [[1]])
    K, _ = fpmod.kernel(f)
    with pytest.raises(ValueError):
        realize_kernel_epi(f, mor(K, cyc(4), [[2]]))


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_realization_samples(index):
    ok, label = samplers.check_realization(99, index)
    assert ok, label


# -- stability harness ---------------------------------------------------------------------


@pytest.mark.parametrize("token", ["fin-tors", "lat", "p-local", "ab"])
def test_axiom_harness_small(token):
    rep = axiom_stability_trial(token, seed=1, budget=30)
    assert rep.violations == [] and rep.completed == {"1": 30, "1*": 30}


def test_harness_zero_budget():
    rep = axiom_stability_trial("fin-tors", seed=0, budget=0)
    assert rep.completed == {"1": 0, "1*": 0} and not rep.exhausted


def test_trials_are_independent_of_workers():
    a = axiom_stability_trial("fin-tors", seed=5, budget=12)
    b = axiom_stability_trial("fin-tors", seed=5, budget=12, workers=2)
    assert a.to_json() | {"elapsed_ms": 0} == b.to_json() | {"elapsed_ms": 0}


def test_single_trial_is_reproducible():
    assert run_one_trial("lat", 3, 17, "1*") == run_one_trial("lat", 3, 17, "1*")


def test_context_tokens():
    assert set(CONTEXTS) == {"ab", "fin-tors", "lat", "p-local", "div"}
