"""End-to-end acceptance gate.

One test per release criterion, numbered 1 through 9; running this file
under ``pytest -v`` prints exactly one pass/fail line per criterion.
Exact criteria compare canonical polynomials for equality, numeric criteria
use the stated tolerances, and the statistical criterion reruns the full
Monte Carlo regression at its stated dimensions, trial counts, and seed.
"""

import itertools
import math
import time
import warnings
from fractions import Fraction as F

import numpy as np
import pytest

from rmcalc import algops, oplaws
from rmcalc.bipoly import BiPoly
from rmcalc.density import density_grid
from rmcalc.moments import (Recurrence, cumulant_series, fit_recurrence,
                            moment_series)
from rmcalc.oplaws import AtomicSpec
from rmcalc.sampler import verify_expression

from conftest import mz
from test_algops import _check_oracle, _random_poly
from test_encodings import COIN_TABLE, SEMICIRCLE_TABLE, mp_table, _check_table

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def _coin():
    return oplaws.atomic(AtomicSpec(((F(1, 2), 0), (F(1, 2), 1))))


def _jacobi_chain(c1, c2):
    """identity -> xWishart(c1) -> inverse -> xWishart(c2) -> +I -> inverse"""
    a1 = oplaws.identity_atom()
    a2 = oplaws.multiply_wishart(a1, c1)
    a3 = oplaws.invert(a2)
    a4 = oplaws.multiply_wishart(a3, c2)
    a5 = oplaws.shift(a4, 1)
    a6 = oplaws.invert(a5)
    return a1, a2, a3, a4, a5, a6


def _same(got, want):
    assert got.canonicalize() == want.canonicalize()
    assert got.equivalent(want)


def test_criterion_1_sum_and_product_identities():
    t0 = time.perf_counter()
    sc = oplaws.semicircle()
    mp_half = oplaws.marchenko_pastur(F(1, 2))
    sum_target = mz("m^3 + (z + 2)*m^2 + (2*z - 1)*m + 2")
    prod_target = mz("m^4*z^2 - 2*m^3*z + m^2 + 4*m*z + 4")
    # free-convolution route
    _same(oplaws.free_add(sc, mp_half).poly, sum_target)
    _same(oplaws.free_mul(sc, mp_half).poly, prod_target)
    # direct operational laws (Wishart noise added to / multiplied into sc)
    _same(oplaws.add_atomic_wishart(sc, 2, AtomicSpec(((1, F(1, 2)),))).poly,
          sum_target)
    _same(oplaws.multiply_wishart(sc, F(1, 2)).poly, prod_target)
    assert time.perf_counter() - t0 < 1.0


def test_criterion_2_encoding_corpus_round_trips():
    t0 = time.perf_counter()
    _check_table(COIN_TABLE)
    _check_table(SEMICIRCLE_TABLE)
    _check_table(mp_table(F(1, 2)))
    _check_table(mp_table(F(2)))
    assert time.perf_counter() - t0 < 5.0


def test_criterion_3_six_step_chain_polynomials():
    t0 = time.perf_counter()
    c1, c2 = F(1, 10), F(5, 8)
    targets = (
        mz("(1 - z)*m - 1"),
        mz(f"z*({c1})*m^2 - (-({c1}) - z + 1)*m + 1"),
        mz(f"z^2*({c1})*m^2 + (({c1})*z + z - 1)*m + 1"),
        mz(f"(({c1})*z^2 + ({c2})*z)*m^2 + (({c1})*z + z - 1 + ({c2}))*m"
           " + 1"),
        mz(f"(({c1})*z^2 + ({c2 - 2 * c1})*z + ({c1 - c2}))*m^2"
           f" + (({c1 + 1})*z + ({c2 - c1 - 2}))*m + 1"),
        mz(f"(({c1 - c2})*z^3 + ({c2 - 2 * c1})*z^2 + ({c1})*z)*m^2"
           f" + (({2 * c1 - 2 * c2})*z^2 + ({2 - 3 * c1 + c2})*z"
           f" + ({c1 - 1}))*m + ({c1 - c2})*z + ({2 - c1})"),
    )
    for step, target in zip(_jacobi_chain(c1, c2), targets):
        _same(step.poly, target)
    assert time.perf_counter() - t0 < 5.0


def test_criterion_4_projector_compression():
    c = F(2, 5)
    compressed = oplaws.compress(_coin(), c)
    target = mz(f"(({-2 * c})*z^2 + ({2 * c})*z)*m^2"
                f" - (({-2 * c}) + ({4 * c})*z + 1 - 2*z)*m + ({2 - 2 * c})")
    _same(compressed.poly, target)
    profile = density_grid(compressed.poly)
    edge = math.sqrt(0.24)
    for endpoint in (0.5 - edge, 0.5 + edge):
        assert any(abs(e - endpoint) < 1e-6 for e in profile.support.endpoints)
    assert not profile.atoms.atoms


def test_criterion_5_moments_and_recurrences():
    mp_two = oplaws.marchenko_pastur(2)
    ms = moment_series(mp_two, 24)
    assert list(ms.coefficients[:5]) == [1, 1, 3, 11, 45]
    rec = fit_recurrence(ms, max_order=3, max_degree=2)
    assert rec == Recurrence(2, ((0, 1), (-9, -6), (3, 1)))
    assert rec.holds(list(ms.coefficients))

    sc = moment_series(oplaws.semicircle(), 16)
    assert [sc[2 * k] for k in range(9)] == CATALAN
    assert all(sc[2 * k + 1] == 0 for k in range(8))

    c = F(1, 2)
    jacobi = _jacobi_chain(c, c)[-1]
    ms = moment_series(jacobi, 5)
    assert list(ms.coefficients) == [
        1, F(1, 2), c / 8 + F(1, 4), 3 * c / 16 + F(1, 8),
        c * c / 32 + 3 * c / 16 - c ** 3 / 128 + F(1, 16),
        -5 * c ** 3 / 256 + 5 * c * c / 64 + 5 * c / 32 + F(1, 32)]
    ks = cumulant_series(jacobi, 11)
    assert ks[0] == F(1, 2) and ks[1] == c / 8
    assert Recurrence(2, ((0, c * c), (0,), (12, 4))).holds(
        list(ks.coefficients))


def test_criterion_6_density_extraction():
    profile = density_grid(oplaws.semicircle().poly, z_min=-2.5, z_max=2.5,
                           n_points=1001)
    i = int(np.argmin(np.abs(profile.grid)))
    assert profile.grid[i] == 0.0
    assert profile.density[i] == pytest.approx(1 / math.pi, abs=1e-6)

    profile = density_grid(oplaws.marchenko_pastur(2).poly, z_min=-0.5,
                           z_max=6.5, n_points=1401)
    atoms = dict(profile.atoms.atoms)
    assert set(atoms) == {0.0}
    assert atoms[0.0] == pytest.approx(0.5, abs=1e-3)
    for endpoint in ((1 - math.sqrt(2)) ** 2, (1 + math.sqrt(2)) ** 2):
        assert any(abs(e - endpoint) < 1e-9 for e in profile.support.endpoints)
    j = int(np.argmin(np.abs(profile.grid - 2.0)))
    assert profile.grid[j] == 2.0
    assert profile.density[j] == pytest.approx(0.10527, abs=1e-4)

    sc = oplaws.semicircle()
    mp2 = oplaws.marchenko_pastur(2)
    corpus = {
        "semicircle": sc,
        "mp_half": oplaws.marchenko_pastur(F(1, 2)),
        "mp_two": mp2,
        "two_point": _coin(),
        "compressed_sc": oplaws.compress(sc, F(2, 5)),
        "compressed_mp": oplaws.compress(mp2, F(7, 10)),
        "sum": oplaws.free_add(sc, oplaws.marchenko_pastur(F(1, 2))),
        "product": oplaws.free_mul(sc, mp2),
        "jacobi": _jacobi_chain(F(1, 10), F(5, 8))[-1],
        "block_diag": oplaws.block_diag(sc, mp2, F(1, 2)),
        "info_plus_noise": oplaws.info_plus_noise(oplaws.identity_atom(),
                                                  1, 1),
        "covariance_mix": oplaws.wishart_covariance(
            oplaws.atomic(AtomicSpec(((F(1, 2), 1), (F(1, 2), 2)))),
            oplaws.atomic(AtomicSpec(((F(1, 2), 1), (F(1, 2), 3)))),
            F(1, 2)),
    }
    for name, dist in corpus.items():
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            profile = density_grid(dist.poly, n_points=1000)
        elapsed = time.perf_counter() - t0
        assert profile.total_mass == pytest.approx(1.0, abs=1e-3), name
        assert elapsed < 10.0, (name, elapsed)


def test_criterion_7_root_multiset_oracle():
    import random
    rng = random.Random(20240817)
    pairs = 0
    while pairs < 20:
        a = _random_poly(rng)
        b = _random_poly(rng)
        try:
            s_companion = algops.alg_add(a, b, path="companion")
            s_resultant = algops.alg_add(a, b, path="resultant")
            p_companion = algops.alg_mul(a, b, path="companion")
            p_resultant = algops.alg_mul(a, b, path="resultant")
        except Exception:
            continue
        _check_oracle(a, b, s_companion, lambda x, y: x + y)
        _check_oracle(a, b, p_companion, lambda x, y: x * y, skip_zero=True)
        assert s_companion.equivalent(s_resultant)
        assert p_companion.equivalent(p_resultant)
        pairs += 1


def test_criterion_8_monte_carlo_regression():
    t0 = time.perf_counter()
    jacobi = "inv(shift(mulwishart(inv(mulwishart(identity, 1/10)), 5/8), 1))"
    cases = [
        ("wigner", 200, 2000),
        ("wishart(2)", 200, 2000),
        ("wigner + wishart(2)", 200, 2000),
        ("wigner * wishart(2)", 200, 2000),
        ("compress(atomic(1/2@0, 1/2@1), 2/5)", 200, 2000),
        (jacobi, 100, 4000),
    ]
    for expr, n, trials in cases:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = verify_expression(expr, n=n, trials=trials, seed=7,
                                       threshold=0.1)
        assert report["passed"], (expr, report["l1"])
        assert report["l1"] <= 0.1, (expr, report["l1"])
    assert time.perf_counter() - t0 < 3600.0


def test_criterion_9_free_convolution_closure():
    corpus = [
        oplaws.semicircle(),
        oplaws.marchenko_pastur(F(1, 2)),
        oplaws.marchenko_pastur(2),
        _coin(),
        oplaws.atomic(AtomicSpec(((F(1, 2), 1), (F(1, 2), 3)))),
    ]
    for a, b in itertools.combinations(corpus, 2):
        for op in (oplaws.free_add, oplaws.free_mul):
            out = op(a, b)
            assert out.kind == "mz"
            assert not out.poly.is_zero()
            assert out.poly == out.poly.canonicalize()
            assert out.poly.equivalent(op(b, a).poly)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                profile = density_grid(out.poly, n_points=500)
            assert profile.total_mass == pytest.approx(1.0, abs=1e-3)
