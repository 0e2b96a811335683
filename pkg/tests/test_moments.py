"""Exact moment/cumulant series and P-recursive recurrence fitting."""

from fractions import Fraction

import numpy as np
import pytest

from rmcalc import oplaws
from rmcalc.density import density_grid
from rmcalc.moments import (MomentError, MomentSeries, Recurrence,
                            cumulant_series, fit_recurrence, moment_series,
                            moments_from_density)
from rmcalc.oplaws import AtomicSpec

CATALAN = [1, 1, 2, 5, 14, 42, 132, 429, 1430]


def test_marchenko_pastur_two_moments(mp_two):
    ms = moment_series(mp_two, 5)
    assert list(ms.coefficients) == [1, 1, 3, 11, 45, 197]
    assert ms.kind == "muz"


def test_semicircle_moments_are_catalan(semicircle):
    ms = moment_series(semicircle, 16)
    for k in range(8 + 1):
        assert ms[2 * k] == CATALAN[k]
    for k in range(8):
        assert ms[2 * k + 1] == 0


def test_mp_recurrence_is_found(mp_two):
    ms = moment_series(mp_two, 24)
    rec = fit_recurrence(ms, max_order=3, max_degree=2)
    assert rec is not None
    assert rec.order == 2
    assert rec.coeffs == ((0, 1), (-9, -6), (3, 1))
    assert rec.holds(list(ms.coefficients))


def test_recurrence_str_and_json():
    rec = Recurrence(2, ((0, 1), (-9, -6), (3, 1)))
    assert str(rec) == ("(n)*a(n) + (-9 - 6*n)*a(n+1) + (3 + n)*a(n+2)"
                        " = 0")
    assert Recurrence.from_json(rec.to_json()) == rec


def test_recurrence_validation():
    with pytest.raises(MomentError):
        Recurrence(2, ((1,), (1,)))       # wrong arity
    with pytest.raises(MomentError):
        Recurrence(1, ((1,), (0, 0)))     # vanishing leading coefficient


def test_moment_series_json_round_trip(mp_half):
    ms = moment_series(mp_half, 6)
    back = MomentSeries.from_json(ms.to_json())
    assert back == ms
    assert back.floats() == pytest.approx([float(c) for c in ms.coefficients])


def test_cumulants_of_mp_are_geometric():
    for c in (Fraction(1, 2), 2):
        ks = cumulant_series(oplaws.marchenko_pastur(c), 6)
        assert list(ks.coefficients) == [Fraction(c) ** n for n in range(7)]


def test_cumulants_of_semicircle(semicircle):
    ks = cumulant_series(semicircle, 6)
    assert list(ks.coefficients) == [0, 1, 0, 0, 0, 0, 0]


def test_compressed_projector_series(coin):
    c = Fraction(2, 5)
    ms = moment_series(oplaws.compress(coin, c), 3)
    assert list(ms.coefficients) == [1, Fraction(1, 2), (1 + c) / 4,
                                     (1 + 3 * c) / 8]


def test_moment_cumulant_consistency(semicircle, mp_two, coin):
    for dist in (semicircle, mp_two, coin):
        m = moment_series(dist, 2)
        k = cumulant_series(dist, 2)
        assert k[0] == m[1]
        assert k[1] == m[2] - m[1] ** 2


def test_hankel_positivity(semicircle, mp_half, mp_two, coin):
    for dist in (semicircle, mp_half, mp_two, coin):
        ms = moment_series(dist, 8)
        h = np.array([[float(ms[i + j]) for j in range(4)]
                      for i in range(4)])
        assert np.linalg.eigvalsh(h).min() > -1e-9


def test_moments_from_density_agrees(semicircle, mp_half, coin):
    for dist in (semicircle, mp_half, coin):
        profile = density_grid(dist.poly)
        ms = moment_series(dist, 5)
        got = moments_from_density(profile, 5)
        for j in range(1, 6):
            ref = float(ms[j])
            assert got[j] == pytest.approx(ref, abs=2e-2 + 1e-2 * abs(ref))


def test_fit_recurrence_rejects_random_sequence():
    coeffs = [Fraction(1)] + [Fraction(p, q) for p, q in
                              [(3, 2), (7, 5), (2, 9), (11, 4), (5, 13),
                               (17, 3), (1, 7), (23, 11), (9, 8), (4, 19),
                               (29, 6), (13, 10), (3, 17), (31, 12),
                               (8, 21), (19, 14), (5, 23), (37, 16),
                               (11, 25), (41, 18)]]
    series = MomentSeries(tuple(coeffs), "muz")
    assert fit_recurrence(series, max_order=2, max_degree=1) is None


def test_moment_series_requires_unit_mass_seed():
    from rmcalc.encodings import parse
    with pytest.raises(MomentError):
        moment_series(parse("muz", "mu - 2"), 4)


def test_jacobi_cumulant_recurrence():
    c = Fraction(1, 2)
    step = oplaws.multiply_wishart(oplaws.identity_atom(), c)
    j = oplaws.invert(oplaws.shift(
        oplaws.multiply_wishart(oplaws.invert(step), c), 1))
    ks = cumulant_series(j, 11)
    assert ks[0] == Fraction(1, 2)
    assert ks[1] == c / 8
    rec = Recurrence(2, ((0, c * c), (0,), (12, 4)))
    assert rec.holds(list(ks.coefficients))
