"""Operational laws: polynomial transformations mirroring matrix operations."""

from fractions import Fraction

import pytest

from rmcalc import oplaws
from rmcalc.oplaws import AtomicSpec, MobiusParams, OperationalLawError

from conftest import mz


def test_generators():
    assert oplaws.identity_atom().poly.equivalent(mz("(1 - z)*m - 1"))
    assert oplaws.zero_atom().poly.equivalent(mz("z*m + 1"))
    assert oplaws.semicircle().poly.equivalent(mz("m^2 + m*z + 1"))
    c = Fraction(2)
    assert oplaws.marchenko_pastur(c).poly.equivalent(
        mz("2*z*m^2 + (1 + z)*m + 1"))


def test_atomic_two_point(coin):
    assert coin.poly.equivalent(mz("m*(2*z^2 - 2*z) - (1 - 2*z)"))


def test_atomic_spec_validation():
    with pytest.raises(OperationalLawError):
        AtomicSpec(())
    with pytest.raises(OperationalLawError):
        AtomicSpec(((Fraction(1, 2), 0), (Fraction(1, 3), 1)))
    with pytest.raises(OperationalLawError):
        AtomicSpec(((Fraction(1, 2), 0), (Fraction(1, 2), 0)))
    with pytest.raises(OperationalLawError):
        AtomicSpec(((Fraction(3, 2), 0), (Fraction(-1, 2), 1)))


def test_mobius_identity_and_inverse(semicircle):
    ident = MobiusParams(1, 0, 0, 1)
    assert oplaws.mobius(semicircle, ident).poly.equivalent(semicircle.poly)
    inv = MobiusParams(0, 1, 1, 0)
    assert oplaws.mobius(semicircle, inv).poly.equivalent(
        oplaws.invert(semicircle).poly)


def test_mobius_degenerate_rejected(semicircle):
    with pytest.raises(OperationalLawError):
        MobiusParams(1, 2, 2, 4)  # ps - qr = 0


def test_invert_is_involutive(mp_two):
    assert oplaws.invert(oplaws.invert(mp_two)).poly.equivalent(mp_two.poly)


def test_scale_shift(semicircle):
    assert oplaws.scale(semicircle, 2).poly.equivalent(
        mz("4*m^2 + m*z + 1"))
    assert oplaws.shift(semicircle, 3).poly.equivalent(
        mz("m^2 + m*(z - 3) + 1"))
    assert oplaws.scale(semicircle, 1).poly.equivalent(semicircle.poly)
    # affine map agrees with the generic Mobius law
    affine = oplaws.mobius(semicircle, MobiusParams(2, 3, 0, 1))
    assert affine.poly.equivalent(
        oplaws.shift(oplaws.scale(semicircle, 2), 3).poly)


def test_square_of_semicircle_is_mp1(semicircle):
    sq = oplaws.square(semicircle)
    assert sq.poly.equivalent(oplaws.marchenko_pastur(1).poly)


def test_compress_laws(semicircle, coin):
    c = Fraction(1, 3)
    assert oplaws.compress(semicircle, 1).poly.equivalent(semicircle.poly)
    assert oplaws.compress(semicircle, c).poly.equivalent(
        mz("1/3*m^2 + m*z + 1"))
    # R-transform argument scaling composes
    twice = oplaws.compress(oplaws.compress(coin, Fraction(1, 2)),
                            Fraction(4, 5))
    once = oplaws.compress(coin, Fraction(2, 5))
    assert twice.poly.equivalent(once.poly)


def test_free_add_identities(semicircle, mp_two):
    assert oplaws.free_add(semicircle, oplaws.zero_atom()).poly.equivalent(
        semicircle.poly)
    ab = oplaws.free_add(semicircle, mp_two)
    ba = oplaws.free_add(mp_two, semicircle)
    assert ab.poly.equivalent(ba.poly)


def test_free_mul_identities(mp_two, coin):
    assert oplaws.free_mul(mp_two, oplaws.identity_atom()).poly.equivalent(
        mp_two.poly)
    ab = oplaws.free_mul(mp_two, coin)
    ba = oplaws.free_mul(coin, mp_two)
    assert ab.poly.equivalent(ba.poly)


def test_free_add_associative(semicircle, mp_half, coin):
    left = oplaws.free_add(oplaws.free_add(semicircle, mp_half), coin)
    right = oplaws.free_add(semicircle, oplaws.free_add(mp_half, coin))
    assert left.poly.equivalent(right.poly)


def test_multiply_wishart_of_identity_is_mp():
    for c in (Fraction(1, 2), Fraction(2)):
        got = oplaws.multiply_wishart(oplaws.identity_atom(), c)
        assert got.poly.equivalent(oplaws.marchenko_pastur(c).poly)


def test_wishart_covariance_identity_pair_is_mp():
    c = Fraction(1, 2)
    got = oplaws.wishart_covariance(oplaws.identity_atom(),
                                    oplaws.identity_atom(), c)
    assert got.poly.equivalent(oplaws.marchenko_pastur(c).poly)


def test_add_atomic_wishart_is_not_invertible_by_negation(semicircle):
    c = Fraction(2)
    plus = oplaws.add_atomic_wishart(semicircle, c,
                                     AtomicSpec(((Fraction(1), 1),)))
    back = oplaws.add_atomic_wishart(plus, c,
                                     AtomicSpec(((Fraction(1), -1),)))
    assert not back.poly.equivalent(semicircle.poly)


def test_block_diag_self_and_mixture(semicircle, mp_two, coin):
    same = oplaws.block_diag(semicircle, semicircle, Fraction(1, 3))
    assert same.poly.equivalent(semicircle.poly)
    mix = oplaws.block_diag(
        oplaws.atomic(AtomicSpec(((Fraction(1), 0),))),
        oplaws.atomic(AtomicSpec(((Fraction(1), 1),))),
        Fraction(1, 2))
    assert mix.poly.equivalent(coin.poly)


def test_corner_at_unit_ratio_is_identity(mp_two):
    assert oplaws.corner(mp_two, 1, 0).poly.equivalent(mp_two.poly)


def test_transpose_swap_round_trip(mp_half):
    c = Fraction(1, 2)
    once = oplaws.transpose_swap(mp_half, c)
    back = oplaws.transpose_swap(once, 1 / c)
    assert back.poly.equivalent(mp_half.poly)
    assert not once.poly.equivalent(mp_half.poly)


def test_outputs_are_canonical(semicircle, mp_two, coin):
    for dist in (oplaws.free_add(semicircle, coin),
                 oplaws.free_mul(mp_two, coin),
                 oplaws.square(coin),
                 oplaws.info_plus_noise(oplaws.identity_atom(),
                                        Fraction(1, 2), Fraction(1, 4)),
                 oplaws.compress(mp_two, Fraction(2, 5))):
        assert dist.kind == "mz"
        assert not dist.poly.is_zero()
        assert dist.poly == dist.poly.canonicalize()
