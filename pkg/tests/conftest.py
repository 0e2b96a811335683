from fractions import Fraction

import pytest

from rmcalc import oplaws
from rmcalc.bipoly import BiPoly
from rmcalc.oplaws import AtomicSpec


def mz(text):
    return BiPoly.parse(text, "m", "z")


@pytest.fixture
def semicircle():
    return oplaws.semicircle()


@pytest.fixture
def mp_half():
    return oplaws.marchenko_pastur(Fraction(1, 2))


@pytest.fixture
def mp_two():
    return oplaws.marchenko_pastur(2)


@pytest.fixture
def coin():
    # equal point masses at 0 and 1
    return oplaws.atomic(AtomicSpec(((Fraction(1, 2), 0),
                                     (Fraction(1, 2), 1))))
