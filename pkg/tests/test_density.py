"""Numeric density extraction from the polynomial encoding."""

import csv
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rmcalc import oplaws
from rmcalc.density import (DensityError, density_grid, find_poles,
                            atom_weights, roots_at, support_endpoints)
from rmcalc.oplaws import AtomicSpec

from conftest import mz


def _atom_map(profile):
    return {round(x, 6): w for x, w in profile.atoms.atoms}


def test_semicircle_profile():
    p = density_grid(mz("m^2 + m*z + 1"))
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)
    assert not p.atoms.atoms
    # value at the center is 1/pi
    i = int(np.argmin(np.abs(p.grid)))
    assert p.density[i] == pytest.approx(1 / math.pi, abs=1e-3)
    # even symmetry, zero outside [-2, 2]
    outside = np.abs(p.grid) > 2.001
    assert np.all(p.density[outside] < 1e-8)


def test_marchenko_pastur_two_atom():
    p = density_grid(oplaws.marchenko_pastur(2).poly)
    atoms = _atom_map(p)
    assert set(atoms) == {0.0}
    assert atoms[0.0] == pytest.approx(0.5, abs=1e-3)
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)
    lo, hi = (1 - math.sqrt(2)) ** 2, (1 + math.sqrt(2)) ** 2
    assert any(abs(e - lo) < 1e-9 for e in p.support.endpoints)
    assert any(abs(e - hi) < 1e-9 for e in p.support.endpoints)


def test_marchenko_pastur_half_has_no_atom():
    p = density_grid(oplaws.marchenko_pastur(Fraction(1, 2)).poly)
    assert not p.atoms.atoms
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)


def test_poles_and_weights_directly():
    # equal point masses at 0 and 1: the transform has residue 1/2 poles
    L = mz("m*(2*z^2 - 2*z) - (1 - 2*z)")
    assert sorted(find_poles(L)) == pytest.approx([0.0, 1.0], abs=1e-12)
    atoms = {round(x, 6): w for x, w in atom_weights(L).atoms}
    assert atoms[0.0] == pytest.approx(0.5, abs=1e-6)
    assert atoms[1.0] == pytest.approx(0.5, abs=1e-6)


def test_support_endpoints_semicircle():
    s = support_endpoints(mz("m^2 + m*z + 1"))
    assert any(abs(e + 2) < 1e-9 for e in s.endpoints)
    assert any(abs(e - 2) < 1e-9 for e in s.endpoints)


def test_roots_at_returns_all_branches():
    roots, dropped = roots_at(mz("m^2 + m*z + 1"), 0.0)
    assert not dropped
    assert len(roots) == 2
    ims = sorted(float(x.imag) for x in roots)
    assert ims == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_compressed_projector_profile():
    d = oplaws.compress(
        oplaws.atomic(AtomicSpec(((Fraction(1, 2), 0), (Fraction(1, 2), 1)))),
        Fraction(2, 5))
    p = density_grid(d.poly)
    assert not p.atoms.atoms          # weights clamp to zero at c = 2/5
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)
    edge = math.sqrt(0.24)
    assert any(abs(e - (0.5 - edge)) < 1e-6 for e in p.support.endpoints)
    assert any(abs(e - (0.5 + edge)) < 1e-6 for e in p.support.endpoints)


def test_free_multiplication_keeps_rank_deficiency_atom():
    d = oplaws.free_mul(oplaws.semicircle(), oplaws.marchenko_pastur(2))
    with pytest.warns(UserWarning):
        p = density_grid(d.poly)
    atoms = _atom_map(p)
    assert atoms[0.0] == pytest.approx(0.5, abs=1e-3)
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)


def test_spurious_atom_candidates_are_discarded():
    # sample covariance with two-point population covariances: the curve has
    # a full-weight pole candidate at 0 that the Stieltjes branch never sees
    spec_a = oplaws.atomic(AtomicSpec(((Fraction(1, 2), 1),
                                       (Fraction(1, 2), 2))))
    spec_b = oplaws.atomic(AtomicSpec(((Fraction(1, 2), 1),
                                       (Fraction(1, 2), 3))))
    d = oplaws.wishart_covariance(spec_a, spec_b, Fraction(1, 2))
    with pytest.warns(UserWarning, match="spurious"):
        p = density_grid(d.poly)
    assert not p.atoms.atoms
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)


def test_grid_bounds_are_honored():
    p = density_grid(mz("m^2 + m*z + 1"), z_min=-1.0, z_max=1.0,
                     n_points=200)
    assert p.grid[0] >= -1.0 - 1e-12 and p.grid[-1] <= 1.0 + 1e-12


def test_csv_output(tmp_path):
    p = density_grid(oplaws.marchenko_pastur(2).poly, n_points=300)
    out = tmp_path / "mp2.csv"
    side = tmp_path / "mp2.json"
    p.to_csv(str(out), sidecar=str(side))
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["z", "f"]
    assert len(rows) - 1 == len(p.grid)
    meta = json.loads(side.read_text())
    assert meta["total_mass"] == pytest.approx(p.total_mass)
    assert meta["atoms"]


def test_degree_one_relation():
    # single point mass at 1: no continuous density at all
    p = density_grid(mz("(1 - z)*m - 1"))
    assert _atom_map(p) == {1.0: pytest.approx(1.0, abs=1e-6)}
    assert p.total_mass == pytest.approx(1.0, abs=1e-3)
    assert float(np.max(p.density)) < 1e-8
