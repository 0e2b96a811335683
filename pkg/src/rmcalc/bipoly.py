"""Exact bivariate polynomial arithmetic over the rationals.

A ``BiPoly`` is a polynomial in two named variables with ``Fraction``
coefficients, stored as a dense (Du+1) x (Dv+1) grid: entry (j, k) is the
coefficient of u^j * v^k.  All values are immutable; every operation returns
a new polynomial.  ``canonicalize`` reduces a polynomial to a square-free,
content-free representative with a deterministic sign, which is what makes
exact golden-value comparisons possible downstream.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

# Repeated resultants grow degrees multiplicatively; fail loudly instead of
# grinding on enormous exact grids.
DEGREE_CAP = 64

_ZERO = Fraction(0)
_ONE = Fraction(1)


class BiPolyError(Exception):
    pass


class VariableMismatchError(BiPolyError):
    pass


class ZeroPolynomialError(BiPolyError):
    pass


class DegreeCapError(BiPolyError):
    pass


class SingularSliceError(BiPolyError):
    pass


# ---------------------------------------------------------------------------
# univariate helpers: a polynomial is a list of Fractions, low power first
# ---------------------------------------------------------------------------

def _utrim(p):
    n = len(p)
    while n > 0 and p[n - 1] == 0:
        n -= 1
    return p[:n]


def _uadd(a, b):
    n = max(len(a), len(b))
    out = [_ZERO] * n
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _utrim(out)


def _usub(a, b):
    return _uadd(a, [-c for c in b])


def _umul(a, b):
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return _utrim(out)


def _uscale(a, s):
    if s == 0:
        return []
    return [c * s for c in a]


def _udivmod(a, b):
    """Division in Q[x]; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("univariate division by zero polynomial")
    a = list(a)
    q = [_ZERO] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    while len(_utrim(a)) >= len(b):
        a = _utrim(a)
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead
        q[shift] = coef
        for i, cb in enumerate(b):
            a[shift + i] -= coef * cb
    return _utrim(q), _utrim(a)


def _udiv_exact(a, b):
    q, r = _udivmod(a, b)
    if r:
        raise ArithmeticError("inexact univariate division")
    return q


def _uprim_int(a):
    """Clear denominators and content; integer coefficients, positive lead."""
    den = 1
    for c in a:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
    if ints and ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _ugcd(a, b):
    # primitive PRS over Z: naive Euclid over Q blows up coefficient sizes
    a, b = _utrim(list(a)), _utrim(list(b))
    if not a or not b:
        src = a or b
        return [Fraction(c) / src[-1] for c in src] if src else []
    a, b = _uprim_int(a), _uprim_int(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        # pseudo-remainder of a by b, kept integral then made primitive
        lead = b[-1]
        r = list(a)
        while len(r) >= len(b):
            shift = len(r) - len(b)
            top = r[-1]
            r = [c * lead for c in r[:-1]]
            for i, cb in enumerate(b[:-1]):
                r[shift + i] -= top * cb
            while r and r[-1] == 0:
                r.pop()
        a, b = b, _uprim_int([Fraction(c) for c in r])
    return [Fraction(c, a[-1]) for c in a]  # monic


# ---------------------------------------------------------------------------
# bivariate helpers: a "grid" is a list of rows; row j (coefficient of u^j)
# is a univariate polynomial in v
# ---------------------------------------------------------------------------

def _gtrim(rows):
    rows = [_utrim(list(r)) for r in rows]
    while rows and not rows[-1]:
        rows.pop()
    return rows


def _gis_zero(rows):
    return all(not r for r in rows)


def _gadd(a, b):
    n = max(len(a), len(b))
    out = []
    for j in range(n):
        ra = a[j] if j < len(a) else []
        rb = b[j] if j < len(b) else []
        out.append(_uadd(ra, rb))
    return _gtrim(out)


def _gneg(a):
    return [[-c for c in r] for r in a]


def _gmul(a, b):
    if _gis_zero(a) or _gis_zero(b):
        return []
    out = [[] for _ in range(len(a) + len(b) - 1)]
    for j, ra in enumerate(a):
        if not ra:
            continue
        for k, rb in enumerate(b):
            if not rb:
                continue
            out[j + k] = _uadd(out[j + k], _umul(ra, rb))
    return _gtrim(out)


def _gscale_row(a, vpoly):
    """Multiply every row by a polynomial in v."""
    return _gtrim([_umul(r, vpoly) for r in a])


def _gswap(rows):
    """Transpose the grid: exchange the roles of u and v."""
    if not rows:
        return []
    dv = max((len(r) for r in rows), default=0)
    out = [[_ZERO] * len(rows) for _ in range(dv)]
    for j, r in enumerate(rows):
        for k, c in enumerate(r):
            out[k][j] = c
    return _gtrim(out)


def _gderiv_u(rows):
    return _gtrim([_uscale(r, Fraction(j)) for j, r in enumerate(rows)][1:])


def _gpow(a, n):
    out = [[_ONE]]
    base = a
    while n:
        if n & 1:
            out = _gmul(out, base)
        base = _gmul(base, base) if n > 1 else base
        n >>= 1
    return out


def _content_v(rows):
    """gcd in Q[v] of all rows (monic), [] for the zero grid."""
    g = []
    for r in rows:
        if r:
            g = _ugcd(g, r) if g else [c / r[-1] for c in r]
        if len(g) == 1:
            break
    return g


def _gprim_v(rows):
    """Remove the common v-polynomial factor of all rows."""
    g = _content_v(rows)
    if len(g) <= 1:
        return rows
    return [_udiv_exact(r, g) if r else [] for r in rows]


def _gdiv_exact(a, b):
    """Exact division of grids viewed as polynomials in u over Q(v)."""
    a = _gtrim([list(r) for r in a])
    b = _gtrim(b)
    if _gis_zero(b):
        raise ZeroDivisionError("bivariate division by zero polynomial")
    q = [[] for _ in range(max(len(a) - len(b) + 1, 0))]
    lead = b[-1]
    while len(a) >= len(b) and not _gis_zero(a):
        shift = len(a) - len(b)
        coef = _udiv_exact(a[-1], lead)
        q[shift] = coef
        for i, rb in enumerate(b):
            a[shift + i] = _usub(a[shift + i], _umul(coef, rb))
        a = _gtrim(a)
    if not _gis_zero(a):
        raise ArithmeticError("inexact bivariate division")
    return _gtrim(q)


def _pseudo_rem(a, b):
    """Pseudo-remainder of a by b in (Q[v])[u]."""
    a = _gtrim([list(r) for r in a])
    b = _gtrim(b)
    d = len(a) - len(b)
    lead = b[-1]
    while len(a) >= len(b) and not _gis_zero(a):
        shift = len(a) - len(b)
        top = a[-1]
        a = [_umul(r, lead) for r in a[:-1]]
        while len(a) < shift + len(b) - 1:
            a.append([])
        for i, rb in enumerate(b[:-1]):
            a[shift + i] = _usub(a[shift + i], _umul(top, rb))
        a = _gtrim(a)
    return a


def _bi_gcd_u(a, b):
    """Primitive gcd of two grids in (Q[v])[u], content-normalized each step."""
    a, b = _gtrim(a), _gtrim(b)
    if _gis_zero(a):
        return _gprim_v(b)
    if _gis_zero(b):
        return _gprim_v(a)
    ca = _content_v(a)
    cb = _content_v(b)
    cg = _ugcd(ca, cb) if ca and cb else [_ONE]
    a, b = _gprim_v(a), _gprim_v(b)
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 1:  # second argument constant in u: only content survives
        g = [[_ONE]]
        if len(cg) > 1:
            g = _gscale_row(g, cg)
        return g
    while True:
        r = _pseudo_rem(a, b)
        if _gis_zero(r):
            g = b
            break
        if len(r) == 1:  # degree 0 in u: coprime apart from content
            g = [[_ONE]]
            break
        a, b = b, _gprim_v(r)
    g = _gprim_v(g)
    if len(cg) > 1:
        g = _gscale_row(g, cg)
    return g


def _slice_at(rows, v0):
    return _utrim([UniPoly(tuple(r))(v0) if r else _ZERO for r in rows])


def _res_det(a, b):
    """Resultant of two univariate Fraction polynomials via the Sylvester
    determinant, exact Gaussian elimination."""
    n, m = len(a) - 1, len(b) - 1
    size = n + m
    rows = []
    for i in range(m):
        rows.append([_ZERO] * i + list(reversed(a)) + [_ZERO] * (m - 1 - i))
    for i in range(n):
        rows.append([_ZERO] * i + list(reversed(b)) + [_ZERO] * (n - 1 - i))
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[piv], rows[col] = rows[col], rows[piv]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, size):
            f = rows[r][col] * inv
            if f:
                for c in range(col, size):
                    rows[r][c] -= f * rows[col][c]
    return det


def _coprime_witness(a_rows, b_rows):
    """True when a random slice proves gcd(a, b) = 1 in (Q[v])[u].

    A nontrivial common factor forces Res_u(a, b) to vanish identically in
    v, so a single point with nonzero resultant (and no degree drop) is an
    exact certificate.  False only means "don't know"."""
    for v0 in (Fraction(3, 7), Fraction(-5, 11), Fraction(13, 4)):
        sa = _slice_at(a_rows, v0)
        sb = _slice_at(b_rows, v0)
        if len(sa) != len(a_rows) or len(sb) != len(b_rows):
            continue
        if len(sa) < 2 or len(sb) < 2:
            continue
        if _res_det(sa, sb) != 0:
            return True
    return False


def _squarefree_u(rows):
    if len(rows) <= 2:  # degree <= 1 in u
        return rows
    d = _gderiv_u(rows)
    if _coprime_witness(rows, d):
        return rows
    g = _bi_gcd_u(rows, d)
    if len(g) == 1 and len(g[0]) <= 1:
        return rows
    return _gdiv_exact(rows, _gprim_v(g))


def _prim_both(rows):
    """Strip common v-factors of the rows and common u-factors of the
    columns.  A grid of degree 0 in a variable is left alone in the other
    direction: a polynomial in v only *is* its own u-content, and stripping
    it would erase the polynomial."""
    if len(rows) >= 2:
        rows = _gprim_v(rows)
    if max((len(r) for r in rows), default=0) >= 2:
        rows = _gswap(_gprim_v(_gswap(rows)))
    return rows


def _int_normalize(rows):
    """Scale so integer coefficients with overall content 1."""
    den = 1
    for r in rows:
        for c in r:
            den = den * c.denominator // math.gcd(den, c.denominator)
    num = 0
    for r in rows:
        for c in r:
            num = math.gcd(num, abs(c.numerator * (den // c.denominator)))
    if num == 0:
        return rows
    s = Fraction(den, num)
    return [[c * s for c in r] for r in rows]


# ---------------------------------------------------------------------------
# public types
# ---------------------------------------------------------------------------

class UniPoly(NamedTuple):
    """Univariate polynomial with Fraction coefficients, low power first."""
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return len(self.coeffs) == 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def deriv(self):
        return UniPoly(tuple(c * i for i, c in enumerate(self.coeffs))[1:])

    def real_roots(self):
        """Real roots, numerically, with exact square-free reduction first
        (repeated roots otherwise scatter off the real axis) and Newton
        polish after."""
        if self.degree <= 0:
            return []
        p = list(self.coeffs)
        g = _ugcd(p, [c * i for i, c in enumerate(p)][1:])
        if len(g) > 1:
            p = _udiv_exact(p, g)
        sf = UniPoly(tuple(p))
        cs = np.array([float(c) for c in p][::-1])
        d = sf.deriv()
        out = []
        for r in np.roots(cs):
            if abs(r.imag) > 1e-6 * (1.0 + abs(r)):
                continue
            x = float(r.real)
            for _ in range(4):
                fp = float(d(x)) if d.coeffs else 0.0
                if fp == 0.0:
                    break
                x -= float(sf(x)) / fp
            scale = max(abs(float(c)) * max(1.0, abs(x)) ** i
                        for i, c in enumerate(p))
            if abs(float(sf(x))) <= 1e-8 * scale:
                out.append(x)
        out.sort()
        dedup = []
        for x in out:
            if not dedup or abs(x - dedup[-1]) > 1e-9 * (1.0 + abs(x)):
                dedup.append(x)
        return dedup


class ComplexSlice(NamedTuple):
    """A numeric slice L(u, v0): complex coefficients low power first."""
    coeffs: np.ndarray
    degree_dropped: bool


class BiPoly:
    """Immutable exact bivariate polynomial."""

    __slots__ = ("u_label", "v_label", "_rows", "_hash")

    def __init__(self, u_label, v_label, rows):
        rows = _gtrim([[Fraction(c) for c in r] for r in rows])
        du = len(rows) - 1
        dv = max((len(r) - 1 for r in rows), default=-1)
        if du > DEGREE_CAP or dv > DEGREE_CAP:
            raise DegreeCapError(
                f"degree ({du}, {dv}) exceeds cap {DEGREE_CAP}")
        self.u_label = u_label
        self.v_label = v_label
        self._rows = tuple(tuple(r) for r in rows)
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_terms(cls, u_label, v_label, terms):
        """terms: mapping (u_power, v_power) -> coefficient."""
        if not terms:
            return cls(u_label, v_label, [])
        du = max(j for j, _ in terms)
        dv = max(k for _, k in terms)
        rows = [[_ZERO] * (dv + 1) for _ in range(du + 1)]
        for (j, k), c in terms.items():
            rows[j][k] += Fraction(c)
        return cls(u_label, v_label, rows)

    @classmethod
    def constant(cls, u_label, v_label, value):
        return cls(u_label, v_label, [[Fraction(value)]])

    @classmethod
    def var_u(cls, u_label, v_label):
        return cls(u_label, v_label, [[], [_ONE]])

    @classmethod
    def var_v(cls, u_label, v_label):
        return cls(u_label, v_label, [[_ZERO, _ONE]])

    @classmethod
    def parse(cls, text, u_label, v_label):
        """Parse expressions like '2*m^2*z - (1-c)*m + 1' with c bound.

        Only +, -, *, ^, parentheses, integers and fractions 'p/q', and the
        two variable names are supported; good enough for golden values in
        tests and the CLI.
        """
        from .textpoly import parse_poly
        return parse_poly(text, cls, u_label, v_label)

    # -- basic queries ------------------------------------------------------

    @property
    def rows(self):
        return self._rows

    @property
    def degree_u(self):
        return len(self._rows) - 1

    @property
    def degree_v(self):
        return max((len(r) - 1 for r in self._rows), default=-1)

    def is_zero(self):
        return not self._rows

    def coeff(self, j, k):
        if j >= len(self._rows) or k >= len(self._rows[j]):
            return _ZERO
        return self._rows[j][k]

    def terms(self):
        for j, r in enumerate(self._rows):
            for k, c in enumerate(r):
                if c != 0:
                    yield (j, k), c

    def _check_labels(self, other):
        if (self.u_label, self.v_label) != (other.u_label, other.v_label):
            raise VariableMismatchError(
                f"({self.u_label},{self.v_label}) vs "
                f"({other.u_label},{other.v_label})")

    def _grid(self):
        return [list(r) for r in self._rows]

    def _wrap(self, rows):
        return BiPoly(self.u_label, self.v_label, rows)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.constant(self.u_label, self.v_label, other)
        self._check_labels(other)
        return self._wrap(_gadd(self._grid(), other._grid()))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(_gneg(self._grid()))

    def __sub__(self, other):
        return self + (-other if isinstance(other, BiPoly) else -Fraction(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._wrap([[c * Fraction(other) for c in r]
                               for r in self._rows])
        self._check_labels(other)
        return self._wrap(_gmul(self._grid(), other._grid()))

    __rmul__ = __mul__

    def __pow__(self, n):
        return self._wrap(_gpow(self._grid(), n))

    def __eq__(self, other):
        return (isinstance(other, BiPoly)
                and self.u_label == other.u_label
                and self.v_label == other.v_label
                and self._rows == other._rows)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.u_label, self.v_label, self._rows))
        return self._hash

    def swap_vars(self):
        """Exchange u and v (labels travel with their powers)."""
        return BiPoly(self.v_label, self.u_label, _gswap(self._grid()))

    def relabel(self, u_label=None, v_label=None):
        return BiPoly(u_label or self.u_label, v_label or self.v_label,
                      self._grid())

    def deriv_u(self):
        return self._wrap(_gderiv_u(self._grid()))

    def deriv_v(self):
        return self.swap_vars().deriv_u().swap_vars().relabel(
            self.u_label, self.v_label)

    # -- canonical form -----------------------------------------------------

    def canonicalize(self):
        """Square-free, content-free, integer, fixed-sign representative."""
        rows = self._grid()
        if _gis_zero(rows):
            raise ZeroPolynomialError("cannot canonicalize zero polynomial")
        rows = _prim_both(rows)
        rows = _squarefree_u(rows)
        rows = _gswap(_squarefree_u(_gswap(rows)))
        rows = _prim_both(rows)
        rows = _int_normalize(rows)
        # sign: coefficient of the lexicographically largest monomial (u > v)
        if rows[-1][-1] < 0:
            rows = _gneg(rows)
        return self._wrap(rows)

    # -- substitution -------------------------------------------------------

    def substitute(self, u_map, v_map, new_u=None, new_v=None):
        """Substitute rational expressions for u and v and clear denominators.

        ``u_map`` and ``v_map`` are (numerator, denominator) pairs of BiPoly
        in the *target* variable pair.  Returns the canonicalized result, an
        equivalence-class representative of
        L(Pu/Qu, Pv/Qv) * Qu^Du * Qv^Dv.
        """
        pu, qu = u_map
        pv, qv = v_map
        tgt_u = new_u or pu.u_label
        tgt_v = new_v or pu.v_label
        for p in (pu, qu, pv, qv):
            if (p.u_label, p.v_label) != (tgt_u, tgt_v):
                raise VariableMismatchError("substitution parts disagree on "
                                            "target variables")
        if qu.is_zero() or qv.is_zero():
            raise ZeroPolynomialError("zero denominator in substitution")
        du, dv = self.degree_u, self.degree_v
        # powers, cached
        pu_p = _powers(pu, du)
        qu_p = _powers(qu, du)
        pv_p = _powers(pv, dv)
        qv_p = _powers(qv, dv)
        acc = BiPoly(tgt_u, tgt_v, [])
        for (j, k), c in self.terms():
            term = pu_p[j] * qu_p[du - j] * pv_p[k] * qv_p[dv - k]
            acc = acc + term * c
        if acc.is_zero():
            raise ZeroPolynomialError("substitution produced the zero "
                                      "polynomial")
        # Clearing denominators can leave behind factors of the denominators
        # themselves; they carry no solution curves of the original relation,
        # so peel them off (but never down to a constant).
        for q in (qu, qv):
            if q.degree_u <= 0 and q.degree_v <= 0:
                continue
            while True:
                try:
                    quo = _gdiv_exact(acc._grid(), q._grid())
                except ArithmeticError:
                    break
                cand = BiPoly(tgt_u, tgt_v, quo)
                if cand.degree_u <= 0 and cand.degree_v <= 0:
                    break
                acc = cand
        return acc.canonicalize()

    # -- numeric slices -----------------------------------------------------

    def leading_coeff_u(self):
        if self.is_zero():
            raise ZeroPolynomialError("zero polynomial")
        return UniPoly(tuple(self._rows[-1]))

    def coeff_u(self, j):
        if j >= len(self._rows):
            return UniPoly(())
        return UniPoly(tuple(self._rows[j]))

    def eval_slice(self, z0):
        """Evaluate the v variable at a complex point; poly in u remains."""
        z0 = complex(z0)
        coeffs = np.array([complex(UniPoly(tuple(r))(z0)) for r in self._rows]
                          or [0j])
        n = len(coeffs)
        while n > 0 and coeffs[n - 1] == 0:
            n -= 1
        if n == 0:
            raise SingularSliceError(f"all coefficients vanish at v={z0}")
        return ComplexSlice(coeffs[:n], degree_dropped=(n - 1 < self.degree_u))

    def discriminant_u(self):
        """Res_u(L, dL/du) as a polynomial in v, exact."""
        if self.degree_u < 2:
            raise BiPolyError("discriminant needs degree >= 2 in u")
        from .algops import resultant_u
        res = resultant_u(self, self.deriv_u())
        return res.leading_coeff_u() if res.degree_u == 0 else res  # always 0

    # -- equivalence --------------------------------------------------------

    def equivalent(self, other, tol=1e-9, n_points=8):
        """Same solution curves: canonical equality, else a root-multiset
        cross-check at rational test values of v."""
        self._check_labels(other)
        a = self.canonicalize()
        b = other.canonicalize()
        if a == b:
            return True
        if a.degree_u != b.degree_u:
            return False
        candidates = [Fraction(n, d) for n, d in
                      [(2, 3), (-1, 2), (3, 1), (-5, 3), (7, 4), (-9, 7),
                       (1, 5), (12, 7), (5, 2), (-13, 6), (8, 5), (-3, 8)]]
        checked = 0
        for v0 in candidates:
            try:
                sa = a.eval_slice(complex(v0))
                sb = b.eval_slice(complex(v0))
            except SingularSliceError:
                continue
            if sa.degree_dropped or sb.degree_dropped:
                continue
            ra = sorted(np.roots(sa.coeffs[::-1]),
                        key=lambda z: (z.real, z.imag))
            rb = sorted(np.roots(sb.coeffs[::-1]),
                        key=lambda z: (z.real, z.imag))
            if len(ra) != len(rb):
                return False
            if not _multisets_close(ra, rb, tol):
                return False
            checked += 1
            if checked >= n_points:
                break
        return checked > 0

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return json.dumps({
            "u": self.u_label,
            "v": self.v_label,
            "coeffs": [[[str(c.numerator), str(c.denominator)] for c in row]
                       for row in self._rows],
        })

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        rows = [[Fraction(int(n), int(d)) for n, d in row]
                for row in data["coeffs"]]
        return cls(data["u"], data["v"], rows)

    # -- display ------------------------------------------------------------

    def __str__(self):
        parts = []
        for (j, k), c in sorted(self.terms(), reverse=True):
            factors = []
            if abs(c) != 1 or (j == 0 and k == 0):
                factors.append(str(abs(c)))
            if j:
                factors.append(self.u_label if j == 1
                               else f"{self.u_label}^{j}")
            if k:
                factors.append(self.v_label if k == 1
                               else f"{self.v_label}^{k}")
            term = "*".join(factors)
            parts.append(("- " if c < 0 else "+ ") + term)
        if not parts:
            return "0"
        head = parts[0][2:] if parts[0][0] == "+" else "-" + parts[0][2:]
        return " ".join([head] + parts[1:])

    def __repr__(self):
        return (f"BiPoly({self.u_label!r}, {self.v_label!r}, {self})")


def _powers(p, n):
    out = [BiPoly.constant(p.u_label, p.v_label, 1)]
    for _ in range(n):
        out.append(out[-1] * p)
    return out


def _multisets_close(a, b, tol):
    used = [False] * len(b)
    for za in a:
        best, best_d = -1, tol
        for i, zb in enumerate(b):
            if used[i]:
                continue
            d = abs(za - zb)
            if d <= best_d:
                best, best_d = i, d
        if best < 0:
            return False
        used[best] = True
    return True


class PolyMatrix:
    """Square matrix with BiPoly entries; supports exact Bareiss determinant."""

    def __init__(self, entries):
        n = len(entries)
        for row in entries:
            if len(row) != n:
                raise BiPolyError("PolyMatrix must be square")
        self.entries = [list(row) for row in entries]
        self.size = n

    def det(self):
        """Fraction-free Bareiss elimination; cofactor expansion for n <= 4."""
        n = self.size
        if n == 0:
            raise BiPolyError("empty matrix")
        if n <= 4:
            return _det_cofactor(self.entries)
        m = [[e for e in row] for row in self.entries]
        sign = 1
        u, v = m[0][0].u_label, m[0][0].v_label
        prev = BiPoly.constant(u, v, 1)
        for k in range(n - 1):
            if m[k][k].is_zero():
                for i in range(k + 1, n):
                    if not m[i][k].is_zero():
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return BiPoly(u, v, [])
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                    m[i][j] = num._wrap(_gdiv_exact(num._grid(), prev._grid())) \
                        if not num.is_zero() else num
                m[i][k] = BiPoly(u, v, [])
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return d if sign > 0 else -d


def _det_cofactor(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    u, v = m[0][0].u_label, m[0][0].v_label
    acc = BiPoly(u, v, [])
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in m[1:]]
        term = m[0][j] * _det_cofactor(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc
