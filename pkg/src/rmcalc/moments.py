"""Exact moment and free-cumulant series, and recurrences they satisfy.

The moment generating function mu(z) = sum M_j z^j of a distribution is an
algebraic function: plugging a truncated series into its polynomial relation
and solving order by order yields the M_j as exact rationals.  The same
machinery applied to the R-transform relation gives the free cumulants.
Coefficient sequences of algebraic functions satisfy linear recurrences with
polynomial coefficients; ``fit_recurrence`` recovers the smallest one by
exact linear algebra and verifies it on held-out terms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bipoly import UniPoly
from .encodings import EncodedDistribution, convert

_MAX_BRANCHES = 16


class MomentError(Exception):
    pass


@dataclass(frozen=True)
class MomentSeries:
    """Leading coefficients of mu(z) (kind "muz") or r(g) (kind "rg")."""
    coefficients: tuple
    kind: str

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if self.kind not in ("muz", "rg"):
            raise MomentError(f"unknown series kind {self.kind!r}")
        if self.kind == "muz" and coeffs and coeffs[0] != 1:
            raise MomentError("moment series must start at M_0 = 1")

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def floats(self):
        return [float(c) for c in self.coefficients]

    def to_json(self):
        return {"kind": self.kind,
                "coefficients": [str(c) for c in self.coefficients]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(Fraction(c) for c in data["coefficients"]),
                   data["kind"])


@dataclass(frozen=True)
class Recurrence:
    """sum_i P_i(n) a(n+i) = 0 with polynomial coefficients P_i.

    ``coeffs[i]`` holds P_i as Fraction coefficients, low power of n first.
    """
    order: int
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(tuple(Fraction(c) for c in p) for p in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        if len(cs) != self.order + 1:
            raise MomentError("recurrence needs order+1 coefficient polys")
        if not any(cs[-1]):
            raise MomentError("leading recurrence coefficient vanishes")

    def degree(self):
        return max((len(p) - 1 for p in self.coeffs if any(p)), default=0)

    def _poly_at(self, i, n):
        return sum(c * n ** k for k, c in enumerate(self.coeffs[i]))

    def holds_at(self, seq, n):
        """Exact check of the recurrence at index n of a sequence."""
        return sum(self._poly_at(i, n) * Fraction(seq[n + i])
                   for i in range(self.order + 1)) == 0

    def holds(self, seq):
        return all(self.holds_at(seq, n)
                   for n in range(len(seq) - self.order))

    def to_json(self):
        return {"order": self.order,
                "coeffs": [[str(c) for c in p] for p in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        return cls(data["order"],
                   tuple(tuple(Fraction(c) for c in p)
                         for p in data["coeffs"]))

    def __str__(self):
        def poly(p):
            terms = []
            for k, c in enumerate(p):
                if c == 0:
                    continue
                if k == 0:
                    terms.append(str(c))
                elif c == 1:
                    terms.append("n" if k == 1 else f"n^{k}")
                else:
                    terms.append(f"{c}*n" if k == 1 else f"{c}*n^{k}")
            return " + ".join(terms).replace("+ -", "- ") or "0"
        parts = [f"({poly(p)})*a(n+{i})" if i else f"({poly(p)})*a(n)"
                 for i, p in enumerate(self.coeffs) if any(p)]
        return " + ".join(parts) + " = 0"


# ---------------------------------------------------------------------------
# order-by-order series solving
# ---------------------------------------------------------------------------

def _zrows(L):
    """Fraction coefficient rows: _zrows(L)[j][k] multiplies u^j z^k."""
    return [list(L.coeff_u(j).coeffs) for j in range(L.degree_u + 1)]


def _series_mul(a, b, trunc):
    out = [Fraction(0)] * min(trunc, len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0 or i >= trunc:
            continue
        for j, y in enumerate(b):
            if i + j >= trunc:
                break
            out[i + j] += x * y
    return out


def _eval_series(rows, s, trunc):
    """L(s(z), z) as a truncated series; s is a Fraction coefficient list."""
    acc = [Fraction(0)] * trunc
    power = [Fraction(1)]
    for j, row in enumerate(rows):
        if j > 0:
            power = _series_mul(power, s, trunc)
        for k, c in enumerate(row):
            if c == 0 or k >= trunc:
                continue
            for i, p in enumerate(power):
                if k + i >= trunc:
                    break
                acc[k + i] += c * p
    return acc


def _rational_roots(coeffs):
    """All rational roots of a Fraction-coefficient polynomial."""
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // _gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    if len(ints) <= 1:
        return []
    roots = []
    val = 0
    while val < len(ints) and ints[val] == 0:
        val += 1
    if val:
        roots.append(Fraction(0))
        ints = ints[val:]
    a0, ae = abs(ints[0]), abs(ints[-1])
    for p in _divisors(a0):
        for q in _divisors(ae):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if cand in roots:
                    continue
                if _horner(ints, cand) == 0:
                    roots.append(cand)
    return roots


def _horner(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n):
    n = abs(n)
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _solve_linear(rows, seed, n_terms, trunc):
    """Fast path: the seed is a simple root, every later coefficient solves
    a linear equation with the same pivot dL/du at the seed."""
    pivot = sum(j * row[0] * seed ** (j - 1) if row else 0
                for j, row in enumerate(_pad0(rows)) if j >= 1)
    s = [seed]
    for n in range(1, n_terms):
        s.append(Fraction(0))
        residual = _eval_series(rows, s, trunc)
        s[n] = -residual[n] / pivot
    return s


def _pad0(rows):
    return [row if row else [Fraction(0)] for row in rows]


def _mpoly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _branch_solve(rows, prefix, n_terms, trunc, budget):
    """Seed lifting when the determining equation degenerates: at each
    order the unknown coefficient enters polynomially; every rational root
    spawns a branch.  Returns all completed coefficient lists."""
    if len(prefix) >= n_terms:
        return [list(prefix)]
    n = len(prefix)
    # series whose coefficients are polynomials in the unknown M
    s = [[c] for c in prefix] + [[Fraction(0), Fraction(1)]]
    acc = [[Fraction(0)] for _ in range(trunc)]
    power = [[Fraction(1)]]
    for j, row in enumerate(rows):
        if j > 0:
            new = [[Fraction(0)] for _ in range(trunc)]
            for i, p in enumerate(power):
                if not any(p):
                    continue
                for k, q in enumerate(s):
                    if i + k >= trunc:
                        break
                    prod = _mpoly_mul(p, q)
                    tgt = new[i + k]
                    tgt.extend([Fraction(0)] * (len(prod) - len(tgt)))
                    for t, c in enumerate(prod):
                        tgt[t] += c
            power = new
        for k, c in enumerate(row):
            if c == 0 or k >= trunc:
                continue
            for i, p in enumerate(power):
                if k + i >= trunc:
                    break
                tgt = acc[k + i]
                tgt.extend([Fraction(0)] * (len(p) - len(tgt)))
                for t, pc in enumerate(p):
                    tgt[t] += pc * c
    for k in range(trunc):
        g = acc[k]
        while g and g[-1] == 0:
            g.pop()
        if not g:
            continue
        if len(g) == 1:
            return []          # nonzero constant term: inconsistent prefix
        out = []
        for root in _rational_roots([Fraction(c) for c in g]):
            if budget[0] <= 0:
                raise MomentError("too many candidate series branches")
            budget[0] -= 1
            out.extend(_branch_solve(rows, prefix + [root], n_terms,
                                     trunc, budget))
        return out
    raise MomentError("series solver ran out of precision")


def _solve_series(L, seeds, n_terms):
    """All truncated power-series solutions u(v) of L with u(0) in seeds."""
    rows = _zrows(L)
    trunc = n_terms + max(len(r) for r in rows) + L.degree_u + 4
    solutions = []
    for seed in seeds:
        deriv = sum(j * Fraction(row[0] if row else 0) * seed ** (j - 1)
                    for j, row in enumerate(rows) if j >= 1)
        if deriv != 0:
            solutions.append(_solve_linear(rows, seed, n_terms, trunc))
        else:
            solutions.extend(_branch_solve(rows, [seed], n_terms, trunc,
                                           [_MAX_BRANCHES]))
    # drop candidates that fail the full relation and exact duplicates
    out = []
    for s in solutions:
        if any(_eval_series(rows, s, n_terms)):
            continue
        if s not in out:
            out.append(s)
    return out


def moment_series(dist, n):
    """First n+1 moments M_0..M_n of an encoded distribution, exactly.

    Solves the moment generating function relation order by order with the
    normalization mu(0) = 1; even-moment positivity breaks ties when the
    seed is a multiple root with several integral lifts.
    """
    L = convert(dist, "muz").poly
    g0 = UniPoly(tuple(_horner_col(L, j) for j in range(L.degree_u + 1)))
    if _horner(list(g0.coeffs), Fraction(1)) != 0:
        raise MomentError(
            "no series branch with mu(0) = 1; the distribution may lack "
            "moments or the encoding degenerates at z = 0")
    candidates = _solve_series(L, [Fraction(1)], n + 1)
    if not candidates:
        raise MomentError("no power-series branch through mu(0) = 1")
    if len(candidates) > 1:
        positive = [s for s in candidates
                    if all(c >= 0 for c in s[::2])]
        if positive:
            candidates = positive
        if len(candidates) > 1:
            warnings.warn("ambiguous moment series; picking the first of "
                          f"{len(candidates)} candidates")
    return MomentSeries(tuple(candidates[0]), "muz")


def _horner_col(L, j):
    row = L.coeff_u(j).coeffs
    return row[0] if row else Fraction(0)


def cumulant_series(dist, n):
    """First n+1 free cumulants K_1..K_{n+1} as the series r(g).

    The seed K_1 comes from the rational roots of the R-transform relation
    at g = 0; when several admissible series exist the one whose K_1
    matches the first moment wins.
    """
    L = convert(dist, "rg").poly
    g0 = [_horner_col(L, j) for j in range(L.degree_u + 1)]
    seeds = _rational_roots([Fraction(c) for c in g0])
    if not seeds:
        raise MomentError("no rational seed for the cumulant series")
    candidates = _solve_series(L, seeds, n + 1)
    if not candidates:
        raise MomentError("no power-series branch for the R-transform")
    if len(candidates) > 1:
        try:
            m1 = moment_series(dist, 1)[1]
            matching = [s for s in candidates if s[0] == m1]
            if matching:
                candidates = matching
        except MomentError:
            pass
        if len(candidates) > 1:
            warnings.warn("ambiguous cumulant series; picking the first of "
                          f"{len(candidates)} candidates")
    return MomentSeries(tuple(candidates[0]), "rg")


# ---------------------------------------------------------------------------
# recurrence fitting
# ---------------------------------------------------------------------------

_HOLDOUT = 8


def fit_recurrence(series, max_order, max_degree):
    """Smallest exact recurrence sum P_i(n) a(n+i) = 0 fitting a series.

    Fits on all but the last 8 coefficients and must reproduce those 8 as
    well; returns None when no recurrence exists within the bounds.
    Coefficients are normalized to coprime integers with the leading
    polynomial's top coefficient positive.
    """
    seq = [Fraction(c) for c in series.coefficients] \
        if isinstance(series, MomentSeries) else [Fraction(c) for c in series]
    for order in range(1, max_order + 1):
        for degree in range(0, max_degree + 1):
            need = (order + 1) * (degree + 1) + order + _HOLDOUT
            if len(seq) < need:
                continue
            rec = _try_fit(seq, order, degree)
            if rec is not None:
                return rec
    return None


def _try_fit(seq, order, degree):
    n_fit = len(seq) - _HOLDOUT - order
    cols = (order + 1) * (degree + 1)
    if n_fit < cols:
        return None
    rows = []
    for n in range(n_fit):
        row = []
        for i in range(order + 1):
            for k in range(degree + 1):
                row.append(Fraction(n) ** k * seq[n + i])
        rows.append(row)
    basis = _nullspace(rows, cols)
    for vec in basis:
        coeffs = tuple(tuple(vec[i * (degree + 1) + k]
                             for k in range(degree + 1))
                       for i in range(order + 1))
        if not any(coeffs[-1]):
            continue
        rec = Recurrence(order, _normalize_rec(coeffs))
        if rec.holds(seq):
            return rec
    return None


def _normalize_rec(coeffs):
    lcm = 1
    for p in coeffs:
        for c in p:
            lcm = lcm * c.denominator // _gcd(lcm, c.denominator)
    ints = [[c * lcm for c in p] for p in coeffs]
    content = 0
    for p in ints:
        for c in p:
            content = _gcd(content, int(c))
    content = content or 1
    lead = next(c for c in reversed(ints[-1]) if c != 0)
    sign = -1 if lead < 0 else 1
    return tuple(tuple(Fraction(int(c), sign * content) for c in p)
                 for p in ints)


def _nullspace(rows, cols):
    """Basis of the exact nullspace of a Fraction matrix."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * cols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -mat[i][f]
        basis.append(vec)
    return basis


def moments_from_density(profile, k):
    """Numeric moments int x^j f(x) dx + atom contributions for j <= k."""
    out = []
    x, f = profile.grid, profile.density
    for j in range(k + 1):
        val = float(np.trapezoid(x ** j * f, x))
        val += sum(w * z0 ** j for z0, w in profile.atoms.atoms)
        out.append(val)
    return out
