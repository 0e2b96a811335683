"""Operational laws: deterministic and stochastic matrix operations as
polynomial transformations.

Every law maps an encoded distribution (Stieltjes-transform kind) to another
one by substituting a rational change of variables into the polynomial, or by
combining two polynomials with the algebraic add/multiply operators.  Also
hosts the generator distributions the laws act on (atomic, semicircle,
Marchenko-Pastur).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from . import algops, encodings
from .bipoly import BiPoly, BiPolyError
from .encodings import EncodedDistribution


class OperationalLawError(BiPolyError):
    pass


@dataclass(frozen=True)
class MobiusParams:
    """Coefficients of the matrix Mobius map (pA + qI)/(rA + sI)."""
    p: Fraction
    q: Fraction
    r: Fraction
    s: Fraction

    def __post_init__(self):
        for f in ("p", "q", "r", "s"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))
        if self.r == 0 and self.s == 0:
            raise OperationalLawError("mobius denominator is identically zero")
        if self.p * self.s - self.q * self.r == 0:
            raise OperationalLawError("degenerate mobius parameters "
                                      "(ps - qr = 0)")

    def compose(self, other):
        """Parameters of self applied after other (matrix product)."""
        return MobiusParams(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s)


@dataclass(frozen=True)
class AtomicSpec:
    """A finite atomic distribution: weights p_i at locations lambda_i."""
    atoms: tuple  # of (weight, location) Fraction pairs

    def __post_init__(self):
        atoms = tuple((Fraction(w), Fraction(x)) for w, x in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise OperationalLawError("atomic distribution needs atoms")
        if any(w <= 0 or w > 1 for w, _ in atoms):
            raise OperationalLawError("atom weights must lie in (0, 1]")
        if sum(w for w, _ in atoms) != 1:
            raise OperationalLawError("atom weights must sum to 1")
        if len({x for _, x in atoms}) != len(atoms):
            raise OperationalLawError("atom locations must be distinct")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _mz(poly):
    return EncodedDistribution("mz", poly)


def _vars():
    m = BiPoly.var_u("m", "z")
    z = BiPoly.var_v("m", "z")
    one = BiPoly.constant("m", "z", 1)
    return m, z, one


def atomic(spec):
    """mz encoding of a finite atomic distribution.

    m(z) = sum p_i/(lambda_i - z), so L = prod(lambda_i - z) * m
    - sum_i p_i prod_{j != i}(lambda_j - z).
    """
    if not isinstance(spec, AtomicSpec):
        spec = AtomicSpec(tuple(spec))
    m, z, one = _vars()
    full = one
    for _, lam in spec.atoms:
        full = full * (one * lam - z)
    acc = full * m
    for i, (w, _) in enumerate(spec.atoms):
        part = one * w
        for j, (_, lam) in enumerate(spec.atoms):
            if j != i:
                part = part * (one * lam - z)
        acc = acc - part
    return _mz(acc)


def identity_atom():
    """Point mass at 1, the spectral law of the identity matrix."""
    return atomic(AtomicSpec(((1, 1),)))


def zero_atom():
    return atomic(AtomicSpec(((1, 0),)))


def semicircle():
    m, z, one = _vars()
    return _mz(m * m + m * z + one)


def marchenko_pastur(c):
    c = Fraction(c)
    if c <= 0:
        raise OperationalLawError("MP parameter must be positive")
    m, z, one = _vars()
    return _mz(c * z * m * m - (one * (1 - c) - z) * m + one)


# ---------------------------------------------------------------------------
# helper: apply a rational substitution to an mz encoding
# ---------------------------------------------------------------------------

def _subst(dist, m_map, z_map):
    dist = encodings.convert(dist, "mz")
    poly = dist.poly.substitute(m_map, z_map, new_u="m", new_v="z")
    return _mz(poly)


# ---------------------------------------------------------------------------
# deterministic laws
# ---------------------------------------------------------------------------

def mobius(dist, params):
    """Spectral law of (pA + qI)/(rA + sI)."""
    if not isinstance(params, MobiusParams):
        params = MobiusParams(*params)
    p, q, r, s = params.p, params.q, params.r, params.s
    m, z, one = _vars()
    _warn_atom_at_pole(dist, params)
    den = one * p - r * z             # p - rz
    det = s * p - r * q               # constant, nonzero by invariant
    # m_A = (m*(p - rz) - r)(p - rz)/(sp - rq) at z_A = (sz - q)/(p - rz)
    m_num = (m * den - one * r) * den
    m_den = one * det
    z_num = s * z - one * q
    return _subst(dist, (m_num, m_den), (z_num, den))


def _warn_atom_at_pole(dist, params):
    """Theorem precondition: the input has no atom at -s/r.  Checked
    opportunistically; any numerical failure falls back to caller intent."""
    if params.r == 0:
        return
    try:
        from . import density
        pole = -params.s / params.r
        L = encodings.convert(dist, "mz").poly
        for z0, w in density.atom_weights(L):
            if w > 1e-6 and abs(z0 - float(pole)) < 1e-9:
                warnings.warn(
                    f"input has an atom at {pole}, the pole of the mobius "
                    "map; the output law is unreliable there")
    except Exception:
        pass


def invert(dist):
    return mobius(dist, MobiusParams(0, 1, 1, 0))


def scale(dist, alpha):
    alpha = Fraction(alpha)
    if alpha == 0:
        raise OperationalLawError("scale by zero collapses the spectrum")
    return mobius(dist, MobiusParams(alpha, 0, 0, 1))


def shift(dist, alpha):
    return mobius(dist, MobiusParams(1, Fraction(alpha), 0, 1))


def transpose_swap(dist, c):
    """From the law of XX' (ratio c = rows/cols) to the law of X'X."""
    c = Fraction(c)
    if c <= 0:
        raise OperationalLawError("aspect ratio must be positive")
    m, z, one = _vars()
    # m_A = -(1 - 1/c)/z + m/c = (mz + 1 - c)/(cz)
    return _subst(dist, (m * z + one * (1 - c), c * z), (z, one))


def corner(dist, c, alpha):
    """Remove a scalar block alpha*I: from A = diag(B, alpha I) with
    c = dim(A)/dim(B), recover B."""
    c = Fraction(c)
    alpha = Fraction(alpha)
    if c < 1:
        raise OperationalLawError("corner ratio must be >= 1")
    m, z, one = _vars()
    # m_A = -(1/c - 1)/(alpha - z) + m/c = (m(alpha - z) - (1 - c))/(c(alpha - z))
    den = one * alpha - z
    return _subst(dist, (m * den - one * (1 - c), c * den), (z, one))


def block_diag(da, db, c):
    """Spectral law of diag(A, B) where A fills fraction c of the matrix."""
    c = Fraction(c)
    if not 0 < c < 1:
        raise OperationalLawError("block fraction must lie in (0, 1)")
    da = encodings.convert(da, "mz")
    db = encodings.convert(db, "mz")
    if da.poly == db.poly:
        # mixing identical laws returns the same law; skipping the algebraic
        # sum also avoids its extraneous mixed-branch factors
        return da
    m, z, one = _vars()
    la = _subst(da, (m, one * c), (z, one)).poly
    lb = _subst(db, (m, one * (1 - c)), (z, one)).poly
    return _mz(algops.alg_add(la, lb))


def square(dist):
    """Spectral law of A^2.

    Work in w with z = w^2: the two substituted polynomials encode the
    branches at +w and -w; their algebraic sum must be even in w and maps
    back through w^2 -> z.
    """
    dist = encodings.convert(dist, "mz")
    m = BiPoly.var_u("m", "w")
    w = BiPoly.var_v("m", "w")
    one = BiPoly.constant("m", "w", 1)
    l1 = dist.poly.substitute((2 * m * w, one), (w, one),
                              new_u="m", new_v="w")
    l2 = dist.poly.substitute((-2 * m * w, one), (-w, one),
                              new_u="m", new_v="w")
    summed = algops.alg_add(l1, l2).canonicalize()
    terms = {}
    for (j, k), coef in summed.terms():
        if k % 2:
            raise OperationalLawError(
                "square law produced an odd power of the working variable; "
                f"got {summed}")
        terms[(j, k // 2)] = coef
    return _mz(BiPoly.from_terms("m", "z", terms))


# ---------------------------------------------------------------------------
# stochastic laws
# ---------------------------------------------------------------------------

def add_atomic_wishart(dist, c, spec):
    """Spectral law of A + G'TG for atomic T, with c the Wishart ratio."""
    c = Fraction(c)
    if not isinstance(spec, AtomicSpec):
        spec = AtomicSpec(tuple(spec))
    m, z, one = _vars()
    # alpha_m = c * sum p_i lambda_i/(1 + lambda_i m); shift z by alpha_m
    den = one
    for _, lam in spec.atoms:
        den = den * (one + lam * m)
    num = BiPoly("m", "z", [])
    for i, (wgt, lam) in enumerate(spec.atoms):
        part = one * (c * wgt * lam)
        for j, (_, lam2) in enumerate(spec.atoms):
            if j != i:
                part = part * (one + lam2 * m)
        num = num + part
    if num.is_zero():  # all atoms at zero: nothing added
        return encodings.convert(dist, "mz")
    return _subst(dist, (m, one), (z * den - num, den))


def multiply_wishart(dist, c):
    """Spectral law of W(c)^{1/2} A W(c)^{1/2} (equivalently A x W(c))."""
    c = Fraction(c)
    if c <= 0:
        raise OperationalLawError("Wishart ratio must be positive")
    m, z, one = _vars()
    alpha = one * (1 - c) - c * z * m
    return _subst(dist, (alpha * m, one), (z, alpha))


def info_plus_noise(dist, c, s):
    """Spectral law of (A^{1/2} + sqrt(s) G)(A^{1/2} + sqrt(s) G)'."""
    c = Fraction(c)
    s = Fraction(s)
    if s < 0:
        raise OperationalLawError("noise variance must be nonnegative")
    if s == 0:
        return encodings.convert(dist, "mz")
    m, z, one = _vars()
    alpha = one + s * c * m
    return _subst(dist, (m, alpha), (alpha * alpha * z + alpha * (s * (c - 1)), one))


def free_add(da, db):
    """Free additive convolution: R transforms add."""
    ra = encodings.convert(da, "rg").poly
    rb = encodings.convert(db, "rg").poly
    summed = algops.alg_add(ra, rb)
    return encodings.convert(EncodedDistribution("rg", summed), "mz")


def free_mul(da, db):
    """Free multiplicative convolution: S transforms multiply."""
    sa = encodings.convert(da, "sy").poly
    sb = encodings.convert(db, "sy").poly
    prod = algops.alg_mul(sa, sb)
    return encodings.convert(EncodedDistribution("sy", prod), "mz")


def compress(dist, c):
    """Spectral law of the leading c-fraction corner block, rescaled: the
    R transform argument contracts, r(g) -> r(c g)."""
    c = Fraction(c)
    if not 0 < c <= 1:
        raise OperationalLawError("compression fraction must lie in (0, 1]")
    rg = encodings.convert(dist, "rg").poly
    r = BiPoly.var_u("r", "g")
    g = BiPoly.var_v("r", "g")
    one = BiPoly.constant("r", "g", 1)
    sub = rg.substitute((r, one), (c * g, one), new_u="r", new_v="g")
    return encodings.convert(EncodedDistribution("rg", sub), "mz")


def wishart_covariance(da, db, c):
    """Doubly correlated sample covariance A^{1/2} G B G' A^{1/2} with
    G of aspect ratio c.

    G'G is Wishart-like with the reciprocal ratio, scaled by c; compose
    through the transposed product.  Fixed by the degenerate case B = I,
    which must reduce to multiply_wishart(A, c).
    """
    c = Fraction(c)
    if c <= 0:
        raise OperationalLawError("aspect ratio must be positive")
    gram = scale(marchenko_pastur(1 / c), c)        # law of G'G
    t_tilde = free_mul(db, gram)                    # B^{1/2} G'G B^{1/2}
    t = transpose_swap(t_tilde, 1 / c)              # G B G'
    return free_mul(da, t)                          # A^{1/2} G B G' A^{1/2}
