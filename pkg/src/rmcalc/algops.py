"""Addition and multiplication of algebraic functions.

Two routes compute the polynomial whose solution curves are sums (or
products) of the solution curves of two input polynomials: a Sylvester
resultant, and a companion-matrix Kronecker construction.  The companion
route is used when both inputs are the same polynomial, the resultant route
otherwise; a flag can force either for differential testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bipoly import (BiPoly, PolyMatrix, UniPoly, ZeroPolynomialError,
                     BiPolyError, VariableMismatchError)


@dataclass(frozen=True)
class CompanionMatrix:
    """Companion matrix of a BiPoly with respect to u.

    Entries are rational functions with the common denominator l_Du(v);
    ``scaled`` holds denominator * matrix, whose entries are polynomials in
    v (stored as BiPoly with u-degree 0).
    """
    size: int
    denom: BiPoly              # l_Du(v) lifted to a BiPoly
    scaled: PolyMatrix         # denom * companion matrix

    def charpoly(self):
        """det(u*I - C) as a BiPoly, up to the equivalence class."""
        return _charpoly_scaled(self.scaled, self.denom)


def companion_of(L, wrt=None):
    """Companion matrix whose eigenvalues solve L(u, v) = 0 for u(v)."""
    if wrt is not None and wrt == L.v_label:
        L = L.swap_vars()
    elif wrt is not None and wrt != L.u_label:
        raise VariableMismatchError(f"unknown variable {wrt!r}")
    du = L.degree_u
    if du < 1:
        raise BiPolyError("companion matrix needs degree >= 1 in u")
    u, v = L.u_label, L.v_label
    lead = _vpoly(L, du)
    zero = BiPoly(u, v, [])
    rows = [[zero for _ in range(du)] for _ in range(du)]
    for i in range(1, du):
        rows[i][i - 1] = lead
    for j in range(du):
        rows[j][du - 1] = -_vpoly(L, j)
    return CompanionMatrix(size=du, denom=lead, scaled=PolyMatrix(rows))


def _vpoly(L, j):
    """Coefficient of u^j as a BiPoly of u-degree 0."""
    row = L.coeff_u(j)
    return BiPoly(L.u_label, L.v_label, [list(row.coeffs)])


def _charpoly_scaled(scaled, denom):
    """det(u*denom*I - scaled); spurious denom powers drop on canonicalize."""
    n = scaled.size
    u_label = denom.u_label
    v_label = denom.v_label
    ud = BiPoly.var_u(u_label, v_label) * denom
    m = [[-scaled.entries[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        m[i][i] = m[i][i] + ud
    return PolyMatrix(m).det()


def sylvester_matrix(a_coeffs, b_coeffs):
    """Sylvester matrix of two polynomials in u given by coefficient lists
    (low power first) whose entries are BiPoly."""
    a = list(a_coeffs)
    b = list(b_coeffs)
    while a and a[-1].is_zero():
        a.pop()
    while b and b[-1].is_zero():
        b.pop()
    n, m = len(a) - 1, len(b) - 1
    if n < 1 or m < 1:
        raise BiPolyError("resultant needs degree >= 1 on both sides")
    ref = a[0]
    zero = BiPoly(ref.u_label, ref.v_label, [])
    size = n + m
    rows = [[zero] * size for _ in range(size)]
    for col in range(m):          # shifted copies of a
        for i, c in enumerate(reversed(a)):
            rows[col + i][col] = c
    for col in range(n):          # shifted copies of b
        for i, c in enumerate(reversed(b)):
            rows[col + i][m + col] = c
    return PolyMatrix(rows), n, m


def resultant_coeff_lists(a_coeffs, b_coeffs):
    """Resultant in u with the product-of-root-differences sign convention:
    lead(a)^m * lead(b)^n * prod (beta_j - alpha_i)."""
    s, n, m = sylvester_matrix(a_coeffs, b_coeffs)
    det = s.det()
    if (n * m) % 2:
        det = -det
    return det


def resultant_u(a, b):
    """Resultant of two BiPoly with respect to their u variable; the result
    is a polynomial in v (u-degree 0)."""
    a._check_labels(b)
    if a.is_zero() or b.is_zero():
        raise ZeroPolynomialError("resultant of zero polynomial")
    ac = [_vpoly(a, j) for j in range(a.degree_u + 1)]
    bc = [_vpoly(b, j) for j in range(b.degree_u + 1)]
    return resultant_coeff_lists(ac, bc)


def _shifted_diff_coeffs(L):
    """Coefficient list in u of L(t - u, v); entries are BiPoly in (t, v)
    where the t slot reuses the u label."""
    u, v = L.u_label, L.v_label
    du = L.degree_u
    out = [BiPoly(u, v, []) for _ in range(du + 1)]
    # (t - u)^j = sum_i C(j,i) (-1)^i t^(j-i) u^i
    binom = [[1]]
    for j in range(1, du + 1):
        prev = binom[-1]
        binom.append([1] + [prev[i - 1] + prev[i]
                            for i in range(1, j)] + [1])
    for j in range(du + 1):
        lj = L.coeff_u(j)
        if lj.is_zero():
            continue
        base = BiPoly(u, v, [list(lj.coeffs)])  # l_j(v), t-degree 0
        for i in range(j + 1):
            c = Fraction(binom[j][i] * (-1) ** i)
            # t^(j-i) factor
            t_pow = BiPoly.from_terms(u, v, {(j - i, 0): 1})
            out[i] = out[i] + base * t_pow * c
    return out


def _scaled_recip_coeffs(L):
    """Coefficient list in u of u^Du * L(t/u, v): coefficient of u^(Du-j)
    is l_j(v) * t^j."""
    u, v = L.u_label, L.v_label
    du = L.degree_u
    out = [BiPoly(u, v, []) for _ in range(du + 1)]
    for j in range(du + 1):
        lj = L.coeff_u(j)
        if lj.is_zero():
            continue
        out[du - j] = BiPoly.from_terms(
            u, v, {(j, k): c for k, c in enumerate(lj.coeffs) if c != 0})
    return out


def _plain_coeffs(L):
    return [_vpoly(L, j) for j in range(L.degree_u + 1)]


def _kron_add(c1, c2):
    """Scaled matrix and denominator for (C1 (x) I) + (I (x) C2)."""
    n1, n2 = c1.size, c2.size
    d1, d2 = c1.denom, c2.denom
    denom = d1 * d2
    n = n1 * n2
    zero = BiPoly(d1.u_label, d1.v_label, [])
    rows = [[zero] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            e = c1.scaled.entries[i][j] * d2
            if not e.is_zero():
                for k in range(n2):
                    rows[i * n2 + k][j * n2 + k] = \
                        rows[i * n2 + k][j * n2 + k] + e
    for k in range(n2):
        for l in range(n2):
            e = c2.scaled.entries[k][l] * d1
            if not e.is_zero():
                for i in range(n1):
                    rows[i * n2 + k][i * n2 + l] = \
                        rows[i * n2 + k][i * n2 + l] + e
    return PolyMatrix(rows), denom


def _kron_mul(c1, c2):
    """Scaled matrix and denominator for C1 (x) C2."""
    n1, n2 = c1.size, c2.size
    denom = c1.denom * c2.denom
    n = n1 * n2
    zero = BiPoly(denom.u_label, denom.v_label, [])
    rows = [[zero] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            a = c1.scaled.entries[i][j]
            if a.is_zero():
                continue
            for k in range(n2):
                for l in range(n2):
                    b = c2.scaled.entries[k][l]
                    if not b.is_zero():
                        rows[i * n2 + k][j * n2 + l] = a * b
    return PolyMatrix(rows), denom


def alg_add(l1, l2, path="auto"):
    """Polynomial whose u-solutions are sums u1(v) + u2(v)."""
    return _alg_binary(l1, l2, path, add=True)


def alg_mul(l1, l2, path="auto"):
    """Polynomial whose u-solutions are products u1(v) * u2(v)."""
    return _alg_binary(l1, l2, path, add=False)


def _alg_binary(l1, l2, path, add):
    l1._check_labels(l2)
    a = l1.canonicalize()
    b = l2.canonicalize()
    if path not in ("auto", "companion", "resultant"):
        raise ValueError(f"unknown path {path!r}")
    if path == "auto":
        path = "companion" if a == b else "resultant"
    if path == "companion":
        c1 = companion_of(a)
        c2 = companion_of(b)
        scaled, denom = _kron_add(c1, c2) if add else _kron_mul(c1, c2)
        res = _charpoly_scaled(scaled, denom)
    else:
        ac = _shifted_diff_coeffs(a) if add else _scaled_recip_coeffs(a)
        bc = _plain_coeffs(b)
        res = resultant_coeff_lists(ac, bc)
    if res.is_zero():
        raise ZeroPolynomialError("degenerate result in alg_add/alg_mul")
    return res.canonicalize()
