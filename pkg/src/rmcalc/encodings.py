"""Encodings of a spectral distribution as bivariate polynomials.

A distribution is carried around as the polynomial relation satisfied by one
of six transforms: the Stieltjes transform m(z), the Cauchy transform g(z),
the R-transform r(g), the S-transform s(y), and the moment and eta series
mu(z) and eta(z).  Every encoding is a BiPoly in a fixed variable pair;
``convert`` moves between encodings through the mz hub by substituting the
known rational change of variables and clearing denominators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bipoly import BiPoly, BiPolyError

KIND_LABELS = {
    "mz": ("m", "z"),
    "gz": ("g", "z"),
    "rg": ("r", "g"),
    "sy": ("s", "y"),
    "muz": ("mu", "z"),
    "etaz": ("eta", "z"),
}


class EncodingError(BiPolyError):
    pass


@dataclass(frozen=True)
class EncodedDistribution:
    """A distribution as (encoding kind, canonical polynomial)."""
    kind: str
    poly: BiPoly

    def __post_init__(self):
        if self.kind not in KIND_LABELS:
            raise EncodingError(f"unknown encoding kind {self.kind!r}")
        u, v = KIND_LABELS[self.kind]
        if (self.poly.u_label, self.poly.v_label) != (u, v):
            raise EncodingError(
                f"{self.kind} encoding needs variables ({u}, {v}), got "
                f"({self.poly.u_label}, {self.poly.v_label})")
        object.__setattr__(self, "poly", self.poly.canonicalize())

    def equivalent(self, other, tol=1e-9):
        if self.kind != other.kind:
            other = convert(other, self.kind)
        return self.poly.equivalent(other.poly, tol=tol)

    def __str__(self):
        return f"[{self.kind}] {self.poly}"


def from_poly(kind, poly):
    """Wrap a BiPoly whose labels may not yet match the encoding's pair."""
    u, v = KIND_LABELS[kind]
    return EncodedDistribution(kind, poly.relabel(u, v))


def parse(kind, text):
    u, v = KIND_LABELS[kind]
    return EncodedDistribution(kind, BiPoly.parse(text, u, v))


def _pair(u_label, v_label):
    """(u, v, one) building blocks in a target variable pair."""
    return (BiPoly.var_u(u_label, v_label),
            BiPoly.var_v(u_label, v_label),
            BiPoly.constant(u_label, v_label, 1))


# Each hop substitutes the source variables as rational functions of the
# target ones.  Maps are (numerator, denominator) pairs.

def _mz_to(kind, L):
    u, v, one = _pair(*KIND_LABELS[kind])
    if kind == "gz":
        maps = ((-u, one), (v, one))                      # m = -g
    elif kind == "sy":
        maps = ((-v * u, one), (v + one, u * v))          # m = -ys, z = (y+1)/(sy)
    elif kind == "muz":
        maps = ((-v * u, one), (one, v))                  # m = -z*mu, z = 1/z
    elif kind == "etaz":
        maps = ((v * u, one), (-one, v))                  # m = z*eta, z = -1/z
    else:
        raise EncodingError(f"no direct hop mz -> {kind}")
    return L.substitute(*maps, new_u=u.u_label, new_v=u.v_label)


def _to_mz(kind, L):
    u, v, one = _pair(*KIND_LABELS["mz"])
    if kind == "gz":
        maps = ((-u, one), (v, one))                      # g = -m
    elif kind == "sy":
        maps = ((u, v * u + one), (-v * u - one, one))    # s = m/(zm+1), y = -zm-1
    elif kind == "muz":
        maps = ((-v * u, one), (one, v))                  # mu = -z*m, z = 1/z
    elif kind == "etaz":
        maps = ((-v * u, one), (-one, v))                 # eta = -z*m, z = -1/z
    else:
        raise EncodingError(f"no direct hop {kind} -> mz")
    return L.substitute(*maps, new_u=u.u_label, new_v=u.v_label)


def _gz_to_rg(L):
    u, v, one = _pair(*KIND_LABELS["rg"])
    # g stays (becomes the v variable), z = r + 1/g
    return L.substitute((v, one), (u * v + one, v),
                        new_u=u.u_label, new_v=u.v_label)


def _rg_to_gz(L):
    u, v, one = _pair(*KIND_LABELS["gz"])
    # r = z - 1/g, g stays (was the v variable)
    return L.substitute((v * u - one, u), (u, one),
                        new_u=u.u_label, new_v=u.v_label)


def convert(dist, target):
    """Convert an encoded distribution to another encoding kind."""
    if target not in KIND_LABELS:
        raise EncodingError(f"unknown encoding kind {target!r}")
    if dist.kind == target:
        return dist
    kind, L = dist.kind, dist.poly
    # walk to mz
    if kind == "rg":
        L = _rg_to_gz(L)
        kind = "gz"
    if kind != "mz":
        L = _to_mz(kind, L)
        kind = "mz"
    if target == "mz":
        return EncodedDistribution("mz", L)
    if target == "rg":
        return EncodedDistribution("rg", _gz_to_rg(_mz_to("gz", L)))
    return EncodedDistribution(target, _mz_to(target, L))
