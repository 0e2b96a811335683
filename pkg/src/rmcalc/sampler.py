"""Monte Carlo verification of the symbolic pipeline.

Realizes finite random matrices for an ensemble expression, computes their
spectra with an in-package symmetric eigensolver (Householder reduction to
tridiagonal form, then implicit-shift QL), and compares the aggregated
eigenvalue histogram against a symbolic DensityProfile via L1 and KS
distances.

Randomness is counter-based: each (seed, trial) pair keys an independent
Philox stream, so trials are reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import dsl
from .density import DensityProfile


class SamplerError(Exception):
    pass


# ---------------------------------------------------------------------------
# symmetric eigensolver
# ---------------------------------------------------------------------------

@njit(cache=True)
def _tridiagonalize(a, vectors):
    """Householder reduction of symmetric a (overwritten) to tridiagonal
    (d, e); if vectors, a accumulates the orthogonal transform."""
    n = a.shape[0]
    d = np.zeros(n)
    e = np.zeros(n)
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(l + 1):
                scale += abs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(l + 1):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(l + 1):
                    if vectors:
                        a[j, i] = a[i, j] / h
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, l + 1):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(l + 1):
                    f = a[i, j]
                    g = e[j] - hh * f
                    e[j] = g
                    for k in range(j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        if vectors:
            l = i
            if d[i] != 0.0:
                for j in range(l):
                    g = 0.0
                    for k in range(l):
                        g += a[i, k] * a[k, j]
                    for k in range(l):
                        a[k, j] -= g * a[k, i]
            d[i] = a[i, i]
            a[i, i] = 1.0
            for j in range(l):
                a[j, i] = 0.0
                a[i, j] = 0.0
        else:
            d[i] = a[i, i]
    return d, e


@njit(cache=True)
def _ql_implicit(d, e, z, vectors):
    """Implicit-shift QL on a tridiagonal (d, e); eigenvalues land in d and,
    if vectors, columns of z rotate along."""
    n = d.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 1e-300 or abs(e[m]) <= 2.3e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 50:
                return False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            sgn = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sgn)
            s = 1.0
            c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if vectors:
                    for k in range(n):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return True


def _sym_eig(matrix, vectors=False):
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SamplerError("eigensolver needs a square matrix")
    if not np.allclose(a, a.T, atol=1e-10 * (1 + np.abs(a).max())):
        raise SamplerError("eigensolver needs a symmetric matrix")
    a = (a + a.T) / 2.0
    d, e = _tridiagonalize(a, vectors)
    ok = _ql_implicit(d, e, a, vectors)
    if not ok:
        raise SamplerError("eigensolver failed to converge")
    order = np.argsort(d)
    if vectors:
        return d[order], a[:, order]
    return d[order], None


def eigenvalues_sym(matrix):
    """Eigenvalues of a symmetric real matrix, ascending."""
    return _sym_eig(matrix, vectors=False)[0]


def _scalar_func(matrix, func):
    """Apply a scalar function through the eigendecomposition."""
    vals, vecs = _sym_eig(matrix, vectors=True)
    fv = np.array([func(x) for x in vals])
    return (vecs * fv) @ vecs.T


def _sqrtm_psd(matrix):
    vals, vecs = _sym_eig(matrix, vectors=True)
    # tiny negatives are roundoff from a psd ensemble
    if vals.min() < -1e-8 * max(1.0, abs(vals.max())):
        raise SamplerError("matrix square root of an indefinite matrix")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def _haar(rng, n):
    """Haar orthogonal matrix: QR of a Gaussian with R-sign fix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _atomic_diag(spec, n, rng):
    weights = np.array([float(w) for w, _ in spec.atoms])
    locs = [float(x) for _, x in spec.atoms]
    counts = np.floor(weights * n).astype(int)
    # largest remainders take the leftover slots
    rem = weights * n - counts
    for i in np.argsort(-rem)[: n - counts.sum()]:
        counts[i] += 1
    vals = np.concatenate([np.full(k, x) for k, x in zip(counts, locs)])
    return np.diag(vals)


# ---------------------------------------------------------------------------
# ensemble realization
# ---------------------------------------------------------------------------

def realize(expr, n, rng):
    """One n x n matrix realization of an ensemble expression."""
    if isinstance(expr, dsl.Identity):
        return np.eye(n)
    if isinstance(expr, dsl.Atomic):
        return _atomic_diag(expr.spec, n, rng)
    if isinstance(expr, dsl.Wigner):
        y = rng.standard_normal((n, n))
        return (y + y.T) / math.sqrt(2 * n)
    if isinstance(expr, dsl.Wishart):
        l = max(1, round(n / expr.c))
        g = rng.standard_normal((n, l)) / math.sqrt(l)
        return g @ g.T
    if isinstance(expr, dsl.Mobius):
        p, q, r, s = (float(expr.p), float(expr.q),
                      float(expr.r), float(expr.s))
        return _scalar_func(realize(expr.child, n, rng),
                            lambda x: (p * x + q) / (r * x + s))
    if isinstance(expr, dsl.Inv):
        return _scalar_func(realize(expr.child, n, rng), lambda x: 1.0 / x)
    if isinstance(expr, dsl.Scale):
        return float(expr.alpha) * realize(expr.child, n, rng)
    if isinstance(expr, dsl.Shift):
        return realize(expr.child, n, rng) + float(expr.alpha) * np.eye(n)
    if isinstance(expr, dsl.Square):
        a = realize(expr.child, n, rng)
        return a @ a
    if isinstance(expr, dsl.BlockDiag):
        n1 = max(1, min(n - 1, round(n * expr.c)))
        out = np.zeros((n, n))
        out[:n1, :n1] = realize(expr.a, n1, rng)
        out[n1:, n1:] = realize(expr.b, n - n1, rng)
        return out
    if isinstance(expr, dsl.Corner):
        # child is diag(B, alpha I) in law; strip the eigenvalues nearest
        # alpha and re-rotate the rest
        big = max(n + 1, round(n * expr.c))
        vals = eigenvalues_sym(realize(expr.child, big, rng))
        drop = np.argsort(np.abs(vals - float(expr.alpha)))[: big - n]
        keep = np.delete(vals, drop)
        q = _haar(rng, n)
        return (q * keep) @ q.T
    if isinstance(expr, dsl.AddAtomicWishart):
        a = realize(expr.child, n, rng)
        l = max(1, round(n * expr.c))
        g = rng.standard_normal((n, l)) / math.sqrt(n)
        t = _atomic_diag(expr.spec, l, rng)
        return a + g @ t @ g.T
    if isinstance(expr, dsl.MulWishart):
        sa = _sqrtm_psd(realize(expr.child, n, rng))
        l = max(1, round(n / expr.c))
        g = rng.standard_normal((n, l)) / math.sqrt(l)
        return sa @ (g @ g.T) @ sa
    if isinstance(expr, dsl.InfoPlusNoise):
        l = max(n, round(n / expr.c))
        sa = _sqrtm_psd(realize(expr.child, n, rng))
        x = np.zeros((n, l))
        x[:, :n] = sa * math.sqrt(l)
        x = (x + math.sqrt(float(expr.s)) * rng.standard_normal((n, l)))
        x /= math.sqrt(l)
        return x @ x.T
    if isinstance(expr, dsl.FreeAdd):
        a = realize(expr.a, n, rng)
        b = realize(expr.b, n, rng)
        q = _haar(rng, n)
        return a + q @ b @ q.T
    if isinstance(expr, dsl.FreeMul):
        a = realize(expr.a, n, rng)
        q = _haar(rng, n)
        b = q @ realize(expr.b, n, rng) @ q.T
        # symmetrize around whichever factor is positive semidefinite
        try:
            sa = _sqrtm_psd(a)
            return sa @ b @ sa
        except SamplerError:
            sb = _sqrtm_psd(b)
            return sb @ a @ sb
    if isinstance(expr, dsl.Compress):
        big = max(n + 1, round(n / expr.c))
        a = realize(expr.child, big, rng)
        q = _haar(rng, big)
        return (q @ a @ q.T)[:n, :n]
    if isinstance(expr, dsl.WishartCov):
        l = max(1, round(n / expr.c))
        sa = _sqrtm_psd(realize(expr.a, n, rng))
        b = realize(expr.b, l, rng)
        g = rng.standard_normal((n, l)) / math.sqrt(l)
        return sa @ (g @ b @ g.T) @ sa
    if isinstance(expr, dsl.TransposeSwap):
        raise SamplerError("transposeswap has no direct matrix realization")
    raise SamplerError(f"unsupported expression node {type(expr).__name__}")


@dataclass(frozen=True)
class EnsembleSample:
    dimension: int
    eigenvalues: np.ndarray
    seed: int
    descriptor: object

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", ev)
        if len(ev) != self.dimension:
            raise SamplerError("eigenvalue count does not match dimension")
        if not np.all(np.isfinite(ev)):
            raise SamplerError("non-finite eigenvalues in sample")


def _rng_for(seed, trial):
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def sample_ensemble(expr, n, seed, trial=0):
    """Eigenvalues of one realization; deterministic in (seed, trial)."""
    if isinstance(expr, str):
        expr = dsl.parse(expr)
    rng = _rng_for(seed, trial)
    matrix = realize(expr, n, rng)
    return EnsembleSample(n, eigenvalues_sym(matrix), seed, expr)


# ---------------------------------------------------------------------------
# histograms and comparison
# ---------------------------------------------------------------------------

_ATOM_TOL = 1e-8


@dataclass(frozen=True)
class EmpiricalHistogram:
    """Normalized eigenvalue histogram with atoms split out exactly."""
    bin_edges: np.ndarray
    density: np.ndarray
    trials: int
    atoms: tuple  # (location, empirical weight)

    @classmethod
    def from_values(cls, values, bin_edges, trials, atom_locs=()):
        values = np.asarray(values, dtype=float)
        total = len(values)
        if total == 0:
            raise SamplerError("empty histogram")
        atom_mask = np.zeros(total, dtype=bool)
        atoms = []
        for loc in atom_locs:
            hit = np.abs(values - loc) <= _ATOM_TOL
            atoms.append((float(loc), hit.sum() / total))
            atom_mask |= hit
        rest = values[~atom_mask]
        counts, edges = np.histogram(rest, bins=bin_edges)
        widths = np.diff(edges)
        density = counts / (total * widths)
        return cls(edges, density, trials, tuple(atoms))

    def continuous_mass(self):
        return float(np.sum(self.density * np.diff(self.bin_edges)))


def collect_histogram(expr, n, trials, seed, bins=40, profile=None):
    """Sample `trials` realizations and histogram all eigenvalues; bin
    range and atom locations come from the symbolic profile when given."""
    if isinstance(expr, str):
        expr = dsl.parse(expr)
    values = np.concatenate([
        sample_ensemble(expr, n, seed, t).eigenvalues
        for t in range(trials)])
    if profile is not None:
        atom_locs = [x for x, _ in profile.atoms.atoms]
        lo = min(profile.grid[0], values.min())
        hi = max(profile.grid[-1], values.max())
    else:
        atom_locs = []
        lo, hi = values.min(), values.max()
    edges = np.linspace(lo, hi, bins + 1)
    return EmpiricalHistogram.from_values(values, edges, trials, atom_locs)


def compare(hist, profile):
    """L1 and KS distances between an empirical histogram and a profile."""
    if not isinstance(profile, DensityProfile):
        raise SamplerError("compare needs a DensityProfile")
    edges = hist.bin_edges
    centers = (edges[:-1] + edges[1:]) / 2
    f = np.interp(centers, profile.grid, profile.density,
                  left=0.0, right=0.0)
    l1 = float(np.sum(np.abs(hist.density - f) * np.diff(edges)))
    emp_atoms = dict(hist.atoms)
    for loc, w in profile.atoms.atoms:
        l1 += abs(emp_atoms.pop(loc, 0.0) - w)
    l1 = float(l1 + sum(abs(w) for w in emp_atoms.values()))

    # KS between cumulative distributions evaluated at the bin edges
    cum_hist = np.concatenate(
        [[0.0], np.cumsum(hist.density * np.diff(edges))])
    dz = np.diff(profile.grid)
    grid_cdf = np.concatenate(
        [[0.0],
         np.cumsum((profile.density[:-1] + profile.density[1:]) / 2 * dz)])
    cum_prof = np.interp(edges, profile.grid, grid_cdf,
                         left=0.0, right=grid_cdf[-1])
    for loc, w in hist.atoms:
        cum_hist = cum_hist + np.where(edges >= loc - _ATOM_TOL, w, 0.0)
    for loc, w in profile.atoms.atoms:
        cum_prof = cum_prof + np.where(edges >= loc - _ATOM_TOL, w, 0.0)
    ks = float(np.max(np.abs(cum_hist - cum_prof)))
    return {"l1": l1, "ks": ks}


def verify_expression(expr, n=200, trials=2000, seed=0, bins=40,
                      threshold=0.1):
    """End-to-end Monte Carlo check of one expression; returns a report."""
    from .density import density_grid
    if isinstance(expr, str):
        expr = dsl.parse(expr)
    dist = dsl.to_distribution(expr)
    profile = density_grid(dist.poly)
    hist = collect_histogram(expr, n, trials, seed, bins=bins,
                             profile=profile)
    report = compare(hist, profile)
    report.update({
        "expression": dsl.to_text(expr),
        "dimension": n,
        "trials": trials,
        "seed": seed,
        "threshold": threshold,
        "passed": bool(report["l1"] <= threshold),
    })
    return report
