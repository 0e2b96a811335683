"""Numeric interpretation of an encoded distribution: atoms, support, and
the continuous density.

Each real grid point is continued independently by a vertical descent in the
upper half-plane: high above the real axis the Stieltjes branch is the unique
m-root near its -1/z asymptote, and halving the height while re-matching the
nearest root follows that branch down to the real axis, where a final Newton
step lands it on the exact real slice.  Vertical paths avoid the real-axis
branch collisions (support edges, poles) that make horizontal continuation
ambiguous.  Atom weights come from the residue limit eps * Im m(z0 + i*eps)
at the poles of the leading coefficient.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bipoly import BiPoly, BiPolyError, SingularSliceError


class DensityError(BiPolyError):
    pass


@dataclass(frozen=True)
class AtomSet:
    atoms: tuple  # of (location, weight) float pairs

    def __post_init__(self):
        object.__setattr__(self, "atoms",
                           tuple((float(x), float(w)) for x, w in self.atoms))
        if any(not -1e-6 <= w <= 1 + 1e-6 for _, w in self.atoms):
            raise DensityError("atom weight outside [0, 1]")
        if self.total > 1 + 1e-6:
            raise DensityError("atom weights exceed total mass 1")

    @property
    def total(self):
        return sum(w for _, w in self.atoms)


@dataclass(frozen=True)
class SupportInfo:
    endpoints: tuple  # sorted candidate endpoints (some may be spurious)
    poles: tuple

    def __post_init__(self):
        object.__setattr__(self, "endpoints",
                           tuple(sorted(float(e) for e in self.endpoints)))
        object.__setattr__(self, "poles",
                           tuple(sorted(float(p) for p in self.poles)))


@dataclass
class DensityProfile:
    grid: np.ndarray
    branches: np.ndarray          # (n_points, n_branches) complex
    selected: np.ndarray          # branch index per point
    density: np.ndarray           # Im(m)/pi on the selected branch
    atoms: AtomSet
    support: SupportInfo
    total_mass: float

    def to_csv(self, path, sidecar=None):
        """Write (z, f) rows; optional JSON sidecar with atoms/support/mass."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["z", "f"])
            for z, f in zip(self.grid, self.density):
                w.writerow([repr(float(z)), repr(float(f))])
        if sidecar is not None:
            with open(sidecar, "w") as fh:
                json.dump({
                    "atoms": [[x, w] for x, w in self.atoms.atoms],
                    "endpoints": list(self.support.endpoints),
                    "poles": list(self.support.poles),
                    "total_mass": self.total_mass,
                }, fh, indent=2)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def _aberth(coeffs, tol=1e-13, max_iter=120):
    """All roots of a complex polynomial (coefficients low power first)."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    dc = c[1:] * np.arange(1, n + 1)
    # Cauchy bound on root magnitude; deterministic ring of starting points
    bound = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    if c[0] != 0:
        inner = abs(c[0] / c[-1]) ** (1.0 / n)
        radius = math.sqrt(inner * bound)
    else:
        radius = 0.5 * bound
    angles = 2 * np.pi * (np.arange(n) + 0.25) / n + 0.31
    z = radius * np.exp(1j * angles)
    for _ in range(max_iter):
        p = np.polyval(c[::-1], z)
        dp = np.polyval(dc[::-1], z)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.all(np.abs(step) < tol * (1.0 + np.abs(z))):
            break
    else:
        z = np.roots(c[::-1])  # fallback; should not happen in practice
    # Newton polish
    for _ in range(2):
        p = np.polyval(c[::-1], z)
        dp = np.polyval(dc[::-1], z)
        mask = np.abs(dp) > 1e-300
        z = np.where(mask, z - p / np.where(mask, dp, 1.0), z)
    return z


def roots_at(L, z0):
    """All m-roots of the slice L(m, z0); returns (roots, degree_dropped)."""
    s = L.eval_slice(z0)
    return _aberth(s.coeffs), s.degree_dropped


# ---------------------------------------------------------------------------
# poles and atoms
# ---------------------------------------------------------------------------

def _dedupe(xs, tol=1e-8):
    out = []
    for x in sorted(xs):
        if not out or abs(x - out[-1]) > tol:
            out.append(x)
    return out


def find_poles(L):
    """Real roots of the leading coefficient in m: candidate atom sites."""
    lead = L.leading_coeff_u()
    if lead.degree <= 0:
        return []
    return _dedupe(lead.real_roots())


def atom_weights(L, eps_levels=(1e-4, 1e-5, 1e-6)):
    """Atom locations and weights via the residue limit at each pole.

    w = lim eps * Im m(z0 + i*eps) along the branch maximizing it; linear
    extrapolation in eps over successive level pairs, cross-checked for
    convergence.  Admissible weights lie in [0, 1]; with several admissible
    candidates (double pole) the largest one below 1 wins, with a warning.
    Each candidate is then confirmed against the physical branch: foreign
    curve branches can mimic a residue locally, so a candidate is kept only
    if the descended Stieltjes branch itself carries the residue.
    """
    out = []
    for z0 in find_poles(L):
        est = []
        for eps in eps_levels:
            try:
                roots, _ = roots_at(L, complex(z0, eps))
            except SingularSliceError:
                roots = np.array([])
            vals = sorted((eps * r.imag for r in roots), reverse=True)
            est.append(vals)
        # pair the dominant estimates across levels by rank
        k_max = min(len(v) for v in est)
        candidates = []
        for k in range(k_max):
            f = [est[i][k] for i in range(len(eps_levels))]
            if f[-1] < 1e-4:  # below resolution: no atom on this branch
                continue
            e = eps_levels
            w12 = (f[1] * e[0] - f[0] * e[1]) / (e[0] - e[1])
            w23 = (f[2] * e[1] - f[1] * e[2]) / (e[1] - e[2])
            if abs(w12 - w23) > 1e-3:
                warnings.warn(f"atom weight at z={z0:.6g} did not converge "
                              f"({w12:.6g} vs {w23:.6g}); omitted")
                continue
            candidates.append(w23)
        admissible = [w for w in candidates if -1e-6 <= w <= 1 + 1e-6]
        if not admissible:
            continue
        if len(admissible) > 1:
            warnings.warn(f"multiple admissible atom weights at z={z0:.6g}: "
                          f"{admissible}; keeping the largest below one")
            below = [w for w in admissible if w < 1]
            pick = max(below) if below else min(admissible)
        else:
            pick = admissible[0]
        pick = min(max(pick, 0.0), 1.0)
        if pick > 1e-6:
            out.append((z0, pick))
    kept = tuple(a for a in out
                 if a[1] > 1e-3
                 and _branch_residue(L, a[0]) > max(1e-3, 0.3 * a[1]))
    if len(kept) != len(out):
        dropped = sorted(set(out) - set(kept))
        warnings.warn(f"discarding spurious atom candidates {dropped}"
                      " not seen by the tracked branch")
    return AtomSet(kept)


def support_endpoints(L):
    """Candidate support endpoints: real roots of the m-discriminant."""
    if L.degree_u < 2:
        return SupportInfo((), tuple(find_poles(L)))
    disc = L.discriminant_u()
    if disc.is_zero():
        raise DensityError("discriminant vanishes identically")
    return SupportInfo(tuple(_dedupe(disc.real_roots())),
                       tuple(find_poles(L)))


# ---------------------------------------------------------------------------
# branch tracking and selection
# ---------------------------------------------------------------------------

def _match(prev, cur):
    """Order cur so that entry i continues prev[i]; greedy nearest pairs."""
    n = len(prev)
    pairs = sorted((abs(prev[i] - cur[j]), i, j)
                   for i in range(n) for j in range(n))
    out = np.empty(n, dtype=complex)
    used_i = [False] * n
    used_j = [False] * n
    for _, i, j in pairs:
        if not used_i[i] and not used_j[j]:
            out[i] = cur[j]
            used_i[i] = used_j[j] = True
    return out


def _track(L, zs, start):
    """Follow all branches from ``start`` values along real points zs."""
    cur = np.array(start, dtype=complex)
    allroots = _roots_stack(_slice_rows(L), np.asarray(zs, dtype=float) + 0j)
    out = []
    for roots in allroots:
        roots = roots[np.isfinite(roots)]
        if len(roots) != len(cur):
            out.append(cur.copy())
            continue
        cur = _match(cur, roots)
        out.append(cur.copy())
    return np.array(out)


def density_grid(L, z_min=None, z_max=None, n_points=1000):
    """Evaluate the continuous density on a real grid and pick the branch
    that behaves like a Stieltjes transform."""
    L = L.canonicalize()
    atoms = atom_weights(L)
    support = support_endpoints(L)
    if z_min is None or z_max is None:
        anchors = list(support.endpoints) + [x for x, _ in atoms.atoms]
        if not anchors:
            anchors = [-2.0, 2.0]
        if z_min is None:
            z_min = min(anchors) - 0.5
        if z_max is None:
            z_max = max(anchors) + 0.5
    base = np.linspace(float(z_min), float(z_max), int(n_points))
    # cluster extra points toward support edges and poles so integrable
    # singularities (inverse fractional powers) are captured by trapezoid;
    # each window reaches halfway to the neighboring singular point, and
    # the mild ratio keeps the trapezoid excess on convex spikes small
    step = base[1] - base[0]
    sing = sorted(set(support.endpoints) | set(support.poles))
    extra = []
    for i, e in enumerate(sing):
        left = sing[i - 1] if i > 0 else base[0] - step
        right = sing[i + 1] if i + 1 < len(sing) else base[-1] + step
        for s, gap in ((-1.0, e - left), (1.0, right - e)):
            d = max(gap / 2, step)
            while d > 1e-6 * step:
                extra.append(e + s * d)
                d *= 0.9
    extra = np.array([x for x in extra if base[0] < x < base[-1]])

    def _pole_filter(xs):
        keep = np.ones(len(xs), dtype=bool)
        for p in support.poles:
            keep &= np.abs(xs - p) > 1e-8
        return xs[keep]

    base = _pole_filter(base)
    extra = _pole_filter(extra)
    grid = np.unique(np.concatenate([base, extra]))

    dm = L.degree_u
    if dm == 1:
        # single rational branch; purely atomic continuous part is zero
        vals = []
        for z in grid:
            s = L.eval_slice(z)
            vals.append(-s.coeffs[0] / s.coeffs[1]
                        if len(s.coeffs) == 2 else np.nan)
        branches = np.array(vals, dtype=complex)[:, None]
        density = np.zeros(len(grid))
        mass = atoms.total
        return DensityProfile(grid, branches, np.zeros(len(grid), dtype=int),
                              density, atoms, support, float(mass))

    # seed at the first clean point, then track forward for continuity of
    # the reported branch matrix
    first, _ = roots_at(L, grid[0])
    if len(first) != dm:
        raise DensityError("degenerate slice at the grid edge; shift z_min")
    branches = _track(L, grid, first)

    selected_vals, _ = _descend(L, grid)
    selected_vals = _polish(L, grid, selected_vals)
    # map the continued values back to branch-matrix column indices
    selected = np.array(
        [int(np.argmin(np.minimum(np.abs(branches[i] - selected_vals[i]),
                                  np.abs(branches[i].conj()
                                         - selected_vals[i]))))
         for i in range(len(grid))])
    density = np.abs(selected_vals.imag) / np.pi
    total = float(np.trapezoid(density, grid) + atoms.total)
    return DensityProfile(grid, branches, selected,
                          density, atoms, support, total)


def _slice_rows(L):
    """Per-m-power coefficient polynomials in z, high power first, as float
    arrays ready for np.polyval over a whole array of points."""
    return [np.array([float(c) for c in row], dtype=float)[::-1]
            for row in L.rows]


def _coeff_stack(rows, zeta):
    """Slice coefficients at every point of zeta: shape (n, degree+1)."""
    return np.stack([np.polyval(r, zeta) for r in rows], axis=-1)


def _roots_stack(rows, zeta):
    """All m-roots at every point of zeta via batched companion matrices.

    Points with a vanishing or non-finite leading coefficient fall back to
    the scalar root finder on the trimmed slice; missing roots are NaN and
    are ignored by the chordal matcher."""
    coeff = _coeff_stack(rows, zeta)
    d = coeff.shape[1] - 1
    lead = coeff[:, -1]
    bad = (~np.isfinite(coeff).all(axis=1)) | (np.abs(lead) == 0)
    lead = np.where(bad, 1.0, lead)
    comp = np.zeros((coeff.shape[0], d, d), dtype=complex)
    idx = np.arange(d - 1)
    comp[:, idx + 1, idx] = 1.0
    comp[:, :, -1] = -coeff[:, :-1] / lead[:, None]
    comp[bad] = 0.0
    roots = np.linalg.eigvals(comp)
    for i in np.nonzero(bad)[0]:
        roots[i] = np.nan
        ci = coeff[i]
        n = len(ci)
        while n > 1 and not (np.isfinite(ci[n - 1]) and ci[n - 1] != 0):
            n -= 1
        rr = _aberth(np.nan_to_num(ci[:n]))
        roots[i, :len(rr)] = rr
    return roots


def _nearest_root(roots, target):
    """Per-point root chordally nearest to target (metric on the Riemann
    sphere, so branches escaping to infinity at a pole stay trackable)."""
    t = target[:, None]
    with np.errstate(invalid="ignore", over="ignore"):
        d = np.abs(roots - t) / np.sqrt((1.0 + np.abs(roots) ** 2)
                                        * (1.0 + np.abs(t) ** 2))
    d = np.where(np.isnan(d), np.inf, d)
    return roots[np.arange(roots.shape[0]), np.argmin(d, axis=1)]


def _descend(L, zs, delta_min=1e-9, capture=()):
    """Continue the Stieltjes branch vertically down to each real point.

    Starts at a height where the branch is the unique root near -1/zeta,
    then halves the height, re-matching the root nearest to a linear
    prediction (taken in the reciprocal chart when the value is large, so
    residue branches w/(z0 - zeta) remain linear).  Collisions between
    branches of a real curve sit on the real axis, so vertical paths reach
    delta_min unambiguously.  Returns the values at delta_min and a dict of
    values recorded at each requested capture height.
    """
    zs = np.asarray(zs, dtype=float)
    rows = _slice_rows(L)
    top = 64.0 * max(1.0, float(np.max(np.abs(zs))))
    ladder = []
    d = top
    while d > delta_min:
        d *= 0.5
        ladder.append(d)
    ladder = sorted(set(ladder) | set(float(c) for c in capture),
                    reverse=True)
    zeta = zs + 1j * top
    prev = _nearest_root(_roots_stack(rows, zeta), -1.0 / zeta)
    prev2 = prev
    dp = dp2 = top
    captured = {}
    for d in ladder:
        roots = _roots_stack(rows, zs + 1j * d)
        frac = (d - dp) / (dp - dp2) if dp != dp2 else 0.0
        pred = prev + (prev - prev2) * frac
        with np.errstate(divide="ignore", invalid="ignore"):
            ip, ip2 = 1.0 / prev, 1.0 / prev2
            ilin = ip + (ip - ip2) * frac
            big = (np.abs(prev) > 1.0) & np.isfinite(ilin) & (ilin != 0)
            pred = np.where(big, 1.0 / np.where(ilin == 0, 1.0, ilin), pred)
        new = _nearest_root(roots, pred)
        prev2, prev = prev, new
        dp2, dp = dp, d
        if d in capture:
            captured[d] = new.copy()
    return prev, captured


def _newton_steps(c, x, iters):
    """Vectorized Newton iterations of the per-point polynomials c."""
    dcoef = c[:, 1:] * np.arange(1, c.shape[1])
    for _ in range(iters):
        p = np.zeros_like(x)
        for k in range(c.shape[1] - 1, -1, -1):
            p = p * x + c[:, k]
        dp = np.zeros_like(x)
        for k in range(dcoef.shape[1] - 1, -1, -1):
            dp = dp * x + dcoef[:, k]
        ok = np.isfinite(p) & np.isfinite(dp) & (np.abs(dp) > 1e-300)
        x = np.where(ok, x - p / np.where(ok, dp, 1.0), x)
    return x


def _polish(L, zs, vals, iters=6):
    """Newton-correct descended values onto the exact real slice.

    Stopping the descent at a positive height leaves an O(delta) residual;
    harmless in general, but near an atom pole it fakes a density spike of
    order w*delta/(z - z0)^2, which polishing removes exactly.  Large values
    are polished in the reciprocal chart: very near a pole the slice itself
    is catastrophically ill-conditioned at the residue branch, while the
    reversed polynomial (whose roots are 1/m) stays well-conditioned."""
    rows = _slice_rows(L)
    c = _coeff_stack(rows, np.asarray(zs, dtype=float)).astype(complex)
    x = _newton_steps(c, vals.astype(complex), iters)
    big = np.abs(x) > 1e3
    if np.any(big):
        u = _newton_steps(c[big, ::-1], 1.0 / x[big], iters)
        u = np.where((u != 0) & np.isfinite(u), u, 1.0 / x[big])
        x[big] = 1.0 / u
    x = np.where(np.isfinite(x), x, vals)
    return np.where(x.imag < 0, x.conj(), x)


def _branch_residue(L, z0):
    """Residue of the physical branch at a pole: lim eps * Im m(z0 + i*eps)
    along the descended branch; zero when only a foreign branch diverges."""
    levels = (1e-5, 1e-6)
    _, cap = _descend(L, np.array([float(z0)]), delta_min=1e-6,
                      capture=levels)
    f = [lv * float(cap[lv][0].imag) for lv in levels]
    e1, e2 = levels
    return (f[1] * e1 - f[0] * e2) / (e1 - e2)


def normalization_check(profile):
    return abs(profile.total_mass - 1.0)
