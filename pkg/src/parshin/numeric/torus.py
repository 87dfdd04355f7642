"""Local points near V_0, their monodromy, and torus cycles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..algebra import LaurentSeries, UniRat
from .system import ContinuationError, NumericSystem
from .tracking import TWO_PI, Tracker, targets

__all__ = [
    "LocalPoints",
    "Monodromy",
    "TorusCycle",
    "local_points",
    "local_monodromy",
    "track_torus",
    "refine_torus",
    "tangent_solve",
    "MAX_COVERING",
    "MATCHING_TOL",
]

MAX_COVERING = 8
MATCHING_TOL = 1e-6
SERIES_ORDER = 10


class InadmissibleRadii(ValueError):
    pass


@dataclass
class LocalPoints:
    X: np.ndarray  # (K, d) points with u = delta at theta = 0
    base: list  # index of the base point on V_1 (n = 2) or 0
    sheet: list  # index of the transverse branch at that base point
    base_values: list = field(default_factory=list)


def _series_poly(s: LaurentSeries):
    """Complex coefficient array (low -> high) of a series with valuation >= 0."""
    s = s.to_complex() if s.domain != "complex" else s
    if s.valuation < 0:
        raise ValueError("negative valuation in a coordinate series")
    return np.array([0j] * s.valuation + list(s.coeffs), dtype=np.complex128)


def _poly_eval(c, v):
    return np.polyval(c[::-1], v) if len(c) else 0j


def _solve_on_sheet(coords, u, target, rel_tol=1e-9):
    """Values of the sheet parameter v near 0 with u(X(v)) = target."""
    from ..flag import pull_rational, series_valuation

    useries = pull_rational(u, coords)
    useries = useries.to_complex() if useries.domain != "complex" else useries
    m = series_valuation(useries, rel_tol)
    if m is None or m < 1:
        raise InadmissibleRadii("parameter does not vanish on a sheet")
    c = _series_poly(useries.truncate(useries.order))
    lead = c[m]
    out = []
    for k in range(m):
        v0 = v = (target / lead) ** (1.0 / m) * np.exp(2j * np.pi * k / m)
        for _ in range(50):
            f = _poly_eval(c, v) - target
            df = _poly_eval(np.arange(1, len(c)) * c[1:], v)
            if df == 0:
                break
            dv = f / df
            v -= dv
            if abs(dv) < 1e-15 * (1 + abs(v)):
                break
        if abs(_poly_eval(c, v) - target) > 1e-10 * abs(target) or abs(v - v0) > 0.5 * abs(v0):
            raise InadmissibleRadii("radius too large for the local branch expansion")
        out.append(v)
    return out


def _coords_at(coords, v):
    return np.array([_poly_eval(_series_poly(x), v) for x in coords])


def _curve_base_roots(p, delta1):
    """Parameter values tau near curve_at with u1(c(tau)) = delta1."""
    cu = p.curve_unirat()
    u1 = p.params[0]
    num = u1.num.evaluate(list(cu))
    den = u1.den.evaluate(list(cu))
    r = (num if isinstance(num, UniRat) else UniRat(num)) / (den if isinstance(den, UniRat) else UniRat(den))
    m = r.valuation_at(p.curve_at)
    a = np.array([complex(c) for c in r.num.c])
    b = np.array([complex(c) for c in r.den.c])
    L = max(len(a), len(b))
    a = np.pad(a, (0, L - len(a)))
    b = np.pad(b, (0, L - len(b)))
    coeffs = a - delta1 * b
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    roots = np.roots(coeffs[::-1])
    t0 = complex(p.curve_at)
    roots = sorted(roots, key=lambda z: abs(z - t0))
    return roots[:m], m


def local_points(p, radii) -> LocalPoints:
    """All points of the local fibre over theta = 0 near V_0."""
    from ..flag import transverse_sheets

    system = NumericSystem.of(p)
    radii = [float(r) for r in radii]
    pts, bases, sheets = [], [], []
    if p.n == 1:
        shs, unresolved = transverse_sheets(p, SERIES_ORDER)
        if unresolved:
            shs, _ = transverse_sheets(p, SERIES_ORDER, force_float=True)
        for k, sh in enumerate(shs):
            for v in _solve_on_sheet(sh.coords, p.params[0], radii[0]):
                pts.append(_coords_at(sh.coords, v))
                bases.append(0)
                sheets.append(k)
        base_values = [None]
    else:
        taus, _ = _curve_base_roots(p, radii[0])
        base_values = taus
        for b, tau in enumerate(taus):
            shs, _ = transverse_sheets(p, SERIES_ORDER, tau=complex(tau))
            for k, sh in enumerate(shs):
                for v in _solve_on_sheet(sh.coords, p.params[1], radii[1]):
                    pts.append(_coords_at(sh.coords, v))
                    bases.append(b)
                    sheets.append(k)
    X = np.array(pts, dtype=np.complex128).reshape(len(pts), p.dim)
    T = targets(np.zeros((len(pts), p.n)), radii)
    X, ok, _ = system.newton(X, T, max_iter=30)
    if not ok.all():
        raise InadmissibleRadii("Newton failed to refine a local point")
    return LocalPoints(X, bases, sheets, base_values)


def _match(final, start):
    """Permutation sending start index -> index of the start point reached."""
    K = start.shape[0]
    dist = np.max(np.abs(final[:, None, :] - start[None, :, :]), axis=2)
    if K > 1:
        sep = np.max(np.abs(start[:, None, :] - start[None, :, :]), axis=2)
        sep[np.diag_indices_from(sep)] = np.inf
        ref = sep.min()
    else:
        ref = 1.0 + np.abs(start).max()
    tol = max(MATCHING_TOL * ref, 1e-11 * (1.0 + np.abs(start).max()))
    perm = []
    for k in range(K):
        j = int(np.argmin(dist[k]))
        if dist[k, j] > tol:
            raise ContinuationError(
                f"tracked point {k} did not return to the start set (distance {dist[k, j]:.3e})")
        perm.append(j)
    if sorted(perm) != list(range(K)):
        raise ContinuationError("loop closure is not a permutation")
    return tuple(perm)


def cycles(perm) -> list:
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        c, k = [], s
        while k not in seen:
            seen.add(k)
            c.append(k)
            k = perm[k]
        out.append(tuple(c))
    return out


def _orbits(perms, K):
    parent = list(range(K))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for perm in perms:
        for a, b in enumerate(perm):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for k in range(K):
        groups.setdefault(find(k), []).append(k)
    return [tuple(g) for _, g in sorted(groups.items())]


@dataclass
class Monodromy:
    """Permutations of the local points along each parameter loop."""

    perms: tuple
    orbits: list
    start: np.ndarray
    local: LocalPoints = None

    def covering(self, orbit) -> tuple:
        a = orbit[0]
        out = []
        for perm in self.perms:
            m, k = 1, perm[a]
            while k != a:
                k = perm[k]
                m += 1
            out.append(m)
        return tuple(out)

    def cycle_notation(self, i: int = 0) -> str:
        cs = [c for c in cycles(self.perms[i]) if len(c) > 1]
        if not cs:
            return "identity"
        return "".join("(" + " ".join(str(k + 1) for k in c) + ")" for c in cs)


def loop_permutation(system, X, radii, direction, samples=64, laps=1):
    tr = Tracker(system, radii, collision_check=True, max_step=TWO_PI / samples)
    theta = np.zeros((X.shape[0], system.n))
    Y, _ = tr.advance(X, theta, direction, TWO_PI * laps)
    return _match(Y, X)


def local_monodromy(p, radii, samples: int = 64) -> Monodromy:
    if samples < 16:
        raise ValueError("samples must be at least 16")
    loc = local_points(p, radii)
    system = NumericSystem.of(p)
    perms = tuple(loop_permutation(system, loc.X, radii, i, samples) for i in range(p.n))
    return Monodromy(perms, _orbits(perms, loc.X.shape[0]), loc.X, loc)


# ---------------------------------------------------------------------------


@dataclass
class TorusCycle:
    """Samples of one torus component on the (m_1 N_1) x ... grid."""

    point: object
    radii: tuple
    covering: tuple
    grid: tuple
    samples: np.ndarray  # (m1 N1, [m2 N2,] d)
    tangents: tuple  # per direction, same shape as samples
    closure_error: float = 0.0

    @property
    def flat_samples(self):
        return self.samples.reshape(-1, self.samples.shape[-1])

    def flat_tangents(self):
        return [t.reshape(-1, t.shape[-1]) for t in self.tangents]

    def thetas(self):
        axes = [TWO_PI * np.arange(m * N) / N for m, N in zip(self.covering, self.grid)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.reshape(-1) for g in mesh], axis=1)


def tangent_solve(system, X, theta, radii, direction):
    """dP/dtheta_direction at points X (B, d) with angles theta (B, n)."""
    X = np.atleast_2d(X)
    theta = np.atleast_2d(theta)
    T = targets(theta, radii)
    cond = system.condition(X, T)
    if np.any(~np.isfinite(cond)) or np.max(cond) > 1e8:
        raise InadmissibleRadii(f"tangent system ill-conditioned (cond {np.max(cond):.3e})")
    return system.tangent(X, T, direction)


def _first_return(system, x, theta, radii, direction, N):
    """Covering degree along one angle: laps until x recurs."""
    tr = Tracker(system, radii, max_step=TWO_PI / max(N, 16))
    X = x[None, :]
    th = theta[None, :].copy()
    scale = 1.0 + np.abs(x).max()
    for m in range(1, MAX_COVERING + 1):
        X, th = tr.advance(X, th, direction, TWO_PI)
        if np.max(np.abs(X[0] - x)) < 1e-8 * scale:
            return m
    raise InadmissibleRadii(f"covering degree exceeds {MAX_COVERING}")


def track_torus(p, point, radii, N: int = 64, system=None) -> TorusCycle:
    system = system or NumericSystem.of(p)
    radii = tuple(float(r) for r in radii)
    n = p.n
    x0 = np.asarray(point.start[0] if getattr(point.start, "ndim", 1) == 2 else point.start)
    theta0 = np.zeros(n)
    covering = tuple(_first_return(system, x0, theta0, radii, i, N) for i in range(n))
    if hasattr(point, "covering") and point.covering and tuple(point.covering) != covering:
        raise ContinuationError(f"covering degrees {covering} disagree with monodromy {point.covering}")
    tr = Tracker(system, radii, max_step=TWO_PI / max(N, 16))
    back, end, _ = tr.sample(x0[None, :], theta0[None, :], 0, covering[0], N)
    back = back[:, 0, :]
    closure = float(np.max(np.abs(end[0] - x0)))
    if n == 1:
        samples = back
        th = np.zeros((back.shape[0], 1))
        th[:, 0] = TWO_PI * np.arange(back.shape[0]) / N
        tangents = (tangent_solve(system, samples, th, radii, 0),)
        return TorusCycle(point, radii, covering, (N,), samples, tangents, closure)
    rows = back.shape[0]
    th = np.zeros((rows, 2))
    th[:, 0] = TWO_PI * np.arange(rows) / N
    tr2 = Tracker(system, radii, max_step=TWO_PI / max(N, 16))
    grid, end2, _ = tr2.sample(back, th, 1, covering[1], N)
    closure = max(closure, float(np.max(np.abs(end2 - back))))
    samples = np.transpose(grid, (1, 0, 2))  # (rows, cols, d)
    flat = samples.reshape(-1, p.dim)
    thg = np.zeros((flat.shape[0], 2))
    cols = samples.shape[1]
    thg[:, 0] = np.repeat(th[:, 0], cols)
    thg[:, 1] = np.tile(TWO_PI * np.arange(cols) / N, rows)
    t1 = tangent_solve(system, flat, thg, radii, 0).reshape(samples.shape)
    t2 = tangent_solve(system, flat, thg, radii, 1).reshape(samples.shape)
    return TorusCycle(point, radii, covering, (N, N), samples, (t1, t2), closure)


def _interleave_axis(system, samples, thetas, radii, axis, direction, h):
    """Insert the midpoints along ``axis`` by advancing every sample by h in
    theta_direction as one batch."""
    d = samples.shape[-1]
    flat = samples.reshape(-1, d)
    th = thetas.reshape(-1, thetas.shape[-1])
    tr = Tracker(system, radii, max_step=h)
    mid, _ = tr.advance(flat, th, direction, h)
    mid = mid.reshape(samples.shape)
    shape = list(samples.shape)
    shape[axis] *= 2
    out = np.empty(shape, dtype=np.complex128)
    idx = [slice(None)] * len(shape)
    idx[axis] = slice(0, None, 2)
    out[tuple(idx)] = samples
    idx[axis] = slice(1, None, 2)
    out[tuple(idx)] = mid
    return out


def refine_torus(cycle: TorusCycle, system) -> TorusCycle:
    """The same torus cycle on the grid of twice the size. The existing
    samples are kept; the new ones are tracked from their neighbours."""
    radii = cycle.radii
    n = len(cycle.grid)
    N = cycle.grid[0]
    h = np.pi / N
    samples = cycle.samples
    shape = samples.shape[:-1]
    if n == 1:
        th = (TWO_PI * np.arange(shape[0]) / N)[:, None]
        samples = _interleave_axis(system, samples, th, radii, 0, 0, h)
        th2 = (np.pi * np.arange(samples.shape[0]) / N)[:, None]
        tangents = (tangent_solve(system, samples, th2, radii, 0),)
        return TorusCycle(cycle.point, radii, cycle.covering, (2 * N,), samples, tangents, cycle.closure_error)
    a0 = TWO_PI * np.arange(shape[0]) / N
    a1 = TWO_PI * np.arange(shape[1]) / N
    th = np.stack(np.meshgrid(a0, a1, indexing="ij"), axis=-1)
    samples = _interleave_axis(system, samples, th, radii, 0, 0, h)
    a0 = np.pi * np.arange(samples.shape[0]) / N
    th = np.stack(np.meshgrid(a0, a1, indexing="ij"), axis=-1)
    samples = _interleave_axis(system, samples, th, radii, 1, 1, h)
    a1 = np.pi * np.arange(samples.shape[1]) / N
    th = np.stack(np.meshgrid(a0, a1, indexing="ij"), axis=-1).reshape(-1, 2)
    flat = samples.reshape(-1, samples.shape[-1])
    t1 = tangent_solve(system, flat, th, radii, 0).reshape(samples.shape)
    t2 = tangent_solve(system, flat, th, radii, 1).reshape(samples.shape)
    return TorusCycle(cycle.point, radii, cycle.covering, (2 * N, 2 * N), samples, (t1, t2), cycle.closure_error)
