"""Periodic trapezoid quadrature of the form over torus cycles."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .system import NumericSystem
from .torus import TorusCycle, refine_torus, track_torus

__all__ = [
    "QuadratureResult",
    "NumericFlagResult",
    "PoleProximity",
    "integrate_torus",
    "integrate_component",
    "residue_numeric_at_flag",
    "write_history_csv",
    "QUAD_TOL",
    "MAX_GRID",
]

QUAD_TOL = 1e-10
MAX_GRID = 1024
POLE_GUARD = 1e-8


class PoleProximity(ValueError):
    pass


class QuadratureNotConverged(RuntimeError):
    pass


@dataclass
class QuadratureResult:
    value: complex
    grids: tuple
    history: list  # [(N, value)]
    error: float

    def changes(self) -> list:
        return [float("nan")] + [abs(b - a) for (_, a), (_, b) in zip(self.history, self.history[1:])]


def integrate_torus(cycle: TorusCycle, system: NumericSystem) -> complex:
    """(2 pi i)^-n times the trapezoid sum of omega(dP/dtheta_1, ...)."""
    X = cycle.flat_samples
    vals, min_den = system.form_pairing(X, cycle.flat_tangents())
    if min_den < POLE_GUARD:
        raise PoleProximity(f"form denominator {min_den:.3e} on the torus; shrink the radii")
    n = len(cycle.grid)
    # pairwise summation keeps the result reproducible and accurate
    total = np.sum(vals)
    denom = np.prod(cycle.grid) * (1j ** n)
    return complex(total / denom)


def integrate_component(p, point, radii, N0=32, tol=QUAD_TOL, max_grid=MAX_GRID, min_levels=1, system=None):
    """Track and integrate at N0, 2 N0, ... until successive values agree.
    Each doubling keeps the previous samples and tracks only the new ones."""
    system = system or NumericSystem.of(p)
    hist = []
    N = N0
    last = None
    cyc = None
    while True:
        cyc = track_torus(p, point, radii, N, system) if cyc is None else refine_torus(cyc, system)
        val = integrate_torus(cyc, system)
        hist.append((N, val))
        if last is not None and abs(val - last) < tol and len(hist) > min_levels:
            break
        if N >= max_grid:
            raise QuadratureNotConverged(f"no convergence up to N = {max_grid}: history {hist}")
        last = val
        N *= 2
    err = abs(hist[-1][1] - hist[-2][1])
    return QuadratureResult(hist[-1][1], cyc.grid, hist, err), cyc


@dataclass
class NumericFlagResult:
    radii: tuple
    points: list
    components: list  # QuadratureResult per point
    coverings: list
    monodromy: object = None
    total: complex = 0j
    error: float = 0.0
    extra: dict = field(default_factory=dict)


def residue_numeric_at_flag(p, radii=None, N0=32, tol=QUAD_TOL, max_grid=MAX_GRID, min_levels=1):
    from ..flag import ParshinPoint
    from .radii import choose_radii
    from .torus import local_monodromy

    if radii is None:
        radii = choose_radii(p)
    radii = tuple(float(r) for r in radii)
    mono = local_monodromy(p, radii)
    system = NumericSystem.of(p)
    points, comps, covs = [], [], []
    for k, orbit in enumerate(mono.orbits):
        pt = ParshinPoint(p, k, tuple(orbit), mono.covering(orbit), mono.start[list(orbit)], radii)
        q, cyc = integrate_component(p, pt, radii, N0, tol, max_grid, min_levels, system)
        points.append(pt)
        comps.append(q)
        covs.append(cyc.covering)
    total = complex(sum(q.value for q in comps))
    err = float(sum(q.error for q in comps))
    return NumericFlagResult(radii, points, comps, covs, mono, total, err)


def write_history_csv(result: QuadratureResult, path_or_file):
    """Columns: N, real, imag, abs_change."""
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(["N", "real", "imag", "abs_change"])
        for (N, v), ch in zip(result.history, result.changes()):
            w.writerow([N, repr(float(v.real)), repr(float(v.imag)), "" if ch != ch else repr(float(ch))])
    finally:
        if own:
            fh.close()
