"""Choice of admissible torus radii by geometric shrinking."""

from __future__ import annotations

import numpy as np

from .system import ContinuationError, NumericSystem
from .torus import InadmissibleRadii, local_points, loop_permutation
from .tracking import TWO_PI, Tracker, targets

__all__ = ["choose_radii", "RadiiError", "admissible"]

START = 0.5
RATIO = 0.5
MAX_SHRINKS = 40
SEPARATION = 1e-6
MAX_COND = 1e8
PROBES = 16
WINDING_PROBES = 4
POLAR_MARGIN = 1e-6
MAX_WINDING_SAMPLES = 256


class RadiiError(ValueError):
    pass


def _probe(system, X, radii, direction):
    """Track the local points once around, returning min separation and max
    condition number at the probe angles."""
    tr = Tracker(system, radii, collision_check=True, max_step=TWO_PI / 32)
    theta = np.zeros((X.shape[0], system.n))
    sep, cond = np.inf, 0.0
    for _ in range(PROBES):
        c = system.condition(X, targets(theta, radii))
        cond = max(cond, float(np.max(c)))
        if X.shape[0] > 1:
            d = np.max(np.abs(X[:, None, :] - X[None, :, :]), axis=2)
            d[np.diag_indices_from(d)] = np.inf
            sep = min(sep, float(d.min()))
        X, theta = tr.advance(X, theta, direction, TWO_PI / PROBES)
    return sep, cond


def _circle_winding(tr, X, theta, last, samples=32):
    """Winding numbers (B, terms) of the polar values along the last circle.
    The sampling doubles until no phase step exceeds pi/2."""
    while True:
        Y, th = X, theta
        vals = [tr.system.polar_values(Y)]
        for _ in range(samples):
            Y, th = tr.advance(Y, th, last, TWO_PI / samples)
            vals.append(tr.system.polar_values(Y))
        v = np.array(vals)
        mags = np.abs(v)
        if np.any(mags.min(axis=0) < POLAR_MARGIN * mags.max(axis=0)):
            raise ValueError("the last circle passes close to the polar set")
        ang = np.unwrap(np.angle(v), axis=0)
        if np.max(np.abs(np.diff(ang, axis=0))) <= np.pi / 2 or samples >= MAX_WINDING_SAMPLES:
            return np.round((ang[-1] - ang[0]) / TWO_PI).astype(int)
        samples *= 2


def _winding(system, X, radii):
    """Winding numbers of the form's polar polynomials along the last
    circle through each row of X, required to agree at several angles of
    the first one. Returned as a sorted list of tuples."""
    tr = Tracker(system, radii, max_step=TWO_PI / 32)
    theta = np.zeros((X.shape[0], system.n))
    last = system.n - 1
    if last == 0:
        return sorted(map(tuple, _circle_winding(tr, X, theta, 0)))
    out = None
    for j in range(WINDING_PROBES):
        w = _circle_winding(tr, X, theta.copy(), last)
        if out is not None and not np.array_equal(w, out):
            raise ValueError("polar winding changes along the first circle")
        out = w
        X, theta = tr.advance(X, theta, 0, TWO_PI / WINDING_PROBES)
    return sorted(map(tuple, out))


def admissible(p, radii, system=None):
    """None when the radii pass every criterion, else a reason string."""
    system = system or NumericSystem.of(p)
    try:
        loc = local_points(p, radii)
        X = loc.X
        if X.shape[0] == 0:
            return "no local points"
        for i in range(p.n):
            loop_permutation(system, X, radii, i, samples=32)
            sep, cond = _probe(system, X, radii, i)
            if sep < SEPARATION:
                return f"separation {sep:.2e} below {SEPARATION}"
            if cond > MAX_COND:
                return f"condition number {cond:.2e} above {MAX_COND}"
        pol = system.polar_values(X)
        if np.min(np.abs(pol)) < 1e-8:
            return "torus meets the polar set"
    except (InadmissibleRadii, ContinuationError, ValueError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        return str(exc)
    return None


def _stable(p, radii, system):
    """Winding of the polar set around the last circle is unchanged when the
    last radius is halved: the circle encloses no extra polar branches."""
    try:
        a = local_points(p, radii).X
        half = list(radii)
        half[-1] /= 2
        b = local_points(p, half).X
        wa = _winding(system, a, radii)
        wb = _winding(system, b, half)
        return wa == wb
    except (InadmissibleRadii, ContinuationError, ValueError):
        return False


def choose_radii(p, start=START, ratio=RATIO, max_shrinks=MAX_SHRINKS):
    """delta_1 is fixed first; for each trial delta_1, delta_2 shrinks from
    delta_1. The total number of shrinks is capped by ``max_shrinks``."""
    system = NumericSystem.of(p)
    last = None
    for i1 in range(max_shrinks + 1):
        d1 = start * ratio ** i1
        inner = range(max_shrinks - i1 + 1) if p.n == 2 else range(1)
        for i2 in inner:
            radii = (d1,) if p.n == 1 else (d1, d1 * ratio ** i2)
            reason = admissible(p, radii, system)
            if reason is None and not _stable(p, radii, system):
                reason = "polar winding changes when the radius is halved"
            if reason is None:
                return radii
            last = reason
    raise RadiiError(f"no admissible radii within {max_shrinks} shrinks: {last}")
