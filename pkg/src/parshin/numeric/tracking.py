"""Lockstep predictor-corrector continuation along one torus angle."""

from __future__ import annotations

import numpy as np

from .system import ContinuationError

TWO_PI = 2.0 * np.pi
STEP_FLOOR = TWO_PI / 2**12
COLLISION_TOL = 1e-9


def targets(theta, radii):
    return np.asarray(radii)[None, :] * np.exp(1j * theta)


def _min_pair_distance(X):
    if X.shape[0] < 2:
        return np.inf
    diff = X[:, None, :] - X[None, :, :]
    dist = np.max(np.abs(diff), axis=2)
    dist[np.diag_indices_from(dist)] = np.inf
    return float(dist.min())


class Tracker:
    """Moves a batch of points along ``theta[direction]`` keeping every row
    on its own fibre. All rows share the step size; a failed corrector in any
    row halves the step for the whole batch."""

    def __init__(self, system, radii, collision_check=False, max_step=TWO_PI / 16):
        self.system = system
        self.radii = np.asarray(radii, dtype=float)
        self.collision_check = collision_check
        self.max_step = max_step
        self.h = max_step
        self.steps = 0

    def advance(self, X, theta, direction, delta):
        X = np.array(X, dtype=np.complex128)
        theta = np.array(theta, dtype=float)
        sgn = 1.0 if delta >= 0 else -1.0
        remaining = abs(delta)
        while remaining > 1e-14:
            h = min(self.h, remaining)
            T0 = targets(theta, self.radii)
            tan = self.system.tangent(X, T0, direction)
            th1 = theta.copy()
            th1[:, direction] += sgn * h
            T1 = targets(th1, self.radii)
            pred = X + (sgn * h) * tan
            Xn, ok, first = self.system.newton(pred, T1, max_iter=6)
            move = h * np.max(np.abs(tan), axis=1)
            scale = 1.0 + np.max(np.abs(X), axis=1)
            good = ok & (first <= 0.25 * move + 1e-12 * scale)
            if good.all() and self.collision_check and _min_pair_distance(Xn) < COLLISION_TOL:
                good[:] = False
            if good.all():
                X, theta = Xn, th1
                remaining -= h
                self.steps += 1
                self.h = min(self.h * 1.5, self.max_step)
                continue
            self.h = h / 2
            if self.h < STEP_FLOOR:
                what = "branch collision" if self.collision_check else "step floor reached"
                raise ContinuationError(f"continuation failed ({what}) near theta = {theta[0]}")
        return X, theta

    def sample(self, X, theta, direction, laps, N):
        """Samples at theta_direction + 2*pi*k/N for k < laps*N, plus the
        point after the last step (for closure checks)."""
        out = np.empty((laps * N,) + X.shape, dtype=np.complex128)
        d = TWO_PI / N
        for k in range(laps * N):
            out[k] = X
            X, theta = self.advance(X, theta, direction, d)
        return out, X, theta
