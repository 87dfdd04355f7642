"""Flag problems compiled to packed complex polynomial systems."""

from __future__ import annotations

import numpy as np

from ..algebra import Polynomial
from . import kernels

__all__ = [
    "PackedPolys",
    "NumericSystem",
    "ContinuationError",
    "random_point_on_variety",
    "jacobian_at",
]


class ContinuationError(RuntimeError):
    """Path tracking failed (step floor, collision, lost point)."""


class PackedPolys:
    """Several polynomials in the same variables, stored as one monomial
    table: ``exps`` (K, d), ``coeffs`` (K,), ``owner`` (K,).

    With an exact (rational) ``center`` the polynomials are re-expanded exactly in
    x - center and evaluated there; near the center this avoids the
    cancellation of evaluating expanded coefficients far from the origin.
    """

    def __init__(self, polys, variables, center=None):
        variables = tuple(variables)
        if center is not None and all(c == 0 for c in center):
            center = None
        shift = None
        if center is not None:
            shift = [Polynomial.variable(variables, v) + c for v, c in zip(variables, center)]
        self.center = None if center is None else np.array([complex(c) for c in center])
        rows, cs, own = [], [], []
        for k, p in enumerate(polys):
            q = p.to_variables(variables) if tuple(p.vars) != variables else p
            if shift is not None:
                q = q.evaluate(shift)
                if not isinstance(q, Polynomial):
                    q = Polynomial.constant(variables, q)
            for e, c in q.sorted_terms():
                rows.append(e)
                cs.append(complex(c))
                own.append(k)
        d = len(variables)
        self.exps = np.array(rows, dtype=np.int64).reshape(-1, d)
        self.coeffs = np.array(cs, dtype=np.complex128)
        self.owner = np.array(own, dtype=np.int64)
        self.npoly = len(polys)
        self.dim = d

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.complex128))
        if self.center is not None:
            X = X - self.center
        return kernels.eval_system(self.exps, self.coeffs, self.owner, self.npoly, X)


class NumericSystem:
    """Equations ``P(x) = 0`` (if V_n is a hypersurface) and
    ``num_i(x) - T_i den_i(x) = 0`` with ``T_i = delta_i exp(i theta_i)``,
    plus the form's polynomials for quadrature."""

    @classmethod
    def of(cls, problem):
        """The system of ``problem``, built once and kept on the problem."""
        sysm = problem.__dict__.get("_numeric_system")
        if sysm is None:
            sysm = cls(problem)
            object.__setattr__(problem, "_numeric_system", sysm)
        return sysm

    def __init__(self, problem):
        self.problem = problem
        self.n = problem.n
        self.dim = problem.dim
        self.has_variety = problem.variety is not None
        polys = []
        if self.has_variety:
            polys.append(problem.variety)
        self.u_index = []
        for u in problem.params:
            self.u_index.append((len(polys), len(polys) + 1))
            polys += [u.num, u.den]
        self.n_eq = len(polys)
        self.term_index = []
        for t in problem.form.terms:
            i0 = len(polys)
            polys += [t.coeff.num, t.coeff.den] + list(t.diffs)
            self.term_index.append((i0, i0 + 1, tuple(range(i0 + 2, i0 + 2 + len(t.diffs)))))
        self.packed = PackedPolys(polys, problem.variables, problem.point)
        self.eq_packed = PackedPolys(polys[: self.n_eq], problem.variables, problem.point)

    # equations ------------------------------------------------------------
    def residual(self, X, T):
        """F (B, d) and J (B, d, d) at points X (B, d) with targets T (B, n)."""
        vals, grads = self.eq_packed(X)
        B = X.shape[0]
        F = np.empty((B, self.dim), dtype=np.complex128)
        J = np.empty((B, self.dim, self.dim), dtype=np.complex128)
        r = 0
        if self.has_variety:
            F[:, 0] = vals[:, 0]
            J[:, 0, :] = grads[:, 0, :]
            r = 1
        for i, (a, b) in enumerate(self.u_index):
            F[:, r + i] = vals[:, a] - T[:, i] * vals[:, b]
            J[:, r + i, :] = grads[:, a, :] - T[:, i, None] * grads[:, b, :]
        return F, J

    def u_values(self, X):
        vals, _ = self.eq_packed(X)
        return np.stack([vals[:, a] / vals[:, b] for a, b in self.u_index], axis=1)

    def newton(self, X, T, max_iter=8, tol=1e-13):
        """Batched Newton. Returns (X, converged mask, first step norms)."""
        X = np.array(X, dtype=np.complex128)
        first = None
        done = np.zeros(X.shape[0], dtype=bool)
        for it in range(max_iter):
            F, J = self.residual(X, T)
            dX = kernels.solve_batch(J, F)
            step = np.abs(dX).max(axis=1)
            finite = np.isfinite(step)
            if not finite.all():
                step[~finite] = np.inf
                dX[~finite] = 0
            if first is None:
                first = step.copy()
            if done.any():
                dX[done] = 0
            X -= dX
            done |= step <= tol * (1.0 + np.abs(X).max(axis=1))
            if done.all():
                break
        return X, done & np.isfinite(X).all(axis=1), first

    def tangent(self, X, T, direction: int):
        """dX/dtheta_direction keeping the other constraints fixed."""
        vals, _ = self.eq_packed(X)
        _, J = self.residual(X, T)
        rhs = np.zeros((X.shape[0], self.dim), dtype=np.complex128)
        r = 1 if self.has_variety else 0
        a, b = self.u_index[direction]
        rhs[:, r + direction] = 1j * T[:, direction] * vals[:, b]
        return kernels.solve_batch(J, rhs)

    def condition(self, X, T):
        _, J = self.residual(X, T)
        return np.linalg.cond(J)

    # the form -------------------------------------------------------------
    def form_pairing(self, X, tangents):
        """omega(t_1, ..., t_n) at each row of X; also min |den| of the
        coefficients over the batch (pole proximity)."""
        vals, grads = self.packed(X)
        out = np.zeros(X.shape[0], dtype=np.complex128)
        min_den = np.inf
        for inum, iden, gs in self.term_index:
            R = vals[:, inum] / vals[:, iden]
            min_den = min(min_den, float(np.min(np.abs(vals[:, iden]))))
            if self.n == 1:
                out += R * np.einsum("bj,bj->b", grads[:, gs[0], :], tangents[0])
            else:
                a1 = np.einsum("bj,bj->b", grads[:, gs[0], :], tangents[0])
                a2 = np.einsum("bj,bj->b", grads[:, gs[0], :], tangents[1])
                b1 = np.einsum("bj,bj->b", grads[:, gs[1], :], tangents[0])
                b2 = np.einsum("bj,bj->b", grads[:, gs[1], :], tangents[1])
                out += R * (a1 * b2 - a2 * b1)
        return out, min_den

    def polar_values(self, X):
        vals, _ = self.packed(X)
        return np.stack([vals[:, iden] for _, iden, _ in self.term_index], axis=1)


def random_point_on_variety(problem, seed: int = 2024) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d = problem.dim
    x = rng.normal(size=d) * 0.7 + 1j * rng.normal(size=d) * 0.7
    if problem.variety is None:
        return x
    P = problem.variety
    j = max(range(d), key=lambda k: P.degree(problem.variables[k]))
    deg = P.degree(problem.variables[j])
    coeffs = np.zeros(deg + 1, dtype=np.complex128)
    for e, c in P.terms.items():
        m = complex(c)
        for k, ek in enumerate(e):
            if k != j:
                m *= x[k] ** ek
        coeffs[e[j]] += m
    roots = np.roots(coeffs[::-1])
    x[j] = roots[0]
    return x


def jacobian_at(problem, x) -> np.ndarray:
    """Rows: grad P (if any) and grad u_i at x."""
    sysm = NumericSystem.of(problem)
    vals, grads = sysm.eq_packed(np.asarray(x)[None, :])
    rows = []
    if sysm.has_variety:
        rows.append(grads[0, 0])
    for a, b in sysm.u_index:
        rows.append((grads[0, a] * vals[0, b] - vals[0, a] * grads[0, b]) / vals[0, b] ** 2)
    return np.array(rows)
