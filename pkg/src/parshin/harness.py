"""Per-flag residue runs with engine cross-checks, the reciprocity and
vanishing harnesses, and Parshin-point reports."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .deck import ProblemDeck, candidate_problem
from .flag import FlagError, FlagProblem, validate_parameters
from .numeric.quadrature import QUAD_TOL, residue_numeric_at_flag
from .report import ResidueReport, complex_entry, exact_text
from .symbolic import residues_by_point

__all__ = [
    "ConfigError",
    "FlagOutcome",
    "compute_flag",
    "verify_reciprocity",
    "vanishing_check",
    "parshin_points",
    "CROSS_TOL",
    "RECIPROCITY_TOL",
    "VANISH_TOL",
]

CROSS_TOL = 1e-8
RECIPROCITY_TOL = 1e-9
VANISH_TOL = 1e-10


class ConfigError(ValueError):
    """Deck or flag data that cannot be run as given (exit code 2)."""


@dataclass
class RunOptions:
    engine: str = "both"
    radii: tuple | None = None
    grid: int = 64
    tol: float = QUAD_TOL
    min_levels: int = 1


@dataclass
class FlagOutcome:
    name: str
    engine: str
    symbolic: object = None  # SymbolicResult
    symbolic_error: str | None = None
    numeric: object = None  # NumericFlagResult
    numeric_error: str | None = None
    verdict: str = "PASS"
    notes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.symbolic is not None

    @property
    def value(self):
        """The reported summand: exact when available, else numeric."""
        if self.symbolic is not None:
            return self.symbolic.total
        if self.numeric is not None:
            return self.numeric.total
        return None

    @property
    def difference(self) -> float | None:
        if self.symbolic is None or self.numeric is None:
            return None
        return abs(complex(self.symbolic.total) - self.numeric.total)

    def tree(self) -> dict:
        out = {"name": self.name, "engine": self.engine}
        if self.symbolic is not None:
            s = self.symbolic
            out["symbolic"] = {
                "value": exact_text(s.total),
                "points": [{"sheets": list(g), "value": exact_text(v)} for g, v in s.per_point],
                "order": s.order,
                "base_change": s.base_change,
            }
        elif self.symbolic_error is not None:
            out["symbolic"] = {"error": self.symbolic_error}
        else:
            out["symbolic"] = None
        if self.numeric is not None:
            r = self.numeric
            out["numeric"] = {
                "value": complex_entry(r.total),
                "error_estimate": float(r.error),
                "radii": [float(x) for x in r.radii],
                "monodromy": [r.monodromy.cycle_notation(i) for i in range(len(r.monodromy.perms))],
                "points": [
                    {
                        "label": pt.label,
                        "members": [int(k) for k in pt.members],
                        "covering": [int(m) for m in cov],
                        "value": complex_entry(q.value),
                        "grid": [int(g) for g in q.grids],
                        "history": [[int(N), float(v.real), float(v.imag)] for N, v in q.history],
                    }
                    for pt, cov, q in zip(r.points, r.coverings, r.components)
                ],
            }
        elif self.numeric_error is not None:
            out["numeric"] = {"error": self.numeric_error}
        else:
            out["numeric"] = None
        d = self.difference
        out["difference"] = d
        out["notes"] = list(self.notes)
        out["verdict"] = self.verdict
        return out

    def summary(self) -> str:
        parts = [f"{self.name}:"]
        if self.symbolic is not None:
            parts.append(f"symbolic {exact_text(self.symbolic.total)}")
        elif self.symbolic_error is not None:
            parts.append(f"symbolic unavailable ({self.symbolic_error})")
        if self.numeric is not None:
            z = self.numeric.total
            parts.append(f"numeric {z.real:.15g}{z.imag:+.3e}i (radii {', '.join(f'{r:g}' for r in self.numeric.radii)})")
        elif self.numeric_error is not None:
            parts.append(f"numeric failed ({self.numeric_error})")
        parts.append(self.verdict)
        return " ".join(parts)


def _validate(p: FlagProblem):
    errs = p.check_incidence()
    if errs:
        raise ConfigError(f"{p.name or 'flag'}: " + "; ".join(errs))
    rep = validate_parameters(p)
    if not rep.ok:
        raise ConfigError(f"{p.name or 'flag'}: invalid local parameters: {rep}")
    return rep


def compute_flag(p: FlagProblem, opts: RunOptions | None = None, validate: bool = True) -> FlagOutcome:
    """Residue at one flag with the selected engine(s).

    Engine failures are recorded in the outcome (verdict FAIL); only a
    malformed flag raises ConfigError.
    """
    opts = opts or RunOptions()
    if validate:
        _validate(p)
    out = FlagOutcome(p.name, opts.engine)
    if opts.engine in ("symbolic", "both"):
        try:
            out.symbolic = residues_by_point(p)
        except Exception as exc:  # noqa: BLE001 - reported per flag
            out.symbolic_error = f"{type(exc).__name__}: {exc}"
    if opts.engine in ("numeric", "both"):
        try:
            out.numeric = residue_numeric_at_flag(p, opts.radii, N0=opts.grid, tol=opts.tol,
                                                  min_levels=opts.min_levels)
        except Exception as exc:  # noqa: BLE001
            out.numeric_error = f"{type(exc).__name__}: {exc}"
    if out.symbolic is None and out.numeric is None:
        out.verdict = "FAIL"
    elif opts.engine == "symbolic" and out.symbolic is None:
        out.verdict = "FAIL"
    elif opts.engine == "numeric" and out.numeric is None:
        out.verdict = "FAIL"
    elif opts.engine == "both":
        if out.numeric is None:
            out.verdict = "FAIL"
        elif out.symbolic is None:
            out.notes.append("no exact branch expansion; numeric value reported alone")
        elif out.difference >= CROSS_TOL:
            out.verdict = "FAIL"
            out.notes.append(f"engines disagree by {out.difference:.3e}")
    return out


def _deck_options(deck: ProblemDeck, engine=None, radii=None, grid=None, tol=None) -> RunOptions:
    return RunOptions(
        engine=engine or deck.engine,
        radii=radii if radii is not None else deck.radii,
        grid=grid or deck.numeric.grid,
        tol=tol or deck.numeric.tol,
    )


def compute(deck: ProblemDeck, opts: RunOptions | None = None) -> ResidueReport:
    opts = opts or _deck_options(deck)
    f = compute_flag(deck.problem, opts)
    return ResidueReport("compute", deck.name, [f], verdict=f.verdict)


def _sum(outcomes):
    vals = [o.value for o in outcomes]
    if any(v is None for v in vals):
        return None, False
    if all(o.exact for o in outcomes):
        from fractions import Fraction

        from .algebra.scalars import normalize

        return normalize(sum(vals, Fraction(0))), True
    # sum the floats that the report prints (17 digits round-trip exactly)
    total = 0j
    for v in vals:
        total += complex(v)
    return total, False


def verify_reciprocity(deck: ProblemDeck, opts: RunOptions | None = None, workers: int | None = None) -> ResidueReport:
    """Residues at every candidate flag and their sum."""
    if not deck.candidates:
        raise ConfigError("reciprocity needs a [candidates] section")
    opts = opts or _deck_options(deck)
    problems = []
    for c in deck.candidates:
        try:
            problems.append(candidate_problem(deck, c))
        except FlagError as exc:
            raise ConfigError(f"candidate {c.name!r}: {exc}") from None
    for q in problems:
        _validate(q)
    # per-candidate radii are chosen independently
    run = RunOptions(opts.engine, None, opts.grid, opts.tol, opts.min_levels)
    workers = workers or min(len(problems), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(compute_flag, q, run, False) for q in problems]
        outcomes = [f.result() for f in futures]  # ordered merge
    for c, o in zip(deck.candidates, outcomes):
        o.name = c.name
    total, exact = _sum(outcomes)
    rep = ResidueReport("reciprocity", deck.name, outcomes, total)
    if any(o.verdict != "PASS" for o in outcomes) or total is None:
        rep.verdict = "FAIL"
    elif exact:
        rep.verdict = "PASS" if total == 0 else "FAIL"
    else:
        rep.verdict = "PASS" if abs(total) < RECIPROCITY_TOL else "FAIL"
    return rep


def polar_misconfiguration(p: FlagProblem) -> str | None:
    """Why the flag is not off the polar set of the form, or None."""
    dens = p.form.polar_polynomials()
    if p.n == 1:
        for d in dens:
            if d.evaluate(p.point) == 0:
                return f"V_0 lies on the polar set ({d} = 0)"
        return None
    c = list(p.curve_unirat())
    for d in dens:
        if d.evaluate(c) == 0:
            return f"the curve V_1 lies in the polar set ({d} = 0)"
    return None


def vanishing_check(deck: ProblemDeck, opts: RunOptions | None = None) -> ResidueReport:
    """The residue at an off-stratification flag must vanish."""
    p = deck.problem
    why = polar_misconfiguration(p)
    if why is not None:
        raise ConfigError(f"misconfigured off-flag: {why}")
    opts = opts or _deck_options(deck)
    f = compute_flag(p, opts)
    if f.symbolic is not None and f.symbolic.total != 0:
        f.verdict = "FAIL"
        f.notes.append("symbolic residue is not exactly 0")
    if f.numeric is not None and abs(f.numeric.total) >= VANISH_TOL:
        f.verdict = "FAIL"
        f.notes.append(f"numeric residue {abs(f.numeric.total):.3e} is not below {VANISH_TOL:g}")
    return ResidueReport("vanish", deck.name, [f], verdict=f.verdict)


def parshin_points(deck: ProblemDeck, opts: RunOptions | None = None) -> tuple[ResidueReport, str]:
    """Parshin points as monodromy orbits, with a one-line summary."""
    from .numeric.radii import choose_radii
    from .numeric.torus import local_monodromy

    p = deck.problem
    rep_v = _validate(p)
    opts = opts or _deck_options(deck)
    radii = opts.radii if opts.radii is not None else choose_radii(p)
    mono = local_monodromy(p, radii)
    covs = [mono.covering(o) for o in mono.orbits]
    k = len(mono.orbits)
    head = f"{k} Parshin point" + ("" if k == 1 else "s")
    line = f"{head}; monodromy: {mono.cycle_notation(0)}; covering " + ", ".join(
        "(" + ",".join(str(m) for m in c) + ")" for c in covs)
    extra = {
        "radii": [float(r) for r in radii],
        "local_points": int(mono.start.shape[0]),
        "monodromy": [mono.cycle_notation(i) for i in range(len(mono.perms))],
        "permutations": [[int(j) for j in perm] for perm in mono.perms],
        "points": [
            {"label": f"a{i + 1}", "members": [int(m) for m in o], "covering": [int(m) for m in c]}
            for i, (o, c) in enumerate(zip(mono.orbits, covs))
        ],
        "validation": list(rep_v.notes),
    }
    rep = ResidueReport("points", deck.name, [], extra=extra)
    return rep, line
