"""Problem decks: a line-oriented text format for flags, parameters, forms,
reciprocity candidates and numeric controls.

Grammar (one statement per line, ``#`` starts a comment)::

    deck     := { section }
    section  := "[" name "]" { entry }
    entry    := key "=" value
    value    := expression | expression-list | number

Sections: ``ambient`` (vars, n), ``variety`` (equation), ``flag`` (param,
curve, point, at), ``parameters`` (u1, u2), ``form`` (repeated ``term = R ;
G1 [; G2]`` meaning R dG1 ^ dG2), ``candidates`` (``name.curve``,
``name.point``, ``name.at``, ``name.u1``, ``name.u2``; a point may be
``infinity`` for n = 1 on the line), ``numeric`` (delta1, delta2, grid, tol,
engine). Expressions are infix over the declared variables with integer or
rational literals and ``I`` for the imaginary unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Polynomial, RationalFunction
from .algebra.parse import ExpressionError, parse_polynomial, parse_rational
from .flag import FlagError, FlagProblem
from .forms import DifferentialForm, FormTerm

__all__ = [
    "Candidate",
    "NumericControls",
    "ProblemDeck",
    "DeckError",
    "parse_deck",
    "load_deck",
    "serialize_deck",
    "candidate_problem",
    "ENGINES",
]

ENGINES = ("symbolic", "numeric", "both")
SECTIONS = ("ambient", "variety", "flag", "parameters", "form", "candidates", "numeric")


class DeckError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        where = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(message + where)
        self.offset = offset


@dataclass(frozen=True)
class Candidate:
    name: str
    curve: tuple | None = None
    point: object = None  # tuple of scalars, or "infinity"
    params: tuple = ()
    at: object = None


@dataclass(frozen=True)
class NumericControls:
    delta1: float | None = None
    delta2: float | None = None
    grid: int = 64
    tol: float = 1e-10


@dataclass(frozen=True)
class ProblemDeck:
    problem: FlagProblem
    candidates: tuple = ()
    engine: str = "both"
    numeric: NumericControls = NumericControls()
    name: str = field(default="", compare=False)

    @property
    def radii(self):
        d = (self.numeric.delta1, self.numeric.delta2)[: self.problem.n]
        return None if any(x is None for x in d) else d


@dataclass
class _Entry:
    key: str
    value: str
    key_off: int
    val_off: int


_KEY = re.compile(r"[A-Za-z_][A-Za-z_0-9.]*$")


def _split_lines(text: str):
    off = 0
    for raw in text.splitlines(keepends=True):
        yield raw.rstrip("\r\n"), off
        off += len(raw.encode())


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _tokenize(text: str) -> dict:
    sections: dict = {}
    current = None
    for line, off in _split_lines(text):
        body = _strip_comment(line)
        if not body.strip():
            continue
        lead = len(body) - len(body.lstrip())
        stripped = body.strip()
        pos = off + len(body[:lead].encode())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise DeckError("unterminated section header", pos)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise DeckError(f"unknown section [{name}]", pos)
            if name in sections:
                raise DeckError(f"duplicate section [{name}]", pos)
            current = sections[name] = []
            continue
        if current is None:
            raise DeckError("entry outside of any section", pos)
        if "=" not in stripped:
            raise DeckError("expected 'key = value'", pos)
        k, v = body.split("=", 1)
        key = k.strip()
        if not _KEY.match(key):
            raise DeckError(f"bad key {key!r}", pos)
        vlead = len(v) - len(v.lstrip())
        val_off = off + len((k + "=" + v[:vlead]).encode())
        current.append(_Entry(key, v.strip(), pos, val_off))
    return sections


def _split_list(e: _Entry, sep: str):
    """Split on top-level separators, keeping byte offsets."""
    parts, depth, start = [], 0, 0
    s = e.value
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((s[start:i], start))
            start = i + 1
    parts.append((s[start:], start))
    out = []
    for text, st in parts:
        lead = len(text) - len(text.lstrip())
        out.append((text.strip(), e.val_off + len(s[: st + lead].encode())))
    return out


def _single(section, key, required=True):
    hits = [e for e in section if e.key == key]
    if len(hits) > 1:
        raise DeckError(f"duplicate key {key!r}", hits[1].key_off)
    if not hits:
        if required:
            raise DeckError(f"missing key {key!r}")
        return None
    return hits[0]


def _expr(text, off, variables, poly=False):
    try:
        return parse_polynomial(text, variables, off) if poly else parse_rational(text, variables, off)
    except ExpressionError as exc:
        raise DeckError(exc.message, exc.offset) from None


def _scalar(text, off):
    r = _expr(text, off, ())
    if not r.den.is_constant():
        raise DeckError("expected a number", off)
    return r.num.constant_term() / r.den.constant_term()


def _float(e: _Entry) -> float:
    try:
        return float(Fraction(e.value))
    except ValueError:
        try:
            return float(e.value)
        except ValueError:
            raise DeckError(f"expected a number for {e.key!r}", e.val_off) from None


def _known_keys(section, allowed, name):
    for e in section:
        if e.key not in allowed:
            raise DeckError(f"unknown key {e.key!r} in [{name}]", e.key_off)


def parse_deck(text: str, name: str = "") -> ProblemDeck:
    secs = _tokenize(text)
    if "ambient" not in secs:
        raise DeckError("missing [ambient] section")
    amb = secs["ambient"]
    _known_keys(amb, ("vars", "n"), "ambient")
    ve = _single(amb, "vars")
    variables = tuple(t for t, _ in _split_list(ve, ","))
    for (t, o) in _split_list(ve, ","):
        if not _KEY.match(t) or "." in t or t == "I":
            raise DeckError(f"bad variable name {t!r}", o)
    if len(set(variables)) != len(variables):
        raise DeckError("duplicate variable", ve.val_off)
    ne = _single(amb, "n")
    if ne.value not in ("1", "2"):
        raise DeckError("n must be 1 or 2", ne.val_off)
    n = int(ne.value)

    variety = None
    if "variety" in secs:
        _known_keys(secs["variety"], ("equation",), "variety")
        ee = _single(secs["variety"], "equation")
        if ee.value != "affine":
            variety = _expr(ee.value, ee.val_off, variables, poly=True)

    fl = secs.get("flag")
    if fl is None:
        raise DeckError("missing [flag] section")
    _known_keys(fl, ("param", "curve", "point", "at"), "flag")
    pe = _single(fl, "point")
    point = tuple(_scalar(t, o) for t, o in _split_list(pe, ","))
    curve, param, at = None, "tau", None
    if n == 2:
        pme = _single(fl, "param", required=False)
        if pme is not None:
            param = pme.value
            if not _KEY.match(param) or param in variables:
                raise DeckError(f"bad curve parameter {param!r}", pme.val_off)
        ce = _single(fl, "curve")
        curve = tuple(_expr(t, o, (param,)) for t, o in _split_list(ce, ","))
        ae = _single(fl, "at", required=False)
        if ae is not None:
            at = _scalar(ae.value, ae.val_off)
    else:
        for k in ("curve", "param", "at"):
            e = _single(fl, k, required=False)
            if e is not None:
                raise DeckError(f"[flag] {k} is only used when n = 2", e.key_off)

    pa = secs.get("parameters")
    if pa is None:
        raise DeckError("missing [parameters] section")
    _known_keys(pa, tuple(f"u{i}" for i in range(1, n + 1)), "parameters")
    params = tuple(_expr(_single(pa, f"u{i}").value, _single(pa, f"u{i}").val_off, variables) for i in range(1, n + 1))

    fo = secs.get("form")
    if fo is None:
        raise DeckError("missing [form] section")
    _known_keys(fo, ("term",), "form")
    terms = []
    for e in fo:
        parts = _split_list(e, ";")
        if len(parts) != n + 1:
            raise DeckError(f"a form term needs a coefficient and {n} differential(s)", e.val_off)
        R = _expr(parts[0][0], parts[0][1], variables)
        Gs = tuple(_expr(t, o, variables, poly=True) for t, o in parts[1:])
        terms.append(FormTerm(R, Gs))
    if not terms:
        raise DeckError("empty [form] section")
    form = DifferentialForm(tuple(terms), variables)

    cands = _parse_candidates(secs.get("candidates", []), n, variables, param)
    numeric, engine = _parse_numeric(secs.get("numeric", []))
    try:
        problem = FlagProblem(n, variables, variety, point, params, form, curve, param, at, name)
    except FlagError as exc:
        raise DeckError(str(exc)) from None
    deck = ProblemDeck(problem, cands, engine, numeric, name)
    for c in cands:
        try:
            candidate_problem(deck, c)
        except FlagError as exc:
            raise DeckError(f"candidate {c.name!r}: {exc}") from None
    return deck


def _parse_candidates(entries, n, variables, param):
    order, data = [], {}
    for e in entries:
        if "." not in e.key:
            raise DeckError("candidate keys look like name.field", e.key_off)
        cname, fld = e.key.split(".", 1)
        allowed = ("curve", "at", "u1", "u2") if n == 2 else ("point", "u1")
        if fld not in allowed:
            raise DeckError(f"unknown candidate field {fld!r}", e.key_off)
        if cname not in data:
            order.append(cname)
            data[cname] = {}
        if fld in data[cname]:
            raise DeckError(f"duplicate key {e.key!r}", e.key_off)
        data[cname][fld] = e
    out = []
    for cname in order:
        d = data[cname]
        if n == 2:
            if "curve" not in d or "u1" not in d or "u2" not in d:
                raise DeckError(f"candidate {cname!r} needs curve, u1 and u2", d[next(iter(d))].key_off)
            curve = tuple(_expr(t, o, (param,)) for t, o in _split_list(d["curve"], ","))
            at = _scalar(d["at"].value, d["at"].val_off) if "at" in d else None
            params = (_expr(d["u1"].value, d["u1"].val_off, variables), _expr(d["u2"].value, d["u2"].val_off, variables))
            out.append(Candidate(cname, curve, None, params, at))
        else:
            if "point" not in d:
                raise DeckError(f"candidate {cname!r} needs a point", d[next(iter(d))].key_off)
            pe = d["point"]
            if pe.value == "infinity":
                point = "infinity"
            else:
                point = tuple(_scalar(t, o) for t, o in _split_list(pe, ","))
            params = (_expr(d["u1"].value, d["u1"].val_off, variables),) if "u1" in d else ()
            out.append(Candidate(cname, None, point, params, None))
    return tuple(out)


def _parse_numeric(entries):
    _known_keys(entries, ("delta1", "delta2", "grid", "tol", "engine"), "numeric")
    kw = {}
    engine = "both"
    for e in entries:
        if e.key == "engine":
            if e.value not in ENGINES:
                raise DeckError(f"engine must be one of {ENGINES}", e.val_off)
            engine = e.value
        elif e.key == "grid":
            if not e.value.isdigit() or int(e.value) < 4:
                raise DeckError("grid must be an integer >= 4", e.val_off)
            kw["grid"] = int(e.value)
        else:
            v = _float(e)
            if v <= 0:
                raise DeckError(f"{e.key} must be positive", e.val_off)
            kw[e.key] = v
    return NumericControls(**kw), engine


def load_deck(path: str) -> ProblemDeck:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DeckError("deck is not valid UTF-8", exc.start) from None
    import os

    return parse_deck(text, os.path.splitext(os.path.basename(path))[0])


# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return str(x)


def _fmt_num(x) -> str:
    return repr(float(x))


def serialize_deck(deck: ProblemDeck) -> str:
    p = deck.problem
    lines = ["[ambient]", "vars = " + ", ".join(p.variables), f"n = {p.n}", ""]
    lines += ["[variety]", "equation = " + (str(p.variety) if p.variety is not None else "affine"), ""]
    lines += ["[flag]"]
    if p.n == 2:
        lines.append(f"param = {p.curve_param}")
        lines.append("curve = " + ", ".join(str(c) for c in p.curve))
        lines.append(f"at = {p.curve_at}")
    lines.append("point = " + ", ".join(_fmt(c) for c in p.point))
    lines.append("")
    lines += ["[parameters]"] + [f"u{i} = {u}" for i, u in enumerate(p.params, 1)] + [""]
    lines += ["[form]"] + [f"term = {t}" for t in p.form.terms] + [""]
    if deck.candidates:
        lines.append("[candidates]")
        for c in deck.candidates:
            if c.curve is not None:
                lines.append(f"{c.name}.curve = " + ", ".join(str(x) for x in c.curve))
                if c.at is not None:
                    lines.append(f"{c.name}.at = {c.at}")
            if c.point is not None:
                pt = c.point if c.point == "infinity" else ", ".join(_fmt(x) for x in c.point)
                lines.append(f"{c.name}.point = {pt}")
            for i, u in enumerate(c.params, 1):
                lines.append(f"{c.name}.u{i} = {u}")
        lines.append("")
    nc = deck.numeric
    lines.append("[numeric]")
    if nc.delta1 is not None:
        lines.append(f"delta1 = {_fmt_num(nc.delta1)}")
    if nc.delta2 is not None:
        lines.append(f"delta2 = {_fmt_num(nc.delta2)}")
    lines.append(f"grid = {nc.grid}")
    lines.append(f"tol = {_fmt_num(nc.tol)}")
    lines.append(f"engine = {deck.engine}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def _infinity_chart(p: FlagProblem) -> FlagProblem:
    """The flag at t = infinity on the projective line via t = 1/t'."""
    if p.n != 1 or p.variety is not None or p.dim != 1:
        raise FlagError("the point at infinity is only available for n = 1 on the line")
    (var,) = p.variables
    t = RationalFunction(Polynomial.variable(p.variables, var))
    inv = RationalFunction.lift(1, p.variables) / t
    terms = []
    for term in p.form.terms:
        R = term.coeff.substitute([inv])
        G = term.diffs[0]
        dG = RationalFunction(G.partial(var)).substitute([inv])
        # d(G(1/t')) = G'(1/t') * (-1/t'^2) dt'
        terms.append(FormTerm(R * dG * (-(inv * inv)), (Polynomial.variable(p.variables, var),)))
    form = DifferentialForm(tuple(terms), p.variables)
    return FlagProblem(1, p.variables, None, (Fraction(0),), (t,), form, name=f"{p.name}@infinity")


def candidate_problem(deck: ProblemDeck, c: Candidate) -> FlagProblem:
    p = deck.problem
    if p.n == 2:
        q = FlagProblem(2, p.variables, p.variety, p.point, c.params, p.form, c.curve, p.curve_param, c.at,
                        f"{p.name}:{c.name}")
        errs = q.check_incidence()
        if errs:
            raise FlagError("; ".join(errs))
        return q
    if c.point == "infinity":
        return _infinity_chart(p)
    params = c.params
    if not params:
        if p.dim != 1:
            raise FlagError("candidate points on a plane curve need u1")
        (var,) = p.variables
        params = (RationalFunction(Polynomial.variable(p.variables, var) - c.point[0]),)
    q = FlagProblem(1, p.variables, p.variety, c.point, params, p.form, name=f"{p.name}:{c.name}")
    errs = q.check_incidence()
    if errs:
        raise FlagError("; ".join(errs))
    return q
