"""Residue reports: an ordered tree of plain values written as deterministic
JSON (fixed key order, floats with 17 significant digits) or CSV."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .algebra.scalars import normalize

__all__ = ["ResidueReport", "SCHEMA", "to_json", "format_float", "exact_text", "complex_entry", "history_csv"]

SCHEMA = 1


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        x = 0.0  # drop the sign of zero
    return format(x, ".17g")


def exact_text(v) -> str:
    return str(normalize(v))


def complex_entry(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ch < " ":
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _emit(v, indent: int, out: list):
    pad = "  " * indent
    if v is None:
        out.append("null")
    elif isinstance(v, bool):
        out.append("true" if v else "false")
    elif isinstance(v, int):
        out.append(str(v))
    elif isinstance(v, float):
        out.append(format_float(v))
    elif isinstance(v, str):
        out.append(_string(v))
    elif isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        items = list(v.items())
        for i, (k, x) in enumerate(items):
            out.append(pad + "  " + _string(str(k)) + ": ")
            _emit(x, indent + 1, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(v, (list, tuple)):
        if not v:
            out.append("[]")
            return
        if all(isinstance(x, (int, float, str)) or x is None for x in v):
            parts = []
            for x in v:
                sub: list = []
                _emit(x, 0, sub)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, x in enumerate(v):
            out.append(pad + "  ")
            _emit(x, indent + 1, out)
            out.append(",\n" if i + 1 < len(v) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(tree) -> str:
    out: list = []
    _emit(tree, 0, out)
    return "".join(out) + "\n"


@dataclass
class ResidueReport:
    """Per-flag outcomes of one command plus an optional reciprocity sum."""

    command: str
    deck: str
    flags: list = field(default_factory=list)  # FlagOutcome
    total: object = None  # exact scalar, complex, or None
    verdict: str = "PASS"
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def tree(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "deck": self.deck}
        out["flags"] = [f.tree() for f in self.flags]
        if self.total is not None:
            if isinstance(self.total, complex):
                out["sum"] = complex_entry(self.total)
            else:
                out["sum"] = {"exact": exact_text(self.total)}
        out.update(self.extra)
        out["notes"] = list(self.notes)
        out["verdict"] = self.verdict
        return out

    def to_json(self) -> str:
        return to_json(self.tree())

    def write_json(self, path: str):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())


def history_csv(flags) -> str:
    """Convergence tables of every numeric component, one row per grid."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["flag", "point", "N", "real", "imag", "abs_change"])
    for f in flags:
        if f.numeric is None:
            continue
        for pt, q in zip(f.numeric.points, f.numeric.components):
            for (N, v), ch in zip(q.history, q.changes()):
                w.writerow([f.name, pt.label, N, format_float(v.real), format_float(v.imag),
                            "" if ch != ch else format_float(ch)])
    return buf.getvalue()
