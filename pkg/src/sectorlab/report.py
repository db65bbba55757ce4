"""Reports: a plain JSON-compatible tree plus human and machine renderings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FLOAT_DIGITS = 12


def to_plain(obj):
    """Convert numpy scalars/arrays and complex numbers into JSON-ready values.

    Floats are rounded to ``FLOAT_DIGITS`` significant digits so that reports
    are stable across runs and survive a JSON round trip unchanged.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
            return to_plain(z.real)
        return [to_plain(z.real), to_plain(z.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        x = float(f"{x:.{FLOAT_DIGITS}g}")
        return 0.0 if x == 0 else x
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def check(residual, tol) -> dict:
    """A numeric verdict: passes when ``residual <= tol``."""
    r = float(residual)
    return {"residual": r, "tol": float(tol), "pass": bool(r <= tol)}


def flag(ok, detail=None) -> dict:
    out = {"pass": bool(ok)}
    if detail is not None:
        out["detail"] = detail
    return out


@dataclass
class Report:
    command: str
    inputs: list = field(default_factory=list)
    results: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.get("pass", True) for v in _iter_verdicts(self.verdicts))

    def tree(self) -> dict:
        return to_plain(
            {
                "schema_version": 1,
                "command": self.command,
                "inputs": self.inputs,
                "results": self.results,
                "verdicts": self.verdicts,
                "passed": self.passed,
            }
        )


def _iter_verdicts(node):
    if isinstance(node, dict):
        if "pass" in node:
            yield node
        else:
            for v in node.values():
                yield from _iter_verdicts(v)


def render_machine(report: Report) -> str:
    return json.dumps(report.tree(), sort_keys=True, indent=2) + "\n"


def parse_machine(text: str) -> dict:
    return json.loads(text)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if v == 0.0:
            return "0"
        if abs(v) < 1e-3 or abs(v) >= 1e6:
            return f"{v:.3e}"
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def format_table(rows: list) -> list:
    """Aligned text table for a list of flat dicts with equal keys."""
    if not rows:
        return []
    cols = list(rows[0].keys())
    cells = [[_fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    return lines


def _is_table(v) -> bool:
    return (
        isinstance(v, list)
        and bool(v)
        and all(isinstance(r, dict) for r in v)
        and all(not isinstance(x, (dict, list)) or _is_scalar_list(x) for r in v for x in r.values())
        and len({tuple(r.keys()) for r in v}) == 1
    )


def _is_scalar_list(x) -> bool:
    """Lists nesting only scalars render inline."""
    return isinstance(x, list) and all(_is_scalar_list(y) if isinstance(y, list) else not isinstance(y, dict) for y in x)


def _render_node(key, value, indent, out):
    pad = "  " * indent
    if _is_table(value):
        out.append(f"{pad}{key}:")
        out += [pad + "  " + line for line in format_table(value)]
    elif isinstance(value, dict):
        if "pass" in value and "residual" in value:
            status = "PASS" if value["pass"] else "FAIL"
            out.append(f"{pad}{status}  {key}  residual={_fmt(value['residual'])}  tol={_fmt(value['tol'])}")
        elif "pass" in value and set(value) <= {"pass", "detail"}:
            status = "PASS" if value["pass"] else "FAIL"
            detail = f"  ({_fmt(value['detail'])})" if "detail" in value else ""
            out.append(f"{pad}{status}  {key}{detail}")
        else:
            out.append(f"{pad}{key}:")
            for k in value:
                _render_node(k, value[k], indent + 1, out)
    elif isinstance(value, list) and value and any(isinstance(x, (dict, list)) for x in value) and not _is_scalar_list(value):
        out.append(f"{pad}{key}:")
        for i, x in enumerate(value):
            _render_node(f"[{i}]", x, indent + 1, out)
    else:
        out.append(f"{pad}{key}: {_fmt(value)}")


def render_human(report: Report) -> str:
    tree = report.tree()
    out = [f"== {tree['command']} =="]
    for inp in tree["inputs"]:
        out.append(f"input: {inp.get('name') or inp.get('file')} ({inp.get('kind')})")
    for i, res in enumerate(tree["results"]):
        title = res.get("title", f"result {i}") if isinstance(res, dict) else f"result {i}"
        out.append("")
        out.append(f"-- {title} --")
        if isinstance(res, dict):
            for k, v in res.items():
                if k != "title":
                    _render_node(k, v, 0, out)
    if tree["verdicts"]:
        out.append("")
        out.append("-- checks --")
        for k, v in tree["verdicts"].items():
            _render_node(k, v, 0, out)
        out.append("")
        out.append("overall: " + ("PASS" if tree["passed"] else "FAIL"))
    return "\n".join(out) + "\n"


def render_report(report: Report, fmt: str = "human") -> str:
    if fmt == "machine":
        return render_machine(report)
    if fmt == "human":
        return render_human(report)
    raise ValueError(f"unknown format {fmt!r}")
