"""Instance files (JSON envelope or DIMACS edge list) and result writers."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import problems as P
from .graphs import Graph


class InputError(ValueError):
    """Malformed or unreadable input."""


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if hasattr(x, "item"):  # numpy scalars
        return _jsonable(x.item())
    return x


def parse_dimacs(text: str) -> Graph:
    """``p edge n m`` header, then ``e u v [w]`` lines with 1-based vertices; ``c`` lines are comments."""
    n = m = None
    edges, weights = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] not in ("edge", "col"):
                    raise InputError(f"line {lineno}: expected 'p edge n m'")
                n, m = int(parts[2]), int(parts[3])
            elif parts[0] == "e":
                if n is None:
                    raise InputError(f"line {lineno}: edge before the 'p' header")
                if len(parts) not in (3, 4):
                    raise InputError(f"line {lineno}: expected 'e u v [w]'")
                u, v = int(parts[1]) - 1, int(parts[2]) - 1
                edges.append((u, v))
                weights.append(float(parts[3]) if len(parts) == 4 else None)
            else:
                raise InputError(f"line {lineno}: unknown record {parts[0]!r}")
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"line {lineno}: {exc}") from None
    if n is None:
        raise InputError("missing 'p edge n m' header")
    if m is not None and m != len(edges):
        raise InputError(f"header declares {m} edges, found {len(edges)}")
    w = None
    if any(x is not None for x in weights):
        w = tuple(1.0 if x is None else x for x in weights)
    try:
        return Graph(n, tuple(edges), w)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _looks_like_dimacs(text: str) -> bool:
    for line in text.splitlines():
        s = line.strip()
        if s:
            return s[0] in "cpe" and not s.startswith("{")
    return False


def load_instance(path: str | Path, problem: str | None = None, extra: dict | None = None) -> P.Problem:
    """Read an instance; ``problem`` overrides (or, for DIMACS, supplies) the kind."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    extra = {k: v for k, v in (extra or {}).items() if v is not None}
    if _looks_like_dimacs(text):
        g = parse_dimacs(text)
        kind = problem or "MaxCut"
        data = {"n": g.n, "edges": [list(e) for e in g.edges], **extra}
        if g.weights is not None:
            data["weights"] = list(g.weights)
        return _build(kind, data, None)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "data" not in doc:
        raise InputError(f"{path}: expected an object with 'problem', 'sense' and 'data'")
    kind = problem or doc.get("problem")
    if not kind:
        raise InputError(f"{path}: no problem kind given")
    data = dict(doc["data"]) if isinstance(doc["data"], dict) else None
    if data is None:
        raise InputError(f"{path}: 'data' must be an object")
    data.update(extra)
    return _build(kind, data, doc.get("sense"))


def _build(kind: str, data: dict, sense: str | None) -> P.Problem:
    try:
        inst = P.from_payload(kind, data)
    except KeyError as exc:
        raise InputError(f"missing or unknown field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad {kind} payload: {exc}") from None
    if sense is not None and sense != inst.sense:
        raise InputError(f"declared sense {sense!r} but {inst.kind} is a {inst.sense} problem")
    return inst


def envelope(inst: P.Problem) -> dict:
    return {"problem": inst.kind, "sense": inst.sense, "data": inst.payload()}


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def dumps_csv(header: list[str], rows: list[list], comments: list[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else ("" if x is None else x) for x in r])
    return buf.getvalue()


def write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        import sys

        sys.stdout.write(text)
        return
    Path(out).write_text(text)
