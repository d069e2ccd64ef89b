"""JSON encodings for scalars, signatures, grids, and reduction traces.

Exact scalars serialize coefficient-exactly (numerators and denominators
as strings, so nothing is lost to float rounding); float scalars as a
real/imaginary pair.  All writers sort object keys at dump time, which
keeps byte-level output stable for identical inputs.
"""

from __future__ import annotations

import json
import os
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, GridError
from .gadget import Transform2x2
from .grid import SignatureGrid
from .scalar import EXACT, FLOAT, Cyclo, ExactBackend, euler_phi
from .signature import Signature, builtin


# -- scalars ------------------------------------------------------------------


def scalar_to_json(x) -> dict:
    if isinstance(x, Cyclo):
        return {
            "order": x.order,
            "coeffs": [[str(c.numerator), str(c.denominator)] for c in x.coeffs],
        }
    z = complex(x)
    return {"re": z.real, "im": z.imag}


def scalar_from_json(doc, backend=EXACT):
    """Read one scalar; accepts the object forms plus bare numbers/strings."""
    if isinstance(doc, dict):
        if "order" in doc:
            order = int(doc["order"])
            coeffs = tuple(
                Fraction(int(p), int(q)) for p, q in doc["coeffs"]
            )
            if len(coeffs) != euler_phi(order):
                raise DomainError(
                    "scalar of order %d needs %d coefficients, got %d"
                    % (order, euler_phi(order), len(coeffs))
                )
            x = Cyclo(order, coeffs)
            if isinstance(backend, ExactBackend):
                return x
            return FLOAT.coerce(x.approx())
        if "re" in doc:
            z = complex(float(doc["re"]), float(doc.get("im", 0.0)))
            if isinstance(backend, ExactBackend):
                raise DomainError("float scalars cannot load onto the exact backend")
            return FLOAT.coerce(z)
        raise DomainError(f"unrecognized scalar object {sorted(doc)!r}")
    if isinstance(doc, str):
        return backend.coerce(Fraction(doc))
    if isinstance(doc, bool):
        raise DomainError("booleans are not scalars")
    if isinstance(doc, int):
        return backend.coerce(doc)
    if isinstance(doc, float):
        if isinstance(backend, ExactBackend):
            raise DomainError("bare floats cannot load onto the exact backend")
        return FLOAT.coerce(doc)
    raise DomainError(f"cannot read a scalar from {type(doc).__name__}")


# -- signatures ---------------------------------------------------------------


def signature_to_json(f: Signature, sparse: bool = False) -> dict:
    kind = "exact" if isinstance(f.backend, ExactBackend) else "float"
    if not sparse:
        return {
            "arity": f.arity,
            "backend": kind,
            "values": [scalar_to_json(v) for v in f.values],
        }
    entries = []
    for idx, v in enumerate(f.values):
        if not f.backend.is_zero(v):
            entries.append(
                {"bits": format(idx, "0%db" % f.arity), "value": scalar_to_json(v)}
            )
    return {"arity": f.arity, "backend": kind, "entries": entries}


def signature_from_json(doc: dict) -> Signature:
    if not isinstance(doc, dict):
        raise DomainError("a signature document must be an object")
    kind = doc.get("backend", "exact")
    if kind not in ("exact", "float"):
        raise DomainError(f"unknown backend {kind!r}")
    be = EXACT if kind == "exact" else FLOAT
    arity = int(doc["arity"])
    if "values" in doc:
        vals = tuple(scalar_from_json(v, be) for v in doc["values"])
        if len(vals) != 1 << arity:
            raise DomainError(
                "dense signature of arity %d needs %d values, got %d"
                % (arity, 1 << arity, len(vals))
            )
        return Signature(arity, vals, be)
    if "entries" in doc:
        vals = [be.coerce(0)] * (1 << arity)
        for ent in doc["entries"]:
            bits = ent["bits"]
            if len(bits) != arity or set(bits) - {"0", "1"}:
                raise DomainError(f"bad bit string {bits!r} for arity {arity}")
            vals[int(bits, 2)] = scalar_from_json(ent["value"], be)
        return Signature(arity, tuple(vals), be)
    raise DomainError("a signature document needs values or entries")


def load_signature(path: str) -> Signature:
    with open(path, "r", encoding="utf-8") as fh:
        return signature_from_json(json.load(fh))


def save_signature(f: Signature, path: str, sparse: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(signature_to_json(f, sparse=sparse), fh, sort_keys=True, indent=1)
        fh.write("\n")


# -- grids --------------------------------------------------------------------


def resolve_signature_ref(ref: str, base_dir: Optional[str] = None) -> Signature:
    """A grid vertex reference: a builtin name, else a signature file path."""
    try:
        return builtin(ref)
    except DomainError:
        pass
    path = ref
    if base_dir is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    if not os.path.exists(path):
        raise GridError(f"vertex reference {ref!r} is neither builtin nor a file")
    return load_signature(path)


def grid_from_json(doc: dict, base_dir: Optional[str] = None) -> SignatureGrid:
    vertices = []
    for vdoc in doc["vertices"]:
        f = resolve_signature_ref(vdoc["sig"], base_dir)
        slots = int(vdoc.get("slots", f.arity))
        if slots != f.arity:
            raise GridError(
                "vertex %r declares %d slots but has arity %d"
                % (vdoc["sig"], slots, f.arity)
            )
        vertices.append(f)
    edges = []
    for a, b in doc["edges"]:
        edges.append(((int(a["v"]), int(a["slot"])), (int(b["v"]), int(b["slot"]))))
    bip = doc.get("bipartition")
    return SignatureGrid(tuple(vertices), tuple(edges), tuple(bip) if bip else None)


def grid_to_json(grid: SignatureGrid, sig_refs) -> dict:
    """Encode a grid, naming each vertex by the caller-supplied reference."""
    if len(sig_refs) != grid.vertex_count:
        raise GridError("need one signature reference per vertex")
    doc = {
        "vertices": [
            {"sig": ref, "slots": f.arity}
            for ref, f in zip(sig_refs, grid.vertices)
        ],
        "edges": [
            [{"v": a[0], "slot": a[1]}, {"v": b[0], "slot": b[1]}]
            for a, b in grid.edges
        ],
    }
    if grid.bipartition is not None:
        doc["bipartition"] = list(grid.bipartition)
    return doc


def load_grid(path: str) -> SignatureGrid:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return grid_from_json(doc, base_dir=os.path.dirname(os.path.abspath(path)))


# -- transforms and trace steps ------------------------------------------------


def transform_to_json(t: Transform2x2) -> dict:
    return {"entries": [scalar_to_json(x) for x in t.entries()]}


def transform_from_json(doc: dict, backend=EXACT) -> Transform2x2:
    a, b, c, d = (scalar_from_json(x, backend) for x in doc["entries"])
    return Transform2x2(a, b, c, d, backend)


def _wire_to_json(wire):
    if wire is None or isinstance(wire, str):
        return wire
    return signature_to_json(wire)


def _wire_from_json(doc):
    if doc is None or isinstance(doc, str):
        return doc
    return signature_from_json(doc)


def step_to_json(step: tuple) -> dict:
    op = step[0]
    if op == "pin":
        return {"op": op, "var": step[1], "value": step[2]}
    if op == "self_loop":
        return {"op": op, "vars": [step[1], step[2]], "wire": _wire_to_json(step[3])}
    if op == "mate":
        return {"op": op, "dangling": list(step[1])}
    if op == "holo":
        return {"op": op, "transform": transform_to_json(step[1])}
    if op == "factor_extract":
        return {"op": op, "scope": list(step[1])}
    if op == "connect_unary":
        return {"op": op, "var": step[1], "unary": signature_to_json(step[2])}
    if op == "compose_self":
        return {
            "op": op,
            "joins": [list(j) for j in step[1]],
            "wire": _wire_to_json(step[2]),
        }
    if op == "scale":
        return {"op": op, "value": scalar_to_json(step[1])}
    if op == "permute":
        return {"op": op, "order": list(step[1])}
    if op in ("cite", "note"):
        return {"op": op, "text": step[1]}
    raise DomainError(f"unknown trace step {op!r}")


def step_from_json(doc: dict, backend=EXACT) -> tuple:
    op = doc["op"]
    if op == "pin":
        return (op, int(doc["var"]), int(doc["value"]))
    if op == "self_loop":
        j, k = doc["vars"]
        return (op, int(j), int(k), _wire_from_json(doc.get("wire")))
    if op == "mate":
        return (op, tuple(int(i) for i in doc["dangling"]))
    if op == "holo":
        return (op, transform_from_json(doc["transform"], backend))
    if op == "factor_extract":
        return (op, tuple(int(i) for i in doc["scope"]))
    if op == "connect_unary":
        return (op, int(doc["var"]), signature_from_json(doc["unary"]))
    if op == "compose_self":
        joins = tuple(tuple(int(x) for x in j) for j in doc["joins"])
        return (op, joins, _wire_from_json(doc.get("wire")))
    if op == "scale":
        return (op, scalar_from_json(doc["value"], backend))
    if op == "permute":
        return (op, tuple(int(i) for i in doc["order"]))
    if op in ("cite", "note"):
        return (op, doc["text"])
    raise DomainError(f"unknown trace step {op!r}")


def trace_to_json(trace) -> dict:
    doc = {
        "steps": [step_to_json(s) for s in trace.steps],
        "terminal": trace.terminal,
        "exact": trace.exact,
        "set_transform": transform_to_json(trace.set_transform),
        "witness": None if trace.witness is None else signature_to_json(trace.witness),
        "target": None if trace.target is None else signature_to_json(trace.target),
        "scalar": None if trace.scalar is None else scalar_to_json(trace.scalar),
    }
    for key in ("handoff", "eq_arity", "method"):
        val = getattr(trace, key)
        if val is not None:
            doc[key] = val
    if trace.blocker is not None:
        doc["blocker"] = to_jsonable(trace.blocker)
    if trace.interpolation is not None:
        doc["interpolation"] = to_jsonable(trace.interpolation)
    return doc


# -- a generic fallback for report objects -------------------------------------


def to_jsonable(obj):
    """Render nested report objects into plain JSON-compatible data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Cyclo):
        return scalar_to_json(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Signature):
        return signature_to_json(obj)
    if isinstance(obj, Transform2x2):
        return transform_to_json(obj)
    if hasattr(obj, "steps") and hasattr(obj, "terminal"):
        return trace_to_json(obj)
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in seq]
    return repr(obj)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
