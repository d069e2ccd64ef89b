"""Command-line front end.

Every command reads signatures either as builtin names (``psi8``,
``eq(3)``, ...) or as JSON files, and emits either short human text or,
behind --json, a stable envelope ``{"status", "payload", "diagnostics"}``
with sorted keys, so identical invocations produce identical bytes.

Exit codes: 0 success, 1 domain error (structured one-line JSON message
on stderr), 2 usage error.
"""

from __future__ import annotations

import json
import os
import random
import sys

import click

from . import config
from .classify import (
    CATALOG_VERSION,
    verdict_csp,
    verdict_csp2,
    verdict_cspk,
    verdict_holantc,
    verdict_holant_odd,
)
from .entangle import analyze, check_bell_property, odd_arity_normalize, reduce_to_base
from .errors import DomainError, HolantError
from .factor import upf
from .gadget import (
    Transform2x2,
    hadamard,
    holo,
    identity,
    pauli_x,
    pauli_y,
    pauli_z,
    rotate45,
    t_alpha,
    z_inverse,
    z_transform,
)
from .grid import SignatureGrid, holant_eval
from .scalar import FLOAT, Cyclo, backend_by_name
from .serde import (
    dumps,
    load_grid,
    scalar_from_json,
    scalar_to_json,
    signature_from_json,
    signature_to_json,
    to_jsonable,
    trace_to_json,
    transform_to_json,
)
from .signature import Signature, builtin


def _display_scalar(x) -> str:
    if isinstance(x, Cyclo):
        if x.is_rational:
            return str(x.as_fraction())
        return repr(x)
    z = complex(x)
    if z.imag == 0:
        return repr(z.real)
    return repr(z)


def _to_backend(f: Signature, be) -> Signature:
    if f.backend is be:
        return f
    return Signature(f.arity, tuple(be.coerce(v) for v in f.values), be)


def _load_one(ref: str, be) -> Signature:
    """A builtin name or a signature file holding a single object."""
    try:
        return _to_backend(builtin(ref), be)
    except DomainError:
        pass
    if not os.path.exists(ref):
        raise DomainError(f"{ref!r} is neither a builtin name nor a file")
    with open(ref, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        raise DomainError(f"{ref!r} holds a signature list; expected one signature")
    return signature_from_json(doc)


def _load_many(refs, be) -> list[Signature]:
    """Builtin names and files; a file may hold one object or a list."""
    out = []
    for ref in refs:
        try:
            out.append(_to_backend(builtin(ref), be))
            continue
        except DomainError:
            pass
        if not os.path.exists(ref):
            raise DomainError(f"{ref!r} is neither a builtin name nor a file")
        with open(ref, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        docs = doc if isinstance(doc, list) else [doc]
        out.extend(signature_from_json(d) for d in docs)
    return out


def _emit(ctx, payload: dict, lines) -> None:
    if ctx.obj["json"]:
        env = {"status": "ok", "payload": payload, "diagnostics": []}
        click.echo(dumps(env), nl=False)
    else:
        for line in lines:
            click.echo(line)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--backend",
    type=click.Choice(["exact", "float"]),
    default="exact",
    show_default=True,
    help="Scalar arithmetic for builtin signatures and grid evaluation.",
)
@click.option("--epsilon", type=float, default=None, help="Float comparison tolerance.")
@click.option("--arity-cap", type=int, default=None, help="Signature arity limit.")
@click.option("--json", "as_json", is_flag=True, help="Structured JSON output.")
@click.option("--seed", type=int, default=0, show_default=True, help="RNG seed.")
@click.pass_context
def cli(ctx, backend, epsilon, arity_cap, as_json, seed):
    """Workbench for Boolean-domain Holant problems."""
    if epsilon is not None:
        config.set_epsilon(epsilon)
    if arity_cap is not None:
        config.set_arity_cap(arity_cap)
    random.seed(seed)
    ctx.obj = {"backend": backend_by_name(backend), "json": as_json}


@cli.command("eval")
@click.argument("grid_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--mode",
    type=click.Choice(["brute", "contract"]),
    default="contract",
    show_default=True,
)
@click.pass_context
def eval_cmd(ctx, grid_file, mode):
    """Holant partition value of a signature grid file."""
    grid = load_grid(grid_file)
    be = ctx.obj["backend"]
    if be is FLOAT:
        grid = SignatureGrid(
            tuple(_to_backend(f, be) for f in grid.vertices),
            grid.edges,
            grid.bipartition,
        )
    value = holant_eval(grid, mode=mode)
    payload = {
        "value": _display_scalar(value),
        "scalar": scalar_to_json(value),
        "mode": mode,
        "vertices": grid.vertex_count,
        "edges": grid.edge_count,
    }
    _emit(ctx, payload, [f"value: {payload['value']}"])


@cli.command()
@click.argument("sig_refs", nargs=-1, required=True)
@click.option(
    "--problem",
    type=click.Choice(["csp", "csp2", "cspk", "holantc", "holant-odd"]),
    required=True,
    help="Which counting problem the signature set parameterizes.",
)
@click.option("--k", type=int, default=None, help="Modulus for --problem cspk.")
@click.pass_context
def classify(ctx, sig_refs, problem, k):
    """Tractability verdict for a set of signatures."""
    fs = _load_many(sig_refs, ctx.obj["backend"])
    if problem == "cspk":
        if k is None:
            raise click.UsageError("--problem cspk requires --k")
        verdict = verdict_cspk(fs, k)
    elif k is not None:
        raise click.UsageError("--k only applies to --problem cspk")
    elif problem == "csp":
        verdict = verdict_csp(fs)
    elif problem == "csp2":
        verdict = verdict_csp2(fs)
    elif problem == "holantc":
        verdict = verdict_holantc(fs)
    else:
        verdict = verdict_holant_odd(fs)
    payload = to_jsonable(verdict)
    payload["catalog_version"] = CATALOG_VERSION
    lines = [f"problem: {verdict.problem}", f"outcome: {verdict.outcome}"]
    if verdict.witness is not None:
        lines.append("witness: " + json.dumps(to_jsonable(verdict.witness), sort_keys=True))
    _emit(ctx, payload, lines)


@cli.command()
@click.argument("sig_ref")
@click.option("--sparse", is_flag=True, help="Emit factors in sparse form.")
@click.pass_context
def factor(ctx, sig_ref, sparse):
    """Unique prime factorization of a signature."""
    f = _load_one(sig_ref, ctx.obj["backend"])
    fac = upf(f)
    payload = {
        "global_scalar": scalar_to_json(fac.global_scalar),
        "factors": [
            {"scope": list(scope), "signature": signature_to_json(g, sparse=sparse)}
            for g, scope in fac.factors
        ],
    }
    if fac.epsilon is not None:
        payload["epsilon"] = fac.epsilon
    lines = [f"global scalar: {_display_scalar(fac.global_scalar)}"]
    for g, scope in fac.factors:
        lines.append(f"scope {tuple(scope)}: arity {g.arity}")
    _emit(ctx, payload, lines)


@cli.command()
@click.argument("sig_ref")
@click.pass_context
def entangle(ctx, sig_ref):
    """Entanglement structure report for a signature."""
    f = _load_one(sig_ref, ctx.obj["backend"])
    rep = analyze(f)
    payload = to_jsonable(rep)
    yn = lambda b: "yes" if b else "no"
    lines = [
        f"arity: {rep.arity}",
        f"entangled: {yn(rep.entangled)}",
        f"multipartite: {yn(rep.multipartite)}",
        f"genuinely entangled: {yn(rep.genuinely_entangled)}",
        f"factors: {rep.factor_count} with arities {list(rep.factor_arities)}",
    ]
    _emit(ctx, payload, lines)


@cli.command()
@click.argument("sig_ref")
@click.option("--strong", is_flag=True, help="Require the same Bell state in every slot.")
@click.pass_context
def bell(ctx, sig_ref, strong):
    """Check the (strong) Bell property of an even-arity state."""
    f = _load_one(sig_ref, ctx.obj["backend"])
    rep = check_bell_property(f, strong=strong)
    payload = to_jsonable(rep)
    label = "strong Bell property" if strong else "Bell property"
    ok = sum(1 for c in rep.cases if c.ok)
    lines = [f"{label}: {'holds' if rep.holds else 'fails'} ({ok}/{len(rep.cases)} cases)"]
    for c in rep.failures():
        lines.append(f"  fails at pair ({c.i},{c.j}) state {c.which}")
    _emit(ctx, payload, lines)


@cli.command()
@click.argument("sig_ref")
@click.option(
    "--normalize-odd",
    is_flag=True,
    help="Run the odd-arity unary-terminal normalization instead.",
)
@click.pass_context
def reduce(ctx, sig_ref, normalize_odd):
    """Reduction trace from a signature to a base-case terminal."""
    f = _load_one(sig_ref, ctx.obj["backend"])
    trace = odd_arity_normalize(f) if normalize_odd else reduce_to_base(f)
    payload = trace_to_json(trace)
    lines = [f"terminal: {trace.terminal}", f"steps: {len(trace.steps)}"]
    if trace.method:
        lines.append(f"method: {trace.method}")
    if trace.handoff:
        lines.append(f"handoff: {trace.handoff}")
    if not trace.exact:
        lines.append("exact: no (see blocker)")
    for s in trace.steps:
        lines.append("  " + json.dumps(to_jsonable(list(s)), sort_keys=True))
    _emit(ctx, payload, lines)


_NAMED_TRANSFORMS = {
    "identity": identity,
    "pauli-x": pauli_x,
    "pauli-y": pauli_y,
    "pauli-z": pauli_z,
    "hadamard": hadamard,
    "rotate45": rotate45,
    "z": z_transform,
    "z-inverse": z_inverse,
    "alpha": t_alpha,
}


@cli.command()
@click.argument("sig_ref")
@click.option(
    "--name",
    "tname",
    type=click.Choice(sorted(_NAMED_TRANSFORMS)),
    default=None,
    help="A named 2x2 transform.",
)
@click.option(
    "--entries",
    default=None,
    help="Custom transform: JSON array of four scalars, row-major.",
)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def transform(ctx, sig_ref, tname, entries, out):
    """Holographic transform of a signature (column law T^(arity) f)."""
    if (tname is None) == (entries is None):
        raise click.UsageError("give exactly one of --name or --entries")
    f = _load_one(sig_ref, ctx.obj["backend"])
    if tname is not None:
        t = _NAMED_TRANSFORMS[tname](f.backend)
    else:
        vals = json.loads(entries)
        if not isinstance(vals, list) or len(vals) != 4:
            raise DomainError("--entries needs a JSON array of four scalars")
        a, b, c, d = (scalar_from_json(v, f.backend) for v in vals)
        t = Transform2x2(a, b, c, d, f.backend)
    g = holo(f, t)
    doc = signature_to_json(g)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    payload = {"signature": doc, "transform": transform_to_json(t), "written": out}
    lines = [dumps(doc).rstrip("\n")] if out is None else [f"wrote {out}"]
    _emit(ctx, payload, lines)


@cli.command("builtin")
@click.argument("name")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--sparse", is_flag=True, help="Emit sparse entries instead of dense values.")
@click.pass_context
def builtin_cmd(ctx, name, out, sparse):
    """Write a named builtin signature as a JSON file."""
    f = _to_backend(builtin(name), ctx.obj["backend"])
    doc = signature_to_json(f, sparse=sparse)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
    payload = {"name": name, "signature": doc, "written": out}
    lines = [dumps(doc).rstrip("\n")] if out is None else [f"wrote {out}"]
    _emit(ctx, payload, lines)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except HolantError as e:
        msg = {"status": "error", "kind": type(e).__name__, "message": str(e)}
        click.echo(json.dumps(msg, sort_keys=True), err=True)
        return 1
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        msg = {"status": "error", "kind": type(e).__name__, "message": str(e)}
        click.echo(json.dumps(msg, sort_keys=True), err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
