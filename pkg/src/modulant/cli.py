"""``modulant`` command line.

Exit codes: 0 success, 1 negative answer under ``--fail-on-no``, 2 usage or
parse errors, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

from . import expr as E
from .core import (
    SEMANTIC,
    SYNTACTIC,
    as_vector,
    default_mode,
    format_config,
    interaction_digraph,
    is_acyclic,
    update_sequence,
)
from .dynamics import (
    MATERIALIZE_CAP,
    SEQUENCE_CAP,
    STATE_CAP,
    DynamicsGraph,
    attractor_exists_fpt,
    attractors,
    bound_table,
)
from .errors import CapExceeded, ModulantError
from .export import attractor_json, dumps, dynamics_dot, interaction_dot, report
from .generators import random_acyclic_module, random_network, random_one_to_one
from .output import compute_output_functions, minimize_delay
from .synth import (
    expand_attractor_gadget,
    output_construction_instance,
    sat_to_attractor_gadget,
    sat_to_fixpoint_gadget,
    satisfiable,
    search_output_construction,
    synthesize_minimal_one_to_one,
    verify_output_construction,
)
from .textio import format_module, format_output_table, load_output_table, parse_module
from .wiring import close, parse_wire

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _read(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None
    return data, parse_module(data.decode("utf-8"))


def _wiring(args, mf):
    if args.wire:
        w = {}
        for text in args.wire:
            a, s = parse_wire(text)
            w[a] = s
        return w
    return dict(mf.wiring)


def _acyclicity(m):
    out = {SYNTACTIC: is_acyclic(m, SYNTACTIC)}
    try:
        out[SEMANTIC] = is_acyclic(m, SEMANTIC)
    except CapExceeded:
        out[SEMANTIC] = None
    return out


def _parse_sequence(text, m, ages):
    if text is None:
        if m.inputs:
            raise UsageError("module has inputs; give --inputs")
        return ((),)
    conf = [t.strip() for t in text.split(",") if t.strip()]
    seq = [as_vector(c, m.k, m.q, "input configuration") for c in conf]
    return tuple(reversed(seq)) if ages else tuple(seq)


# ---------------------------------------------------------------- commands

def cmd_validate(args):
    data, mf = _read(args.file)
    m = mf.module
    payload = {
        "input_digest": _digest(data),
        "alphabet": m.q,
        "name": m.name,
        "nodes": list(m.nodes),
        "inputs": list(m.inputs),
        "output": m.output,
        "wiring": mf.wiring,
        "mode": default_mode(m),
        "acyclic": _acyclicity(m),
    }
    return report("validate", payload), None


def cmd_update(args):
    data, mf = _read(args.file)
    m = mf.module
    x = as_vector(args.x, m.n, m.q)
    if args.steps is not None:
        if m.inputs:
            raise UsageError("--steps only applies to modules without inputs")
        J = ((),) * args.steps
    else:
        J = _parse_sequence(args.inputs, m, args.ages)
    trajectory = [x]
    for i in J:
        trajectory.append(update_sequence(m, trajectory[-1], (i,)))
    payload = {
        "input_digest": _digest(data),
        "x": format_config(x),
        "sequence": [format_config(i) for i in J],
        "trajectory": [format_config(y) for y in trajectory],
        "result": format_config(trajectory[-1]),
    }
    return report("update", payload), None


def cmd_attractors(args):
    data, mf = _read(args.file)
    m = mf.module
    w = _wiring(args, mf)
    exact = not args.divides
    payload = {
        "input_digest": _digest(data),
        "method": args.method,
        "wiring": w,
        "caps": {"states": STATE_CAP, "sequences": SEQUENCE_CAP},
    }
    answer = None
    if args.method == "fpt":
        if args.size is None:
            raise UsageError("--method fpt needs --size")
        missing = [a for a in m.inputs if a not in w]
        if missing:
            raise UsageError(f"--method fpt needs a total wiring; unwired {missing}")
        if not is_acyclic(m):
            raise UsageError("--method fpt needs an acyclic module")
        res = attractor_exists_fpt(m, w, args.size, exact=exact, threads=args.threads)
        payload.update(mode=default_mode(m), size=args.size,
                       semantics="exact" if exact else "divides", exists=res.found,
                       sequences=res.sequences,
                       witness=attractor_json(res.witness) if res.witness else None)
        answer = res.found
    else:
        an = close(m, w) if m.inputs else m
        found = attractors(an, threads=args.threads)
        payload["mode"] = default_mode(an)
        payload["nodes"] = list(an.nodes)
        payload["attractors"] = [attractor_json(a) for a in found]
        if args.size is not None:
            hits = [a for a in found if (a.size == args.size if exact else args.size % a.size == 0)]
            payload.update(size=args.size, semantics="exact" if exact else "divides",
                           exists=bool(hits))
            answer = bool(hits)
    return report("attractors", payload), answer


def cmd_outputs(args):
    data, mf = _read(args.file)
    m = mf.module
    outs = compute_output_functions(m)
    payload = {
        "input_digest": _digest(data),
        "mode": default_mode(m),
        "inputs": list(m.inputs),
        "outputs": {s: {"delay": o.delay, "table": o.hex(), "expression": o.to_text()}
                    for s, o in outs.items()},
    }
    return report("outputs", payload), None


def cmd_bound(args):
    t = bound_table(args.q, args.k, args.c_max)
    return report("bound", {"q": t.q, "k": t.k, "c_max": t.c_max, "values": list(t.values)}), None


def cmd_synthesize(args):
    o = load_output_table(args.file)
    target = minimize_delay(o)
    m = synthesize_minimal_one_to_one(target)
    text = format_module(m.replace(name=args.name), {m.inputs[0]: m.output} if args.close else None)
    if args.out is None:
        return None, text
    Path(args.out).write_text(text, encoding="utf-8")
    payload = {"input_digest": _digest(Path(args.file).read_bytes()), "delay": target.delay,
               "table": format_output_table(target), "nodes": list(m.nodes),
               "output": m.output, "file": args.out}
    return report("synthesize", payload), None


def cmd_reduce(args):
    formula = E.parse_expression(args.formula)
    if args.kind == "sat-cycle":
        g = sat_to_attractor_gadget(formula)
        module = expand_attractor_gadget(g) if args.expand else g.module
    else:
        g = sat_to_fixpoint_gadget(formula)
        module = g.module
    text = format_module(module, g.wiring)
    payload = {"kind": g.kind, "formula": E.to_text(formula), "variables": list(g.variables),
               "size": g.c, "nodes": list(module.nodes), "inputs": list(module.inputs),
               "wiring": dict(g.wiring)}
    answer = None
    if args.check:
        an = close(g.module, g.wiring)
        size = g.c if g.c is not None else 1
        found = any(a.size == size for a in attractors(an, threads=args.threads))
        payload.update(exists=found, satisfiable=satisfiable(formula, g.variables))
        answer = found
    if args.out_dir is None and not args.check:
        return None, text
    if args.out_dir is not None:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{args.kind.replace('-', '_')}.an"
        path.write_text(text, encoding="utf-8")
        payload["file"] = str(path)
    return report("reduce", payload), answer


def cmd_construct(args):
    formula = E.parse_expression(args.formula)
    parts, target = output_construction_instance(formula)
    plan = search_output_construction(parts, target, max_plans=args.max_plans)
    payload = {"formula": E.to_text(formula), "parts": [p.name for p in parts],
               "target": target.to_text(), "found": plan is not None,
               "plan": plan.to_text().splitlines() if plan else None}
    if plan is not None:
        payload["verified"] = verify_output_construction(parts, plan, None, target)
    return report("construct", payload), plan is not None


def cmd_graph(args):
    data, mf = _read(args.file)
    m = mf.module
    if args.what == "interaction":
        if args.dot:
            return None, interaction_dot(m)
        g = interaction_digraph(m)
        payload = {"mode": g.mode, "vertices": list(g.vertices),
                   "arcs": [list(arc) for arc in g.sorted_arcs()]}
    else:
        w = _wiring(args, mf)
        an = close(m, w) if m.inputs else m
        if args.dot:
            return None, dynamics_dot(an, attractors(an, cap=MATERIALIZE_CAP))
        edges = DynamicsGraph(an).edges(MATERIALIZE_CAP)
        payload = {"nodes": list(an.nodes), "edges": [list(e) for e in edges],
                   "caps": {"materialize": MATERIALIZE_CAP}}
    payload["input_digest"] = _digest(data)
    return report("graph", payload), None


def cmd_generate(args):
    if args.kind == "acyclic":
        m = random_acyclic_module(args.seed, args.nodes, args.inputs, args.alphabet)
    elif args.kind == "one-to-one":
        m = random_one_to_one(args.seed, args.nodes, args.alphabet)
    else:
        m = random_network(args.seed, args.nodes, args.alphabet)
    return None, format_module(m.replace(name=f"random_{args.seed}"))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads for enumeration")
    common.add_argument("--fail-on-no", action="store_true",
                        help="exit 1 when a decision answer is negative")
    common.add_argument("--timing", action="store_true", help="print wall time to stderr")

    p = argparse.ArgumentParser(prog="modulant", description="Automata-network modules toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse a module file and check acyclicity")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("update", parents=[common], help="apply updates to a configuration")
    s.add_argument("file")
    s.add_argument("x", help="configuration as a digit string in node order")
    s.add_argument("--inputs", help="comma-separated input configurations, oldest first")
    s.add_argument("--ages", action="store_true", help="read --inputs newest first")
    s.add_argument("--steps", type=int, help="number of updates of an input-free network")
    s.set_defaults(func=cmd_update)

    s = sub.add_parser("attractors", parents=[common], help="attractor enumeration or existence")
    s.add_argument("file")
    s.add_argument("--wire", action="append", metavar="ALPHA->NODE")
    s.add_argument("--method", choices=["brute", "fpt"], default="brute")
    s.add_argument("--size", type=int)
    sem = s.add_mutually_exclusive_group()
    sem.add_argument("--exact", action="store_true", help="size exactly c (default)")
    sem.add_argument("--divides", action="store_true", help="any size dividing c")
    s.set_defaults(func=cmd_attractors)

    s = sub.add_parser("outputs", parents=[common], help="output functions of an acyclic module")
    s.add_argument("file")
    s.set_defaults(func=cmd_outputs)

    s = sub.add_parser("bound", parents=[common], help="attractor count bounds")
    s.add_argument("q", type=int)
    s.add_argument("k", type=int)
    s.add_argument("c_max", type=int)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("synthesize", parents=[common], help="minimal one-to-one module for an output table")
    s.add_argument("file")
    s.add_argument("--out")
    s.add_argument("--name", default="synthesized")
    s.add_argument("--close", action="store_true", help="append the wire from the input to the output")
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("reduce", parents=[common], help="SAT reduction gadgets")
    s.add_argument("kind", choices=["sat-cycle", "sat-fixpoint"])
    s.add_argument("formula")
    s.add_argument("--out-dir")
    s.add_argument("--expand", action="store_true", help="write the output node as a formula")
    s.add_argument("--check", action="store_true", help="decide the closed gadget by brute force")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("construct", parents=[common], help="search the output-construction instance of a formula")
    s.add_argument("formula")
    s.add_argument("--max-plans", type=int, default=10 ** 6)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("graph", parents=[common], help="interaction digraph or dynamics")
    s.add_argument("file")
    s.add_argument("--what", choices=["interaction", "dynamics"], default="interaction")
    s.add_argument("--wire", action="append", metavar="ALPHA->NODE")
    s.add_argument("--dot", action="store_true")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("generate", parents=[common], help="random module file")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--kind", choices=["acyclic", "network", "one-to-one"], default="acyclic")
    s.add_argument("--nodes", type=int, default=4)
    s.add_argument("--inputs", type=int, default=1)
    s.add_argument("--alphabet", type=int, default=2)
    s.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        payload, extra = args.func(args)
    except CapExceeded as err:
        print(f"modulant: cap exceeded: {err}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ModulantError, ValueError) as err:
        print(f"modulant: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if payload is None:
        sys.stdout.write(extra)
        answer = None
    else:
        sys.stdout.write(dumps(payload))
        answer = extra
    if args.timing:
        print(f"wall time {time.perf_counter() - start:.3f}s", file=sys.stderr)
    if args.fail_on_no and answer is False:
        return EXIT_NO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
