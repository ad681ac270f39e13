"""Command-line front end.

Every run ends with a manifest (subcommand, arguments, seed, version,
outcome) that is enough to repeat it.  In ``--json`` mode stdout carries one
JSON object per line: the result records, then the manifest.  Otherwise the
manifest goes to stderr.

Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .anneal import AnnealSchedule, anneal
from .circuit import parse_netlist
from .compile import BRUTE, EXACT, compile_circuit, solve
from .core import IsingModel, QuboModel, dumps_model, loads_model
from .errors import SolverFailure, UnitIsingError
from .gate_synth import (STRATEGIES, builtin_spec, loads_spec, parse_priority, synthesize,
                         verify_gate_model)
from .multiplier import MultiplierSpec, factor, model_stats, multiply
from .transforms import ising_to_qubo, qubo_to_ising


class _Output:
    def __init__(self, machine: bool):
        self.machine = machine
        self.records = []

    def text(self, line: str):
        if not self.machine:
            print(line)

    def record(self, **fields):
        self.records.append(fields)
        if self.machine:
            print(json.dumps(fields))


def _spin(text):
    v = int(text)
    if v not in (-1, 1):
        raise ValueError
    return v


def _clamp(text):
    name, sep, value = text.partition("=")
    try:
        if not sep or not name:
            raise ValueError
        return name, _spin(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected var=+1 or var=-1, got {text!r}") from None


def _fmt_state(state: dict) -> str:
    return " ".join(f"{v}={s:+d}" for v, s in state.items())


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UnitIsingError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UnitIsingError(f"cannot write {path}: {exc.strerror}") from None


def _load_ising(path) -> IsingModel:
    model = loads_model(_read(path))
    if isinstance(model, QuboModel):
        raise UnitIsingError(f"{path} holds a QUBO model; run `convert` first")
    return model


def _schedule(args) -> AnnealSchedule:
    return AnnealSchedule(restarts=args.restarts, seed=args.seed if args.seed is not None else 0)


def _gate_spec(args):
    if args.spec:
        return loads_spec(_read(args.spec), Path(args.spec).stem)
    return builtin_spec(args.gate)


# -- subcommands ----------------------------------------------------------------------

def cmd_synth(args, out):
    spec = _gate_spec(args)
    priority = parse_priority(args.priority) if args.priority else None
    kwargs = {"priority": priority} if priority else {}
    res = synthesize(spec, args.ancillas, args.bound, strategy=args.strategy, **kwargs)
    if not res.feasible:
        out.text(f"{spec.name}: no model with {args.ancillas} ancilla(s) and |coef| <= {args.bound}")
        out.record(kind="synth", gate=spec.name, feasible=False, bound=args.bound)
        return "infeasible"
    o = res.objectives
    out.text(f"{spec.name}: MAX_ABS={o.max_abs} INPUT_NUM={o.input_num} QUAD_NUM={o.quad_num} "
             f"({o.max_abs}, {o.input_num}, {o.quad_num}) mu={res.mu}")
    text = dumps_model(res.model)
    if args.out:
        _write(args.out, text)
        out.text(f"model written to {args.out}")
    else:
        out.text(text.rstrip("\n"))
    out.record(kind="synth", gate=spec.name, feasible=True, max_abs=o.max_abs,
               input_num=o.input_num, quad_num=o.quad_num, mu=res.mu,
               ancillas=list(res.ancillas), model=text)
    return f"objectives {o.as_tuple()} mu {res.mu}"


def cmd_verify(args, out):
    model = _load_ising(args.model)
    spec = _gate_spec(args)
    rep = verify_gate_model(model, spec)
    verdict = "PASS" if rep.passed else "FAIL"
    out.text(f"{verdict} mu={rep.mu} gap={rep.gap} objectives={rep.objectives.as_tuple()}")
    for f in rep.failures:
        out.text(f"  {f['reason']}: {f['row']}")
    out.record(kind="verify", passed=rep.passed, mu=rep.mu, gap=rep.gap,
               failures=[f["reason"] for f in rep.failures])
    if not rep.passed:
        raise UnitIsingError(f"model is not a penalty model of {spec.name}")
    return verdict


def cmd_compile(args, out):
    circuit = parse_netlist(_read(args.netlist))
    cm = compile_circuit(circuit, variants=args.variant, merge=not args.no_merge)
    model_text = dumps_model(cm.model)
    map_text = "".join(f"net {n} {v}\n" for n, v in cm.net_map.items())
    if args.out:
        _write(args.out, model_text)
        _write(args.map or args.out + ".map", map_text)
        out.text(f"model written to {args.out}, net map to {args.map or args.out + '.map'}")
    else:
        out.text(model_text.rstrip("\n"))
        out.text(map_text.rstrip("\n"))
    out.text(f"nodes={len(cm.model.variables)} edges={len(cm.model.quadratic)} "
             f"wires={cm.wires} merged={cm.merged_components} kept={len(cm.kept_components)} "
             f"expected_ground_energy={cm.expected_ground_energy}")
    out.record(kind="compile", nodes=len(cm.model.variables), edges=len(cm.model.quadratic),
               wires=cm.wires, merged=cm.merged_components, kept=len(cm.kept_components),
               expected_ground_energy=cm.expected_ground_energy, net_map=cm.net_map)
    return f"{len(cm.model.variables)} nodes"


def cmd_solve(args, out):
    model = _load_ising(args.model)
    clamps = dict(args.clamp or [])
    if args.sa:
        res = anneal(model, clamps, _schedule(args), target=args.target)
        status = "certified" if res.certified else ("uncertified" if args.target is not None
                                                    else "no target")
        out.text(f"best energy {res.best_energy} ({status}, {res.restarts_used} restarts, "
                 f"{res.flips_attempted} flips)")
        out.text(_fmt_state(res.best_assignment))
        out.record(kind="anneal", best_energy=res.best_energy, certified=res.certified,
                   restarts_used=res.restarts_used, flips_attempted=res.flips_attempted,
                   assignment=res.best_assignment)
        return f"best {res.best_energy}"
    rep = solve(model, clamps, BRUTE if args.brute else EXACT)
    out.text(f"min energy {rep.min_energy}, gap {rep.gap}, {rep.degeneracy} ground state(s)")
    for gs in rep.ground_states:
        out.text(_fmt_state(gs))
    out.record(kind="ground", min_energy=rep.min_energy, gap=rep.gap,
               ground_states=rep.ground_states)
    return f"min {rep.min_energy}"


def _mult_spec(args):
    return MultiplierSpec(args.bits, odd_assumption=not args.no_odd)


def cmd_multiply(args, out):
    spec = _mult_spec(args)
    solver = _schedule(args) if args.sa else EXACT
    S = multiply(spec, args.x, args.y, solver)
    out.text(f"{args.x} x {args.y} = {S}")
    out.record(kind="multiply", x=args.x, y=args.y, s=S)
    return str(S)


def cmd_factor(args, out):
    spec = _mult_spec(args)
    solver = EXACT if args.exact else _schedule(args)
    pairs = factor(spec, args.s, solver)
    unordered = sorted({tuple(sorted(p)) for p in pairs})
    how = "complete" if args.exact else "certified"
    for a, b in unordered:
        out.text(f"{a} x {b}")
        out.record(kind="factor", s=args.s, x=a, y=b, status=how)
    out.text(how)
    return "; ".join(f"{a} x {b}" for a, b in unordered) + f" ({how})"


def cmd_stats(args, out):
    st = model_stats(_mult_spec(args))
    out.text(f"n={args.bits} AND={st.and_gates} HA={st.half_adders} FA={st.full_adders} "
             f"nodes={st.model_nodes} edges={st.model_edges} max_abs={st.max_abs_coef}")
    out.record(kind="stats", n=args.bits, and_gates=st.and_gates, half_adders=st.half_adders,
               full_adders=st.full_adders, nodes=st.model_nodes, edges=st.model_edges,
               max_abs=st.max_abs_coef)
    return f"{st.model_nodes} nodes {st.model_edges} edges"


def cmd_convert(args, out):
    model = loads_model(_read(args.model))
    conv = ising_to_qubo(model) if isinstance(model, IsingModel) else qubo_to_ising(model)
    target = "qubo" if isinstance(conv, QuboModel) else "ising"
    text = dumps_model(conv)
    if args.out:
        _write(args.out, text)
        out.text(f"{target} model written to {args.out}")
    else:
        out.text(text.rstrip("\n"))
    out.record(kind="convert", to=target, model=text)
    return f"to {target}"


# -- parser ---------------------------------------------------------------------------

def _add_sa(p, default_restarts=16):
    p.add_argument("--seed", type=int, help="annealer seed (required with --json)")
    p.add_argument("--restarts", type=int, default=default_restarts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unitising", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="one JSON record per line")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a gate penalty model")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gate")
    g.add_argument("--spec", help="gate spec file")
    p.add_argument("--ancillas", type=int, default=0)
    p.add_argument("--bound", type=int, default=1)
    p.add_argument("--priority", help="e.g. MAX_ABS>QUAD_NUM>INPUT_NUM")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--out", help="model file to write")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check a model against a gate spec")
    p.add_argument("--model", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gate")
    g.add_argument("--spec")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compile", help="compile a netlist into an Ising model")
    p.add_argument("--netlist", required=True)
    p.add_argument("--variant", choices=("plain", "u", "zu"), default="zu")
    p.add_argument("--no-merge", action="store_true")
    p.add_argument("--out")
    p.add_argument("--map", help="net map file (default: OUT.map)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="minimize a model under clamps")
    p.add_argument("--model", required=True)
    p.add_argument("--clamp", action="append", type=_clamp, metavar="VAR=±1")
    m = p.add_mutually_exclusive_group()
    m.add_argument("--exact", action="store_true", help="exact solver (default)")
    m.add_argument("--brute", action="store_true", help="exhaustive enumeration")
    m.add_argument("--sa", action="store_true", help="simulated annealing")
    p.add_argument("--target", type=int, help="energy that certifies an annealer result")
    _add_sa(p)
    p.set_defaults(func=cmd_solve, uses_seed="sa")

    p = sub.add_parser("multiply", help="forward-simulate the multiplier")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--no-odd", action="store_true", help="full array without the odd assumption")
    p.add_argument("--sa", action="store_true")
    _add_sa(p, 64)
    p.set_defaults(func=cmd_multiply, uses_seed="sa")

    p = sub.add_parser("factor", help="backward-simulate the multiplier")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--no-odd", action="store_true")
    p.add_argument("--exact", action="store_true", help="exact solver; lists every factorization")
    _add_sa(p, 64)
    p.set_defaults(func=cmd_factor, uses_seed="not exact")

    p = sub.add_parser("stats", help="multiplier model size")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--no-odd", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("convert", help="QUBO <-> Ising")
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)
    return parser


def _needs_seed(args) -> bool:
    rule = getattr(args, "uses_seed", None)
    if rule == "sa":
        return args.sa
    if rule == "not exact":
        return not args.exact
    return False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.json and _needs_seed(args) and args.seed is None:
        parser.error("--seed is required with --json when annealing")
    if getattr(args, "restarts", 1) < 1:
        parser.error("--restarts must be >= 1")
    out = _Output(args.json)
    arguments = {k: v for k, v in vars(args).items() if k not in ("func", "uses_seed")}
    manifest = {"kind": "manifest", "subcommand": args.command, "arguments": arguments,
                "seed": getattr(args, "seed", None) if _needs_seed(args) else None,
                "version": __version__}
    status = 0
    try:
        manifest["outcome"] = args.func(args, out)
    except (UnitIsingError, ValueError) as exc:
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        manifest["outcome"] = f"error: {msg}"
        status = 1
    manifest["exit_status"] = status
    line = json.dumps(manifest, default=str)
    if args.json:
        print(line)
    else:
        print(f"manifest: {line}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
