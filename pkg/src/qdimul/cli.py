"""Command line front end.

Subcommands: ``gen`` writes a netlist JSON, ``sim`` runs handshake cycles,
``verify`` runs the checker battery, ``bench`` measures and ranks designs,
``report`` re-renders stored bench artifacts.  Exit codes: 0 on success,
1 when a check fails or an input is unusable, 2 for bad command lines.

Artifacts are deterministic: they embed the tool version and the run
configuration but no timestamps or machine state, so rerunning the same
command reproduces them byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import IO, Sequence

from . import __version__
from .cells import FullAdderKind
from .harness import Harness, write_cycle_reports_csv
from .metrics import StageMetrics, compare, measure, normalize_pctp, render_rows
from .multiplier import MultiplierSpec, generate
from .netlist import GateKind, ParseError, Protocol, deserialize, serialize
from .sim import DelayModel, write_trace_csv, write_trace_vcd
from . import verify as verify_mod


class UsageError(ValueError):
    pass


def parse_delay_model(text: str, seed: int) -> DelayModel:
    """Parse ``unit``, ``table:<path>`` or ``random:<lo>,<hi>``."""
    if text == "unit":
        return DelayModel.unit()
    if text.startswith("table:"):
        path = text[len("table:"):]
        if not path:
            raise UsageError("table delay model needs a file: table:<path>")
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
            table = {GateKind(k): int(v) for k, v in raw.items()}
        except FileNotFoundError:
            raise UsageError(f"delay table not found: {path}")
        except (json.JSONDecodeError, ValueError) as exc:
            raise UsageError(f"bad delay table {path}: {exc}")
        return DelayModel.fixed_table(table)
    if text.startswith("random:"):
        spec = text[len("random:"):]
        try:
            lo_s, hi_s = spec.split(",")
            return DelayModel.random_per_gate(int(lo_s), int(hi_s), seed)
        except ValueError as exc:
            raise UsageError(f"bad random delay bounds {spec!r}: {exc}")
    raise UsageError(f"unknown delay model {text!r} "
                     "(expected unit, table:<path> or random:<lo>,<hi>)")


def _run_config(command: str, args: argparse.Namespace, keys: Sequence[str]) -> dict:
    return {
        "tool": "qdimul",
        "version": __version__,
        "command": command,
        "args": {k: getattr(args, k) for k in keys},
    }


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _emit(text: str, path: str | None) -> None:
    stream, owned = _open_out(path)
    try:
        stream.write(text)
    finally:
        if owned:
            stream.close()


def _load_netlist(path: str):
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def _parse_pairs(text: str, n: int) -> list[tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        try:
            a_s, b_s = chunk.split("x")
            pairs.append((int(a_s), int(b_s)))
        except ValueError:
            raise UsageError(f"bad pair {chunk!r}, expected <a>x<b>")
    limit = 1 << n
    for a, b in pairs:
        if not (0 <= a < limit and 0 <= b < limit):
            raise UsageError(f"pair {a}x{b} does not fit in {n}-bit operands")
    return pairs


# -- subcommands -----------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    spec = MultiplierSpec(
        n=args.n,
        fa_kind=FullAdderKind(args.adder),
        protocol=Protocol(args.protocol),
        c3_as_tree=args.c3_tree,
        or4_as_tree=args.or4_tree,
    )
    netlist = generate(spec)
    netlist.meta["run"] = _run_config(
        "gen", args, ["n", "adder", "protocol", "c3_tree", "or4_tree"])
    _emit(serialize(netlist), args.out)
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    n = int(netlist.meta["n"])
    if args.pairs:
        pairs = _parse_pairs(args.pairs, n)
    elif args.a is not None and args.b is not None:
        pairs = _parse_pairs(f"{args.a}x{args.b}", n)
    else:
        raise UsageError("sim needs either --a and --b or --pairs")
    dm = parse_delay_model(args.delay_model, args.seed)
    harness = Harness(netlist, dm)
    want_trace = args.trace is not None
    reports = harness.run_sequence(pairs, want_traces=want_trace)
    if want_trace:
        events = [e for r in reports for e in (r.trace or [])]
        with open(args.trace, "w", encoding="utf-8") as fh:
            if args.trace.endswith(".vcd"):
                write_trace_vcd(netlist, events, fh)
            else:
                write_trace_csv(events, fh)
    if args.json:
        payload = {
            "run": _run_config("sim", args, ["netlist", "pairs", "a", "b",
                                             "delay_model", "seed"]),
            "reports": [
                {"a": r.a, "b": r.b, "product": r.product, "forward": r.forward,
                 "reverse": r.reverse, "cycle": r.cycle, "transitions": r.transitions}
                for r in reports
            ],
        }
        _emit(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out)
    else:
        import io

        buf = io.StringIO()
        write_cycle_reports_csv(reports, buf)
        _emit(buf.getvalue(), args.out)
    return 0


CHECKS = {
    "functional": lambda nl, a: verify_mod.check_functional(
        nl, samples=a.samples, seed=a.seed),
    "stage_indication": lambda nl, a: verify_mod.check_stage_indication(nl, seed=a.seed),
    "duality": lambda nl, a: verify_mod.check_duality(
        nl, samples=min(a.samples, 16), seed=a.seed),
    "race_immunity": lambda nl, a: verify_mod.check_race_immunity(
        nl, samples=min(a.samples, 8), seed=a.seed),
    "delay_insensitivity": lambda nl, a: verify_mod.check_delay_insensitivity(
        nl, seeds=a.seeds, samples=min(a.samples, 8), seed=a.seed),
}


def cmd_verify(args: argparse.Namespace) -> int:
    netlist = _load_netlist(args.netlist)
    names = args.checks.split(",") if args.checks else list(CHECKS)
    for name in names:
        if name not in CHECKS:
            raise UsageError(f"unknown check {name!r} (have {', '.join(CHECKS)})")
    outcomes = [CHECKS[name](netlist, args) for name in names]
    lines = []
    for oc in outcomes:
        status = "PASS" if oc.passed else "FAIL"
        lines.append(f"{status} {oc.check}: {oc.detail}")
        if oc.counterexample is not None:
            lines.append("  counterexample: " + oc.counterexample.to_json().replace("\n", " "))
    text = "\n".join(lines) + "\n"
    if args.json:
        payload = {
            "run": _run_config("verify", args,
                               ["netlist", "checks", "samples", "seeds", "seed"]),
            "checks": [
                {
                    "check": oc.check,
                    "passed": oc.passed,
                    "detail": oc.detail,
                    "scenarios": oc.scenarios,
                    "counterexample": (
                        json.loads(oc.counterexample.to_json())
                        if oc.counterexample else None
                    ),
                }
                for oc in outcomes
            ],
        }
        _emit(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out)
        sys.stderr.write(text)
    else:
        _emit(text, args.out)
    return 0 if all(oc.passed for oc in outcomes) else 1


def cmd_bench(args: argparse.Namespace) -> int:
    dm = parse_delay_model(args.delay_model, args.seed)
    adders = args.adders.split(",")
    rows: list[StageMetrics] = []
    pairs = verify_mod.default_pairs(args.n, args.samples, args.seed)[: args.samples]
    for adder in adders:
        spec = MultiplierSpec(n=args.n, fa_kind=FullAdderKind(adder),
                              protocol=Protocol(args.protocol))
        netlist = generate(spec)
        harness = Harness(netlist, dm)
        reports = harness.run_sequence(pairs)
        rows.append(measure(netlist, reports))
    ranked = compare(rows)
    if args.json:
        payload = {
            "run": _run_config("bench", args,
                               ["n", "protocol", "adders", "samples",
                                "delay_model", "seed"]),
            "rows": [r.to_dict() for r in ranked],
        }
        _emit(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out)
    else:
        _emit(render_rows(ranked), args.out)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    rows: list[StageMetrics] = []
    for path in args.inputs:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        for raw in payload.get("rows", []):
            raw = dict(raw)
            raw.pop("pctp_normalized", None)
            rows.append(StageMetrics(**raw, pctp_normalized=None))
    if not rows:
        raise UsageError("no rows found in the given bench artifacts")
    rows = normalize_pctp(rows)
    rows.sort(key=lambda r: (r.n, r.protocol, r.cycle_mean, r.pctp, r.design))
    _emit(render_rows(rows), args.out)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdimul",
        description="Generate, simulate, verify and measure dual-rail "
                    "handshake multipliers.",
    )
    parser.add_argument("--version", action="version", version=f"qdimul {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common_out = {"default": None, "help": "output path (default stdout)"}

    p = sub.add_parser("gen", help="generate a multiplier netlist as JSON")
    p.add_argument("--n", type=int, required=True, help="operand width in bits")
    p.add_argument("--adder", default="dims",
                   choices=[k.value for k in FullAdderKind], help="full adder style")
    p.add_argument("--protocol", default="rtz", choices=["rtz", "rto"])
    p.add_argument("--c3-tree", action="store_true",
                   help="build 3-input joins from 2-input ones")
    p.add_argument("--or4-tree", action="store_true",
                   help="build 4-input merges from 2-input ones")
    p.add_argument("--out", **common_out)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sim", help="run handshake cycles on a netlist")
    p.add_argument("--netlist", required=True)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--pairs", default=None, help="comma list like 3x5,2x7")
    p.add_argument("--delay-model", default="unit", dest="delay_model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", default=None, help="write events to .csv or .vcd")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", **common_out)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("verify", help="run the checker battery on a netlist")
    p.add_argument("--netlist", required=True)
    p.add_argument("--checks", default=None, help="comma list, default all")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seeds", type=int, default=4,
                   help="random delay seeds for the insensitivity sweep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", **common_out)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="measure and rank designs of one size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--protocol", default="rtz", choices=["rtz", "rto"])
    p.add_argument("--adders", default="dims,weak", help="comma list of adder styles")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--delay-model", default="unit", dest="delay_model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", **common_out)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render stored bench artifacts as a table")
    p.add_argument("inputs", nargs="+", help="bench JSON artifacts")
    p.add_argument("--out", **common_out)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, FileNotFoundError, ValueError) as exc:
        parser.exit(2, f"qdimul: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
