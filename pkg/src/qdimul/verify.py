"""Property checkers for dual-rail handshake circuits.

Each checker returns a :class:`CheckOutcome`; a failing outcome carries a
:class:`Counterexample` with everything needed to replay it (operands, seed,
delay model, tail of the event trace).  The checkers never mutate the
netlist under test.

The module also ships three netlist mutators used as negative controls:
:func:`swap_port_rails` (corrupts function), :func:`narrow_completion`
(completion stops indicating all inputs) and :func:`inject_fork_skew`
(delays one branch of a forking wire, breaking the matched-fork assumption).
A healthy checker suite must fail on each of them.
"""

from __future__ import annotations

import dataclasses
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .harness import (
    Harness,
    CycleReport,
    IllegalOutputError,
    StuckPhaseError,
    scan_port_changes,
)
from .metrics import design_label
from .netlist import (
    DualRailPort,
    DualRailValue,
    Gate,
    GateKind,
    Netlist,
    dualize,
    encode,
)
from .sim import DEFAULT_GUARD, DelayModel, NonQuiescentError, SimState, reset

TRACE_TAIL = 24


@dataclass(frozen=True)
class Counterexample:
    """A replayable failing scenario."""

    design: str
    check: str
    stimulus: dict
    delay_model: dict
    observed: str
    expected: str
    trace_tail: tuple = ()

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=1, sort_keys=True)


@dataclass(frozen=True)
class CheckOutcome:
    check: str
    passed: bool
    detail: str
    scenarios: int = 0
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed


def _design_name(netlist: Netlist) -> str:
    return design_label(netlist)


def _tail(trace: Sequence[tuple]) -> tuple:
    return tuple(trace[-TRACE_TAIL:])


def _fail(
    check: str,
    netlist: Netlist,
    stimulus: dict,
    delay_model: DelayModel | None,
    observed: str,
    expected: str,
    scenarios: int,
    trace: Sequence[tuple] = (),
) -> CheckOutcome:
    dm = delay_model or DelayModel.unit()
    ce = Counterexample(
        design=_design_name(netlist),
        check=check,
        stimulus=stimulus,
        delay_model=dm.describe(),
        observed=observed,
        expected=expected,
        trace_tail=_tail(trace),
    )
    return CheckOutcome(check, False, f"{observed} (expected {expected})", scenarios, ce)


def default_pairs(n: int, samples: int = 64, seed: int = 0) -> list[tuple[int, int]]:
    """Stimulus set: exhaustive up to 4-bit operands, seeded sample beyond."""
    limit = 1 << n
    if n <= 4:
        return [(a, b) for a in range(limit) for b in range(limit)]
    rng = random.Random(seed)
    pairs = [(0, 0), (limit - 1, limit - 1), (1, limit - 1), (limit - 1, 1)]
    while len(pairs) < samples:
        pairs.append((rng.randrange(limit), rng.randrange(limit)))
    return pairs


# -- functional correctness ----------------------------------------------------


def check_functional(
    netlist: Netlist,
    delay_model: DelayModel | None = None,
    pairs: Sequence[tuple[int, int]] | None = None,
    samples: int = 64,
    seed: int = 0,
) -> CheckOutcome:
    """Products must equal the integer product of the operands."""
    name = "functional"
    n = int(netlist.meta["n"])
    if pairs is None:
        pairs = default_pairs(n, samples, seed)
    harness = Harness(netlist, delay_model)
    done = 0
    for a, b in pairs:
        try:
            report = harness.run_cycle(a, b)
        except (StuckPhaseError, IllegalOutputError, NonQuiescentError) as exc:
            tail = _replay_tail(netlist, delay_model, pairs[: done + 1])
            return _fail(name, netlist, {"a": a, "b": b, "cycle": done},
                         delay_model, f"{type(exc).__name__}: {exc}",
                         "clean handshake cycle", done, tail)
        if report.product != a * b:
            tail = _replay_tail(netlist, delay_model, pairs[: done + 1])
            return _fail(name, netlist, {"a": a, "b": b, "cycle": done},
                         delay_model, f"product {report.product}",
                         f"product {a * b}", done, tail)
        done += 1
    return CheckOutcome(name, True, f"{done} products match the integer oracle", done)


def _replay_tail(
    netlist: Netlist,
    delay_model: DelayModel | None,
    pairs: Sequence[tuple[int, int]],
) -> tuple:
    """Re-run a failing prefix with tracing on to capture the event tail."""
    harness = Harness(netlist, delay_model)
    trace: list = []
    try:
        for a, b in pairs:
            report = harness.run_cycle(a, b, want_trace=True)
            trace = report.trace or []
    except (StuckPhaseError, IllegalOutputError, NonQuiescentError):
        trace = harness.state.trace
    return _tail(trace)


# -- indication (cell level) ---------------------------------------------------


def _cell_io(netlist: Netlist) -> tuple[tuple[DualRailPort, ...], tuple[DualRailPort, ...]]:
    ins, outs = netlist.input_ports, netlist.output_ports
    if not ins or not outs:
        raise ValueError("indication checks need a cell with dual-rail ports")
    return ins, outs


def _drive(st: SimState, port: DualRailPort, bit: int | None) -> None:
    proto = st.netlist.protocol
    if bit is None:
        st.set_primary(port.rail1, proto.spacer_level)
        st.set_primary(port.rail0, proto.spacer_level)
    else:
        r1, r0 = encode(bit, proto)
        st.set_primary(port.rail1, r1)
        st.set_primary(port.rail0, r0)


def check_strong_indication(netlist: Netlist, guard: int = DEFAULT_GUARD) -> CheckOutcome:
    """No output may move before the last input, in either phase.

    Exercises every input codeword under every arrival order: inputs are
    applied one at a time (settling in between), and no output rail may
    transition until the final input lands.  The same holds for withdrawal:
    outputs stay at data until the final input returns to spacer.
    """
    name = "strong_indication"
    ins, outs = _cell_io(netlist)
    k = len(ins)
    out_nets = {p.rail1 for p in outs} | {p.rail0 for p in outs}
    reset_levels = netlist.reset_levels()
    scenarios = 0
    for bits in itertools.product((0, 1), repeat=k):
        for order in itertools.permutations(range(k)):
            stim = {
                "bits": {p.name: bits[i] for i, p in enumerate(ins)},
                "arrival": [ins[i].name for i in order],
            }
            st = reset(netlist)
            for pos, idx in enumerate(order):
                mark = len(st.trace)
                _drive(st, ins[idx], bits[idx])
                st.run_until_quiescent(guard)
                moved = [e for e in st.trace[mark:] if e[1] in out_nets]
                if pos < k - 1 and moved:
                    return _fail(name, netlist, stim, None,
                                 f"output net {moved[0][1]} moved at t={moved[0][0]} "
                                 f"after only {pos + 1} of {k} inputs",
                                 "no output activity before the last input",
                                 scenarios, st.trace)
            if any(st.read_port(p).bit is None for p in outs):
                return _fail(name, netlist, stim, None,
                             "outputs incomplete with all inputs present",
                             "all outputs at codewords", scenarios, st.trace)
            for pos, idx in enumerate(order):
                mark = len(st.trace)
                _drive(st, ins[idx], None)
                st.run_until_quiescent(guard)
                moved = [e for e in st.trace[mark:] if e[1] in out_nets]
                if pos < k - 1 and moved:
                    return _fail(name, netlist, stim, None,
                                 f"output net {moved[0][1]} moved at t={moved[0][0]} "
                                 f"after only {pos + 1} of {k} withdrawals",
                                 "no output activity before the last withdrawal",
                                 scenarios, st.trace)
            if any(st.read_port(p) is not DualRailValue.SPACER for p in outs):
                return _fail(name, netlist, stim, None, "outputs stuck off spacer",
                             "all outputs at spacer", scenarios, st.trace)
            if st.levels != reset_levels:
                return _fail(name, netlist, stim, None, "cell did not return to reset",
                             "exact reset state after a full cycle", scenarios, st.trace)
            scenarios += 1
    return CheckOutcome(
        name, True,
        f"outputs wait for the last input under all {scenarios} "
        "codeword/arrival-order scenarios", scenarios)


def check_weak_indication(netlist: Netlist, guard: int = DEFAULT_GUARD) -> CheckOutcome:
    """Output completion must imply input completion, in both phases.

    Weaker than :func:`check_strong_indication`: individual outputs may fire
    early, but while any input is missing the outputs as a whole must stay
    incomplete, and while any input is still at data they must not all reach
    spacer.  Cells are exercised under every codeword and arrival order;
    multiplier stages (recognised by their port metadata) run the
    withheld-operand-bit variant via :func:`check_stage_indication`.
    """
    name = "weak_indication"
    if "operands" in netlist.meta:
        outcome = check_stage_indication(netlist, guard=guard)
        ce = outcome.counterexample
        if ce is not None:
            ce = dataclasses.replace(ce, check=name)
        return dataclasses.replace(outcome, check=name, counterexample=ce)
    ins, outs = _cell_io(netlist)
    k = len(ins)
    reset_levels = netlist.reset_levels()
    scenarios = 0
    for bits in itertools.product((0, 1), repeat=k):
        for order in itertools.permutations(range(k)):
            stim = {
                "bits": {p.name: bits[i] for i, p in enumerate(ins)},
                "arrival": [ins[i].name for i in order],
            }
            st = reset(netlist)
            for pos, idx in enumerate(order):
                _drive(st, ins[idx], bits[idx])
                st.run_until_quiescent(guard)
                complete = all(st.read_port(p).bit is not None for p in outs)
                if pos < k - 1 and complete:
                    return _fail(name, netlist, stim, None,
                                 f"all outputs complete after only {pos + 1} of {k} inputs",
                                 "at least one output incomplete", scenarios, st.trace)
            if any(st.read_port(p).bit is None for p in outs):
                return _fail(name, netlist, stim, None,
                             "outputs incomplete with all inputs present",
                             "all outputs at codewords", scenarios, st.trace)
            for pos, idx in enumerate(order):
                _drive(st, ins[idx], None)
                st.run_until_quiescent(guard)
                idle = all(st.read_port(p) is DualRailValue.SPACER for p in outs)
                if pos < k - 1 and idle:
                    return _fail(name, netlist, stim, None,
                                 f"all outputs at spacer after only {pos + 1} of {k} "
                                 "withdrawals",
                                 "at least one output still at data", scenarios, st.trace)
            if st.levels != reset_levels:
                return _fail(name, netlist, stim, None, "cell did not return to reset",
                             "exact reset state after a full cycle", scenarios, st.trace)
            scenarios += 1
    return CheckOutcome(
        name, True,
        f"output completion implies input completion across {scenarios} "
        "codeword/arrival-order scenarios", scenarios)


# -- indication (stage level) --------------------------------------------------


def check_stage_indication(
    netlist: Netlist,
    delay_model: DelayModel | None = None,
    extra_values: int = 2,
    seed: int = 0,
    guard: int = DEFAULT_GUARD,
) -> CheckOutcome:
    """Completion must not assert while any single operand bit is withheld.

    For every operand port and a handful of operand values the stage runs
    with that one dual-rail bit held at spacer; ``ack_out`` must stay
    released.  Supplying the bit must then complete the handshake with the
    correct product, and a full spacer must restore the reset state.
    """
    name = "stage_indication"
    meta = netlist.meta
    n = int(meta["n"])
    by_name = {p.name: p for p in netlist.ports}
    a_ports = [by_name[nm] for nm in meta["operands"]["a"]]
    b_ports = [by_name[nm] for nm in meta["operands"]["b"]]
    out_ports = [by_name[nm] for nm in meta["products"]]
    dm = delay_model or DelayModel.unit()
    proto = netlist.protocol
    active, spacer = proto.active_level, proto.spacer_level
    ack = netlist.ack_out
    reset_levels = netlist.reset_levels()
    limit = 1 << n
    rng = random.Random(seed)
    values = [(limit - 1, limit - 1)]
    values += [(rng.randrange(limit), rng.randrange(limit)) for _ in range(extra_values)]
    scenarios = 0
    for withheld in (*a_ports, *b_ports):
        for a, b in values:
            stim = {"a": a, "b": b, "withheld": withheld.name}
            st = reset(netlist, dm)
            st.set_primary(netlist.phase_net, active)
            for ports, value in ((a_ports, a), (b_ports, b)):
                for i, p in enumerate(ports):
                    if p is withheld:
                        continue
                    r1, r0 = encode((value >> i) & 1, proto)
                    st.set_primary(p.rail1, r1)
                    st.set_primary(p.rail0, r0)
            st.run_until_quiescent(guard)
            if st.levels[ack] != spacer:
                return _fail(name, netlist, stim, dm,
                             f"completion asserted with {withheld.name} withheld",
                             "ack_out released until every input bit arrives",
                             scenarios, st.trace)
            if all(st.read_port(p) is not DualRailValue.SPACER for p in out_ports):
                return _fail(name, netlist, stim, dm,
                             f"every product bit completed with {withheld.name} withheld",
                             "at least one product bit still at spacer",
                             scenarios, st.trace)
            w_ports = a_ports if withheld in a_ports else b_ports
            w_value = a if withheld in a_ports else b
            bit = (w_value >> w_ports.index(withheld)) & 1
            r1, r0 = encode(bit, proto)
            st.set_primary(withheld.rail1, r1)
            st.set_primary(withheld.rail0, r0)
            st.run_until_quiescent(guard)
            if st.levels[ack] != active:
                return _fail(name, netlist, stim, dm, "completion missing with all inputs",
                             "ack_out asserted", scenarios, st.trace)
            product = 0
            for i, p in enumerate(out_ports):
                v = st.read_port(p).bit
                if v is None:
                    return _fail(name, netlist, stim, dm, f"port {p.name} incomplete",
                                 "all products at codewords", scenarios, st.trace)
                product |= v << i
            if product != a * b:
                return _fail(name, netlist, stim, dm, f"product {product}",
                             f"product {a * b}", scenarios, st.trace)
            st.set_primary(netlist.phase_net, spacer)
            for p in (*a_ports, *b_ports):
                st.set_primary(p.rail1, spacer)
                st.set_primary(p.rail0, spacer)
            st.run_until_quiescent(guard)
            if st.levels != reset_levels:
                return _fail(name, netlist, stim, dm, "stage did not return to reset",
                             "exact reset state after a full cycle", scenarios, st.trace)
            scenarios += 1
    return CheckOutcome(name, True,
                        f"ack_out waits for every operand bit ({scenarios} scenarios)",
                        scenarios)


# -- monotonicity / hazards ------------------------------------------------


def _merge_watchers(netlist: Netlist) -> tuple[dict, dict]:
    """Map net -> AND/OR consumer gates, the merge gates hazard checks watch."""
    or_watch: dict[int, list[int]] = {}
    and_watch: dict[int, list[int]] = {}
    for g in netlist.gates:
        fam = g.kind.name
        if fam.startswith("OR"):
            for n in g.inputs:
                or_watch.setdefault(n, []).append(g.id)
        elif fam.startswith("AND"):
            for n in g.inputs:
                and_watch.setdefault(n, []).append(g.id)
    return or_watch, and_watch


def check_monotonicity(netlist: Netlist, reports: Sequence[CycleReport]) -> CheckOutcome:
    """Every net and every merge gate must act once per handshake phase.

    Two rules over traced cycles.  Net rule: a net changes at most once per
    phase window.  Merge rule: an AND or OR gate receives at most one input
    transition toward its firing level per window; a second one is a
    transition the output cannot acknowledge, the classic hazard of
    non-disjoint merges.  C-elements are exempt, they absorb and sequence
    multiple arrivals by design.
    """
    name = "monotonicity"
    or_watch, and_watch = _merge_watchers(netlist)
    scenarios = 0
    for idx, r in enumerate(reports):
        if r.trace is None:
            raise ValueError("check_monotonicity needs cycle reports with traces")
        net_seen: dict[tuple[int, int], int] = {}
        merge_seen: dict[tuple[int, int], int] = {}
        for t, net, level, _cause in r.trace:
            w = 0 if t < r.spacer_start else 1
            key = (net, w)
            net_seen[key] = net_seen.get(key, 0) + 1
            if net_seen[key] > 1:
                stim = {"a": r.a, "b": r.b, "cycle": idx, "phase": w}
                return _fail(name, netlist, stim, None,
                             f"net {net} changed twice in one phase (t={t})",
                             "one transition per net per phase", scenarios, r.trace)
            watchers = or_watch if level == 1 else and_watch
            for gid in watchers.get(net, ()):
                gkey = (gid, w)
                merge_seen[gkey] = merge_seen.get(gkey, 0) + 1
                if merge_seen[gkey] > 1:
                    stim = {"a": r.a, "b": r.b, "cycle": idx, "phase": w}
                    return _fail(
                        name, netlist, stim, None,
                        f"merge gate {gid} got a second firing input (net {net}, t={t})",
                        "disjoint merges: one firing input per phase",
                        scenarios, r.trace)
        scenarios += 1
    return CheckOutcome(name, True,
                        f"all transitions acknowledged across {scenarios} cycles", scenarios)


# -- delay insensitivity -----------------------------------------------------


def _port_conformance(netlist: Netlist, reset_levels: list[int], trace) -> str | None:
    changes = scan_port_changes(netlist, reset_levels, trace)
    for pname, points in changes.items():
        vals = [v for _, v in points]
        ok = (
            len(vals) == 2
            and vals[0].bit is not None
            and vals[1] is DualRailValue.SPACER
        )
        if not ok:
            seq = ",".join(v.name for v in vals) or "none"
            return f"port {pname} codeword sequence [{seq}]"
    return None


def check_delay_insensitivity(
    netlist: Netlist,
    pairs: Sequence[tuple[int, int]] | None = None,
    seeds: Iterable[int] | int = 8,
    lo: int = 1,
    hi: int = 20,
    samples: int = 16,
    seed: int = 0,
) -> CheckOutcome:
    """Behaviour must not depend on gate delays.

    Runs the same operand sequence under unit delays and under per-gate
    random delays for several seeds.  Every run must produce the oracle
    products, keep every port on the data/spacer alternation, and stay
    monotonic per phase.  Cycle times may and do differ; that is the point.
    """
    name = "delay_insensitivity"
    n = int(netlist.meta["n"])
    if pairs is None:
        pairs = default_pairs(n, samples, seed)[:samples]
    if isinstance(seeds, int):
        seeds = range(seeds)
    models = [DelayModel.unit()]
    models += [DelayModel.random_per_gate(lo, hi, s) for s in seeds]
    cycle_times = set()
    scenarios = 0
    for dm in models:
        harness = Harness(netlist, dm)
        reset_levels = netlist.reset_levels()
        for idx, (a, b) in enumerate(pairs):
            stim = {"a": a, "b": b, "cycle": idx}
            try:
                r = harness.run_cycle(a, b, want_trace=True)
            except (StuckPhaseError, IllegalOutputError, NonQuiescentError) as exc:
                return _fail(name, netlist, stim, dm, f"{type(exc).__name__}: {exc}",
                             "clean handshake cycle", scenarios, harness.state.trace)
            if r.product != a * b:
                return _fail(name, netlist, stim, dm, f"product {r.product}",
                             f"product {a * b}", scenarios, r.trace or ())
            bad = _port_conformance(netlist, reset_levels, r.trace)
            if bad:
                return _fail(name, netlist, stim, dm, bad,
                             "each port: one codeword, one spacer per cycle",
                             scenarios, r.trace or ())
            mono = check_monotonicity(netlist, [r])
            if not mono:
                ce = mono.counterexample
                return CheckOutcome(name, False, mono.detail, scenarios,
                                    dataclasses.replace(ce, check=name,
                                                        delay_model=dm.describe()))
            cycle_times.add(r.cycle)
            scenarios += 1
    detail = (f"{scenarios} cycles over {len(models)} delay models agree with the oracle; "
              f"{len(cycle_times)} distinct cycle times observed")
    return CheckOutcome(name, True, detail, scenarios,
                        stats={"models": len(models), "cycle_times": sorted(cycle_times)})


# -- protocol duality ----------------------------------------------------------


def check_duality(
    netlist: Netlist,
    pairs: Sequence[tuple[int, int]] | None = None,
    samples: int = 32,
    seed: int = 0,
) -> CheckOutcome:
    """The polarity-flipped twin must behave identically.

    Structural half: flipping twice must reproduce the original netlist
    exactly.  Behavioural half: the flipped stage must produce the same
    products with the same forward and reverse latencies under unit delays.
    """
    name = "duality"
    dual = dualize(netlist)
    if dualize(dual) != netlist:
        return _fail(name, netlist, {}, None, "double flip changed the netlist",
                     "polarity flip is an involution", 0)
    n = int(netlist.meta["n"])
    if pairs is None:
        pairs = default_pairs(n, samples, seed)[:samples]
    h1 = Harness(netlist)
    h2 = Harness(dual)
    scenarios = 0
    for a, b in pairs:
        r1 = h1.run_cycle(a, b)
        r2 = h2.run_cycle(a, b)
        stim = {"a": a, "b": b}
        if r1.product != r2.product:
            return _fail(name, netlist, stim, None,
                         f"products differ ({r1.product} vs {r2.product})",
                         "identical products", scenarios)
        if (r1.forward, r1.reverse) != (r2.forward, r2.reverse):
            return _fail(name, netlist, stim, None,
                         f"latencies differ ({r1.forward}/{r1.reverse} vs "
                         f"{r2.forward}/{r2.reverse})",
                         "mirrored timing under unit delays", scenarios)
        scenarios += 1
    return CheckOutcome(name, True,
                        f"flip is an involution; {scenarios} cycles behave identically",
                        scenarios)


# -- racing environment --------------------------------------------------------


def check_race_immunity(
    netlist: Netlist,
    pairs: Sequence[tuple[int, int]] | None = None,
    gap: int = 1,
    delay_model: DelayModel | None = None,
    samples: int = 16,
    seed: int = 0,
) -> CheckOutcome:
    """The stage must survive an environment that never waits for quiescence.

    Phases switch one tick after each acknowledge edge, so transitions still
    in flight from the previous phase race the next one.  A correct
    quasi-delay-insensitive stage still yields oracle products and legal
    codewords; stages with skewed forks leak stale transitions across phase
    boundaries and fail here.
    """
    name = "race_immunity"
    n = int(netlist.meta["n"])
    if pairs is None:
        pairs = default_pairs(n, samples, seed)[:samples]
    harness = Harness(netlist, delay_model)
    try:
        result = harness.run_burst(pairs, gap=gap)
    except (StuckPhaseError, IllegalOutputError, NonQuiescentError) as exc:
        return _fail(name, netlist, {"pairs": list(pairs), "gap": gap}, delay_model,
                     f"{type(exc).__name__}: {exc}", "completed burst", 0,
                     harness.state.trace)
    if result.illegal:
        t, pname = result.illegal[0]
        return _fail(name, netlist, {"pairs": list(pairs), "gap": gap}, delay_model,
                     f"port {pname} decoded ILLEGAL at t={t}",
                     "legal codewords throughout the burst", 0, result.trace)
    for idx, r in enumerate(result.reports):
        if r.product != r.a * r.b:
            return _fail(name, netlist, {"a": r.a, "b": r.b, "cycle": idx, "gap": gap},
                         delay_model, f"product {r.product}", f"product {r.a * r.b}",
                         idx, result.trace)
    return CheckOutcome(name, True,
                        f"{len(result.reports)} back-to-back cycles stay clean at gap={gap}",
                        len(result.reports))


def run_all_checks(
    netlist: Netlist,
    seeds: int = 4,
    samples: int = 16,
    seed: int = 0,
) -> list[CheckOutcome]:
    """The standard stage verification battery, cheapest checks first."""
    return [
        check_functional(netlist, samples=samples, seed=seed),
        check_stage_indication(netlist),
        check_duality(netlist, samples=min(samples, 16), seed=seed),
        check_race_immunity(netlist, samples=min(samples, 8), seed=seed),
        check_delay_insensitivity(netlist, seeds=seeds, samples=min(samples, 8), seed=seed),
    ]


# -- negative controls ---------------------------------------------------------


def _mutated(netlist: Netlist, tag: str, **overrides) -> Netlist:
    meta = dict(netlist.meta)
    meta["mutation"] = tag
    fields = dict(
        protocol=netlist.protocol,
        gates=netlist.gates,
        input_ports=netlist.input_ports,
        output_ports=netlist.output_ports,
        ack_out=netlist.ack_out,
        ack_in=netlist.ack_in,
        const_nets=netlist.const_nets,
        phase_net=netlist.phase_net,
        extra_inputs=netlist.extra_inputs,
        meta=meta,
    )
    fields.update(overrides)
    return Netlist(**fields)


def swap_port_rails(netlist: Netlist, port_name: str | None = None) -> Netlist:
    """Negative control: cross the rails of one output port.

    The circuit still completes and still handshakes, but the affected bit
    reads inverted whenever it carries a one, so :func:`check_functional`
    must fail.
    """
    outs = list(netlist.output_ports)
    if port_name is None:
        port_name = outs[0].name
    swapped = []
    found = False
    for p in outs:
        if p.name == port_name:
            swapped.append(DualRailPort(p.name, p.rail0, p.rail1, p.direction))
            found = True
        else:
            swapped.append(p)
    if not found:
        raise ValueError(f"no output port named {port_name!r}")
    return _mutated(netlist, f"swap_port_rails:{port_name}", output_ports=swapped)


def narrow_completion(netlist: Netlist, port_name: str | None = None) -> Netlist:
    """Negative control: completion watches a single output bit.

    ``ack_out`` is rewired to the detector's collector for one port, so it
    asserts as soon as that bit completes, no longer indicating the other
    inputs; :func:`check_stage_indication` must fail.
    """
    outs = netlist.output_ports
    if port_name is None:
        port_name = outs[0].name
    port = next((p for p in outs if p.name == port_name), None)
    if port is None:
        raise ValueError(f"no output port named {port_name!r}")
    rails = {port.rail1, port.rail0}
    collector = None
    for g in netlist.gates:
        if g.kind in (GateKind.OR2, GateKind.AND2) and set(g.inputs) == rails:
            collector = g
            break
    if collector is None:
        raise ValueError(f"no completion collector found for port {port_name!r}")
    return _mutated(netlist, f"narrow_completion:{port_name}", ack_out=collector.output)


def inject_fork_skew(
    netlist: Netlist,
    net: int,
    consumer_gate: int,
    stages: int = 8,
) -> Netlist:
    """Negative control: delay one branch of a forking net.

    Inserts a chain of identity gates (OR2 with both inputs tied) between
    ``net`` and one of its consumers, modelling a wire branch that is much
    slower than its siblings.  This violates the matched-fork assumption the
    design relies on; under a racing environment stale transitions cross
    phase boundaries and :func:`check_race_immunity` must fail.
    """
    if stages < 1:
        raise ValueError("stages must be positive")
    gate = netlist.gate_by_id.get(consumer_gate)
    if gate is None:
        raise ValueError(f"no gate with id {consumer_gate}")
    if net not in gate.inputs:
        raise ValueError(f"net {net} does not feed gate {consumer_gate}")
    if len(netlist.net(net).fanout) < 2:
        raise ValueError(f"net {net} does not fork")
    level = netlist.reset_levels()[net]
    next_net = netlist.net_count
    next_gate = max(g.id for g in netlist.gates) + 1
    gates = list(netlist.gates)
    prev = net
    for k in range(stages):
        out = next_net + k
        gates.append(Gate(next_gate + k, GateKind.OR2, (prev, prev), out, level))
        prev = out
    for i, g in enumerate(gates):
        if g.id == consumer_gate:
            new_inputs = tuple(prev if x == net else x for x in g.inputs)
            gates[i] = Gate(g.id, g.kind, new_inputs, g.output, g.reset)
            break
    tag = f"fork_skew:net{net}->gate{consumer_gate}x{stages}"
    return _mutated(netlist, tag, gates=gates)
