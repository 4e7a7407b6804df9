"""Four-phase handshake environment around a generated multiplier stage.

A cycle has two halves.  Data phase: the environment encodes both operands
onto the input rails (together with the constants' phase line), the stage
computes, and the completion detector asserts ``ack_out`` once every product
bit holds a codeword.  Spacer phase: the environment withdraws to spacers
and completion releases, restoring the exact reset state.  ``ack_in`` is the
complement of ``ack_out`` and is maintained by the simulator's zero-delay
environment inverter.

Forward latency is measured from the instant the operand rails are applied
to the completion assert edge; reverse latency from spacer application to
the release edge.  Cycle time is their sum.  The harness waits for full
quiescence before switching phases, which is the conservative contract the
checkers rely on; :meth:`Harness.run_burst` offers an impatient environment
(next phase right after the acknowledge edge) for race experiments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from statistics import fmean
from typing import IO, Iterable, Sequence

from .netlist import DualRailValue, Netlist, decode, encode
from .sim import DEFAULT_GUARD, DelayModel, SimState, Trace, reset


class IllegalOutputError(RuntimeError):
    """A dual-rail port exposed the forbidden rail combination."""

    code = "ILLEGAL_OUTPUT"


class StuckPhaseError(RuntimeError):
    """A handshake phase ended without the expected completion edge."""

    code = "STUCK_PHASE"


class EmptyReportsError(ValueError):
    code = "EMPTY"


@dataclass(frozen=True)
class CycleReport:
    """Result of one full data/spacer handshake cycle."""

    a: int
    b: int
    product: int
    forward: int
    reverse: int
    cycle: int
    transitions: int
    data_start: int
    spacer_start: int
    end: int
    trace: Trace | None = None

    def window(self) -> tuple[int, int, int]:
        """Phase boundaries (data start, spacer start, end) for trace checks."""
        return (self.data_start, self.spacer_start, self.end)


@dataclass(frozen=True)
class LatencySummary:
    cycles: int
    forward_min: int
    forward_max: int
    forward_mean: float
    reverse_min: int
    reverse_max: int
    reverse_mean: float
    cycle_min: int
    cycle_max: int
    cycle_mean: float
    forward_equals_reverse: bool


@dataclass
class BurstResult:
    """Outcome of an impatient multi-cycle run (race experiments)."""

    reports: list[CycleReport]
    trace: Trace
    windows: list[tuple[int, int, int]]
    illegal: list[tuple[int, str]] = field(default_factory=list)


def scan_port_changes(
    netlist: Netlist,
    base_levels: Sequence[int],
    trace: Iterable[tuple],
) -> dict[str, list[tuple[int, DualRailValue]]]:
    """Decode every port's codeword timeline out of a trace.

    Returns, per port name, the list of (time, value) points where the
    decoded value changed.  The caller supplies the net levels the trace
    starts from (usually the reset levels).
    """
    protocol = netlist.protocol
    rails: dict[int, int] = {}
    watchers: dict[int, list[int]] = {}
    ports = netlist.ports
    for i, p in enumerate(ports):
        rails[p.rail1] = base_levels[p.rail1]
        rails[p.rail0] = base_levels[p.rail0]
        watchers.setdefault(p.rail1, []).append(i)
        watchers.setdefault(p.rail0, []).append(i)
    current = [decode(rails[p.rail1], rails[p.rail0], protocol) for p in ports]
    changes: dict[str, list[tuple[int, DualRailValue]]] = {p.name: [] for p in ports}
    for t, net, level, _cause in trace:
        hit = watchers.get(net)
        if hit is None:
            continue
        rails[net] = level
        for i in hit:
            p = ports[i]
            val = decode(rails[p.rail1], rails[p.rail0], protocol)
            if val is not current[i]:
                current[i] = val
                changes[p.name].append((t, val))
    return changes


class Harness:
    """Drives a generated multiplier stage through handshake cycles."""

    def __init__(
        self,
        netlist: Netlist,
        delay_model: DelayModel | None = None,
        guard: int = DEFAULT_GUARD,
    ):
        meta = netlist.meta
        if "operands" not in meta or "products" not in meta:
            raise ValueError("harness requires a generated stage netlist with operand metadata")
        if netlist.ack_out is None or netlist.ack_in is None or netlist.phase_net is None:
            raise ValueError("harness requires ack_out, ack_in and a phase net")
        self.netlist = netlist
        self.guard = guard
        self.state: SimState = reset(netlist, delay_model)
        by_name = {p.name: p for p in netlist.ports}
        self.a_ports = [by_name[nm] for nm in meta["operands"]["a"]]
        self.b_ports = [by_name[nm] for nm in meta["operands"]["b"]]
        self.out_ports = [by_name[nm] for nm in meta["products"]]
        self.n = len(self.a_ports)
        self._ack = netlist.ack_out
        self._phase = netlist.phase_net
        self._active = netlist.protocol.active_level
        self._spacer = netlist.protocol.spacer_level
        self._reset_levels = netlist.reset_levels()

    # -- phase primitives ----------------------------------------------------

    def _apply_operands(self, a: int, b: int, t: int) -> None:
        st = self.state
        proto = self.netlist.protocol
        for ports, value in ((self.a_ports, a), (self.b_ports, b)):
            for i, p in enumerate(ports):
                r1, r0 = encode((value >> i) & 1, proto)
                st.set_primary(p.rail1, r1, t)
                st.set_primary(p.rail0, r0, t)
        st.set_primary(self._phase, self._active, t)

    def _apply_spacer(self, t: int) -> None:
        st = self.state
        for p in (*self.a_ports, *self.b_ports):
            st.set_primary(p.rail1, self._spacer, t)
            st.set_primary(p.rail0, self._spacer, t)
        st.set_primary(self._phase, self._spacer, t)

    def _ack_edge(self, trace: Trace, start: int, level: int, what: str) -> int:
        for t, net, lv, _cause in trace[start:]:
            if net == self._ack and lv == level:
                return t
        raise StuckPhaseError(f"completion never {what} (ack_out stayed put)")

    def _decode_product(self) -> int:
        value = 0
        for i, p in enumerate(self.out_ports):
            v = self.state.read_port(p)
            bit = v.bit
            if bit is None:
                if v is DualRailValue.ILLEGAL:
                    raise IllegalOutputError(f"product port {p.name} decodes ILLEGAL")
                raise StuckPhaseError(f"product port {p.name} still at spacer after completion")
            value |= bit << i
        return value

    def _scan_illegal(self, trace: Trace) -> None:
        changes = scan_port_changes(self.netlist, self._reset_levels, trace)
        for name, points in changes.items():
            for t, val in points:
                if val is DualRailValue.ILLEGAL:
                    raise IllegalOutputError(f"port {name} decodes ILLEGAL at t={t}")

    # -- cycles ----------------------------------------------------------------

    def run_cycle(self, a: int, b: int, want_trace: bool = False) -> CycleReport:
        """One complete data/spacer handshake; returns the measured cycle.

        Raises :class:`StuckPhaseError` if completion never asserts or
        releases, :class:`IllegalOutputError` if any port ever decodes to the
        forbidden rail pair, and propagates ``NonQuiescentError`` from the
        engine on oscillation.
        """
        limit = 1 << self.n
        if not (0 <= a < limit and 0 <= b < limit):
            raise ValueError(f"operands must fit in {self.n} bits")
        st = self.state
        if not st.quiescent:
            raise StuckPhaseError("cycle started with events still pending")

        t0 = st.clock
        self._apply_operands(a, b, t0)
        st.run_until_quiescent(self.guard)
        ta = self._ack_edge(st.trace, 0, self._active, "asserted")
        product = self._decode_product()

        t1 = st.clock + 1
        data_events = len(st.trace)
        self._apply_spacer(t1)
        st.run_until_quiescent(self.guard)
        tb = self._ack_edge(st.trace, data_events, self._spacer, "released")
        for p in self.out_ports:
            if st.read_port(p) is not DualRailValue.SPACER:
                raise StuckPhaseError(f"port {p.name} failed to return to spacer")
        if st.levels != self._reset_levels:
            raise StuckPhaseError("cycle ended away from the reset state")

        trace = st.take_trace()
        self._scan_illegal(trace)
        forward = ta - t0
        reverse = tb - t1
        return CycleReport(
            a=a,
            b=b,
            product=product,
            forward=forward,
            reverse=reverse,
            cycle=forward + reverse,
            transitions=len(trace),
            data_start=t0,
            spacer_start=t1,
            end=st.clock,
            trace=trace if want_trace else None,
        )

    def run_sequence(
        self, pairs: Iterable[tuple[int, int]], want_traces: bool = False
    ) -> list[CycleReport]:
        """Run consecutive cycles, threading circuit state between them."""
        return [self.run_cycle(a, b, want_trace=want_traces) for a, b in pairs]

    def run_burst(self, pairs: Sequence[tuple[int, int]], gap: int = 1) -> BurstResult:
        """Impatient environment: switch phases right after the ack edge.

        A correct quasi-delay-insensitive stage tolerates this -- that is the
        entire point of the discipline.  Netlists with broken isochronic
        forks or unacknowledged transitions can be caught mid-flight here,
        which the fully patient :meth:`run_cycle` would mask by waiting for
        global quiescence.  Port codeword violations are collected rather
        than raised.
        """
        st = self.state
        if not st.quiescent:
            raise StuckPhaseError("burst started with events still pending")
        reports: list[CycleReport] = []
        windows: list[tuple[int, int, int]] = []
        origin = len(st.trace)
        for a, b in pairs:
            t0 = st.clock if not reports else st.clock + gap
            self._apply_operands(a, b, t0)
            st.run_until_quiescent(self.guard, stop_net=self._ack, stop_level=self._active)
            if st.levels[self._ack] != self._active:
                raise StuckPhaseError("completion never asserted during burst")
            ta = st.clock
            product = self._decode_product()
            t1 = ta + gap
            self._apply_spacer(t1)
            st.run_until_quiescent(self.guard, stop_net=self._ack, stop_level=self._spacer)
            if st.levels[self._ack] != self._spacer:
                raise StuckPhaseError("completion never released during burst")
            tb = st.clock
            reports.append(
                CycleReport(
                    a=a, b=b, product=product,
                    forward=ta - t0, reverse=tb - t1, cycle=(ta - t0) + (tb - t1),
                    transitions=0,
                    data_start=t0, spacer_start=t1, end=tb,
                )
            )
            windows.append((t0, t1, tb))
        st.run_until_quiescent(self.guard)
        trace = st.trace[origin:]
        illegal: list[tuple[int, str]] = []
        changes = scan_port_changes(self.netlist, self._reset_levels, trace)
        for name, points in changes.items():
            for t, val in points:
                if val is DualRailValue.ILLEGAL:
                    illegal.append((t, name))
        st.take_trace()
        return BurstResult(reports=reports, trace=trace, windows=windows, illegal=sorted(illegal))


def measure_latencies(reports: Sequence[CycleReport]) -> LatencySummary:
    """Aggregate latency statistics over a batch of cycle reports."""
    if not reports:
        raise EmptyReportsError("no cycle reports to summarize")
    fwd = [r.forward for r in reports]
    rev = [r.reverse for r in reports]
    cyc = [r.cycle for r in reports]
    return LatencySummary(
        cycles=len(reports),
        forward_min=min(fwd), forward_max=max(fwd), forward_mean=fmean(fwd),
        reverse_min=min(rev), reverse_max=max(rev), reverse_mean=fmean(rev),
        cycle_min=min(cyc), cycle_max=max(cyc), cycle_mean=fmean(cyc),
        forward_equals_reverse=all(f == r for f, r in zip(fwd, rev)),
    )


def write_cycle_reports_csv(reports: Iterable[CycleReport], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["a", "b", "product", "forward", "reverse", "cycle", "transitions"])
    for r in reports:
        writer.writerow([r.a, r.b, r.product, r.forward, r.reverse, r.cycle, r.transitions])


def cycle_reports_json(reports: Iterable[CycleReport]) -> str:
    rows = [
        {
            "a": r.a, "b": r.b, "product": r.product,
            "forward": r.forward, "reverse": r.reverse,
            "cycle": r.cycle, "transitions": r.transitions,
        }
        for r in reports
    ]
    return json.dumps(rows, indent=1, sort_keys=True) + "\n"
