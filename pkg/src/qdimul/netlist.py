"""Gate-level netlist representation for dual-rail handshake circuits.

A netlist is a flat bag of gates wired through integer net ids.  Every value
that travels between circuit stages is a dual-rail pair (rail1, rail0); the
two supported signalling disciplines differ only in which level means "empty":

* RTZ (return to zero):  DATA1 = (1,0), DATA0 = (0,1), SPACER = (0,0).
* RTO (return to one):   DATA1 = (0,1), DATA0 = (1,0), SPACER = (1,1).

The remaining rail combination is ILLEGAL and must never appear on a port of
a well-formed circuit.  RTZ and RTO netlists are exact structural duals of
each other: swapping AND and OR gates of equal arity and complementing every
reset level converts one into the other (see :func:`dualize`).

Gates are either plain Boolean primitives (AND/OR/NOT) or Muller C-elements,
which drive their output to the common input level when all inputs agree and
hold it otherwise.  C-element feedback is the only state in the model, so a
netlist plus per-gate reset levels fully determines behaviour.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class Protocol(Enum):
    """Four-phase handshake discipline of a netlist."""

    RTZ = "rtz"
    RTO = "rto"

    @property
    def spacer_level(self) -> int:
        """Rail level that encodes "no data" (0 for RTZ, 1 for RTO)."""
        return 0 if self is Protocol.RTZ else 1

    @property
    def active_level(self) -> int:
        """Rail level a codeword drives onto exactly one rail."""
        return 1 - self.spacer_level

    @property
    def flipped(self) -> "Protocol":
        return Protocol.RTO if self is Protocol.RTZ else Protocol.RTZ


class DualRailValue(Enum):
    SPACER = "spacer"
    DATA0 = "data0"
    DATA1 = "data1"
    ILLEGAL = "illegal"

    @property
    def bit(self) -> int | None:
        """0 or 1 for data codewords, None for SPACER and ILLEGAL."""
        if self is DualRailValue.DATA0:
            return 0
        if self is DualRailValue.DATA1:
            return 1
        return None


def encode(bit: int, protocol: Protocol) -> tuple[int, int]:
    """Return the (rail1, rail0) levels that encode ``bit`` under ``protocol``."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    active, spacer = protocol.active_level, protocol.spacer_level
    return (active, spacer) if bit else (spacer, active)


def decode(rail1: int, rail0: int, protocol: Protocol) -> DualRailValue:
    """Classify a (rail1, rail0) level pair under ``protocol``."""
    spacer = protocol.spacer_level
    if rail1 == spacer and rail0 == spacer:
        return DualRailValue.SPACER
    if rail1 != spacer and rail0 != spacer:
        return DualRailValue.ILLEGAL
    return DualRailValue.DATA1 if rail1 != spacer else DualRailValue.DATA0


class GateKind(Enum):
    AND2 = "and2"
    AND3 = "and3"
    AND4 = "and4"
    OR2 = "or2"
    OR3 = "or3"
    OR4 = "or4"
    NOT = "not"
    C2 = "c2"
    C3 = "c3"


ARITY: dict[GateKind, int] = {
    GateKind.AND2: 2,
    GateKind.AND3: 3,
    GateKind.AND4: 4,
    GateKind.OR2: 2,
    GateKind.OR3: 3,
    GateKind.OR4: 4,
    GateKind.NOT: 1,
    GateKind.C2: 2,
    GateKind.C3: 3,
}

STATEFUL: frozenset[GateKind] = frozenset({GateKind.C2, GateKind.C3})

#: AND <-> OR of equal arity; NOT and C-elements are self-dual.
DUAL_KIND: dict[GateKind, GateKind] = {
    GateKind.AND2: GateKind.OR2,
    GateKind.AND3: GateKind.OR3,
    GateKind.AND4: GateKind.OR4,
    GateKind.OR2: GateKind.AND2,
    GateKind.OR3: GateKind.AND3,
    GateKind.OR4: GateKind.AND4,
    GateKind.NOT: GateKind.NOT,
    GateKind.C2: GateKind.C2,
    GateKind.C3: GateKind.C3,
}

_AND_KINDS = frozenset({GateKind.AND2, GateKind.AND3, GateKind.AND4})
_OR_KINDS = frozenset({GateKind.OR2, GateKind.OR3, GateKind.OR4})


def eval_kind(kind: GateKind, inputs: Iterable[int], state: int) -> int:
    """Output level of a gate given input levels and its current output level.

    ``state`` only matters for C-elements, whose output holds whenever the
    inputs disagree.
    """
    ins = tuple(inputs)
    if kind in _AND_KINDS:
        return int(all(ins))
    if kind in _OR_KINDS:
        return int(any(ins))
    if kind is GateKind.NOT:
        return 1 - ins[0]
    first = ins[0]
    return first if all(v == first for v in ins) else state


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    inputs: tuple[int, ...]
    output: int
    reset: int


@dataclass(frozen=True)
class DualRailPort:
    """A named dual-rail bit at the circuit boundary."""

    name: str
    rail1: int
    rail0: int
    direction: str  # "in" | "out"


@dataclass(frozen=True)
class Net:
    """Derived per-net view: who drives it and who listens."""

    id: int
    source: str  # "gate" | "input" | "const"
    driver_gate: int | None
    const_level: int | None
    fanout: tuple[tuple[int, int], ...]  # (gate id, input slot)

    @property
    def isochronic(self) -> bool:
        """True when the net forks, i.e. its branches must be delay-matched."""
        return len(self.fanout) >= 2


class DiagnosticCode(Enum):
    UNCONNECTED_INPUT = "UNCONNECTED_INPUT"
    MULTIPLE_DRIVERS = "MULTIPLE_DRIVERS"
    ARITY_MISMATCH = "ARITY_MISMATCH"
    COMBINATIONAL_LOOP = "COMBINATIONAL_LOOP"


@dataclass(frozen=True)
class Diagnostic:
    code: DiagnosticCode
    message: str
    subjects: tuple[int, ...] = ()

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{self.code.value}: {self.message}"


class ParseError(ValueError):
    """Raised when netlist JSON is malformed; names the offending field."""

    code = "PARSE_ERROR"

    def __init__(self, message: str, path: str = "", line: int | None = None):
        where = f" at {path}" if path else ""
        where += f" (line {line})" if line is not None else ""
        super().__init__(message + where)
        self.path = path
        self.line = line


class InvalidNetlistError(ValueError):
    """Raised when an operation requires a netlist that failed validation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class Netlist:
    """Immutable gate-level circuit.

    Instances are built through :class:`NetlistBuilder`, :func:`deserialize`
    or :func:`dualize`; all indexes (drivers, fanout) are derived once here
    and never change afterwards.
    """

    def __init__(
        self,
        protocol: Protocol,
        gates: Iterable[Gate],
        input_ports: Iterable[DualRailPort] = (),
        output_ports: Iterable[DualRailPort] = (),
        ack_out: int | None = None,
        ack_in: int | None = None,
        const_nets: Iterable[tuple[int, int]] = (),
        phase_net: int | None = None,
        extra_inputs: Iterable[int] = (),
        meta: Mapping | None = None,
    ):
        self.protocol = protocol
        self.gates = tuple(gates)
        self.input_ports = tuple(input_ports)
        self.output_ports = tuple(output_ports)
        self.ack_out = ack_out
        self.ack_in = ack_in
        self.const_nets = tuple((int(n), int(v)) for n, v in const_nets)
        self.phase_net = phase_net
        self.extra_inputs = tuple(extra_inputs)
        self.meta = dict(meta or {})
        self._index()

    # -- derived indexes ---------------------------------------------------

    def _index(self) -> None:
        inputs = {p.rail1 for p in self.input_ports}
        inputs |= {p.rail0 for p in self.input_ports}
        inputs |= set(self.extra_inputs)
        if self.ack_in is not None:
            inputs.add(self.ack_in)
        if self.phase_net is not None:
            inputs.add(self.phase_net)
        self.primary_inputs = frozenset(inputs)

        top = -1
        fanout: dict[int, list[tuple[int, int]]] = {}
        sources: dict[int, list[tuple]] = {}
        for n in inputs:
            sources.setdefault(n, []).append(("input",))
            top = max(top, n)
        for n, lvl in self.const_nets:
            sources.setdefault(n, []).append(("const", lvl))
            top = max(top, n)
        for g in self.gates:
            sources.setdefault(g.output, []).append(("gate", g.id))
            top = max(top, g.output)
            for slot, n in enumerate(g.inputs):
                fanout.setdefault(n, []).append((g.id, slot))
                top = max(top, n)
        for p in self.ports:
            top = max(top, p.rail1, p.rail0)
        self.net_count = top + 1
        self._sources = sources
        self._fanout = fanout
        self.gate_by_id = {g.id: g for g in self.gates}

    @property
    def ports(self) -> tuple[DualRailPort, ...]:
        return self.input_ports + self.output_ports

    def net(self, net_id: int) -> Net:
        src = self._sources.get(net_id, [])
        kind, driver, level = "none", None, None
        if len(src) == 1:
            entry = src[0]
            kind = entry[0]
            if kind == "gate":
                driver = entry[1]
            elif kind == "const":
                level = entry[1]
        fan = tuple(self._fanout.get(net_id, ()))
        return Net(net_id, kind, driver, level, fan)

    def gate_census(self) -> dict[GateKind, int]:
        census: dict[GateKind, int] = {}
        for g in self.gates:
            census[g.kind] = census.get(g.kind, 0) + 1
        return census

    def reset_levels(self) -> list[int]:
        """Net levels of the quiescent spacer state the circuit resets into."""
        spacer = self.protocol.spacer_level
        levels = [spacer] * self.net_count
        for n, lvl in self.const_nets:
            levels[n] = lvl
        for g in self.gates:
            levels[g.output] = g.reset
        if self.ack_in is not None:
            if self.ack_out is not None:
                levels[self.ack_in] = 1 - levels[self.ack_out]
            else:
                levels[self.ack_in] = 1 - spacer
        return levels

    def validate(self) -> list[Diagnostic]:
        return validate(self)

    def require_valid(self) -> None:
        diags = self.validate()
        if diags:
            raise InvalidNetlistError(diags)

    def __eq__(self, other: object) -> bool:
        """Structural equality: same circuit, free-form meta notes ignored."""
        if not isinstance(other, Netlist):
            return NotImplemented
        return (
            self.protocol == other.protocol
            and self.gates == other.gates
            and self.input_ports == other.input_ports
            and self.output_ports == other.output_ports
            and self.ack_out == other.ack_out
            and self.ack_in == other.ack_in
            and self.const_nets == other.const_nets
            and self.phase_net == other.phase_net
            and self.extra_inputs == other.extra_inputs
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return (
            f"Netlist({self.protocol.value}, {len(self.gates)} gates, "
            f"{len(self.input_ports)}+{len(self.output_ports)} ports)"
        )


# ---------------------------------------------------------------------------
# validation


def validate(netlist: Netlist) -> list[Diagnostic]:
    """Structural checks; an empty result means the simulator accepts it.

    Checks single drivership, gate arity, port connectivity and the absence
    of combinational cycles.  A cycle is legal only if it passes through a
    C-element, which is the one place feedback is allowed to hold state.
    """
    diags: list[Diagnostic] = []

    claimed: dict[int, int] = {}
    for n in netlist.primary_inputs:
        claimed[n] = claimed.get(n, 0) + 1
    for n, _ in netlist.const_nets:
        claimed[n] = claimed.get(n, 0) + 1
    for g in netlist.gates:
        claimed[g.output] = claimed.get(g.output, 0) + 1
    for n, count in sorted(claimed.items()):
        if count > 1:
            diags.append(
                Diagnostic(
                    DiagnosticCode.MULTIPLE_DRIVERS,
                    f"net {n} has {count} drivers",
                    (n,),
                )
            )

    for g in netlist.gates:
        want = ARITY[g.kind]
        if len(g.inputs) != want:
            diags.append(
                Diagnostic(
                    DiagnosticCode.ARITY_MISMATCH,
                    f"gate {g.id} ({g.kind.value}) has {len(g.inputs)} inputs, expects {want}",
                    (g.id,),
                )
            )
        for slot, n in enumerate(g.inputs):
            if n not in claimed:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.UNCONNECTED_INPUT,
                        f"gate {g.id} input {slot} reads undriven net {n}",
                        (g.id, n),
                    )
                )

    for p in netlist.ports:
        for rail_name, n in (("rail1", p.rail1), ("rail0", p.rail0)):
            if n not in claimed:
                diags.append(
                    Diagnostic(
                        DiagnosticCode.UNCONNECTED_INPUT,
                        f"port {p.name!r} {rail_name} dangles on undriven net {n}",
                        (n,),
                    )
                )

    diags.extend(_find_combinational_loop(netlist))
    return diags


def _find_combinational_loop(netlist: Netlist) -> list[Diagnostic]:
    driver_of = {g.output: g for g in netlist.gates}
    # Edges between plain Boolean gates only; C-elements break the path.
    succ: dict[int, list[int]] = {}
    for g in netlist.gates:
        if g.kind in STATEFUL:
            continue
        for n in g.inputs:
            d = driver_of.get(n)
            if d is not None and d.kind not in STATEFUL:
                succ.setdefault(d.id, []).append(g.id)

    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[int, int] = {}
    for start in sorted(succ):
        if color.get(start, WHITE) != WHITE:
            continue
        stack: list[tuple[int, int]] = [(start, 0)]
        path = [start]
        color[start] = GREY
        while stack:
            node, idx = stack[-1]
            nexts = succ.get(node, ())
            if idx < len(nexts):
                stack[-1] = (node, idx + 1)
                child = nexts[idx]
                c = color.get(child, WHITE)
                if c == GREY:
                    cycle = path[path.index(child):] + [child]
                    return [
                        Diagnostic(
                            DiagnosticCode.COMBINATIONAL_LOOP,
                            "combinational cycle without a C-element: "
                            + " -> ".join(str(x) for x in cycle),
                            tuple(cycle[:-1]),
                        )
                    ]
                if c == WHITE:
                    color[child] = GREY
                    stack.append((child, 0))
                    path.append(child)
            else:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return []


# ---------------------------------------------------------------------------
# dualization


def dualize(netlist: Netlist) -> Netlist:
    """Map a netlist onto its opposite-protocol twin.

    AND-kind gates become the OR-kind of equal arity and vice versa, every
    stored reset level and constant is complemented, and the protocol tag is
    flipped.  Ports, net ids and wiring are untouched, so the function is an
    involution: ``dualize(dualize(n)) == n``.
    """
    netlist.require_valid()
    gates = tuple(
        Gate(g.id, DUAL_KIND[g.kind], g.inputs, g.output, 1 - g.reset)
        for g in netlist.gates
    )
    meta = dict(netlist.meta)
    if "protocol" in meta:
        meta["protocol"] = netlist.protocol.flipped.value
    return Netlist(
        protocol=netlist.protocol.flipped,
        gates=gates,
        input_ports=netlist.input_ports,
        output_ports=netlist.output_ports,
        ack_out=netlist.ack_out,
        ack_in=netlist.ack_in,
        const_nets=tuple((n, 1 - v) for n, v in netlist.const_nets),
        phase_net=netlist.phase_net,
        extra_inputs=netlist.extra_inputs,
        meta=meta,
    )


# ---------------------------------------------------------------------------
# builder


@dataclass
class NetlistBuilder:
    """Mutable accumulator that yields an immutable :class:`Netlist`.

    Net ids are dense and assigned in creation order, which keeps generated
    netlists diffable across runs.  Gate reset levels are computed from the
    quiescent spacer state: Boolean gates get the value they would settle to,
    C-elements default to the spacer level (their inputs disagree at reset in
    registering positions, so the level must be chosen, and the spacer level
    is the one every handshake circuit here resets into).
    """

    protocol: Protocol
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._gates: list[Gate] = []
        self._next_net = 0
        self._reset: dict[int, int] = {}
        self._inputs: list[int] = []
        self._consts: list[tuple[int, int]] = []
        self._in_ports: list[DualRailPort] = []
        self._out_ports: list[DualRailPort] = []
        self.net_names: dict[int, str] = {}

    @property
    def gate_count(self) -> int:
        return len(self._gates)

    def _new_net(self, name: str | None = None) -> int:
        nid = self._next_net
        self._next_net += 1
        if name:
            self.net_names[nid] = name
        return nid

    def input_net(self, name: str | None = None, reset: int | None = None) -> int:
        nid = self._new_net(name)
        self._inputs.append(nid)
        self._reset[nid] = self.protocol.spacer_level if reset is None else reset
        return nid

    def const_net(self, level: int, name: str | None = None) -> int:
        nid = self._new_net(name)
        self._consts.append((nid, level))
        self._reset[nid] = level
        return nid

    def gate(
        self,
        kind: GateKind,
        inputs: Iterable[int],
        reset: int | None = None,
        name: str | None = None,
    ) -> int:
        ins = tuple(inputs)
        if len(ins) != ARITY[kind]:
            raise ValueError(f"{kind.value} expects {ARITY[kind]} inputs, got {len(ins)}")
        out = self._new_net(name)
        in_resets = [self._reset[n] for n in ins]
        if kind in STATEFUL:
            if reset is None:
                reset = self.protocol.spacer_level
            settled = eval_kind(kind, in_resets, reset)
            if settled != reset:
                raise ValueError(
                    f"gate {len(self._gates)} ({kind.value}) cannot rest at {reset} "
                    f"with input resets {in_resets}"
                )
        else:
            computed = eval_kind(kind, in_resets, 0)
            if reset is not None and reset != computed:
                raise ValueError(
                    f"{kind.value} reset {reset} contradicts input resets {in_resets}"
                )
            reset = computed
        self._reset[out] = reset
        self._gates.append(Gate(len(self._gates), kind, ins, out, reset))
        return out

    def dual_rail_input(self, name: str) -> DualRailPort:
        r1 = self.input_net(f"{name}.t")
        r0 = self.input_net(f"{name}.f")
        port = DualRailPort(name, r1, r0, "in")
        self._in_ports.append(port)
        return port

    def mark_output(self, name: str, rail1: int, rail0: int) -> DualRailPort:
        port = DualRailPort(name, rail1, rail0, "out")
        self._out_ports.append(port)
        self.net_names.setdefault(rail1, f"{name}.t")
        self.net_names.setdefault(rail0, f"{name}.f")
        return port

    def reset_of(self, net: int) -> int:
        return self._reset[net]

    def build(
        self,
        ack_out: int | None = None,
        ack_in: int | None = None,
        phase_net: int | None = None,
        extra_inputs: Iterable[int] = (),
    ) -> Netlist:
        meta = dict(self.meta)
        if self.net_names:
            meta.setdefault("net_names", {str(k): v for k, v in sorted(self.net_names.items())})
        covered = {p.rail1 for p in self._in_ports}
        covered |= {p.rail0 for p in self._in_ports}
        covered |= {ack_in, phase_net}
        extra = [n for n in self._inputs if n not in covered]
        for n in extra_inputs:
            if n not in covered and n not in extra:
                extra.append(n)
        return Netlist(
            protocol=self.protocol,
            gates=tuple(self._gates),
            input_ports=tuple(self._in_ports),
            output_ports=tuple(self._out_ports),
            ack_out=ack_out,
            ack_in=ack_in,
            const_nets=tuple(self._consts),
            phase_net=phase_net,
            extra_inputs=tuple(extra),
            meta=meta,
        )


# ---------------------------------------------------------------------------
# JSON serialization

_TOP_FIELDS = {"protocol", "gates", "ports", "ack_out", "ack_in", "meta"}
_GATE_FIELDS = {"id", "kind", "inputs", "output", "reset"}
_PORT_FIELDS = {"name", "dir", "rail1", "rail0"}

#: Keys inside ``meta`` that carry structural information the flat gate list
#: cannot express: constant rails, the constant-source phase line and any
#: primary-input nets that are not port rails.
_META_CONST = "const_nets"
_META_PHASE = "phase_net"
_META_EXTRA = "extra_inputs"


def serialize(netlist: Netlist) -> str:
    """Render a netlist as deterministic JSON (stable key order and layout)."""
    meta = dict(netlist.meta)
    if netlist.const_nets:
        meta[_META_CONST] = [[n, v] for n, v in netlist.const_nets]
    if netlist.phase_net is not None:
        meta[_META_PHASE] = netlist.phase_net
    if netlist.extra_inputs:
        meta[_META_EXTRA] = list(netlist.extra_inputs)
    doc = {
        "protocol": netlist.protocol.value,
        "gates": [
            {
                "id": g.id,
                "kind": g.kind.value,
                "inputs": list(g.inputs),
                "output": g.output,
                "reset": g.reset,
            }
            for g in netlist.gates
        ],
        "ports": [
            {"name": p.name, "dir": p.direction, "rail1": p.rail1, "rail0": p.rail0}
            for p in netlist.ports
        ],
        "ack_out": netlist.ack_out,
        "ack_in": netlist.ack_in,
        "meta": meta,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _expect(value, types, path: str):
    if not isinstance(value, types) or isinstance(value, bool):
        names = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise ParseError(f"expected {names}, got {type(value).__name__}", path)
    return value


def _expect_bit(value, path: str) -> int:
    v = _expect(value, int, path)
    if v not in (0, 1):
        raise ParseError(f"expected 0 or 1, got {v}", path)
    return v


def deserialize(text: str) -> Netlist:
    """Parse netlist JSON produced by :func:`serialize`.

    Strict by design: unknown fields anywhere outside ``meta`` are rejected
    and the error names the first offending field, so generated files cannot
    silently drift from the schema.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc

    _expect(doc, dict, "$")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise ParseError(f"unknown field {sorted(unknown)[0]!r}", "$")
    for key in _TOP_FIELDS:
        if key not in doc:
            raise ParseError(f"missing field {key!r}", "$")

    proto_raw = _expect(doc["protocol"], str, "protocol")
    try:
        protocol = Protocol(proto_raw)
    except ValueError:
        raise ParseError(f"unknown protocol {proto_raw!r}", "protocol") from None

    gates: list[Gate] = []
    for i, raw in enumerate(_expect(doc["gates"], list, "gates")):
        path = f"gates[{i}]"
        _expect(raw, dict, path)
        unknown = set(raw) - _GATE_FIELDS
        if unknown:
            raise ParseError(f"unknown field {sorted(unknown)[0]!r}", path)
        for key in _GATE_FIELDS:
            if key not in raw:
                raise ParseError(f"missing field {key!r}", path)
        kind_raw = _expect(raw["kind"], str, f"{path}.kind")
        try:
            kind = GateKind(kind_raw)
        except ValueError:
            raise ParseError(f"unknown gate kind {kind_raw!r}", f"{path}.kind") from None
        inputs = tuple(
            _expect(n, int, f"{path}.inputs[{j}]")
            for j, n in enumerate(_expect(raw["inputs"], list, f"{path}.inputs"))
        )
        gates.append(
            Gate(
                id=_expect(raw["id"], int, f"{path}.id"),
                kind=kind,
                inputs=inputs,
                output=_expect(raw["output"], int, f"{path}.output"),
                reset=_expect_bit(raw["reset"], f"{path}.reset"),
            )
        )

    in_ports: list[DualRailPort] = []
    out_ports: list[DualRailPort] = []
    for i, raw in enumerate(_expect(doc["ports"], list, "ports")):
        path = f"ports[{i}]"
        _expect(raw, dict, path)
        unknown = set(raw) - _PORT_FIELDS
        if unknown:
            raise ParseError(f"unknown field {sorted(unknown)[0]!r}", path)
        for key in _PORT_FIELDS:
            if key not in raw:
                raise ParseError(f"missing field {key!r}", path)
        direction = _expect(raw["dir"], str, f"{path}.dir")
        if direction not in ("in", "out"):
            raise ParseError(f"dir must be 'in' or 'out', got {direction!r}", f"{path}.dir")
        port = DualRailPort(
            name=_expect(raw["name"], str, f"{path}.name"),
            rail1=_expect(raw["rail1"], int, f"{path}.rail1"),
            rail0=_expect(raw["rail0"], int, f"{path}.rail0"),
            direction=direction,
        )
        (in_ports if direction == "in" else out_ports).append(port)

    ack_out = doc["ack_out"]
    if ack_out is not None:
        ack_out = _expect(ack_out, int, "ack_out")
    ack_in = doc["ack_in"]
    if ack_in is not None:
        ack_in = _expect(ack_in, int, "ack_in")

    meta = dict(_expect(doc["meta"], dict, "meta"))
    const_nets = tuple(
        (
            _expect(pair[0], int, f"meta.{_META_CONST}[{i}][0]"),
            _expect_bit(pair[1], f"meta.{_META_CONST}[{i}][1]"),
        )
        for i, pair in enumerate(meta.pop(_META_CONST, []))
    )
    phase_net = meta.pop(_META_PHASE, None)
    if phase_net is not None:
        phase_net = _expect(phase_net, int, f"meta.{_META_PHASE}")
    extra_inputs = tuple(
        _expect(n, int, f"meta.{_META_EXTRA}[{i}]")
        for i, n in enumerate(meta.pop(_META_EXTRA, []))
    )

    return Netlist(
        protocol=protocol,
        gates=gates,
        input_ports=in_ports,
        output_ports=out_ports,
        ack_out=ack_out,
        ack_in=ack_in,
        const_nets=const_nets,
        phase_net=phase_net,
        extra_inputs=extra_inputs,
        meta=meta,
    )
