"""Event engine: delay models, ordering, determinism, replay, trace export."""

import io

import pytest
from hypothesis import given, strategies as st

from qdimul.netlist import GateKind, NetlistBuilder, Protocol
from qdimul.sim import (
    DelayModel,
    NonQuiescentError,
    NotPrimaryError,
    replay,
    reset,
    write_trace_csv,
    write_trace_vcd,
)


def chain_netlist(length=3, kind=GateKind.OR2):
    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_net("x")
    net = x
    for _ in range(length):
        net = b.gate(kind, (net, net))
    b.mark_output("y", net, x)
    return b.build(), x, net


def c2_netlist():
    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_net("x")
    y = b.input_net("y")
    z = b.gate(GateKind.C2, (x, y))
    b.mark_output("z", z, x)
    return b.build(), x, y, z


# -- delay models ---------------------------------------------------------


def test_unit_delay_is_one_for_everything():
    dm = DelayModel.unit()
    assert dm.delay_of(0, GateKind.C2) == 1
    assert dm.delay_of(999, GateKind.OR4) == 1


def test_fixed_table_lookup_and_missing_kind():
    dm = DelayModel.fixed_table({GateKind.OR2: 3, GateKind.C2: 7})
    assert dm.delay_of(0, GateKind.OR2) == 3
    assert dm.delay_of(1, GateKind.C2) == 7
    with pytest.raises(ValueError):
        dm.delay_of(2, GateKind.C3)


def test_fixed_table_rejects_nonpositive_delay():
    with pytest.raises(ValueError):
        DelayModel.fixed_table({GateKind.OR2: 0})


def test_random_model_rejects_bad_bounds():
    with pytest.raises(ValueError):
        DelayModel.random_per_gate(0, 5)
    with pytest.raises(ValueError):
        DelayModel.random_per_gate(9, 5)


@given(st.integers(0, 2**31), st.integers(0, 500))
def test_random_delay_is_a_pure_function_of_seed_and_gate(seed, gate_id):
    dm = DelayModel.random_per_gate(1, 20, seed)
    d = dm.delay_of(gate_id, GateKind.C2)
    assert 1 <= d <= 20
    assert d == DelayModel.random_per_gate(1, 20, seed).delay_of(gate_id, GateKind.C2)


def test_random_delay_varies_across_gates():
    dm = DelayModel.random_per_gate(1, 20, seed=0)
    delays = {dm.delay_of(g, GateKind.C2) for g in range(64)}
    assert len(delays) > 1


# -- propagation ----------------------------------------------------------


def test_transport_delay_accumulates_along_a_chain():
    nl, x, out = chain_netlist(length=4)
    st_ = reset(nl, DelayModel.fixed_table({GateKind.OR2: 5}))
    st_.set_primary(x, 1)
    elapsed = st_.run_until_quiescent()
    assert elapsed == 20
    assert st_.levels[out] == 1


def test_c_element_waits_for_agreement_then_holds():
    nl, x, y, z = c2_netlist()
    st_ = reset(nl)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    assert st_.levels[z] == 0
    st_.set_primary(y, 1)
    st_.run_until_quiescent()
    assert st_.levels[z] == 1
    st_.set_primary(x, 0)
    st_.run_until_quiescent()
    assert st_.levels[z] == 1  # holds until both agree low
    st_.set_primary(y, 0)
    st_.run_until_quiescent()
    assert st_.levels[z] == 0


def test_set_primary_rejects_internal_nets():
    nl, x, out = chain_netlist()
    st_ = reset(nl)
    with pytest.raises(NotPrimaryError):
        st_.set_primary(out, 1)


def test_set_primary_same_level_is_a_no_op():
    nl, x, _ = chain_netlist()
    st_ = reset(nl)
    st_.set_primary(x, 0)
    assert st_.quiescent
    assert st_.run_until_quiescent() == 0
    assert st_.trace == []


def test_set_primary_rejects_bad_level_and_past_time():
    nl, x, _ = chain_netlist()
    st_ = reset(nl)
    with pytest.raises(ValueError):
        st_.set_primary(x, 2)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    with pytest.raises(ValueError):
        st_.set_primary(x, 0, at_time=0)


def test_guard_trips_on_slow_circuit():
    nl, x, _ = chain_netlist(length=6)
    st_ = reset(nl, DelayModel.fixed_table({GateKind.OR2: 10}))
    st_.set_primary(x, 1)
    with pytest.raises(NonQuiescentError):
        st_.run_until_quiescent(max_time=15)


def test_trace_events_are_time_ordered_and_cause_tagged():
    nl, x, out = chain_netlist(length=3)
    st_ = reset(nl)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    times = [e[0] for e in st_.trace]
    assert times == sorted(times)
    assert st_.trace[0][3] == -1  # environment event
    assert all(e[3] >= 0 for e in st_.trace[1:])


def test_identical_runs_produce_identical_traces():
    def run():
        nl, x, _ = chain_netlist(length=5)
        st_ = reset(nl, DelayModel.random_per_gate(1, 9, seed=3))
        st_.set_primary(x, 1)
        st_.run_until_quiescent()
        st_.set_primary(x, 0)
        st_.run_until_quiescent()
        return st_.trace

    assert run() == run()


def test_stop_net_returns_early():
    nl, x, out = chain_netlist(length=5)
    st_ = reset(nl)
    st_.set_primary(x, 1)
    mid = nl.gates[1].output
    st_.run_until_quiescent(stop_net=mid, stop_level=1)
    assert st_.levels[mid] == 1
    assert not st_.quiescent
    st_.run_until_quiescent()
    assert st_.levels[out] == 1


def test_take_trace_drains():
    nl, x, _ = chain_netlist()
    st_ = reset(nl)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    events = st_.take_trace()
    assert events and st_.trace == []


def test_replay_reaches_the_same_final_levels():
    nl, x, _ = chain_netlist(length=4)
    st_ = reset(nl, DelayModel.random_per_gate(1, 7, seed=11))
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    assert replay(nl, st_.trace) == st_.levels


def test_read_port_by_name():
    nl, x, out = chain_netlist()
    st_ = reset(nl)
    assert st_.read_port("y").name == "SPACER"
    with pytest.raises(KeyError):
        st_.read_port("nope")


def test_reset_requires_quiescent_reset_state():
    b = NetlistBuilder(Protocol.RTZ)
    x = b.input_net("x")
    g = b.gate(GateKind.OR2, (x, x))
    nl = b.build()
    # forge a contradictory reset level on the gate
    from qdimul.netlist import Gate, Netlist

    bad_gate = Gate(0, GateKind.OR2, nl.gates[0].inputs, nl.gates[0].output, 1)
    bad = Netlist(Protocol.RTZ, [bad_gate], extra_inputs=[x])
    with pytest.raises(ValueError, match="quiescent"):
        reset(bad)


# -- export -----------------------------------------------------------------


def test_csv_export_shape():
    nl, x, _ = chain_netlist(length=2)
    st_ = reset(nl)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    buf = io.StringIO()
    write_trace_csv(st_.trace, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "time,net,level,cause"
    assert lines[1].endswith(",env")
    assert len(lines) == 1 + len(st_.trace)


def test_vcd_export_contains_declarations_and_changes():
    nl, x, _ = chain_netlist(length=2)
    st_ = reset(nl)
    st_.set_primary(x, 1)
    st_.run_until_quiescent()
    buf = io.StringIO()
    write_trace_vcd(nl, st_.trace, buf)
    text = buf.getvalue()
    assert "$enddefinitions" in text
    assert "$dumpvars" in text
    assert "#0" in text
    assert f"1n{x}" in text
