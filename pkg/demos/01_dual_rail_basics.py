"""Dual-rail codewords and a first simulated cell.

A dual-rail bit travels on two wires.  In the return-to-zero (RTZ)
protocol the pair (1, 0) means logic 1, (0, 1) means logic 0, and (0, 0)
is the spacer that separates successive data items.  The return-to-one
(RTO) protocol is the same story with every wire inverted.  Run with:

    python3 demos/01_dual_rail_basics.py
"""

from qdimul import (
    DualRailValue,
    Protocol,
    decode,
    dualize,
    encode,
    make_and2_strong,
    reset,
)


def show_codewords():
    print("codeword tables")
    for protocol in Protocol:
        print(f"  {protocol.value}:")
        for rails in ((0, 0), (0, 1), (1, 0), (1, 1)):
            value = decode(rails[0], rails[1], protocol)
            print(f"    rails {rails} -> {value.name}")
    print()


def drive_and_cell(protocol, a, b):
    """Apply one data wave to the AND cell and read the decoded output."""
    cell = make_and2_strong(protocol)
    nl = cell.netlist
    st = reset(nl)
    ports = {p.name: p for p in nl.ports}
    for name, bit in (("a", a), ("b", b)):
        r1, r0 = encode(bit, protocol)
        st.set_primary(ports[name].rail1, r1)
        st.set_primary(ports[name].rail0, r0)
    elapsed = st.run_until_quiescent()
    z = ports["z"]
    value = decode(st.levels[z.rail1], st.levels[z.rail0], protocol)
    return value, elapsed


def main():
    show_codewords()

    print("AND cell truth table, both protocols")
    for a in (0, 1):
        for b in (0, 1):
            row = []
            for protocol in Protocol:
                value, elapsed = drive_and_cell(protocol, a, b)
                row.append(f"{protocol.value}: {value.name} after {elapsed} ticks")
            print(f"  a={a} b={b} -> {row[0]}, {row[1]}")
    print()

    rtz = make_and2_strong(Protocol.RTZ).netlist
    rto = make_and2_strong(Protocol.RTO).netlist
    print("the RTO cell is the exact structural dual of the RTZ cell:",
          dualize(rtz) == rto)
    print("and dualizing twice gives the original back:",
          dualize(dualize(rtz)) == rtz)


if __name__ == "__main__":
    main()
