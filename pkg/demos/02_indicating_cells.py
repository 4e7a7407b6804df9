"""Strong versus weak indication in full adder cells.

A strongly indicating cell produces no output until every input has
arrived.  A weakly indicating cell may publish all but one output early;
only the last output waits for the last input.  The weak adder here fires
its carry as soon as the two operand bits agree, without waiting for the
incoming carry, which is what makes ripple-carry chains fast.  Run with:

    python3 demos/02_indicating_cells.py
"""

from qdimul import (
    FullAdderKind,
    check_strong_indication,
    check_weak_indication,
    decode,
    encode,
    make_full_adder,
    reset,
)


def staggered_carry_arrival(kind):
    """Apply a and b, hold cin back, and see whether cout appears."""
    cell = make_full_adder(kind)
    nl = cell.netlist
    st = reset(nl)
    ports = {p.name: p for p in nl.ports}
    protocol = nl.protocol
    for name, bit in (("a", 1), ("b", 1)):
        r1, r0 = encode(bit, protocol)
        st.set_primary(ports[name].rail1, r1)
        st.set_primary(ports[name].rail0, r0)
    st.run_until_quiescent()
    readings = {}
    for out in ("sum", "cout"):
        port = ports[out]
        readings[out] = decode(st.levels[port.rail1], st.levels[port.rail0], protocol)
    return readings


def main():
    print("a=1, b=1 applied, cin withheld:")
    for kind in (FullAdderKind.DIMS_STRONG, FullAdderKind.WEAK_DISJOINT):
        r = staggered_carry_arrival(kind)
        print(f"  {kind.value:5s}: sum={r['sum'].name:6s} cout={r['cout'].name}")
    print()
    print("the strong adder shows nothing until cin arrives; the weak adder")
    print("already knows the carry is 1 because both operand bits are 1.")
    print()

    for kind in FullAdderKind:
        nl = make_full_adder(kind).netlist
        strong = check_strong_indication(nl)
        weak = check_weak_indication(nl)
        print(f"{kind.value:16s} strong_indication={strong.passed!s:5s} "
              f"weak_indication={weak.passed}")
    print()
    print("every kind is at least weakly indicating; only the minterm-complete")
    print("adder is strongly indicating.")


if __name__ == "__main__":
    main()
