"""Delay insensitivity, and how to break it.

A quasi-delay-insensitive stage computes the right answer no matter how
slow any individual gate is; only relative wire-fork timing is assumed.
This demo runs the same multiplier under wildly different per-gate delay
assignments, then plants a slow wire branch (a skewed fork) and shows
that a patient environment still never sees a wrong answer, while an
impatient one that races the handshake catches the stage red-handed.
Run with:

    python3 demos/04_robustness.py
"""

from qdimul import (
    DelayModel,
    Harness,
    MultiplierSpec,
    check_functional,
    check_race_immunity,
    generate,
    inject_fork_skew,
)

BURST = [(1, 0), (0, 1), (1, 0), (0, 1)]


def main():
    nl = generate(MultiplierSpec(n=4))
    print("same design, same operands, different per-gate delays:")
    for label, dm in [("unit", DelayModel.unit()),
                      ("random seed 1", DelayModel.random_per_gate(1, 20, 1)),
                      ("random seed 2", DelayModel.random_per_gate(1, 20, 2)),
                      ("random seed 3", DelayModel.random_per_gate(5, 50, 3))]:
        r = Harness(nl, dm).run_cycle(13, 11)
        print(f"  {label:14s} product={r.product} forward={r.forward:4d} "
              f"reverse={r.reverse:4d} cycle={r.cycle}")
    print("  the product never changes; only the timing does.")
    print()

    small = generate(MultiplierSpec(n=2))
    victim = next(p for p in small.output_ports if p.name == "P0")
    consumer = small.net(victim.rail1).driver_gate
    fork_net = small.gate_by_id[consumer].inputs[0]
    skewed = inject_fork_skew(small, fork_net, consumer, stages=16)
    print(f"planting a 16-stage delay on one branch of net {fork_net} "
          f"(the other branches stay fast)")
    print()

    patient = check_functional(skewed)
    print(f"patient environment (waits for quiescence): "
          f"{'still correct' if patient.passed else 'broken'}")
    racing = check_race_immunity(skewed, pairs=BURST)
    print(f"racing environment (switches phase right after each acknowledge): "
          f"{'no problem found' if racing.passed else 'FAILS'}")
    if not racing.passed:
        ce = racing.counterexample
        print(f"  observed: {ce.observed}")
        print(f"  expected: {ce.expected}")
        print(f"  the counterexample carries the last {len(ce.trace_tail)} trace "
              "events for replay")
    print()
    healthy = check_race_immunity(small, pairs=BURST)
    print(f"the unmodified design survives the same racing environment: "
          f"{healthy.passed}")


if __name__ == "__main__":
    main()
