"""Gate-level workbench for dual-rail handshake multipliers.

Generate indicating array multipliers in either return-to-zero or
return-to-one signalling, simulate them with arbitrary per-gate delays
under full four-phase handshaking, verify function, indication and
delay-robustness, and measure latency, area and switching cost.
"""

__version__ = "0.1.0"

from .netlist import (
    DualRailPort,
    DualRailValue,
    Gate,
    GateKind,
    InvalidNetlistError,
    Netlist,
    NetlistBuilder,
    ParseError,
    Protocol,
    decode,
    deserialize,
    dualize,
    encode,
    serialize,
    validate,
)
from .sim import (
    DelayModel,
    NonQuiescentError,
    SimState,
    replay,
    reset,
    write_trace_csv,
    write_trace_vcd,
)
from .cells import (
    FullAdderKind,
    make_and2_strong,
    make_completion_detector,
    make_constant_source,
    make_full_adder,
    make_register_bank,
)
from .multiplier import (
    CriticalPath,
    MultiplierSpec,
    StructureStats,
    critical_path,
    generate,
    structure_stats,
)
from .harness import (
    BurstResult,
    CycleReport,
    Harness,
    IllegalOutputError,
    LatencySummary,
    StuckPhaseError,
    cycle_reports_json,
    measure_latencies,
    scan_port_changes,
    write_cycle_reports_csv,
)
from .verify import (
    CheckOutcome,
    Counterexample,
    check_delay_insensitivity,
    check_duality,
    check_functional,
    check_monotonicity,
    check_race_immunity,
    check_stage_indication,
    check_strong_indication,
    check_weak_indication,
    default_pairs,
    inject_fork_skew,
    narrow_completion,
    run_all_checks,
    swap_port_rails,
)
from .metrics import (
    AreaTable,
    StageMetrics,
    area,
    compare,
    design_label,
    measure,
    normalize_pctp,
    power_proxy,
    render_rows,
    rows_to_json,
)

__all__ = [
    "__version__",
    "AreaTable",
    "BurstResult",
    "CheckOutcome",
    "Counterexample",
    "CriticalPath",
    "CycleReport",
    "DelayModel",
    "DualRailPort",
    "DualRailValue",
    "FullAdderKind",
    "Gate",
    "GateKind",
    "Harness",
    "IllegalOutputError",
    "InvalidNetlistError",
    "LatencySummary",
    "MultiplierSpec",
    "Netlist",
    "NetlistBuilder",
    "NonQuiescentError",
    "ParseError",
    "Protocol",
    "SimState",
    "StageMetrics",
    "StructureStats",
    "StuckPhaseError",
    "area",
    "check_delay_insensitivity",
    "check_duality",
    "check_functional",
    "check_monotonicity",
    "check_race_immunity",
    "check_stage_indication",
    "check_strong_indication",
    "check_weak_indication",
    "compare",
    "critical_path",
    "cycle_reports_json",
    "decode",
    "default_pairs",
    "deserialize",
    "design_label",
    "dualize",
    "encode",
    "generate",
    "inject_fork_skew",
    "make_and2_strong",
    "make_completion_detector",
    "make_constant_source",
    "make_full_adder",
    "make_register_bank",
    "measure",
    "measure_latencies",
    "narrow_completion",
    "normalize_pctp",
    "power_proxy",
    "render_rows",
    "replay",
    "reset",
    "rows_to_json",
    "run_all_checks",
    "scan_port_changes",
    "serialize",
    "structure_stats",
    "swap_port_rails",
    "validate",
    "write_cycle_reports_csv",
    "write_trace_csv",
    "write_trace_vcd",
]
