"""Verification harness and the named invariant suites.

A :class:`Report` is plain data: per-check pass/fail, the first failing
step (if a step trace was expected) and a text or JSON rendering.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

from afmqc.chain import ChainConfig, format_config, parse_config
from afmqc.programs.core import PulseProgram, pi_program
from afmqc.programs.library import (
    cnot,
    cnot_cases,
    conditional_alteration,
    encode_one,
    encode_one_at_edge,
    encode_zero_at_edge,
    one_qubit_gate,
    swap_shift,
    swap_pulses,
)
from afmqc.programs.register import (
    BlockRole,
    DestroyedQubit,
    RegisterLayout,
    decode_register,
    encode_register,
    read_window,
)
from afmqc.state import OneCellUnitary, SparseQuantumState

NORM_TOL = 1e-10


@dataclass
class Expectation:
    """What a run should produce. Unset fields are not checked."""

    final_configs: Optional[set] = None
    probabilities: Optional[Dict[ChainConfig, float]] = None
    prob_tol: float = 1e-10
    steps: Optional[Dict[int, set]] = None
    pulse_count: Optional[int] = None
    layout: Optional[RegisterLayout] = None
    bits: Optional[Sequence] = None  # per-term expected bits, as a set of tuples
    cu_restored: bool = False


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    failed_step: Optional[int] = None
    trace: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def text(self) -> str:
        lines = []
        for c in self.checks:
            tail = f"  ({c.detail})" if c.detail else ""
            lines.append(f"{'PASS' if c.passed else 'FAIL'} {self.name}: {c.name}{tail}")
        if self.failed_step is not None:
            lines.append(f"     first failing step: {self.failed_step}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failed_step": self.failed_step,
            "checks": [vars(c) for c in self.checks],
            "trace": self.trace,
        }


def verify_program(
    program: PulseProgram,
    start: SparseQuantumState,
    expect: Expectation,
    name: Optional[str] = None,
) -> Report:
    report = Report(name or program.name)
    trace = [(0, "start", sorted(format_config(c) for c in start.configs()))]
    first_bad = None
    state = start
    norm_ok = True
    for k, pulse in enumerate(program.pulses, 1):
        state = pulse.apply(state)
        trace.append((k, str(pulse), sorted(format_config(c) for c in state.configs())))
        if abs(state.norm() - 1) > NORM_TOL:
            norm_ok = False
            first_bad = first_bad or k
        if expect.steps and k in expect.steps and state.configs() != set(expect.steps[k]):
            first_bad = first_bad or k
    report.trace = trace
    report.add("norm preserved", norm_ok, f"final norm {state.norm():.15f}")
    if expect.steps:
        bad = [k for k in sorted(expect.steps) if set(trace[k][2]) != {format_config(c) for c in expect.steps[k]}]
        report.add("step trace", not bad, f"mismatch at step {bad[0]}" if bad else f"{len(expect.steps)} steps")
    if expect.pulse_count is not None:
        report.add("pulse count", len(program) == expect.pulse_count, f"{len(program)} pulses, expected {expect.pulse_count}")
    if expect.final_configs is not None:
        ok = state.configs() == set(expect.final_configs)
        report.add("final configurations", ok, ", ".join(trace[-1][2][:4]))
        if not ok:
            first_bad = first_bad or len(program)
    if expect.probabilities is not None:
        probs = state.probabilities()
        keys = set(probs) | set(expect.probabilities)
        worst = max(abs(probs.get(c, 0.0) - expect.probabilities.get(c, 0.0)) for c in keys)
        report.add("probabilities", worst <= expect.prob_tol, f"max deviation {worst:.3g}")
        if worst > expect.prob_tol:
            first_bad = first_bad or len(program)
    if expect.layout is not None:
        readings = []
        try:
            readings = [decode_register(c, expect.layout) for c in state.configs()]
            report.add("registers decode", True, f"{len(readings)} terms")
        except (DestroyedQubit, ValueError) as exc:
            report.add("registers decode", False, str(exc))
            first_bad = first_bad or len(program)
        if readings and expect.bits is not None:
            got = {r.bits for r in readings}
            want = {tuple(b) for b in expect.bits}
            report.add("decoded bits", got == want, f"got {sorted(got)}, expected {sorted(want)}")
        if readings and expect.cu_restored:
            ok = all(r.cu is not None and r.cu.role is BlockRole.CONTROL_UNIT for r in readings)
            report.add("CU restored", ok)
    report.failed_step = first_bad
    return report


# -- suites ------------------------------------------------------------------

def _basis(config: ChainConfig) -> SparseQuantumState:
    return SparseQuantumState.from_basis(config)


def suite_encode() -> list[Report]:
    g8 = ChainConfig.ground(8)
    reports = [
        verify_program(
            encode_zero_at_edge(),
            _basis(g8),
            Expectation(
                final_configs={parse_config("duududud")},
                steps={1: {parse_config("ddududud")}, 2: {parse_config("duududud")}},
                pulse_count=2,
            ),
        ),
        verify_program(
            encode_one_at_edge(),
            _basis(parse_config("duududud")),
            Expectation(final_configs={parse_config("udduudud")}, pulse_count=3),
        ),
        verify_program(
            encode_one(),
            _basis(g8),
            Expectation(final_configs={parse_config("udduudud")}),
            name="encode1_full",
        ),
        # on an odd chain the right end is an A-site of class (A,-1/2) too
        verify_program(
            encode_zero_at_edge(),
            _basis(ChainConfig.ground(5)),
            Expectation(final_configs={parse_config("duuud")}),
            name="encode0_n5",
        ),
        verify_program(
            encode_zero_at_edge(),
            _basis(ChainConfig.ground(6)),
            Expectation(final_configs={parse_config("duudud")}),
            name="encode0_n6",
        ),
    ]
    return reports


def suite_shift(pairs_max: int = 4) -> list[Report]:
    """Blocks keep their form under SWAP pairs.

    A "1" shifts off the chain edge; a "0" needs one ground cell pair to
    its left because its excited end site never answers a SWAP pulse.
    """
    reports = []
    for bit, offset in ((1, 0), (0, 2), (1, 2)):
        n = offset + 4 * pairs_max + 8
        start = encode_register([bit], RegisterLayout(1, cu_present=False, offset=offset, n=n))
        for pairs in range(pairs_max + 1):
            moved = RegisterLayout(1, cu_present=False, offset=offset + 2 * pairs, n=n)
            reports.append(
                verify_program(
                    swap_shift(pairs),
                    _basis(start),
                    Expectation(final_configs={encode_register([bit], moved)}, pulse_count=2 * pairs),
                    name=f"shift bit={bit} offset={offset} pairs={pairs}",
                )
            )
    return reports


def _passage_stage(layout: RegisterLayout) -> int:
    """First even SWAP count after which the CU sits clear left of every qubit."""
    t = 0
    while layout.cu_start(t) + layout.cu_cells > layout.qubit_start(0, t):
        t += 1
    return t + t % 2


def passage_layout(bits: Sequence[int], offset: int = 8) -> tuple[RegisterLayout, int]:
    """Layout with room for the CU to cross every qubit, and the SWAP count to do it."""
    probe = RegisterLayout(len(bits), offset=offset)
    t = _passage_stage(probe)
    return RegisterLayout(len(bits), offset=offset, n=probe.min_length + t + t % 2 + 2), t


def suite_cu() -> list[Report]:
    reports = []
    # transparency: CU crosses every qubit and comes out unchanged
    for bits in ([0], [1], [1, 0, 1], [0, 1, 1, 0]):
        layout, t = passage_layout(bits, offset=4 * len(bits) + 8)
        start = encode_register(bits, layout)
        end = pi_program("pass", swap_pulses(t)).run_classical(start)
        rep = Report(f"cu transparency {''.join(map(str, bits))}")
        try:
            reading = decode_register(end, layout, shift=t)
            rep.add("qubits preserved", list(reading.bits) == bits, str(reading.bits))
            rep.add("CU unchanged", reading.cu.role is BlockRole.CONTROL_UNIT, reading.cu.role.value)
        except (DestroyedQubit, ValueError) as exc:
            rep.add("register decodes", False, str(exc))
        reports.append(rep)
    reports.append(check_conditional_alteration())
    return reports


def check_conditional_alteration() -> Report:
    """CU altered by the stimulus at a "0", then carried unchanged past a "1"."""
    rep = Report("cu alteration")
    layout, total = passage_layout([1, 0])
    start = encode_register([1, 0], layout)
    stage = layout.mid_stage(0) + 1
    after = conditional_alteration(layout, stage).run_classical(start)
    cu_now = read_window(after, layout.cu_start(stage), layout.cu_cells)
    rep.add("CU altered at the stimulus", cu_now == "XXXXXX", cu_now)
    end = conditional_alteration(layout, total).run_classical(start)
    try:
        reading = decode_register(end, layout, shift=total)
        rep.add("CU altered after passing the 1", reading.cu.role is BlockRole.CONTROL_UNIT_ALTERED, reading.cu.role.value)
        rep.add("the 0 is destroyed", reading.qubits[1].value is None, reading.qubits[1].role.value)
        rep.add("the 1 survives", reading.qubits[0].value == 1, reading.qubits[0].role.value)
    except (DestroyedQubit, ValueError) as exc:
        rep.add("register decodes", False, str(exc))
    # control case: the same stimulus does nothing while passing a "1"
    start1 = encode_register([1, 1], layout)
    mid = pi_program("m", swap_pulses(stage)).run_classical(start1)
    stim = conditional_alteration(layout, stage).run_classical(start1)
    rep.add("stimulus inert at a 1", mid == stim)
    return rep


def suite_gate1() -> list[Report]:
    reports = []
    h = OneCellUnitary.from_column(2 ** -0.5, 2 ** -0.5)
    cases = [
        ("identity", OneCellUnitary.identity(), lambda b: [{b}]),
        ("flip", OneCellUnitary.from_column(0, 1), lambda b: [{1 - b}]),
        ("hadamard", h, lambda b: [{0, 1}]),
    ]
    for label, u, outcome in cases:
        for bits in ([0], [1], [1, 0], [0, 1], [1, 0, 1]):
            layout = RegisterLayout(len(bits), offset=4)
            program = one_qubit_gate(u, layout)
            values = outcome(bits[-1])[0]
            want_bits = [tuple(bits[:-1]) + (v,) for v in sorted(values)]
            probs = None
            if label == "hadamard":
                probs = {encode_register(list(b), layout): 0.5 for b in want_bits}
            reports.append(
                verify_program(
                    program,
                    _basis(encode_register(bits, layout)),
                    Expectation(
                        pulse_count=17,
                        layout=layout,
                        bits=want_bits,
                        cu_restored=True,
                        probabilities=probs,
                    ),
                    name=f"gate1 {label} {''.join(map(str, bits))}",
                )
            )
    return reports


def suite_cnot() -> list[Report]:
    reports = []
    for layout, bits, want in cnot_cases():
        program = cnot(layout)
        reports.append(
            verify_program(
                program,
                _basis(encode_register(bits, layout)),
                Expectation(
                    final_configs={encode_register(want, layout)},
                    layout=layout,
                    bits=[want],
                    cu_restored=True,
                ),
                name=f"cnot {''.join(map(str, bits))} n={layout.length}",
            )
        )
    return reports


def suite_props(seed: int = 0, cases: int = 50) -> list[Report]:
    """Seeded random checks: pi involution and program reversibility."""
    from afmqc.chain import all_classes, apply_pi
    from afmqc.programs.core import reverse_program

    rng = random.Random(seed)
    classes = all_classes()
    rep = Report(f"random properties seed={seed}")
    involution = reversible = True
    for _ in range(cases):
        n = rng.randint(4, 32)
        config = ChainConfig(n, rng.getrandbits(n))
        cls = rng.choice(classes)
        involution &= apply_pi(apply_pi(config, cls), cls) == config
        program = pi_program("r", [rng.choice(classes) for _ in range(rng.randint(0, 20))])
        both = PulseProgram("rr", program.pulses + reverse_program(program).pulses)
        reversible &= both.run_classical(config) == config
    rep.add("pi involution", involution, f"{cases} cases")
    rep.add("program + reverse is identity", reversible, f"{cases} cases")
    return [rep]


SUITES: Dict[str, Callable[[], list]] = {
    "encode": suite_encode,
    "shift": suite_shift,
    "cu": suite_cu,
    "gate1": suite_gate1,
    "cnot": suite_cnot,
    "props": suite_props,
}


def run_suite(name: str, seed: int = 0) -> list[Report]:
    if name == "all":
        return [r for key in SUITES for r in run_suite(key, seed)]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    if name == "props":
        return suite_props(seed)
    return SUITES[name]()


def reports_json(reports: Sequence[Report]) -> str:
    return json.dumps([r.as_dict() for r in reports], indent=2)
