"""Named pulse sequences: encoding, SWAP transport, gates.

Every sequence here has been checked by simulation. Where the reference
labelling fails under the physical-orientation class convention, the
program carries a :class:`Provenance` listing each changed position.
"""

from __future__ import annotations

from typing import Optional

from afmqc.chain import PulseClass
from afmqc.programs.core import (
    Deviation,
    Provenance,
    Pulse,
    PulseKind,
    PulseProgram,
    pi_program,
    reverse_program,
)
from afmqc.programs.register import RegisterLayout, encode_register
from afmqc.programs.search import repair_conjugated
from afmqc.state import OneCellUnitary


def C(target: str, m) -> PulseClass:
    return PulseClass.of(target, m)


SWAP_A = C("A", 0)
SWAP_B = C("B", 0)
STIMULUS = C("A", 1)
GATE_CLASS = C("A", 1)

# six-pulse computing update of the one-qubit gate as written, and as used
GATE_UPDATE_LITERAL = (C("A", 1), C("B", 1), C("B", 0), C("A", 1), C("B", 0))
GATE_UPDATE = (C("A", 1), C("B", -1), C("B", 0), C("A", 1), C("B", 0))

# nine-pulse CNOT extension as written (last pulse is the end inversion)
CNOT_LITERAL = (
    C("A", 1), C("B", 1), C("B", 0), C("A", 0), C("A", 1),
    C("B", 0), C("A", 0), C("B", 1), C("A", 1),
)
# the literal with the (B, 1) labels read as (B, -1), as for the gate update
CNOT_NORMALIZED = tuple(C("B", -1) if c == C("B", 1) else c for c in CNOT_LITERAL)
# minimal repair of CNOT_NORMALIZED found by repair_conjugated
CNOT_EXTENSION = (
    C("B", 0), C("B", -1), C("A", 1), C("A", 0), C("B", -1),
    C("B", 0), C("A", 0), C("B", -1), C("A", 1),
)
CNOT_REPAIR_ALPHABET = (C("A", 0), C("A", 1), C("B", -1), C("B", 0))
CNOT_SETTLE_PULSES = 2

_LABEL_REASON = (
    "(B,1) matches every ground interior B-site under the physical-orientation "
    "convention; (B,-1) is the class that addresses the CU's excited cells"
)


def _deviations(literal, used, reasons) -> tuple[Deviation, ...]:
    out = []
    for i, (a, b) in enumerate(zip(literal, used)):
        if a != b:
            out.append(Deviation(i, str(a), str(b), reasons(i, a, b)))
    return tuple(out)


def swap_pulses(count: int, phase: int = 0) -> tuple[PulseClass, ...]:
    """``count`` alternating SWAP pulses; ``phase`` 0 starts with (A, 0)."""
    return tuple((SWAP_A, SWAP_B)[(phase + k) % 2] for k in range(count))


def encode_zero_at_edge() -> PulseProgram:
    return pi_program("encode0", [C("A", "-1/2"), C("B", 0)], Provenance("reference"))


def encode_one_at_edge() -> PulseProgram:
    """Turn a "0" at sites 0-3 into a "1".

    The middle pulse addresses the end site whose neighbor is up, which is
    class (A, +1/2); the reference labelling has (A, -1/2).
    """
    literal = (C("A", 0), C("A", "-1/2"), C("B", 0))
    used = (C("A", 0), C("A", "1/2"), C("B", 0))
    prov = Provenance(
        "reference",
        tuple(map(str, literal)),
        _deviations(literal, used, lambda *_: "end site has an up neighbor, so its class is (A,1/2)"),
    )
    return pi_program("encode1", used, prov)


def encode_one() -> PulseProgram:
    """Ground chain to a "1" at the edge."""
    return (encode_zero_at_edge() + encode_one_at_edge()).renamed("encode1_full")


def swap_shift(pairs: int) -> PulseProgram:
    if pairs < 0:
        raise ValueError("pairs must be >= 0")
    return pi_program(f"shift{pairs}", swap_pulses(2 * pairs), Provenance("reference"))


def cu_stimulus() -> PulseProgram:
    """The single pulse that alters a CU sitting mid-way through a "0"."""
    return pi_program("cu_stimulus", [STIMULUS], Provenance("reconstructed"))


def fig_stimulus_stage(layout: RegisterLayout, k: int = 0) -> int:
    """SWAP count after which the stimulus is applied for the k-th qubit."""
    return layout.mid_stage(k) + 1


def conditional_alteration(layout: RegisterLayout, total_pulses: int, k: int = 0) -> PulseProgram:
    """Transport, stimulus at the k-th qubit, then transport to ``total_pulses`` SWAPs."""
    stage = fig_stimulus_stage(layout, k)
    if total_pulses < stage:
        raise ValueError("total_pulses must reach the stimulus stage")
    pulses = swap_pulses(stage) + (STIMULUS,) + swap_pulses(total_pulses - stage, stage)
    return pi_program(
        "cu_alter",
        pulses,
        Provenance(
            "reconstructed",
            notes=(f"stimulus after {stage} SWAP pulses, one past the mid-way stage",),
        ),
    )


def one_qubit_gate(
    u: OneCellUnitary,
    layout: Optional[RegisterLayout] = None,
    k: int = 0,
) -> PulseProgram:
    """Apply ``u`` to the k-th qubit counted from the CU.

    Program: SWAP pulses to the mid-way stage, the five-pulse update, the
    unitary on (A, 1), then the update and positioning pulses reversed.
    With the default layout and ``k = 0`` that is 3 + 5 + 1 + 5 + 3 = 17.
    """
    if layout is None:
        layout = RegisterLayout(1)
    position = swap_pulses(layout.mid_stage(k))
    head = pi_program("gate1_head", position + GATE_UPDATE)
    gate = Pulse(PulseKind.UNITARY, GATE_CLASS, u)
    pulses = head.pulses + (gate,) + reverse_program(head).pulses
    prov = Provenance(
        "reference+reconstructed",
        tuple(map(str, GATE_UPDATE_LITERAL)) + (f"U({GATE_CLASS})",),
        tuple(
            Deviation(len(position) + d.position, d.literal, d.used, d.reason)
            for d in _deviations(GATE_UPDATE_LITERAL, GATE_UPDATE, lambda *_: _LABEL_REASON)
        ),
        (
            f"{len(position)} SWAP pulses bring the CU mid-way through the target",
            "the update and positioning pulses are replayed in reverse after U",
        ),
    )
    return PulseProgram("gate1", pulses, prov)


def _cnot_reasons(i, a, b) -> str:
    if a == C("B", 1) and b == C("B", -1):
        return _LABEL_REASON
    return "minimal edit that satisfies the CNOT truth table in simulation"


def cnot_extension() -> PulseProgram:
    """The nine-pulse extension; its last pulse is the end inversion (A, 1)."""
    prov = Provenance(
        "reconstructed",
        tuple(map(str, CNOT_LITERAL)),
        _deviations(CNOT_LITERAL, CNOT_EXTENSION, _cnot_reasons),
        ("found by repair_conjugated over the alphabet {(A,0),(A,1),(B,-1),(B,0)}",),
    )
    return pi_program("cnot_ext", CNOT_EXTENSION, prov)


def cnot_prefix(layout: RegisterLayout) -> tuple[PulseClass, ...]:
    """Transport to the control, stimulus, settle pulses."""
    stage = layout.mid_stage(0)
    return (
        swap_pulses(stage)
        + (STIMULUS,)
        + swap_pulses(CNOT_SETTLE_PULSES, stage)
    )


def cnot(layout: Optional[RegisterLayout] = None, extension: Optional[PulseProgram] = None) -> PulseProgram:
    """CNOT with the qubit nearest the CU as control and its left neighbor as target.

    ``X + end_inversion + reverse(X)`` where X is the transport prefix
    followed by the first eight extension pulses.
    """
    if layout is None:
        layout = RegisterLayout(2)
    if layout.qubit_count < 2:
        raise ValueError("CNOT needs at least two qubits")
    ext = extension or cnot_extension()
    x = pi_program("cnot_x", cnot_prefix(layout) + tuple(ext.classes[:-1]))
    end = pi_program("end", ext.classes[-1:])
    pulses = x.pulses + end.pulses + reverse_program(x).pulses
    prov = Provenance(
        "reconstructed",
        ext.provenance.literal if ext.provenance else (),
        tuple(
            Deviation(len(x) - 8 + d.position, d.literal, d.used, d.reason)
            for d in ext.deviations
        ),
        (
            f"stimulus at the control's mid-way stage ({layout.mid_stage(0)}), "
            f"then {CNOT_SETTLE_PULSES} SWAP pulses",
            "reverse sequence mirrors everything before the end inversion",
        ),
    )
    return PulseProgram("cnot", pulses, prov)


def cnot_cases(layout_kw: Optional[dict] = None):
    """Truth-table cases used to reconstruct and check the CNOT.

    Control is the qubit nearest the CU; spectators sit to the left.
    """
    cases = []
    for spectators in ([], [0], [1]):
        for extra in (0, 1):
            for ctl in (0, 1):
                for tgt in (0, 1):
                    bits = spectators + [tgt, ctl]
                    kw = dict(offset=4, **(layout_kw or {}))
                    probe = RegisterLayout(len(bits), **kw)
                    layout = RegisterLayout(len(bits), n=probe.min_length + extra, **kw)
                    want = spectators + [tgt ^ ctl, ctl]
                    cases.append((layout, bits, want))
    return cases


def reconstruct_cnot_extension(max_distance: int = 3, max_settle: int = 15):
    """Re-run the repair search that produced :data:`CNOT_EXTENSION`.

    Returns ``(settle_pulses, repair)`` for the first settle count (in
    increasing order) at the smallest edit distance, or ``None``.
    """
    cases = cnot_cases()
    core = CNOT_NORMALIZED[-1:]
    literal = CNOT_NORMALIZED[:-1]
    for d in range(max_distance + 1):
        for settle in range(max_settle + 1):
            advanced = []
            for layout, bits, want in cases:
                stage = layout.mid_stage(0)
                prefix = swap_pulses(stage) + (STIMULUS,) + swap_pulses(settle, stage)
                run = pi_program("p", prefix)
                s = run.run_classical(encode_register(bits, layout))
                g = run.run_classical(encode_register(want, layout))
                advanced.append((s, g))
            hits = repair_conjugated(literal, core, advanced, CNOT_REPAIR_ALPHABET, d, d)
            if hits:
                return settle, hits[0]
    return None


BUILTINS = {
    "encode0": encode_zero_at_edge,
    "encode1": encode_one_at_edge,
    "encode1_full": encode_one,
    "shift1": lambda: swap_shift(1),
    "shift2": lambda: swap_shift(2),
    "cu_stimulus": cu_stimulus,
    "gate1_identity": lambda: one_qubit_gate(OneCellUnitary.identity()),
    "gate1_flip": lambda: one_qubit_gate(OneCellUnitary.from_column(0, 1)),
    "gate1_hadamard": lambda: one_qubit_gate(OneCellUnitary.from_column(2 ** -0.5, 2 ** -0.5)),
    "cnot_ext": cnot_extension,
    "cnot": cnot,
}


def builtin(name: str) -> PulseProgram:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown built-in program {name!r}; known: {', '.join(sorted(BUILTINS))}") from None
    return factory().renamed(name)
