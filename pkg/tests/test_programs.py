import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afmqc.chain import ChainConfig, PulseClass, all_classes, format_config, parse_config
from afmqc.programs import (
    BUILTINS,
    BlockRole,
    DestroyedQubit,
    Pulse,
    PulseKind,
    PulseProgram,
    RegisterLayout,
    ScriptParseError,
    builtin,
    cnot,
    cnot_extension,
    decode_register,
    encode_one,
    encode_one_at_edge,
    encode_register,
    encode_zero_at_edge,
    format_script,
    one_qubit_gate,
    parse_script,
    pi_program,
    reconstruct_cnot_extension,
    reverse_program,
    swap_shift,
)
from afmqc.programs.library import (
    CNOT_EXTENSION,
    CNOT_LITERAL,
    CNOT_NORMALIZED,
    GATE_UPDATE_LITERAL,
    cnot_cases,
    swap_pulses,
)
from afmqc.programs.register import CONTROL_UNIT, ONE, ZERO, read_window
from afmqc.programs.verify import (
    Expectation,
    check_conditional_alteration,
    passage_layout,
    run_suite,
    verify_program,
)
from afmqc.state import OneCellUnitary, SparseQuantumState

C = PulseClass.of
H = OneCellUnitary.from_column(2 ** -0.5, 2 ** -0.5)


def basis(config):
    return SparseQuantumState.from_basis(config)


class TestScript:
    def test_round_trip_builtins(self):
        for name in BUILTINS:
            program = builtin(name)
            again = parse_script(format_script(program), name)
            assert again.pulses == program.pulses, name

    def test_parse(self):
        text = "# encode zero\nPI A -1/2\n\nPI B 0  # shift\nU A 1 0.6 0 0 0.8\n"
        p = parse_script(text, "demo")
        assert p.name == "demo"
        assert [str(x) for x in p.pulses] == ["pi(A,-1/2)", "pi(B,0)", "U(A,1)"]
        assert p.pulses[2].matrix.column == (0.6, 0.8j)

    @pytest.mark.parametrize(
        "text, line",
        [
            ("PI A 0\nPI Q 1\n", 2),
            ("PI A 3/2\n", 1),
            ("PI A\n", 1),
            ("FLIP A 0\n", 1),
            ("PI A 0\n# ok\nU A 1 1 0 1 0\n", 3),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ScriptParseError) as info:
            parse_script(text)
        assert info.value.line == line

    def test_empty_name_rejected(self):
        with pytest.raises(ValueError):
            PulseProgram("", ())

    def test_pi_pulse_takes_no_matrix(self):
        with pytest.raises(ValueError):
            Pulse(PulseKind.PI, C("A", 0), H)


class TestReverse:
    def test_order_and_dagger(self):
        u = OneCellUnitary.from_column(0.6, 0.8j)
        p = PulseProgram("p", (Pulse.pi("A", 0), Pulse.unitary("B", -1, u)))
        r = reverse_program(p)
        assert r.pulses[1] == Pulse.pi("A", 0)
        assert r.pulses[0].matrix == u.dagger()
        assert reverse_program(r).pulses == p.pulses

    @settings(max_examples=100, deadline=None)
    @given(st.integers(4, 24), st.data())
    def test_program_then_reverse_is_identity(self, n, data):
        classes = data.draw(st.lists(st.sampled_from(all_classes()), max_size=20))
        config = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        p = pi_program("r", classes)
        assert (p + reverse_program(p)).run_classical(config) == config

    def test_mixed_program_reverses_on_superpositions(self):
        layout = RegisterLayout(2, offset=4)
        p = one_qubit_gate(H, layout)
        s = basis(encode_register([1, 0], layout))
        out = (p + reverse_program(p)).run(s)
        assert out.isclose(s)


class TestEncode:
    def test_zero(self):
        out = encode_zero_at_edge().run_classical(ChainConfig.ground(8))
        assert format_config(out, "arrows") == "⇓⇑↑↓↑↓↑↓"

    def test_zero_is_known_optimum_order(self):
        assert [str(c) for c in encode_zero_at_edge().classes] == ["A,-1/2", "B,0"]

    def test_one_steps(self):
        start = parse_config("duududud")
        configs = [start]
        for pulse in encode_one_at_edge():
            configs.append(pulse.apply_classical(configs[-1]))
        assert [format_config(c) for c in configs] == ["duududud", "duddudud", "uuddudud", "udduudud"]

    def test_one_label_deviation_recorded(self):
        devs = encode_one_at_edge().deviations
        assert [(d.position, d.literal, d.used) for d in devs] == [(1, "A,-1/2", "A,1/2")]

    def test_one_composite(self):
        out = encode_one().run_classical(ChainConfig.ground(8))
        assert format_config(out, "arrows") == "↑↓⇓⇑↑↓↑↓"
        assert format_config(out, "arrows")[:4] == "↑↓⇓⇑"

    def test_program_twice(self):
        g = ChainConfig.ground(8)
        p = encode_zero_at_edge()
        assert reverse_program(p).run_classical(p.run_classical(g)) == g

    def test_odd_chain_touches_right_end(self):
        # the right end of an odd chain is an A-site whose class is (A,-1/2) as well
        out = encode_zero_at_edge().run_classical(ChainConfig.ground(5))
        assert format_config(out) == "duuud"


class TestShift:
    def test_one_moves_four_cells(self):
        start = encode_one().run_classical(ChainConfig.ground(12))
        out = swap_shift(2).run_classical(start)
        assert format_config(out, "arrows") == "↑↓↑↓↑↓⇓⇑↑↓↑↓"

    def test_zero_pairs(self):
        assert len(swap_shift(0)) == 0
        assert [str(c) for c in swap_shift(2).classes] == ["A,0", "B,0", "A,0", "B,0"]

    @pytest.mark.parametrize("bit", [0, 1])
    @pytest.mark.parametrize("pairs", [1, 2, 3, 5])
    def test_transport_preserves_block(self, bit, pairs):
        n = 40
        start = encode_register([bit], RegisterLayout(1, cu_present=False, offset=2, n=n))
        out = swap_shift(pairs).run_classical(start)
        want = encode_register([bit], RegisterLayout(1, cu_present=False, offset=2 + 2 * pairs, n=n))
        assert out == want

    def test_zero_flush_at_edge_cannot_move(self):
        start = encode_zero_at_edge().run_classical(ChainConfig.ground(12))
        assert swap_shift(1).run_classical(start) != encode_register(
            [0], RegisterLayout(1, cu_present=False, offset=2, n=12)
        )

    @pytest.mark.parametrize("t", range(1, 8))
    def test_odd_stages_show_reversed_forms(self, t):
        layout = RegisterLayout(2, cu_present=False, offset=2, n=40)
        out = pi_program("s", swap_pulses(t)).run_classical(encode_register([1, 0], layout))
        reading = decode_register(out, layout, shift=t)
        assert reading.bits == (1, 0)
        roles = {r.role for r in reading.qubits}
        if t % 2:
            assert roles == {BlockRole.ZERO_REVERSED, BlockRole.ONE_REVERSED}
        else:
            assert roles == {BlockRole.ZERO, BlockRole.ONE}


class TestRegister:
    def test_patterns(self):
        assert ZERO.physical() == "duud"
        assert ONE.physical() == "uddu"
        from afmqc.chain import Sublattice

        assert CONTROL_UNIT.physical(Sublattice.B) == "udduud"

    def test_cu_arrows(self):
        layout = RegisterLayout(0)
        config = encode_register([], layout)
        start = layout.cu_start()
        assert start % 2 == 1
        assert format_config(config, "arrows")[start:start + 6] == "⇑⇓↓↑⇑⇓"

    def test_single_one_no_cu(self):
        config = encode_register([1], RegisterLayout(1, cu_present=False))
        assert format_config(config) == "udduudud"

    def test_round_trip(self):
        layout = RegisterLayout(3)
        config = encode_register([1, 0, 1], layout)
        reading = decode_register(config, layout)
        assert reading.bits == (1, 0, 1)
        assert reading.cu_status == "intact"

    def test_no_cu(self):
        layout = RegisterLayout(2, cu_present=False)
        reading = decode_register(encode_register([1, 0], layout), layout)
        assert reading.bits == (1, 0) and reading.cu_status == "absent"

    def test_ground(self):
        layout = RegisterLayout(0, cu_present=False, n=12)
        assert decode_register(ChainConfig.ground(12), layout).bits == ()

    @pytest.mark.parametrize("site", range(8))
    def test_single_flip_destroys(self, site):
        layout = RegisterLayout(1, cu_present=False, n=8)
        config = encode_register([1], layout).flipped(1 << site)
        with pytest.raises(DestroyedQubit):
            decode_register(config, layout)

    def test_layout_validation(self):
        with pytest.raises(ValueError):
            RegisterLayout(1, cu_spacer=2)
        with pytest.raises(ValueError):
            RegisterLayout(1, offset=1)
        with pytest.raises(ValueError):
            RegisterLayout(2, n=10)
        with pytest.raises(ValueError):
            encode_register([1, 0], RegisterLayout(3))

    def test_each_qubit_takes_eight_cells(self):
        a, b = RegisterLayout(2, cu_present=False), RegisterLayout(3, cu_present=False)
        assert b.min_length - a.min_length == 8

    @pytest.mark.parametrize("spacer, stage", [(1, 4), (3, 3), (5, 6), (7, 5), (9, 8)])
    def test_mid_stage(self, spacer, stage):
        assert RegisterLayout(2, cu_spacer=spacer).mid_stage(0) == stage
        assert RegisterLayout(2, cu_spacer=spacer).mid_stage(1) == stage + 4


class TestControlUnit:
    @pytest.mark.parametrize("bits", [[0], [1], [1, 0, 1], [0, 1, 1, 0]])
    def test_transparent(self, bits):
        layout, t = passage_layout(bits, offset=4 * len(bits) + 8)
        out = pi_program("pass", swap_pulses(t)).run_classical(encode_register(bits, layout))
        reading = decode_register(out, layout, shift=t)
        assert list(reading.bits) == bits
        assert reading.cu.role is BlockRole.CONTROL_UNIT

    def test_conditional_alteration(self):
        report = check_conditional_alteration()
        assert report.passed, report.text()

    def test_stimulus_mid_stage_spawns_domains(self):
        # at the mid-way stage itself the same pulse does not give a clean altered CU
        layout, _ = passage_layout([1, 0])
        stage = layout.mid_stage(0)
        p = pi_program("x", swap_pulses(stage) + (C("A", 1),))
        out = p.run_classical(encode_register([1, 0], layout))
        assert read_window(out, layout.cu_start(stage + 0), 6) != "XXXXXX"


class TestOneQubitGate:
    def test_seventeen_pulses(self):
        p = one_qubit_gate(H)
        assert len(p) == 17
        kinds = [x.kind for x in p.pulses]
        assert kinds.count(PulseKind.UNITARY) == 1 and kinds[8] is PulseKind.UNITARY

    def test_update_core_and_deviation(self):
        p = one_qubit_gate(H)
        core = [str(c) for c in p.classes[3:9]]
        assert core == ["A,1", "B,-1", "B,0", "A,1", "B,0", "A,1"]
        assert [(d.position, d.literal, d.used) for d in p.deviations] == [(4, "B,1", "B,-1")]
        assert [str(c) for c in GATE_UPDATE_LITERAL][1] == "B,1"

    def test_literal_update_fails(self):
        # with (B,1) as written the gate destroys the register
        layout = RegisterLayout(1, offset=4)
        pos = swap_pulses(layout.mid_stage(0))
        head = pi_program("h", pos + GATE_UPDATE_LITERAL)
        program = PulseProgram("lit", head.pulses + (Pulse(PulseKind.UNITARY, C("A", 1), H),) + reverse_program(head).pulses)
        out = program.run(basis(encode_register([1], layout)))
        with pytest.raises((DestroyedQubit, ValueError)):
            for c in out.configs():
                decode_register(c, layout)

    @pytest.mark.parametrize("bit", [0, 1])
    def test_identity(self, bit):
        layout = RegisterLayout(1, offset=4)
        s = basis(encode_register([bit], layout))
        assert one_qubit_gate(OneCellUnitary.identity(), layout).run(s) == s

    @pytest.mark.parametrize("bits", [[1], [0], [1, 1], [0, 1, 0]])
    def test_flip(self, bits):
        layout = RegisterLayout(len(bits), offset=4)
        out = one_qubit_gate(OneCellUnitary.from_column(0, 1), layout).run(basis(encode_register(bits, layout)))
        want = bits[:-1] + [1 - bits[-1]]
        assert out.configs() == {encode_register(want, layout)}

    def test_superposition_follows_column(self):
        layout = RegisterLayout(1, offset=4)
        a, b = 0.6, 0.8j
        out = one_qubit_gate(OneCellUnitary.from_column(a, b), layout).run(basis(encode_register([1], layout)))
        one, zero = encode_register([1], layout), encode_register([0], layout)
        assert out.amplitude(one) == pytest.approx(a)
        assert out.amplitude(zero) == pytest.approx(b)

    @pytest.mark.parametrize("q", [2, 3])
    def test_every_qubit_addressable(self, q):
        for bits in itertools.product((0, 1), repeat=q):
            layout = RegisterLayout(q, offset=4)
            for k in range(q):
                out = one_qubit_gate(OneCellUnitary.from_column(0, 1), layout, k).run(basis(encode_register(list(bits), layout)))
                want = list(bits)
                want[layout.qubit_index(k)] ^= 1
                assert out.configs() == {encode_register(want, layout)}

    def test_needs_left_margin(self):
        layout = RegisterLayout(1, offset=0)
        out = one_qubit_gate(OneCellUnitary.from_column(0, 1), layout).run(basis(encode_register([1], layout)))
        assert out.configs() != {encode_register([0], layout)}


class TestCnot:
    def test_extension_has_nine_pulses(self):
        assert len(cnot_extension()) == 9
        assert len(CNOT_LITERAL) == 9

    def test_deviation_report(self):
        devs = cnot_extension().deviations
        assert [d.position for d in devs] == [0, 1, 2, 4, 7]
        assert {d.literal for d in devs if d.used == "B,-1"} >= {"B,1"}
        assert sum(a != b for a, b in zip(CNOT_NORMALIZED, CNOT_EXTENSION)) == 3

    def test_literal_fails_truth_table(self):
        layout = RegisterLayout(2, offset=4)
        ext = pi_program("lit", CNOT_LITERAL)
        wrong = 0
        for ctl, tgt in itertools.product((0, 1), repeat=2):
            out = cnot(layout, ext).run_classical(encode_register([tgt, ctl], layout))
            wrong += out != encode_register([tgt ^ ctl, ctl], layout)
        assert wrong > 0

    @pytest.mark.parametrize("layout, bits, want", cnot_cases(), ids=lambda v: str(v) if isinstance(v, list) else None)
    def test_truth_table(self, layout, bits, want):
        out = cnot(layout).run_classical(encode_register(bits, layout))
        assert out == encode_register(want, layout)

    def test_length(self):
        assert len(cnot()) == 29

    def test_reconstruction_reproduces_constant(self):
        settle, repair = reconstruct_cnot_extension()
        assert settle == 2
        assert repair.pulses == CNOT_EXTENSION[:-1]
        assert repair.distance == 3 and repair.changed == (0, 2, 4)


class TestVerify:
    def test_encode_passes(self):
        r = verify_program(
            encode_zero_at_edge(),
            basis(ChainConfig.ground(8)),
            Expectation(final_configs={parse_config("duududud")}, steps={1: {parse_config("ddududud")}}),
        )
        assert r.passed and r.failed_step is None

    def test_tampered_program_reports_step(self):
        tampered = pi_program("bad", [C("A", "-1/2"), C("B", 1)])
        r = verify_program(
            tampered,
            basis(ChainConfig.ground(8)),
            Expectation(
                final_configs={parse_config("duududud")},
                steps={1: {parse_config("ddududud")}, 2: {parse_config("duududud")}},
            ),
        )
        assert not r.passed
        assert r.failed_step == 2
        assert "FAIL" in r.text()
        assert r.as_dict()["failed_step"] == 2

    @pytest.mark.parametrize("suite", ["encode", "shift", "cu", "gate1", "cnot", "props"])
    def test_suites_pass(self, suite):
        reports = run_suite(suite)
        assert reports and all(r.passed for r in reports), "\n".join(r.text() for r in reports if not r.passed)

    def test_cnot_suite_counts(self):
        reports = run_suite("cnot")
        names = {r.name.split()[1] for r in reports}
        assert {"00", "01", "10", "11"} <= names
