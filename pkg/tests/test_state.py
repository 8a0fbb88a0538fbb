import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afmqc.chain import ChainConfig, PulseClass, all_classes, apply_pi, format_config, parse_config
from afmqc.state import (
    OneCellUnitary,
    SparseQuantumState,
    TermCapExceeded,
    apply_pi_q,
    apply_unitary,
    from_basis,
    overlap,
    probabilities,
)

import oracles

C = PulseClass.of
S = 2 ** -0.5


def to_dense(state: SparseQuantumState) -> np.ndarray:
    v = np.zeros(2 ** state.n, dtype=complex)
    for config, amp in state.terms.items():
        v[config.up] = amp
    return v


@st.composite
def unitaries(draw):
    theta = draw(st.floats(0, math.pi))
    phi = draw(st.floats(-math.pi, math.pi))
    chi = draw(st.floats(-math.pi, math.pi))
    a = math.cos(theta / 2) * cmath.exp(1j * phi)
    b = math.sin(theta / 2) * cmath.exp(1j * chi)
    return OneCellUnitary.from_column(a, b)


@st.composite
def programs(draw, max_len=8):
    steps = []
    for _ in range(draw(st.integers(0, max_len))):
        cls = draw(st.sampled_from(all_classes()))
        u = draw(st.one_of(st.none(), unitaries()))
        steps.append((cls, u))
    return steps


class TestUnitary:
    def test_completion(self):
        u = OneCellUnitary.from_column(0.6, 0.8j)
        m = u.as_array()
        assert np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12)
        assert m[0, 1] == pytest.approx(-(0.8j).conjugate())
        assert m[1, 1] == pytest.approx(0.6)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            OneCellUnitary(((1, 1), (0, 1)))
        with pytest.raises(ValueError):
            OneCellUnitary.from_column(1, 1)

    @given(unitaries())
    def test_dagger_is_completed_form(self, u):
        a, b = u.dagger().column
        assert np.allclose(u.dagger().as_array(), OneCellUnitary.from_column(a, b).as_array())
        assert np.allclose(u.as_array() @ u.dagger().as_array(), np.eye(2))


class TestBasics:
    def test_from_basis(self):
        s = from_basis(parse_config("udud"))
        assert s.terms == {parse_config("udud"): 1 + 0j}
        assert s.norm() == 1

    def test_pi_examples(self):
        s = apply_pi_q(from_basis(ChainConfig.ground(8)), C("A", "-1/2"))
        assert s.configs() == {parse_config("ddududud")}

    def test_identity_unitary(self):
        s = from_basis(ChainConfig.ground(10))
        assert apply_unitary(s, C("A", -1), OneCellUnitary.identity()) == s

    def test_single_site_branch(self):
        # in an even ground chain only site 0 has class (A,-1/2)
        g = ChainConfig.ground(8)
        out = apply_unitary(from_basis(g), C("A", "-1/2"), OneCellUnitary.from_column(0.6, 0.8))
        assert out.terms == {g: pytest.approx(0.6), g.flipped(1): pytest.approx(0.8)}

    def test_probabilities_symmetric(self):
        c1, c2 = parse_config("udduudud"), parse_config("duududud")
        s = SparseQuantumState({c1: S, c2: S})
        p = probabilities(s)
        assert p[c1] == pytest.approx(0.5) and p[c2] == pytest.approx(0.5)
        assert sum(p.values()) == pytest.approx(1, abs=1e-10)

    def test_overlap(self):
        c1, c2 = parse_config("udud"), parse_config("dudu")
        assert overlap(from_basis(c1), from_basis(c2)) == 0
        s = SparseQuantumState({c1: 0.6, c2: 0.8j})
        assert overlap(s, s) == pytest.approx(1)
        with pytest.raises(ValueError):
            overlap(s, from_basis(ChainConfig.ground(6)))

    def test_mixed_chains_rejected(self):
        with pytest.raises(ValueError):
            SparseQuantumState({ChainConfig.ground(4): S, ChainConfig.ground(6): S})

    def test_cull(self):
        s = SparseQuantumState({parse_config("udud"): 1, parse_config("dudu"): 1e-15})
        assert len(s) == 1

    def test_term_cap(self):
        # every interior A-site of a ground chain has class (A,-1)
        s = from_basis(ChainConfig.ground(20), max_terms=64)
        with pytest.raises(TermCapExceeded):
            apply_unitary(s, C("A", -1), OneCellUnitary.from_column(S, S))

    def test_dump_round_trip(self):
        s = SparseQuantumState({parse_config("udud"): 0.6, parse_config("dudu"): 0.8j})
        text = s.dump()
        assert text.splitlines()[0].split()[0] == "dudu"
        assert SparseQuantumState.load(text) == s
        assert text == "dudu 0 0.80000000000000004\nudud 0.59999999999999998 0\n"


class TestAgainstDenseOracle:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 8), st.data(), programs())
    def test_programs(self, n, data, steps):
        config = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        state = from_basis(config)
        dense = oracles.dense_basis(format_config(config))
        for cls, u in steps:
            m2 = int(2 * cls.m)
            if u is None:
                state = apply_pi_q(state, cls)
                dense = oracles.dense_pi(dense, n, cls.target.value, m2)
            else:
                state = apply_unitary(state, cls, u)
                dense = oracles.dense_unitary(dense, n, cls.target.value, m2, u.matrix)
        assert np.allclose(to_dense(state), dense, atol=1e-12)
        assert state.norm() == pytest.approx(1, abs=1e-10)


class TestProperties:
    @given(st.integers(4, 12), st.data())
    def test_flip_matrix_equals_pi(self, n, data):
        terms = {}
        for _ in range(data.draw(st.integers(1, 4))):
            terms[ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))] = 0.5
        norm = math.sqrt(sum(abs(a) ** 2 for a in terms.values()))
        s = SparseQuantumState({c: a / norm for c, a in terms.items()})
        cls = data.draw(st.sampled_from(all_classes()))
        assert apply_unitary(s, cls, OneCellUnitary.flip()).isclose(apply_pi_q(s, cls))

    @given(st.integers(4, 16), st.data())
    def test_pi_is_permutation(self, n, data):
        c1 = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        c2 = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        if c1 == c2:
            return
        s = SparseQuantumState({c1: 0.6, c2: 0.8j})
        cls = data.draw(st.sampled_from(all_classes()))
        once = apply_pi_q(s, cls)
        assert len(once) == 2
        assert apply_pi_q(once, cls) == s
        assert probabilities(once) == {apply_pi(c1, cls): pytest.approx(0.36), apply_pi(c2, cls): pytest.approx(0.64)}
        assert overlap(once, once) == pytest.approx(overlap(s, s))

    @given(st.integers(4, 10), st.data(), unitaries())
    def test_linearity(self, n, data, u):
        c1 = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        c2 = ChainConfig(n, data.draw(st.integers(0, (1 << n) - 1)))
        if c1 == c2:
            return
        cls = data.draw(st.sampled_from(all_classes()))
        a, b = 0.6, 0.8j
        both = apply_unitary(SparseQuantumState({c1: a, c2: b}), cls, u)
        v1 = to_dense(apply_unitary(from_basis(c1), cls, u))
        v2 = to_dense(apply_unitary(from_basis(c2), cls, u))
        assert np.allclose(to_dense(both), a * v1 + b * v2, atol=1e-12)
