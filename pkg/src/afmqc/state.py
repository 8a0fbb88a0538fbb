"""Sparse amplitude engine over chain configurations.

A state is a dict from :class:`ChainConfig` to complex amplitude. Pi-pulses
permute the keys; one-cell unitaries branch every matched site in its
(ground, excited) basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from afmqc.chain import (
    ChainConfig,
    PulseClass,
    apply_pi,
    format_config,
    matching_sites,
    parse_config,
)

__all__ = [
    "OneCellUnitary",
    "SparseQuantumState",
    "TermCapExceeded",
    "DEFAULT_CULL",
    "DEFAULT_MAX_TERMS",
]

DEFAULT_CULL = 1e-14
DEFAULT_MAX_TERMS = 4096


class TermCapExceeded(RuntimeError):
    """The state grew past its configured number of basis terms."""


@dataclass(frozen=True)
class OneCellUnitary:
    """2x2 unitary in the (ground, excited) basis of one site.

    Columns are images of ground and excited respectively.
    """

    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("one-cell unitary must be 2x2")
        if not np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12, rtol=0):
            raise ValueError("matrix is not unitary within 1e-12")
        object.__setattr__(
            self, "matrix", tuple(tuple(complex(x) for x in row) for row in m)
        )

    @classmethod
    def from_column(cls, a: complex, b: complex) -> "OneCellUnitary":
        """Complete ``ground -> a ground + b excited`` to a unitary.

        The excited column is fixed as ``(-conj(b), conj(a))``.
        """
        a, b = complex(a), complex(b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
        return cls(((a, -b.conjugate()), (b, a.conjugate())))

    @classmethod
    def identity(cls) -> "OneCellUnitary":
        return cls(((1, 0), (0, 1)))

    @classmethod
    def flip(cls) -> "OneCellUnitary":
        return cls(((0, 1), (1, 0)))

    @property
    def column(self) -> tuple[complex, complex]:
        """Image of the ground state, ``(a, b)``."""
        return self.matrix[0][0], self.matrix[1][0]

    def dagger(self) -> "OneCellUnitary":
        m = np.asarray(self.matrix).conj().T
        return OneCellUnitary(tuple(map(tuple, m)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=complex)


class SparseQuantumState:
    """Superposition of chain configurations sharing N and dopant site."""

    def __init__(
        self,
        terms: Mapping[ChainConfig, complex],
        cull: float = DEFAULT_CULL,
        max_terms: int = DEFAULT_MAX_TERMS,
    ):
        self.cull = cull
        self.max_terms = max_terms
        shape = None
        clean: Dict[ChainConfig, complex] = {}
        for config, amp in terms.items():
            key = (config.n, config.dopant)
            if shape is None:
                shape = key
            elif key != shape:
                raise ValueError("all configurations must share N and dopant site")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude for {config}")
            if abs(amp) >= cull:
                clean[config] = amp
        if not clean:
            raise ValueError("state has no terms above the cull threshold")
        if len(clean) > max_terms:
            raise TermCapExceeded(f"{len(clean)} terms exceeds cap {max_terms}")
        self._terms = clean
        self.n, self.dopant = shape

    @classmethod
    def from_basis(cls, config: ChainConfig, **kw) -> "SparseQuantumState":
        return cls({config: 1.0}, **kw)

    def _like(self, terms: Mapping[ChainConfig, complex]) -> "SparseQuantumState":
        return SparseQuantumState(terms, cull=self.cull, max_terms=self.max_terms)

    @property
    def terms(self) -> Dict[ChainConfig, complex]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self.sorted_items())

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: format_config(kv[0]))

    def amplitude(self, config: ChainConfig) -> complex:
        return self._terms.get(config, 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def configs(self) -> set[ChainConfig]:
        return set(self._terms)

    # -- pulses ------------------------------------------------------------

    def apply_pi(self, cls: PulseClass) -> "SparseQuantumState":
        return self._like({apply_pi(c, cls): a for c, a in self._terms.items()})

    def apply_unitary(self, cls: PulseClass, u: OneCellUnitary) -> "SparseQuantumState":
        m = u.matrix
        out: Dict[ChainConfig, complex] = {}
        for config, amp in self.sorted_items():
            sites = matching_sites(config, cls)
            exc = config.excitations
            branches = {0: amp}  # flip-mask -> amplitude
            bit = 1
            while bit <= sites:
                if sites & bit:
                    excited = bool(exc & bit)
                    stay = m[1][1] if excited else m[0][0]
                    move = m[0][1] if excited else m[1][0]
                    nxt = {}
                    for mask, val in branches.items():
                        if abs(val * stay) >= self.cull:
                            nxt[mask] = val * stay
                        if abs(val * move) >= self.cull:
                            nxt[mask | bit] = val * move
                    branches = nxt
                    if len(branches) > self.max_terms:
                        raise TermCapExceeded(
                            f"unitary on {cls} branched past {self.max_terms} terms"
                        )
                bit <<= 1
            for mask, val in branches.items():
                key = config.flipped(mask)
                out[key] = out.get(key, 0j) + val
            if len(out) > self.max_terms:
                raise TermCapExceeded(f"state grew past {self.max_terms} terms")
        return self._like({c: a for c, a in out.items() if abs(a) >= self.cull})

    # -- readout -----------------------------------------------------------

    def probabilities(self) -> Dict[ChainConfig, float]:
        return {c: abs(a) ** 2 for c, a in self.sorted_items()}

    def overlap(self, other: "SparseQuantumState") -> complex:
        """``<self|other>``."""
        if (self.n, self.dopant) != (other.n, other.dopant):
            raise ValueError("states live on different chains")
        return sum(
            (a.conjugate() * other._terms[c] for c, a in self.sorted_items() if c in other._terms),
            0j,
        )

    def dump(self) -> str:
        lines = [f"{format_config(c)} {a.real:.17g} {a.imag:.17g}" for c, a in self.sorted_items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str, **kw) -> "SparseQuantumState":
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            raw, re_, im_ = line.split()
            terms[parse_config(raw)] = complex(float(re_), float(im_))
        return cls(terms, **kw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseQuantumState):
            return NotImplemented
        return self._terms == other._terms

    def isclose(self, other: "SparseQuantumState", atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def __repr__(self) -> str:
        body = ", ".join(f"{format_config(c)}: {a:.6g}" for c, a in self.sorted_items()[:4])
        more = "" if len(self) <= 4 else f", ... ({len(self)} terms)"
        return f"SparseQuantumState({{{body}{more}}})"


def from_basis(config: ChainConfig, **kw) -> SparseQuantumState:
    return SparseQuantumState.from_basis(config, **kw)


def apply_pi_q(state: SparseQuantumState, cls: PulseClass) -> SparseQuantumState:
    return state.apply_pi(cls)


def apply_unitary(
    state: SparseQuantumState, cls: PulseClass, u: OneCellUnitary
) -> SparseQuantumState:
    return state.apply_unitary(cls, u)


def probabilities(state: SparseQuantumState) -> Dict[ChainConfig, float]:
    return state.probabilities()


def overlap(s1: SparseQuantumState, s2: SparseQuantumState) -> complex:
    return s1.overlap(s2)
