"""Pulses, pulse programs and the pulse-script text format.

Script grammar, one pulse per line::

    PI <A|B|D> <m>
    U  <A|B|D> <m> <re_a> <im_a> <re_b> <im_b>

``m`` is one of ``-1 -1/2 0 1/2 1``. Text after ``#`` is ignored.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from afmqc.chain import ChainConfig, PulseClass, Sublattice, apply_pi
from afmqc.state import OneCellUnitary, SparseQuantumState


class PulseKind(enum.Enum):
    PI = "PI"
    UNITARY = "U"


@dataclass(frozen=True)
class Pulse:
    kind: PulseKind
    cls: PulseClass
    matrix: Optional[OneCellUnitary] = None

    def __post_init__(self):
        if self.kind is PulseKind.PI and self.matrix is not None:
            raise ValueError("pi pulses carry no matrix")
        if self.kind is PulseKind.UNITARY and self.matrix is None:
            raise ValueError("unitary pulses need a matrix")

    @classmethod
    def pi(cls, target: Union[str, Sublattice], m) -> "Pulse":
        return cls(PulseKind.PI, PulseClass.of(target, m))

    @classmethod
    def unitary(cls, target, m, u: OneCellUnitary) -> "Pulse":
        return cls(PulseKind.UNITARY, PulseClass.of(target, m), u)

    def dagger(self) -> "Pulse":
        if self.kind is PulseKind.PI:
            return self
        return Pulse(PulseKind.UNITARY, self.cls, self.matrix.dagger())

    def apply(self, state: SparseQuantumState) -> SparseQuantumState:
        if self.kind is PulseKind.PI:
            return state.apply_pi(self.cls)
        return state.apply_unitary(self.cls, self.matrix)

    def apply_classical(self, config: ChainConfig) -> ChainConfig:
        if self.kind is not PulseKind.PI:
            raise TypeError("unitary pulses need the quantum engine")
        return apply_pi(config, self.cls)

    def script(self) -> str:
        head = f"{self.kind.value} {self.cls.target.value} {self.cls.m_text}"
        if self.kind is PulseKind.PI:
            return head
        a, b = self.matrix.column
        return f"{head} {a.real!r} {a.imag!r} {b.real!r} {b.imag!r}"

    def __str__(self) -> str:
        sym = "pi" if self.kind is PulseKind.PI else "U"
        return f"{sym}({self.cls})"


@dataclass(frozen=True)
class Deviation:
    """One place where a program departs from its reference pulse list."""

    position: int
    literal: str
    used: str
    reason: str

    def as_dict(self) -> dict:
        return {"position": self.position, "literal": self.literal, "used": self.used, "reason": self.reason}


@dataclass(frozen=True)
class Provenance:
    """Where a built-in sequence came from and how it differs from the reference."""

    source: str
    literal: tuple[str, ...] = ()
    deviations: tuple[Deviation, ...] = ()
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "literal": list(self.literal),
            "deviations": [d.as_dict() for d in self.deviations],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class PulseProgram:
    name: str
    pulses: tuple[Pulse, ...] = ()
    provenance: Optional[Provenance] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.name:
            raise ValueError("program name must be nonempty")
        object.__setattr__(self, "pulses", tuple(self.pulses))

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    def __add__(self, other: "PulseProgram") -> "PulseProgram":
        return PulseProgram(f"{self.name}+{other.name}", self.pulses + other.pulses)

    def renamed(self, name: str, provenance: Optional[Provenance] = None) -> "PulseProgram":
        return PulseProgram(name, self.pulses, provenance or self.provenance)

    @property
    def deviations(self) -> tuple[Deviation, ...]:
        return self.provenance.deviations if self.provenance else ()

    @property
    def classes(self) -> list[PulseClass]:
        return [p.cls for p in self.pulses]

    def run(
        self,
        state: SparseQuantumState,
        observer: Optional[Callable[[int, Pulse, SparseQuantumState], None]] = None,
    ) -> SparseQuantumState:
        for k, pulse in enumerate(self.pulses, 1):
            state = pulse.apply(state)
            if observer is not None:
                observer(k, pulse, state)
        return state

    def run_classical(self, config: ChainConfig) -> ChainConfig:
        for pulse in self.pulses:
            config = pulse.apply_classical(config)
        return config

    def script(self) -> str:
        return format_script(self)


def pi_program(name: str, classes: Iterable, provenance: Optional[Provenance] = None) -> PulseProgram:
    """Build a pi-only program from ``(target, m)`` pairs or classes."""
    pulses = []
    for c in classes:
        if isinstance(c, PulseClass):
            pulses.append(Pulse(PulseKind.PI, c))
        else:
            pulses.append(Pulse.pi(*c))
    return PulseProgram(name, tuple(pulses), provenance)


def reverse_program(program: PulseProgram, name: Optional[str] = None) -> PulseProgram:
    """Pulses in reverse order, unitaries replaced by their adjoints."""
    return PulseProgram(
        name or f"{program.name}_rev",
        tuple(p.dagger() for p in reversed(program.pulses)),
    )


# -- script text ---------------------------------------------------------------

class ScriptParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_class(target: str, m: str, line: int) -> PulseClass:
    try:
        return PulseClass.of(Sublattice(target), Fraction(m))
    except (ValueError, ZeroDivisionError):
        raise ScriptParseError(line, f"unknown pulse class {target} {m}") from None


def parse_script(text: str, name: str = "script") -> PulseProgram:
    pulses = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if not body:
            continue
        op = body[0].upper()
        if op == "PI":
            if len(body) != 3:
                raise ScriptParseError(lineno, "PI takes a target and m")
            pulses.append(Pulse(PulseKind.PI, _parse_class(body[1], body[2], lineno)))
        elif op == "U":
            if len(body) != 7:
                raise ScriptParseError(lineno, "U takes a target, m and four reals")
            cls = _parse_class(body[1], body[2], lineno)
            try:
                ra, ia, rb, ib = map(float, body[3:])
                u = OneCellUnitary.from_column(complex(ra, ia), complex(rb, ib))
            except ValueError as exc:
                raise ScriptParseError(lineno, str(exc)) from None
            pulses.append(Pulse(PulseKind.UNITARY, cls, u))
        else:
            raise ScriptParseError(lineno, f"unknown pulse kind {body[0]!r}")
    return PulseProgram(name, tuple(pulses))


def format_script(program: PulseProgram) -> str:
    lines = [p.script() for p in program.pulses]
    return "".join(line + "\n" for line in lines)


def load_script(path: Union[str, Path]) -> PulseProgram:
    path = Path(path)
    return parse_script(path.read_text(encoding="utf-8"), name=path.stem)
