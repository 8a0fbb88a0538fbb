"""Spin-chain configurations, frequency classes and classical pi-pulses.

A chain is a 1-D array of nuclear spins on alternating A/B sublattices
(site 0 is an A-site). The ground state has A-sites up and B-sites down.
An optional dopant site carries its own resonance and only answers to
pulses addressed to sublattice D.

Configurations are stored as an integer bit mask of physical "up" spins,
which lets :func:`apply_pi` evaluate every site's class with a handful of
shifts and masks. :func:`apply_pi_reference` is the slow per-site version
used as an oracle in the tests.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

__all__ = [
    "Orientation",
    "Sublattice",
    "PulseClass",
    "ChainConfig",
    "SiteState",
    "ConfigParseError",
    "ALLOWED_M",
    "classify_site",
    "site_state",
    "matching_sites",
    "apply_pi",
    "apply_pi_reference",
    "parse_config",
    "format_config",
    "excitation_string",
    "frequency_of_class",
]


class Orientation(enum.Enum):
    UP = "u"
    DOWN = "d"

    def __neg__(self) -> "Orientation":
        return Orientation.DOWN if self is Orientation.UP else Orientation.UP

    @property
    def m(self) -> Fraction:
        """Magnetic quantum number, +1/2 for up and -1/2 for down."""
        return Fraction(1, 2) if self is Orientation.UP else Fraction(-1, 2)


class Sublattice(enum.Enum):
    A = "A"
    B = "B"
    D = "D"


_SUBLATTICE_ORDER = {Sublattice.A: 0, Sublattice.B: 1, Sublattice.D: 2}

ALLOWED_M = (
    Fraction(-1),
    Fraction(-1, 2),
    Fraction(0),
    Fraction(1, 2),
    Fraction(1),
)

# ground orientation per sublattice; the dopant's ground is taken as up
GROUND = {
    Sublattice.A: Orientation.UP,
    Sublattice.B: Orientation.DOWN,
    Sublattice.D: Orientation.UP,
}


class ConfigParseError(ValueError):
    """Raised for malformed raw configuration text."""


def _as_m(value: Union[Fraction, int, float, str]) -> Fraction:
    m = Fraction(value) if not isinstance(value, str) else Fraction(value.strip())
    if m not in ALLOWED_M:
        raise ValueError(f"neighbor sum must be one of -1, -1/2, 0, 1/2, 1; got {value!r}")
    return m


def _format_m(m: Fraction) -> str:
    return str(m.numerator) if m.denominator == 1 else f"{m.numerator}/{m.denominator}"


@dataclass(frozen=True)
class PulseClass:
    """Addressing unit of a pulse: target sublattice plus neighbor sum ``m``."""

    target: Sublattice
    m: Fraction

    def __post_init__(self):
        target = self.target
        if not isinstance(target, Sublattice):
            target = Sublattice(str(target).upper())
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "m", _as_m(self.m))

    @classmethod
    def of(cls, target: Union[str, Sublattice], m) -> "PulseClass":
        return cls(Sublattice(target) if isinstance(target, str) else target, _as_m(m))

    def sort_key(self):
        return (_SUBLATTICE_ORDER[self.target], self.m)

    def __lt__(self, other: "PulseClass") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def m_text(self) -> str:
        return _format_m(self.m)

    def __str__(self) -> str:
        return f"{self.target.value},{self.m_text}"


def all_classes(dopant: bool = False) -> list[PulseClass]:
    """Every addressable class, in solver tie-break order."""
    targets = [Sublattice.A, Sublattice.B] + ([Sublattice.D] if dopant else [])
    return [PulseClass(t, m) for t in targets for m in ALLOWED_M]


@dataclass(frozen=True)
class ChainConfig:
    """One classical basis state of the chain.

    ``up`` has bit ``i`` set when site ``i`` points up along the field.
    """

    n: int
    up: int
    dopant: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain needs at least 2 sites, got {self.n}")
        if self.up < 0 or self.up >> self.n:
            raise ValueError("up mask has bits outside the chain")
        if self.dopant is not None and not 0 <= self.dopant < self.n:
            raise ValueError(f"dopant index {self.dopant} out of range for N={self.n}")

    @classmethod
    def ground(cls, n: int, dopant: Optional[int] = None) -> "ChainConfig":
        up = _even_mask(n)
        if dopant is not None:
            up |= 1 << dopant
        return cls(n, up, dopant)

    @classmethod
    def from_orientations(
        cls, spins: Sequence[Orientation], dopant: Optional[int] = None
    ) -> "ChainConfig":
        up = 0
        for i, s in enumerate(spins):
            if s is Orientation.UP:
                up |= 1 << i
        return cls(len(spins), up, dopant)

    @classmethod
    def from_excitations(
        cls, n: int, excited: int, dopant: Optional[int] = None
    ) -> "ChainConfig":
        """Build from a mask of excited sites (bit set = not in ground)."""
        return cls(n, cls.ground(n, dopant).up ^ excited, dopant)

    def __len__(self) -> int:
        return self.n

    def orientation(self, i: int) -> Orientation:
        self._check_index(i)
        return Orientation.UP if self.up >> i & 1 else Orientation.DOWN

    @property
    def spins(self) -> tuple[Orientation, ...]:
        return tuple(self.orientation(i) for i in range(self.n))

    def sublattice(self, i: int) -> Sublattice:
        self._check_index(i)
        if i == self.dopant:
            return Sublattice.D
        return Sublattice.A if i % 2 == 0 else Sublattice.B

    @property
    def excitations(self) -> int:
        """Bit mask of sites that differ from their ground orientation."""
        return self.up ^ ChainConfig.ground(self.n, self.dopant).up

    def is_excited(self, i: int) -> bool:
        return bool(self.excitations >> i & 1)

    def flipped(self, mask: int) -> "ChainConfig":
        return ChainConfig(self.n, self.up ^ mask, self.dopant)

    def raw(self) -> str:
        return format_config(self, "raw")

    def __str__(self) -> str:
        return self.raw()

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"site {i} out of range for N={self.n}")


@dataclass(frozen=True)
class SiteState:
    sublattice: Sublattice
    orientation: Orientation

    @property
    def excited(self) -> bool:
        return self.orientation is not GROUND[self.sublattice]


def site_state(config: ChainConfig, i: int) -> SiteState:
    return SiteState(config.sublattice(i), config.orientation(i))


def classify_site(config: ChainConfig, i: int) -> PulseClass:
    """Frequency class of site ``i``: its sublattice and neighbor sum."""
    config._check_index(i)
    m = Fraction(0)
    for j in (i - 1, i + 1):
        if 0 <= j < config.n:
            m += config.orientation(j).m
    return PulseClass(config.sublattice(i), m)


# -- bit-parallel evaluation -------------------------------------------------

def _even_mask(n: int) -> int:
    # 0b...010101 covering every even index below n
    return (4 ** ((n + 1) // 2) - 1) // 3


def _target_mask(n: int, dopant: Optional[int], target: Sublattice) -> int:
    full = (1 << n) - 1
    dmask = 0 if dopant is None else 1 << dopant
    if target is Sublattice.D:
        return dmask
    a = _even_mask(n)
    mask = a if target is Sublattice.A else full ^ a
    return mask & ~dmask


def matching_sites(config: ChainConfig, cls: PulseClass) -> int:
    """Bit mask of sites whose class under ``config`` equals ``cls``."""
    n, up = config.n, config.up
    full = (1 << n) - 1
    left_up = (up << 1) & full
    right_up = up >> 1
    ends = 1 | (1 << (n - 1))
    interior = full & ~ends
    m = cls.m
    if m == 1:
        hit = interior & left_up & right_up
    elif m == 0:
        hit = interior & (left_up ^ right_up)
    elif m == -1:
        hit = interior & ~(left_up | right_up)
    else:
        # site 0 only sees its right neighbor, site n-1 only its left
        neigh_up = (right_up & 1) | (left_up & (1 << (n - 1)))
        hit = ends & (neigh_up if m > 0 else ~neigh_up)
    return hit & _target_mask(n, config.dopant, cls.target)


def apply_pi(config: ChainConfig, cls: PulseClass) -> ChainConfig:
    """Flip every site matching ``cls``; classes are read before any flip."""
    return config.flipped(matching_sites(config, cls))


def apply_pi_reference(config: ChainConfig, cls: PulseClass) -> ChainConfig:
    spins = list(config.spins)
    out = [
        -s if classify_site(config, i) == cls else s for i, s in enumerate(spins)
    ]
    return ChainConfig.from_orientations(out, config.dopant)


def iter_matching(config: ChainConfig, cls: PulseClass) -> Iterator[int]:
    mask = matching_sites(config, cls)
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


# -- text forms --------------------------------------------------------------

_RAW = re.compile(r"^([ud]+)(?:@(\d+))?$")

_ARROWS = {
    (Sublattice.A, Orientation.UP): "↑",
    (Sublattice.A, Orientation.DOWN): "⇓",
    (Sublattice.B, Orientation.DOWN): "↓",
    (Sublattice.B, Orientation.UP): "⇑",
}


def parse_config(text: str) -> ChainConfig:
    match = _RAW.match(text.strip())
    if not match:
        bad = next((c for c in text.strip() if c not in "ud@0123456789"), None)
        detail = f"invalid character {bad!r}" if bad else "malformed annotation"
        raise ConfigParseError(f"cannot parse configuration {text!r}: {detail}")
    body, dop = match.groups()
    if len(body) < 2:
        raise ConfigParseError("configuration needs at least 2 sites")
    dopant = None if dop is None else int(dop)
    if dopant is not None and dopant >= len(body):
        raise ConfigParseError(f"dopant marker @{dopant} out of range for N={len(body)}")
    spins = [Orientation(c) for c in body]
    return ChainConfig.from_orientations(spins, dopant)


def format_config(config: ChainConfig, style: str = "raw") -> str:
    if style == "raw":
        body = "".join(config.orientation(i).value for i in range(config.n))
        return body if config.dopant is None else f"{body}@{config.dopant}"
    if style == "arrows":
        out = []
        for i in range(config.n):
            sub, o = config.sublattice(i), config.orientation(i)
            if sub is Sublattice.D:
                parity = Sublattice.A if i % 2 == 0 else Sublattice.B
                out.append(f"D({_ARROWS[parity, o]})")
            else:
                out.append(_ARROWS[sub, o])
        return "".join(out)
    raise ValueError(f"unknown style {style!r}")


def excitation_string(config: ChainConfig) -> str:
    """'X' for excited sites, '.' for ground ones."""
    exc = config.excitations
    return "".join("X" if exc >> i & 1 else "." for i in range(config.n))


def frequency_of_class(cls: PulseClass, material, field_tesla: float, dopant=None) -> float:
    """Resonance frequency in Hz addressed by ``cls``.

    Dopant classes use the separate ``dopant`` material record.
    """
    from afmqc import physics

    if cls.target is Sublattice.D:
        if dopant is None:
            raise physics.UnknownMaterialError("no dopant material given for a D-class pulse")
        return physics.resonance_frequency(dopant, field_tesla, "D", cls.m)
    return physics.resonance_frequency(material, field_tesla, cls.target.value, cls.m)
