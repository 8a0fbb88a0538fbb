"""Register layout and the qubit block codec.

Blocks are recognised in the excitation view ('X' = site out of its
ground orientation). A logical "0" is ``XX..`` and a "1" is ``..XX``.
The same excitation pattern starting on a B-site is the reversed form
that appears while a block is in transit. The control unit is
``XX..XX`` and its altered form is ``XXXXXX``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from afmqc.chain import ChainConfig, Sublattice, excitation_string, format_config


class BlockRole(enum.Enum):
    ZERO = "Zero"
    ONE = "One"
    ZERO_REVERSED = "ZeroReversed"
    ONE_REVERSED = "OneReversed"
    CONTROL_UNIT = "ControlUnit"
    CONTROL_UNIT_ALTERED = "ControlUnitAltered"
    GROUND = "Ground"


@dataclass(frozen=True)
class BlockPattern:
    role: BlockRole
    excitation: str
    start: Optional[Sublattice]  # None: pattern valid on either parity

    def physical(self, start: Sublattice = Sublattice.A) -> str:
        """Raw u/d template when the block begins on ``start``."""
        s = self.start or start
        out = []
        for i, x in enumerate(self.excitation):
            on_a = (i % 2 == 0) == (s is Sublattice.A)
            ground = "u" if on_a else "d"
            out.append(ground if x == "." else ("d" if ground == "u" else "u"))
        return "".join(out)


ZERO = BlockPattern(BlockRole.ZERO, "XX..", Sublattice.A)
ONE = BlockPattern(BlockRole.ONE, "..XX", Sublattice.A)
ZERO_REVERSED = BlockPattern(BlockRole.ZERO_REVERSED, "..XX", Sublattice.B)
ONE_REVERSED = BlockPattern(BlockRole.ONE_REVERSED, "XX..", Sublattice.B)
CONTROL_UNIT = BlockPattern(BlockRole.CONTROL_UNIT, "XX..XX", None)
CONTROL_UNIT_ALTERED = BlockPattern(BlockRole.CONTROL_UNIT_ALTERED, "XXXXXX", None)

QUBIT_PATTERNS = (ZERO, ONE, ZERO_REVERSED, ONE_REVERSED)
CU_PATTERNS = (CONTROL_UNIT, CONTROL_UNIT_ALTERED)

# logical value carried by each qubit role
LOGICAL = {
    BlockRole.ZERO: 0,
    BlockRole.ONE: 1,
    BlockRole.ONE_REVERSED: 0,
    BlockRole.ZERO_REVERSED: 1,
}


class DestroyedQubit(ValueError):
    """A block position holds a pattern that is no valid block."""

    def __init__(self, position: int, pattern: str):
        super().__init__(f"unrecognised block at site {position}: {pattern!r}")
        self.position = position
        self.pattern = pattern


@dataclass(frozen=True)
class RegisterLayout:
    """Placement of qubit blocks and the control unit along the chain.

    Qubit ``j`` starts at ``offset + j * (qubit_cells + spacer_cells)``.
    The control unit sits to the right of the last qubit, separated from
    it by ``cu_spacer`` ground cells, and moves leftwards under SWAP
    pulses while the qubits move rightwards.
    """

    qubit_count: int
    cu_present: bool = True
    cu_spacer: int = 3
    spacer_cells: int = 4
    offset: int = 0
    n: Optional[int] = None

    qubit_cells = 4
    cu_cells = 6

    def __post_init__(self):
        if self.qubit_count < 0:
            raise ValueError("qubit_count must be >= 0")
        if self.cu_spacer < 1 or self.cu_spacer % 2 == 0:
            raise ValueError(f"CU spacer must be a positive odd count, got {self.cu_spacer}")
        if self.spacer_cells < 0 or self.spacer_cells % 2:
            raise ValueError("qubit spacer must be an even count")
        if self.offset < 0 or self.offset % 2:
            raise ValueError("offset must be even so qubits start on A-sites")
        if self.n is not None and self.n < self.min_length:
            raise ValueError(f"chain of {self.n} cells too short, need {self.min_length}")

    @property
    def period(self) -> int:
        return self.qubit_cells + self.spacer_cells

    def qubit_start(self, j: int, shift: int = 0) -> int:
        return self.offset + j * self.period + shift

    def cu_start(self, shift: int = 0) -> int:
        if not self.cu_present:
            raise ValueError("layout has no control unit")
        if self.qubit_count == 0:
            return self.offset + self.cu_spacer - shift
        last_end = self.qubit_start(self.qubit_count - 1) + self.qubit_cells
        return last_end + self.cu_spacer - shift

    @property
    def min_length(self) -> int:
        end = self.offset + self.qubit_count * self.period
        if self.cu_present:
            # one ground cell past the CU; with the CU flush against the
            # right end the first SWAP pulses see an end site and misfire
            end = max(end, self.cu_start() + self.cu_cells + 1)
        return max(end, 2)

    @property
    def length(self) -> int:
        return self.n if self.n is not None else self.min_length

    def mid_stage(self, k: int = 0) -> int:
        """SWAP pulses that bring the CU mid-way through the k-th qubit from it.

        Counted from the CU side, so ``k = 0`` is the rightmost qubit.
        """
        if not 0 <= k < self.qubit_count:
            raise ValueError(f"qubit {k} out of range")
        distance = (k + 1) * self.period - self.spacer_cells + self.cu_spacer
        half = (distance - 1) // 2
        return half if half % 2 == 1 else half + 2

    def qubit_index(self, k: int) -> int:
        """Left-to-right index of the k-th qubit counted from the CU."""
        return self.qubit_count - 1 - k


def encode_register(bits: Sequence[int], layout: RegisterLayout) -> ChainConfig:
    if len(bits) != layout.qubit_count:
        raise ValueError(f"{len(bits)} bits for a {layout.qubit_count}-qubit layout")
    n = layout.length
    excited = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit {b!r} is not 0 or 1")
        pattern = ONE if b else ZERO
        excited |= _place(pattern.excitation, layout.qubit_start(j))
    if layout.cu_present:
        excited |= _place(CONTROL_UNIT.excitation, layout.cu_start())
    return ChainConfig.from_excitations(n, excited)


def _place(pattern: str, start: int) -> int:
    mask = 0
    for i, x in enumerate(pattern):
        if x == "X":
            mask |= 1 << (start + i)
    return mask


@dataclass(frozen=True)
class BlockReading:
    role: BlockRole
    start: int

    @property
    def value(self) -> Optional[int]:
        return LOGICAL.get(self.role)

    @property
    def settled(self) -> bool:
        return self.role in (BlockRole.ZERO, BlockRole.ONE)


@dataclass(frozen=True)
class RegisterReading:
    qubits: tuple[BlockReading, ...]
    cu: Optional[BlockReading]

    @property
    def bits(self) -> tuple[Optional[int], ...]:
        return tuple(b.value for b in self.qubits)

    @property
    def cu_status(self) -> str:
        if self.cu is None or self.cu.role is BlockRole.GROUND:
            return "absent"
        return "altered" if self.cu.role is BlockRole.CONTROL_UNIT_ALTERED else "intact"


def read_window(config: ChainConfig, start: int, length: int) -> str:
    if start < 0 or start + length > config.n:
        raise ValueError(f"window [{start}, {start + length}) leaves the chain")
    return excitation_string(config)[start:start + length]


def _match_qubit(window: str, start: int) -> Optional[BlockRole]:
    if window == "....":
        return BlockRole.GROUND
    parity = Sublattice.A if start % 2 == 0 else Sublattice.B
    for p in QUBIT_PATTERNS:
        if p.excitation == window and p.start is parity:
            return p.role
    return None


def _match_cu(window: str) -> Optional[BlockRole]:
    if window == "......":
        return BlockRole.GROUND
    for p in CU_PATTERNS:
        if p.excitation == window:
            return p.role
    return None


def decode_register(config: ChainConfig, layout: RegisterLayout, shift: int = 0) -> RegisterReading:
    """Read every block of ``layout`` after ``shift`` SWAP pulses.

    Raises :class:`DestroyedQubit` for any unrecognised block or any
    excitation outside the block windows, and ``ValueError`` when the
    windows overlap at this shift (a block is mid-passage).
    """
    windows = [(layout.qubit_start(j, shift), layout.qubit_cells) for j in range(layout.qubit_count)]
    if layout.cu_present:
        windows.append((layout.cu_start(shift), layout.cu_cells))
    ordered = sorted(windows)
    for (s0, l0), (s1, _) in zip(ordered, ordered[1:]):
        if s0 + l0 > s1:
            raise ValueError(f"blocks overlap after {shift} pulses")
    covered = 0
    qubits = []
    for j in range(layout.qubit_count):
        start = layout.qubit_start(j, shift)
        window = read_window(config, start, layout.qubit_cells)
        role = _match_qubit(window, start)
        if role is None:
            raise DestroyedQubit(start, window)
        qubits.append(BlockReading(role, start))
        covered |= _place("X" * layout.qubit_cells, start)
    cu = None
    if layout.cu_present:
        start = layout.cu_start(shift)
        window = read_window(config, start, layout.cu_cells)
        role = _match_cu(window)
        if role is None:
            raise DestroyedQubit(start, window)
        cu = BlockReading(role, start)
        covered |= _place("X" * layout.cu_cells, start)
    stray = config.excitations & ~covered
    if stray:
        pos = (stray & -stray).bit_length() - 1
        raise DestroyedQubit(pos, excitation_string(config)[pos:pos + 4])
    return RegisterReading(tuple(qubits), cu)


def describe(config: ChainConfig) -> str:
    return f"{format_config(config)}  {excitation_string(config)}"
