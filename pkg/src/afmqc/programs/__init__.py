"""Pulse programs, register codec, sequence search and verification."""

from afmqc.programs.core import (
    Deviation,
    Provenance,
    Pulse,
    PulseKind,
    PulseProgram,
    ScriptParseError,
    format_script,
    load_script,
    parse_script,
    pi_program,
    reverse_program,
)
from afmqc.programs.register import (
    BlockPattern,
    BlockReading,
    BlockRole,
    DestroyedQubit,
    RegisterLayout,
    RegisterReading,
    decode_register,
    encode_register,
)
from afmqc.programs.search import (
    NotFound,
    Repair,
    SearchSpaceExceeded,
    find_sequence,
    repair_conjugated,
)
from afmqc.programs.library import (
    BUILTINS,
    builtin,
    cnot,
    cnot_extension,
    conditional_alteration,
    cu_stimulus,
    encode_one,
    encode_one_at_edge,
    encode_zero_at_edge,
    one_qubit_gate,
    reconstruct_cnot_extension,
    swap_shift,
)

__all__ = [
    "Deviation",
    "Provenance",
    "Pulse",
    "PulseKind",
    "PulseProgram",
    "ScriptParseError",
    "format_script",
    "load_script",
    "parse_script",
    "pi_program",
    "reverse_program",
    "BlockPattern",
    "BlockReading",
    "BlockRole",
    "DestroyedQubit",
    "RegisterLayout",
    "RegisterReading",
    "decode_register",
    "encode_register",
    "NotFound",
    "Repair",
    "SearchSpaceExceeded",
    "find_sequence",
    "repair_conjugated",
    "BUILTINS",
    "builtin",
    "cnot",
    "cnot_extension",
    "conditional_alteration",
    "cu_stimulus",
    "encode_one",
    "encode_one_at_edge",
    "encode_zero_at_edge",
    "one_qubit_gate",
    "reconstruct_cnot_extension",
    "swap_shift",
]
