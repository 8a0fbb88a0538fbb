"""Command-line front end.

Exit codes: 0 ok, 1 not found or verification failure, 2 usage or parse
error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from afmqc import physics
from afmqc.chain import ChainConfig, ConfigParseError, PulseClass, format_config, parse_config
from afmqc.programs.core import PulseProgram, ScriptParseError, format_script, load_script
from afmqc.programs.library import BUILTINS, builtin
from afmqc.programs.register import DestroyedQubit, RegisterLayout, decode_register, encode_register
from afmqc.programs.search import NotFound, SearchSpaceExceeded, find_sequence
from afmqc.programs.verify import SUITES, reports_json, run_suite
from afmqc.state import DEFAULT_MAX_TERMS, SparseQuantumState, TermCapExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--arrows", action="store_true", default=d(False), help="render states in arrow notation")
    p.add_argument("--trace", choices=("none", "steps", "full"), default=d("none"))
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized suites")
    p.add_argument("--max-terms", type=int, default=d(DEFAULT_MAX_TERMS), help="cap on superposition terms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afmqc", description=__doc__.splitlines()[0])
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a pulse program on a configuration")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--init", help="raw configuration, e.g. udududud")
    src.add_argument("--init-file", help="file holding a raw configuration or a state dump")
    src.add_argument("--layout", help="register spec, e.g. bits=101,cu=1,offset=4")
    src.add_argument("--ground", type=int, metavar="N", help="ground chain of N sites")
    run.add_argument("--program", required=True, help=f"script path or built-in ({', '.join(sorted(BUILTINS))})")
    run.add_argument("--dump", help="write the final state in dump format")
    run.add_argument("--export", action="store_true", help="print the program as a script and exit")

    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES) + ["all"])
    ver.add_argument("--json", help="also write a structured report here")

    sea = sub.add_parser("search", parents=[common], help="shortest pi-pulse program between configurations")
    sea.add_argument("--start", required=True)
    sea.add_argument("--goal", required=True)
    sea.add_argument("--max-len", type=int, required=True)
    sea.add_argument("--allow", action="append", metavar="T,m", help="restrict to these classes (repeatable)")
    sea.add_argument("--node-cap", type=int, default=10_000_000)
    sea.add_argument("--output", help="write the script here instead of stdout")

    phy = sub.add_parser("physics", parents=[common], help="evaluate a design formula")
    phy.add_argument("material")
    phy.add_argument(
        "quantity",
        choices=("freq", "bmin", "tns", "tni", "P", "P_asym", "magnetization", "t2", "polarization"),
    )
    phy.add_argument("--field", type=float, default=3.5, help="tesla")
    phy.add_argument("--temperature", type=float, default=1e-3, help="kelvin")
    phy.add_argument("--sublattice", default="A")
    phy.add_argument("--m", default="0")
    phy.add_argument("--In", type=float, default=None, help="override the indirect coupling (J)")
    phy.add_argument("--eps0", type=float, default=0.1, help="spin-wave gap in units of J when J_A is unknown")
    phy.add_argument("--d", type=int, default=None, help="override the dimension")
    phy.add_argument("--N", type=float, default=1.0, help="spin count for magnetization")
    phy.add_argument("--sweep", help="VAR:START:STOP:COUNT with VAR in {T, B}; T is log-spaced")

    enc = sub.add_parser("encode", parents=[common], help="build or read a register configuration")
    enc.add_argument("--bits", default="", help="e.g. 101")
    enc.add_argument("--no-cu", action="store_true")
    enc.add_argument("--cu-spacer", type=int, default=3)
    enc.add_argument("--offset", type=int, default=0)
    enc.add_argument("--n", type=int, default=None)
    enc.add_argument("--decode", metavar="RAW", help="decode this configuration with the layout instead")
    enc.add_argument("--shift", type=int, default=0, help="SWAP pulses applied before decoding")
    return parser


# -- helpers -------------------------------------------------------------------

def _render_config(config: ChainConfig, arrows: bool) -> str:
    return format_config(config, "arrows" if arrows else "raw")


def render_state(state: SparseQuantumState, arrows: bool) -> str:
    items = state.sorted_items()
    if len(items) == 1 and abs(items[0][1] - 1) < 1e-12:
        return _render_config(items[0][0], arrows)
    return " + ".join(f"({a.real:.6g}{a.imag:+.6g}j)|{_render_config(c, arrows)}>" for c, a in items)


def _parse_layout(spec: str) -> tuple[list[int], RegisterLayout]:
    fields = dict(part.split("=", 1) for part in spec.split(",") if part)
    try:
        bits = [int(ch) for ch in fields.pop("bits", "")]
        layout = RegisterLayout(
            len(bits),
            cu_present=fields.pop("cu", "1") not in ("0", "no", "false"),
            cu_spacer=int(fields.pop("cu_spacer", 3)),
            offset=int(fields.pop("offset", 0)),
            n=int(fields["n"]) if "n" in fields else None,
        )
        fields.pop("n", None)
    except ValueError as exc:
        raise UsageError(f"bad layout {spec!r}: {exc}") from None
    if fields:
        raise UsageError(f"unknown layout keys: {', '.join(fields)}")
    return bits, layout


def _initial_state(args) -> SparseQuantumState:
    kw = dict(max_terms=args.max_terms)
    if args.init is not None:
        return SparseQuantumState.from_basis(parse_config(args.init), **kw)
    if args.ground is not None:
        return SparseQuantumState.from_basis(ChainConfig.ground(args.ground), **kw)
    if args.layout is not None:
        bits, layout = _parse_layout(args.layout)
        return SparseQuantumState.from_basis(encode_register(bits, layout), **kw)
    text = Path(args.init_file).read_text(encoding="utf-8")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(body) == 1 and len(body[0].split()) == 1:
        return SparseQuantumState.from_basis(parse_config(body[0]), **kw)
    return SparseQuantumState.load(text, **kw)


def _program(name: str) -> PulseProgram:
    if name in BUILTINS:
        return builtin(name)
    path = Path(name)
    if not path.exists():
        raise UsageError(f"no built-in or file named {name!r}")
    return load_script(path)


# -- commands --------------------------------------------------------------------

def cmd_run(args, out) -> int:
    program = _program(args.program)
    if args.export:
        out.write(format_script(program))
        return EXIT_OK
    if all(v is None for v in (args.init, args.init_file, args.layout, args.ground)):
        raise UsageError("one of --init, --init-file, --layout or --ground is required")
    state = _initial_state(args)
    trace = args.trace

    def emit(k, label, st):
        out.write(f"step {k} {label} {render_state(st, args.arrows)}\n")
        if trace == "full":
            for config, amp in st.sorted_items():
                out.write(f"    {format_config(config)} {amp.real:.17g} {amp.imag:.17g}\n")

    if trace != "none":
        emit(0, "start", state)
    state = program.run(state, observer=(lambda k, p, st: emit(k, p, st)) if trace != "none" else None)
    if trace == "none":
        out.write(render_state(state, args.arrows) + "\n")
    if args.dump:
        Path(args.dump).write_text(state.dump(), encoding="utf-8")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    reports = run_suite(args.suite, seed=args.seed)
    for r in reports:
        out.write(r.text() + "\n")
    failed = sum(not r.passed for r in reports)
    out.write(f"{len(reports) - failed}/{len(reports)} reports passed\n")
    if args.json:
        Path(args.json).write_text(reports_json(reports), encoding="utf-8")
    return EXIT_FAIL if failed else EXIT_OK


def _parse_class_arg(text: str) -> PulseClass:
    target, _, m = text.replace(" ", "").partition(",")
    try:
        return PulseClass.of(target.upper(), m)
    except ValueError as exc:
        raise UsageError(f"bad class {text!r}: {exc}") from None


def cmd_search(args, out) -> int:
    start, goal = parse_config(args.start), parse_config(args.goal)
    allowed = [_parse_class_arg(a) for a in args.allow] if args.allow else None
    try:
        program = find_sequence(start, goal, args.max_len, allowed, node_cap=args.node_cap)
    except NotFound as exc:
        out.write(f"# not found: {exc}\n")
        return EXIT_FAIL
    text = format_script(program)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _sweep(spec: Optional[str]):
    if not spec:
        return None, [None]
    try:
        var, lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"bad sweep {spec!r}, expected VAR:START:STOP:COUNT") from None
    if var == "T":
        return var, list(np.geomspace(lo, hi, count))
    if var == "B":
        return var, list(np.linspace(lo, hi, count))
    raise UsageError(f"sweep variable must be T or B, got {var!r}")


def cmd_physics(args, out) -> int:
    mat = physics.material(args.material)
    if args.In is not None:
        mat = mat.with_(I_n=args.In)
    var, values = _sweep(args.sweep)

    def model():
        eps0 = None
        if mat.J_A is None or mat.Z is None:
            eps0 = args.eps0 * mat.need("J_ex")
        return physics.SpinWaveModel(mat, epsilon0=eps0, d=args.d)

    def evaluate(B: float, T: float):
        q = args.quantity
        if q == "freq":
            return physics.resonance_frequency(mat, B, args.sublattice, args.m)
        if q == "bmin":
            return physics.b_min(mat)
        if q == "tns":
            return physics.critical_temperatures(mat)[0]
        if q == "tni":
            return physics.critical_temperatures(mat)[1]
        if q == "P":
            return physics.thermal_fluctuation_P(model(), T, "integral")
        if q == "P_asym":
            return physics.thermal_fluctuation_P(model(), T, "asymptotic")
        if q == "magnetization":
            return physics.sublattice_magnetization(model(), T, args.N)
        if q == "t2":
            est = physics.t2_decoherence(model(), T)
            return est.T2 if est.T2 is not None else float("inf")
        if q == "polarization":
            pol = physics.polarization_check(mat, B, T, args.sublattice, args.m)
            return f"{pol.ratio:.10g}\t{pol.excited_fraction:.10g}"
        raise UsageError(q)

    for v in values:
        B = v if var == "B" else args.field
        T = v if var == "T" else args.temperature
        value = evaluate(B, T)
        cell = value if isinstance(value, str) else f"{value:.10g}"
        if var is None:
            out.write(f"{args.quantity}\t{cell}\n")
        else:
            out.write(f"{v:.10g}\t{cell}\n")
    return EXIT_OK


def cmd_encode(args, out) -> int:
    try:
        bits = [int(ch) for ch in args.bits]
        layout = RegisterLayout(
            len(bits), cu_present=not args.no_cu, cu_spacer=args.cu_spacer, offset=args.offset, n=args.n
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.decode:
        config = parse_config(args.decode)
        try:
            reading = decode_register(config, layout, shift=args.shift)
        except DestroyedQubit as exc:
            out.write(f"destroyed at site {exc.position}: {exc.pattern}\n")
            return EXIT_FAIL
        for r in reading.qubits:
            val = "-" if r.value is None else r.value
            out.write(f"qubit\t{r.start}\t{r.role.value}\t{val}\n")
        out.write(f"cu\t{reading.cu_status}\n")
        return EXIT_OK
    out.write(_render_config(encode_register(bits, layout), args.arrows) + "\n")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "search": cmd_search,
    "physics": cmd_physics,
    "encode": cmd_encode,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (ScriptParseError, ConfigParseError, UsageError, physics.UnknownMaterialError,
            physics.MissingParameter, FileNotFoundError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (TermCapExceeded, SearchSpaceExceeded) as exc:
        err.write(f"resource limit: {exc}\n")
        return EXIT_RESOURCE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
