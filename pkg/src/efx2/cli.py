"""
cli.py -- Command-line front end.

Machine-readable JSON goes to stdout, human diagnostics to stderr. Exit codes
are a stable contract:

    0  success / allocation is EFX
    1  allocation is not EFX (verify) or unexpected error
    2  parse error (unreadable file, malformed JSON, bad rational)
    3  validation error (instance or allocation invariant violated)
    4  step limit reached
    5  internal invariant failed (solver bug)
    6  instance too large for the brute-force oracle
"""

import argparse
import collections
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.markup import escape
from tqdm import tqdm

from . import codec
from .checker import Mode, brute_force_complete_efx, is_efx
from .core import load_configuration, log_event, setup_logging
from .engine import SolverSettings, solve
from .errors import EfxError, FormatError, ValidationError
from .generator import GenSpec, generate, sweep_specs
from .model import Instance, allocation_valid, validate

logger = logging.getLogger("efx2.cli")
console = Console(stderr=True, highlight=False)


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read '{path}': {e}") from None
    return codec.loads(text)


def _load_instance(path: str) -> Instance:
    instance = codec.parse_instance(_read_json(path))
    problems = validate(instance)
    if problems:
        raise ValidationError(problems)
    return instance


def _envelope(ok: bool, data: Any = None, error: Optional[str] = None) -> Dict[str, Any]:
    return {"ok": ok, "data": data, "error": error}


def _emit(document: Any) -> None:
    sys.stdout.write(codec.dumps(document))


def _note(message: str, style: str = "dim") -> None:
    console.print(f"[{style}]{escape(message)}[/]")


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot write '{path}': {e}") from None


def _write_trace(path: Optional[str], trace: List[Dict[str, Any]]) -> None:
    if not path:
        return
    _write_text(path, "".join(codec.render_trace_record(r) + "\n" for r in trace))


# ------------------------------------------------------------------------------
# COMMANDS
# ------------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, config: dict) -> int:
    instance = _load_instance(args.instance)
    settings = SolverSettings.from_config(
        config,
        max_steps=args.max_steps,
        assert_lemmas=True if args.assert_lemmas else None,
    )
    try:
        result = solve(instance, settings)
    except EfxError as exc:
        _write_trace(args.trace, getattr(exc, "trace", []))
        raise
    _write_trace(args.trace, result.trace)

    report = is_efx(instance, result.allocation, Mode.RAW)
    _emit(codec.render_allocation(result.allocation))
    if not report.ok:
        _note(f"allocation is not EFX: {report.witness.as_dict()}", "red")
        return 1
    _note(f"certified EFX in {result.steps} steps {result.cases}", "green")
    return 0


def cmd_verify(args: argparse.Namespace, config: dict) -> int:
    instance = _load_instance(args.instance)
    alloc, declared_pool = codec.parse_allocation(_read_json(args.allocation), instance.m)
    problems = allocation_valid(instance, alloc)
    if not problems and declared_pool != alloc.pool:
        problems.append("declared pool does not match unallocated items")
    if problems:
        raise ValidationError(problems)

    mode = Mode(args.mode)
    report = is_efx(instance, alloc, mode)
    witness = report.witness.as_dict() if report.witness else None
    data = {
        "mode": mode.value,
        "efx": report.ok,
        "complete": alloc.is_complete,
        "witness": witness,
    }
    _emit(_envelope(report.ok, data, None if report.ok else "allocation is not EFX"))
    if not report.ok:
        _note(
            f"agent {witness['envier']} EFX-envies agent {witness['envied']} "
            f"after removing item {witness['removed']}",
            "red",
        )
        return 1
    return 0


def cmd_oracle(args: argparse.Namespace, config: dict) -> int:
    instance = _load_instance(args.instance)
    oracle_cfg = config.get("oracle", {})
    results = brute_force_complete_efx(
        instance,
        Mode(args.mode),
        first_only=args.first,
        cap=args.cap if args.cap is not None else int(oracle_cfg.get("cap", 10**7)),
        include_partial=args.partial,
        partial_cap=int(oracle_cfg.get("partial_cap", 10**5)),
    )
    _emit(
        _envelope(
            True,
            {
                "count": len(results),
                "allocations": [codec.render_allocation(a) for a in results],
            },
        )
    )
    return 0


_GEN_FLAGS = ("n_alpha", "n_beta", "m", "dist", "lo", "hi", "den_max", "rho", "seed")


def cmd_gen(args: argparse.Namespace, config: dict) -> int:
    fields = dict(config.get("generator", {}))
    if args.spec:
        payload = _read_json(args.spec)
        if not isinstance(payload, dict):
            raise FormatError("generator spec must be a JSON object")
        fields.update(payload)
    fields.update(
        {key: getattr(args, key) for key in _GEN_FLAGS if getattr(args, key) is not None}
    )
    instance = generate(GenSpec.from_dict(fields))
    text = codec.dumps(codec.render_instance(instance))
    if args.out:
        _write_text(args.out, text)
        _note(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_trace(args: argparse.Namespace, config: dict) -> int:
    try:
        lines = Path(args.trace_file).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise FormatError(f"cannot read '{args.trace_file}': {e}") from None
    records = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        record = codec.loads(line)
        if not isinstance(record, dict):
            raise FormatError(f"trace line {number} is not a JSON object")
        records.append(record)
    cases = collections.Counter(r.get("case") for r in records)
    last = records[-1] if records else {}
    _emit(
        _envelope(
            True,
            {
                "steps": len(records),
                "cases": dict(sorted(cases.items())),
                "final_potential": last.get("potential"),
                "final_pool": last.get("pool"),
            },
        )
    )
    return 0


def cmd_sweep(args: argparse.Namespace, config: dict) -> int:
    sweep_cfg = config.get("sweep", {})
    count = args.count if args.count is not None else int(sweep_cfg.get("count", 500))
    seed = args.seed if args.seed is not None else int(sweep_cfg.get("seed", 0))
    settings = SolverSettings.from_config(config, assert_lemmas=True)

    cases: collections.Counter = collections.Counter()
    failures = []
    specs = sweep_specs(count, seed)
    for spec in tqdm(specs, total=count, file=sys.stderr, disable=args.quiet, desc="sweep"):
        instance = generate(spec)
        try:
            result = solve(instance, settings)
        except EfxError as exc:
            failures.append({"spec": spec.to_dict(), "error": str(exc)})
            continue
        if not is_efx(instance, result.allocation, Mode.RAW).ok:
            failures.append({"spec": spec.to_dict(), "error": "not EFX"})
            continue
        cases.update(result.cases)

    log_event("sweep_finished", runs=count, failures=len(failures))
    ok = not failures
    _emit(
        _envelope(
            ok,
            {
                "runs": count,
                "passed": count - len(failures),
                "cases": dict(sorted(cases.items())),
                "failures": failures,
            },
            None if ok else f"{len(failures)} runs failed",
        )
    )
    return 0 if ok else 5


# ------------------------------------------------------------------------------
# MAIN EXECUTION BLOCK
# ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efx2",
        description="Complete EFX allocations for agents of two additive valuation types.",
    )
    parser.add_argument("--config", metavar="PATH", help="YAML config file to merge over defaults.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="Compute a complete EFX allocation.")
    p.add_argument("instance", help="Instance JSON file.")
    p.add_argument("--trace", metavar="PATH", help="Write the run trace as JSON lines.")
    p.add_argument("--assert-lemmas", action="store_true", help="Check every theorem-guaranteed invariant.")
    p.add_argument("--max-steps", type=int, metavar="N", help="Abort after N improvement steps.")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", help="Check an allocation for EFX.")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.RAW.value)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("oracle", help="Enumerate EFX allocations by brute force.")
    p.add_argument("instance")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--all", dest="first", action="store_false", help="Print every EFX allocation (default).")
    which.add_argument("--first", dest="first", action="store_true", help="Stop at the first EFX allocation.")
    p.add_argument("--cap", type=int, metavar="N", help="Maximum number of assignments to enumerate.")
    p.add_argument("--partial", action="store_true", help="Also enumerate allocations that leave items pooled.")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.RAW.value)
    p.set_defaults(handler=cmd_oracle, first=False)

    p = sub.add_parser("gen", help="Generate a seeded random instance.")
    p.add_argument("--spec", metavar="PATH", help="Generator spec as JSON.")
    p.add_argument("--n-alpha", dest="n_alpha", type=int)
    p.add_argument("--n-beta", dest="n_beta", type=int)
    p.add_argument("-m", type=int, help="Number of items.")
    p.add_argument("--dist", choices=["uniform_int", "uniform_rational", "correlated"])
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)
    p.add_argument("--den-max", dest="den_max", type=int)
    p.add_argument("--rho", help="Correlation weight as p/q or decimal.")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH", help="Write the instance here instead of stdout.")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("trace", help="Summarize a JSON-lines run trace.")
    p.add_argument("trace_file")
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("sweep", help="Solve and certify a batch of generated instances.")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--quiet", action="store_true", help="Hide the progress bar.")
    p.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch to a command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    config = load_configuration(args.config)
    setup_logging(config)
    logger.info("command %s", args.command)

    try:
        return args.handler(args, config)
    except ValidationError as exc:
        for problem in exc.problems:
            _note(problem, "red")
        logger.warning("validation failed: %s", exc)
        return exc.exit_code
    except EfxError as exc:
        _note(str(exc), "red")
        logger.warning("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except Exception as e:
        error_msg = f"unhandled error in main execution: {e}"
        logger.critical(error_msg, exc_info=True)
        traceback.print_exc()
        _emit(_envelope(False, None, error_msg))
        return 1


if __name__ == "__main__":
    sys.exit(main())
