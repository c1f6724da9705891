"""hyperflow command line.

    hyperflow eval FILE [--prior uniform|point=H|PRIOR.json] [--visible V]
    hyperflow compare SPEC IMPL [--relation equiv|refine|entropy-refine] [--explain]
    hyperflow entropy FILE [--bits]
    hyperflow loop FILE [--tol T] [--max-k K]
    hyperflow laws [--only TAG ...] [--space NAME=DECLS ...]
    hyperflow serve [--host H] [--port P]

Exit codes: 0 success or relation holds, 1 relation fails, 2 usage, parse or
runtime error. Results go to stdout, logs to stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel

from hyperflow.core.config import RunConfig, settings
from hyperflow.core.errors import HyperflowError
from hyperflow.schemas.results import (
    CatalogReportSchema, HyperSchema, LeakReportSchema, LoopReportSchema, VerdictSchema, canonical_json,
)
from hyperflow.services.programs import ProgramService

logger = logging.getLogger("hyperflow.cli")

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_ERROR = 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _space_overrides(items: Sequence[str]) -> Dict[str, str]:
    overrides = {}
    for item in items:
        name, sep, decls = item.partition("=")
        if not sep or not name:
            raise HyperflowError(f"--space expects NAME=DECLARATIONS, got '{item}'")
        overrides[name.strip()] = decls
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prior", help="uniform, point=<hidden state>, or a JSON prior file")
    common.add_argument("--visible", help="initial visible state literal (default: first domain values)")
    common.add_argument("--tol", help="loop tolerance as a rational, e.g. 1/1000000; implies iteration")
    common.add_argument("--max-k", type=int, help="loop iteration cap; implies iteration")
    common.add_argument("--loop-strategy", choices=["auto", "iterate"], help="exact solve with fallback, or iterate")
    common.add_argument("--state-limit", type=int, help="reachable-state cap for the exact loop solve")
    common.add_argument("--seed", type=int, help="prior-suite seed")
    common.add_argument("-K", "--random-priors", type=int, help="number of random priors per check")
    common.add_argument("--max-visible", type=int, help="initial visible states sampled per check")
    common.add_argument("--format", choices=["json", "text"], help="output format")
    common.add_argument("--bits", action="store_true", default=None, help="entropies in bits")
    common.add_argument("--explain", action="store_true", default=None, help="include refinement witnesses")
    common.add_argument(
        "--implicit-uniform-locals", action="store_true", default=None,
        help="scope locals start uniformly distributed instead of needing assignment",
    )
    common.add_argument("--log-level", default=None, help="stderr log level (default from settings)")

    parser = argparse.ArgumentParser(prog="hyperflow", description="Hyperdistribution semantics for leaky programs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="print the output hyper of a program")
    p.add_argument("file")
    p = sub.add_parser("compare", parents=[common], help="check equivalence or refinement of two programs")
    p.add_argument("spec")
    p.add_argument("impl")
    p.add_argument("--relation", choices=["equiv", "refine", "entropy-refine"], default="refine")
    p = sub.add_parser("entropy", parents=[common], help="leakage measures of a program")
    p.add_argument("file")
    p = sub.add_parser("loop", parents=[common], help="evaluate a while loop and report convergence")
    p.add_argument("file")
    p = sub.add_parser("laws", parents=[common], help="check the bundled law catalog")
    p.add_argument("--only", nargs="*", default=[], help="law tags to run")
    p.add_argument("--space", action="append", default=[], metavar="NAME=DECLS", help="replace a catalog space")
    p = sub.add_parser("serve", parents=[common], help="start the HTTP API")
    p.add_argument("--host", default=settings.api_host)
    p.add_argument("--port", type=int, default=settings.api_port)
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """Flags over settings. ``--max-k`` or ``--tol`` without a strategy selects iteration."""
    strategy = args.loop_strategy
    if strategy is None and (args.max_k is not None or args.tol is not None):
        strategy = "iterate"
    inputs: List[str] = [getattr(args, name) for name in ("file", "spec", "impl") if getattr(args, name, None)]
    return RunConfig.build(
        command=args.command,
        inputs=inputs,
        prior=args.prior,
        visible=args.visible,
        relation=getattr(args, "relation", None),
        loop_tol=args.tol,
        loop_max_k=args.max_k,
        loop_strategy=strategy,
        loop_state_limit=args.state_limit,
        seed=args.seed,
        random_priors=args.random_priors,
        max_visible=args.max_visible,
        implicit_uniform_locals=args.implicit_uniform_locals,
        bits=args.bits,
        format=args.format,
        explain=args.explain,
        only=getattr(args, "only", None),
        spaces=_space_overrides(getattr(args, "space", [])),
    )


def setup_logging(level: Optional[str]) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("hyperflow")
    root.handlers[:] = [handler]
    root.propagate = False
    if level:
        root.setLevel(getattr(logging, level.upper(), logging.WARNING))


# Text rendering


def _state(names: Dict[str, str]) -> str:
    return ", ".join(f"{k}={v}" for k, v in names.items()) or "-"


def _float(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:.12g}"


def _hyper_text(hyper: HyperSchema) -> List[str]:
    lines = [f"weight {hyper.weight} (deficit {hyper.deficit})"]
    for entry in hyper.entries:
        inner = "; ".join(f"{_state(p.hidden)}: {p.prob}" for p in entry.inner)
        lines.append(f"  [{_state(entry.visible)}] @ {entry.weight}  {{ {inner} }}")
    return lines


def render_text(result: BaseModel) -> str:
    if isinstance(result, HyperSchema):
        lines = _hyper_text(result)
    elif isinstance(result, VerdictSchema):
        lines = [("HOLDS: " if result.holds else "FAILS: ") + result.summary]
        if result.note:
            lines.append(f"  {result.note}")
        if result.counterexample is not None:
            lines.append("  lhs " + "\n  ".join(_hyper_text(result.counterexample.lhs)))
            lines.append("  rhs " + "\n  ".join(_hyper_text(result.counterexample.rhs)))
        if result.witness is not None:
            lines.append(f"  witness: {len(result.witness.transport)} transport cells, added mass {result.witness.added_mass}")
    elif isinstance(result, LeakReportSchema):
        unit = "bits" if result.bits else "nats"
        lines = [
            f"prior entropy      {_float(result.prior_entropy_float)} {unit}",
            f"posterior entropy  {_float(result.posterior_entropy_float)} {unit}",
            f"prior Bayes risk   {result.prior_risk}",
            f"posterior risk     {result.posterior_risk or '-'}",
            f"weight             {result.weight} (deficit {result.deficit})",
        ]
    elif isinstance(result, LoopReportSchema):
        lines = [f"{result.status} after {result.iterations} iterations, deficit {result.deficit}"]
        lines += _hyper_text(result.hyper)
    elif isinstance(result, CatalogReportSchema):
        lines = [f"{'ok  ' if law.passed else 'FAIL'} {tag}: {law.name}" for tag, law in result.laws.items()]
        lines.append("all laws pass" if result.passed else f"{len(result.failed)} laws fail")
    else:
        lines = [json.dumps(result.model_dump(mode="json"), sort_keys=True)]
    return "\n".join(lines)


def emit(result: BaseModel, fmt: str) -> None:
    sys.stdout.write((canonical_json(result) if fmt == "json" else render_text(result)) + "\n")


# Commands


def cmd_eval(service: ProgramService) -> int:
    emit(service.eval(_read(service.config.inputs[0])), service.config.format)
    return EXIT_OK


def cmd_compare(service: ProgramService) -> int:
    spec, impl = (_read(path) for path in service.config.inputs[:2])
    verdict, holds = service.compare(spec, impl)
    emit(verdict, service.config.format)
    return EXIT_OK if holds else EXIT_FAILS


def cmd_entropy(service: ProgramService) -> int:
    emit(service.entropy(_read(service.config.inputs[0])), service.config.format)
    return EXIT_OK


def cmd_loop(service: ProgramService) -> int:
    emit(service.loop(_read(service.config.inputs[0])), service.config.format)
    return EXIT_OK


def cmd_laws(service: ProgramService) -> int:
    report, passed = service.laws()
    emit(report, service.config.format)
    return EXIT_OK if passed else EXIT_FAILS


def cmd_serve(host: str, port: int) -> int:
    import uvicorn

    uvicorn.run("hyperflow.main:app", host=host, port=port)
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "compare": cmd_compare,
    "entropy": cmd_entropy,
    "loop": cmd_loop,
    "laws": cmd_laws,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        if args.command == "serve":
            return cmd_serve(args.host, args.port)
        config = run_config(args)
        logger.debug("run config: %s", config.model_dump())
        return COMMANDS[config.command](ProgramService(config))
    except (OSError, UnicodeDecodeError) as e:
        print(f"hyperflow: cannot read input: {e}", file=sys.stderr)
    except ValueError as e:
        print(f"hyperflow: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
