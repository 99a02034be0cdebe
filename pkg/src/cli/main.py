"""
Main CLI application for superops.

Exit codes: 0 for a true verdict or a passing suite, 1 for a false verdict
or a failing suite, 2 for malformed input or configuration, 3 when a
numerical routine fails on valid input.
"""

import argparse
import json
import logging
import math
import sys
from typing import List, Optional

import numpy as np

from superops import __version__
from superops.config import (
    SUITES,
    ComputationError,
    FastOptimizerConfig,
    OptimizerConfig,
    SuiteConfig,
    SuperopsError,
)
from superops.core import (
    AmplifiedOperator,
    OmegaUnitary,
    is_epsilon_positive,
    is_hermitian,
    is_omega_hermitian,
    is_superpositive,
    is_superunitary,
)
from superops.models import (
    GradedOperatorModel,
    NormBracketModel,
    RadiusResultModel,
    parse_model,
    parse_operator,
    parse_tensor,
    schemas,
    to_array,
)
from superops.norms import derived_matrix_norm, operator_norm, sigma_strong_norm, strong_norm
from superops.tensor import (
    dual_symmetrized_haagerup,
    haagerup_norm,
    injective_norm,
    projective_norm,
    symmetrized_haagerup,
)
from superops.utils import derive_rng
from superops.verify import run_suite

logger = logging.getLogger(__name__)

CHECK_KINDS = ("hermitian", "omega-hermitian", "eps-positive", "superpositive", "superunitary")
OPERATOR_NORMS = ("operator", "strong", "sigma", "derived")
TENSOR_NORMS = ("haagerup", "symmetrized-haagerup", "dual-symmetrized", "projective", "injective")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def create_cli_app() -> argparse.ArgumentParser:
    """Create the CLI application with argument parsing."""
    parser = argparse.ArgumentParser(
        prog="superops",
        description="superops CLI - graded operators, strong norms and tensor norms"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--schema",
        action="store_true",
        help="Print the JSON schemas of every input model and exit"
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Debug logging on stderr"
    )

    commands = parser.add_subparsers(dest="command")

    check = commands.add_parser("check", help="Decide a property of a graded operator")
    check.add_argument("kind", choices=CHECK_KINDS, help="Property to decide")
    check.add_argument("input", help="GradedOperator JSON file (or - to read from stdin)")
    check.add_argument("--tol", type=float, default=1e-9, help="Tolerance (default: 1e-9)")
    check.add_argument("--level", type=int, default=1, help="Matrix level of the input data")
    check.add_argument("--omega0", type=complex, default=1.0, help="Unitary on the even part")
    check.add_argument("--omega1", type=complex, default=-1.0, help="Unitary on the odd part")
    check.add_argument(
        "--form",
        choices=["exact", "form"],
        default="exact",
        help="Positivity test: eigenvalues (exact) or the sampled sesquilinear form"
    )
    check.add_argument("--seed", type=int, default=0, help="Seed of the form sampler")

    norm = commands.add_parser("norm", help="Compute a norm or a norm bracket")
    norm.add_argument("kind", choices=OPERATOR_NORMS + TENSOR_NORMS, help="Norm to compute")
    norm.add_argument("input", help="GradedOperator or TensorElement JSON file (or - for stdin)")
    norm.add_argument("--tol", type=float, default=1e-10, help="Numerical radius gap (default: 1e-10)")
    norm.add_argument("--level", type=int, default=1, help="Matrix level of GradedOperator data")
    norm.add_argument("--seed", type=int, default=0, help="Optimizer seed")
    norm.add_argument("--restarts", type=int, default=32, help="Optimizer restarts (default: 32)")
    norm.add_argument("--iters", type=int, default=500, help="Iterations per restart (default: 500)")
    norm.add_argument("--padding", type=int, default=0, help="Extra zero factors in decompositions")
    norm.add_argument("--no-witness", action="store_true", help="Omit witness decompositions")

    verify = commands.add_parser("verify", help="Run the seeded verification suites")
    verify.add_argument("--suite", choices=SUITES, default=None, help="Suite to run (default: all)")
    verify.add_argument("--seed", type=int, default=None, help="Seed (default: 0)")
    verify.add_argument("--samples", type=int, default=None, help="Base sample count (default: 100)")
    verify.add_argument("--tol", type=float, default=None, help="Tolerance of exact checks")
    verify.add_argument("--restarts", type=int, default=None, help="Optimizer restarts")
    verify.add_argument("--iters", type=int, default=None, help="Iterations per restart")
    verify.add_argument("--config", type=str, help="Path to JSON suite configuration file")
    verify.add_argument("--jobs", type=int, default=None, help="Properties run in parallel")
    verify.add_argument("--progress", action="store_true", help="Progress bars on stderr")

    return parser


def load_config(config_path: str) -> Optional[SuiteConfig]:
    """Load suite configuration from JSON file."""
    try:
        with open(config_path, 'r') as f:
            config_data = json.load(f)
        return SuiteConfig(**config_data)
    except Exception as e:
        print(f"Error loading config: {e}", file=sys.stderr)
        return None


def read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, 'r') as f:
        return f.read()


def _finite(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_finite(v) for v in value]
    return value


def format_output(payload: dict) -> str:
    """Format a result as JSON; non-finite numbers become null."""
    return json.dumps(_finite(payload), indent=2, sort_keys=True)


def _load_operator(text: str, level: int):
    if level == 1:
        return parse_operator(text)
    model = parse_model(GradedOperatorModel, text)
    return AmplifiedOperator(level, model.to_dim(), to_array(model.data))


def cmd_check(args) -> int:
    x = _load_operator(read_input(args.input), args.level)
    form = args.form == "form"
    rng = derive_rng(args.seed, "cli-form")
    if args.kind == "hermitian":
        verdict = is_hermitian(x, args.tol)
    elif args.kind == "omega-hermitian":
        verdict = is_omega_hermitian(x, OmegaUnitary(x.base_dim, args.omega0, args.omega1), args.tol)
    elif args.kind == "eps-positive":
        verdict = is_epsilon_positive(x, args.tol, "form" if form else "psd", rng)
    elif args.kind == "superpositive":
        verdict = is_superpositive(x, args.tol, "form" if form else "iota", rng)
    else:
        verdict = is_superunitary(x, args.tol)
    print(format_output({"check": args.kind, "result": bool(verdict), "tol": args.tol}))
    return 0 if verdict else 1


def cmd_norm(args) -> int:
    text = read_input(args.input)
    if args.kind in OPERATOR_NORMS:
        x = _load_operator(text, args.level)
        if args.kind == "operator":
            payload = {"value": operator_norm(x)}
        elif args.kind == "derived":
            payload = {"value": derived_matrix_norm(x, args.tol)}
        else:
            fn = strong_norm if args.kind == "strong" else sigma_strong_norm
            payload = RadiusResultModel.from_result(fn(x, args.tol)).model_dump()
        payload["norm"] = args.kind
        print(format_output(payload))
        return 0

    t = parse_tensor(text)
    if args.kind == "injective":
        print(format_output({"norm": args.kind, "value": injective_norm(t)}))
        return 0
    config = OptimizerConfig(restarts=args.restarts, iterations=args.iters, padding=args.padding,
                             seed=args.seed)
    fn = {
        "haagerup": haagerup_norm,
        "symmetrized-haagerup": symmetrized_haagerup,
        "dual-symmetrized": dual_symmetrized_haagerup,
        "projective": projective_norm,
    }[args.kind]
    bracket = fn(t, config)
    payload = NormBracketModel.from_bracket(bracket, with_witness=not args.no_witness).model_dump()
    payload["norm"] = args.kind
    print(format_output(payload))
    return 0


def suite_config_from(args) -> Optional[SuiteConfig]:
    """Configuration file first, then explicit flags on top."""
    config = SuiteConfig()
    if args.config:
        config = load_config(args.config)
        if config is None:
            return None
    overrides = {name: getattr(args, name) for name in ("suite", "seed", "samples", "tol", "jobs")
                 if getattr(args, name) is not None}
    optimizer = config.optimizer
    if args.restarts is not None or args.iters is not None:
        optimizer = FastOptimizerConfig(
            restarts=args.restarts if args.restarts is not None else optimizer.restarts,
            iterations=args.iters if args.iters is not None else optimizer.iterations,
            padding=optimizer.padding, seed=optimizer.seed,
            sdp_warm_start=optimizer.sdp_warm_start, dual_samples=optimizer.dual_samples,
        )
    fields = dict(suite=config.suite, seed=config.seed, samples=config.samples, tol=config.tol,
                  optimizer=optimizer, jobs=config.jobs, progress=config.progress or args.progress)
    fields.update(overrides)
    return SuiteConfig(**fields)


def cmd_verify(args) -> int:
    config = suite_config_from(args)
    if config is None:
        return 2
    results = run_suite(config)
    for result in results:
        print(result.to_json())
    failed = [r for r in results if not r.passed]
    print(json.dumps({"summary": {"suite": config.suite, "seed": config.seed, "properties": len(results),
                                  "failed": len(failed)}}, sort_keys=True))
    return 0 if not failed else 1


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = create_cli_app()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )

    if args.schema:
        print(json.dumps(schemas(), indent=2, sort_keys=True))
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    handlers = {"check": cmd_check, "norm": cmd_norm, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except (ComputationError, np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"Error: computation failed: {e}", file=sys.stderr)
        return 3
    except (SuperopsError, ValueError, OSError) as e:
        # json.JSONDecodeError and pydantic.ValidationError are ValueErrors
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
