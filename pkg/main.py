import argparse
import json
import logging
import os
import sys

from bench import bench
from config import settings, setup_logging
from errors import (InstanceError, NoFeasibleSolutionError, OracleBudgetError, PackingError,
                    SolutionValidationError)
from instance_io import FORMATS, load_instance, read_solution, write_solution
from models import utilization
from oracle import OracleBudget, exact_min_area
from parallel import run_parallel
from render import save_svgs
from search import SearchParams
from validation import validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INSTANCE = 2
EXIT_NO_FEASIBLE = 3
EXIT_VALIDATION = 4
EXIT_ORACLE_BUDGET = 5


def _rotation(variant):
    if variant is None:
        return None
    return variant == "r"


def _csv(cast):
    def parse(value):
        try:
            return [cast(part) for part in value.split(",") if part.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma separated list, got {value!r}")
    return parse


def _add_search_flags(parser):
    parser.add_argument("--variant", choices=("o", "r"), default=None,
                        help="o = fixed orientation, r = 90 degree rotation (overrides the instance file)")
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--alpha", type=float, default=settings.alpha)
    parser.add_argument("--beta", type=float, default=settings.beta)
    parser.add_argument("--mu", type=int, default=None, help="average removed nodes (default: by item count)")
    parser.add_argument("--history-length", type=int, default=None,
                        help="LAHC history length (default: by item count, scaled with the time limit)")
    parser.add_argument("--paper-strict-bin-open", "--open-without-fit-check", dest="open_without_fit_check",
                        action="store_true",
                        help="open any bin under the area limit, even one the item does not fit")
    parser.add_argument("--max-iterations", type=int, default=None)
    parser.add_argument("--backend", choices=("thread", "process"), default="thread")


def build_parser():
    parser = argparse.ArgumentParser(prog="gdrr", description="Guillotine 2D bin packing with goal-driven ruin and recreate")
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument("--no-progress", action="store_true", help="silence the JSON progress stream")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve one instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--format", choices=FORMATS, default=None)
    solve.add_argument("--time-limit", type=float, default=settings.time_limit)
    solve.add_argument("--threads", type=int, default=settings.threads)
    solve.add_argument("--out", default=None, help="solution JSON path (default: stdout)")
    solve.add_argument("--svg-dir", default=None)
    _add_search_flags(solve)

    run = commands.add_parser("bench", help="solve every instance in a directory")
    run.add_argument("--dir", required=True)
    run.add_argument("--time-limit", type=float, default=settings.time_limit)
    run.add_argument("--time-limits", type=_csv(float), default=None, help="run-time sweep, e.g. 3,30,60")
    run.add_argument("--threads", type=_csv(int), default=[settings.threads], help="thread sweep, e.g. 1,2,4")
    run.add_argument("--seeds", type=_csv(int), default=None)
    run.add_argument("--out-dir", default=settings.output_dir)
    _add_search_flags(run)

    check = commands.add_parser("validate", help="re-validate a written solution")
    check.add_argument("--instance", required=True)
    check.add_argument("--solution", required=True)
    check.add_argument("--format", choices=FORMATS, default=None)
    check.add_argument("--variant", choices=("o", "r"), default=None)

    exact = commands.add_parser("oracle", help="exact optimum of a tiny instance")
    exact.add_argument("--instance", required=True)
    exact.add_argument("--format", choices=FORMATS, default=None)
    exact.add_argument("--variant", choices=("o", "r"), default=None)
    exact.add_argument("--max-copies", type=int, default=OracleBudget().max_copies)
    exact.add_argument("--node-budget", type=int, default=OracleBudget().node_budget)
    return parser


def _search_overrides(args):
    return dict(
        alpha=args.alpha,
        beta=args.beta,
        seed=args.seed,
        open_without_fit_check=args.open_without_fit_check,
        max_iterations=args.max_iterations,
        mu=args.mu,
        history_length=args.history_length,
    )


def run_solve(args):
    instance = load_instance(args.instance, args.format, rotation_allowed=_rotation(args.variant))
    params = SearchParams.for_instance(instance, time_limit=args.time_limit,
                                       scale_history=settings.scale_history, **_search_overrides(args))
    logger.info(f"Solving {instance.name}: {len(instance.copies)} item copies, {len(instance.bins)} bin type(s), "
                f"{args.threads} worker(s), {params.time_limit}s")
    result = run_parallel(instance, params, workers=args.threads, backend=args.backend)
    best = result.best

    meta = {"params": params.model_dump(mode="json", exclude={"seed", "time_limit"}), "seed": params.seed}
    document = write_solution(best, instance, meta)
    if args.out:
        directory = os.path.dirname(args.out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(args.out, "wb") as f:
            f.write(document)
        logger.info(f"Solution written to {args.out}")
    else:
        sys.stdout.write(document.decode("utf-8") + "\n")
    if args.svg_dir:
        save_svgs(best, args.svg_dir)

    logger.info(f"{instance.name}: {len(best.patterns)} bins, total bin area {best.total_bin_area}, "
                f"utilization {utilization(best):.2f}%")
    return EXIT_OK


def run_bench(args):
    overrides = {key: value for key, value in _search_overrides(args).items() if key != "seed"}
    overrides["scale_history"] = settings.scale_history
    report = bench(
        args.dir,
        variant=args.variant,
        time_limit=args.time_limits or [args.time_limit],
        threads=args.threads,
        seeds=args.seeds or [args.seed],
        backend=args.backend,
        param_overrides=overrides,
    )
    paths = report.write(args.out_dir)
    failed = [row for row in report.rows if row.status != "ok"]
    logger.info(f"Bench finished: {len(report.rows)} run(s), {len(failed)} failed; report in {paths['report']}")
    print(report.aggregates().to_string(index=False))
    return EXIT_OK


def run_validate(args):
    instance = load_instance(args.instance, args.format, rotation_allowed=_rotation(args.variant))
    with open(args.solution, "rb") as f:
        solution = read_solution(f.read(), instance)
    report = validate(instance, solution)
    print(json.dumps({
        "ok": report.ok,
        "violations": [violation._asdict() for violation in report.violations],
    }, indent=2))
    return EXIT_OK if report.ok else EXIT_VALIDATION


def run_oracle(args):
    instance = load_instance(args.instance, args.format, rotation_allowed=_rotation(args.variant))
    budget = OracleBudget(max_copies=args.max_copies, node_budget=args.node_budget)
    result = exact_min_area(instance, budget)
    print(json.dumps({"instance": instance.name, "area": result.area, "bins": result.bins}, indent=2))
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "bench": run_bench,
    "validate": run_validate,
    "oracle": run_oracle,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, progress=settings.progress and not args.no_progress)
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, OSError) as e:
        logger.error(f"Cannot read input: {e}")
        return EXIT_INSTANCE
    except NoFeasibleSolutionError as e:
        logger.error(str(e))
        return EXIT_NO_FEASIBLE
    except SolutionValidationError as e:
        logger.error(str(e))
        return EXIT_VALIDATION
    except OracleBudgetError as e:
        logger.error(str(e))
        return EXIT_ORACLE_BUDGET
    except (PackingError, ValueError) as e:
        # malformed solution documents and out-of-range parameters
        logger.error(str(e))
        return EXIT_INSTANCE


if __name__ == "__main__":
    sys.exit(main())
