"""Command-line front end: solve, stress, rank, screen."""

from __future__ import annotations

import argparse
import math
import sys

from . import fixtures
from .case import CaseError, load_case
from .fuzzy import FuzzyConfigError, default_fuzzy_config, load_fuzzy_config
from .indices import line_index_records, max_lf
from .powerflow import Diverged, PowerFlowOptions, solve
from .ranking import run_ranking
from .report import emit_report
from .stress import (
    BaseInsolvableError,
    IslandedScenarioError,
    RampOptions,
    find_critical_load,
    load_contingencies,
    parse_contingency,
    screen_outages,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BASE_INSOLVABLE = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with status 2
        raise _UsageError(message)


def _add_case_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--case",
        metavar="FILE",
        help="case file (default: the packaged 5-bus study system)",
    )


def _load_case(args):
    return load_case(args.case) if args.case else fixtures.stagg5_case()


def build_parser() -> _Parser:
    parser = _Parser(prog="busrank", description="Rank load buses by proximity to voltage collapse.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="run one power flow and print the state")
    _add_case_flag(p_solve)
    p_solve.add_argument("--contingency", metavar="LABEL", default="", help='outage label, e.g. "1-2,2-3"')
    p_solve.add_argument("--tol", type=float, default=1e-6)
    p_solve.add_argument("--max-iter", type=int, default=30)
    p_solve.set_defaults(func=_cmd_solve)

    p_stress = subs.add_parser("stress", help="find one bus's critical reactive load")
    _add_case_flag(p_stress)
    p_stress.add_argument("--contingency", metavar="LABEL", default="")
    p_stress.add_argument("--bus", type=int, required=True)
    p_stress.add_argument("--coarse-step", type=float, default=0.05)
    p_stress.add_argument("--refinement-step", type=float, default=0.005)
    p_stress.add_argument("--constant-power-factor", action="store_true")
    p_stress.set_defaults(func=_cmd_stress)

    p_rank = subs.add_parser("rank", help="full ranking pipeline over a contingency list")
    _add_case_flag(p_rank)
    p_rank.add_argument(
        "--contingencies",
        metavar="FILE",
        help="contingency list file; omit for the intact network only",
    )
    p_rank.add_argument(
        "--study-contingencies",
        action="store_true",
        help="use the packaged 12-outage study list",
    )
    p_rank.add_argument("--buses", metavar="IDS", help="comma-separated bus ids (default: all load buses)")
    p_rank.add_argument("--fuzzy-config", metavar="FILE", help="membership/rule config (default: shipped)")
    p_rank.add_argument("--format", choices=("human", "csv", "json"), default="human")
    p_rank.add_argument("--output", metavar="FILE", help="write the report here instead of stdout")
    p_rank.add_argument("--lf-variant", choices=("sending-pf", "receiving-line"), default="sending-pf")
    p_rank.add_argument("--include-base", action="store_true", help="prepend the intact network to the list")
    p_rank.add_argument("--coarse-step", type=float, default=0.05)
    p_rank.add_argument("--refinement-step", type=float, default=0.005)
    p_rank.add_argument("--workers", type=int, default=1)
    p_rank.set_defaults(func=_cmd_rank)

    p_screen = subs.add_parser("screen", help="rank outages by post-outage max line index")
    _add_case_flag(p_screen)
    p_screen.add_argument("--max-order", type=int, default=2, choices=(1, 2))
    p_screen.add_argument("--top", type=int, default=20)
    p_screen.set_defaults(func=_cmd_screen)
    return parser


def _cmd_solve(args) -> int:
    case = _load_case(args)
    outages = parse_contingency(args.contingency)
    options = PowerFlowOptions(tol=args.tol, max_iter=args.max_iter)
    result = solve(case, outages=outages, options=options)
    if isinstance(result, Diverged):
        print(f"diverged: {result.reason} after {result.iterations} iterations "
              f"(last mismatch {result.last_mismatch:.3e})")
        return EXIT_BASE_INSOLVABLE
    print(f"converged in {result.iterations} iterations, max mismatch {result.max_mismatch:.3e}")
    print(f"{'bus':>4} {'V (pu)':>8} {'angle (deg)':>12}")
    for bus_id in result.bus_ids:
        print(f"{bus_id:>4} {result.v(bus_id):>8.4f} {math.degrees(result.angle(bus_id)):>12.3f}")
    return EXIT_OK


def _cmd_stress(args) -> int:
    case = _load_case(args)
    outages = parse_contingency(args.contingency)
    options = RampOptions(
        coarse_step=args.coarse_step,
        refinement_step=args.refinement_step,
        constant_power_factor=args.constant_power_factor,
    )
    result = find_critical_load(case, outages, args.bus, options)
    sol = result.solution_at_critical
    records = line_index_records(case, outages, sol)
    print(f"critical reactive load at bus {args.bus}: {result.q_critical:.3f} pu")
    print(f"{'bus':>4} {'V (pu)':>8}")
    for bus_id in sol.bus_ids:
        print(f"{bus_id:>4} {sol.v(bus_id):>8.4f}")
    print(f"max line index {max_lf(records):.3f}, max fvsi {max((r.fvsi for r in records), default=0.0):.3f}")
    return EXIT_OK


def _cmd_rank(args) -> int:
    case = _load_case(args)
    if args.contingencies and args.study_contingencies:
        raise _UsageError("--contingencies and --study-contingencies are mutually exclusive")
    if args.study_contingencies:
        contingencies = fixtures.study_contingencies()
    elif args.contingencies:
        contingencies = load_contingencies(args.contingencies)
    else:
        contingencies = []
    if args.include_base and contingencies:
        contingencies = [()] + contingencies
    if args.buses is not None:
        try:
            buses = [int(tok) for tok in args.buses.split(",") if tok.strip()]
        except ValueError:
            raise _UsageError(f"malformed bus list {args.buses!r}") from None
    else:
        buses = [b.id for b in case.load_buses()]
    config = load_fuzzy_config(args.fuzzy_config) if args.fuzzy_config else default_fuzzy_config()
    ramp = RampOptions(coarse_step=args.coarse_step, refinement_step=args.refinement_step)
    run = run_ranking(
        case,
        contingencies,
        buses,
        ramp_options=ramp,
        fuzzy_config=config,
        lf_variant=args.lf_variant,
        workers=args.workers,
    )
    text = emit_report(run, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_screen(args) -> int:
    case = _load_case(args)
    ranked = screen_outages(case, max_order=args.max_order)
    print(f"{'contingency':<16} {'max line index':>14}")
    for outages, score in ranked[: args.top]:
        label = ",".join(outages)
        shown = "insolvable" if math.isinf(score) else f"{score:.3f}"
        print(f"{label:<16} {shown:>14}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IslandedScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CaseError, FuzzyConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BaseInsolvableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BASE_INSOLVABLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
