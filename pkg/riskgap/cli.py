"""
riskgap CLI - Command-line interface for property tests, bounds, selection,
synthetic data, validation runs and figure data

Exit codes: 0 ok, 1 usage or I/O error, 2 property test failed, 3 manifold
search ran out of its expansion budget.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from riskgap.bound_calc import AlphaProblem, alpha_max, cluster_bounds, manifold_bounds
from riskgap.cluster_pipeline import cluster_property_test
from riskgap.exceptions import InvalidInputError, ResourceExhaustedError, RiskGapError
from riskgap.grid import GridSpec, occupied_cells
from riskgap.manifold_pipeline import manifold_property_test
from riskgap.records import (
    build_alpha_record,
    build_selection_record,
    cluster_record,
    manifold_record,
    model_record,
)
from riskgap.report_generator import ReportGenerator
from riskgap.settings import Settings, load_registry, load_scenario, load_settings
from riskgap.synthgen import WORLD_FACTORIES, build_world, make_rng, read_points_csv, write_points_csv
from riskgap.theorem_engine import FIGURE_KINDS, emit_figures, evaluate_registry, lowest_bound, run_theorem, validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TEST_FAILED = 2
EXIT_EXHAUSTED = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument('--out', help='Write the record to this file instead of stdout')
    p.add_argument('--format', default='json', choices=['json', 'csv'],
                   help='Record format when --out is given (default: json)')
    p.add_argument('--summary', action='store_true', help='Print summary to stderr')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog='riskgap',
        description='riskgap - Property tests, risk bounds and validation for representation learning',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m riskgap.cli cluster-test --input points.csv --dim 2 --cells 10
  python -m riskgap.cli bounds cluster --dim 2 --cells 10 --k 2 --m-u 100000 --m-l 100 --delta 0.05 --beta 0.2
  python -m riskgap.cli alpha --k 10 --delta 0.05 --m-l 100
  python -m riskgap.cli synth --world two_blob --m 5000 --seed 1 --labeled --out data/train.csv
  python -m riskgap.cli validate --scenario config/scenarios/ring_and_disc.yaml --trials 200 --workers 4
  python -m riskgap.cli figures --which all --out figures/
        """
    )
    parser.add_argument('--config', help='Settings file (default: $RISKGAP_CONFIG or config/config.yaml)')
    parser.add_argument('--verbose', action='store_true', help='Log at DEBUG level')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('cluster-test', help='Test a sample for cluster structure')
    p.add_argument('--input', required=True, help='CSV of points with header x1..xn')
    p.add_argument('--dim', type=int, required=True, help='Input dimension n')
    p.add_argument('--cells', type=int, required=True, help='Cells per axis q (cell side s = 1/q)')
    _add_output(p)

    p = sub.add_parser('manifold-test', help='Test a sample for a one-dimensional curve')
    p.add_argument('--input', required=True, help='CSV of points with header x1..xn')
    p.add_argument('--dim', type=int, required=True, help='Input dimension n')
    p.add_argument('--cells', type=int, required=True, help='Cells per axis q')
    p.add_argument('--gamma', type=float, required=True, help='Curve length budget')
    p.add_argument('--max-expansions', type=int, help='DFS node expansion cap')
    p.add_argument('--strict-self-intersection', action='store_true',
                   help='Reject a revisit at any lag, not only lags of at least n')
    _add_output(p)

    p = sub.add_parser('bounds', help='Evaluate the theorem bounds without sampling')
    bounds = p.add_subparsers(dest='example', required=True, parser_class=_Parser)
    b = bounds.add_parser('cluster', help='Cluster example: eps_max_Z, eps_min and the gap bound')
    b.add_argument('--dim', type=int, required=True)
    b.add_argument('--cells', type=int, required=True)
    b.add_argument('--k', type=int, required=True, help='Number of regions')
    b.add_argument('--m-u', type=int, required=True)
    b.add_argument('--m-l', type=int, required=True)
    b.add_argument('--delta', type=float, required=True)
    b.add_argument('--beta', type=float, help='Assumed beta; omit for eps_max_Z only')
    b.add_argument('--beta-sample-size', type=int, help='Sample size beta was measured on (default: m_u)')
    b.add_argument('--eps-E', type=float, help='Assumed label balance threshold (echoed)')
    _add_output(b)
    b = bounds.add_parser('manifold', help='Manifold example: eps_max_Z and the radius r')
    b.add_argument('--dim', type=int, required=True)
    b.add_argument('--cells', type=int, required=True)
    b.add_argument('--gamma', type=float, required=True, help='Curve length budget')
    b.add_argument('--j', type=int, required=True)
    b.add_argument('--m-u', type=int, required=True)
    b.add_argument('--m-l', type=int, required=True)
    b.add_argument('--delta', type=float, required=True)
    b.add_argument('--eps-B', type=float, required=True)
    b.add_argument('--input', help='Unlabeled sample CSV; when given, r is computed from its cell counts')
    _add_output(b)

    p = sub.add_parser('alpha', help='Empty-bin mass cap alpha and its maximizer')
    p.add_argument('--k', type=float, required=True, help='Number of bins')
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--m-l', type=int, required=True)
    _add_output(p)

    p = sub.add_parser('select', help='Pick the feature learner with the smallest risk bound')
    p.add_argument('--registry', required=True, help='YAML or JSON registry file')
    p.add_argument('--input', required=True, help='Unlabeled sample CSV')
    p.add_argument('--dim', type=int, required=True)
    p.add_argument('--h-l', default='erm_linear', help='Hypothesis learner id (default: erm_linear)')
    p.add_argument('--m-l', type=int, required=True)
    p.add_argument('--delta', type=float, required=True)
    _add_output(p)

    p = sub.add_parser('synth', help='Sample a synthetic world to CSV')
    p.add_argument('--world', required=True, choices=sorted(WORLD_FACTORIES))
    p.add_argument('--param', action='append', default=[], metavar='KEY=VALUE',
                   help='World factory parameter (repeatable)')
    p.add_argument('--m', type=int, required=True, help='Number of points')
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--labeled', action='store_true', help='Write the y column')
    p.add_argument('--out', required=True, help='Output CSV path')

    p = sub.add_parser('theorem', help='Run one scenario end to end and report its bounds')
    p.add_argument('--scenario', required=True, help='Scenario YAML')
    p.add_argument('--seed', type=int, help='Override the scenario seed')
    _add_output(p)

    p = sub.add_parser('validate', help='Check the bounds over many seeded trials')
    p.add_argument('--scenario', required=True, help='Scenario YAML')
    p.add_argument('--trials', type=int, required=True)
    p.add_argument('--workers', type=int, help='Worker processes (default: from settings)')
    p.add_argument('--seed', type=int, help='Override the scenario seed')
    _add_output(p)

    p = sub.add_parser('figures', help='Write figure data as CSV')
    p.add_argument('--which', required=True, choices=list(FIGURE_KINDS) + ['all'])
    p.add_argument('--out', required=True, help='Output directory')
    return parser


def _read_sample(path: str, n: int):
    if not Path(path).exists():
        raise InvalidInputError(f"input file does not exist: {path}")
    X, _ = read_points_csv(path, n)
    return X


def _parse_params(items: List[str]) -> Dict[str, Any]:
    params = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise InvalidInputError(f"--param expects KEY=VALUE, got '{item}'")
        params[key] = yaml.safe_load(value)
    return params


def _emit(record: Dict[str, Any], args) -> None:
    reporter = ReportGenerator(record)
    if args.out:
        if args.format == 'json':
            reporter.generate_json(args.out)
            print(f"✓ JSON record generated: {args.out}")
        else:
            reporter.generate_csv(args.out)
            print(f"✓ CSV record generated: {args.out}")
    else:
        sys.stdout.write(json.dumps(reporter.record, indent=2, sort_keys=True) + "\n")
    if args.summary:
        print(reporter.get_summary_text(), file=sys.stderr)


def cmd_cluster_test(args, settings: Settings) -> int:
    X = _read_sample(args.input, args.dim)
    result = cluster_property_test(GridSpec(n=args.dim, q=args.cells), X)
    _emit(cluster_record(result), args)
    return EXIT_OK if result.passed else EXIT_TEST_FAILED


def cmd_manifold_test(args, settings: Settings) -> int:
    X = _read_sample(args.input, args.dim)
    result = manifold_property_test(
        GridSpec(n=args.dim, q=args.cells), X, args.gamma,
        max_expansions=args.max_expansions or settings.manifold.max_expansions,
        strict_self_intersection=args.strict_self_intersection or settings.manifold.strict_self_intersection,
    )
    _emit(manifold_record(result), args)
    return EXIT_OK if result.passed else EXIT_TEST_FAILED


def cmd_bounds(args, settings: Settings) -> int:
    grid = GridSpec(n=args.dim, q=args.cells)
    if args.example == 'cluster':
        report = cluster_bounds(
            n=args.dim, s=grid.s, k=args.k, m_u=args.m_u, m_l=args.m_l, delta=args.delta,
            beta=args.beta, beta_sample_size=args.beta_sample_size, eps_E=args.eps_E,
        )
    else:
        counts = None
        if args.input:
            counts = occupied_cells(grid, _read_sample(args.input, args.dim))
        report = manifold_bounds(
            n=args.dim, s=grid.s, gamma_len=args.gamma, j=args.j, m_u=args.m_u, m_l=args.m_l,
            delta=args.delta, eps_B=args.eps_B, occupied_counts=counts,
        )
    _emit(model_record('bound_report', report), args)
    return EXIT_OK


def cmd_alpha(args, settings: Settings) -> int:
    alpha, t_star = alpha_max(AlphaProblem(k_bins=args.k, delta=args.delta, m_l=args.m_l))
    _emit(build_alpha_record(k=args.k, delta=args.delta, m_l=args.m_l, alpha=alpha, t_star=t_star), args)
    return EXIT_OK


def cmd_select(args, settings: Settings) -> int:
    registry = load_registry(args.registry)
    X = _read_sample(args.input, args.dim)
    bounds = evaluate_registry(registry, X, args.h_l, args.m_l, args.delta)
    winner, best = lowest_bound(bounds)
    _emit(build_selection_record(winner=winner, bound=best, bounds=bounds, hypothesis_learner=args.h_l), args)
    return EXIT_OK


def cmd_synth(args, settings: Settings) -> int:
    world = build_world(args.world, **_parse_params(args.param))
    X, y = world.sample(args.m, make_rng(args.seed))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_points_csv(args.out, X, y if args.labeled else None)
    print(f"✓ Sample generated: {args.out}")
    return EXIT_OK


def _scenario(args, settings: Settings):
    cfg = load_scenario(args.scenario, settings)
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    return cfg


def cmd_theorem(args, settings: Settings) -> int:
    report, _ = run_theorem(_scenario(args, settings))
    _emit(model_record('bound_report', report), args)
    return EXIT_OK if report.applicable else EXIT_TEST_FAILED


def cmd_validate(args, settings: Settings) -> int:
    cfg = _scenario(args, settings)
    report = validate(cfg, args.trials, workers=args.workers or settings.validation.workers)
    _emit(model_record('validation_report', report), args)
    return EXIT_OK


def cmd_figures(args, settings: Settings) -> int:
    fig = settings.figures
    written = emit_figures(args.which, args.out, fig.points_per_axis, fig.min_exponent, fig.max_exponent)
    for path in written:
        print(f"✓ Figure data generated: {path}")
    return EXIT_OK


COMMANDS = {
    'cluster-test': cmd_cluster_test,
    'manifold-test': cmd_manifold_test,
    'bounds': cmd_bounds,
    'alpha': cmd_alpha,
    'select': cmd_select,
    'synth': cmd_synth,
    'theorem': cmd_theorem,
    'validate': cmd_validate,
    'figures': cmd_figures,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = load_settings(args.config)
    except RiskGapError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    level = logging.DEBUG if args.verbose else getattr(logging, settings.logging.level.upper(), logging.INFO)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        return COMMANDS[args.command](args, settings)
    except ResourceExhaustedError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (RiskGapError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
