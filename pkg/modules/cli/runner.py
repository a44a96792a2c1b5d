"""
Argument parsing, dispatch and rendering for the ``netcap`` command.

``run(argv)`` is the library entry point; the management command wraps it.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from django.conf import settings

from modules.search.domain import SearchOptions, Status
from shared.exceptions import (
    EXIT_INFEASIBLE, EXIT_OK, EXIT_TIMEOUT, EXIT_USAGE, handle_cli_exception,
)
from . import services

SUBCOMMANDS = ('validate', 'mincut', 'model', 'solve', 'capacity', 'linear-capacity', 'verify', 'examples')


class UsageError(Exception):
    """argparse rejected the arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _network_arguments(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--network', metavar='PATH', help="Network file (JSON)")
    group.add_argument('--builtin', metavar='NAME', help="butterfly, fig3 or combination:n,k")


def _common_arguments(parser):
    parser.add_argument('--json', action='store_true', help="Print the JSON report")
    parser.add_argument('--report-out', metavar='PATH', help="Also write the JSON report to PATH")


def _limit_arguments(parser, workers: bool = True):
    parser.add_argument('--time-limit', type=float, metavar='S', help="Wall-clock limit in seconds")
    if workers:
        parser.add_argument(
            '--workers', type=int, metavar='N',
            default=settings.SEARCH_CONFIG.get('DEFAULT_WORKERS', 1),
            help="Worker processes for the search",
        )
    parser.add_argument('--certificate-out', metavar='PATH', help="Write the certificate file")


def add_arguments(parser):
    """Register all subcommands on ``parser``."""
    subparsers = parser.add_subparsers(dest='subcommand', metavar='SUBCOMMAND')
    subparsers.required = True

    validate = subparsers.add_parser('validate', help="Check a network against the network axioms")
    _network_arguments(validate)

    mincut = subparsers.add_parser('mincut', help="Min-cut per terminal and mu")
    _network_arguments(mincut)
    mincut.add_argument('--terminal', help="Only this terminal")

    model = subparsers.add_parser('model', help="Export the binary feasibility model")
    _network_arguments(model)
    model.add_argument('--q', type=int, required=True)
    model.add_argument('--M', dest='code_size', type=int, required=True)
    model.add_argument('--field', action='store_true')
    model.add_argument('--routing-fix', action='store_true')
    model.add_argument('--symmetry-break', action='store_true')
    model.add_argument('--format', choices=('lp', 'mps'), default='lp')
    model.add_argument('--output-dir', metavar='DIR')
    model.add_argument('--stats', action='store_true', help="Print variable and constraint counts")

    solve = subparsers.add_parser('solve', help="Decide whether a pair of size M exists")
    _network_arguments(solve)
    solve.add_argument('--q', type=int, required=True)
    solve.add_argument('--M', dest='code_size', type=int, required=True)
    solve.add_argument('--field', action='store_true')
    solve.add_argument('--linear-only', action='store_true')
    solve.add_argument('--routing-fix', action='store_true')
    solve.add_argument('--no-symmetry-break', action='store_true')
    _limit_arguments(solve)

    capacity = subparsers.add_parser('capacity', help="Largest unambiguous code size")
    _network_arguments(capacity)
    capacity.add_argument('--q', type=int, required=True)
    capacity.add_argument('--field', action='store_true')
    capacity.add_argument('--no-supersource', action='store_true')
    capacity.add_argument('--routing-fix', action='store_true')
    capacity.add_argument('--ascending', action='store_true', help="Grow M from 1 (lower-bound mode)")
    _limit_arguments(capacity)

    linear = subparsers.add_parser('linear-capacity', help="Largest code size with linear vertex functions")
    _network_arguments(linear)
    linear.add_argument('--q', type=int, required=True)
    _limit_arguments(linear, workers=False)

    verify = subparsers.add_parser('verify', help="Re-check a certificate file")
    _network_arguments(verify)
    verify.add_argument('--certificate', metavar='PATH', required=True)

    subparsers.add_parser('examples', help="List the built-in networks")

    for subparser in subparsers.choices.values():
        _common_arguments(subparser)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='netcap', description="Multicast network-coding capacity tools.")
    add_arguments(parser)
    return parser


def _network(args):
    return services.resolve_network(args.network, args.builtin)


def _options(args, **overrides) -> SearchOptions:
    values = {
        'routing_fix': getattr(args, 'routing_fix', False),
        'symmetry_break': not getattr(args, 'no_symmetry_break', False),
        'linear_only': getattr(args, 'linear_only', False),
        'time_limit': args.time_limit,
        'workers': getattr(args, 'workers', 1),
        'supersource': False if getattr(args, 'no_supersource', False) else None,
        'ascending': getattr(args, 'ascending', False),
    }
    values.update(overrides)
    return SearchOptions(**values)


def _cmd_validate(args) -> Tuple[object, List[str], int]:
    report = services.validate_report(_network(args))
    lines = [
        f"{report['network']}: valid",
        f"  vertices {report['vertices']}, edges {report['edges']}, |out(S)| {report['out_source']}, mu {report['mu']}",
        f"  terminals: {', '.join(report['terminals'])}",
        f"  routing-fixable: {', '.join(report['routing_fixable']) or '-'}",
        f"  edge order: {' '.join(report['edge_order'])}",
    ]
    return report, lines, EXIT_OK


def _cmd_mincut(args):
    report = services.mincut_report(_network(args), args.terminal)
    lines = [f"{report['network']}: mu = {report['mu']}", f"  {'terminal':<10} {'min-cut':>7}  cut"]
    for terminal, cut in report['terminals'].items():
        lines.append(f"  {terminal:<10} {cut['value']:>7}  {' '.join(cut['cut'])}")
    return report, lines, EXIT_OK


def _cmd_model(args):
    alphabet = services.resolve_alphabet(args.q, args.field)
    report = services.model_report(
        _network(args), alphabet, args.code_size,
        routing_fix=args.routing_fix, symmetry_break=args.symmetry_break,
        fmt=args.format, output_dir=args.output_dir,
    )
    lines = [f"wrote {report['model_file']}", f"wrote {report['sidecar_file']}"]
    if args.stats:
        stats = report['stats']
        lines.append(f"  variables: {stats['total_variables']}  " + '  '.join(
            f"{kind}={count}" for kind, count in stats['variables'].items()))
        lines.append(f"  constraints: {stats['total_constraints']}  " + '  '.join(
            f"{tag}={count}" for tag, count in stats['constraints'].items()))
    return report, lines, EXIT_OK


def _cmd_solve(args):
    alphabet = services.resolve_alphabet(args.q, args.field, args.linear_only)
    report, outcome = services.solve_report(
        _network(args), alphabet, args.code_size, _options(args), args.certificate_out
    )
    lines = [
        f"{report['network']}, q={report['q']}, M={report['M']}: {report['status']}",
        f"  nodes {report['nodes']}, {report['wall_ms']} ms",
    ]
    if report['certificate_file']:
        lines.append(f"  certificate written to {report['certificate_file']}")
    codes = {Status.FEASIBLE: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE, Status.TIMEOUT: EXIT_TIMEOUT}
    return report, lines, codes[outcome.status]


def _capacity_lines(report) -> List[str]:
    lines = [f"{report['network']}, q={report['q']}{' (linear)' if report['linear'] else ''}: {report['status']}"]
    if report['status'] == 'proven':
        lines.append(f"  M* = {report['M_star']}, capacity {report['capacity_text']}")
    else:
        lines.append(f"  {report['lower']} <= M* <= {report['upper']}, capacity {report['capacity_text']}")
    lines.append(f"  supersource {'applied' if report['supersource_applied'] else 'not applied'}")
    lines.append(f"  certificate verified: {'yes' if report['certificate_verified'] else 'no'}")
    lines.append(f"  nodes {report['nodes']}, {report['wall_ms']} ms")
    if report['certificate_file']:
        lines.append(f"  certificate written to {report['certificate_file']}")
    return lines


def _cmd_capacity(args):
    alphabet = services.resolve_alphabet(args.q, args.field)
    report, result = services.capacity_report(
        _network(args), alphabet, _options(args), certificate_out=args.certificate_out
    )
    return report, _capacity_lines(report), EXIT_OK if result.proven else EXIT_TIMEOUT


def _cmd_linear_capacity(args):
    alphabet = services.resolve_alphabet(args.q, field=True)
    report, result = services.capacity_report(
        _network(args), alphabet, _options(args, linear_only=True), linear=True,
        certificate_out=args.certificate_out,
    )
    return report, _capacity_lines(report), EXIT_OK if result.proven else EXIT_TIMEOUT


def _cmd_verify(args):
    report = services.verify_report(_network(args), Path(args.certificate))
    lines = [f"{report['network']}, {report['alphabet']}, {report['size']} codewords: "
             f"{'yes' if report['valid'] else 'no'}"]
    lines.extend(f"  {reason}" for reason in report['reasons'])
    if report['linear'] is not None:
        lines.append(f"  linear: {'yes' if report['linear'] else 'no'}")
    return report, lines, EXIT_OK if report['valid'] else EXIT_INFEASIBLE


def _cmd_examples(args):
    report = services.examples_report()
    lines = [f"{'builtin':<18} {'|V|':>4} {'|E|':>4} {'|out(S)|':>8} {'mu':>3}  known capacities"]
    for row in report:
        known = '; '.join(
            f"{kind}: " + ', '.join(f"{size}->{value}" for size, value in values.items())
            for kind, values in row['known_capacities'].items()
        )
        lines.append(f"{row['builtin']:<18} {row['vertices']:>4} {row['edges']:>4} "
                     f"{row['out_source']:>8} {row['mu']:>3}  {known}")
    return report, lines, EXIT_OK


HANDLERS: Dict[str, Callable] = {
    'validate': _cmd_validate,
    'mincut': _cmd_mincut,
    'model': _cmd_model,
    'solve': _cmd_solve,
    'capacity': _cmd_capacity,
    'linear-capacity': _cmd_linear_capacity,
    'verify': _cmd_verify,
    'examples': _cmd_examples,
}


def execute(args, stdout=None, stderr=None) -> int:
    """Run a parsed subcommand; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        report, lines, exit_code = HANDLERS[args.subcommand](args)
    except Exception as exc:
        lines, exit_code = handle_cli_exception(exc)
        stderr.write('\n'.join(lines) + '\n')
        return exit_code

    text = json.dumps(report, indent=2)
    stdout.write((text if args.json else '\n'.join(lines)) + '\n')
    if args.report_out:
        Path(args.report_out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report_out).write_text(text + '\n', encoding='utf-8')
    return exit_code


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """
    Parse ``argv`` and run one subcommand.

    Returns:
        0 success, 1 infeasible or invalid certificate, 2 usage or input error,
        3 timeout with bounds, 70 internal error
    """
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(list(argv) if argv is not None else sys.argv[1:])
    except UsageError as exc:
        stderr.write(f"error[usage]: {exc}\n")
        return EXIT_USAGE
    return execute(args, stdout, stderr)
