"""
Business logic services for the command line.

Each report is a composition of library operations; no capacity logic lives
here. Reports are plain dicts so that they can be printed as text or JSON.
"""

import logging
from pathlib import Path
from typing import List, Optional

from modules.coding.domain import Alphabet
from modules.coding.serializers import dump_certificate, load_certificate
from modules.coding.services import make_alphabet
from modules.modeling.services import build_model, model_stats, write_model_files
from modules.networks.domain import Network
from modules.networks.serializers import load_network_file
from modules.networks.services import (
    builtin_network, extend_edge_order, min_cut, min_cut_edges, mu, routing_fixable_vertices,
)
from modules.search.domain import SearchOptions
from modules.search.services import (
    decide_feasible, linear_max_code_size, max_code_size, verify_certificate,
)
from shared.exceptions import ConflictException, ValidationException
from shared.utils import natural_key
from .serializers import CapacityReportSerializer, DecisionReportSerializer, VerificationReportSerializer

logger = logging.getLogger(__name__)

BUILTINS = ('butterfly', 'fig3', 'combination:5,2')

# Capacities established for the built-in instances, by alphabet size.
KNOWN_CAPACITIES = {
    'butterfly': {'general': {'any': '2'}, 'linear': {'any': '2'}},
    'fig3': {
        'general': {'2': '1', '6': 'log_6 34', 'other': '2'},
        'linear': {'2': '1', 'other': '2'},
    },
    'combination:5,2': {
        'general': {'2': '1', '3': 'log_3 6', '6': 'log_6 X, 29 <= X <= 35', 'other': '2'},
        'linear': {'2': '1', '3': 'log_3 6', 'other': '2'},
    },
}


def parse_network_file(path) -> Network:
    """
    Load and validate a network file.

    Raises:
        NetworkFileError: syntax or schema problems
        NetworkValidationError: axiom violations, all of them listed
    """
    return load_network_file(Path(path))


def resolve_network(path: Optional[str] = None, builtin: Optional[str] = None) -> Network:
    if (path is None) == (builtin is None):
        raise ValidationException("Give exactly one of --network PATH and --builtin NAME")
    return parse_network_file(path) if path is not None else builtin_network(builtin)


def resolve_alphabet(q: int, field: bool = False, linear_only: bool = False) -> Alphabet:
    if linear_only and not field:
        raise ConflictException("--linear-only needs --field")
    return make_alphabet(q, want_field=field)


def network_summary(network: Network) -> dict:
    order = extend_edge_order(network)
    return {
        'network': network.name,
        'vertices': len(network.vertices),
        'edges': len(network.edges),
        'source': network.source,
        'terminals': list(network.sorted_vertices(network.terminals)),
        'out_source': len(network.out_edge_ids(network.source)),
        'mu': mu(network).value,
        'routing_fixable': list(network.sorted_vertices(routing_fixable_vertices(network))),
        'edge_order': list(order.sequence),
    }


def validate_report(network: Network) -> dict:
    return {'valid': True, **network_summary(network)}


def mincut_report(network: Network, terminal: Optional[str] = None) -> dict:
    terminals = [terminal] if terminal else list(network.sorted_vertices(network.terminals))
    cuts = {
        t: {
            'value': min_cut(network, t).value,
            'cut': sorted(min_cut_edges(network, t), key=natural_key),
        }
        for t in terminals
    }
    return {'network': network.name, 'mu': mu(network).value, 'terminals': cuts}


def model_report(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    routing_fix: bool = False,
    symmetry_break: bool = False,
    fmt: str = 'lp',
    output_dir=None,
) -> dict:
    model = build_model(network, alphabet, code_size, routing_fix=routing_fix, symmetry_break=symmetry_break)
    model_path, sidecar_path = write_model_files(model, fmt, output_dir)
    return {
        'name': model.name,
        'model_file': str(model_path),
        'sidecar_file': str(sidecar_path),
        'stats': model_stats(model),
    }


def _write_certificate(certificate, path) -> Optional[str]:
    if path is None or certificate is None:
        return None
    dump_certificate(certificate, path)
    logger.info(f"Wrote certificate to {path}")
    return str(path)


def solve_report(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    options: SearchOptions,
    certificate_out=None,
):
    """
    Returns:
        (report, outcome)
    """
    outcome = decide_feasible(network, alphabet, code_size, options)
    context = {'network': network, 'alphabet': alphabet, 'code_size': code_size, 'options': options}
    report = dict(DecisionReportSerializer(outcome, context=context).data)
    report['certificate_file'] = _write_certificate(outcome.certificate, certificate_out)
    return report, outcome


def capacity_report(
    network: Network,
    alphabet: Alphabet,
    options: SearchOptions,
    linear: bool = False,
    certificate_out=None,
):
    """
    Returns:
        (report, result)
    """
    if linear:
        result = linear_max_code_size(network, alphabet, options)
    else:
        result = max_code_size(network, alphabet, options)
    report = dict(CapacityReportSerializer(result).data)
    verification = verify_certificate(network, result.certificate)
    report['certificate_verified'] = verification.valid
    report['certificate_file'] = _write_certificate(result.certificate, certificate_out)
    return report, result


def verify_report(network: Network, certificate_path) -> dict:
    certificate = load_certificate(certificate_path, network)
    verification = verify_certificate(network, certificate)
    report = dict(VerificationReportSerializer(verification).data)
    report['network'] = network.name
    report['alphabet'] = str(certificate.alphabet)
    return report


def examples_report() -> List[dict]:
    rows = []
    for name in BUILTINS:
        summary = network_summary(builtin_network(name))
        summary.pop('edge_order')
        rows.append({'builtin': name, **summary, 'known_capacities': KNOWN_CAPACITIES[name]})
    return rows
