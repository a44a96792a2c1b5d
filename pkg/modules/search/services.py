"""
Business logic services for the search engine.

Decision runs, the capacity loops (general and linear), certificate
verification and supersource back-translation. Every certificate leaving this
module has been re-checked through ``modules.coding.services``.
"""

import logging
import time
from typing import List, Optional

from django.conf import settings

from modules.coding.domain import Alphabet, Certificate, OuterCode
from modules.coding.services import (
    assert_within_bound, is_linear, is_unambiguous, reindex_code, replication_code,
)
from modules.networks.domain import Network
from modules.networks.services import add_supersource, extend_edge_order, mu
from shared.exceptions import ConflictException, InternalConsistencyError, ValidationException
from shared.timing import Stopwatch, log_duration
from .domain import CapacityResult, SearchOptions, SearchOutcome, Status, VerificationReport
from .engine import EngineConfig, build_certificate, run_search
from .oracle import brute_force_oracle, count_network_codes  # noqa: F401

logger = logging.getLogger(__name__)


def _time_limit(options: SearchOptions) -> Optional[float]:
    if options.time_limit is not None:
        return options.time_limit
    return settings.SEARCH_CONFIG.get('DEFAULT_TIME_LIMIT')


def _engine_config(deadline: Optional[float]) -> EngineConfig:
    return EngineConfig(
        node_check_interval=settings.SEARCH_CONFIG.get('NODE_CHECK_INTERVAL', 4096),
        deadline=deadline,
    )


def _check_options(alphabet: Alphabet, options: SearchOptions):
    if options.linear_only and not alphabet.is_field:
        raise ConflictException(f"Linear codes need a field alphabet; {alphabet} has no field structure")
    if options.workers < 1:
        raise ValidationException(f"Worker count must be at least 1, got {options.workers}")
    if options.time_limit is not None and options.time_limit <= 0:
        raise ValidationException(f"Time limit must be positive, got {options.time_limit}")


def trivial_certificate(network: Network, alphabet: Alphabet) -> Certificate:
    """Size-1 pair: the all-zero codeword under the routing code."""
    order = extend_edge_order(network)
    width = len(order.out_edges(network.source))
    return Certificate(
        alphabet=alphabet,
        outer_code=OuterCode(((0,) * width,)),
        network_code=replication_code(network, alphabet.q, order),
    )


def _checked(network: Network, certificate: Certificate, code_size: int, linear: bool) -> Certificate:
    """Re-simulate a certificate produced by the engine before handing it out."""
    report = is_unambiguous(network, certificate.outer_code, certificate.network_code)
    if not report:
        raise InternalConsistencyError(f"Search produced an ambiguous pair on {network}: {report.reason}")
    if certificate.size != code_size:
        raise InternalConsistencyError(f"Search produced {certificate.size} codewords instead of {code_size}")
    if linear and not is_linear(certificate.network_code, certificate.alphabet):
        raise InternalConsistencyError(f"Search produced a non-linear code on {network}")
    return certificate


def _decide(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    options: SearchOptions,
    deadline: Optional[float],
) -> SearchOutcome:
    watch = Stopwatch()
    width = len(network.out_edge_ids(network.source))
    if not 1 <= code_size <= alphabet.q ** width:
        raise ValidationException(
            f"Code size must lie in 1..{alphabet.q ** width} (q^|out(S)|), got {code_size}"
        )
    if code_size > alphabet.q ** mu(network).value:
        logger.debug(f"M={code_size} exceeds q^mu on {network}; infeasible without search")
        return SearchOutcome(Status.INFEASIBLE, wall_ms=watch.elapsed_ms)
    if code_size == 1:
        return SearchOutcome(Status.FEASIBLE, trivial_certificate(network, alphabet), wall_ms=watch.elapsed_ms)

    order = extend_edge_order(network)
    status, raw, nodes = run_search(network, order, alphabet, code_size, options, _engine_config(deadline))
    certificate = None
    if status == Status.FEASIBLE:
        certificate = build_certificate(network, order, alphabet, raw, options)
        _checked(network, certificate, code_size, options.linear_only)
    logger.debug(f"M={code_size} on {network}: {status.value} after {nodes} nodes")
    return SearchOutcome(status, certificate, nodes, watch.elapsed_ms)


def decide_feasible(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    options: Optional[SearchOptions] = None,
) -> SearchOutcome:
    """
    Decide whether an unambiguous pair of size M exists under the option restrictions.

    Args:
        network: Validated network
        alphabet: Plain alphabet or field
        code_size: M, between 1 and q**|out(S)|
        options: Restrictions and limits; ``supersource`` and ``ascending`` are ignored

    Returns:
        Outcome with a verified certificate when feasible

    Raises:
        ValidationException: M out of range or bad limits
        ConflictException: linear_only on a non-field alphabet
    """
    options = options or SearchOptions()
    _check_options(alphabet, options)
    limit = _time_limit(options)
    deadline = time.time() + limit if limit is not None else None
    with log_duration(f"decision M={code_size} over {alphabet} on {network}", logger):
        return _decide(network, alphabet, code_size, options, deadline)


def derive_original_certificate(network: Network, supersourced: Network, certificate: Certificate) -> Certificate:
    """
    Map a certificate on the supersourced network back to the original.

    The codewords become the images of the old source's function; every
    other vertex keeps its function.
    """
    if certificate.network != supersourced:
        raise ValidationException(f"Certificate was built for {certificate.network}, not {supersourced}")
    code = certificate.network_code
    order = extend_edge_order(network)
    sup_order = code.order
    old_source = network.source
    pick = [sup_order.out_edges(old_source).index(e) for e in order.out_edges(old_source)]

    codewords = []
    for word in certificate.outer_code:
        emitted = code.apply(old_source, word)
        codewords.append(tuple(emitted[i] for i in pick))
    derived = Certificate(
        alphabet=certificate.alphabet,
        outer_code=OuterCode(tuple(codewords)),
        network_code=reindex_code(code, order),
    )
    report = is_unambiguous(network, derived.outer_code, derived.network_code)
    if not report:
        raise InternalConsistencyError(f"Supersource back-translation broke unambiguity: {report.reason}")
    return derived


def _use_supersource(network: Network, options: SearchOptions) -> bool:
    if options.supersource is not None:
        return options.supersource
    return len(network.out_edge_ids(network.source)) > mu(network).value


def _attempt_deadline(deadline: Optional[float]) -> Optional[float]:
    """Deadline for one descending attempt: a share of the time still left."""
    if deadline is None:
        return None
    share = settings.SEARCH_CONFIG.get('ATTEMPT_SHARE', 0.5)
    now = time.time()
    return now + max(deadline - now, 0.0) * share


def _bisect(network, alphabet, options, lower, certificate, upper, deadline):
    """
    Binary search between a certified size and an unrefuted upper bound.

    A timed-out size only lowers the next attempt, an infeasible one lowers
    the proven upper bound.

    Returns:
        (lower, upper, certificate for lower, nodes)
    """
    nodes = 0
    ceiling = upper - 1
    while lower < ceiling and deadline - time.time() > 0:
        code_size = (lower + ceiling + 1) // 2
        outcome = _decide(network, alphabet, code_size, options, _attempt_deadline(deadline))
        nodes += outcome.nodes
        if outcome.status == Status.FEASIBLE:
            lower, certificate = code_size, outcome.certificate
        elif outcome.status == Status.INFEASIBLE:
            upper = ceiling = code_size - 1
        else:
            ceiling = code_size - 1
        logger.debug(f"Bisection at M={code_size}: {outcome.status.value}, bounds [{lower}, {upper}]")
    return lower, upper, certificate, nodes


def _capacity_loop(
    network: Network,
    alphabet: Alphabet,
    options: SearchOptions,
    top: int,
    deadline: Optional[float],
):
    """
    Search M over 1..top, descending (first feasible wins) or ascending.

    Under a time limit each descending attempt gets a share of the remaining
    time; once one times out the rest of the budget bisects below it.

    Returns:
        (lower, upper, proven, certificate for lower, nodes)
    """
    nodes = 0
    best, certificate = 1, trivial_certificate(network, alphabet)

    if options.ascending:
        for code_size in range(2, top + 1):
            outcome = _decide(network, alphabet, code_size, options, deadline)
            nodes += outcome.nodes
            if outcome.status == Status.FEASIBLE:
                best, certificate = code_size, outcome.certificate
            elif outcome.status == Status.INFEASIBLE:
                return best, best, True, certificate, nodes
            else:
                return best, top, False, certificate, nodes
        return best, best, True, certificate, nodes

    for code_size in range(top, 1, -1):
        outcome = _decide(network, alphabet, code_size, options, _attempt_deadline(deadline))
        nodes += outcome.nodes
        if outcome.status == Status.FEASIBLE:
            return code_size, code_size, True, outcome.certificate, nodes
        if outcome.status == Status.TIMEOUT:
            # Every size above this one was refuted.
            best, upper, certificate, more = _bisect(
                network, alphabet, options, best, certificate, code_size, deadline
            )
            return best, upper, best == upper, certificate, nodes + more
    return best, best, True, certificate, nodes


def max_code_size(network: Network, alphabet: Alphabet, options: Optional[SearchOptions] = None) -> CapacityResult:
    """
    Largest M admitting an unambiguous pair, with a certificate on the original network.

    When |out(S)| exceeds mu (or ``options.supersource`` is True) the search runs
    on the supersourced network, whose outer code ranges over A^mu.
    On timeout the result carries bounds instead of a proven optimum.
    """
    options = options or SearchOptions()
    if options.linear_only:
        return linear_max_code_size(network, alphabet, options)
    _check_options(alphabet, options)
    limit = _time_limit(options)
    watch = Stopwatch()
    deadline = time.time() + limit if limit is not None else None

    applied = _use_supersource(network, options)
    searched = add_supersource(network) if applied else network
    width = len(searched.out_edge_ids(searched.source))
    top = min(alphabet.q ** mu(network).value, alphabet.q ** width)

    with log_duration(f"capacity over {alphabet} on {searched}", logger):
        lower, upper, proven, certificate, nodes = _capacity_loop(searched, alphabet, options, top, deadline)

    if applied:
        certificate = derive_original_certificate(network, searched, certificate)
    assert_within_bound(network, alphabet.q, lower)
    return CapacityResult(
        network=network, q=alphabet.q, lower=lower, upper=upper, proven=proven,
        certificate=certificate, nodes=nodes, wall_ms=watch.elapsed_ms,
        linear=False, supersource_applied=applied, options=options,
    )


def linear_max_code_size(
    network: Network, alphabet: Alphabet, options: Optional[SearchOptions] = None
) -> CapacityResult:
    """
    Largest M admitting an unambiguous pair whose vertex functions are linear.

    The outer code stays unrestricted. When |out(S)| > mu, a supersource probe
    at M = q**mu is tried first; its encoder image is an admissible outer code,
    so a feasible probe already meets the min-cut bound. Otherwise the exact
    loop runs on the original network.

    Raises:
        AlphabetError: the alphabet is not a field
    """
    alphabet.require_field()
    options = options or SearchOptions()
    options = SearchOptions(**{**options.as_dict(), 'linear_only': True})
    _check_options(alphabet, options)
    limit = _time_limit(options)
    watch = Stopwatch()
    deadline = time.time() + limit if limit is not None else None

    width = len(network.out_edge_ids(network.source))
    bound = alphabet.q ** mu(network).value
    nodes = 0
    if width > mu(network).value and options.supersource is not False:
        supersourced = add_supersource(network)
        with log_duration(f"linear supersource probe M={bound} on {supersourced}", logger):
            probe = _decide(supersourced, alphabet, bound, options, deadline)
        nodes += probe.nodes
        if probe.feasible:
            certificate = derive_original_certificate(network, supersourced, probe.certificate)
            return CapacityResult(
                network=network, q=alphabet.q, lower=bound, upper=bound, proven=True,
                certificate=certificate, nodes=nodes, wall_ms=watch.elapsed_ms,
                linear=True, supersource_applied=True, options=options,
            )

    with log_duration(f"linear capacity over {alphabet} on {network}", logger):
        lower, upper, proven, certificate, loop_nodes = _capacity_loop(
            network, alphabet, options, min(bound, alphabet.q ** width), deadline
        )
    assert_within_bound(network, alphabet.q, lower)
    return CapacityResult(
        network=network, q=alphabet.q, lower=lower, upper=upper, proven=proven,
        certificate=certificate, nodes=nodes + loop_nodes, wall_ms=watch.elapsed_ms,
        linear=True, supersource_applied=False, options=options,
    )


def verify_certificate(network: Network, certificate: Certificate) -> VerificationReport:
    """
    Re-simulate a certificate on a network, trusting nothing but coding-core.

    Returns:
        Report listing every reason the certificate fails, with a witness
        for the first ambiguous terminal
    """
    reasons: List[str] = []
    size = certificate.size
    code = certificate.network_code
    if code.network != network:
        return VerificationReport(False, size, (f"Certificate was built for {code.network}, not {network}",))
    if code.q != certificate.alphabet.q:
        reasons.append(f"Network code uses {code.q} symbols but the alphabet is {certificate.alphabet}")

    width = len(code.order.out_edges(network.source))
    words = list(certificate.outer_code)
    if not words:
        reasons.append("Outer code is empty")
    for word in words:
        if len(word) != width:
            reasons.append(f"Codeword {word} has length {len(word)}, expected {width}")
        elif any(not 0 <= symbol < code.q for symbol in word):
            reasons.append(f"Codeword {word} uses symbols outside 0..{code.q - 1}")
    duplicates = sorted({word for word in words if words.count(word) > 1})
    for word in duplicates:
        reasons.append(f"Codeword {word} appears more than once")
    if reasons:
        return VerificationReport(False, size, tuple(reasons))

    report = is_unambiguous(network, certificate.outer_code, code)
    linear = is_linear(code, certificate.alphabet) if certificate.alphabet.is_field else None
    if not report:
        return VerificationReport(False, size, (report.reason,), report.witness, linear)
    return VerificationReport(True, size, (), None, linear)
