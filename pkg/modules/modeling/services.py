"""
Business logic services for the binary feasibility model.

Variables (c is a 1-based codeword index, m / m' are mixed-radix indices of
the input / output tuple of a vertex):

    x^{c,V}_{m'}   V not a terminal, V emits m' for codeword c
    y^{c,V}_{m}    V not the source, V receives m for codeword c
    z^{V}_{m,m'}   V intermediate, F_V(m) = m'
    w^{c,V}_{m,m'} V intermediate, the product y^{c,V}_m * z^V_{m,m'}
"""

import json
import logging
import tempfile
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pulp
from django.conf import settings

from modules.coding.domain import Alphabet, Certificate, NetworkCode, OuterCode
from modules.coding.services import transmit
from modules.networks.domain import EdgeOrder, Network
from modules.networks.services import extend_edge_order, routing_fixable_vertices
from shared.exceptions import ModelSizeError, ValidationException
from shared.timing import log_duration
from shared.utils import decode_index, encode_tuple, natural_key
from .domain import (
    CONSTRAINT_TAGS, EQ, GE, LE, VARIABLE_KINDS,
    FeasibilityModel, LinearConstraint, ModelOptions, Variable, sanitize_token,
)

logger = logging.getLogger(__name__)


def _tokens(identifiers: Iterable[str]) -> Dict[str, str]:
    """Format-safe tokens; ids that sanitize to the same token get a numeric suffix."""
    ordered = sorted(identifiers, key=natural_key)
    groups: Dict[str, List[str]] = {}
    for identifier in ordered:
        groups.setdefault(sanitize_token(identifier), []).append(identifier)
    tokens = {}
    for token, members in groups.items():
        if len(members) == 1:
            tokens[members[0]] = token
        else:
            for index, identifier in enumerate(members, start=1):
                tokens[identifier] = f"{token}__{index}"
    return tokens


def x_name(model_or_tokens, codeword: int, vertex: str, outputs: int) -> str:
    return f"x_c{codeword}_{_vertex_token(model_or_tokens, vertex)}_{outputs}"


def y_name(model_or_tokens, codeword: int, vertex: str, inputs: int) -> str:
    return f"y_c{codeword}_{_vertex_token(model_or_tokens, vertex)}_{inputs}"


def z_name(model_or_tokens, vertex: str, inputs: int, outputs: int) -> str:
    return f"z_{_vertex_token(model_or_tokens, vertex)}_{inputs}_{outputs}"


def w_name(model_or_tokens, codeword: int, vertex: str, inputs: int, outputs: int) -> str:
    return f"w_c{codeword}_{_vertex_token(model_or_tokens, vertex)}_{inputs}_{outputs}"


def _vertex_token(model_or_tokens, vertex: str) -> str:
    tokens = getattr(model_or_tokens, 'vertex_tokens', model_or_tokens)
    return tokens[vertex]


def _check_table_sizes(network: Network, order: EdgeOrder, q: int, limit: int):
    for vertex in network.sorted_vertices(network.intermediates):
        size = q ** len(order.in_edges(vertex)) * q ** len(order.out_edges(vertex))
        if size > limit:
            raise ModelSizeError(
                f"Vertex '{vertex}' needs {size} z-variables at q = {q}; the limit is {limit}"
            )


def mccormick_linearize(products: Iterable[Tuple[str, str, str]]) -> List[LinearConstraint]:
    """
    Exact linearization of w = y * z for binary y and z.

    Args:
        products: (w, y, z) variable name triples

    Returns:
        w <= y, w <= z, w >= y + z - 1 and w >= 0 for every product, tagged MC
    """
    constraints = []
    for w, y, z in products:
        constraints.extend((
            LinearConstraint(f"MC1_{w}", 'MC', ((1, w), (-1, y)), LE, 0),
            LinearConstraint(f"MC2_{w}", 'MC', ((1, w), (-1, z)), LE, 0),
            LinearConstraint(f"MC3_{w}", 'MC', ((1, w), (-1, y), (-1, z)), GE, -1),
            LinearConstraint(f"MC4_{w}", 'MC', ((1, w),), GE, 0),
        ))
    return constraints


class _ModelBuilder:
    """Enumerates the index sets of one model."""

    def __init__(self, network: Network, order: EdgeOrder, q: int, code_size: int):
        self.network = network
        self.order = order
        self.q = q
        self.code_size = code_size
        self.vertex_tokens = _tokens(network.vertices)
        self.edge_tokens = _tokens(edge.id for edge in network.edges)
        self.codewords = range(1, code_size + 1)
        self.emitters = network.sorted_vertices(network.vertices - network.terminals)
        self.receivers = network.sorted_vertices(network.vertices - {network.source})
        self.intermediates = network.sorted_vertices(network.intermediates)
        self.terminals = network.sorted_vertices(network.terminals)
        self.variables: List[Variable] = []
        self.constraints: List[LinearConstraint] = []

    def n_in(self, vertex):
        return self.q ** len(self.order.in_edges(vertex))

    def n_out(self, vertex):
        return self.q ** len(self.order.out_edges(vertex))

    def x(self, c, vertex, outputs):
        return x_name(self.vertex_tokens, c, vertex, outputs)

    def y(self, c, vertex, inputs):
        return y_name(self.vertex_tokens, c, vertex, inputs)

    def z(self, vertex, inputs, outputs):
        return z_name(self.vertex_tokens, vertex, inputs, outputs)

    def w(self, c, vertex, inputs, outputs):
        return w_name(self.vertex_tokens, c, vertex, inputs, outputs)

    def declare_variables(self):
        add = self.variables.append
        for c in self.codewords:
            for vertex in self.emitters:
                for outputs in range(self.n_out(vertex)):
                    add(Variable(self.x(c, vertex, outputs), 'x', vertex, c, outputs=outputs))
        for c in self.codewords:
            for vertex in self.receivers:
                for inputs in range(self.n_in(vertex)):
                    add(Variable(self.y(c, vertex, inputs), 'y', vertex, c, inputs=inputs))
        for vertex in self.intermediates:
            for inputs in range(self.n_in(vertex)):
                for outputs in range(self.n_out(vertex)):
                    add(Variable(self.z(vertex, inputs, outputs), 'z', vertex, None, inputs, outputs))
        for c in self.codewords:
            for vertex in self.intermediates:
                for inputs in range(self.n_in(vertex)):
                    for outputs in range(self.n_out(vertex)):
                        add(Variable(self.w(c, vertex, inputs, outputs), 'w', vertex, c, inputs, outputs))

    def add_rows(self):
        add = self.constraints.append
        token = self.vertex_tokens

        # C1: every non-terminal emits exactly one tuple.
        for c in self.codewords:
            for vertex in self.emitters:
                terms = tuple((1, self.x(c, vertex, o)) for o in range(self.n_out(vertex)))
                add(LinearConstraint(f"C1_c{c}_{token[vertex]}", 'C1', terms, EQ, 1))

        # C2: every non-source receives exactly one tuple.
        for c in self.codewords:
            for vertex in self.receivers:
                terms = tuple((1, self.y(c, vertex, i)) for i in range(self.n_in(vertex)))
                add(LinearConstraint(f"C2_c{c}_{token[vertex]}", 'C2', terms, EQ, 1))

        # C3: what V receives on e agrees with what the tail of e emits on e.
        for c in self.codewords:
            for edge_id in self.order.sequence:
                edge = self.network.edge_map[edge_id]
                in_position = self.order.in_edges(edge.head).index(edge_id)
                out_position = self.order.out_edges(edge.tail).index(edge_id)
                in_width = len(self.order.in_edges(edge.head))
                out_width = len(self.order.out_edges(edge.tail))
                emitted = [
                    decode_index(o, self.q, out_width)[out_position]
                    for o in range(self.n_out(edge.tail))
                ]
                for inputs in range(self.n_in(edge.head)):
                    symbol = decode_index(inputs, self.q, in_width)[in_position]
                    terms = ((1, self.y(c, edge.head, inputs)),) + tuple(
                        (1, self.x(c, edge.tail, o))
                        for o, emitted_symbol in enumerate(emitted) if emitted_symbol != symbol
                    )
                    add(LinearConstraint(
                        f"C3_c{c}_{self.edge_tokens[edge_id]}_{inputs}", 'C3', terms, LE, 1))

        # C4: F_V maps each input to at most one output.
        for vertex in self.intermediates:
            for inputs in range(self.n_in(vertex)):
                terms = tuple((1, self.z(vertex, inputs, o)) for o in range(self.n_out(vertex)))
                add(LinearConstraint(f"C4_{token[vertex]}_{inputs}", 'C4', terms, LE, 1))

        # C5: F_V is defined on every input that occurs.
        for c in self.codewords:
            for vertex in self.intermediates:
                for inputs in range(self.n_in(vertex)):
                    terms = tuple((1, self.z(vertex, inputs, o)) for o in range(self.n_out(vertex)))
                    terms += ((-1, self.y(c, vertex, inputs)),)
                    add(LinearConstraint(f"C5_c{c}_{token[vertex]}_{inputs}", 'C5', terms, GE, 0))

        # MC + C6: x^{c,V}_{m'} = sum_m y^{c,V}_m z^V_{m,m'}, linearized.
        products = [
            (self.w(c, vertex, i, o), self.y(c, vertex, i), self.z(vertex, i, o))
            for c in self.codewords
            for vertex in self.intermediates
            for i in range(self.n_in(vertex))
            for o in range(self.n_out(vertex))
        ]
        self.constraints.extend(mccormick_linearize(products))
        for c in self.codewords:
            for vertex in self.intermediates:
                for outputs in range(self.n_out(vertex)):
                    terms = tuple((1, self.w(c, vertex, i, outputs)) for i in range(self.n_in(vertex)))
                    terms += ((-1, self.x(c, vertex, outputs)),)
                    add(LinearConstraint(f"C6_c{c}_{token[vertex]}_{outputs}", 'C6', terms, EQ, 0))

        # C7: no terminal receives the same tuple for two codewords.
        for vertex in self.terminals:
            for inputs in range(self.n_in(vertex)):
                terms = tuple((1, self.y(c, vertex, inputs)) for c in self.codewords)
                add(LinearConstraint(f"C7_{token[vertex]}_{inputs}", 'C7', terms, LE, 1))

    def build(self) -> FeasibilityModel:
        self.declare_variables()
        self.add_rows()
        return FeasibilityModel(
            network=self.network,
            order=self.order,
            q=self.q,
            code_size=self.code_size,
            options=ModelOptions(),
            variables=tuple(self.variables),
            constraints=tuple(self.constraints),
            vertex_tokens=self.vertex_tokens,
            edge_tokens=self.edge_tokens,
        )


def build_model(
    network: Network,
    alphabet: Alphabet,
    code_size: int,
    routing_fix: bool = False,
    symmetry_break: bool = False,
    order: Optional[EdgeOrder] = None,
    max_table_variables: Optional[int] = None,
) -> FeasibilityModel:
    """
    Build the feasibility model for codes of size ``code_size``.

    Raises:
        ValidationException: code_size outside 1..q**|out(S)|
        ModelSizeError: some vertex table exceeds the configured limit
    """
    q = alphabet.q
    order = order or extend_edge_order(network)
    width = len(order.out_edges(network.source))
    if not 1 <= code_size <= q ** width:
        raise ValidationException(
            f"Code size must lie in 1..{q ** width} (q^|out(S)|), got {code_size}"
        )
    limit = max_table_variables or settings.MODELING_CONFIG.get('MAX_TABLE_VARIABLES', 10 ** 6)
    _check_table_sizes(network, order, q, limit)

    with log_duration(f"model build for {network.name or 'network'} q={q} M={code_size}", logger):
        model = _ModelBuilder(network, order, q, code_size).build()
        if routing_fix:
            model = add_routing_fixings(model, network, alphabet)
        if symmetry_break:
            model = add_symmetry_breaking(model, network, alphabet, code_size)
    logger.debug(f"Built {model}")
    return model


def add_routing_fixings(model: FeasibilityModel, network: Network, alphabet: Alphabet) -> FeasibilityModel:
    """Fix to zero every z of a single-input vertex that is not pure replication."""
    q = alphabet.q
    rows = []
    for vertex in network.sorted_vertices(routing_fixable_vertices(network)):
        width = len(model.order.out_edges(vertex))
        for inputs in range(q):
            for outputs in range(q ** width):
                if any(symbol != inputs for symbol in decode_index(outputs, q, width)):
                    name = z_name(model, vertex, inputs, outputs)
                    rows.append(LinearConstraint(f"FIX_{name}", 'FIX', ((1, name),), EQ, 0))
    return model.extended(rows, routing_fix=True)


def add_symmetry_breaking(
    model: FeasibilityModel, network: Network, alphabet: Alphabet, code_size: int
) -> FeasibilityModel:
    """
    Strictly increasing source emissions: value(c+1) > value(c).

    For every t, sum_{m' <= t} x^{c+1,S}_{m'} - sum_{m' < t} x^{c,S}_{m'} <= 0.
    """
    q = alphabet.q
    source = network.source
    count = q ** len(model.order.out_edges(source))
    rows = []
    for c in range(1, code_size):
        for t in range(count):
            terms = tuple((1, x_name(model, c + 1, source, o)) for o in range(t + 1))
            terms += tuple((-1, x_name(model, c, source, o)) for o in range(t))
            rows.append(LinearConstraint(f"SYM_c{c}_{t}", 'SYM', terms, LE, 0))
    return model.extended(rows, symmetry_break=True)


def model_stats(model: FeasibilityModel) -> dict:
    """Exact counts per variable kind and per constraint tag."""
    kinds = Counter(variable.kind for variable in model.variables)
    tags = Counter(constraint.tag for constraint in model.constraints)
    return {
        'variables': {kind: kinds.get(kind, 0) for kind in VARIABLE_KINDS},
        'constraints': {tag: tags.get(tag, 0) for tag in CONSTRAINT_TAGS},
        'total_variables': len(model.variables),
        'total_constraints': len(model.constraints),
    }


def encode_pair(model: FeasibilityModel, network: Network, outer_code: OuterCode, code: NetworkCode) -> Dict[str, int]:
    """
    0/1 assignment of a pair; every variable of the model gets a value.

    Codewords are numbered in increasing mixed-radix order when the model
    breaks symmetry, otherwise in the given order.

    Raises:
        ValidationException: size or edge order disagree with the model
    """
    if len(outer_code) != model.code_size:
        raise ValidationException(f"Model is for {model.code_size} codewords, got {len(outer_code)}")
    if code.order.sequence != model.order.sequence:
        raise ValidationException("Network code uses a different edge order than the model")

    q = model.q
    words = list(outer_code)
    if model.options.symmetry_break:
        words.sort(key=lambda word: encode_tuple(word, q))

    values = {variable.name: 0 for variable in model.variables}
    for vertex in network.intermediates:
        for inputs, row in enumerate(code.tables[vertex].tolist()):
            values[z_name(model, vertex, inputs, encode_tuple(row, q))] = 1

    order = model.order
    for c, word in enumerate(words, start=1):
        transcript = transmit(network, code, word)
        for vertex in network.vertices - network.terminals:
            emitted = tuple(transcript.symbols[e] for e in order.out_edges(vertex))
            values[x_name(model, c, vertex, encode_tuple(emitted, q))] = 1
        for vertex in network.vertices - {network.source}:
            received = encode_tuple(transcript.incoming(vertex), q)
            values[y_name(model, c, vertex, received)] = 1
            if vertex in network.intermediates:
                emitted = encode_tuple(code.tables[vertex][received].tolist(), q)
                values[w_name(model, c, vertex, received, emitted)] = 1
    return values


def decode_assignment(
    model: FeasibilityModel, network: Network, alphabet: Alphabet, values: Mapping[str, float]
) -> Certificate:
    """
    Read a certificate off a 0/1 solution.

    Codewords come from x^{c,S}; F_V(m) = m' wherever z^V_{m,m'} = 1, and
    entries without a z are completed by replication or zeros.
    """
    q = model.q
    order = model.order
    source = network.source
    width = len(order.out_edges(source))

    words = []
    for c in range(1, model.code_size + 1):
        emitted = [o for o in range(q ** width) if values.get(x_name(model, c, source, o), 0) > 0.5]
        if len(emitted) != 1:
            raise ValidationException(f"Codeword {c} emits {len(emitted)} tuples in the assignment")
        words.append(decode_index(emitted[0], q, width))

    entries: Dict[str, Dict[int, Sequence[int]]] = {}
    for variable in model.variables_of('z'):
        if values.get(variable.name, 0) > 0.5:
            out_width = len(order.out_edges(variable.vertex))
            entries.setdefault(variable.vertex, {})[variable.inputs] = decode_index(
                variable.outputs, q, out_width)

    code = NetworkCode.completed(order, q, entries)
    return Certificate(alphabet=alphabet, outer_code=OuterCode(tuple(words)), network_code=code)


_PULP_SENSES = {LE: pulp.LpConstraintLE, EQ: pulp.LpConstraintEQ, GE: pulp.LpConstraintGE}

FORMATS = ('lp', 'mps')


def to_pulp(model: FeasibilityModel) -> Tuple[pulp.LpProblem, Dict[str, pulp.LpVariable]]:
    """PuLP problem with binary variables, the model's rows and a zero objective."""
    problem = pulp.LpProblem(model.name, pulp.LpMinimize)
    variables = {
        variable.name: pulp.LpVariable(variable.name, cat=pulp.LpBinary)
        for variable in model.variables
    }
    problem.setObjective(pulp.LpAffineExpression())
    for constraint in model.constraints:
        expression = pulp.LpAffineExpression(
            [(variables[name], coefficient) for coefficient, name in constraint.terms]
        )
        problem.addConstraint(
            pulp.LpConstraint(expression, _PULP_SENSES[constraint.sense], constraint.name, constraint.rhs)
        )
    return problem, variables


def _name_mapping_lines(model: FeasibilityModel) -> List[str]:
    lines = []
    for label, tokens in (('vertex', model.vertex_tokens), ('edge', model.edge_tokens)):
        for identifier in sorted(tokens, key=natural_key):
            lines.append(f"{label} {tokens[identifier]} = {identifier}")
    return lines


def export_model(model: FeasibilityModel, fmt: str = 'lp') -> str:
    """
    LP or MPS text of a model, followed by the id-to-token mapping as comments.

    Raises:
        ValidationException: unknown format
    """
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise ValidationException(f"Unknown model format '{fmt}' (expected lp or mps)")

    problem, _ = to_pulp(model)
    with tempfile.TemporaryDirectory() as workdir:
        path = Path(workdir) / f"model.{fmt}"
        if fmt == 'lp':
            problem.writeLP(str(path))
        else:
            problem.writeMPS(str(path))
        text = path.read_text(encoding='utf-8')

    marker = '\\' if fmt == 'lp' else '*'
    comments = [f"{marker} name mapping (token = original id)"]
    comments.extend(f"{marker} {line}" for line in _name_mapping_lines(model))
    if not text.endswith('\n'):
        text += '\n'
    return text + '\n'.join(comments) + '\n'


def write_model_files(model: FeasibilityModel, fmt: str = 'lp', output_dir=None) -> Tuple[Path, Path]:
    """
    Write ``<network>_q<q>_M<M>[_rf][_sym].<fmt>`` and its JSON sidecar.

    Returns:
        (model path, sidecar path)
    """
    from .serializers import ModelSidecarSerializer

    output_dir = Path(output_dir or settings.MODELING_CONFIG.get('EXPORT_DIR', '.'))
    output_dir.mkdir(parents=True, exist_ok=True)
    model_path = output_dir / f"{model.name}.{fmt.lower()}"
    sidecar_path = output_dir / f"{model.name}.json"

    model_path.write_text(export_model(model, fmt), encoding='utf-8')
    sidecar = ModelSidecarSerializer(model, context={'format': fmt.lower(), 'stats': model_stats(model)})
    sidecar_path.write_text(json.dumps(sidecar.data, indent=2) + '\n', encoding='utf-8')
    logger.info(f"Wrote {model_path} and {sidecar_path}")
    return model_path, sidecar_path
