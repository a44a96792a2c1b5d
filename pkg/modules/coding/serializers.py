"""
Serializers for the certificate file format.

A certificate is JSON::

    {"_format": "...", "network": "butterfly",
     "alphabet": {"q": 3, "field": true, "p": 3, "k": 1, "modulus": [0, 1]},
     "edge_order": ["e1", ...],            (optional)
     "outer_code": [[0, 0], [0, 1], ...],
     "network_code": {"V1": [flat table], ...}}

The flat table of V lists, for input index i = 0, 1, ..., the |out(V)| output
symbols of that input; so the outputs for index i sit at positions
[i * |out(V)|, (i + 1) * |out(V)|). Input tuples are indexed in mixed radix
with the first edge of in(V) (by EdgeOrder) most significant. Intermediate
vertices absent from ``network_code`` replicate a single input or emit zeros.
"""

import json
from pathlib import Path
from typing import Optional, Union

import numpy as np
from rest_framework import serializers

from modules.networks.domain import EdgeOrder, Network
from modules.networks.services import edge_order_from_sequence, extend_edge_order
from shared.exceptions import BaseApplicationException, CertificateFormatError
from shared.utils import flatten_errors
from .domain import Certificate, NetworkCode, OuterCode
from .services import alphabet_from_description

FORMAT_DESCRIPTION = (
    "network_code[V] is a flat list; outputs for input index i occupy "
    "[i*|out(V)|, (i+1)*|out(V)|); input index is mixed radix base q over in(V) "
    "in edge order, first edge most significant; outer_code positions follow out(S) in edge order"
)


class AlphabetSerializer(serializers.Serializer):
    q = serializers.IntegerField(min_value=2)
    field = serializers.BooleanField(default=False)
    p = serializers.IntegerField(required=False, min_value=2)
    k = serializers.IntegerField(required=False, min_value=1)
    modulus = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)


class CertificateSerializer(serializers.Serializer):
    """Schema of a certificate file."""

    network = serializers.CharField(required=False, allow_blank=True)
    alphabet = AlphabetSerializer()
    edge_order = serializers.ListField(child=serializers.CharField(), required=False)
    outer_code = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
        allow_empty=False,
    )
    network_code = serializers.DictField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
        required=False,
        default=dict,
    )

    def validate(self, attrs):
        q = attrs['alphabet']['q']
        for index, word in enumerate(attrs['outer_code']):
            if any(symbol >= q for symbol in word):
                raise serializers.ValidationError(
                    {'outer_code': [f"outer_code[{index}] uses a symbol >= q = {q}"]}
                )
        for vertex, table in attrs['network_code'].items():
            if any(symbol >= q for symbol in table):
                raise serializers.ValidationError(
                    {'network_code': [f"table of '{vertex}' uses a symbol >= q = {q}"]}
                )
        return attrs


def certificate_from_data(data: dict, network: Network) -> Certificate:
    """
    Build a Certificate for ``network`` from decoded certificate JSON.

    Repeated codewords are kept so that verification can reject them.

    Raises:
        CertificateFormatError: schema problems or tables that do not fit the network
    """
    serializer = CertificateSerializer(data=data)
    if not serializer.is_valid():
        diagnostics = flatten_errors(serializer.errors)
        raise CertificateFormatError(f"certificate schema error: {diagnostics[0]}")
    attrs = serializer.validated_data

    try:
        alphabet = alphabet_from_description(attrs['alphabet'])
        if attrs.get('edge_order'):
            order = edge_order_from_sequence(network, attrs['edge_order'])
        else:
            order = extend_edge_order(network)
        width = len(order.out_edges(network.source))
        for index, word in enumerate(attrs['outer_code']):
            if len(word) != width:
                raise CertificateFormatError(
                    f"outer_code[{index}] has length {len(word)}, expected |out(S)| = {width}"
                )
        code = _network_code(order, alphabet.q, attrs['network_code'])
    except CertificateFormatError:
        raise
    except BaseApplicationException as exc:
        raise CertificateFormatError(f"certificate does not fit {network}: {exc.message}") from exc

    outer = OuterCode(tuple(tuple(word) for word in attrs['outer_code']))
    return Certificate(alphabet=alphabet, outer_code=outer, network_code=code)


def _network_code(order: EdgeOrder, q: int, flat_tables: dict) -> NetworkCode:
    network = order.network
    entries = {}
    for vertex, flat in flat_tables.items():
        if vertex not in network.intermediates:
            raise CertificateFormatError(f"network_code names '{vertex}', which is not an intermediate vertex")
        n_in, n_out = len(order.in_edges(vertex)), len(order.out_edges(vertex))
        expected = q ** n_in * n_out
        if len(flat) != expected:
            raise CertificateFormatError(
                f"table of '{vertex}' has {len(flat)} symbols, expected {q}^{n_in} * {n_out} = {expected}"
            )
        rows = np.array(flat, dtype=np.int64).reshape(q ** n_in, n_out)
        entries[vertex] = {index: tuple(row) for index, row in enumerate(rows.tolist())}
    return NetworkCode.completed(order, q, entries)


def certificate_to_data(certificate: Certificate, network_name: Optional[str] = None) -> dict:
    """Certificate JSON; the edge order is written only when it is not the default one."""
    code = certificate.network_code
    network = code.network
    data = {
        '_format': FORMAT_DESCRIPTION,
        'network': network_name if network_name is not None else network.name,
        'alphabet': certificate.alphabet.describe(),
    }
    if code.order.sequence != extend_edge_order(network).sequence:
        data['edge_order'] = list(code.order.sequence)
    data['outer_code'] = [list(word) for word in certificate.outer_code]
    data['network_code'] = {
        vertex: code.tables[vertex].reshape(-1).tolist()
        for vertex in network.sorted_vertices(code.tables)
    }
    return data


def load_certificate(source: Union[str, Path], network: Network) -> Certificate:
    """
    Read a certificate from a path.

    Raises:
        CertificateFormatError: unreadable file, bad JSON or schema problems
    """
    path = Path(source)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise CertificateFormatError(f"cannot read certificate {path}: {exc.strerror}") from exc
    return parse_certificate_text(text, network)


def parse_certificate_text(text: str, network: Network) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(
            f"certificate syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise CertificateFormatError("certificate must be a JSON object")
    return certificate_from_data(data, network)


def dump_certificate(certificate: Certificate, path: Union[str, Path, None] = None) -> str:
    """Certificate text; also written to ``path`` when given."""
    text = json.dumps(certificate_to_data(certificate), indent=2) + '\n'
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding='utf-8')
    return text
