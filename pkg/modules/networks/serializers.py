"""
Serializers for the network file format.

A network file is JSON::

    {"vertices": [...], "edges": [[id, tail, head], ...],
     "source": ..., "terminals": [...], "name": "optional"}

Edge order in the file is irrelevant; the EdgeOrder is always recomputed.
"""

import json
from collections import Counter
from pathlib import Path

from rest_framework import serializers

from shared.exceptions import NetworkFileError
from shared.utils import flatten_errors
from .domain import Network
from .services import serialize_network, validate_network


class NetworkFileSerializer(serializers.Serializer):
    """Schema of a network file."""

    name = serializers.CharField(required=False, allow_blank=True)
    vertices = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), min_length=3, max_length=3),
    )
    source = serializers.CharField()
    terminals = serializers.ListField(child=serializers.CharField(), allow_empty=False)

    def validate_vertices(self, value):
        """Reject repeated vertex ids."""
        repeated = sorted(vertex for vertex, count in Counter(value).items() if count > 1)
        if repeated:
            raise serializers.ValidationError(f"duplicate vertex id '{repeated[0]}'")
        return value

    def validate_edges(self, value):
        """Reject repeated edge ids, naming the first one."""
        counts = Counter(edge[0] for edge in value)
        repeated = sorted(edge_id for edge_id, count in counts.items() if count > 1)
        if repeated:
            raise serializers.ValidationError(f"duplicate edge id '{repeated[0]}'")
        return value

    def validate(self, attrs):
        """Check that every referenced vertex is declared."""
        vertices = set(attrs['vertices'])
        errors = {}
        for index, (edge_id, tail, head) in enumerate(attrs['edges']):
            for end in (tail, head):
                if end not in vertices:
                    errors.setdefault('edges', []).append(
                        f"edges[{index}] ('{edge_id}'): unknown vertex '{end}'"
                    )
        if attrs['source'] not in vertices:
            errors['source'] = [f"unknown vertex '{attrs['source']}'"]
        unknown = [t for t in attrs['terminals'] if t not in vertices]
        if unknown:
            errors['terminals'] = [f"unknown vertex '{unknown[0]}'"]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


def parse_network_text(text: str, default_name: str = '') -> Network:
    """
    Parse and validate the text of a network file.

    Raises:
        NetworkFileError: syntax or schema problems, with diagnostics
        NetworkValidationError: axiom violations
    """
    if not text.strip():
        raise NetworkFileError("syntax error: empty network file", ["line 1 column 1: no content"])
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}",
            [f"line {exc.lineno} column {exc.colno}: {exc.msg}"],
        ) from exc
    if not isinstance(raw, dict):
        raise NetworkFileError("schema error: top level must be an object")

    serializer = NetworkFileSerializer(data=raw)
    if not serializer.is_valid():
        diagnostics = flatten_errors(serializer.errors)
        raise NetworkFileError(f"schema error: {diagnostics[0]}", diagnostics)
    return validate_network(serializer.validated_data, name=raw.get('name') or default_name)


def load_network_file(path) -> Network:
    """Read a network file from disk."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise NetworkFileError(f"cannot read network file {path}: {exc.strerror}") from exc
    return parse_network_text(text, default_name=path.stem)


def dump_network(network: Network) -> str:
    """Network file text for a network."""
    return json.dumps(serialize_network(network), indent=2) + '\n'
