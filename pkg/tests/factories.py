"""
Factories for random valid networks.

Every network is a seeded layered DAG: intermediates draw one or two
in-edges from earlier vertices, terminals draw theirs from anything but
other terminals, and dangling intermediates are wired to a terminal.
"""

import random

import factory

from modules.networks.domain import Network
from modules.networks.services import validate_network


def random_network(seed: int, intermediates: int = 2, terminals: int = 2, max_in: int = 2) -> Network:
    rng = random.Random(seed)
    inner = [f"V{i}" for i in range(1, intermediates + 1)]
    sinks = [f"T{i}" for i in range(1, terminals + 1)]
    edges = []

    def connect(tail, head):
        edges.append([f"e{len(edges) + 1}", tail, head])

    for index, vertex in enumerate(inner):
        for _ in range(rng.randint(1, max_in)):
            connect(rng.choice(['S'] + inner[:index]), vertex)
    for terminal in sinks:
        for _ in range(rng.randint(1, max_in)):
            connect(rng.choice(['S'] + inner), terminal)
    for vertex in inner:
        if not any(tail == vertex for _, tail, _ in edges):
            connect(vertex, rng.choice(sinks))

    return validate_network(
        {'vertices': ['S'] + inner + sinks, 'edges': edges, 'source': 'S', 'terminals': sinks},
        name=f"random_{seed}",
    )


class RandomNetworkFactory(factory.Factory):
    """``RandomNetworkFactory(seed=3)`` always yields the same network."""

    class Meta:
        model = Network

    seed = factory.Sequence(lambda n: n)
    intermediates = 2
    terminals = 2
    max_in = 2

    @classmethod
    def _build(cls, model_class, *args, **kwargs):
        return random_network(**kwargs)

    @classmethod
    def _create(cls, model_class, *args, **kwargs):
        return random_network(**kwargs)
