"""
Shared fixtures: built-in networks, alphabets and shipped certificates.
"""

import pytest
from django.conf import settings

from modules.coding.serializers import load_certificate
from modules.coding.services import make_alphabet
from modules.networks.services import builtin_network, validate_network


@pytest.fixture
def data_dir():
    return settings.NETWORKS_CONFIG['DATA_DIR']


@pytest.fixture
def butterfly():
    return builtin_network('butterfly')


@pytest.fixture
def fig3():
    return builtin_network('fig3')


@pytest.fixture
def combination():
    return builtin_network('combination:5,2')


@pytest.fixture
def single_edge():
    return validate_network(
        {'vertices': ['S', 'T'], 'edges': [['e1', 'S', 'T']], 'source': 'S', 'terminals': ['T']},
        name='single_edge',
    )


@pytest.fixture
def path_network():
    return validate_network(
        {'vertices': ['S', 'V', 'T'], 'edges': [['e1', 'S', 'V'], ['e2', 'V', 'T']],
         'source': 'S', 'terminals': ['T']},
        name='path',
    )


@pytest.fixture
def gf2():
    return make_alphabet(2, want_field=True)


@pytest.fixture
def gf3():
    return make_alphabet(3, want_field=True)


@pytest.fixture
def gf4():
    return make_alphabet(4, want_field=True)


@pytest.fixture
def example1(butterfly, data_dir):
    return load_certificate(data_dir / 'certificates' / 'butterfly_example1.json', butterfly)


@pytest.fixture
def fast_clock(settings):
    """Check the deadline at every search node."""
    settings.SEARCH_CONFIG = {**settings.SEARCH_CONFIG, 'NODE_CHECK_INTERVAL': 1}
    return settings
