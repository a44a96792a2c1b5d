"""
Tests for alphabets, network codes, transmission and unambiguity.
"""

import itertools
import json

import numpy as np
import pytest

from modules.coding.domain import Certificate, NetworkCode, OuterCode
from modules.coding.serializers import certificate_to_data, load_certificate, parse_certificate_text
from modules.coding.services import (
    assert_within_bound, capacity_value, channel_output, code_size_bound, constant_code,
    full_outer_code, is_linear, is_unambiguous, linear_matrices, make_alphabet, make_outer_code,
    reindex_code, replication_code, transmit,
)
from modules.networks.services import edge_order_extensions, extend_edge_order
from shared.exceptions import (
    AlphabetError, ArityMismatchError, BoundViolationError, CertificateFormatError, OuterCodeError,
)


class TestAlphabets:
    @pytest.mark.parametrize('q', [2, 3, 4, 5, 7, 8, 9])
    def test_field_axioms(self, q):
        field = make_alphabet(q, want_field=True)
        elements = range(q)
        for a, b in itertools.product(elements, repeat=2):
            assert field.add(a, b) == field.add(b, a)
            assert field.mul(a, b) == field.mul(b, a)
        for a, b, c in itertools.product(elements, repeat=3):
            assert field.add(field.add(a, b), c) == field.add(a, field.add(b, c))
            assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
            assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))
        for a in elements:
            assert field.add(a, 0) == a
            assert field.mul(a, 1) == a
            assert any(field.add(a, b) == 0 for b in elements)
            if a:
                assert any(field.mul(a, b) == 1 for b in elements)

    def test_gf4_uses_the_configured_modulus(self, gf4):
        assert gf4.modulus == (1, 1, 1)
        # a * a = a + 1
        assert gf4.mul(2, 2) == 3
        assert str(gf4) == 'GF(4)'

    def test_six_is_not_a_field(self):
        with pytest.raises(AlphabetError):
            make_alphabet(6, want_field=True)
        plain = make_alphabet(6)
        assert not plain.is_field
        assert str(plain) == 'A6'
        with pytest.raises(AlphabetError):
            plain.add(1, 2)

    def test_modulus_override_after_first_use(self, settings):
        assert make_alphabet(8, want_field=True).modulus == (1, 1, 0, 1)
        settings.CODING_CONFIG = {**settings.CODING_CONFIG, 'FIELD_MODULI': {8: (1, 0, 1, 1)}}
        field = make_alphabet(8, want_field=True)
        assert field.modulus == (1, 0, 1, 1)
        # a * a^2 = a^2 + 1
        assert field.mul(2, 4) == 5

    def test_too_small(self):
        with pytest.raises(AlphabetError):
            make_alphabet(1)


class TestTransmission:
    def test_example_channel_output(self, butterfly, example1):
        code = example1.network_code
        assert channel_output(butterfly, code, 'T1', (1, 2)) == (2, 0)
        assert channel_output(butterfly, code, 'T2', (1, 2)) == (1, 0)

    def test_transcript_follows_the_vertex_functions(self, butterfly, example1):
        transcript = transmit(butterfly, example1.network_code, (1, 2))
        assert transcript.symbols == {
            'e1': 1, 'e2': 2, 'e3': 2, 'e4': 1, 'e5': 2, 'e6': 1, 'e7': 0, 'e8': 0, 'e9': 0,
        }

    def test_routing_code_carries_zero_everywhere(self, fig3):
        transcript = transmit(fig3, replication_code(fig3, 3), (0, 0))
        assert set(transcript.symbols.values()) == {0}

    def test_wrong_codeword_length(self, butterfly):
        with pytest.raises(ArityMismatchError):
            transmit(butterfly, replication_code(butterfly, 2), (0, 1, 1))

    def test_code_for_another_network(self, butterfly, fig3):
        with pytest.raises(ArityMismatchError):
            transmit(butterfly, replication_code(fig3, 2), (0, 0))

    def test_independent_of_the_edge_order(self, butterfly, example1):
        code = example1.network_code
        default = code.order
        orders = [order for order in edge_order_extensions(butterfly, limit=40)
                  if order.sequence != default.sequence]
        assert orders
        for order in (orders[0], orders[-1]):
            other = reindex_code(code, order)
            for word in full_outer_code(butterfly, 3):
                symbols = dict(zip(default.out_edges('S'), word))
                other_word = tuple(symbols[e] for e in order.out_edges('S'))
                assert transmit(butterfly, other, other_word).symbols == transmit(butterfly, code, word).symbols


class TestNetworkCodes:
    def test_missing_table(self, butterfly):
        order = extend_edge_order(butterfly)
        tables = dict(replication_code(butterfly, 2).tables)
        del tables['V3']
        with pytest.raises(ArityMismatchError):
            NetworkCode(order, 2, tables)

    def test_wrong_shape(self, butterfly):
        order = extend_edge_order(butterfly)
        tables = dict(replication_code(butterfly, 2).tables)
        tables['V3'] = np.zeros((2, 1), dtype=np.int64)
        with pytest.raises(ArityMismatchError):
            NetworkCode(order, 2, tables)

    def test_symbols_out_of_range(self, butterfly):
        order = extend_edge_order(butterfly)
        tables = dict(replication_code(butterfly, 2).tables)
        tables['V4'] = np.full((2, 2), 5, dtype=np.int64)
        with pytest.raises(ArityMismatchError):
            NetworkCode(order, 2, tables)

    def test_edge_functions_agree_with_matrices(self, fig3, gf3):
        order = extend_edge_order(fig3)
        by_edges = NetworkCode.from_edge_functions(order, 3, {
            'e11': lambda a, b: (a + 2 * b) % 3,
        })
        by_matrix = NetworkCode.from_matrices(order, gf3, {'V3': [[1, 2]]})
        assert by_edges == by_matrix

    def test_linear_matrices_of_shipped_certificates(self, fig3, gf3, data_dir):
        certificate = load_certificate(data_dir / 'certificates' / 'fig3_linear_gf3.json', fig3)
        matrices = linear_matrices(certificate.network_code, gf3)
        assert np.array_equal(matrices['V3'], [[1, 2]])
        assert np.array_equal(matrices['V4'], [[1, 1]])

    @pytest.mark.parametrize('network_name,name', [
        ('butterfly', 'butterfly_example1'),
        ('fig3', 'fig3_linear_gf3'),
        ('fig3', 'fig3_linear_gf4'),
    ])
    def test_linear_codes_are_additive(self, request, data_dir, network_name, name):
        network = request.getfixturevalue(network_name)
        certificate = load_certificate(data_dir / 'certificates' / f"{name}.json", network)
        field, code = certificate.alphabet, certificate.network_code
        rng = np.random.default_rng(7)
        for _ in range(25):
            left, right = rng.integers(0, field.q, size=(2, 2))
            total = field.add_vectors(left, right)
            for terminal in network.terminals:
                expected = field.add_vectors(
                    np.array(channel_output(network, code, terminal, tuple(left.tolist()))),
                    np.array(channel_output(network, code, terminal, tuple(right.tolist()))),
                )
                observed = channel_output(network, code, terminal, tuple(int(s) for s in total))
                assert list(observed) == expected.tolist()

    def test_constant_code_is_not_linear(self, butterfly, gf3):
        assert not is_linear(constant_code(butterfly, 3, symbol=1), gf3)
        assert is_linear(constant_code(butterfly, 3, symbol=0), gf3)


class TestUnambiguity:
    def test_example_pair(self, butterfly, example1):
        assert example1.size == 9
        assert is_unambiguous(butterfly, example1.outer_code, example1.network_code)
        assert is_linear(example1.network_code, example1.alphabet)

    def test_constant_code_has_a_witness(self, butterfly):
        code = constant_code(butterfly, 2)
        outer = make_outer_code(butterfly, 2, [(0, 0), (1, 1)])
        report = is_unambiguous(butterfly, outer, code)
        assert not report
        assert report.witness.terminal == 'T1'
        assert report.witness.output == (0, 0)

    def test_routing_separates_two_words(self, butterfly):
        outer = make_outer_code(butterfly, 2, [(0, 0), (1, 1)])
        assert is_unambiguous(butterfly, outer, replication_code(butterfly, 2))

    @pytest.mark.parametrize('name', ['fig3_linear_gf3', 'fig3_linear_gf4'])
    def test_shipped_linear_pairs(self, fig3, data_dir, name):
        certificate = load_certificate(data_dir / 'certificates' / f"{name}.json", fig3)
        assert certificate.size == certificate.alphabet.q ** 2
        assert is_unambiguous(fig3, certificate.outer_code, certificate.network_code)
        assert is_linear(certificate.network_code, certificate.alphabet)

    def test_deleting_a_codeword_keeps_unambiguity(self, butterfly, example1):
        smaller = example1.outer_code.without(4)
        assert len(smaller) == 8
        assert is_unambiguous(butterfly, smaller, example1.network_code)

    def test_bound(self, butterfly):
        assert code_size_bound(butterfly, 3) == 9
        assert_within_bound(butterfly, 3, 9)
        with pytest.raises(BoundViolationError):
            assert_within_bound(butterfly, 3, 10)

    def test_capacity_value(self):
        assert capacity_value(9, 3).value == 2.0
        assert capacity_value(6, 3).value == pytest.approx(1.6309297535714575)
        assert str(capacity_value(4, 2)) == 'log_2 4 = 2.0000'


class TestOuterCodes:
    def test_repeated_codeword(self, butterfly):
        with pytest.raises(OuterCodeError):
            make_outer_code(butterfly, 2, [(0, 1), (0, 1)])

    def test_empty(self, butterfly):
        with pytest.raises(OuterCodeError):
            make_outer_code(butterfly, 2, [])

    def test_wrong_length(self, butterfly):
        with pytest.raises(OuterCodeError):
            make_outer_code(butterfly, 2, [(0, 1, 0)])


class TestCertificateFiles:
    def test_dump_and_parse(self, butterfly, example1):
        text = json.dumps(certificate_to_data(example1))
        parsed = parse_certificate_text(text, butterfly)
        assert parsed.outer_code == example1.outer_code
        assert parsed.network_code == example1.network_code

    def test_missing_vertices_are_completed(self, butterfly):
        text = json.dumps({
            'alphabet': {'q': 2, 'field': False},
            'outer_code': [[0, 0], [1, 1]],
            'network_code': {},
        })
        certificate = parse_certificate_text(text, butterfly)
        assert certificate.network_code == replication_code(butterfly, 2)

    def test_wrong_table_length(self, butterfly):
        text = json.dumps({
            'alphabet': {'q': 2},
            'outer_code': [[0, 0]],
            'network_code': {'V1': [0, 0, 1]},
        })
        with pytest.raises(CertificateFormatError):
            parse_certificate_text(text, butterfly)

    def test_not_json(self, butterfly):
        with pytest.raises(CertificateFormatError):
            parse_certificate_text('{', butterfly)

    def test_certificate_properties(self, butterfly, example1):
        assert isinstance(example1, Certificate)
        assert example1.network == butterfly
        assert isinstance(example1.outer_code, OuterCode)
