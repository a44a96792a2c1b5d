"""
Tests for the binary feasibility model and its export.
"""

import itertools
import json
import math
import re

import pulp
import pytest

from modules.coding.domain import NetworkCode, OuterCode
from modules.coding.services import full_outer_code, is_unambiguous, make_alphabet, make_outer_code
from modules.modeling.domain import LinearConstraint
from modules.modeling.services import (
    build_model, decode_assignment, encode_pair, export_model, mccormick_linearize, model_stats,
    to_pulp, write_model_files,
)
from modules.networks.services import extend_edge_order
from modules.search.services import brute_force_oracle, count_network_codes
from shared.exceptions import ModelSizeError, ValidationException
from tests.factories import RandomNetworkFactory


def _xor_code(butterfly):
    order = extend_edge_order(butterfly)
    return NetworkCode.from_edge_functions(order, 2, {'e7': lambda a, b: a ^ b})


def _index_set_counts(network, q, code_size):
    """Sizes of every variable and row family, counted from the definitions."""
    order = extend_edge_order(network)
    n_in = {v: q ** len(order.in_edges(v)) for v in network.vertices}
    n_out = {v: q ** len(order.out_edges(v)) for v in network.vertices}
    emitters = network.vertices - network.terminals
    receivers = network.vertices - {network.source}
    inner = network.intermediates
    z = sum(n_in[v] * n_out[v] for v in inner)
    return {
        'x': code_size * sum(n_out[v] for v in emitters),
        'y': code_size * sum(n_in[v] for v in receivers),
        'z': z,
        'w': code_size * z,
        'C1': code_size * len(emitters),
        'C2': code_size * len(receivers),
        'C3': code_size * sum(n_in[network.edge_map[e.id].head] for e in network.edges),
        'C4': sum(n_in[v] for v in inner),
        'C5': code_size * sum(n_in[v] for v in inner),
        'MC': 4 * code_size * z,
        'C6': code_size * sum(n_out[v] for v in inner),
        'C7': sum(n_in[t] for t in network.terminals),
    }


def _lp_sections(text):
    """Lines of an LP file grouped under their section keyword."""
    keywords = {'Minimize', 'Maximize', 'Subject To', 'Bounds', 'Binaries', 'Generals', 'End'}
    sections, current = {}, None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped in keywords:
            current = stripped
            sections[current] = []
        elif current and stripped and not stripped.startswith('\\'):
            sections[current].append(stripped)
    return sections


class TestMcCormick:
    @pytest.mark.parametrize('y,z', list(itertools.product((0, 1), repeat=2)))
    def test_product_is_forced(self, y, z):
        rows = mccormick_linearize([('w', 'y', 'z')])
        allowed = [
            w for w in (0, 1)
            if all(row.satisfied({'w': w, 'y': y, 'z': z}) for row in rows)
        ]
        assert allowed == [y * z]

    def test_four_rows_per_product(self):
        rows = mccormick_linearize([('w1', 'a', 'b'), ('w2', 'c', 'd')])
        assert len(rows) == 8
        assert {row.tag for row in rows} == {'MC'}


class TestModelSize:
    def test_single_edge(self, single_edge):
        stats = model_stats(build_model(single_edge, make_alphabet(2), 2))
        assert stats['variables']['z'] == 0
        assert stats['variables']['w'] == 0
        nonzero = {tag for tag, count in stats['constraints'].items() if count}
        assert nonzero == {'C1', 'C2', 'C3', 'C7'}

    @pytest.mark.parametrize('q,code_size', [(2, 4), (3, 9), (2, 1)])
    def test_butterfly_counts_match_index_sets(self, butterfly, q, code_size):
        stats = model_stats(build_model(butterfly, make_alphabet(q), code_size))
        expected = _index_set_counts(butterfly, q, code_size)
        for kind in ('x', 'y', 'z', 'w'):
            assert stats['variables'][kind] == expected[kind]
        for tag in ('C1', 'C2', 'C3', 'C4', 'C5', 'MC', 'C6', 'C7'):
            assert stats['constraints'][tag] == expected[tag]
        assert stats['constraints']['MC'] == 4 * stats['variables']['w']

    def test_fig3_counts_match_index_sets(self, fig3):
        stats = model_stats(build_model(fig3, make_alphabet(2), 3))
        expected = _index_set_counts(fig3, 2, 3)
        assert stats['variables']['z'] == expected['z']
        assert stats['constraints']['C3'] == expected['C3']

    def test_code_size_range(self, butterfly):
        with pytest.raises(ValidationException):
            build_model(butterfly, make_alphabet(2), 5)
        with pytest.raises(ValidationException):
            build_model(butterfly, make_alphabet(2), 0)

    def test_table_limit(self, butterfly):
        with pytest.raises(ModelSizeError):
            build_model(butterfly, make_alphabet(3), 2, max_table_variables=10)

    def test_constraints_reject_repeated_variables(self):
        with pytest.raises(ValueError):
            LinearConstraint('bad', 'C1', ((1, 'a'), (1, 'a')), '=', 1)


class TestFixingsAndSymmetry:
    def test_routing_fixings_on_butterfly(self, butterfly):
        model = build_model(butterfly, make_alphabet(3), 2, routing_fix=True)
        rows = model.constraints_tagged('FIX')
        per_vertex = {}
        for row in rows:
            vertex = model.variable_map[row.terms[0][1]].vertex
            per_vertex[vertex] = per_vertex.get(vertex, 0) + 1
        assert per_vertex == {'V1': 24, 'V2': 24, 'V4': 24}

    def test_path_vertex_fixings(self, path_network):
        model = build_model(path_network, make_alphabet(2), 2, routing_fix=True)
        assert len(model.constraints_tagged('FIX')) == 2
        assert len(model.variables_of('z')) == 4

    def test_no_symmetry_rows_for_one_codeword(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 1, symmetry_break=True)
        assert model.constraints_tagged('SYM') == []

    def test_symmetry_forces_the_only_sorted_pair(self, path_network):
        model = build_model(path_network, make_alphabet(2), 2, symmetry_break=True)
        rows = model.constraints_tagged('SYM')
        feasible = []
        for first, second in itertools.product((0, 1), repeat=2):
            values = {
                'x_c1_S_0': int(first == 0), 'x_c1_S_1': int(first == 1),
                'x_c2_S_0': int(second == 0), 'x_c2_S_1': int(second == 1),
            }
            if all(row.satisfied(values) for row in rows):
                feasible.append((first, second))
        assert feasible == [(0, 1)]

    def test_name_carries_the_options(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 4, routing_fix=True, symmetry_break=True)
        assert model.name == 'butterfly_q2_M4_rf_sym'


class TestEncodeDecode:
    def test_xor_pair_satisfies_every_row(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 4, routing_fix=True, symmetry_break=True)
        code = _xor_code(butterfly)
        values = encode_pair(model, butterfly, full_outer_code(butterfly, 2), code)
        assert model.violations(values) == []
        certificate = decode_assignment(model, butterfly, make_alphabet(2), values)
        assert is_unambiguous(butterfly, certificate.outer_code, certificate.network_code)

    def test_ambiguous_pair_violates_a_terminal_row(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 2)
        code = NetworkCode.completed(extend_edge_order(butterfly), 2, {})
        outer = make_outer_code(butterfly, 2, [(0, 0), (0, 1)])
        # T1 receives (x1, 0) for both codewords under routing.
        violated = model.violations(encode_pair(model, butterfly, outer, code))
        assert {row.tag for row in violated} == {'C7'}

    def test_unknown_variable(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 1)
        with pytest.raises(ValueError):
            model.violations({'nonsense': 1})


class TestExport:
    def test_export_is_deterministic(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 4)
        first = export_model(model, 'lp')
        assert first == export_model(model, 'lp')
        assert '\\ vertex V1 = V1' in first

    def test_lp_sections_carry_every_row_and_binary(self, butterfly):
        model = build_model(butterfly, make_alphabet(2), 2, routing_fix=True, symmetry_break=True)
        text = export_model(model, 'lp')
        sections = _lp_sections(text)
        headings = [line.strip() for line in text.splitlines() if line.strip() in sections]
        assert headings.index('Minimize') < headings.index('Subject To') < headings.index('Binaries')
        assert headings[-1] == 'End'
        names = [
            match.group(1) for match in map(re.compile(r'^(\S+):').match, sections['Subject To']) if match
        ]
        assert sorted(names) == sorted(row.name for row in model.constraints)
        binaries = set(' '.join(sections['Binaries']).split())
        problem, _ = to_pulp(model)
        assert binaries == {variable.name for variable in problem.variables()} - {'__dummy'}
        bounded = ' '.join(sections.get('Bounds', [])).split()
        assert not binaries & set(bounded)

    def test_mps_reads_back_through_pulp(self, butterfly, tmp_path):
        model = build_model(butterfly, make_alphabet(2), 2, symmetry_break=True)
        model_path, _ = write_model_files(model, 'mps', tmp_path)
        body = model_path.read_text().split('ENDATA')[0] + 'ENDATA\n'
        (tmp_path / 'body.mps').write_text(body)
        variables, problem = pulp.LpProblem.fromMPS(str(tmp_path / 'body.mps'))
        assert sorted(problem.constraints) == sorted(row.name for row in model.constraints)
        variables.pop('__dummy', None)
        assert set(variables) <= set(model.variable_map)
        for name, variable in variables.items():
            assert (variable.lowBound, variable.upBound) == (0, 1), name

    def test_mps(self, butterfly):
        text = export_model(build_model(butterfly, make_alphabet(2), 2), 'mps')
        assert 'ROWS' in text and 'COLUMNS' in text
        assert '* edge e1 = e1' in text

    def test_unknown_format(self, butterfly):
        with pytest.raises(ValidationException):
            export_model(build_model(butterfly, make_alphabet(2), 2), 'xml')

    def test_reserved_characters_are_mapped(self):
        from modules.networks.services import validate_network

        network = validate_network({
            'vertices': ['src', 'v-1', 't:1'],
            'edges': [['a/b', 'src', 'v-1'], ['c', 'v-1', 't:1']],
            'source': 'src', 'terminals': ['t:1'],
        }, name='odd names')
        text = export_model(build_model(network, make_alphabet(2), 2), 'lp')
        assert '\\ vertex v_1 = v-1' in text
        assert '\\ edge a_b = a/b' in text

    def test_files_and_sidecar(self, butterfly, tmp_path):
        model = build_model(butterfly, make_alphabet(2), 4, symmetry_break=True)
        model_path, sidecar_path = write_model_files(model, 'lp', tmp_path)
        assert model_path.name == 'butterfly_q2_M4_sym.lp'
        sidecar = json.loads(sidecar_path.read_text())
        assert sidecar['code_size'] == 4
        assert sidecar['options'] == {'routing_fix': False, 'symmetry_break': True}
        assert sidecar['stats']['total_variables'] == len(model.variables)


def _cbc():
    solver = pulp.PULP_CBC_CMD(msg=False)
    if not solver.available():
        pytest.skip('CBC is not available')
    return solver


class TestAgainstCbc:
    def test_feasible_model_decodes_to_an_unambiguous_pair(self, butterfly):
        solver = _cbc()
        alphabet = make_alphabet(2)
        model = build_model(butterfly, alphabet, 4, symmetry_break=True)
        problem, variables = to_pulp(model)
        problem.solve(solver)
        assert pulp.LpStatus[problem.status] == 'Optimal'
        values = {name: round(variable.varValue or 0) for name, variable in variables.items()}
        assert model.violations(values) == []
        certificate = decode_assignment(model, butterfly, alphabet, values)
        assert certificate.size == 4
        assert is_unambiguous(butterfly, certificate.outer_code, certificate.network_code)

    def test_infeasible_model(self, fig3):
        solver = _cbc()
        model = build_model(fig3, make_alphabet(2), 3, routing_fix=True, symmetry_break=True)
        problem, _ = to_pulp(model)
        problem.solve(solver)
        assert pulp.LpStatus[problem.status] == 'Infeasible'


SEMANTIC_SEEDS = range(200)


def _semantic_instance(seed):
    """A random binary network and the code sizes whose oracle run stays small."""
    network = RandomNetworkFactory(seed=seed, intermediates=1 + seed % 2)
    alphabet = make_alphabet(2)
    words = 2 ** len(network.out_edge_ids(network.source))
    count = count_network_codes(network, alphabet)
    sizes = [m for m in range(2, min(3, words) + 1) if count * math.comb(words, m) <= 100_000]
    return network, alphabet, sizes


class TestModelSemantics:
    @pytest.mark.parametrize('seed', SEMANTIC_SEEDS)
    def test_oracle_pairs_satisfy_the_model(self, seed):
        network, alphabet, sizes = _semantic_instance(seed)
        for code_size in sizes:
            result = brute_force_oracle(network, alphabet, code_size)
            if not result.feasible:
                continue
            code = result.certificate.network_code
            words = list(result.certificate.outer_code)
            plain = build_model(network, alphabet, code_size)
            ordered = build_model(network, alphabet, code_size, symmetry_break=True)
            accepted = 0
            for permutation in itertools.permutations(words):
                values = encode_pair(plain, network, OuterCode(permutation), code)
                assert plain.violations(values) == []
                accepted += not ordered.violations(values)
            assert accepted == 1

    @pytest.mark.parametrize('seed', SEMANTIC_SEEDS)
    def test_solver_agrees_with_the_oracle(self, seed):
        network, alphabet, sizes = _semantic_instance(seed)
        if not sizes:
            return
        solver = _cbc()
        for code_size in sizes:
            expected = brute_force_oracle(network, alphabet, code_size).feasible
            for routing_fix, symmetry_break in [(False, False), (True, False), (False, True)]:
                model = build_model(
                    network, alphabet, code_size, routing_fix=routing_fix, symmetry_break=symmetry_break
                )
                problem, variables = to_pulp(model)
                problem.solve(solver)
                status = pulp.LpStatus[problem.status]
                assert status == ('Optimal' if expected else 'Infeasible'), model.name
                if status != 'Optimal':
                    continue
                values = {name: round(variable.varValue or 0) for name, variable in variables.items()}
                certificate = decode_assignment(model, network, alphabet, values)
                assert certificate.size == code_size
                assert is_unambiguous(network, certificate.outer_code, certificate.network_code)
