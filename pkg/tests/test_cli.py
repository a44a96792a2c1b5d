"""
Tests for the netcap command line.
"""

import json
from io import StringIO

import pytest
from django.core.management import call_command

from modules.cli.runner import run
from modules.coding.services import make_alphabet
from modules.search.services import max_code_size


def _run(*argv):
    stdout, stderr = StringIO(), StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def _json(*argv):
    code, out, err = _run(*argv, '--json')
    return code, json.loads(out) if out else None, err


class TestUsage:
    def test_unknown_subcommand(self):
        code, _, err = _run('bogus')
        assert code == 2
        assert err.startswith('error[usage]')

    def test_network_and_builtin_are_exclusive(self, data_dir):
        code, _, _ = _run('validate', '--builtin', 'fig3', '--network', str(data_dir / 'fig3.json'))
        assert code == 2

    def test_linear_only_needs_field(self):
        code, _, err = _run('solve', '--builtin', 'butterfly', '--q', '3', '--M', '2', '--linear-only')
        assert code == 2
        assert '--linear-only needs --field' in err

    def test_unknown_builtin(self):
        code, _, err = _run('validate', '--builtin', 'petersen')
        assert code == 2
        assert 'petersen' in err


class TestNetworkCommands:
    def test_validate_builtin(self):
        code, report, _ = _json('validate', '--builtin', 'butterfly')
        assert code == 0
        assert report['valid'] is True
        assert report['mu'] == 2
        assert report['edge_order'][:2] == ['e1', 'e2']

    def test_validate_file(self, data_dir):
        code, out, _ = _run('validate', '--network', str(data_dir / 'fig3.json'))
        assert code == 0
        assert 'valid' in out

    def test_duplicate_edge_id(self, tmp_path):
        path = tmp_path / 'dup.json'
        path.write_text(json.dumps({
            'vertices': ['S', 'T'], 'edges': [['e1', 'S', 'T'], ['e1', 'S', 'T']],
            'source': 'S', 'terminals': ['T'],
        }))
        code, _, err = _run('validate', '--network', str(path))
        assert code == 2
        assert "duplicate edge id 'e1'" in err

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.json'
        path.write_text('')
        code, _, err = _run('validate', '--network', str(path))
        assert code == 2
        assert 'syntax error' in err

    def test_axiom_violations_are_listed(self, tmp_path):
        path = tmp_path / 'cycle.json'
        path.write_text(json.dumps({
            'vertices': ['S', 'A', 'B', 'T'],
            'edges': [['e1', 'S', 'A'], ['e2', 'A', 'B'], ['e3', 'B', 'A'], ['e4', 'B', 'T']],
            'source': 'S', 'terminals': ['T'],
        }))
        code, _, err = _run('validate', '--network', str(path))
        assert code == 2
        assert 'cycle' in err

    def test_mincut_combination(self):
        code, report, _ = _json('mincut', '--builtin', 'combination:5,2')
        assert code == 0
        assert report['mu'] == 2
        assert len(report['terminals']) == 10
        assert all(cut['value'] == 2 for cut in report['terminals'].values())

    def test_mincut_one_terminal(self):
        code, report, _ = _json('mincut', '--builtin', 'butterfly', '--terminal', 'T2')
        assert code == 0
        assert list(report['terminals']) == ['T2']

    def test_examples(self):
        code, report, _ = _json('examples')
        assert code == 0
        assert [row['builtin'] for row in report] == ['butterfly', 'fig3', 'combination:5,2']
        assert report[1]['known_capacities']['general']['2'] == '1'


class TestModelCommand:
    def test_writes_model_and_sidecar(self, tmp_path):
        code, report, _ = _json(
            'model', '--builtin', 'butterfly', '--q', '2', '--M', '4',
            '--routing-fix', '--output-dir', str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / 'butterfly_q2_M4_rf.lp').exists()
        assert (tmp_path / 'butterfly_q2_M4_rf.json').exists()
        assert report['stats']['constraints']['FIX'] > 0

    def test_stats_text(self, tmp_path):
        code, out, _ = _run(
            'model', '--builtin', 'butterfly', '--q', '2', '--M', '2', '--format', 'mps',
            '--output-dir', str(tmp_path), '--stats',
        )
        assert code == 0
        assert 'variables:' in out
        assert (tmp_path / 'butterfly_q2_M2.mps').exists()


class TestSearchCommands:
    def test_solve_feasible_writes_certificate(self, tmp_path):
        path = tmp_path / 'cert.json'
        code, report, _ = _json(
            'solve', '--builtin', 'butterfly', '--q', '2', '--M', '4', '--certificate-out', str(path),
        )
        assert code == 0
        assert report['status'] == 'feasible'
        code, report, _ = _json('verify', '--builtin', 'butterfly', '--certificate', str(path))
        assert code == 0
        assert report['valid'] is True

    def test_solve_infeasible(self):
        code, report, _ = _json('solve', '--builtin', 'fig3', '--q', '2', '--M', '3')
        assert code == 1
        assert report['status'] == 'infeasible'

    def test_capacity_butterfly(self):
        code, report, _ = _json('capacity', '--builtin', 'butterfly', '--q', '3')
        assert code == 0
        assert report['M_star'] == 9
        assert report['status'] == 'proven'
        assert report['certificate_verified'] is True

    def test_capacity_matches_the_library(self, butterfly):
        _, report, _ = _json('capacity', '--builtin', 'butterfly', '--q', '2')
        assert report['M_star'] == max_code_size(butterfly, make_alphabet(2)).m_star

    def test_capacity_timeout_reports_bounds(self, fast_clock):
        code, report, _ = _json('capacity', '--builtin', 'combination:5,2', '--q', '3', '--time-limit', '1e-9')
        assert code == 3
        assert report['status'] == 'bounds'
        assert report['M_star'] is None
        assert (report['lower'], report['upper']) == (1, 9)

    def test_linear_capacity(self, tmp_path):
        report_path = tmp_path / 'report.json'
        code, out, _ = _run('linear-capacity', '--builtin', 'fig3', '--q', '3', '--report-out', str(report_path))
        assert code == 0
        assert 'M* = 9' in out
        report = json.loads(report_path.read_text())
        assert report['linear'] is True

    def test_verify_shipped_certificate(self, data_dir):
        path = data_dir / 'certificates' / 'butterfly_example1.json'
        code, out, _ = _run('verify', '--builtin', 'butterfly', '--certificate', str(path))
        assert code == 0
        assert 'linear: yes' in out

    def test_verify_ambiguous_certificate(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text(json.dumps({
            'alphabet': {'q': 2}, 'outer_code': [[0, 0], [0, 1]], 'network_code': {},
        }))
        code, report, _ = _json('verify', '--builtin', 'butterfly', '--certificate', str(path))
        assert code == 1
        assert report['valid'] is False
        assert report['witness']['terminal'] == 'T1'

    def test_malformed_certificate(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('[1, 2')
        code, _, err = _run('verify', '--builtin', 'butterfly', '--certificate', str(path))
        assert code == 2
        assert err.startswith('error[certificate_format]')


class TestManagementCommand:
    def test_call_command(self):
        stdout = StringIO()
        call_command('netcap', 'mincut', '--builtin', 'butterfly', '--json', stdout=stdout)
        assert json.loads(stdout.getvalue())['mu'] == 2

    def test_failure_exits(self):
        with pytest.raises(SystemExit) as exc:
            call_command('netcap', 'solve', '--builtin', 'fig3', '--q', '2', '--M', '3',
                         stdout=StringIO(), stderr=StringIO())
        assert exc.value.code == 1
