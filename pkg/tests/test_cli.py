import json

import pytest

from cli.runner import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run
from conftest import CHARTS, WHITE_PAIR


def chart_path(name):
    return str(CHARTS / name)


class TestChartCommands:

    def test_validate_ok(self, capsys):
        assert run(['validate', chart_path('white_pair.chart')]) == EXIT_OK

    def test_validate_bad_degree(self, capsys):
        assert run(['validate', chart_path('bad_degree.chart')]) == EXIT_FAILURE
        assert 'w1' in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert run(['validate', chart_path('no_such.chart')]) == EXIT_FAILURE

    def test_usage_error(self, capsys):
        assert run(['validate']) == EXIT_USAGE
        assert run(['no_such_command']) == EXIT_USAGE

    def test_info_json(self, capsys):
        assert run(['--json', 'info', chart_path('white_pair.chart')]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data['schema'] == 1
        assert data['vertices'] == {'white': 2}
        assert data['edges'] == 6
        assert data['type'] == {'m': 1, 'counts': [2]}

    def test_headerless_chart_takes_the_configured_degree(self, capsys, tmp_path):
        path = tmp_path / 'pair.chart'
        path.write_text(WHITE_PAIR.replace('chart n=3\n', ''))
        assert run(['--json', 'info', str(path)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)['degree'] == 4

    def test_lenses(self, capsys):
        assert run(['--json', 'lenses', chart_path('white_pair.chart'), '--label', '1']) == EXIT_OK

    @pytest.mark.parametrize('entry,expected', [('theta_003', EXIT_FAILURE)])
    def test_match_missing_entry(self, capsys, entry, expected):
        assert run(['match', chart_path('white_pair.chart'), '--entry', entry]) == expected


class TestMoveCommands:

    def test_list_templates(self, capsys):
        assert run(['moves', 'list']) == EXIT_OK
        assert 'c_ii_push' in capsys.readouterr().out

    def test_search_needs_a_chart(self, capsys):
        assert run(['moves', 'search']) == EXIT_FAILURE


class TestPipelineCommands:

    def test_enumerate(self, capsys):
        assert run(['enumerate', '--w', '5', '--preset', 'paper', '--expect-count', '9']) == EXIT_OK
        assert 'classes: 9' in capsys.readouterr().out

    def test_enumerate_wrong_expectation(self, capsys):
        assert run(['enumerate', '--w', '5', '--preset', 'paper', '--expect-count', '8']) == EXIT_FAILURE

    def test_minimal_preset_alias(self, capsys):
        assert run(['enumerate', '--w', '5', '--preset', 'minimal', '--expect-count', '9']) == EXIT_OK

    def test_orientations(self, capsys):
        assert run(['--json', 'orientations', 'twin_bigons']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert len(data['classes']) == 4

    def test_verify(self, capsys, tmp_path):
        output = tmp_path / 'report.json'
        summary = tmp_path / 'summary.md'
        code = run(['verify', '--expect-survivors', '2', '--output', str(output),
                    '--markdown', str(summary)])
        assert code == EXIT_OK
        data = json.loads(output.read_text())
        assert data['schema'] == 1
        assert len(data['verdicts']) == 9
        assert summary.read_text().startswith('# Verification summary')

    def test_verify_one_candidate(self, capsys):
        assert run(['--json', 'verify', '--candidate', 'theta_111']) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data['verdict'] == 'excluded'

    def test_strict_verify_fails_without_a_needed_rule(self, capsys):
        code = run(['verify', '--candidate', 'theta_003', '--without', 'pentagon_two_feelers', '--strict'])
        assert code == EXIT_FAILURE

    def test_render_entry(self, capsys, tmp_path):
        output = tmp_path / 'twin.svg'
        assert run(['render', '--entry', 'twin_bigons', '--output', str(output)]) == EXIT_OK
        assert output.read_text().startswith('<svg')

    def test_render_needs_one_source(self, capsys):
        assert run(['render']) == EXIT_FAILURE
