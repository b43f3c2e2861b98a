"""Tests for the command-line entry point."""

import json
import os

import pytest
import yaml

import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from gchains.scripts.gchains_cli import build_parser, main


SMALL = {
    'schema_version': 1,
    'name': 'cli-markov',
    'root_seed': 3,
    'model': {'family': 'finite-memory', 'order': 1, 'table': [[0.8, 0.2], [0.3, 0.7]]},
    'experiments': [
        {'kind': 'weak-l2', 'N': 10, 'replicas': 100},
        {'kind': 'oracle-check', 'depth': 5, 'N': 3},
    ],
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / 'small.yaml'
    path.write_text(yaml.safe_dump(SMALL))
    return str(path)


class TestParser:
    """Test argument parsing."""

    def test_run_needs_source(self):
        """run requires --config or --preset."""
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(['run'])
        assert exc.value.code == 1

    def test_unknown_flag(self):
        """Usage errors exit with 1."""
        with pytest.raises(SystemExit) as exc:
            main(['list-presets', '--colour'])
        assert exc.value.code == 1

    def test_sources_exclusive(self):
        """--config and --preset cannot be combined."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(['run', '--config', 'a.yaml', '--preset', 'markov-oracle'])


class TestCommands:
    """Test the verbs end to end."""

    def test_list_presets(self, capsys):
        """One line per preset."""
        assert main(['list-presets']) == 0
        out = capsys.readouterr().out
        assert 'markov-oracle' in out
        assert len(out.strip().splitlines()) == 7

    def test_list_presets_json(self, capsys):
        """--json prints the catalog."""
        assert main(['list-presets', '--json']) == 0
        catalog = json.loads(capsys.readouterr().out)
        assert len(catalog) == 7
        assert {'name', 'anchor', 'description', 'experiments'} <= set(catalog[0])

    def test_validate_config(self, config_file, capsys):
        """Valid configs print a one-line summary."""
        assert main(['validate-config', config_file]) == 0
        assert capsys.readouterr().out.startswith('OK: cli-markov (2 experiments')

    def test_validate_bad_config(self, tmp_path, capsys):
        """Invalid configs exit with 1 and name the field."""
        bad = dict(SMALL, schema_version=9)
        path = tmp_path / 'bad.yaml'
        path.write_text(yaml.safe_dump(bad))
        assert main(['validate-config', str(path)]) == 1
        assert 'schema_version' in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """Unreadable files are errors, not tracebacks."""
        assert main(['validate-config', str(tmp_path / 'missing.yaml')]) == 1

    def test_unknown_preset(self, capsys):
        """Unknown presets exit with 1."""
        assert main(['run', '--preset', 'no-such-preset']) == 1
        assert 'no-such-preset' in capsys.readouterr().err

    def test_run_config(self, config_file, tmp_path, capsys):
        """run writes the report directory and prints verdicts."""
        out = tmp_path / 'out'
        assert main(['run', '--config', config_file, '--out', str(out), '--workers', '1']) == 0
        assert (out / 'cli-markov' / 'report.json').exists()
        assert (out / 'cli-markov' / 'weak-l2.csv').exists()
        printed = capsys.readouterr().out
        assert 'oracle-check' in printed
        assert 'exit code 0' in printed

    def test_run_seed_override(self, config_file, tmp_path):
        """--seed is echoed in the payload."""
        out = tmp_path / 'out'
        assert main(['run', '--config', config_file, '--out', str(out), '--seed', '42']) == 0
        with open(out / 'cli-markov' / 'report.json') as f:
            payload = json.load(f)['payload']
        assert payload['root_seed'] == 42
        assert payload['overrides'] == {'seed': 42}

    def test_oracle_check(self, config_file, tmp_path):
        """oracle-check runs only the self checks."""
        out = tmp_path / 'out'
        assert main(['oracle-check', '--config', config_file, '--out', str(out)]) == 0
        target = out / 'cli-markov-oracle'
        assert (target / 'oracle-check-window-law.csv').exists()
        assert not (target / 'weak-l2.csv').exists()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
