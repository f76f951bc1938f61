import pytest

from models.errors import ConfigError
from utils.results_csv import ResultsWriter, SWEEP_COLUMNS, VALIDATION_COLUMNS, read_rows


def sweep_row(network_id, scheme='uniform', analytic=0.25):
    return {'network_id': network_id, 'scheme': scheme, 'mu_avg': 0.2, 'cap_avg': 10.0,
            'analytic_PL': analytic, 'sim_PL': None, 'sim_ci': None, 'status': 'ok'}


def test_header_and_rows(tmp_path):
    path = tmp_path / 'out' / 'sweep.csv'
    with ResultsWriter(path, SWEEP_COLUMNS) as writer:
        writer.write([sweep_row(0), sweep_row(0, 'fair', 0.125)])
        assert writer.rows_written == 2
    assert path.read_text().splitlines()[0] == ','.join(SWEEP_COLUMNS)
    rows = read_rows(path)
    assert [row['scheme'] for row in rows] == ['uniform', 'fair']
    assert rows[1]['analytic_PL'] == '0.125'
    assert rows[0]['sim_PL'] == ''
    assert rows[0]['schema_version'] == '1'


def test_appends_to_matching_file(tmp_path):
    path = tmp_path / 'sweep.csv'
    with ResultsWriter(path, SWEEP_COLUMNS) as writer:
        writer.write([sweep_row(0)])
    with ResultsWriter(path, SWEEP_COLUMNS) as writer:
        writer.write([sweep_row(1)])
    assert [row['network_id'] for row in read_rows(path)] == ['0', '1']


def test_refuses_a_different_header(tmp_path):
    path = tmp_path / 'results.csv'
    with ResultsWriter(path, SWEEP_COLUMNS) as writer:
        writer.write([sweep_row(0)])
    with pytest.raises(ConfigError):
        ResultsWriter(path, VALIDATION_COLUMNS)
