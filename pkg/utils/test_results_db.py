import sqlite3

from utils.results_db import ResultsDB


def test_insert_result(tmp_path):
    db = ResultsDB(db_path=str(tmp_path / 'test_results.db'), command='sweep', arguments={'seed': 7})
    record = {
        'network_id': 0,
        'scheme': 'fair',
        'mu_avg': 0.2326,
        'cap_avg': 1000.0,
        'analytic_PL': 1.5e-5,
        'sim_PL': None,
        'sim_ci': None,
        'status': 'ok',
    }
    db.add_result('sweep', record)
    db.add_result('validation', {'network_id': 1, 'node_count': 12, 'status': 'failed: DisconnectedNetwork'})
    assert db.results('sweep') == [record]
    assert len(db.results()) == 2
    session_id = db.session_id
    db.close()

    conn = sqlite3.connect(str(tmp_path / 'test_results.db'))
    command, arguments, ended = conn.execute(
        'SELECT command, arguments, end_timestamp FROM session WHERE id = ?', (session_id,)).fetchone()
    scheme, loss = conn.execute('SELECT scheme, analytic_loss FROM result WHERE kind = ?', ('sweep',)).fetchone()
    conn.close()
    assert command == 'sweep'
    assert '"seed": 7' in arguments
    assert ended is not None
    assert (scheme, loss) == ('fair', 1.5e-5)


def test_sessions_accumulate(tmp_path):
    path = str(tmp_path / 'results.db')
    ResultsDB(db_path=path, command='sweep').close()
    db = ResultsDB(db_path=path, command='validate')
    assert db.session_id == 2
    assert db.results() == []
    db.close()
