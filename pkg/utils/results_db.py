import json
import sqlite3
from datetime import datetime
from pathlib import Path


class ResultsDB:
    def __init__(self, db_path='results.db', command=None, arguments=None, schema_path=None):
        self.db_path = db_path
        self.conn = sqlite3.connect(self.db_path)
        self.cursor = self.conn.cursor()
        self.session_id = None

        if schema_path is None:
            schema_path = Path(__file__).parent / 'results_schema.sql'
        with open(schema_path, 'r') as f:
            schema = f.read()
        self.cursor.executescript(schema)
        self.conn.commit()

        # One session per command run
        self.create_session(command, arguments)

    def create_session(self, command=None, arguments=None):
        """Create a new session for this command run."""
        start_timestamp = datetime.now().isoformat()
        self.cursor.execute(
            'INSERT INTO session (start_timestamp, command, arguments) VALUES (?, ?, ?)',
            (start_timestamp, command, json.dumps(arguments or {}, default=str))
        )
        self.conn.commit()
        self.session_id = self.cursor.lastrowid
        return self.session_id

    def end_session(self):
        """Mark the current session as ended."""
        if self.session_id:
            end_timestamp = datetime.now().isoformat()
            self.cursor.execute(
                'UPDATE session SET end_timestamp = ?, updated_at = CURRENT_TIMESTAMP WHERE id = ?',
                (end_timestamp, self.session_id)
            )
            self.conn.commit()

    def add_result(self, kind, record):
        """Add one sweep or validation row.

        Args:
            kind: 'sweep' or 'validation'
            record: Dictionary with the row's fields; stored whole as JSON
        """
        if self.session_id is None:
            raise RuntimeError("No active session. Call create_session() first.")
        self.cursor.execute(
            'INSERT INTO result (session_id, recorded_at, kind, network_id, scheme, analytic_loss, sim_loss, status, data) '
            'VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)',
            (self.session_id, datetime.now().isoformat(), kind,
             record.get('network_id'), record.get('scheme'),
             record.get('analytic_PL'), record.get('sim_PL'), record.get('status'),
             json.dumps(record, default=str))
        )
        self.conn.commit()

    def results(self, kind=None):
        """Rows of the current session as dictionaries, oldest first."""
        query = 'SELECT data FROM result WHERE session_id = ?'
        params = [self.session_id]
        if kind is not None:
            query += ' AND kind = ?'
            params.append(kind)
        self.cursor.execute(query + ' ORDER BY id', params)
        return [json.loads(row[0]) for row in self.cursor.fetchall()]

    def close(self):
        """Close the database connection and end the session."""
        self.end_session()
        self.conn.close()
