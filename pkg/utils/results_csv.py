"""
CSV output for sweeps and validation batches.

The header is fixed per table and carries a schema_version column. Opening
an existing file appends to it after checking that its header matches.
"""

import csv
from pathlib import Path

from config.settings import CSV_SCHEMA_VERSION
from models.errors import ConfigError

SWEEP_COLUMNS = ('network_id', 'scheme', 'mu_avg', 'cap_avg', 'analytic_PL',
                 'sim_PL', 'sim_ci', 'status', 'schema_version')
VALIDATION_COLUMNS = ('network_id', 'node_count', 'analytic_PL', 'sim_PL',
                      'sim_ci', 'agrees', 'status', 'schema_version')


class ResultsWriter:
    """Single writer for one CSV table; every row is flushed as written."""

    def __init__(self, path, columns):
        self.path = Path(path)
        self.columns = tuple(columns)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        if not fresh:
            with open(self.path, newline='', encoding='utf-8') as existing:
                header = next(csv.reader(existing), [])
            if tuple(header) != self.columns:
                raise ConfigError(f"{self.path} has a different header; refusing to append")
        self.file = open(self.path, 'a', newline='', encoding='utf-8')
        self.writer = csv.DictWriter(self.file, fieldnames=self.columns)
        if fresh:
            self.writer.writeheader()
        self.rows_written = 0

    def write(self, records):
        for record in records:
            row = {key: ('' if record.get(key) is None else record.get(key)) for key in self.columns}
            row['schema_version'] = CSV_SCHEMA_VERSION
            self.writer.writerow(row)
            self.rows_written += 1
        self.file.flush()

    def close(self):
        self.file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def read_rows(path):
    """All rows of a results CSV as dictionaries of strings."""
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))
