"""
Columnar round logs and their newline-delimited JSON form.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from core.conf import qkdlab_setting
from core.errors import ConfigError, EmptyLogError, SchemaVersionError

logger = logging.getLogger(__name__)

COLUMNS = (
    'alice_basis',
    'alice_bit',
    'bob_setting',
    'bob_basis',
    'outcome_id',
    'interpretation',
    'eve_guess',
)

NO_GUESS = -1


@dataclass(frozen=True, eq=False)
class RoundLog:
    """One array per column, indexed by round.

    eve_guess is NO_GUESS where Eve made no guess.
    """
    alice_basis: np.ndarray
    alice_bit: np.ndarray
    bob_setting: np.ndarray
    bob_basis: np.ndarray
    outcome_id: np.ndarray
    interpretation: np.ndarray
    eve_guess: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(getattr(self, column)) for column in COLUMNS}
        if len(lengths) > 1:
            raise ConfigError('Round log columns differ in length.')

    def __len__(self):
        return len(self.alice_bit)

    @property
    def seed(self):
        return self.meta.get('seed', qkdlab_setting('DEFAULT_SEED'))

    def records(self):
        for n in range(len(self)):
            yield {
                'round': n,
                'alice_basis': str(self.alice_basis[n]),
                'alice_bit': int(self.alice_bit[n]),
                'bob_setting': str(self.bob_setting[n]),
                'bob_basis': str(self.bob_basis[n]),
                'outcome_id': str(self.outcome_id[n]),
                'interpretation': str(self.interpretation[n]),
                'eve_guess': None if self.eve_guess[n] == NO_GUESS
                else int(self.eve_guess[n]),
            }

    @classmethod
    def from_records(cls, records, meta=None):
        records = list(records)
        if not records:
            raise EmptyLogError('The round log holds no rounds.')
        try:
            columns = {
                column: [record[column] for record in records]
                for column in COLUMNS
            }
        except KeyError as exc:
            raise ConfigError(
                'Round record is missing a field.', {'field': str(exc)})
        columns['alice_bit'] = np.array(columns['alice_bit'], dtype=np.int8)
        columns['eve_guess'] = np.array(
            [NO_GUESS if g is None else g for g in columns['eve_guess']],
            dtype=np.int8,
        )
        for column in ('alice_basis', 'bob_setting', 'bob_basis',
                       'outcome_id', 'interpretation'):
            columns[column] = np.array(columns[column], dtype=str)
        return cls(meta=dict(meta or {}), **columns)


def write_round_log(log, path):
    """Write a header line followed by one JSON record per round."""
    header = dict(log.meta, kind='round-log',
                  schema_version=qkdlab_setting('ARTIFACT_SCHEMA_VERSION'))
    with open(path, 'w') as handle:
        handle.write(json.dumps(header, sort_keys=True) + '\n')
        for record in log.records():
            handle.write(json.dumps(record, sort_keys=True) + '\n')
    logger.info('Wrote %d rounds to %s', len(log), path)


def read_round_log(path):
    """Create and return a RoundLog from its NDJSON file."""
    with open(path) as handle:
        lines = [line for line in handle if line.strip()]
    if not lines:
        raise EmptyLogError('The round log file is empty.', {'path': str(path)})
    try:
        header = json.loads(lines[0])
        records = [json.loads(line) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ConfigError('Round log is not valid JSON.',
                          {'path': str(path), 'line': exc.lineno})
    expected = qkdlab_setting('ARTIFACT_SCHEMA_VERSION')
    if header.get('schema_version') != expected:
        raise SchemaVersionError(
            'Round log was written with another schema version.',
            {'found': header.get('schema_version'), 'expected': expected},
        )
    meta = {k: v for k, v in header.items()
            if k not in ('kind', 'schema_version')}
    return RoundLog.from_records(records, meta)
