"""
Tests for rendering artifact tables.
"""
import copy

from django.test import SimpleTestCase

from core.errors import ConfigError, SchemaVersionError
from core.reporting import emit_report


def create_basis(rounds, efficiency, qber=0.0, accuracy=1.0):
    """Create and return per-basis statistics for a simulation artifact."""
    sifted = round(rounds * efficiency)
    return {
        'rounds': rounds,
        'sifted': sifted,
        'tested': sifted // 2,
        'errors': 0,
        'qber': qber,
        'efficiency': efficiency,
        'loss_rate': 1 - efficiency,
        'invalid_rate': 0.0,
        'eve_guess_accuracy': accuracy,
    }


def create_simulation_artifact():
    """Create and return the artifact of the half-weight two-mode attack."""
    return {
        'kind': 'simulation-report',
        'schema_version': '1',
        'receiver': 'interferometric-2mode',
        'channel': {'kind': 'attack-isometry', 'attack': 'd2-half'},
        'rounds': 1_000_000,
        'seed': 0,
        'test_fraction': 0.5,
        'sifted': 93_750,
        'tested': 46_875,
        'errors': 0,
        'qber': 0.0,
        'invalid_rate': 0.0,
        'eve_guess_accuracy': 1.0,
        'bases': {
            'hadamard': create_basis(250_000, 0.25),
            'computational': create_basis(250_000, 0.125),
        },
    }


def create_fuzz_artifact():
    """Create and return a fuzz artifact with all three properties."""
    return {
        'kind': 'fuzz-report',
        'schema_version': '1',
        'device': {'name': 'apd', 'detectors': 'apd'},
        'seed': 3,
        'strategy': {'max_cases': 1000},
        'test_cases_run': 412,
        'properties_found': ['Blinding', 'WeakUnderBlinding',
                             'StrongUnderBlinding'],
        'anomaly_counts': {'Blinding': 4, 'StrongUnderBlinding': 4,
                           'WeakUnderBlinding': 2},
        'anomalies': [{'id': f'A{i:05d}'} for i in range(10)],
        'derived_vulnerabilities': [{
            'polarization': 'V', 'basis': 'computational', 'bit': 1,
            'mean_photons': 3.0, 'blinding_mean_photons': 100.0,
            'anomaly': 'A00210',
        }],
    }


class ReportTests(SimpleTestCase):
    """Test emit_report."""

    def test_efficiency_row(self):
        """Test the simulation table carries the per-basis efficiency row."""
        report = emit_report([create_simulation_artifact()])

        self.assertIn('efficiency comp=0.125 had=0.250 qber=0\n', report)
        self.assertTrue(report.startswith(
            'simulation receiver=interferometric-2mode '
            'channel=attack-isometry:d2-half rounds=1000000 seed=0\n'))

    def test_basis_columns_in_stable_order(self):
        """Test bases are listed alphabetically whatever the dict order."""
        report = emit_report([create_simulation_artifact()])

        rows = report.splitlines()[3:]
        self.assertTrue(rows[0].startswith('basis'))
        self.assertTrue(rows[1].startswith('computational'))
        self.assertTrue(rows[2].startswith('hadamard'))

    def test_identical_bytes(self):
        """Test equal artifacts render to identical text."""
        first = create_simulation_artifact()
        second = copy.deepcopy(first)
        second['bases'] = dict(reversed(list(second['bases'].items())))

        self.assertEqual(emit_report([first]), emit_report([second]))

    def test_empty_report(self):
        """Test an empty artifact list renders nothing."""
        self.assertEqual(emit_report([]), '')

    def test_fuzz_properties(self):
        """Test a fuzz artifact lists the properties it found."""
        report = emit_report([create_fuzz_artifact()])

        self.assertIn(
            'properties Blinding, WeakUnderBlinding, StrongUnderBlinding',
            report)
        self.assertIn('cases=412 anomalies=10', report)
        self.assertIn('derived V computational bit=1', report)

    def test_blocks_separated(self):
        """Test several artifacts render as blank-line separated blocks."""
        report = emit_report([create_simulation_artifact(),
                              create_fuzz_artifact()])

        self.assertEqual(report.count('\n\n'), 1)
        self.assertTrue(report.endswith('\n'))

    def test_schema_version_mismatch(self):
        """Test artifacts from another schema version are rejected."""
        artifact = create_simulation_artifact()
        artifact['schema_version'] = '0'

        with self.assertRaises(SchemaVersionError) as context:
            emit_report([artifact])

        self.assertEqual(context.exception.exit_code, 2)
        self.assertEqual(context.exception.context['found'], '0')

    def test_unknown_kind(self):
        """Test an unknown artifact kind is a config error."""
        with self.assertRaises(ConfigError):
            emit_report([{'kind': 'plot', 'schema_version': '1'}])
        with self.assertRaises(ConfigError):
            emit_report(['not an artifact'])
