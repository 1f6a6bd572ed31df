"""
Tests for fuzzing campaigns.
"""
import json
import os
import tempfile

from django.test import SimpleTestCase

from core.errors import ConfigError
from fuzz.campaign import (
    AnomalyTag,
    FuzzStrategy,
    replay,
    run_fuzz_campaign,
    write_trace,
)
from fuzz.device import (
    make_apd_receiver_device,
    make_ideal_device,
    make_threshold_device,
)
from fuzz.serializers import (
    anomaly_from_json,
    fuzz_input_from_json,
    strategy_from_json,
)
from receivers.builders import make_receiver

ALL_PROPERTIES = ('Blinding', 'WeakUnderBlinding', 'StrongUnderBlinding')

_REPORTS = {}


def create_report(seed=0, max_cases=1000):
    """Return a cached APD campaign report."""
    key = (seed, max_cases)
    if key not in _REPORTS:
        _REPORTS[key] = run_fuzz_campaign(
            make_apd_receiver_device(), FuzzStrategy(max_cases=max_cases),
            seed=seed)
    return _REPORTS[key]


class APDCampaignTests(SimpleTestCase):
    """Test the campaign rediscovers the blinding properties."""

    def test_properties_for_every_seed(self):
        """Test all three properties are found for seeds 0 to 9."""
        for seed in range(10):
            report = create_report(seed)
            self.assertEqual(report.properties_found, ALL_PROPERTIES, seed)
            self.assertLessEqual(report.test_cases_run, 10_000)

    def test_properties_come_from_anomalies(self):
        """Test every property has an anomaly carrying its tag."""
        report = create_report()

        tags = {anomaly.tag.value for anomaly in report.anomalies}

        self.assertTrue(set(report.properties_found) <= tags)

    def test_derived_records_build_bright_receiver(self):
        """Test the derived records give the hand-built receiver's sets."""
        report = create_report()
        derived = make_receiver(
            'blinded-bright', {'vulnerabilities': report.bright_records()})
        built = make_receiver('blinded-bright')

        for setting in built.settings:
            self.assertEqual(
                derived.setting(setting.id).interpretation,
                setting.interpretation)
            self.assertEqual(derived.setting(setting.id).outcome_ids,
                             setting.outcome_ids)

    def test_derived_records(self):
        """Test one forced result is derived per bright polarization."""
        report = create_report()

        forced = {(r['polarization'], r['basis'], r['bit'])
                  for r in report.derived_vulnerabilities}

        self.assertEqual(forced, {
            ('H', 'computational', 0),
            ('V', 'computational', 1),
            ('+45', 'hadamard', 0),
            ('-45', 'hadamard', 1),
        })

    def test_derived_records_replay(self):
        """Test each derived record replays identically on a fresh device."""
        report = create_report()

        for record in report.derived_vulnerabilities:
            anomaly = report.anomaly(record['anomaly'])
            classes, reproduced = replay(make_apd_receiver_device, anomaly)
            self.assertTrue(reproduced, anomaly.id)
            self.assertEqual(len(classes), 1)

    def test_reproducible(self):
        """Test the same seed gives the same report."""
        first = run_fuzz_campaign(make_apd_receiver_device(),
                                  FuzzStrategy(max_cases=300), seed=4)
        second = run_fuzz_campaign(make_apd_receiver_device(),
                                   FuzzStrategy(max_cases=300), seed=4)

        self.assertEqual(first.as_dict(), second.as_dict())

    def test_coverage_monotone(self):
        """Test more cases never lose a property."""
        found = [
            set(create_report(seed=1, max_cases=cases).properties_found)
            for cases in (10, 100, 400, 1000)
        ]

        for smaller, larger in zip(found, found[1:]):
            self.assertTrue(smaller <= larger)

    def test_budget(self):
        """Test the campaign stops at max_cases."""
        report = create_report(max_cases=10)

        self.assertEqual(report.test_cases_run, 10)
        self.assertEqual(len(report.trace), 10)


class ReferenceCampaignTests(SimpleTestCase):
    """Test campaigns against devices without blinding."""

    def test_ideal_device_has_no_anomalies(self):
        """Test a photon-number-resolving device shows nothing unusual."""
        report = run_fuzz_campaign(make_ideal_device(), seed=0)

        self.assertEqual(report.anomalies, ())
        self.assertEqual(report.properties_found, ())

    def test_threshold_device_photon_number_blind(self):
        """Test a photon pair passing as a single photon is flagged."""
        report = run_fuzz_campaign(make_threshold_device(), seed=0)

        tags = {anomaly.tag for anomaly in report.anomalies}

        self.assertIn(AnomalyTag.PHOTON_NUMBER_BLIND, tags)
        self.assertEqual(report.properties_found, ())
        pair = next(a for a in report.anomalies
                    if a.tag is AnomalyTag.PHOTON_NUMBER_BLIND)
        self.assertEqual(pair.input.final.mean_photons, 2.0)


class ArtifactTests(SimpleTestCase):
    """Test anomaly documents and traces."""

    def test_anomaly_document_replays(self):
        """Test an anomaly restored from JSON replays."""
        report = create_report()
        anomaly = next(a for a in report.anomalies
                       if a.tag is AnomalyTag.WEAK_UNDER_BLINDING)

        restored = anomaly_from_json(json.loads(json.dumps(anomaly.as_dict())))
        _, reproduced = replay(make_apd_receiver_device, restored)

        self.assertEqual(restored.input, anomaly.input)
        self.assertTrue(reproduced)

    def test_trace(self):
        """Test the trace holds a header and one line per case."""
        report = create_report(max_cases=30)

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'trace.ndjson')
            write_trace(report, path)
            with open(path) as handle:
                lines = [json.loads(line) for line in handle]

        self.assertEqual(lines[0]['kind'], 'fuzz-trace')
        self.assertEqual(len(lines), 31)
        self.assertEqual(lines[1]['stage'], 0)

    def test_malformed_documents(self):
        """Test malformed inputs and strategies raise config errors."""
        with self.assertRaises(ConfigError):
            fuzz_input_from_json({'pulses': []})
        with self.assertRaises(ConfigError):
            strategy_from_json({'max_cases': 0})

    def test_strategy_document(self):
        """Test a strategy document keeps unspecified defaults."""
        strategy = strategy_from_json({'max_cases': 50})

        self.assertEqual(strategy.max_cases, 50)
        self.assertEqual(strategy.depth, 2)
        self.assertEqual(len(strategy.grid), 9)
