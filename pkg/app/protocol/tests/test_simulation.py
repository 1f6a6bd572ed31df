"""
Tests for the BB84 simulator and the round log.
"""
import json
import math
import os
import tempfile

import numpy as np

from django.test import SimpleTestCase

from core.errors import ConfigError, EmptyLogError, SchemaVersionError
from attacks.library import make_attack
from protocol.channels import (
    UNMEASURED,
    exact_outcome_distribution,
    make_channel,
)
from protocol.roundlog import RoundLog, read_round_log, write_round_log
from protocol.simulation import run_bb84, sift_and_estimate, simulate_rounds
from receivers.builders import alice_for, make_receiver
from receivers.receiver import COMPUTATIONAL, HADAMARD

ROUNDS = 100_000
TWO_BIN_ROUNDS = 1_000_000


def create_channel(kind, payload=None, receiver=None):
    """Create and return a channel, resolving built-in attack names."""
    if kind == 'attack-isometry' and isinstance(payload, str):
        payload = make_attack(payload, receiver)
    return make_channel(kind, payload, receiver)


def sigma(p, n):
    """Return the binomial standard deviation of a rate."""
    return math.sqrt(p * (1 - p) / n)


class ChannelTests(SimpleTestCase):
    """Test channel construction and exact distributions."""

    def test_unknown_kind(self):
        """Test an unknown channel kind raises."""
        with self.assertRaises(ConfigError):
            make_channel('teleport')

    def test_probability_range(self):
        """Test PNS and loss parameters must be probabilities."""
        with self.assertRaises(ConfigError):
            make_channel('pns', 1.5)
        with self.assertRaises(ConfigError):
            make_channel('lossy', -0.1)

    def test_attack_needs_isometry(self):
        """Test an attack channel rejects a non-attack payload."""
        with self.assertRaises(ConfigError):
            make_channel('attack-isometry', {'name': 'cnot'})

    def test_identity_distribution(self):
        """Test Alice |0> reaches Bob's computational H detector."""
        receiver = make_receiver('ideal-bb84')
        distribution = exact_outcome_distribution(
            None, make_channel('identity'), receiver)

        cell = distribution.cell('0', COMPUTATIONAL)

        self.assertAlmostEqual(cell['H1V0'], 1.0)
        self.assertAlmostEqual(cell[UNMEASURED], 0.0)

    def test_cells_normalized_for_isometries(self):
        """Test every cell of a verified attack sums to one."""
        receiver = make_receiver('interferometric-6mode')
        channel = create_channel('attack-isometry', 'faked-states', receiver)

        distribution = exact_outcome_distribution(None, channel, receiver)

        np.testing.assert_allclose(
            distribution.probabilities.sum(axis=2), 1.0, atol=1e-9)

    def test_faked_states_block_hadamard(self):
        """Test faked states leave no valid Hadamard outcome."""
        receiver = make_receiver('interferometric-6mode')
        channel = create_channel('attack-isometry', 'faked-states', receiver)
        distribution = exact_outcome_distribution(None, channel, receiver)
        setting = receiver.setting(HADAMARD)

        for label in ('+', '-'):
            cell = distribution.cell(label, HADAMARD)
            valid = sum(cell[o] for o in setting.outcome_ids
                        if setting.interpretation.lookup(o).is_valid)
            self.assertAlmostEqual(valid, 0.0)

    def test_lossy_distribution(self):
        """Test a lossy channel moves weight to the vacuum outcome."""
        receiver = make_receiver('ideal-bb84')
        distribution = exact_outcome_distribution(
            None, make_channel('lossy', 0.3), receiver)

        cell = distribution.cell('1', COMPUTATIONAL)

        self.assertAlmostEqual(cell['vac'], 0.3)
        self.assertAlmostEqual(cell['H0V1'], 0.7)


class SimulationTests(SimpleTestCase):
    """Test end-to-end BB84 runs."""

    def test_identity_no_errors(self):
        """Test the unattacked 6-mode receiver has zero QBER."""
        receiver = make_receiver('interferometric-6mode')

        report = run_bb84(None, make_channel('identity'), receiver, 20_000,
                          seed=1)

        self.assertEqual(report.errors, 0)
        self.assertEqual(report.qber, 0.0)
        self.assertGreater(report.tested, 0)

    def test_faked_states(self):
        """Test faked states: no errors, no Hadamard clicks, half in Z."""
        receiver = make_receiver('interferometric-6mode')
        channel = create_channel('attack-isometry', 'faked-states', receiver)

        report = run_bb84(None, channel, receiver, ROUNDS, seed=0)

        computational = report.basis(COMPUTATIONAL)
        self.assertEqual(report.errors, 0)
        self.assertEqual(report.basis(HADAMARD).efficiency, 0.0)
        self.assertAlmostEqual(
            computational.efficiency, 0.5,
            delta=4 * sigma(0.5, computational.rounds))
        self.assertEqual(report.eve_guess_accuracy, 1.0)

    def test_two_bin_attack(self):
        """Test the p_i = 1/2 attack gives efficiencies 1/8 and 1/4."""
        receiver = make_receiver('interferometric-2mode')
        channel = create_channel('attack-isometry', 'd2-half', receiver)

        report = run_bb84(None, channel, receiver, TWO_BIN_ROUNDS, seed=3)

        computational = report.basis(COMPUTATIONAL)
        hadamard = report.basis(HADAMARD)
        self.assertEqual(report.errors, 0)
        self.assertAlmostEqual(
            computational.efficiency, 0.125,
            delta=4 * sigma(0.125, computational.rounds))
        self.assertAlmostEqual(
            hadamard.efficiency, 0.25, delta=4 * sigma(0.25, hadamard.rounds))
        self.assertEqual(report.eve_guess_accuracy, 1.0)

    def test_cnot_disturbance(self):
        """Test measure-and-keep in Z disturbs a quarter of the key."""
        receiver = make_receiver('ideal-bb84')
        channel = create_channel('attack-isometry', 'cnot', receiver)

        report = run_bb84(None, channel, receiver, ROUNDS, seed=2)

        self.assertAlmostEqual(
            report.qber, 0.25, delta=4 * sigma(0.25, report.tested))
        self.assertEqual(report.basis(COMPUTATIONAL).errors, 0)
        self.assertAlmostEqual(
            report.basis(HADAMARD).qber, 0.5,
            delta=4 * sigma(0.5, report.basis(HADAMARD).tested))

    def test_pns_accuracy(self):
        """Test Eve's PNS accuracy is one half plus half of p_multi."""
        receiver = make_receiver('ideal-bb84')

        report = run_bb84(None, make_channel('pns', 0.1), receiver, ROUNDS,
                          seed=4)

        self.assertAlmostEqual(
            report.eve_guess_accuracy, 0.55,
            delta=4 * sigma(0.55, report.sifted))
        self.assertEqual(report.errors, 0)

    def test_lossy_efficiency(self):
        """Test loss lowers the detection efficiency only."""
        receiver = make_receiver('ideal-bb84')

        report = run_bb84(None, make_channel('lossy', 0.3), receiver, ROUNDS,
                          seed=5)

        stats = report.basis(COMPUTATIONAL)
        self.assertAlmostEqual(stats.efficiency, 0.7,
                               delta=4 * sigma(0.7, stats.rounds))
        self.assertEqual(report.errors, 0)
        self.assertIsNone(report.eve_guess_accuracy)

    def test_efficiency_accounting(self):
        """Test efficiency, loss and invalid rates add up to one."""
        receiver = make_receiver('interferometric-defended-10mode')

        report = run_bb84(None, make_channel('identity'), receiver, 20_000)

        for stats in report.bases.values():
            self.assertAlmostEqual(
                stats.efficiency + stats.loss_rate + stats.invalid_rate, 1.0)
            self.assertLessEqual(stats.sifted, report.rounds)

    def test_deterministic(self):
        """Test a fixed seed gives an identical report."""
        receiver = make_receiver('interferometric-2mode')
        channel = create_channel('attack-isometry', 'd2-half', receiver)

        first = run_bb84(None, channel, receiver, 5000, seed=9)
        second = run_bb84(None, channel, receiver, 5000, seed=9)
        other = run_bb84(None, channel, receiver, 5000, seed=10)

        self.assertEqual(first.as_dict(), second.as_dict())
        self.assertNotEqual(first.as_dict(), other.as_dict())

    def test_deterministic_across_seeds(self):
        """Test every seed reproduces its own report."""
        receiver = make_receiver('interferometric-2mode')
        channel = create_channel('attack-isometry', 'd2-half', receiver)

        for seed in range(200):
            first = run_bb84(None, channel, receiver, 300, seed=seed)
            second = run_bb84(None, channel, receiver, 300, seed=seed)
            self.assertEqual(first.as_dict(), second.as_dict(), seed)

    def assert_born_consistent(self, receiver, channel, rounds, seed):
        alice = alice_for(receiver)
        distribution = exact_outcome_distribution(alice, channel, receiver)

        log = simulate_rounds(alice, channel, receiver, rounds, seed=seed)

        for state in alice.states:
            for setting in receiver.settings:
                rows = ((log.alice_basis == state.basis)
                        & (log.alice_bit == state.bit)
                        & (log.bob_setting == setting.id))
                n = int(rows.sum())
                cell = distribution.cell(state.label, setting.id)
                for outcome, p in cell.items():
                    frequency = float(
                        (rows & (log.outcome_id == outcome)).sum()) / n
                    self.assertAlmostEqual(
                        frequency, p, delta=4 * sigma(p, n) + 1e-12,
                        msg=(receiver.kind, state.label, setting.id, outcome))

    def test_born_consistency(self):
        """Test outcome frequencies match the exact probabilities."""
        receiver = make_receiver('interferometric-6mode')

        self.assert_born_consistent(
            receiver, make_channel('identity'), ROUNDS, seed=6)

    def test_born_consistency_attacked(self):
        """Test frequencies match exact probabilities on every channel kind."""
        ideal = make_receiver('ideal-bb84')
        six_mode = make_receiver('interferometric-6mode')
        two_mode = make_receiver('interferometric-2mode')
        cases = (
            (six_mode,
             create_channel('attack-isometry', 'faked-states', six_mode)),
            (two_mode,
             create_channel('attack-isometry', 'd2-half', two_mode)),
            (ideal, create_channel('attack-isometry', 'cnot', ideal)),
            (ideal, make_channel('pns', 0.1)),
            (ideal, make_channel('lossy', 0.3)),
        )

        for receiver, channel in cases:
            self.assert_born_consistent(receiver, channel, 60_000, seed=17)

    def test_rejects_zero_rounds(self):
        """Test at least one round is required."""
        with self.assertRaises(ConfigError):
            run_bb84(None, make_channel('identity'),
                     make_receiver('ideal-bb84'), 0)


class EstimationTests(SimpleTestCase):
    """Test sifting and estimation from round logs."""

    def test_injected_flips(self):
        """Test a 5% flip rate is estimated within binomial bounds."""
        receiver = make_receiver('ideal-bb84')

        report = run_bb84(None, make_channel('identity'), receiver, ROUNDS,
                          seed=7, flip_fraction=0.05)

        self.assertAlmostEqual(report.qber, 0.05,
                               delta=4 * sigma(0.05, report.tested))

    def test_test_fraction(self):
        """Test the test fraction selects that share of sifted bits."""
        receiver = make_receiver('ideal-bb84')
        log = simulate_rounds(None, make_channel('identity'), receiver,
                              ROUNDS, seed=8)

        report = sift_and_estimate(log, test_fraction=0.25)

        self.assertAlmostEqual(report.tested / report.sifted, 0.25,
                               delta=4 * sigma(0.25, report.sifted))
        with self.assertRaises(ConfigError):
            sift_and_estimate(log, test_fraction=0.0)

    def test_empty_log(self):
        """Test an empty log raises."""
        with self.assertRaises(EmptyLogError):
            RoundLog.from_records([])

    def test_log_round_trip(self):
        """Test a persisted log gives the inline report."""
        receiver = make_receiver('interferometric-2mode')
        channel = create_channel('attack-isometry', 'd2-half', receiver)
        log = simulate_rounds(None, channel, receiver, 3000, seed=11)

        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'rounds.ndjson')
            write_round_log(log, path)
            restored = read_round_log(path)

        self.assertEqual(sift_and_estimate(restored).as_dict(),
                         run_bb84(None, channel, receiver, 3000,
                                  seed=11).as_dict())
        self.assertEqual(restored.meta['receiver'], 'interferometric-2mode')

    def test_log_records(self):
        """Test records carry every persisted field."""
        receiver = make_receiver('ideal-bb84')
        log = simulate_rounds(None, make_channel('identity'), receiver, 5)

        record = next(log.records())

        self.assertEqual(record['round'], 0)
        self.assertIsNone(record['eve_guess'])
        self.assertIn(record['alice_basis'], (COMPUTATIONAL, HADAMARD))

    def test_schema_version_mismatch(self):
        """Test a log with another schema version is refused."""
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'rounds.ndjson')
            with open(path, 'w') as handle:
                handle.write(json.dumps({'schema_version': '0'}) + '\n')

            with self.assertRaises(SchemaVersionError):
                read_round_log(path)
