"""
Tests for the reversed space of receivers.
"""
import numpy as np

from django.test import SimpleTestCase

from core.errors import EmbeddingError
from fockspace.linalg import gram_matrix, orthonormalize_states
from fockspace.modes import FockBasisState, channel, pol_h, pol_v
from fockspace.states import PhotonicState
from receivers.builders import alice_for, make_receiver
from receivers.receiver import bb84_source
from receivers.reversal import embed_source, project, reversed_space

SAMPLES = 1000
BUILT_IN = (
    'interferometric-6mode',
    'interferometric-2mode',
    'interferometric-defended-10mode',
    'interferometric-middle-bin',
    'polarization-threshold',
    'ideal-bb84',
    'blinded-bright',
)


def time_bins(p_basis):
    """Return the channel time bins of a coordinate-aligned basis."""
    bins = []
    for state in p_basis:
        (basis_state,) = state.amplitudes
        bins.append(None if basis_state.is_vacuum else
                    basis_state.occupation[0][0].index)
    return bins


def orthogonal_complement_sample(rng, p_basis, probe_basis):
    """Create and return a random normalized state orthogonal to H^P."""
    weights = rng.normal(size=len(probe_basis)) + \
        1j * rng.normal(size=len(probe_basis))
    state = PhotonicState(dict(zip(probe_basis, weights)))
    for k, coefficient in zip(p_basis, project(p_basis, state)):
        state = state - k * coefficient
    return state.normalize()


class ReversedSpaceDimensionTests(SimpleTestCase):
    """Test the reversed space of the interferometric receivers."""

    def test_six_mode(self):
        """Test the 6-mode receiver gives span{V, t'-1..t'2}."""
        p_basis = reversed_space(make_receiver('interferometric-6mode'))

        self.assertEqual(time_bins(p_basis), [None, -1, 0, 1, 2])

    def test_defended(self):
        """Test the defended receiver gives span{V, t'-2..t'3}."""
        p_basis = reversed_space(
            make_receiver('interferometric-defended-10mode'))

        self.assertEqual(time_bins(p_basis), [None, -2, -1, 0, 1, 2, 3])

    def test_middle_bin(self):
        """Test a receiver measuring only s1, d1 gives span{V, t'0, t'1}."""
        p_basis = reversed_space(make_receiver('interferometric-middle-bin'))

        self.assertEqual(time_bins(p_basis), [None, 0, 1])

    def test_two_mode(self):
        """Test the receiver measuring d0, s2 and s1, d1 gives dimension 5."""
        p_basis = reversed_space(make_receiver('interferometric-2mode'))

        self.assertEqual(time_bins(p_basis), [None, -1, 0, 1, 2])

    def test_polarization_threshold(self):
        """Test the threshold receiver reaches every state up to two photons."""
        p_basis = reversed_space(make_receiver('polarization-threshold'))

        self.assertEqual(len(p_basis), 6)

    def test_blinded_bright(self):
        """Test the bright receiver spans the vacuum and four bright states."""
        p_basis = reversed_space(make_receiver('blinded-bright'))

        self.assertEqual(len(p_basis), 5)


class ReversedSpaceProperties(SimpleTestCase):
    """Test structural properties of the reversed space."""

    def test_orthonormal_and_idempotent(self):
        """Test H^P is orthonormal and stable under re-orthonormalization."""
        for kind in BUILT_IN:
            p_basis = reversed_space(make_receiver(kind))
            again = orthonormalize_states(p_basis)

            gram = gram_matrix(p_basis)
            self.assertLess(np.abs(gram - np.eye(len(p_basis))).max(), 1e-9)
            self.assertEqual(len(again), len(p_basis))

    def test_alice_states_embedded(self):
        """Test Alice's ideal states lie inside H^P for every receiver."""
        for kind in BUILT_IN:
            receiver = make_receiver(kind)
            p_basis = reversed_space(receiver)

            lost = embed_source(p_basis, alice_for(receiver))

            self.assertLess(max(lost.values()), 1e-9)

    def test_embedding_error_reports_lost_norm(self):
        """Test a source outside H^P raises an embedding error."""
        p_basis = reversed_space(make_receiver('interferometric-middle-bin'))
        alice = bb84_source('shifted', PhotonicState.single(channel(0)),
                            PhotonicState.single(channel(2)))

        with self.assertRaises(EmbeddingError) as raised:
            embed_source(p_basis, alice)

        self.assertAlmostEqual(raised.exception.context['lost_norm']['1'], 1.0)

    def test_attack_surface_complete_interferometric(self):
        """Test states orthogonal to H^P never reach a non-loss outcome."""
        rng = np.random.default_rng(7)
        probe_basis = [FockBasisState.vacuum()] + [
            FockBasisState.of({channel(t): 1}) for t in range(-4, 7)
        ]
        receivers = [
            (receiver, reversed_space(receiver))
            for receiver in (
                make_receiver(kind) for kind in BUILT_IN
                if kind.startswith('interferometric')
            )
        ]
        for n in range(SAMPLES):
            receiver, p_basis = receivers[n % len(receivers)]
            state = orthogonal_complement_sample(rng, p_basis, probe_basis)
            for setting in receiver.settings:
                amplitudes = setting.outcome_amplitudes(state)
                for outcome_id, amplitude in zip(
                        setting.outcome_ids, amplitudes):
                    if setting.interpretation.lookup(outcome_id).is_valid:
                        self.assertLess(abs(amplitude), 1e-9)

    def test_attack_surface_complete_polarization(self):
        """Test three-photon states never reach a threshold outcome."""
        rng = np.random.default_rng(11)
        receiver = make_receiver('polarization-threshold')
        p_basis = reversed_space(receiver)
        probe_basis = [
            FockBasisState.of({pol_h(): h, pol_v(): 3 - h}) for h in range(4)
        ]
        for _ in range(50):
            state = orthogonal_complement_sample(rng, p_basis, probe_basis)
            for setting in receiver.settings:
                self.assertLess(
                    np.abs(setting.outcome_amplitudes(state)).max(), 1e-9)

    def test_reversed_space_deterministic(self):
        """Test repeated calls give the same basis."""
        receiver = make_receiver('interferometric-6mode')

        first = reversed_space(receiver)
        second = reversed_space(receiver)

        for a, b in zip(first, second):
            self.assertTrue(a.is_close(b))
