"""
Tests for the zero-error constraint system.
"""
import math

import numpy as np

from django.test import SimpleTestCase

from core.errors import EmbeddingError
from fockspace.modes import channel
from fockspace.states import PhotonicState
from attacks.constraints import (
    build_constraint_system,
    null_space,
    projection_residual,
)
from receivers.builders import make_receiver
from receivers.receiver import COMPUTATIONAL, HADAMARD, bb84_source

# coordinate-aligned H^P of the 6-mode receiver: vac, t'-1, t'0, t'1, t'2
SIX_MODE_K = {None: 0, -1: 1, 0: 2, 1: 3, 2: 4}


def create_system(kind='interferometric-6mode', **params):
    """Create and return the constraint system of a built-in receiver."""
    return build_constraint_system(make_receiver(kind), **params)


def find_row(system, alice, setting, outcome):
    """Return the index of the row for an (alice, setting, outcome) triple."""
    for n, row in enumerate(system.rows):
        if (row.alice_label, row.setting, row.outcome) == \
                (alice, setting, outcome):
            return n
    raise AssertionError(f'No row for {alice} {setting} {outcome}')


class NullSpaceTests(SimpleTestCase):
    """Test the null-space kernel."""

    def test_zero_matrix(self):
        """Test an all-zero system leaves every direction free."""
        vectors = null_space(np.zeros((2, 4)))

        self.assertEqual(len(vectors), 4)

    def test_identity_matrix(self):
        """Test a full-rank system has an empty null space."""
        self.assertEqual(null_space(np.eye(3)), [])

    def test_orthonormal(self):
        """Test the returned basis is orthonormal and annihilated."""
        rng = np.random.default_rng(3)
        matrix = rng.normal(size=(3, 7)) + 1j * rng.normal(size=(3, 7))

        basis = np.array(null_space(matrix)).T

        self.assertEqual(basis.shape[1], 4)
        np.testing.assert_allclose(
            basis.conj().T @ basis, np.eye(4), atol=1e-10)
        np.testing.assert_allclose(matrix @ basis, 0, atol=1e-10)

    def test_pinned_columns(self):
        """Test pinned columns vanish in every basis vector."""
        vectors = null_space(np.zeros((1, 4)), pinned=(0, 2))

        self.assertEqual(len(vectors), 2)
        for vector in vectors:
            self.assertEqual(vector[0], 0)
            self.assertEqual(vector[2], 0)


class ConstraintSystemTests(SimpleTestCase):
    """Test constraint systems of built-in receivers."""

    def test_six_mode_plus_s1_row(self):
        """Test the Hadamard s1 row for Alice |+> on the 6-mode receiver."""
        system = create_system()
        row = system.matrix[find_row(system, '+', HADAMARD, 's1')]
        a = 1 / (2 * math.sqrt(2))
        expected = np.zeros(10, dtype=complex)
        expected[0 * 5 + SIX_MODE_K[0]] = -a
        expected[1 * 5 + SIX_MODE_K[0]] = -a
        expected[0 * 5 + SIX_MODE_K[1]] = a
        expected[1 * 5 + SIX_MODE_K[1]] = a

        np.testing.assert_allclose(row, expected, atol=1e-12)

    def test_six_mode_zero_rows_force_late_bins(self):
        """Test Alice |0> forbids t'1 and t'2 components."""
        system = create_system()

        for vector in null_space(system):
            self.assertLess(abs(vector[SIX_MODE_K[1]]), 1e-10)
            self.assertLess(abs(vector[SIX_MODE_K[2]]), 1e-10)

    def test_rows_record_their_triple(self):
        """Test every row names its Alice state, setting and outcome."""
        system = create_system()

        self.assertEqual(len(system.rows), system.matrix.shape[0])
        for row in system.rows:
            self.assertIn(row.alice_label, ['0', '1', '+', '-'])
            self.assertIn(row.setting, [COMPUTATIONAL, HADAMARD])
            self.assertEqual(row.reason, 'error')

    def test_six_mode_null_dimension(self):
        """Test the 6-mode family has three directions plus two vacuum ones."""
        system = create_system()

        self.assertEqual(len(null_space(system)), 5)
        self.assertEqual(
            len(null_space(system, system.vacuum_columns)), 3)

    def test_defended_invalid_rows(self):
        """Test the defended receiver adds invalid rows unless relaxed."""
        strict = create_system('interferometric-defended-10mode')
        relaxed = create_system(
            'interferometric-defended-10mode', invalid_as_loss=True)

        reasons = {row.reason for row in strict.rows}
        self.assertEqual(reasons, {'error', 'invalid'})
        self.assertEqual({row.reason for row in relaxed.rows}, {'error'})
        self.assertLess(len(relaxed.rows), len(strict.rows))

    def test_ideal_qubit_only_diagonal(self):
        """Test the ideal receiver admits only the equal-vector diagonal attack."""
        system = create_system('ideal-bb84')

        vectors = null_space(system, system.vacuum_columns)

        self.assertEqual(len(vectors), 1)
        identity = system.identity_vector() / math.sqrt(2)
        self.assertAlmostEqual(abs(np.vdot(vectors[0], identity)), 1.0)

    def test_identity_vector_in_null_space(self):
        """Test the unattacked channel never causes errors."""
        for kind in ('interferometric-6mode', 'interferometric-2mode',
                     'polarization-threshold', 'blinded-bright'):
            system = create_system(kind)
            residual = projection_residual(
                system, system.identity_vector()[:, None])
            self.assertLess(residual, 1e-10, kind)

    def test_embedding_error(self):
        """Test a source outside H^P reports the lost norm."""
        receiver = make_receiver('interferometric-middle-bin')
        alice = bb84_source(
            'wide', PhotonicState.single(channel(-3)),
            PhotonicState.single(channel(1)))

        with self.assertRaises(EmbeddingError) as context:
            build_constraint_system(receiver, alice)

        self.assertAlmostEqual(context.exception.context['lost_norm']['0'], 1.0)

    def test_digest_is_stable(self):
        """Test the constraint digest depends only on the system."""
        self.assertEqual(create_system().digest(), create_system().digest())
        self.assertNotEqual(
            create_system().digest(),
            create_system('interferometric-2mode').digest(),
        )
