"""
Tests for attack synthesis and verification.
"""
import numpy as np

from django.test import SimpleTestCase

from core.errors import DimensionMismatchError, InfeasibleSynthesisError
from attacks.constraints import build_constraint_system, projection_residual
from attacks.information import eve_conditional_states, eve_guess_probability
from attacks.library import bright_attack, d2_attack, faked_states_attack
from attacks.synthesis import synthesize_attacks
from attacks.verification import verify_oblivious
from receivers.builders import make_receiver, orthonormal_bright_states
from receivers.receiver import COMPUTATIONAL, HADAMARD
from receivers.reversal import project

SYNTHESIZABLE = (
    'interferometric-6mode',
    'interferometric-2mode',
    'interferometric-defended-10mode',
    'interferometric-middle-bin',
    'polarization-threshold',
    'ideal-bb84',
    'blinded-bright',
)

_RECEIVERS = {}


def create_receiver(kind):
    """Return a cached built-in receiver."""
    if kind not in _RECEIVERS:
        _RECEIVERS[kind] = make_receiver(kind)
    return _RECEIVERS[kind]


def create_family(kind, **params):
    """Create and return the synthesized family of a receiver."""
    system = build_constraint_system(create_receiver(kind))
    return synthesize_attacks(system, **params)


def component(attack, label_index, state):
    """Return the Eve vector an attack attaches to a channel state."""
    weights = project(attack.p_basis, state).conj()
    return np.einsum('k,ke->e', weights, attack.coefficients[label_index])


class SoundnessTests(SimpleTestCase):
    """Test synthesized attacks never cause errors."""

    def test_all_built_in_receivers(self):
        """Test the canonical member passes verification everywhere."""
        for kind in SYNTHESIZABLE:
            family = create_family(kind)
            report = verify_oblivious(family.instance, create_receiver(kind))

            self.assertTrue(report.oblivious, kind)
            self.assertLess(report.max_error_amplitude, 1e-9, kind)
            self.assertLess(report.isometry_residual, 1e-9, kind)

    def test_members_in_null_space(self):
        """Test sampled members lie in the null space."""
        family = create_family('interferometric-6mode')
        rng = np.random.default_rng(11)

        for _ in range(20):
            member = family.sample(rng)
            self.assertLess(projection_residual(
                family.system, member.coefficients), 1e-10)
            self.assertTrue(member.is_isometry)

    def test_sampled_members_across_receivers(self):
        """Test 1050 sampled members are isometries in the null space."""
        rng = np.random.default_rng(2024)

        for kind in SYNTHESIZABLE:
            family = create_family(kind)
            for _ in range(150):
                member = family.sample(rng)
                self.assertLess(member.isometry_residual(), 1e-9, kind)
                self.assertLess(projection_residual(
                    family.system, member.coefficients), 1e-9, kind)

    def test_deterministic_across_seeds(self):
        """Test every synthesis seed reproduces its own canonical member."""
        for seed in range(20):
            first = create_family('interferometric-2mode', seed=seed)
            second = create_family('interferometric-2mode', seed=seed)

            np.testing.assert_array_equal(
                first.instance.coefficients, second.instance.coefficients)

    def test_deterministic(self):
        """Test synthesis is deterministic for a fixed seed."""
        first = create_family('interferometric-2mode', seed=5)
        second = create_family('interferometric-2mode', seed=5)

        np.testing.assert_array_equal(
            first.instance.coefficients, second.instance.coefficients)

    def test_eve_dim_zero_raises(self):
        """Test a non-positive Eve dimension is rejected."""
        with self.assertRaises(InfeasibleSynthesisError) as context:
            create_family('interferometric-6mode', eve_dim=0)

        self.assertEqual(context.exception.minimal_eve_dim, 1)

    def test_small_eve_dim(self):
        """Test a one-dimensional Eve still gets a zero-error member."""
        family = create_family('interferometric-6mode', eve_dim=1)

        self.assertEqual(family.instance.eve_dim, 1)
        self.assertTrue(verify_oblivious(
            family.instance, create_receiver('interferometric-6mode')
        ).oblivious)


class SixModeFamilyTests(SimpleTestCase):
    """Test the family against the 6-mode interferometric receiver."""

    def setUp(self):
        self.receiver = create_receiver('interferometric-6mode')
        self.family = create_family('interferometric-6mode')

    def test_dimension(self):
        """Test the family has three directions."""
        self.assertEqual(self.family.dimension, 3)
        self.assertFalse(self.family.is_trivial)

    def test_faked_states_in_family(self):
        """Test the faked-states attack lies in the null space."""
        attack = faked_states_attack(self.receiver)

        residual = projection_residual(self.family.system, attack.coefficients)

        self.assertLess(residual, 1e-10)

    def test_canonical_member_is_faked_states(self):
        """Test the canonical member sends only t'-1 and t'2."""
        from fockspace.modes import channel
        from fockspace.states import PhotonicState
        instance = self.family.instance

        early = component(instance, 0, PhotonicState.single(channel(-1)))
        late = component(instance, 1, PhotonicState.single(channel(2)))

        self.assertAlmostEqual(np.linalg.norm(early), 1.0)
        self.assertAlmostEqual(np.linalg.norm(late), 1.0)
        self.assertAlmostEqual(abs(np.vdot(early, late)), 0.0)

    def test_faked_states_verified(self):
        """Test the faked-states attack is oblivious."""
        report = verify_oblivious(
            faked_states_attack(self.receiver), self.receiver)

        self.assertTrue(report.oblivious)
        self.assertEqual(len(report.rows), len(self.family.system.rows))


class DefendedFamilyTests(SimpleTestCase):
    """Test the defended receiver leaves only the trivial attack."""

    def setUp(self):
        self.receiver = create_receiver('interferometric-defended-10mode')
        self.family = create_family('interferometric-defended-10mode')

    def test_trivial(self):
        """Test the family is flagged trivial."""
        self.assertTrue(self.family.is_trivial)
        self.assertEqual(self.family.dimension, 1)

    def test_members_carry_no_information(self):
        """Test every member gives Eve probability one half in both bases."""
        rng = np.random.default_rng(0)
        members = [self.family.instance] + [
            self.family.sample(rng) for _ in range(10)]

        for member in members:
            guesses = eve_guess_probability(
                eve_conditional_states(member, self.receiver))
            self.assertAlmostEqual(guesses[COMPUTATIONAL], 0.5, delta=1e-9)
            self.assertAlmostEqual(guesses[HADAMARD], 0.5, delta=1e-9)

    def test_diagonal_with_equal_vectors(self):
        """Test only eps(t'0, t'0) and eps(t'1, t'1) are nonzero and equal."""
        coefficients = self.family.instance.coefficients
        # H^P basis: vac, t'-2, t'-1, t'0, t'1, t'2, t'3
        zero, one = coefficients[0, 3], coefficients[1, 4]

        np.testing.assert_allclose(zero, one, atol=1e-9)
        mask = np.ones(coefficients.shape[:2], dtype=bool)
        mask[0, 3] = mask[1, 4] = False
        self.assertLess(np.abs(coefficients[mask]).max(), 1e-9)

    def test_vacuum_exposed_on_request(self):
        """Test including vacuum adds the blocking directions."""
        family = create_family(
            'interferometric-defended-10mode', include_vacuum=True)

        self.assertEqual(family.dimension, 3)
        self.assertFalse(family.is_trivial)


class TwoModeFamilyTests(SimpleTestCase):
    """Test the attack family against the two-bin receiver."""

    def test_library_attack_in_family(self):
        """Test the p_i = 1/2 attack lies in the null space."""
        receiver = create_receiver('interferometric-2mode')
        family = create_family('interferometric-2mode')

        residual = projection_residual(
            family.system, d2_attack(receiver=receiver).coefficients)

        self.assertEqual(family.dimension, 4)
        self.assertLess(residual, 1e-10)

    def test_normalization_of_members(self):
        """Test sampled members satisfy the quoted normalization."""
        from fockspace.modes import channel
        from fockspace.states import PhotonicState
        family = create_family('interferometric-2mode')
        rng = np.random.default_rng(2)
        t = {n: PhotonicState.single(channel(n)) for n in range(-1, 3)}

        for _ in range(50):
            member = family.sample(rng)
            p1 = np.linalg.norm(component(member, 0, t[-1]))
            p2 = np.linalg.norm(component(member, 0, t[0]))
            p3 = np.linalg.norm(component(member, 0, t[1]))
            p3_late = np.linalg.norm(component(member, 0, t[2]))
            p4 = np.linalg.norm(component(member, 1, t[2]))
            self.assertAlmostEqual(p3, p3_late, delta=1e-9)
            self.assertAlmostEqual(p1 ** 2 + p2 ** 2 + 2 * p3 ** 2, 1.0,
                                   delta=1e-9)
            self.assertAlmostEqual(p4 ** 2 + p2 ** 2 + 2 * p3 ** 2, 1.0,
                                   delta=1e-9)


class BrightFamilyTests(SimpleTestCase):
    """Test the family against the blinded-bright receiver."""

    def setUp(self):
        self.receiver = create_receiver('blinded-bright')
        self.family = create_family('blinded-bright')
        self.bright = orthonormal_bright_states(
            self.receiver.params['photons'])

    def test_samples_satisfy_normalization(self):
        """Test 200 sampled members obey p^2 + 2q^2 = 1 and verify."""
        rng = np.random.default_rng(7)

        for _ in range(200):
            member = self.family.sample(rng)
            p = np.linalg.norm(component(member, 0, self.bright['psi0']))
            q = np.linalg.norm(component(member, 0, self.bright['psi2']))
            q_minus = np.linalg.norm(
                component(member, 0, self.bright['psi3']))
            self.assertAlmostEqual(q, q_minus, delta=1e-9)
            self.assertAlmostEqual(p ** 2 + 2 * q ** 2, 1.0, delta=1e-9)
            self.assertTrue(
                verify_oblivious(member, self.receiver).oblivious)

    def test_library_member(self):
        """Test an intermediate library member lies in the family."""
        attack = bright_attack(p=0.6, receiver=self.receiver)

        self.assertLess(projection_residual(
            self.family.system, attack.coefficients), 1e-10)

    def test_computational_limit(self):
        """Test p = 1 leaks the computational bit and blocks Hadamard."""
        attack = bright_attack(p=1.0, receiver=self.receiver)
        states = eve_conditional_states(attack, self.receiver)

        for entry in states.for_basis(HADAMARD):
            self.assertLess(entry.weight, 1e-12)
        self.assertAlmostEqual(
            eve_guess_probability(states)[COMPUTATIONAL], 1.0)

    def test_hadamard_limit(self):
        """Test p = 0 leaks the Hadamard bit and blocks computational."""
        attack = bright_attack(p=0.0, receiver=self.receiver)
        states = eve_conditional_states(attack, self.receiver)

        for entry in states.for_basis(COMPUTATIONAL):
            self.assertLess(entry.weight, 1e-12)
        self.assertAlmostEqual(eve_guess_probability(states)[HADAMARD], 1.0)

    def test_canonical_member_is_computational_limit(self):
        """Test the canonical member avoids the shared directions."""
        p = np.linalg.norm(
            component(self.family.instance, 0, self.bright['psi0']))

        self.assertAlmostEqual(p, 1.0)


class RebaseTests(SimpleTestCase):
    """Test re-expressing attacks in other bases."""

    def test_rebase_onto_reordered_basis(self):
        """Test rebasing onto a permuted basis keeps the attack."""
        attack = faked_states_attack(create_receiver('interferometric-6mode'))

        reordered = attack.rebase(list(reversed(attack.p_basis)))

        np.testing.assert_allclose(
            reordered.coefficients[:, ::-1], attack.coefficients)

    def test_rebase_dimension_mismatch(self):
        """Test rebasing onto another receiver's H^P raises."""
        attack = faked_states_attack(create_receiver('interferometric-6mode'))
        family = create_family('interferometric-defended-10mode')

        with self.assertRaises(DimensionMismatchError):
            attack.rebase(family.system.p_basis)

    def test_verify_against_wrong_receiver(self):
        """Test verifying against another receiver raises."""
        attack = faked_states_attack(create_receiver('interferometric-6mode'))

        with self.assertRaises(DimensionMismatchError):
            verify_oblivious(attack, create_receiver('ideal-bb84'))
