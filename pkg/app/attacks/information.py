"""
What Eve holds after Bob's result, and how well she can guess Alice's bit.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import UnsupportedHypothesesError
from fockspace.constants import PRUNE_THRESHOLD
from attacks.verification import align

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConditionalState:
    """Eve's unnormalized vector when Alice sent label and Bob saw outcome."""
    alice_label: str
    basis: str
    alice_bit: int
    setting: str
    outcome: str
    bob_bit: int
    vector: np.ndarray

    @property
    def weight(self):
        return float(np.vdot(self.vector, self.vector).real)


@dataclass(frozen=True, eq=False)
class EveConditionalStates:
    entries: tuple

    @property
    def bases(self):
        return list(dict.fromkeys(entry.basis for entry in self.entries))

    def for_basis(self, basis):
        return [entry for entry in self.entries if entry.basis == basis]

    def density(self, basis, label):
        """Sum of |e><e| over the outcomes seen for label."""
        entries = [e for e in self.for_basis(basis) if e.alice_label == label]
        dimension = len(self.entries[0].vector)
        rho = np.zeros((dimension, dimension), dtype=complex)
        for entry in entries:
            rho += np.outer(entry.vector, entry.vector.conj())
        return rho

    def labels(self, basis):
        ordered = sorted(self.for_basis(basis), key=lambda e: e.alice_bit)
        return list(dict.fromkeys(e.alice_label for e in ordered))


def eve_conditional_states(attack, receiver, alice=None):
    """Eve's vectors for every matched-basis valid outcome."""
    attack, alice = align(attack, receiver, alice)
    entries = []
    for state in alice.states:
        alpha = alice.alpha(state.label)
        for setting in receiver.settings_for_basis(state.basis):
            beta = setting.beta(attack.p_basis)
            sets = setting.interpretation
            for j, outcome in enumerate(setting.outcome_ids):
                interpretation = sets.lookup(outcome)
                if not interpretation.is_valid:
                    continue
                vector = np.einsum('i,k,ike->e', alpha, beta[:, j],
                                   attack.coefficients)
                entries.append(ConditionalState(
                    state.label, state.basis, state.bit, setting.id, outcome,
                    interpretation.bit, vector,
                ))
    return EveConditionalStates(tuple(entries))


def _trace_norm(matrix):
    return float(np.abs(scipy.linalg.eigvalsh(matrix)).sum())


def _overlaps(rhos):
    overlaps = np.zeros((len(rhos), len(rhos)), dtype=complex)
    for a, first in enumerate(rhos):
        for b, second in enumerate(rhos):
            norm = np.sqrt(np.trace(first @ first).real *
                           np.trace(second @ second).real)
            overlaps[a, b] = np.trace(first @ second) / norm if norm else 0
    return overlaps


def helstrom(rho0, rho1):
    """Success probability and the projector onto 'guess 0'.

    The priors are the traces of the unnormalized operators.
    """
    total = np.trace(rho0).real + np.trace(rho1).real
    if total < PRUNE_THRESHOLD:
        return 0.5, np.zeros_like(rho0)
    difference = rho0 - rho1
    values, vectors = scipy.linalg.eigh(difference)
    positive = vectors[:, values > 0]
    projector = positive @ positive.conj().T
    return 0.5 * (1 + _trace_norm(difference) / total), projector


def _basis_pair(states, basis):
    labels = states.labels(basis)
    rhos = [states.density(basis, label) for label in labels]
    if len(labels) > 2:
        raise UnsupportedHypothesesError(
            f'Basis {basis!r} has {len(labels)} hypotheses.',
            _overlaps(rhos), {'basis': basis, 'labels': labels},
        )
    while len(rhos) < 2:
        rhos.append(np.zeros_like(rhos[0]))
    return rhos


def eve_guess_probability(states):
    """Helstrom success probability of guessing Alice's bit, per basis."""
    result = {}
    for basis in states.bases:
        rho0, rho1 = _basis_pair(states, basis)
        result[basis] = helstrom(rho0, rho1)[0]
        logger.debug('Eve guess probability in %s: %.6f', basis, result[basis])
    return result


def guess_measurements(states):
    """Per basis, the projector Eve measures to guess bit 0."""
    return {
        basis: helstrom(*_basis_pair(states, basis))[1]
        for basis in states.bases
    }
