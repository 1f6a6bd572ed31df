"""
Linear maps between Fock bases, orthonormalization and reduced supports.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import DomainError, RegistryError
from fockspace.constants import RANK_THRESHOLD, TOLERANCE
from fockspace.modes import FockBasisState
from fockspace.states import PhotonicState, canonical_phase


def common_basis(states):
    """Sorted union of the Fock basis states supporting the given states."""
    support = set()
    for state in states:
        support.update(state.amplitudes)
    return sorted(support)


def states_to_matrix(states, basis=None):
    """Columns are the states' coefficient vectors in basis."""
    basis = common_basis(states) if basis is None else list(basis)
    matrix = np.zeros((len(basis), len(states)), dtype=complex)
    for column, state in enumerate(states):
        matrix[:, column] = state.to_vector(basis)
    return basis, matrix


def gram_schmidt(vectors, threshold=RANK_THRESHOLD):
    """Modified Gram-Schmidt keeping vectors whose residual norm exceeds threshold."""
    basis = []
    for vector in vectors:
        residual = np.array(vector, dtype=complex)
        for _ in range(2):
            for q in basis:
                residual = residual - np.vdot(q, residual) * q
        norm = np.linalg.norm(residual)
        if norm > threshold:
            basis.append(residual / norm)
    return basis


def gram_matrix(states):
    basis, matrix = states_to_matrix(states)
    return matrix.conj().T @ matrix


def orthonormalize_states(states, threshold=RANK_THRESHOLD):
    """Orthonormal basis of the span of states, in input order."""
    if not states:
        return []
    basis, matrix = states_to_matrix(states)
    vectors = gram_schmidt(matrix.T, threshold)
    return [
        PhotonicState.from_vector(basis, canonical_phase(vector))
        for vector in vectors
    ]


def support_after_trace(state, keep):
    """Orthonormal basis of the support of the reduced state on keep."""
    keep = frozenset(keep)
    if state.registry is not None and not keep <= state.registry:
        raise RegistryError(
            'Kept modes must belong to the state registry.',
            {'modes': sorted(str(mode) for mode in keep - state.registry)},
        )
    kept, traced = {}, {}
    entries = []
    for basis_state, amplitude in state.items():
        head = basis_state.restricted(keep)
        tail = basis_state.without(keep)
        row = kept.setdefault(head, len(kept))
        column = traced.setdefault(tail, len(traced))
        entries.append((row, column, amplitude))
    if not entries:
        return []
    psi = np.zeros((len(kept), len(traced)), dtype=complex)
    for row, column, amplitude in entries:
        psi[row, column] += amplitude
    left, singular, _ = scipy.linalg.svd(psi, full_matrices=False)
    rows = list(kept)
    return [
        PhotonicState.from_vector(rows, canonical_phase(left[:, n]))
        for n, value in enumerate(singular)
        if value > RANK_THRESHOLD
    ]


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix of a linear map between two ordered Fock bases."""
    input_basis: tuple
    output_basis: tuple
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'input_basis', tuple(self.input_basis))
        object.__setattr__(self, 'output_basis', tuple(self.output_basis))
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (len(self.output_basis), len(self.input_basis)):
            raise DomainError(
                'Matrix shape does not match the bases.',
                {
                    'shape': list(matrix.shape),
                    'inputs': len(self.input_basis),
                    'outputs': len(self.output_basis),
                },
            )
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def from_evolution(cls, input_basis, evolve):
        """Tabulate evolve() on every input basis state."""
        input_basis = [
            b if isinstance(b, FockBasisState) else FockBasisState.of(b)
            for b in input_basis
        ]
        images = [evolve(PhotonicState.basis(b)) for b in input_basis]
        output_basis, matrix = states_to_matrix(images)
        return cls(input_basis, output_basis, matrix)

    def apply(self, state):
        return PhotonicState.from_vector(
            self.output_basis, self.matrix @ state.to_vector(self.input_basis))

    def adjoint_apply(self, state):
        vector = self.output_vector(state)
        return PhotonicState.from_vector(
            self.input_basis, self.matrix.conj().T @ vector)

    def output_vector(self, state):
        """Coefficients of state in the output basis; outside support counts as zero."""
        index = {b: n for n, b in enumerate(self.output_basis)}
        vector = np.zeros(len(self.output_basis), dtype=complex)
        for basis_state, amplitude in state.items():
            if basis_state in index:
                vector[index[basis_state]] = amplitude
        return vector

    def isometry_residual(self):
        gram = self.matrix.conj().T @ self.matrix
        return float(np.abs(gram - np.eye(gram.shape[0])).max(initial=0.0))

    @property
    def is_isometry(self):
        return self.isometry_residual() < TOLERANCE
