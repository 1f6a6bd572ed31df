"""
Eve's per-transmission isometry expressed over the reversed space.
"""
from dataclasses import dataclass, field

import numpy as np

from core.errors import DimensionMismatchError
from fockspace.constants import TOLERANCE
from fockspace.states import PhotonicState, inner_product


@dataclass(frozen=True, eq=False)
class AttackIsometry:
    """v[i, k] = eps_{i,k}|E_{i,k}> stored as coefficients[i, k, e].

    i runs over Alice's logical labels, k over p_basis and e over Eve's
    orthonormal ancilla basis.
    """
    alice_labels: tuple
    p_basis: tuple
    coefficients: np.ndarray
    name: str = 'attack'
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'alice_labels', tuple(self.alice_labels))
        object.__setattr__(self, 'p_basis', tuple(self.p_basis))
        coefficients = np.asarray(self.coefficients, dtype=complex)
        expected = (len(self.alice_labels), len(self.p_basis))
        if coefficients.ndim != 3 or coefficients.shape[:2] != expected:
            raise DimensionMismatchError(
                'Coefficient table does not match labels and H^P.',
                {'shape': list(coefficients.shape), 'expected': list(expected)},
            )
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def eve_dim(self):
        return self.coefficients.shape[2]

    @property
    def dim_p(self):
        return len(self.p_basis)

    def vector(self, i, k):
        return self.coefficients[i, k]

    def gram(self):
        """G[i, i'] = sum_k <v[i, k], v[i', k]>."""
        return np.einsum('ike,jke->ij', self.coefficients.conj(),
                         self.coefficients)

    def isometry_residual(self):
        gram = self.gram()
        return float(np.abs(gram - np.eye(len(gram))).max(initial=0.0))

    @property
    def is_isometry(self):
        return self.isometry_residual() < TOLERANCE

    def flat(self):
        """Columns (i, k) i-major by Eve components."""
        return self.coefficients.reshape(-1, self.eve_dim)

    def channel_state(self, i, e):
        """The channel state paired with Eve component e for input |i>."""
        return PhotonicState.superposition(
            (self.coefficients[i, k, e], state)
            for k, state in enumerate(self.p_basis)
        )

    def rebase(self, p_basis):
        """Re-express the coefficients over another basis of the same H^P."""
        p_basis = tuple(p_basis)
        if len(p_basis) != self.dim_p:
            raise DimensionMismatchError(
                'Reversed spaces have different dimensions.',
                {'attack': self.dim_p, 'receiver': len(p_basis)},
            )
        transfer = np.array([
            [inner_product(new, old) for old in self.p_basis]
            for new in p_basis
        ])
        captured = np.linalg.norm(transfer, axis=0)
        if np.abs(captured - 1).max(initial=0.0) > TOLERANCE:
            raise DimensionMismatchError(
                'Attack is defined over another reversed space.',
                {'captured': [float(c) for c in captured]},
            )
        coefficients = np.einsum('nk,ike->ine', transfer, self.coefficients)
        return AttackIsometry(
            self.alice_labels, p_basis, coefficients, self.name,
            dict(self.provenance),
        )
