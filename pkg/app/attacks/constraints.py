"""
The zero-error constraint system over (logical state, H^P basis) pairs.

An attack maps Alice's logical state |i> to sum_k v[i, k] |k> with |k> an
orthonormal basis of the reversed space and v[i, k] unnormalized Eve
vectors. Bob never sees outcome j in setting s for Alice's state
sum_i alpha_i |i> iff sum_{i,k} alpha_i beta[k, j] v[i, k] = 0, which is
one linear functional applied to every Eve component.
"""
import hashlib
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from fockspace.constants import PRUNE_THRESHOLD, RANK_THRESHOLD
from fockspace.linalg import gram_schmidt
from fockspace.states import inner_product
from receivers.builders import alice_for
from receivers.reversal import embed_source, is_vacuum_direction, reversed_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstraintRow:
    """The (Alice state, setting, outcome) triple behind one row."""
    alice_label: str
    setting: str
    outcome: str
    reason: str

    def as_dict(self):
        return {
            'alice': self.alice_label,
            'setting': self.setting,
            'outcome': self.outcome,
            'reason': self.reason,
        }


def basis_label(state, position):
    """Short label for an H^P basis state."""
    terms = list(state.items())
    if len(terms) == 1 and abs(terms[0][1] - 1) < RANK_THRESHOLD:
        return str(terms[0][0])
    return f'k{position}'


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    receiver: object
    alice: object
    p_basis: tuple
    rows: tuple
    matrix: np.ndarray
    invalid_as_loss: bool = False

    @property
    def logical_labels(self):
        return self.alice.logical_labels

    @property
    def n_logical(self):
        return len(self.logical_labels)

    @property
    def dim_p(self):
        return len(self.p_basis)

    @property
    def columns(self):
        """(i, k) index pairs, i-major."""
        return [(i, k) for i in range(self.n_logical)
                for k in range(self.dim_p)]

    @property
    def column_labels(self):
        k_labels = [basis_label(s, n) for n, s in enumerate(self.p_basis)]
        return [f'{self.logical_labels[i]}|{k_labels[k]}'
                for i, k in self.columns]

    @property
    def vacuum_columns(self):
        vacuum = [k for k, state in enumerate(self.p_basis)
                  if is_vacuum_direction(state)]
        return [n for n, (_, k) in enumerate(self.columns) if k in vacuum]

    def identity_vector(self):
        """x_id[i, k] = <k|i_A>, the unattacked channel."""
        return np.array([
            inner_product(k, logical.state)
            for logical in self.alice.logical_basis for k in self.p_basis
        ])

    def digest(self):
        """Stable hash of the rounded constraint matrix."""
        rounded = np.round(self.matrix, 9) + 0.0
        payload = rounded.real.tobytes() + rounded.imag.tobytes() + \
            repr(self.matrix.shape).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def residuals(self, coefficients):
        """Eve-vector norm of every row for v[i, k, e]."""
        flat = np.asarray(coefficients).reshape(
            self.n_logical * self.dim_p, -1)
        return np.linalg.norm(self.matrix @ flat, axis=1)


def _error_set(setting, basis, bit, invalid_as_loss):
    sets = setting.interpretation
    errors = set()
    if basis == setting.basis:
        errors |= {(j, 'error') for j in sets.for_bit(1 - bit)}
    if not invalid_as_loss:
        errors |= {(j, 'invalid') for j in sets.j_invalid}
    return errors


def build_constraint_system(receiver, alice=None, p_basis=None,
                            invalid_as_loss=False):
    """Create and return the zero-error system for a receiver."""
    alice = alice_for(receiver) if alice is None else alice
    p_basis = tuple(reversed_space(receiver) if p_basis is None else p_basis)
    embed_source(p_basis, alice)

    betas = {setting.id: setting.beta(p_basis) for setting in receiver.settings}
    rows, entries = [], []
    for state in alice.states:
        alpha = alice.alpha(state.label)
        for setting in receiver.settings:
            index = {j: n for n, j in enumerate(setting.outcome_ids)}
            for outcome, reason in sorted(_error_set(
                    setting, state.basis, state.bit, invalid_as_loss)):
                rows.append(ConstraintRow(
                    state.label, setting.id, outcome, reason))
                entries.append(np.kron(alpha, betas[setting.id][:, index[outcome]]))
    matrix = np.array(entries, dtype=complex).reshape(
        len(entries), len(alice.logical_basis) * len(p_basis))
    logger.info('Constraint system for %s: %d rows, %d columns',
                receiver.kind, matrix.shape[0], matrix.shape[1])
    return ConstraintSystem(
        receiver, alice, p_basis, tuple(rows), matrix, invalid_as_loss)


def _null_basis(matrix, n_columns):
    if matrix.shape[0] == 0:
        basis = np.eye(n_columns, dtype=complex)
    else:
        _, singular, vh = scipy.linalg.svd(matrix)
        rank = int((singular > RANK_THRESHOLD).sum())
        basis = vh[rank:].conj().T
    dimension = basis.shape[1]
    if dimension == 0:
        return basis
    # pivot form: direction m is 1 on pivot row m and 0 on the others
    _, _, pivots = scipy.linalg.qr(basis.conj().T, pivoting=True)
    rows = np.sort(pivots[:dimension])
    reduced = basis @ scipy.linalg.inv(basis[rows, :])
    reduced[np.abs(reduced) < PRUNE_THRESHOLD] = 0
    return np.array(gram_schmidt(reduced.T, RANK_THRESHOLD)).T


def null_space(system, pinned=()):
    """Orthonormal basis of {x : M x = 0}, as a list of vectors.

    pinned lists column indices forced to zero.
    """
    matrix = system.matrix if isinstance(system, ConstraintSystem) \
        else np.atleast_2d(np.asarray(system, dtype=complex))
    n_columns = matrix.shape[1]
    if pinned:
        pins = np.zeros((len(pinned), n_columns), dtype=complex)
        pins[np.arange(len(pinned)), list(pinned)] = 1
        matrix = np.vstack([matrix, pins])
    basis = _null_basis(matrix, n_columns)
    logger.debug('Null space of a %dx%d system has dimension %d',
                 matrix.shape[0], n_columns, basis.shape[1])
    return [basis[:, m] for m in range(basis.shape[1])]


def projection_residual(system, coefficients):
    """Largest component of an attack's columns outside null(M)."""
    vectors = null_space(system)
    flat = np.asarray(coefficients).reshape(system.n_logical * system.dim_p, -1)
    if not vectors:
        return float(np.abs(flat).max(initial=0.0))
    basis = np.array(vectors).T
    outside = flat - basis @ (basis.conj().T @ flat)
    return float(np.linalg.norm(outside, axis=0).max(initial=0.0))
