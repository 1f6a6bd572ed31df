"""
Reversed space: the part of the channel that can influence Bob.
"""
import logging

import numpy as np

from core.errors import EmbeddingError
from fockspace.constants import RANK_THRESHOLD, TOLERANCE
from fockspace.linalg import common_basis, gram_schmidt, support_after_trace
from fockspace.modes import FockBasisState
from fockspace.states import PhotonicState, inner_product

logger = logging.getLogger(__name__)


def _span_basis(vectors):
    """Orthonormal basis of span(vectors) in a canonical form.

    When the span is spanned by Fock basis states those are returned in
    canonical order, otherwise the Gram-Schmidt basis of the vectors.
    """
    basis = common_basis(vectors)
    matrix = np.array([v.to_vector(basis) for v in vectors]).T
    orthonormal = gram_schmidt(matrix.T, RANK_THRESHOLD)
    if not orthonormal:
        return []
    q = np.array(orthonormal).T
    captured = np.einsum('ij,ij->i', q, q.conj()).real
    aligned = [b for b, weight in zip(basis, captured)
               if weight > 1 - TOLERANCE]
    if len(aligned) == len(orthonormal):
        return [PhotonicState.basis(b) for b in sorted(aligned)]
    return [PhotonicState.from_vector(basis, v) for v in orthonormal]


def reversed_space(receiver):
    """Orthonormal basis of H^P for a receiver."""
    vectors = []
    for setting in receiver.settings:
        for _, outcome in setting.outcomes:
            back = setting.unitary.adjoint_apply(outcome)
            if back.norm() < RANK_THRESHOLD:
                continue
            vectors.extend(support_after_trace(back, receiver.channel_modes))
    p_basis = _span_basis(vectors)
    logger.info('Reversed space of %s has dimension %d',
                receiver.kind, len(p_basis))
    return p_basis


def project(p_basis, state):
    """Coefficients of state along an orthonormal H^P basis."""
    return np.array([inner_product(k, state) for k in p_basis])


def embed_source(p_basis, alice):
    """Check every Alice state lies in H^P; return lost norm per label."""
    lost = {}
    for alice_state in alice.states:
        coefficients = project(p_basis, alice_state.state)
        missing = alice_state.state.norm() ** 2 - np.vdot(
            coefficients, coefficients).real
        lost[alice_state.label] = max(float(missing), 0.0)
    outside = {label: value for label, value in lost.items()
               if value > TOLERANCE}
    if outside:
        raise EmbeddingError(
            'Alice states are not contained in the reversed space.',
            {'lost_norm': outside},
        )
    return lost


def is_vacuum_direction(state):
    return set(state.amplitudes) == {FockBasisState.vacuum()}
