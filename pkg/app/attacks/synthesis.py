"""
Synthesis of oblivious attacks from the constraint null space.

Every zero-error attack has all its (i, k) columns in null(M). The canonical
instantiation gives every null direction m its own orthogonal Eve vector with
weight w_m = |c_m|^2, which turns the isometry condition into the linear
system sum_m w_m A[i, i'][m, m] = delta(i, i') with A[i, i'] = N_i^H N_i'.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from core.conf import qkdlab_setting
from core.errors import InfeasibleSynthesisError
from fockspace.constants import PRUNE_THRESHOLD, RANK_THRESHOLD, TOLERANCE
from attacks.constraints import null_space
from attacks.isometry import AttackIsometry
from receivers.reversal import is_vacuum_direction

logger = logging.getLogger(__name__)

FEASIBILITY_TOLERANCE = 1e-8
SHARED_COST = 1.0
VACUUM_COST = 0.5


@dataclass(frozen=True, eq=False)
class GramConstraint:
    """sum over directions m, m' of conj(c_m) c_m' A[m, m'] = target."""
    i: int
    i_prime: int
    matrix: np.ndarray
    target: float

    def residual(self, amplitudes):
        value = np.einsum('me,mn,ne->', amplitudes.conj(), self.matrix,
                          amplitudes)
        return complex(value) - self.target


@dataclass(frozen=True, eq=False)
class AttackFamily:
    """All zero-error attacks reachable from one constraint system."""
    system: object
    null_basis: np.ndarray
    gram_constraints: tuple
    vertices: np.ndarray
    is_trivial: bool
    include_vacuum: bool = False
    named_parameters: dict = field(default_factory=dict)
    instance: AttackIsometry = None

    @property
    def dimension(self):
        return self.null_basis.shape[1]

    def instantiate(self, amplitudes, name='synthesized'):
        """Member with columns null_basis @ amplitudes, amplitudes (d, eve_dim)."""
        amplitudes = np.asarray(amplitudes, dtype=complex)
        flat = self.null_basis @ amplitudes
        coefficients = flat.reshape(
            self.system.n_logical, self.system.dim_p, amplitudes.shape[1])
        return AttackIsometry(
            self.system.logical_labels, self.system.p_basis, coefficients,
            name=name, provenance=self.provenance(),
        )

    def from_weights(self, weights, phases=None, eve_dim=None,
                     name='synthesized'):
        """Member giving direction m weight w_m on its own Eve vector."""
        weights = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        phases = np.zeros(len(weights)) if phases is None else phases
        support = [m for m, w in enumerate(weights) if w > PRUNE_THRESHOLD]
        eve_dim = max(len(support), 1) if eve_dim is None else eve_dim
        if len(support) > eve_dim:
            raise InfeasibleSynthesisError(
                'Weights need more Eve dimensions than requested.',
                requested_eve_dim=eve_dim, minimal_eve_dim=len(support),
            )
        amplitudes = np.zeros((self.dimension, eve_dim), dtype=complex)
        for column, m in enumerate(support):
            amplitudes[m, column] = np.sqrt(weights[m]) * np.exp(1j * phases[m])
        return self.instantiate(amplitudes, name)

    def sample(self, rng):
        """Random member: convex mixture of vertices with random phases."""
        if not len(self.vertices):
            raise InfeasibleSynthesisError(
                'The family has no diagonal members to sample.',
                requested_eve_dim=self.dimension,
            )
        mixture = rng.dirichlet(np.ones(len(self.vertices)))
        weights = mixture @ self.vertices
        phases = rng.uniform(0, 2 * np.pi, size=self.dimension)
        return self.from_weights(
            weights, phases, eve_dim=self.dimension, name='sampled')

    def provenance(self):
        return {
            'receiver': self.system.receiver.kind,
            'constraint_digest': self.system.digest(),
            'include_vacuum': self.include_vacuum,
        }


def gram_constraints(system, basis):
    """Isometry conditions on the amplitudes of the null directions."""
    blocks = basis.reshape(system.n_logical, system.dim_p, basis.shape[1])
    constraints = []
    for i in range(system.n_logical):
        for i_prime in range(i, system.n_logical):
            constraints.append(GramConstraint(
                i, i_prime, blocks[i].conj().T @ blocks[i_prime],
                1.0 if i == i_prime else 0.0,
            ))
    return tuple(constraints)


def _weight_system(constraints):
    rows, targets = [], []
    for constraint in constraints:
        diagonal = np.diag(constraint.matrix)
        rows.append(diagonal.real)
        targets.append(constraint.target)
        if constraint.i != constraint.i_prime:
            rows.append(diagonal.imag)
            targets.append(0.0)
    return np.array(rows), np.array(targets)


def _solve(cost, a_eq, b_eq):
    result = scipy.optimize.linprog(
        cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method='highs')
    if result.status != 0:
        return None
    support = result.x > FEASIBILITY_TOLERANCE
    weights = np.zeros_like(result.x)
    # polish on the vertex support to full precision
    weights[support] = scipy.linalg.lstsq(a_eq[:, support], b_eq)[0]
    return np.clip(weights, 0.0, None)


def _direction_costs(system, basis):
    blocks = np.abs(basis.reshape(
        system.n_logical, system.dim_p, basis.shape[1])) > RANK_THRESHOLD
    vacuum = [k for k, state in enumerate(system.p_basis)
              if is_vacuum_direction(state)]
    costs = np.zeros(basis.shape[1])
    for m in range(basis.shape[1]):
        logical = blocks[:, :, m].any(axis=1)
        if logical.sum() > 1:
            costs[m] += SHARED_COST
        if any(blocks[:, k, m].any() for k in vacuum):
            costs[m] += VACUUM_COST
    return costs


def _vertices(a_eq, b_eq, dimension, canonical):
    found = [canonical]
    for m in range(dimension):
        for sign in (1.0, -1.0):
            cost = np.zeros(dimension)
            cost[m] = sign
            weights = _solve(cost, a_eq, b_eq)
            if weights is None:
                continue
            if not any(np.allclose(weights, v, atol=1e-9) for v in found):
                found.append(weights)
    return np.array(found)


def _general_solution(family, eve_dim, seed):
    """Least-squares search for amplitudes at a fixed Eve dimension."""
    dimension = family.dimension
    rng = np.random.default_rng(seed)

    def unpack(x):
        half = dimension * eve_dim
        return (x[:half] + 1j * x[half:]).reshape(dimension, eve_dim)

    def residuals(x):
        amplitudes = unpack(x)
        values = [c.residual(amplitudes) for c in family.gram_constraints]
        return np.concatenate([np.real(values), np.imag(values)])

    result = scipy.optimize.least_squares(
        residuals, rng.normal(size=2 * dimension * eve_dim),
        xtol=1e-14, ftol=1e-14, gtol=1e-14,
    )
    if np.abs(residuals(result.x)).max(initial=0.0) > FEASIBILITY_TOLERANCE:
        return None
    return unpack(result.x)


def _is_trivial(system, basis):
    if basis.shape[1] != 1:
        return False
    identity = system.identity_vector()
    norm = np.linalg.norm(identity)
    if norm < TOLERANCE:
        return False
    return abs(np.vdot(basis[:, 0], identity)) / norm > 1 - TOLERANCE


def _named_parameters(system, basis):
    labels = system.column_labels
    return {
        f'w{m}': [labels[n] for n in np.flatnonzero(
            np.abs(basis[:, m]) > RANK_THRESHOLD)]
        for m in range(basis.shape[1])
    }


def synthesize_attacks(system, eve_dim=None, include_vacuum=False, seed=None):
    """Create and return the family of oblivious attacks of a system.

    eve_dim defaults to the number of (i, k) pairs. The returned family
    carries one concrete member in instance.
    """
    requested = len(system.columns) if eve_dim is None else int(eve_dim)
    if requested < 1:
        raise InfeasibleSynthesisError(
            'eve_dim must be at least 1.',
            requested_eve_dim=requested, minimal_eve_dim=1,
        )
    seed = qkdlab_setting('DEFAULT_SEED') if seed is None else seed
    pinned = () if include_vacuum else tuple(system.vacuum_columns)
    vectors = null_space(system, pinned)
    if not vectors:
        raise InfeasibleSynthesisError(
            'No attack avoids every error outcome.',
            requested_eve_dim=requested, minimal_eve_dim=None,
        )
    basis = np.array(vectors).T
    constraints = gram_constraints(system, basis)
    a_eq, b_eq = _weight_system(constraints)
    canonical = _solve(_direction_costs(system, basis), a_eq, b_eq)
    vertices = np.zeros((0, basis.shape[1])) if canonical is None else \
        _vertices(a_eq, b_eq, basis.shape[1], canonical)

    family = AttackFamily(
        system=system,
        null_basis=basis,
        gram_constraints=constraints,
        vertices=vertices,
        is_trivial=_is_trivial(system, basis),
        include_vacuum=include_vacuum,
        named_parameters=_named_parameters(system, basis),
    )
    instance = _instance(family, requested, seed)
    object.__setattr__(family, 'instance', instance)
    logger.info(
        'Synthesized %s family for %s: %d directions, %d vertices, eve_dim %d',
        'trivial' if family.is_trivial else 'attack', system.receiver.kind,
        family.dimension, len(vertices), instance.eve_dim,
    )
    return family


def _instance(family, eve_dim, seed):
    fitting = [
        v for v in family.vertices
        if np.count_nonzero(v) <= eve_dim
    ]
    if fitting:
        return family.from_weights(fitting[0], name='canonical')
    amplitudes = _general_solution(family, eve_dim, seed)
    if amplitudes is not None:
        return family.instantiate(amplitudes, name='canonical')
    minimal = None
    for candidate in range(eve_dim + 1, family.dimension + 1):
        logger.warning('Synthesis infeasible at eve_dim %d, trying %d',
                       candidate - 1, candidate)
        fits = any(np.count_nonzero(v) <= candidate for v in family.vertices)
        if fits or _general_solution(family, candidate, seed) is not None:
            minimal = candidate
            break
    raise InfeasibleSynthesisError(
        f'No isometry with eve_dim {eve_dim} satisfies the Gram conditions.',
        requested_eve_dim=eve_dim, minimal_eve_dim=minimal,
    )
