"""
Receiver and source models.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from core.errors import ConfigError, DomainError, UnknownOutcomeError
from fockspace.constants import TOLERANCE
from fockspace.linalg import LinearMap, gram_matrix
from fockspace.states import PhotonicState, inner_product

COMPUTATIONAL = 'computational'
HADAMARD = 'hadamard'
Y_BASIS = 'y'

VACUUM_OUTCOME = 'vac'


class Interpretation(str, enum.Enum):
    """Classical meaning Bob gives to an outcome."""
    BIT0 = 'Bit0'
    BIT1 = 'Bit1'
    LOSS = 'Loss'
    INVALID = 'Invalid'

    @property
    def bit(self):
        return {Interpretation.BIT0: 0, Interpretation.BIT1: 1}.get(self)

    @property
    def is_valid(self):
        return self.bit is not None


@dataclass(frozen=True)
class InterpretationSets:
    """The partition J0 / J1 / J_loss / J_invalid of a setting's outcomes."""
    j0: frozenset = frozenset()
    j1: frozenset = frozenset()
    j_loss: frozenset = frozenset()
    j_invalid: frozenset = frozenset()

    def __post_init__(self):
        for name in ('j0', 'j1', 'j_loss', 'j_invalid'):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        sets = [self.j0, self.j1, self.j_loss, self.j_invalid]
        for n, first in enumerate(sets):
            for second in sets[n + 1:]:
                if first & second:
                    raise ConfigError(
                        'Interpretation sets must be disjoint.',
                        {'shared': sorted(first & second)},
                    )

    @property
    def outcomes(self):
        return self.j0 | self.j1 | self.j_loss | self.j_invalid

    def lookup(self, outcome):
        if outcome in self.j0:
            return Interpretation.BIT0
        if outcome in self.j1:
            return Interpretation.BIT1
        if outcome in self.j_loss:
            return Interpretation.LOSS
        if outcome in self.j_invalid:
            return Interpretation.INVALID
        raise UnknownOutcomeError(
            f'Unknown outcome {outcome!r}.', {'outcome': outcome})

    def for_bit(self, bit):
        return self.j0 if bit == 0 else self.j1

    def with_override(self, outcome, interpretation):
        """Move one outcome into the set of the given interpretation."""
        interpretation = Interpretation(interpretation)
        self.lookup(outcome)
        sets = {
            Interpretation.BIT0: set(self.j0) - {outcome},
            Interpretation.BIT1: set(self.j1) - {outcome},
            Interpretation.LOSS: set(self.j_loss) - {outcome},
            Interpretation.INVALID: set(self.j_invalid) - {outcome},
        }
        sets[interpretation].add(outcome)
        return InterpretationSets(
            sets[Interpretation.BIT0], sets[Interpretation.BIT1],
            sets[Interpretation.LOSS], sets[Interpretation.INVALID],
        )


@dataclass(frozen=True, eq=False)
class ReceiverSetting:
    """One of Bob's measurement settings."""
    id: str
    basis: str
    unitary: LinearMap
    outcomes: tuple
    interpretation: InterpretationSets
    transform: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, 'outcomes', tuple(
            (str(outcome_id), state) for outcome_id, state in
            (self.outcomes.items() if isinstance(self.outcomes, dict)
             else self.outcomes)
        ))
        ids = [outcome_id for outcome_id, _ in self.outcomes]
        if len(set(ids)) != len(ids):
            raise ConfigError('Outcome ids must be unique.', {'setting': self.id})
        if set(ids) != self.interpretation.outcomes:
            raise ConfigError(
                'Interpretation sets must cover exactly the outcomes.',
                {
                    'setting': self.id,
                    'missing': sorted(set(ids) - self.interpretation.outcomes),
                    'extra': sorted(self.interpretation.outcomes - set(ids)),
                },
            )

    @property
    def outcome_ids(self):
        return [outcome_id for outcome_id, _ in self.outcomes]

    def outcome_state(self, outcome_id):
        for candidate, state in self.outcomes:
            if candidate == outcome_id:
                return state
        raise UnknownOutcomeError(
            f'Unknown outcome {outcome_id!r} in setting {self.id!r}.',
            {'setting': self.id, 'outcome': outcome_id},
        )

    def evolve(self, state):
        """Bob's unitary applied to a channel state with vacuum ancillas."""
        if self.transform is not None:
            return self.transform(state)
        return self.unitary.apply(state)

    def outcome_amplitudes(self, state):
        """<j|U(state)> for every outcome j."""
        evolved = self.evolve(state)
        return np.array([
            inner_product(outcome, evolved) for _, outcome in self.outcomes
        ])

    def beta(self, p_basis):
        """beta[k, j] = <j|U|k> over an H^P basis and this setting's outcomes."""
        outcome_matrix = np.array([
            self.unitary.output_vector(outcome) for _, outcome in self.outcomes
        ])
        columns = np.array([
            self.unitary.matrix @ state.to_vector(self.unitary.input_basis)
            for state in p_basis
        ]).T
        return (outcome_matrix.conj() @ columns).T


@dataclass(frozen=True, eq=False)
class ReceiverModel:
    """Bob's receiver: settings, mode bookkeeping and basis-choice policy."""
    kind: str
    settings: tuple
    channel_modes: frozenset
    ancilla_modes: frozenset = frozenset()
    passive_choice: bool = False
    single_photon: bool = False
    requires_blinding: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'settings', tuple(self.settings))
        object.__setattr__(self, 'channel_modes', frozenset(self.channel_modes))
        object.__setattr__(self, 'ancilla_modes', frozenset(self.ancilla_modes))
        ids = [setting.id for setting in self.settings]
        if not ids or len(set(ids)) != len(ids):
            raise ConfigError('Settings need unique ids.', {'settings': ids})
        for setting in self.settings:
            states = [state for _, state in setting.outcomes]
            gram = gram_matrix(states)
            if np.abs(gram - np.eye(len(states))).max(initial=0.0) > TOLERANCE:
                raise ConfigError(
                    'Outcome states must be orthonormal.',
                    {'setting': setting.id},
                )
            if not setting.unitary.is_isometry:
                raise ConfigError(
                    'Setting unitary is not an isometry.',
                    {
                        'setting': setting.id,
                        'residual': setting.unitary.isometry_residual(),
                    },
                )

    def setting(self, setting_id):
        for setting in self.settings:
            if setting.id == setting_id:
                return setting
        raise ConfigError(
            f'Unknown setting {setting_id!r}.', {'setting': setting_id})

    @property
    def bases(self):
        return list(dict.fromkeys(setting.basis for setting in self.settings))

    def settings_for_basis(self, basis):
        return [s for s in self.settings if s.basis == basis]

    def registered_basis(self, setting_id, outcome_id):
        """Basis a valid outcome is sifted in; None for loss and invalid."""
        setting = self.setting(setting_id)
        if setting.interpretation.lookup(outcome_id).is_valid:
            return setting.basis
        return None


def interpret(receiver, setting, outcome):
    """Return the interpretation of an outcome in a setting."""
    return receiver.setting(setting).interpretation.lookup(outcome)


@dataclass(frozen=True)
class AliceState:
    label: str
    basis: str
    bit: int
    state: PhotonicState


@dataclass(frozen=True, eq=False)
class AliceSourceModel:
    """Alice's ideal source: logical states embedded in channel modes.

    The states of the first basis form the logical basis |i>_A.
    """
    name: str
    states: tuple

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        for basis in self.bases:
            members = [s.state for s in self.states if s.basis == basis]
            gram = gram_matrix(members)
            if np.abs(gram - np.eye(len(members))).max(initial=0.0) > TOLERANCE:
                raise ConfigError(
                    'States within one basis must be orthonormal.',
                    {'source': self.name, 'basis': basis},
                )

    @property
    def bases(self):
        return list(dict.fromkeys(s.basis for s in self.states))

    @property
    def labels(self):
        return [s.label for s in self.states]

    def state(self, label):
        for candidate in self.states:
            if candidate.label == label:
                return candidate
        raise ConfigError(f'Unknown Alice state {label!r}.', {'label': label})

    def basis_of(self, label):
        return self.state(label).basis

    @property
    def logical_basis(self):
        first = self.bases[0]
        return sorted(
            (s for s in self.states if s.basis == first),
            key=lambda s: s.bit,
        )

    @property
    def logical_labels(self):
        return [s.label for s in self.logical_basis]

    def alpha(self, label):
        """Coefficients of a state in the logical basis."""
        target = self.state(label).state
        coefficients = np.array([
            inner_product(logical.state, target)
            for logical in self.logical_basis
        ])
        if abs(np.linalg.norm(coefficients) - 1.0) > TOLERANCE:
            raise DomainError(
                'Alice state leaves the logical qubit.', {'label': label})
        return coefficients


def bb84_source(name, zero, one, y_basis=False):
    """Four BB84 states built on two orthonormal carrier states.

    With y_basis the source uses the Hadamard and y bases instead.
    """
    r = 1 / math.sqrt(2)
    plus = PhotonicState.superposition([(r, zero), (r, one)])
    minus = PhotonicState.superposition([(r, zero), (-r, one)])
    if y_basis:
        return AliceSourceModel(name, (
            AliceState('+', HADAMARD, 0, plus),
            AliceState('-', HADAMARD, 1, minus),
            AliceState('+i', Y_BASIS, 0,
                       PhotonicState.superposition([(r, zero), (1j * r, one)])),
            AliceState('-i', Y_BASIS, 1,
                       PhotonicState.superposition([(r, zero), (-1j * r, one)])),
        ))
    return AliceSourceModel(name, (
        AliceState('0', COMPUTATIONAL, 0, zero),
        AliceState('1', COMPUTATIONAL, 1, one),
        AliceState('+', HADAMARD, 0, plus),
        AliceState('-', HADAMARD, 1, minus),
    ))


def error_outcomes(receiver, setting, alice_label, alice=None,
                   matched_only=True):
    """J_error = J_(1-b) U J_invalid for Alice's bit b.

    Mismatched bases raise unless matched_only is False, in which case only
    J_invalid is returned.
    """
    setting = receiver.setting(setting)
    basis, bit = _label_basis_bit(alice_label, alice)
    sets = setting.interpretation
    if basis != setting.basis:
        if matched_only:
            raise DomainError(
                'Errors are defined for matched bases.',
                {'setting': setting.id, 'alice': alice_label},
            )
        return set(sets.j_invalid)
    return set(sets.for_bit(1 - bit)) | set(sets.j_invalid)


STANDARD_LABELS = {
    '0': (COMPUTATIONAL, 0),
    '1': (COMPUTATIONAL, 1),
    '+': (HADAMARD, 0),
    '-': (HADAMARD, 1),
    '+i': (Y_BASIS, 0),
    '-i': (Y_BASIS, 1),
}


def _label_basis_bit(label, alice):
    if alice is not None:
        state = alice.state(label)
        return state.basis, state.bit
    try:
        return STANDARD_LABELS[label]
    except KeyError:
        raise ConfigError(
            f'Unknown Alice label {label!r}.', {'label': label})
