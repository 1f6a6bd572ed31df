"""
Channels between Alice and Bob and the exact outcome distributions they induce.
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ConfigError
from fockspace.states import PhotonicState
from attacks.information import eve_conditional_states, guess_measurements
from attacks.isometry import AttackIsometry
from attacks.verification import align
from receivers.builders import alice_for

logger = logging.getLogger(__name__)

# probability mass outside every declared outcome
UNMEASURED = 'unmeasured'


class ChannelKind(str, enum.Enum):
    IDENTITY = 'identity'
    ATTACK = 'attack-isometry'
    PNS = 'pns'
    LOSSY = 'lossy'


@dataclass(frozen=True, eq=False)
class ChannelModel:
    kind: ChannelKind
    attack: AttackIsometry = None
    p_multi: float = 0.0
    loss: float = 0.0

    def as_dict(self):
        data = {'kind': self.kind.value}
        if self.kind is ChannelKind.ATTACK:
            data['attack'] = self.attack.name
        if self.kind is ChannelKind.PNS:
            data['p_multi'] = self.p_multi
        if self.kind is ChannelKind.LOSSY:
            data['loss'] = self.loss
        return data


def _probability(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f'{name} must be a number.', {name: value})
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f'{name} must lie in [0, 1].', {name: value})
    return value


def make_channel(kind, payload=None, receiver=None):
    """Create and return a channel.

    payload is an AttackIsometry for attack channels, p_multi for pns and
    the loss probability for lossy channels. With a receiver, attack
    payloads are checked against its reversed space.
    """
    try:
        kind = ChannelKind(kind)
    except ValueError:
        raise ConfigError(
            f'Unknown channel kind {kind!r}.',
            {'kind': kind, 'known': [k.value for k in ChannelKind]},
        )
    if kind is ChannelKind.IDENTITY:
        if payload is not None:
            raise ConfigError('The identity channel takes no payload.')
        return ChannelModel(kind)
    if kind is ChannelKind.ATTACK:
        if not isinstance(payload, AttackIsometry):
            raise ConfigError('Attack channels need an attack isometry.')
        if receiver is not None:
            align(payload, receiver)
        return ChannelModel(kind, attack=payload)
    if kind is ChannelKind.PNS:
        return ChannelModel(kind, p_multi=_probability(payload, 'p_multi'))
    return ChannelModel(kind, loss=_probability(payload, 'loss'))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Born probabilities for every (Alice state, Bob setting) cell.

    probabilities[a, s, o] runs over the setting's outcome ids followed by
    UNMEASURED and zero padding. eve_correct[a, s, o] is the probability
    that Eve's measurement names Alice's bit given that outcome.
    """
    alice_states: tuple
    settings: tuple
    outcome_ids: tuple
    probabilities: np.ndarray
    eve_correct: np.ndarray

    def cell(self, label, setting_id):
        a = [s.label for s in self.alice_states].index(label)
        s = [setting.id for setting in self.settings].index(setting_id)
        return dict(zip(self.outcome_ids[s], self.probabilities[a, s]))


def _channel_probabilities(setting, state):
    return np.abs(setting.outcome_amplitudes(state)) ** 2


def _attack_amplitudes(attack, alice, alice_state, setting):
    alpha = alice.alpha(alice_state.label)
    beta = setting.beta(attack.p_basis)
    return np.einsum('i,kj,ike->je', alpha, beta, attack.coefficients)


def exact_outcome_distribution(alice, channel, receiver):
    """Return the OutcomeDistribution the simulator samples from."""
    alice = alice_for(receiver) if alice is None else alice
    settings = receiver.settings
    width = max(len(s.outcome_ids) for s in settings) + 1
    probabilities = np.zeros((len(alice.states), len(settings), width))
    eve_correct = np.full_like(probabilities, 0.5)

    attack = projectors = None
    if channel.kind is ChannelKind.ATTACK:
        attack, _ = align(channel.attack, receiver, alice)
        projectors = guess_measurements(
            eve_conditional_states(attack, receiver, alice))

    vacuum = PhotonicState.vacuum()
    for a, alice_state in enumerate(alice.states):
        for s, setting in enumerate(settings):
            n = len(setting.outcome_ids)
            if attack is None:
                cell = _channel_probabilities(setting, alice_state.state)
                if channel.kind is ChannelKind.LOSSY:
                    cell = (1 - channel.loss) * cell + \
                        channel.loss * _channel_probabilities(setting, vacuum)
            else:
                amplitudes = _attack_amplitudes(
                    attack, alice, alice_state, setting)
                cell = np.einsum('je,je->j', amplitudes.conj(),
                                 amplitudes).real
                matched = setting.basis == alice_state.basis
                for j, outcome in enumerate(setting.outcome_ids):
                    valid = setting.interpretation.lookup(outcome).is_valid
                    if not (matched and valid) or cell[j] < 1e-15:
                        continue
                    e = amplitudes[j]
                    guess_zero = float(np.real(
                        e.conj() @ projectors[setting.basis] @ e)) / cell[j]
                    eve_correct[a, s, j] = guess_zero \
                        if alice_state.bit == 0 else 1 - guess_zero
            probabilities[a, s, :n] = cell
            probabilities[a, s, n] = max(1.0 - cell.sum(), 0.0)

    outcome_ids = tuple(
        tuple(setting.outcome_ids) + (UNMEASURED,) for setting in settings)
    logger.debug('Exact outcome distribution for %s over %s',
                 channel.kind.value, receiver.kind)
    return OutcomeDistribution(
        tuple(alice.states), tuple(settings), outcome_ids,
        probabilities, np.clip(eve_correct, 0.0, 1.0),
    )
