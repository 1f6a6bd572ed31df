"""
Hand-written attacks with known coefficient tables.
"""
import logging
import math

import numpy as np

from core.errors import ConfigError
from fockspace.constants import TOLERANCE
from fockspace.modes import channel, pol_h, pol_v
from fockspace.states import PhotonicState
from attacks.isometry import AttackIsometry
from receivers.builders import alice_for, make_receiver, orthonormal_bright_states
from receivers.reversal import project, reversed_space

logger = logging.getLogger(__name__)


def attack_from_terms(name, receiver, terms, eve_dim, alice=None):
    """Create and return an attack from {label: [(amplitude, e, state)]}.

    Each state is projected onto the receiver's H^P, so only its component
    there enters the table.
    """
    alice = alice_for(receiver) if alice is None else alice
    p_basis = reversed_space(receiver)
    labels = alice.logical_labels
    coefficients = np.zeros((len(labels), len(p_basis), eve_dim), dtype=complex)
    for i, label in enumerate(labels):
        for amplitude, e, state in terms.get(label, ()):
            coefficients[i, :, e] += amplitude * project(p_basis, state)
    return AttackIsometry(
        labels, p_basis, coefficients, name=name,
        provenance={'receiver': receiver.kind, 'source': 'library'},
    )


def faked_states_attack(receiver=None):
    """|0> -> |E1>|t'-1>, |1> -> |E2>|t'2> against the 6-mode receiver."""
    receiver = receiver or make_receiver('interferometric-6mode')
    return attack_from_terms('faked-states', receiver, {
        '0': [(1.0, 0, PhotonicState.single(channel(-1)))],
        '1': [(1.0, 1, PhotonicState.single(channel(2)))],
    }, eve_dim=2)


def check_d2_normalization(p1, p2, p3, p4):
    """Raise ConfigError unless |p1|^2+|p2|^2+2|p3|^2 = |p4|^2+|p2|^2+2|p3|^2 = 1."""
    shared = abs(p2) ** 2 + 2 * abs(p3) ** 2
    norms = (abs(p1) ** 2 + shared, abs(p4) ** 2 + shared)
    if any(abs(norm - 1) > TOLERANCE for norm in norms):
        raise ConfigError(
            'Parameters violate the normalization conditions.',
            {'p': [str(p) for p in (p1, p2, p3, p4)],
             'norms': [float(norm) for norm in norms]},
        )


def d2_attack(p1=0.5, p2=0.5, p3=0.5, p4=0.5, receiver=None):
    """The two-bin attack family with |E1> = |E4>, |E2>, |E3> orthonormal.

    Eve components are 0: E1 = E4, 1: E2, 2: E3.
    """
    check_d2_normalization(p1, p2, p3, p4)
    receiver = receiver or make_receiver('interferometric-2mode')
    t = {n: PhotonicState.single(channel(n)) for n in range(-1, 3)}
    attack = attack_from_terms('d2', receiver, {
        '0': [(p1, 0, t[-1]), (p2, 1, t[0]), (p3, 2, t[1]), (p3, 2, t[2])],
        '1': [(-p3, 2, t[-1]), (p3, 2, t[0]), (p2, 1, t[1]), (p4, 0, t[2])],
    }, eve_dim=3)
    attack.provenance['parameters'] = {
        'p1': p1, 'p2': p2, 'p3': p3, 'p4': p4}
    return attack


def bright_attack(p=None, q=None, photons=20, receiver=None):
    """p|E0>|0>^b + q|E2>|+>^b +/- q|E3>|->^b with p^2 + 2q^2 = 1.

    Either parameter may be omitted and is then fixed by normalization.
    """
    if p is None and q is None:
        p = 1 / math.sqrt(3)
    if q is None:
        q = math.sqrt(max(1 - p ** 2, 0.0) / 2)
    if p is None:
        p = math.sqrt(max(1 - 2 * q ** 2, 0.0))
    if p < 0 or q < 0 or abs(p ** 2 + 2 * q ** 2 - 1) > TOLERANCE:
        raise ConfigError(
            'p and q must be non-negative with p^2 + 2q^2 = 1.',
            {'p': p, 'q': q},
        )
    receiver = receiver or make_receiver(
        'blinded-bright', {'photons': photons})
    bright = orthonormal_bright_states(receiver.params['photons'])
    attack = attack_from_terms('bright', receiver, {
        '0': [(p, 0, bright['psi0']), (q, 2, bright['psi2']),
              (q, 3, bright['psi3'])],
        '1': [(p, 1, bright['psi1']), (q, 2, bright['psi2']),
              (-q, 3, bright['psi3'])],
    }, eve_dim=4)
    attack.provenance['parameters'] = {'p': p, 'q': q}
    return attack


def cnot_attack(receiver=None):
    """Computational-basis CNOT onto Eve: |0> -> |E0>|H>, |1> -> |E1>|V>."""
    receiver = receiver or make_receiver('ideal-bb84')
    return attack_from_terms('cnot', receiver, {
        '0': [(1.0, 0, PhotonicState.single(pol_h()))],
        '1': [(1.0, 1, PhotonicState.single(pol_v()))],
    }, eve_dim=2)


def identity_attack(receiver, alice=None):
    """Eve leaves the channel alone and keeps a fixed ancilla."""
    alice = alice_for(receiver) if alice is None else alice
    return attack_from_terms('identity', receiver, {
        logical.label: [(1.0, 0, logical.state)]
        for logical in alice.logical_basis
    }, eve_dim=1, alice=alice)


BUILT_IN_ATTACKS = {
    'cnot': ('ideal-bb84', cnot_attack),
    'faked-states': ('interferometric-6mode', faked_states_attack),
    'd2-half': ('interferometric-2mode', d2_attack),
    'bright': ('blinded-bright', bright_attack),
}


def default_receiver_kind(name):
    """Receiver a built-in attack was written against."""
    try:
        return BUILT_IN_ATTACKS[name][0]
    except KeyError:
        raise ConfigError(
            f'Unknown built-in attack {name!r}.',
            {'attack': name, 'known': sorted(BUILT_IN_ATTACKS)},
        )


def make_attack(name, receiver=None):
    """Create and return a built-in attack by name."""
    kind = default_receiver_kind(name)
    receiver = receiver or make_receiver(kind)
    if receiver.kind != kind:
        raise ConfigError(
            f'Attack {name!r} is written for {kind!r}.',
            {'attack': name, 'receiver': receiver.kind},
        )
    attack = BUILT_IN_ATTACKS[name][1](receiver=receiver)
    logger.info('Loaded built-in attack %s', name)
    return attack
