"""
Known attacks on QKD implementations with their footprints and families.
"""
from dataclasses import dataclass

from classify.footprint import (
    ANCILLA_IN,
    ANCILLA_OUT,
    H_A,
    H_B,
    H_B_OUTSIDE,
    H_ENV,
    AttackClass,
    SpaceFootprint,
    classify,
)

FAKED_STATES = 'faked-states'
REVERSED_SPACE = 'reversed-space'
DETECTOR_EFFICIENCY_MISMATCH = 'detector-efficiency-mismatch'
BRIGHT_ILLUMINATION = 'bright-illumination'
TROJAN_HORSE = 'trojan-horse'

FAMILIES = (
    FAKED_STATES,
    REVERSED_SPACE,
    DETECTOR_EFFICIENCY_MISMATCH,
    BRIGHT_ILLUMINATION,
    TROJAN_HORSE,
)

# family -> the broader family it is a special case of
FAMILY_EDGES = (
    (FAKED_STATES, REVERSED_SPACE),
    (DETECTOR_EFFICIENCY_MISMATCH, FAKED_STATES),
)


@dataclass(frozen=True)
class AttackRecord:
    name: str
    footprint: SpaceFootprint
    families: frozenset
    expected_class: AttackClass
    note: str = ''

    def as_dict(self):
        return {
            'name': self.name,
            'footprint': self.footprint.as_dict(),
            'families': sorted(self.families),
            'expected_class': self.expected_class.value,
            'classified_as': classify(self.footprint).value,
            'note': self.note,
        }


def _record(name, reads, writes, families, expected, note, inert=False):
    return AttackRecord(
        name,
        SpaceFootprint(frozenset(reads), frozenset(writes), inert),
        frozenset(families),
        expected,
        note,
    )


_STATE = AttackClass.STATE_CHANNEL
_SIDE = AttackClass.SIDE_CHANNEL

_RECORDS = (
    _record('photon-number-splitting',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT}, (), _STATE,
            'Keeps one photon of multi-photon pulses, measures it after '
            'the basis reveal.'),
    _record('large-pulse-alice',
            {H_A, H_ENV}, {H_B, H_ENV, ANCILLA_OUT}, (TROJAN_HORSE,), _SIDE,
            'Reads the optical configuration of the sender from back '
            'reflections.'),
    _record('large-pulse-bob',
            {H_A, H_ENV}, {H_B, H_ENV, ANCILLA_OUT}, (TROJAN_HORSE,), _SIDE,
            'Reads the basis setting of the receiver; no enlarged measured '
            'space is used.'),
    _record('injection-locking',
            {H_A, H_ENV}, {H_B, H_ENV, ANCILLA_OUT}, (), _SIDE,
            'Seeds the sender laser so the wavelength reveals the state.'),
    _record('time-shift',
            {H_A}, {H_B}, (REVERSED_SPACE,), _STATE,
            'Delays the signal into windows where one detector dominates; '
            'never measures the signal.'),
    _record('trojan-pony',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT},
            (REVERSED_SPACE, FAKED_STATES), _STATE,
            'Exploits double clicks counted as losses.'),
    _record('imperfect-faraday-mirror',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT}, (), _STATE,
            'Sender states span three dimensions; measure-resend keeps '
            'errors low.'),
    _record('bright-illumination',
            {H_A, ANCILLA_IN}, {H_B, H_B_OUTSIDE, ANCILLA_OUT},
            (REVERSED_SPACE, BRIGHT_ILLUMINATION), _SIDE,
            'Blinds the detectors and sends bright faked states.'),
    _record('fixed-apparatus',
            {H_A, ANCILLA_IN, H_ENV}, {H_B, H_ENV, ANCILLA_OUT},
            (REVERSED_SPACE,), _SIDE,
            'General case touches the ancillary arm inside the receiver.'),
    _record('detector-efficiency-mismatch',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT},
            (REVERSED_SPACE, FAKED_STATES, DETECTOR_EFFICIENCY_MISMATCH),
            _STATE,
            'Sends states detected by one detector only.'),
    _record('interferometric-reversed-space',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT},
            (REVERSED_SPACE, FAKED_STATES), _STATE,
            'Sends the outer time bins of the unbalanced interferometer.'),
    _record('trojan-horse',
            {H_A, H_ENV}, {H_B, H_ENV, ANCILLA_OUT}, (TROJAN_HORSE,), _SIDE,
            'Probes device configuration with back-scattered light.'),
    _record('side-effect-leak',
            {H_A, ANCILLA_IN}, {H_B, ANCILLA_OUT, H_ENV}, (),
            AttackClass.TRIVIAL_SIDE_CHANNEL,
            'State-channel attack whose environmental side effect reaches '
            'nobody.', inert=True),
    _record('camera-in-lab',
            {H_ENV}, (), (), AttackClass.NEITHER,
            'Watches the receiver enter basis choices; no quantum channel '
            'use.'),
)

# individual attacks that are special cases of other individual attacks
_RECORD_EDGES = (
    ('large-pulse-alice', 'trojan-horse'),
    ('large-pulse-bob', 'trojan-horse'),
)


def registry():
    """Return the attack records in a fixed order."""
    return list(_RECORDS)


def find_record(name):
    for record in _RECORDS:
        if record.name == name:
            return record
    return None


def registry_graph():
    """Nodes and is-special-case-of edges between attacks and families."""
    nodes = [{'id': record.name, 'kind': 'attack',
              'class': record.expected_class.value} for record in _RECORDS]
    nodes += [{'id': f'family:{family}', 'kind': 'family'}
              for family in FAMILIES]
    edges = []
    for record in _RECORDS:
        for family in sorted(record.families):
            edges.append({'from': record.name, 'to': f'family:{family}'})
    edges += [{'from': source, 'to': target}
              for source, target in _RECORD_EDGES]
    edges += [{'from': f'family:{source}', 'to': f'family:{target}'}
              for source, target in FAMILY_EDGES]
    return {'nodes': nodes, 'edges': edges}
