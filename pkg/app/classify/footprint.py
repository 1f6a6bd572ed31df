"""
Side-channel versus state-channel classification of attack footprints.
"""
import enum
from dataclasses import dataclass

from core.errors import ConfigError

H_A = 'H_A'
H_A_OUTSIDE = 'H_A_full\\H_A'
H_B = 'H_B'
H_B_OUTSIDE = 'H_B_full\\H_B'
H_ENV = 'H_env'
ANCILLA_IN = 'eve_ancilla_in'
ANCILLA_OUT = 'eve_ancilla_out'

READ_SPACES = frozenset({H_A, H_A_OUTSIDE, H_ENV, ANCILLA_IN})
WRITE_SPACES = frozenset({H_B, H_B_OUTSIDE, H_ENV, ANCILLA_OUT})


class AttackClass(str, enum.Enum):
    SIDE_CHANNEL = 'SideChannel'
    STATE_CHANNEL = 'StateChannel'
    NEITHER = 'Neither'
    TRIVIAL_SIDE_CHANNEL = 'TrivialSideChannel'


@dataclass(frozen=True)
class SpaceFootprint:
    """Spaces an attack depends on and spaces it affects.

    inert_env_write marks a write to H_env that reaches neither Alice nor
    Bob.
    """
    reads: frozenset = frozenset()
    writes: frozenset = frozenset()
    inert_env_write: bool = False

    def __post_init__(self):
        reads, writes = frozenset(self.reads), frozenset(self.writes)
        if not reads <= READ_SPACES or not writes <= WRITE_SPACES:
            raise ConfigError(
                'Footprint uses spaces outside the fixed vocabulary.',
                {'reads': sorted(reads - READ_SPACES),
                 'writes': sorted(writes - WRITE_SPACES)},
            )
        object.__setattr__(self, 'reads', reads)
        object.__setattr__(self, 'writes', writes)

    def as_dict(self):
        return {
            'reads': sorted(self.reads),
            'writes': sorted(self.writes),
            'inert_env_write': self.inert_env_write,
        }


def _uses_quantum_channel(footprint):
    return bool(footprint.reads & {H_A, H_A_OUTSIDE}
                or footprint.writes & {H_B, H_B_OUTSIDE})


def classify(footprint):
    """Return the AttackClass of a footprint."""
    if not _uses_quantum_channel(footprint):
        return AttackClass.NEITHER
    side_reads = footprint.reads & {H_A_OUTSIDE, H_ENV}
    side_writes = footprint.writes & {H_B_OUTSIDE, H_ENV}
    if side_reads or side_writes:
        if not side_reads and side_writes == {H_ENV} \
                and footprint.inert_env_write:
            return AttackClass.TRIVIAL_SIDE_CHANNEL
        return AttackClass.SIDE_CHANNEL
    if footprint.reads <= {H_A, ANCILLA_IN} and \
            footprint.writes <= {H_B, ANCILLA_OUT}:
        return AttackClass.STATE_CHANNEL
    return AttackClass.NEITHER
