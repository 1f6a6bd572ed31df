"""
Mode labels and multimode Fock basis states.
"""
import enum
import functools
from dataclasses import dataclass

from core.errors import ConfigError


class ModeKind(enum.Enum):
    """Kinds of photonic modes, in canonical order."""
    CHANNEL = 'channel'
    BLOCKED = 'blocked'
    STRAIGHT = 'straight'
    DOWN = 'down'
    POL_H = 'pol-h'
    POL_V = 'pol-v'
    CUSTOM = 'custom'
    ARM_SHORT = 'arm-short'
    ARM_LONG = 'arm-long'

    @property
    def rank(self):
        return _KIND_RANKS[self]


_KIND_RANKS = {kind: rank for rank, kind in enumerate(ModeKind)}

INPUT_ARM_KINDS = frozenset({ModeKind.CHANNEL, ModeKind.BLOCKED})
OUTPUT_ARM_KINDS = frozenset({ModeKind.STRAIGHT, ModeKind.DOWN})


@functools.total_ordering
@dataclass(frozen=True)
class ModeLabel:
    """A distinguishable photonic mode: kind plus time bin or slot."""
    kind: ModeKind
    index: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, ModeKind):
            object.__setattr__(self, 'kind', ModeKind(self.kind))
        object.__setattr__(self, 'index', int(self.index))

    @property
    def sort_key(self):
        return (self.kind.rank, self.index)

    def __lt__(self, other):
        if not isinstance(other, ModeLabel):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self):
        return f'{self.kind.value}:{self.index}'

    def __repr__(self):
        return f'ModeLabel({self})'

    def shifted(self, delta):
        """Return the same kind of mode delta time bins later."""
        return ModeLabel(self.kind, self.index + delta)

    @classmethod
    def parse(cls, text):
        """Parse the "kind:index" string form."""
        try:
            kind, index = str(text).rsplit(':', 1)
            return cls(ModeKind(kind), int(index))
        except ValueError as exc:
            raise ConfigError(
                f'Malformed mode label {text!r}.',
                {'label': str(text)},
            ) from exc


def channel(t):
    """Channel time-bin mode t'_t (the open input arm a_t)."""
    return ModeLabel(ModeKind.CHANNEL, t)


def blocked(t):
    """Blocked input arm b_t of the interferometer."""
    return ModeLabel(ModeKind.BLOCKED, t)


def straight(t):
    return ModeLabel(ModeKind.STRAIGHT, t)


def down(t):
    return ModeLabel(ModeKind.DOWN, t)


def pol_h():
    return ModeLabel(ModeKind.POL_H, 0)


def pol_v():
    return ModeLabel(ModeKind.POL_V, 0)


@functools.total_ordering
@dataclass(frozen=True)
class FockBasisState:
    """Occupation numbers of a multimode Fock basis state.

    Stored as a canonical tuple of (mode, count) pairs with count > 0,
    so the vacuum is the empty tuple.
    """
    occupation: tuple = ()

    def __post_init__(self):
        counts = {}
        for mode, count in self.occupation:
            if not isinstance(mode, ModeLabel):
                mode = ModeLabel.parse(mode)
            count = int(count)
            if count < 0:
                raise ConfigError(
                    'Photon counts must be non-negative.',
                    {'mode': str(mode), 'count': count},
                )
            if count:
                counts[mode] = counts.get(mode, 0) + count
        object.__setattr__(
            self, 'occupation', tuple(sorted(counts.items())),
        )

    @classmethod
    def of(cls, counts=None):
        """Build from a mapping of mode to photon count."""
        return cls(tuple(dict(counts or {}).items()))

    @classmethod
    def vacuum(cls):
        return cls(())

    def count(self, mode):
        for label, count in self.occupation:
            if label == mode:
                return count
        return 0

    @property
    def total(self):
        return sum(count for _, count in self.occupation)

    @property
    def modes(self):
        return frozenset(mode for mode, _ in self.occupation)

    @property
    def is_vacuum(self):
        return not self.occupation

    def as_dict(self):
        return dict(self.occupation)

    def without(self, modes):
        """Drop the given modes, returning the remaining occupation."""
        return FockBasisState(tuple(
            (mode, count) for mode, count in self.occupation
            if mode not in modes
        ))

    def restricted(self, modes):
        """Keep only the given modes."""
        return FockBasisState(tuple(
            (mode, count) for mode, count in self.occupation
            if mode in modes
        ))

    def plus(self, counts):
        """Add photons, given as a mapping of mode to count."""
        return FockBasisState(self.occupation + tuple(counts.items()))

    def relabeled(self, mapping):
        return FockBasisState(tuple(
            (mapping.get(mode, mode), count)
            for mode, count in self.occupation
        ))

    @property
    def sort_key(self):
        return (
            self.total,
            tuple((mode.sort_key, -count) for mode, count in self.occupation),
        )

    def __lt__(self, other):
        if not isinstance(other, FockBasisState):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self):
        if self.is_vacuum:
            return '|V>'
        body = ','.join(
            str(mode) if count == 1 else f'{mode}^{count}'
            for mode, count in self.occupation
        )
        return f'|{body}>'
