"""
Sparse photonic states over multimode Fock basis states.
"""
import cmath
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from core.errors import ConfigError, PhotonCutoffError, RegistryError
from core.conf import qkdlab_setting
from fockspace.constants import PRUNE_THRESHOLD, TOLERANCE
from fockspace.modes import FockBasisState, ModeLabel


def _pruned(amplitudes):
    merged = {}
    for basis_state, amplitude in amplitudes:
        merged[basis_state] = merged.get(basis_state, 0j) + complex(amplitude)
    return {
        basis_state: amplitude
        for basis_state, amplitude in sorted(merged.items())
        if abs(amplitude) >= PRUNE_THRESHOLD
    }


@dataclass(frozen=True, eq=False)
class PhotonicState:
    """Complex amplitudes over Fock basis states.

    registry is either None (a free state whose registry is the set of
    occupied modes) or an explicit frozenset of ModeLabel.
    """
    amplitudes: MappingProxyType
    registry: frozenset = None

    def __post_init__(self):
        items = self.amplitudes.items() if hasattr(
            self.amplitudes, 'items') else self.amplitudes
        pruned = _pruned(
            (basis_state if isinstance(basis_state, FockBasisState)
             else FockBasisState(tuple(basis_state)), amplitude)
            for basis_state, amplitude in items
        )
        object.__setattr__(self, 'amplitudes', MappingProxyType(pruned))
        if self.registry is not None:
            registry = frozenset(self.registry)
            stray = self.occupied_modes() - registry
            if stray:
                raise RegistryError(
                    'State occupies modes outside its registry.',
                    {'modes': sorted(str(mode) for mode in stray)},
                )
            object.__setattr__(self, 'registry', registry)

    @classmethod
    def vacuum(cls, registry=None):
        return cls({FockBasisState.vacuum(): 1.0}, registry)

    @classmethod
    def basis(cls, occupation, registry=None, amplitude=1.0):
        """Return a single Fock basis state, given as FockBasisState or dict."""
        if not isinstance(occupation, FockBasisState):
            occupation = FockBasisState.of(occupation)
        return cls({occupation: amplitude}, registry)

    @classmethod
    def single(cls, mode, registry=None):
        """One photon in one mode."""
        return cls.basis({mode: 1}, registry)

    @classmethod
    def superposition(cls, terms, registry=None):
        """Sum of (amplitude, state) pairs."""
        result = {}
        for amplitude, state in terms:
            for basis_state, value in state.amplitudes.items():
                result[basis_state] = result.get(basis_state, 0j) + \
                    complex(amplitude) * value
        return cls(result, registry)

    @classmethod
    def from_vector(cls, basis, vector, registry=None):
        return cls(zip(basis, np.asarray(vector, dtype=complex)), registry)

    def occupied_modes(self):
        modes = set()
        for basis_state in self.amplitudes:
            modes.update(basis_state.modes)
        return frozenset(modes)

    @property
    def effective_registry(self):
        if self.registry is not None:
            return self.registry
        return self.occupied_modes()

    @property
    def normalized(self):
        return abs(self.norm() - 1.0) < TOLERANCE

    def norm(self):
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalize(self):
        norm = self.norm()
        if norm < PRUNE_THRESHOLD:
            raise ConfigError('Cannot normalize the zero vector.')
        return self / norm

    def amplitude(self, basis_state):
        if not isinstance(basis_state, FockBasisState):
            basis_state = FockBasisState.of(basis_state)
        return self.amplitudes.get(basis_state, 0j)

    def items(self):
        return self.amplitudes.items()

    def with_registry(self, registry):
        return PhotonicState(dict(self.amplitudes), registry)

    def photon_numbers(self):
        return {basis_state.total for basis_state in self.amplitudes}

    def max_count(self):
        return max(
            (count for basis_state in self.amplitudes
             for _, count in basis_state.occupation),
            default=0,
        )

    def to_vector(self, basis):
        """Coefficients in an ordered list of Fock basis states."""
        index = {basis_state: n for n, basis_state in enumerate(basis)}
        vector = np.zeros(len(basis), dtype=complex)
        for basis_state, amplitude in self.amplitudes.items():
            if basis_state not in index:
                raise RegistryError(
                    'State has support outside the requested basis.',
                    {'basis_state': str(basis_state)},
                )
            vector[index[basis_state]] = amplitude
        return vector

    def tensor(self, other):
        """Product with a state on disjoint modes."""
        overlap = self.occupied_modes() & other.occupied_modes()
        if overlap:
            raise RegistryError(
                'Tensor factors must live on disjoint modes.',
                {'modes': sorted(str(mode) for mode in overlap)},
            )
        registry = None
        if self.registry is not None and other.registry is not None:
            registry = self.registry | other.registry
        return PhotonicState(
            (
                (FockBasisState(a.occupation + b.occupation), x * y)
                for a, x in self.amplitudes.items()
                for b, y in other.amplitudes.items()
            ),
            registry,
        )

    def is_close(self, other, tol=TOLERANCE):
        keys = set(self.amplitudes) | set(other.amplitudes)
        return all(
            abs(self.amplitude(key) - other.amplitude(key)) < tol
            for key in keys
        )

    def _combined_registry(self, other):
        if self.registry is None:
            return other.registry
        if other.registry is None or other.registry == self.registry:
            return self.registry
        raise RegistryError('States live in different mode registries.')

    def __add__(self, other):
        registry = self._combined_registry(other)
        return PhotonicState(
            list(self.amplitudes.items()) + list(other.amplitudes.items()),
            registry,
        )

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        return PhotonicState(
            {k: complex(scalar) * v for k, v in self.amplitudes.items()},
            self.registry,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __str__(self):
        if not self.amplitudes:
            return '0'
        return ' + '.join(
            f'({amplitude.real:.6g}{amplitude.imag:+.6g}j){basis_state}'
            for basis_state, amplitude in self.amplitudes.items()
        )


def inner_product(a, b):
    """Return <a|b>."""
    if a.registry is not None and b.registry is not None \
            and a.registry != b.registry:
        raise RegistryError(
            'Inner product of states from different mode registries.',
            {
                'left': sorted(str(mode) for mode in a.registry),
                'right': sorted(str(mode) for mode in b.registry),
            },
        )
    small, large = (a, b) if len(a.amplitudes) <= len(b.amplitudes) \
        else (b, a)
    total = 0j
    for basis_state, amplitude in small.amplitudes.items():
        other = large.amplitudes.get(basis_state)
        if other is not None:
            if small is a:
                total += amplitude.conjugate() * other
            else:
                total += other.conjugate() * amplitude
    return total


def check_cutoff(state, cutoff=None):
    """Raise PhotonCutoffError when a mode holds more photons than allowed."""
    cutoff = qkdlab_setting('PHOTON_CUTOFF') if cutoff is None else cutoff
    largest = state.max_count()
    if largest > cutoff:
        raise PhotonCutoffError(
            f'Mode occupation {largest} exceeds the photon cutoff {cutoff}.',
            {'cutoff': cutoff, 'count': largest},
        )
    return state


def canonical_phase(vector):
    """Rotate a vector so that its largest component is real positive."""
    vector = np.asarray(vector, dtype=complex)
    if not vector.size:
        return vector
    pivot = int(np.argmax(np.abs(vector) > np.abs(vector).max() - TOLERANCE))
    if abs(vector[pivot]) < PRUNE_THRESHOLD:
        return vector
    return vector * cmath.exp(-1j * cmath.phase(vector[pivot]))


def mode_state(mode):
    """Shorthand for a single photon in a ModeLabel or "kind:index" string."""
    if not isinstance(mode, ModeLabel):
        mode = ModeLabel.parse(mode)
    return PhotonicState.single(mode)
