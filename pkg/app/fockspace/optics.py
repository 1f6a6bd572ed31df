"""
Exact linear-optical evolution of photonic states.

Two-mode elements act through creation-operator substitution: with a 2x2
unitary u, the input creation operators map as
a_in[0]^+ -> u[0,0] c^+ + u[1,0] d^+ and a_in[1]^+ -> u[0,1] c^+ + u[1,1] d^+.
"""
import cmath
import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb, factorial

from core.errors import DomainError, PhotonCutoffError, RegistryError
from core.conf import qkdlab_setting
from fockspace.modes import (
    INPUT_ARM_KINDS,
    OUTPUT_ARM_KINDS,
    FockBasisState,
    ModeKind,
    ModeLabel,
    blocked,
    channel,
    down,
    pol_h,
    pol_v,
    straight,
)
from fockspace.states import PhotonicState

logger = logging.getLogger(__name__)

BEAM_SPLITTER = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)
HADAMARD_ROTATOR = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@functools.lru_cache(maxsize=4096)
def _expansion(n_first, n_second, u):
    """Output amplitudes {(p, q): amplitude} for |n_first, n_second>."""
    (u00, u01), (u10, u11) = u
    norm = math.sqrt(
        factorial(n_first, exact=True) * factorial(n_second, exact=True))
    terms = {}
    for k in range(n_first + 1):
        left = comb(n_first, k, exact=True) * u00 ** k * u10 ** (n_first - k)
        for m in range(n_second + 1):
            right = comb(n_second, m, exact=True) * \
                u01 ** m * u11 ** (n_second - m)
            p = k + m
            q = n_first + n_second - p
            terms[(p, q)] = terms.get((p, q), 0j) + left * right
    return {
        pq: coefficient * math.sqrt(
            factorial(pq[0], exact=True) * factorial(pq[1], exact=True)) / norm
        for pq, coefficient in terms.items()
    }


def _check_inputs(state, in_modes):
    if state.registry is not None:
        missing = set(in_modes) - state.registry
        if missing:
            raise RegistryError(
                'Input modes are not in the state registry.',
                {'modes': sorted(str(mode) for mode in missing)},
            )


def _next_registry(state, in_modes, out_modes):
    if state.registry is None:
        return None
    return (state.registry - set(in_modes)) | set(out_modes)


def apply_two_mode_unitary(state, in_modes, out_modes, u, cutoff=None):
    """Apply a 2x2 linear-optical unitary mapping in_modes onto out_modes."""
    in_modes = tuple(in_modes)
    out_modes = tuple(out_modes)
    if in_modes[0] == in_modes[1] or out_modes[0] == out_modes[1]:
        raise DomainError('A two-mode element needs two distinct modes.')
    _check_inputs(state, in_modes)
    cutoff = qkdlab_setting('PHOTON_CUTOFF') if cutoff is None else cutoff
    key = tuple(tuple(complex(x) for x in row) for row in np.asarray(u))

    result = {}
    for basis_state, amplitude in state.items():
        n_first = basis_state.count(in_modes[0])
        n_second = basis_state.count(in_modes[1])
        rest = basis_state.without(in_modes)
        if rest.count(out_modes[0]) or rest.count(out_modes[1]):
            raise DomainError(
                'Output modes of an element must be empty or reuse its inputs.',
                {'out_modes': [str(mode) for mode in out_modes]},
            )
        for (p, q), coefficient in _expansion(n_first, n_second, key).items():
            if max(p, q) > cutoff:
                raise PhotonCutoffError(
                    f'Element output exceeds the photon cutoff {cutoff}.',
                    {'cutoff': cutoff, 'count': max(p, q)},
                )
            target = rest.plus({out_modes[0]: p, out_modes[1]: q})
            result[target] = result.get(target, 0j) + amplitude * coefficient
    return PhotonicState(result, _next_registry(state, in_modes, out_modes))


def apply_beam_splitter(state, in_modes, out_modes, cutoff=None):
    """Balanced beam splitter, i phase on reflection."""
    return apply_two_mode_unitary(
        state, in_modes, out_modes, BEAM_SPLITTER, cutoff)


def apply_polarization_rotation(state, modes=None, cutoff=None):
    """Half-wave rotation taking H to (H+V)/sqrt2 and V to (H-V)/sqrt2."""
    modes = modes or (pol_h(), pol_v())
    return apply_two_mode_unitary(
        state, modes, modes, HADAMARD_ROTATOR, cutoff)


def apply_phase_shift(state, mode, phi):
    """Each basis state with n photons in mode gains exp(i n phi)."""
    _check_inputs(state, (mode,))
    return PhotonicState(
        {
            basis_state: amplitude * cmath.exp(
                1j * basis_state.count(mode) * phi)
            for basis_state, amplitude in state.items()
        },
        state.registry,
    )


def relabel(state, mapping):
    """Rename modes simultaneously (delay lines, arm swaps)."""
    _check_inputs(state, tuple(mapping))
    targets = list(mapping.values())
    if len(set(targets)) != len(targets):
        raise DomainError('Relabeling must be injective.')
    registry = None
    if state.registry is not None:
        registry = frozenset(mapping.get(mode, mode) for mode in state.registry)
    result = {}
    for basis_state, amplitude in state.items():
        untouched = basis_state.without(mapping)
        moved = basis_state.restricted(mapping).relabeled(mapping)
        if untouched.modes & moved.modes:
            raise DomainError('Relabeling collides with an occupied mode.')
        result[FockBasisState(untouched.occupation + moved.occupation)] = \
            amplitude
    return PhotonicState(result, registry)


@dataclass(frozen=True)
class InterferometerConfig:
    """Unbalanced Mach-Zehnder interferometer with a phase on the long arm."""
    phase: float = 0.0
    delay: int = 1
    blocked_arm_present: bool = True

    def __post_init__(self):
        phase = float(self.phase) % (2 * math.pi)
        object.__setattr__(self, 'phase', phase)
        if self.delay != 1:
            raise DomainError(
                'Time bins are multiples of the interferometer delay.',
                {'delay': self.delay},
            )


def _arm(kind, t):
    return ModeLabel(kind, t)


def _time_bins(state, kinds):
    bins = set()
    for mode in state.occupied_modes():
        if mode.kind in kinds:
            bins.add(mode.index)
    return bins


def _registry_bins(registry, kinds):
    return {mode.index for mode in registry if mode.kind in kinds}


def _check_support(state, allowed, message):
    stray = {
        mode for mode in state.effective_registry
        if mode.kind not in allowed
    }
    if stray:
        raise DomainError(message, {
            'modes': sorted(str(mode) for mode in stray),
        })


def mz_transform(state, config=None, cutoff=None):
    """Evolve channel and blocked time-bin modes to the detector arms."""
    config = config or InterferometerConfig()
    _check_support(
        state, INPUT_ARM_KINDS, 'Forward evolution takes input-arm modes only.')
    if not config.blocked_arm_present and any(
            mode.kind is ModeKind.BLOCKED for mode in state.occupied_modes()):
        raise DomainError('The blocked arm is absent from this interferometer.')

    bins = _time_bins(state, INPUT_ARM_KINDS)
    evolved = state.with_registry(None)
    for t in sorted(bins):
        evolved = apply_beam_splitter(
            evolved,
            (channel(t), blocked(t)),
            (_arm(ModeKind.ARM_SHORT, t), _arm(ModeKind.ARM_LONG, t)),
            cutoff,
        )
    for t in sorted(bins):
        evolved = apply_phase_shift(
            evolved, _arm(ModeKind.ARM_LONG, t), config.phase)
    evolved = relabel(evolved, {
        _arm(ModeKind.ARM_LONG, t): _arm(ModeKind.ARM_LONG, t + config.delay)
        for t in bins
    })
    for t in sorted(bins | {t + config.delay for t in bins}):
        evolved = apply_beam_splitter(
            evolved,
            (_arm(ModeKind.ARM_SHORT, t), _arm(ModeKind.ARM_LONG, t)),
            (straight(t), down(t)),
            cutoff,
        )

    if state.registry is None:
        return evolved
    registry_bins = _registry_bins(state.registry, INPUT_ARM_KINDS)
    outputs = set()
    for t in registry_bins:
        outputs.update({straight(t), down(t),
                        straight(t + config.delay), down(t + config.delay)})
    return evolved.with_registry(frozenset(outputs))


def mz_reverse(state, config=None, cutoff=None):
    """Run detector-arm modes backwards through the interferometer."""
    config = config or InterferometerConfig()
    _check_support(
        state, OUTPUT_ARM_KINDS, 'Reverse evolution takes output-arm modes only.')

    bins = _time_bins(state, OUTPUT_ARM_KINDS)
    inverse = BEAM_SPLITTER.conj().T
    evolved = state.with_registry(None)
    for t in sorted(bins):
        evolved = apply_two_mode_unitary(
            evolved,
            (straight(t), down(t)),
            (_arm(ModeKind.ARM_SHORT, t), _arm(ModeKind.ARM_LONG, t)),
            inverse,
            cutoff,
        )
    evolved = relabel(evolved, {
        _arm(ModeKind.ARM_LONG, t): _arm(ModeKind.ARM_LONG, t - config.delay)
        for t in bins
    })
    for t in sorted(bins):
        evolved = apply_phase_shift(
            evolved, _arm(ModeKind.ARM_LONG, t - config.delay), -config.phase)
    for t in sorted(bins | {t - config.delay for t in bins}):
        evolved = apply_two_mode_unitary(
            evolved,
            (_arm(ModeKind.ARM_SHORT, t), _arm(ModeKind.ARM_LONG, t)),
            (channel(t), blocked(t)),
            inverse,
            cutoff,
        )

    if state.registry is None:
        return evolved
    inputs = set()
    for t in _registry_bins(state.registry, OUTPUT_ARM_KINDS):
        inputs.update({channel(t), blocked(t),
                       channel(t - config.delay), blocked(t - config.delay)})
    return evolved.with_registry(frozenset(inputs))


def bright_state(theta, photons, modes=None, cutoff=None):
    """k photons sharing the polarization cos(theta) H + sin(theta) V."""
    modes = modes or (pol_h(), pol_v())
    cutoff = max(photons, qkdlab_setting('PHOTON_CUTOFF')) \
        if cutoff is None else cutoff
    if photons > cutoff:
        raise PhotonCutoffError(
            f'Bright state with {photons} photons exceeds cutoff {cutoff}.',
            {'cutoff': cutoff, 'count': photons},
        )
    c, s = math.cos(theta), math.sin(theta)
    amplitudes = {}
    for m in range(photons + 1):
        amplitudes[FockBasisState.of({modes[0]: m, modes[1]: photons - m})] = \
            math.sqrt(comb(photons, m, exact=True)) * \
            c ** m * s ** (photons - m)
    logger.debug('Built %d-photon bright state at theta=%.4f', photons, theta)
    return PhotonicState(amplitudes)
