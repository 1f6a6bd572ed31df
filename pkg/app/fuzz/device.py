"""
Black-box receiver devices for fuzzing.

Every device has the passive BB84 polarization layout: a 50/50 splitter
chooses the basis, one polarizing splitter measures H/V and a second one,
behind a Hadamard rotator, measures +45/-45. The devices differ in their
four detectors.
"""
import enum
import functools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from core.conf import qkdlab_setting
from core.errors import ConfigError
from fockspace.modes import pol_h, pol_v
from fockspace.optics import apply_polarization_rotation, bright_state
from fockspace.states import PhotonicState, inner_product
from receivers.receiver import COMPUTATIONAL, HADAMARD, Interpretation

logger = logging.getLogger(__name__)

DETECTORS = ('D_H', 'D_V', 'D_+', 'D_-')

# detector id -> (basis, bit)
DETECTOR_RESULTS = {
    'D_H': (COMPUTATIONAL, 0),
    'D_V': (COMPUTATIONAL, 1),
    'D_+': (HADAMARD, 0),
    'D_-': (HADAMARD, 1),
}

NAMED_POLARIZATIONS = {
    'H': 0.0,
    'V': math.pi / 2,
    '+45': math.pi / 4,
    '-45': 3 * math.pi / 4,
}


class DetectorModel(str, enum.Enum):
    APD = 'apd'
    THRESHOLD = 'threshold'
    RESOLVING = 'resolving'


@dataclass(frozen=True)
class Pulse:
    time_slot: int
    polarization: Union[str, float]
    mean_photons: float

    def __post_init__(self):
        if isinstance(self.polarization, str):
            if self.polarization not in NAMED_POLARIZATIONS:
                raise ConfigError(
                    f'Unknown polarization {self.polarization!r}.',
                    {'known': list(NAMED_POLARIZATIONS)},
                )
        elif not 0.0 <= float(self.polarization) < math.pi:
            raise ConfigError('Polarization angles lie in [0, pi).',
                              {'polarization': self.polarization})
        if not (math.isfinite(self.mean_photons) and self.mean_photons >= 0):
            raise ConfigError('mean_photons must be finite and non-negative.',
                              {'mean_photons': self.mean_photons})

    @property
    def theta(self):
        if isinstance(self.polarization, str):
            return NAMED_POLARIZATIONS[self.polarization]
        return float(self.polarization)

    def as_dict(self):
        return {
            'time_slot': self.time_slot,
            'polarization': self.polarization,
            'mean_photons': self.mean_photons,
        }


@dataclass(frozen=True)
class FuzzInput:
    """Pulses sent in one frame, ordered by time slot."""
    pulses: tuple

    def __post_init__(self):
        object.__setattr__(self, 'pulses', tuple(self.pulses))
        if not self.pulses:
            raise ConfigError('A fuzz input needs at least one pulse.')
        slots = [pulse.time_slot for pulse in self.pulses]
        if slots != sorted(slots):
            raise ConfigError('Pulse time slots must be non-decreasing.',
                              {'slots': slots})

    @property
    def final(self):
        return self.pulses[-1]

    @property
    def prefix(self):
        last = self.final.time_slot
        return tuple(p for p in self.pulses if p.time_slot < last)

    def followed_by(self, pulse, delay=1):
        """Return this input with a pulse appended delay slots later."""
        slot = self.final.time_slot + delay
        return FuzzInput(self.pulses + (
            Pulse(slot, pulse.polarization, pulse.mean_photons),))

    def as_dict(self):
        return {'pulses': [pulse.as_dict() for pulse in self.pulses]}


@dataclass(frozen=True)
class FuzzObservation:
    clicks: frozenset
    interpretation: Interpretation
    basis_registered: Optional[str] = None

    @property
    def outcome_class(self):
        return (self.interpretation.value, self.basis_registered)

    def as_dict(self):
        return {
            'clicks': sorted(self.clicks),
            'interpretation': self.interpretation.value,
            'basis_registered': self.basis_registered,
        }


@dataclass(frozen=True)
class APDParams:
    """Avalanche photodiode settings.

    Intensities are mean photon numbers. In linear mode a detector clicks
    iff the intensity reaching it exceeds p_th.
    """
    p_th: float = 1.0
    blind_threshold: float = 50.0
    recovery_slots: int = 4
    geiger_efficiency: float = 1.0
    double_click: str = Interpretation.INVALID.value

    def __post_init__(self):
        if self.p_th <= 0:
            raise ConfigError('p_th must be positive.', {'p_th': self.p_th})
        if self.blind_threshold <= self.p_th:
            raise ConfigError(
                'blind_threshold must exceed p_th.',
                {'p_th': self.p_th, 'blind_threshold': self.blind_threshold},
            )
        if self.recovery_slots < 0:
            raise ConfigError('recovery_slots must be non-negative.')
        if not 0.0 <= self.geiger_efficiency <= 1.0:
            raise ConfigError('geiger_efficiency must be a probability.')
        if self.double_click not in (Interpretation.INVALID.value,
                                     Interpretation.LOSS.value):
            raise ConfigError('Double clicks map to Invalid or Loss.',
                              {'double_click': self.double_click})

    def as_dict(self):
        return {
            'p_th': self.p_th,
            'blind_threshold': self.blind_threshold,
            'recovery_slots': self.recovery_slots,
            'geiger_efficiency': self.geiger_efficiency,
            'double_click': self.double_click,
        }


@functools.lru_cache(maxsize=256)
def detector_fractions(theta):
    """Share of a pulse reaching D_H, D_V, D_+ and D_- in that order."""
    photon = bright_state(theta, 1)
    h, v = PhotonicState.single(pol_h()), PhotonicState.single(pol_v())
    rotated = apply_polarization_rotation(photon)
    return np.array([
        abs(inner_product(h, photon)) ** 2,
        abs(inner_product(v, photon)) ** 2,
        abs(inner_product(h, rotated)) ** 2,
        abs(inner_product(v, rotated)) ** 2,
    ]) / 2


def _photon_number(mean_photons, rng):
    whole = math.floor(mean_photons)
    return whole + int(rng.random() < mean_photons - whole)


class BlackBoxDevice:
    """A receiver seen only through probe().

    The device keeps a slot clock and the slot up to which each detector
    stays in linear mode. Each probe occupies one frame of the clock.
    """

    def __init__(self, name, detector_model, params=None):
        self.name = name
        self.detector_model = DetectorModel(detector_model)
        self.params = params or APDParams()
        self.reset()

    def reset(self):
        self._clock = 0
        self._linear_until = np.full(len(DETECTORS), -1)

    @property
    def blindable(self):
        return self.detector_model is DetectorModel.APD

    def describe(self):
        data = {'name': self.name, 'detectors': self.detector_model.value}
        if self.blindable:
            data['params'] = self.params.as_dict()
        return data

    def probe(self, fuzz_input, rng):
        """Send one frame and return the observation of its last slot."""
        first = fuzz_input.pulses[0].time_slot
        span = fuzz_input.final.time_slot - first + 1
        frame = max(int(qkdlab_setting('FUZZ_FRAME_SLOTS')),
                    span + self.params.recovery_slots)
        counts = np.zeros(len(DETECTORS), dtype=int)
        clicks = np.zeros(len(DETECTORS), dtype=bool)
        slots = sorted({pulse.time_slot for pulse in fuzz_input.pulses})
        for slot in slots:
            now = self._clock + slot - first
            pulses = [p for p in fuzz_input.pulses if p.time_slot == slot]
            counts, clicks = self._slot(now, pulses, rng)
        self._clock += frame
        return self._observe(counts, clicks)

    def _slot(self, now, pulses, rng):
        counts = np.zeros(len(DETECTORS), dtype=int)
        intensity = np.zeros(len(DETECTORS))
        for pulse in pulses:
            fractions = detector_fractions(pulse.theta)
            intensity += pulse.mean_photons * fractions
            n = _photon_number(pulse.mean_photons, rng)
            counts += rng.multinomial(n, fractions / fractions.sum())

        total = sum(pulse.mean_photons for pulse in pulses)
        if self.blindable and total >= self.params.blind_threshold:
            self._linear_until[:] = now + self.params.recovery_slots
            logger.debug('Detectors blinded until slot %d', now +
                         self.params.recovery_slots)
            return np.zeros_like(counts), np.zeros(len(DETECTORS), dtype=bool)

        if self.detector_model is DetectorModel.APD:
            detected = rng.binomial(counts, self.params.geiger_efficiency)
            linear = self._linear_until >= now
            clicks = np.where(linear, intensity > self.params.p_th,
                              detected > 0)
            return detected, clicks
        return counts, counts > 0

    def _observe(self, counts, clicks):
        fired = frozenset(d for d, hit in zip(DETECTORS, clicks) if hit)
        if self.detector_model is DetectorModel.RESOLVING:
            several = counts.sum() > 1
        else:
            several = len(fired) > 1
        if not fired:
            return FuzzObservation(fired, Interpretation.LOSS)
        if several:
            if self.detector_model is DetectorModel.APD:
                return FuzzObservation(
                    fired, Interpretation(self.params.double_click))
            return FuzzObservation(fired, Interpretation.INVALID)
        (detector,) = fired
        basis, bit = DETECTOR_RESULTS[detector]
        meaning = Interpretation.BIT0 if bit == 0 else Interpretation.BIT1
        return FuzzObservation(fired, meaning, basis)


def make_apd_receiver_device(params=None):
    """Create and return the blindable four-APD passive receiver."""
    return BlackBoxDevice('apd', DetectorModel.APD, params or APDParams())


def make_ideal_device():
    """Create and return a photon-number-resolving, unit-efficiency device."""
    return BlackBoxDevice('ideal', DetectorModel.RESOLVING)


def make_threshold_device():
    """Create and return a device whose detectors only tell click from none."""
    return BlackBoxDevice('threshold', DetectorModel.THRESHOLD)


DEVICE_FACTORIES = {
    'apd': make_apd_receiver_device,
    'ideal': make_ideal_device,
    'threshold': make_threshold_device,
}


def make_device(name, params=None):
    """Create and return a built-in device by name."""
    if name not in DEVICE_FACTORIES:
        raise ConfigError(f'Unknown device {name!r}.',
                          {'known': list(DEVICE_FACTORIES)})
    if name == 'apd':
        return make_apd_receiver_device(params)
    if params:
        raise ConfigError(f'Device {name!r} takes no parameters.')
    return DEVICE_FACTORIES[name]()


def probe(device, fuzz_input, seed=None):
    """Probe a device once; seed may be an int or a numpy Generator."""
    if not isinstance(seed, np.random.Generator):
        seed = np.random.default_rng(
            qkdlab_setting('DEFAULT_SEED') if seed is None else seed)
    return device.probe(fuzz_input, seed)
