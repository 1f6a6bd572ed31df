"""
Fuzzing campaigns against black-box receiver devices.

A campaign starts from the four valid BB84 states, varies one degree of
freedom at a time (intensity, time slot) and finally prefixes anomalous
inputs to new probes. An observation class is anomalous when the
photon-number-resolving reference device never produces it for the same
input and the same random draws.
"""
import enum
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.conf import qkdlab_setting
from core.errors import ConfigError
from fuzz.device import (
    NAMED_POLARIZATIONS,
    FuzzInput,
    Pulse,
    make_ideal_device,
)
from receivers.receiver import Interpretation

logger = logging.getLogger(__name__)

VALID_STATES = ('H', 'V', '+45', '-45')
DEFAULT_INTENSITIES = (0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1e3, 1e4)
DEFAULT_TIME_SHIFTS = (-2, -1, 0, 1, 2)
SINGLE_PHOTON = 1.0


class AnomalyTag(str, enum.Enum):
    BLINDING = 'Blinding'
    WEAK_UNDER_BLINDING = 'WeakUnderBlinding'
    STRONG_UNDER_BLINDING = 'StrongUnderBlinding'
    PHOTON_NUMBER_BLIND = 'PhotonNumberBlind'
    UNEXPECTED = 'Unexpected'


PROPERTIES = (
    AnomalyTag.BLINDING,
    AnomalyTag.WEAK_UNDER_BLINDING,
    AnomalyTag.STRONG_UNDER_BLINDING,
)

_UNDER_BLINDING = frozenset(PROPERTIES)

LOSS = Interpretation.LOSS.value


def class_key(observation):
    interpretation, basis = observation.outcome_class
    return interpretation if basis is None else f'{interpretation}@{basis}'


def _is_valid_key(key):
    return key.split('@')[0] in (Interpretation.BIT0.value,
                                 Interpretation.BIT1.value)


@dataclass(frozen=True)
class FuzzStrategy:
    """Campaign schedule. Intensities are multiplied by intensity_scale."""
    max_cases: int = 10_000
    intensities: tuple = DEFAULT_INTENSITIES
    time_shifts: tuple = DEFAULT_TIME_SHIFTS
    depth: int = 2
    refine_depth: int = 2
    repeats: Optional[int] = None
    intensity_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'intensities',
                           tuple(sorted(float(i) for i in self.intensities)))
        object.__setattr__(self, 'time_shifts', tuple(self.time_shifts))
        if self.repeats is None:
            object.__setattr__(self, 'repeats',
                               int(qkdlab_setting('FUZZ_REPEATS')))
        if self.max_cases < 1:
            raise ConfigError('max_cases must be at least 1.',
                              {'max_cases': self.max_cases})
        if self.depth < 1 or self.refine_depth < 0 or self.repeats < 1:
            raise ConfigError('depth and repeats must be positive.')
        if not self.intensities or self.intensities[0] <= 0:
            raise ConfigError('Intensities must be positive.',
                              {'intensities': list(self.intensities)})

    @property
    def grid(self):
        return [i * self.intensity_scale for i in self.intensities]

    def as_dict(self):
        return {
            'max_cases': self.max_cases,
            'intensities': list(self.intensities),
            'time_shifts': list(self.time_shifts),
            'depth': self.depth,
            'refine_depth': self.refine_depth,
            'repeats': self.repeats,
            'intensity_scale': self.intensity_scale,
        }


@dataclass(frozen=True)
class Anomaly:
    id: str
    case: int
    stage: int
    seed: int
    repeats: int
    input: FuzzInput
    observation: dict
    classes: dict
    tag: AnomalyTag
    parent: Optional[str] = None

    def as_dict(self):
        return {
            'id': self.id,
            'case': self.case,
            'stage': self.stage,
            'seed': self.seed,
            'repeats': self.repeats,
            'input': self.input.as_dict(),
            'observation': self.observation,
            'classes': self.classes,
            'tag': self.tag.value,
            'parent': self.parent,
        }


@dataclass(frozen=True)
class FuzzReport:
    device: dict
    seed: int
    strategy: FuzzStrategy
    test_cases_run: int
    anomalies: tuple
    properties_found: tuple
    derived_vulnerabilities: tuple
    trace: tuple = field(default=(), repr=False)

    def anomaly(self, anomaly_id):
        for anomaly in self.anomalies:
            if anomaly.id == anomaly_id:
                return anomaly
        raise ConfigError(f'Unknown anomaly {anomaly_id!r}.',
                          {'anomaly': anomaly_id})

    def bright_records(self):
        """Derived records in the form make_receiver expects."""
        return [
            {key: record[key] for key in ('polarization', 'basis', 'bit')}
            for record in self.derived_vulnerabilities
        ]

    def as_dict(self):
        tags = Counter(anomaly.tag.value for anomaly in self.anomalies)
        return {
            'kind': 'fuzz-report',
            'schema_version': qkdlab_setting('ARTIFACT_SCHEMA_VERSION'),
            'device': self.device,
            'seed': self.seed,
            'strategy': self.strategy.as_dict(),
            'test_cases_run': self.test_cases_run,
            'properties_found': list(self.properties_found),
            'anomaly_counts': dict(sorted(tags.items())),
            'anomalies': [anomaly.as_dict() for anomaly in self.anomalies],
            'derived_vulnerabilities': list(self.derived_vulnerabilities),
        }


def _repeat_rng(seed, case, repeat):
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(case, repeat)))


def observe(device, fuzz_input, seed, case, repeats):
    """Probe a device repeats times; return (class counts, observations)."""
    counts = Counter()
    observations = []
    for repeat in range(repeats):
        observation = device.probe(fuzz_input,
                                   _repeat_rng(seed, case, repeat))
        counts[class_key(observation)] += 1
        observations.append(observation)
    return dict(sorted(counts.items())), observations


def _dominant(classes):
    return sorted(classes.items(), key=lambda item: (-item[1], item[0]))[0][0]


class _BudgetExhausted(Exception):
    pass


class FuzzCampaign:
    """One campaign: device under test, reference device and schedule."""

    def __init__(self, device, strategy=None, seed=None, reference=None):
        self.device = device
        self.strategy = strategy or FuzzStrategy()
        self.seed = qkdlab_setting('DEFAULT_SEED') if seed is None \
            else int(seed)
        self.reference = reference or make_ideal_device()
        self.cases = 0
        self.anomalies = []
        self.trace = []

    def run(self):
        try:
            self._stage_zero()
            self._stage_one()
            self._stage_two()
        except _BudgetExhausted:
            logger.info('Fuzz budget of %d cases used up',
                        self.strategy.max_cases)
        return self._report()

    def _case(self, fuzz_input, stage, parent=None):
        if self.cases >= self.strategy.max_cases:
            raise _BudgetExhausted()
        case = self.cases
        self.cases += 1
        repeats = self.strategy.repeats
        classes, observations = observe(
            self.device, fuzz_input, self.seed, case, repeats)
        expected, _ = observe(
            self.reference, fuzz_input, self.seed, case, repeats)
        novel = sorted(set(classes) - set(expected))

        anomaly = None
        if novel:
            tag = self._tag(fuzz_input, classes, novel, parent)
            witness = next(o for o in observations if class_key(o) in novel)
            anomaly = Anomaly(
                id=f'A{case:05d}', case=case, stage=stage, seed=self.seed,
                repeats=repeats, input=fuzz_input,
                observation=witness.as_dict(), classes=classes, tag=tag,
                parent=parent.id if parent else None,
            )
            self.anomalies.append(anomaly)
            logger.debug('Anomaly %s tagged %s', anomaly.id, tag.value)
        self.trace.append({
            'case': case,
            'stage': stage,
            'input': fuzz_input.as_dict(),
            'classes': classes,
            'reference_classes': expected,
            'anomaly': anomaly.id if anomaly else None,
            'tag': anomaly.tag.value if anomaly else None,
        })
        return classes

    def _tag(self, fuzz_input, classes, novel, parent):
        final = fuzz_input.final.mean_photons
        if parent is not None and parent.tag in _UNDER_BLINDING:
            blinding = max(p.mean_photons for p in fuzz_input.prefix)
            if LOSS in novel:
                if final < blinding:
                    return AnomalyTag.WEAK_UNDER_BLINDING
                return AnomalyTag.BLINDING
            if final > SINGLE_PHOTON and len(classes) == 1 \
                    and _is_valid_key(novel[0]):
                return AnomalyTag.STRONG_UNDER_BLINDING
            return AnomalyTag.UNEXPECTED
        if LOSS in novel and final > SINGLE_PHOTON:
            return AnomalyTag.BLINDING
        if final >= 2 and float(final).is_integer() \
                and any(_is_valid_key(key) for key in novel):
            return AnomalyTag.PHOTON_NUMBER_BLIND
        return AnomalyTag.UNEXPECTED

    def _probe_input(self, prefix, polarization, intensity):
        pulse = Pulse(0, polarization, intensity)
        if prefix is None:
            return FuzzInput((pulse,))
        return prefix.followed_by(pulse)

    def _sweep(self, stage, polarization, prefix=None, parent=None):
        """Intensity sweep with midpoint refinement where the class changes."""
        results = {}
        for intensity in self.strategy.grid:
            results[intensity] = _dominant(self._case(
                self._probe_input(prefix, polarization, intensity),
                stage, parent))
        for _ in range(self.strategy.refine_depth):
            points = sorted(results)
            midpoints = [
                (low + high) / 2 for low, high in zip(points, points[1:])
                if results[low] != results[high]
            ]
            if not midpoints:
                break
            for intensity in midpoints:
                results[intensity] = _dominant(self._case(
                    self._probe_input(prefix, polarization, intensity),
                    stage, parent))

    def _stage_zero(self):
        for polarization in VALID_STATES:
            self._case(FuzzInput((Pulse(0, polarization, SINGLE_PHOTON),)), 0)

    def _stage_one(self):
        for polarization in VALID_STATES:
            self._sweep(1, polarization)
        for shift in self.strategy.time_shifts:
            if shift == 0:
                continue
            for polarization in VALID_STATES:
                self._case(FuzzInput(
                    (Pulse(shift, polarization, SINGLE_PHOTON),)), 1)

    def _stage_two(self):
        for length in range(1, self.strategy.depth):
            seeds = [a for a in self.anomalies
                     if len(a.input.pulses) == length]
            for seed in seeds:
                for polarization in VALID_STATES:
                    self._sweep(2, polarization, seed.input, seed)

    def _derived_vulnerabilities(self):
        records = {}
        for anomaly in self.anomalies:
            if anomaly.tag is not AnomalyTag.STRONG_UNDER_BLINDING:
                continue
            final = anomaly.input.final
            if final.polarization not in NAMED_POLARIZATIONS:
                continue
            (key,) = anomaly.classes
            interpretation, basis = key.split('@')
            record = {
                'polarization': final.polarization,
                'basis': basis,
                'bit': Interpretation(interpretation).bit,
                'mean_photons': final.mean_photons,
                'blinding_mean_photons': max(
                    p.mean_photons for p in anomaly.input.prefix),
                'anomaly': anomaly.id,
            }
            records.setdefault(
                (final.polarization, basis, record['bit']), record)
        order = list(NAMED_POLARIZATIONS)
        return tuple(sorted(
            records.values(),
            key=lambda r: (order.index(r['polarization']), r['basis'],
                           r['bit']),
        ))

    def _report(self):
        tags = {anomaly.tag for anomaly in self.anomalies}
        found = tuple(tag.value for tag in PROPERTIES if tag in tags)
        logger.info('Fuzzed %s with %d cases: %d anomalies, properties %s',
                    self.device.name, self.cases, len(self.anomalies),
                    ', '.join(found) or 'none')
        return FuzzReport(
            device=self.device.describe(),
            seed=self.seed,
            strategy=self.strategy,
            test_cases_run=self.cases,
            anomalies=tuple(self.anomalies),
            properties_found=found,
            derived_vulnerabilities=self._derived_vulnerabilities(),
            trace=tuple(self.trace),
        )


def run_fuzz_campaign(device, strategy=None, seed=None, reference=None):
    """Run the staged campaign against a device and return its FuzzReport."""
    return FuzzCampaign(device, strategy, seed, reference).run()


def replay(device_factory, anomaly):
    """Re-run a logged anomaly on a fresh device.

    Returns the class counts and whether they match the logged ones.
    """
    classes, _ = observe(device_factory(), anomaly.input, anomaly.seed,
                         anomaly.case, anomaly.repeats)
    return classes, classes == anomaly.classes


def write_trace(report, path):
    """Write the campaign trace as newline-delimited JSON."""
    header = {
        'kind': 'fuzz-trace',
        'schema_version': qkdlab_setting('ARTIFACT_SCHEMA_VERSION'),
        'device': report.device,
        'seed': report.seed,
    }
    with open(path, 'w') as handle:
        handle.write(json.dumps(header, sort_keys=True) + '\n')
        for entry in report.trace:
            handle.write(json.dumps(entry, sort_keys=True) + '\n')
    logger.info('Wrote %d fuzz cases to %s', len(report.trace), path)
