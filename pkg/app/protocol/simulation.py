"""
BB84 Monte-Carlo simulation, sifting and parameter estimation.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.conf import qkdlab_setting
from core.errors import ConfigError, EmptyLogError
from protocol.channels import ChannelKind, UNMEASURED, exact_outcome_distribution
from protocol.roundlog import NO_GUESS, RoundLog
from receivers.builders import alice_for
from receivers.receiver import Interpretation

logger = logging.getLogger(__name__)

# spawn key of the stream that picks the publicly compared test bits
TEST_SELECTION_STREAM = 0x7E57

VALID = (Interpretation.BIT0.value, Interpretation.BIT1.value)


@dataclass(frozen=True)
class BasisStatistics:
    rounds: int
    valid: int
    lost: int
    invalid: int
    sifted: int
    tested: int
    errors: int
    eve_guesses: int
    eve_correct: int

    @property
    def efficiency(self):
        return self.valid / self.rounds if self.rounds else 0.0

    @property
    def loss_rate(self):
        return self.lost / self.rounds if self.rounds else 0.0

    @property
    def invalid_rate(self):
        return self.invalid / self.rounds if self.rounds else 0.0

    @property
    def qber(self):
        return self.errors / self.tested if self.tested else 0.0

    @property
    def eve_guess_accuracy(self):
        if not self.eve_guesses:
            return None
        return self.eve_correct / self.eve_guesses

    def as_dict(self):
        return {
            'rounds': self.rounds,
            'sifted': self.sifted,
            'tested': self.tested,
            'errors': self.errors,
            'qber': self.qber,
            'efficiency': self.efficiency,
            'loss_rate': self.loss_rate,
            'invalid_rate': self.invalid_rate,
            'eve_guess_accuracy': self.eve_guess_accuracy,
        }


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated statistics of one simulated or logged BB84 run.

    Per-basis rates are taken over the rounds where Alice's and Bob's
    bases matched, so efficiency, loss rate and invalid rate add up to one.
    """
    rounds: int
    seed: int
    test_fraction: float
    bases: dict
    receiver: str = ''
    channel: dict = field(default_factory=dict)

    def _total(self, name):
        return sum(getattr(stats, name) for stats in self.bases.values())

    @property
    def sifted(self):
        return self._total('sifted')

    @property
    def tested(self):
        return self._total('tested')

    @property
    def errors(self):
        return self._total('errors')

    @property
    def qber(self):
        tested = self.tested
        return self.errors / tested if tested else 0.0

    @property
    def invalid_rate(self):
        matched = self._total('rounds')
        return self._total('invalid') / matched if matched else 0.0

    @property
    def eve_guess_accuracy(self):
        guesses = self._total('eve_guesses')
        return self._total('eve_correct') / guesses if guesses else None

    def basis(self, name):
        return self.bases[name]

    def as_dict(self):
        return {
            'kind': 'simulation-report',
            'schema_version': qkdlab_setting('ARTIFACT_SCHEMA_VERSION'),
            'receiver': self.receiver,
            'channel': self.channel,
            'rounds': self.rounds,
            'seed': self.seed,
            'test_fraction': self.test_fraction,
            'sifted': self.sifted,
            'tested': self.tested,
            'errors': self.errors,
            'qber': self.qber,
            'invalid_rate': self.invalid_rate,
            'eve_guess_accuracy': self.eve_guess_accuracy,
            'bases': {
                name: stats.as_dict() for name, stats in self.bases.items()
            },
        }


def _check_fraction(value, name, allow_zero=True):
    low_ok = value >= 0.0 if allow_zero else value > 0.0
    if not (low_ok and value <= 1.0):
        raise ConfigError(f'{name} is out of range.', {name: value})


def _lookup_tables(distribution):
    """Outcome label and interpretation for every (setting, outcome index)."""
    width = distribution.probabilities.shape[2]
    labels = np.full((len(distribution.settings), width), UNMEASURED,
                     dtype=object)
    meanings = np.full_like(labels, Interpretation.LOSS.value)
    for s, setting in enumerate(distribution.settings):
        for o, outcome in enumerate(setting.outcome_ids):
            labels[s, o] = outcome
            meanings[s, o] = setting.interpretation.lookup(outcome).value
    return labels, meanings


def _cumulative(distribution):
    probabilities = distribution.probabilities
    totals = probabilities.sum(axis=2, keepdims=True)
    cdf = np.minimum(np.cumsum(probabilities, axis=2) / totals, 1.0)
    for s, ids in enumerate(distribution.outcome_ids):
        cdf[:, s, len(ids) - 1:] = 1.0
    return cdf


def _simulate_chunk(rng, size, distribution, tables, channel, flip_fraction):
    labels, meanings = tables
    cdf = _cumulative(distribution)
    a = rng.integers(len(distribution.alice_states), size=size)
    s = rng.integers(len(distribution.settings), size=size)
    draws = rng.random(size)
    o = (cdf[a, s] <= draws[:, None]).sum(axis=1)
    eve_draws = rng.random(size)
    flip_draws = rng.random(size)
    guess_bits = rng.integers(2, size=size)

    alice_bit = np.array(
        [state.bit for state in distribution.alice_states], dtype=np.int8)[a]
    interpretation = meanings[s, o].astype(str)
    if flip_fraction:
        flips = (flip_draws < flip_fraction) & np.isin(interpretation, VALID)
        interpretation = np.where(
            flips,
            np.where(interpretation == VALID[0], VALID[1], VALID[0]),
            interpretation,
        )

    eve_guess = np.full(size, NO_GUESS, dtype=np.int8)
    if channel.kind is ChannelKind.ATTACK:
        correct = eve_draws < distribution.eve_correct[a, s, o]
        eve_guess = np.where(correct, alice_bit, 1 - alice_bit).astype(np.int8)
    elif channel.kind is ChannelKind.PNS:
        multi = eve_draws < channel.p_multi
        eve_guess = np.where(multi, alice_bit, guess_bits).astype(np.int8)

    basis_names = np.array(
        [state.basis for state in distribution.alice_states], dtype=str)
    setting_ids = np.array(
        [setting.id for setting in distribution.settings], dtype=str)
    setting_bases = np.array(
        [setting.basis for setting in distribution.settings], dtype=str)
    return {
        'alice_basis': basis_names[a],
        'alice_bit': alice_bit,
        'bob_setting': setting_ids[s],
        'bob_basis': setting_bases[s],
        'outcome_id': labels[s, o].astype(str),
        'interpretation': interpretation,
        'eve_guess': eve_guess,
    }


def simulate_rounds(alice, channel, receiver, rounds, seed=None,
                    flip_fraction=0.0):
    """Create and return the RoundLog of a simulated BB84 run.

    Rounds are drawn in chunks of SIMULATION_CHUNK, each from its own
    stream spawned off the master seed.
    """
    if rounds < 1:
        raise ConfigError('rounds must be at least 1.', {'rounds': rounds})
    _check_fraction(flip_fraction, 'flip_fraction')
    seed = qkdlab_setting('DEFAULT_SEED') if seed is None else int(seed)
    alice = alice_for(receiver) if alice is None else alice
    chunk = int(qkdlab_setting('SIMULATION_CHUNK'))

    distribution = exact_outcome_distribution(alice, channel, receiver)
    tables = _lookup_tables(distribution)
    streams = np.random.SeedSequence(seed).spawn(math.ceil(rounds / chunk))
    parts = []
    for n, stream in enumerate(streams):
        size = min(chunk, rounds - n * chunk)
        parts.append(_simulate_chunk(
            np.random.default_rng(stream), size, distribution, tables,
            channel, flip_fraction,
        ))
    columns = {
        name: np.concatenate([part[name] for part in parts])
        for name in parts[0]
    }
    meta = {
        'receiver': receiver.kind,
        'channel': channel.as_dict(),
        'seed': seed,
    }
    logger.info('Simulated %d rounds over %s with %s channel', rounds,
                receiver.kind, channel.kind.value)
    return RoundLog(meta=meta, **columns)


def sift_and_estimate(log, test_fraction=0.5):
    """Return the SimulationReport of a round log.

    Sifted rounds have matching bases and a valid result. A random
    test_fraction of them is compared publicly; QBER is the mismatch rate
    of those. Eve's accuracy runs over every sifted round she guessed.
    """
    if log is None or len(log) == 0:
        raise EmptyLogError('The round log holds no rounds.')
    _check_fraction(test_fraction, 'test_fraction', allow_zero=False)

    matched = log.alice_basis == log.bob_basis
    valid = np.isin(log.interpretation, VALID)
    lost = log.interpretation == Interpretation.LOSS.value
    invalid = log.interpretation == Interpretation.INVALID.value
    sifted = matched & valid
    bob_bit = (log.interpretation == Interpretation.BIT1.value).astype(np.int8)
    mismatch = bob_bit != log.alice_bit

    selection = np.random.default_rng(
        np.random.SeedSequence(log.seed, spawn_key=(TEST_SELECTION_STREAM,)))
    tested = sifted & (selection.random(len(log)) < test_fraction)
    guessed = sifted & (log.eve_guess != NO_GUESS)
    eve_right = guessed & (log.eve_guess == log.alice_bit)

    bases = {}
    for name in sorted(set(log.alice_basis.tolist())):
        in_basis = matched & (log.alice_basis == name)
        bases[name] = BasisStatistics(
            rounds=int(in_basis.sum()),
            valid=int((in_basis & valid).sum()),
            lost=int((in_basis & lost).sum()),
            invalid=int((in_basis & invalid).sum()),
            sifted=int((in_basis & sifted).sum()),
            tested=int((in_basis & tested).sum()),
            errors=int((in_basis & tested & mismatch).sum()),
            eve_guesses=int((in_basis & guessed).sum()),
            eve_correct=int((in_basis & eve_right).sum()),
        )
    report = SimulationReport(
        rounds=len(log),
        seed=log.seed,
        test_fraction=test_fraction,
        bases=bases,
        receiver=log.meta.get('receiver', ''),
        channel=log.meta.get('channel', {}),
    )
    logger.info('Estimated QBER %.4f over %d test bits', report.qber,
                report.tested)
    return report


def run_bb84(alice, channel, receiver, rounds, seed=None, flip_fraction=0.0,
             test_fraction=0.5):
    """Simulate a run and return its SimulationReport."""
    log = simulate_rounds(alice, channel, receiver, rounds, seed,
                          flip_fraction)
    return sift_and_estimate(log, test_fraction)
