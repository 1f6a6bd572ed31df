"""
Built-in receivers and their ideal sources.
"""
import functools
import logging
import math

import numpy as np
import scipy.linalg

from core.errors import ConfigError
from fockspace.linalg import LinearMap, states_to_matrix
from fockspace.modes import (
    FockBasisState,
    blocked,
    channel,
    down,
    pol_h,
    pol_v,
    straight,
)
from fockspace.optics import (
    InterferometerConfig,
    apply_polarization_rotation,
    bright_state,
    mz_transform,
)
from fockspace.states import PhotonicState
from receivers.receiver import (
    COMPUTATIONAL,
    HADAMARD,
    VACUUM_OUTCOME,
    Y_BASIS,
    Interpretation,
    InterpretationSets,
    ReceiverModel,
    ReceiverSetting,
    bb84_source,
)

logger = logging.getLogger(__name__)

RECEIVER_KINDS = (
    'interferometric-6mode',
    'interferometric-2mode',
    'interferometric-defended-10mode',
    'interferometric-middle-bin',
    'polarization-threshold',
    'ideal-bb84',
    'blinded-bright',
    'custom',
)

# bright polarization angles and the outcome ids they are measured as
BRIGHT_POLARIZATIONS = {
    'H': (0.0, 'psi0'),
    'V': (math.pi / 2, 'psi1'),
    '+45': (math.pi / 4, 'psi2'),
    '-45': (-math.pi / 4, 'psi3'),
}

DEFAULT_BRIGHT_RECORDS = (
    {'polarization': 'H', 'basis': COMPUTATIONAL, 'bit': 0},
    {'polarization': 'V', 'basis': COMPUTATIONAL, 'bit': 1},
    {'polarization': '+45', 'basis': HADAMARD, 'bit': 0},
    {'polarization': '-45', 'basis': HADAMARD, 'bit': 1},
)


def _outcome_mode(outcome_id):
    arm, t = outcome_id[0], int(outcome_id[1:])
    return straight(t) if arm == 's' else down(t)


def _interferometric_setting(setting_id, basis, phase, window, measured,
                             j0, j1, invalid=()):
    config = InterferometerConfig(phase)
    inputs = [FockBasisState.vacuum()] + [
        FockBasisState.of({mode(t): 1})
        for t in window for mode in (channel, blocked)
    ]
    transform = functools.partial(mz_transform, config=config)
    unitary = LinearMap.from_evolution(inputs, transform)
    outcomes = [(VACUUM_OUTCOME, PhotonicState.vacuum())] + [
        (outcome_id, PhotonicState.single(_outcome_mode(outcome_id)))
        for outcome_id in measured
    ]
    loss = {VACUUM_OUTCOME} | (set(measured) - set(j0) - set(j1) - set(invalid))
    return ReceiverSetting(
        id=setting_id,
        basis=basis,
        unitary=unitary,
        outcomes=outcomes,
        interpretation=InterpretationSets(j0, j1, loss, invalid),
        transform=transform,
    )


def _window_for(measured_ids):
    bins = [int(outcome_id[1:]) for outcome_id in measured_ids]
    return range(min(bins) - 1, max(bins) + 1)


def _interferometric(kind, specs, params):
    window = _window_for([o for spec in specs for o in spec['measured']])
    settings = [
        _interferometric_setting(
            spec['id'], spec['basis'], spec.get('phase', 0.0), window,
            spec['measured'], spec['j0'], spec['j1'], spec.get('invalid', ()),
        )
        for spec in specs
    ]
    return ReceiverModel(
        kind=kind,
        settings=settings,
        channel_modes={channel(t) for t in window},
        ancilla_modes={blocked(t) for t in window},
        single_photon=True,
        params=params,
    )


def _arms(bins):
    return [f'{arm}{t}' for t in bins for arm in ('s', 'd')]


def _six_mode(params):
    phase = params.get('phase', 0.0)
    measured = _arms(range(0, 3))
    return _interferometric('interferometric-6mode', [
        {'id': COMPUTATIONAL, 'basis': COMPUTATIONAL, 'phase': phase,
         'measured': measured, 'j0': {'d0', 's0'}, 'j1': {'d2', 's2'}},
        {'id': HADAMARD, 'basis': HADAMARD, 'phase': phase,
         'measured': measured, 'j0': {'d1'}, 'j1': {'s1'}},
    ], params)


def _two_mode(params):
    phase = params.get('phase', 0.0)
    return _interferometric('interferometric-2mode', [
        {'id': COMPUTATIONAL, 'basis': COMPUTATIONAL, 'phase': phase,
         'measured': ['d0', 's2'], 'j0': {'d0'}, 'j1': {'s2'}},
        {'id': HADAMARD, 'basis': HADAMARD, 'phase': phase,
         'measured': ['s1', 'd1'], 'j0': {'d1'}, 'j1': {'s1'}},
    ], params)


def _defended(params):
    phase = params.get('phase', 0.0)
    measured = _arms(range(-1, 4))
    invalid = {'s-1', 'd-1', 's3', 'd3'}
    return _interferometric('interferometric-defended-10mode', [
        {'id': COMPUTATIONAL, 'basis': COMPUTATIONAL, 'phase': phase,
         'measured': measured, 'j0': {'d0', 's0'}, 'j1': {'d2', 's2'},
         'invalid': invalid},
        {'id': HADAMARD, 'basis': HADAMARD, 'phase': phase,
         'measured': measured, 'j0': {'d1'}, 'j1': {'s1'},
         'invalid': invalid},
    ], params)


def _middle_bin(params):
    return _interferometric('interferometric-middle-bin', [
        {'id': HADAMARD, 'basis': HADAMARD, 'phase': 0.0,
         'measured': ['s1', 'd1'], 'j0': {'d1'}, 'j1': {'s1'}},
        {'id': Y_BASIS, 'basis': Y_BASIS, 'phase': math.pi / 2,
         'measured': ['s1', 'd1'], 'j0': {'d1'}, 'j1': {'s1'}},
    ], params)


def _unchanged(state):
    return state


def _polarization_outcome_id(h, v):
    return VACUUM_OUTCOME if h == v == 0 else f'H{h}V{v}'


def _polarization(kind, max_photons, params):
    h_mode, v_mode = pol_h(), pol_v()
    inputs = [
        FockBasisState.of({h_mode: h, v_mode: n - h})
        for n in range(max_photons + 1) for h in range(n, -1, -1)
    ]
    outcomes, j0, j1, invalid = [], set(), set(), set()
    for basis_state in inputs:
        h, v = basis_state.count(h_mode), basis_state.count(v_mode)
        outcome_id = _polarization_outcome_id(h, v)
        outcomes.append((outcome_id, PhotonicState.basis(basis_state)))
        if h and v:
            invalid.add(outcome_id)
        elif h:
            j0.add(outcome_id)
        elif v:
            j1.add(outcome_id)
    interpretation = InterpretationSets(j0, j1, {VACUUM_OUTCOME}, invalid)
    identity = LinearMap(inputs, inputs, np.eye(len(inputs)))
    rotate = apply_polarization_rotation
    settings = [
        ReceiverSetting(COMPUTATIONAL, COMPUTATIONAL, identity, outcomes,
                        interpretation, transform=_unchanged),
        ReceiverSetting(HADAMARD, HADAMARD,
                        LinearMap.from_evolution(inputs, rotate), outcomes,
                        interpretation, transform=rotate),
    ]
    return ReceiverModel(
        kind=kind,
        settings=settings,
        channel_modes={h_mode, v_mode},
        single_photon=max_photons <= 1,
        params=params,
    )


def _polarization_threshold(params):
    max_photons = 1 if params.get('single_photon') else \
        int(params.get('max_photons', 2))
    if max_photons < 1:
        raise ConfigError('max_photons must be at least 1.', params)
    return _polarization('polarization-threshold', max_photons, params)


def _ideal_bb84(params):
    return _polarization('ideal-bb84', 1, params)


def orthonormal_bright_states(photons):
    """Symmetrically orthonormalized bright states keyed by outcome id."""
    raw = [
        (outcome_id, bright_state(theta, photons))
        for theta, outcome_id in BRIGHT_POLARIZATIONS.values()
    ]
    basis, matrix = states_to_matrix([state for _, state in raw])
    overlaps = matrix.conj().T @ matrix
    eigenvalues, eigenvectors = scipy.linalg.eigh(overlaps)
    inverse_root = eigenvectors @ np.diag(eigenvalues ** -0.5) \
        @ eigenvectors.conj().T
    orthonormal = matrix @ inverse_root
    return {
        outcome_id: PhotonicState.from_vector(basis, orthonormal[:, n])
        for n, (outcome_id, _) in enumerate(raw)
    }


def _bright_records(records):
    by_setting = {COMPUTATIONAL: {0: set(), 1: set()},
                  HADAMARD: {0: set(), 1: set()}}
    measured = set()
    for record in records:
        polarization = record['polarization']
        if polarization not in BRIGHT_POLARIZATIONS:
            raise ConfigError(
                f'Unknown bright polarization {polarization!r}.', record)
        if record['basis'] not in by_setting or record['bit'] not in (0, 1):
            raise ConfigError('Malformed vulnerability record.', record)
        outcome_id = BRIGHT_POLARIZATIONS[polarization][1]
        by_setting[record['basis']][record['bit']].add(outcome_id)
        measured.add(outcome_id)
    return by_setting, measured


def _blinded_bright(params):
    photons = int(params.get('photons', 20))
    if photons < 3:
        raise ConfigError('Bright states need at least 3 photons.', params)
    records = params.get('vulnerabilities') or DEFAULT_BRIGHT_RECORDS
    by_setting, measured = _bright_records(records)
    bright = orthonormal_bright_states(photons)

    inputs = [FockBasisState.vacuum()] + [
        FockBasisState.of({pol_h(): m, pol_v(): photons - m})
        for m in range(photons, -1, -1)
    ]
    identity = LinearMap(inputs, inputs, np.eye(len(inputs)))
    outcomes = [(VACUUM_OUTCOME, PhotonicState.vacuum())] + [
        (outcome_id, bright[outcome_id])
        for _, outcome_id in BRIGHT_POLARIZATIONS.values()
        if outcome_id in measured
    ]
    ids = {outcome_id for outcome_id, _ in outcomes}
    settings = []
    for basis in (COMPUTATIONAL, HADAMARD):
        j0, j1 = by_setting[basis][0], by_setting[basis][1]
        settings.append(ReceiverSetting(
            basis, basis, identity, outcomes,
            InterpretationSets(j0, j1, ids - j0 - j1, ()),
        ))
    logger.info('Built blinded-bright receiver with %d-photon states', photons)
    return ReceiverModel(
        kind='blinded-bright',
        settings=settings,
        channel_modes={pol_h(), pol_v()},
        passive_choice=True,
        requires_blinding=True,
        params={'photons': photons, 'vulnerabilities': list(records)},
    )


def _custom(params):
    from receivers.serializers import build_custom_receiver
    return build_custom_receiver(params)


_BUILDERS = {
    'interferometric-6mode': _six_mode,
    'interferometric-2mode': _two_mode,
    'interferometric-defended-10mode': _defended,
    'interferometric-middle-bin': _middle_bin,
    'polarization-threshold': _polarization_threshold,
    'ideal-bb84': _ideal_bb84,
    'blinded-bright': _blinded_bright,
    'custom': _custom,
}


def _apply_overrides(receiver, overrides):
    settings = []
    for setting in receiver.settings:
        interpretation = setting.interpretation
        for outcome_id, value in overrides.get(setting.id, {}).items():
            try:
                interpretation = interpretation.with_override(
                    outcome_id, Interpretation(value))
            except ValueError as exc:
                raise ConfigError(
                    f'Unknown interpretation {value!r}.',
                    {'setting': setting.id, 'outcome': outcome_id},
                ) from exc
        settings.append(ReceiverSetting(
            setting.id, setting.basis, setting.unitary, setting.outcomes,
            interpretation, setting.transform,
        ))
    return ReceiverModel(
        kind=receiver.kind,
        settings=settings,
        channel_modes=receiver.channel_modes,
        ancilla_modes=receiver.ancilla_modes,
        passive_choice=receiver.passive_choice,
        single_photon=receiver.single_photon,
        requires_blinding=receiver.requires_blinding,
        params=receiver.params,
    )


def make_receiver(kind, params=None):
    """Create and return a fully populated receiver model."""
    params = dict(params or {})
    if kind not in _BUILDERS:
        raise ConfigError(
            f'Unknown receiver kind {kind!r}.',
            {'kind': kind, 'known': list(RECEIVER_KINDS)},
        )
    overrides = params.pop('interpretation_overrides', None)
    try:
        receiver = _BUILDERS[kind](params)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(
            f'Malformed parameters for receiver {kind!r}.',
            {'kind': kind, 'detail': str(exc)},
        ) from exc
    if overrides:
        receiver = _apply_overrides(receiver, overrides)
    logger.info('Built receiver %s with %d settings', kind,
                len(receiver.settings))
    return receiver


def alice_for(receiver):
    """Create and return the ideal source matching a receiver.

    blinded-bright receivers get a bright-polarization source: its carriers
    are the orthonormalized bright states psi0 and psi1, not single photons.
    run_bb84 with alice=None on that receiver therefore sends bright pulses.
    """
    if receiver.kind == 'interferometric-middle-bin':
        return bb84_source(
            'time-bin-hadamard-y',
            PhotonicState.single(channel(0)),
            PhotonicState.single(channel(1)),
            y_basis=True,
        )
    if receiver.kind.startswith('interferometric'):
        return bb84_source(
            'time-bin',
            PhotonicState.single(channel(0)),
            PhotonicState.single(channel(1)),
        )
    if receiver.kind == 'blinded-bright':
        bright = orthonormal_bright_states(receiver.params['photons'])
        return bb84_source('bright-polarization', bright['psi0'],
                           bright['psi1'])
    if receiver.kind == 'custom':
        if 'alice' not in receiver.params:
            raise ConfigError(
                'Custom receivers need an explicit Alice source.')
        from receivers.serializers import alice_from_json
        return alice_from_json(receiver.params['alice'])
    return bb84_source(
        'polarization',
        PhotonicState.single(pol_h()),
        PhotonicState.single(pol_v()),
    )
