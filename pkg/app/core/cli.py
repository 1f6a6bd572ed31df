"""
Command-line pipelines behind the qkdlab management command.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from django.db import DatabaseError, transaction

from core.conf import qkdlab_setting
from core.errors import ConfigError, QkdlabError, VerificationFailure
from core.models import FuzzAnomaly, ScenarioRun
from core.reporting import emit_report
from core.serializers import SUBCOMMANDS, load_json, scenario_from_json
from attacks.constraints import basis_label, build_constraint_system
from attacks.footprint import attack_footprint
from attacks.information import eve_conditional_states, eve_guess_probability
from attacks.serializers import AttackFamilySerializer
from attacks.synthesis import synthesize_attacks
from attacks.verification import verify_oblivious
from classify.footprint import classify
from classify.registry import find_record, registry, registry_graph
from fockspace.serializers import state_to_json
from fuzz.campaign import replay, run_fuzz_campaign, write_trace
from fuzz.device import DEVICE_FACTORIES
from fuzz.serializers import anomaly_from_json, strategy_from_json
from protocol.roundlog import write_round_log
from protocol.simulation import sift_and_estimate, simulate_rounds
from receivers.builders import RECEIVER_KINDS
from receivers.reversal import reversed_space
from receivers.serializers import ReceiverSummarySerializer

logger = logging.getLogger(__name__)

HELP = {
    'reverse-space': 'Compute the reversed space H^P of a receiver.',
    'synth': 'Synthesize the family of oblivious attacks on a receiver.',
    'verify': 'Check that an attack never causes errors or invalid outcomes.',
    'simulate': 'Run a BB84 Monte-Carlo simulation and estimate the QBER.',
    'fuzz': 'Fuzz a black-box receiver device, or replay an anomaly.',
    'classify': 'Classify attacks as side-channel or state-channel.',
    'report': 'Render tables from artifact files.',
}

# Options copied from flags into the scenario document.
FLAG_KEYS = (
    'receiver', 'attack', 'rounds', 'seed', 'out', 'log', 'trace', 'replay',
    'device', 'eve_dim', 'include_vacuum', 'invalid_as_loss',
    'test_fraction', 'flip_fraction', 'record', 'artifacts',
)


@dataclass
class Outcome:
    artifact: Optional[dict]
    text: str
    failure: Optional[QkdlabError] = None


def add_arguments(parser):
    """Add the subcommands and their flags to an argument parser."""
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help=HELP[name])
        sub.add_argument('--config', help='Scenario document (JSON).')
        sub.add_argument('--seed', type=int)
        if name == 'report':
            sub.add_argument('artifacts', nargs='*')
            continue
        sub.add_argument('--out', help='Artifact path (JSON).')
        if name != 'fuzz':
            sub.add_argument('--receiver', choices=RECEIVER_KINDS)
        if name in ('verify', 'simulate', 'classify'):
            sub.add_argument(
                '--attack', help='Built-in attack name or attack JSON file.')
        if name in ('synth', 'verify'):
            sub.add_argument('--invalid-as-loss', action='store_true')
        if name == 'synth':
            sub.add_argument('--eve-dim', type=int)
            sub.add_argument('--include-vacuum', action='store_true')
        if name == 'simulate':
            sub.add_argument('--rounds', type=int)
            sub.add_argument('--test-fraction', type=float)
            sub.add_argument('--flip-fraction', type=float)
            sub.add_argument('--log', help='Round log path (NDJSON).')
        if name == 'fuzz':
            sub.add_argument('--device', choices=sorted(DEVICE_FACTORIES))
            sub.add_argument('--max-cases', type=int)
            sub.add_argument('--trace', help='Trace path (NDJSON).')
            sub.add_argument('--replay', metavar='ANOMALY_ID')
        if name == 'classify':
            sub.add_argument('--record', help='Registry record name.')


def options_to_config(options):
    """Merge the --config document with flags; flags win."""
    subcommand = options['subcommand']
    data = {}
    if options.get('config'):
        data = load_json(options['config'])
        if not isinstance(data, dict):
            raise ConfigError('A scenario must be a JSON object.')
        if data.get('subcommand', subcommand) != subcommand:
            raise ConfigError(
                'Scenario is for another subcommand.',
                {'scenario': data['subcommand'], 'command': subcommand},
            )
    for key in FLAG_KEYS:
        value = options.get(key)
        if value is None or value is False or value == []:
            continue
        data[key] = value
    if options.get('max_cases') is not None:
        data['strategy'] = dict(data.get('strategy') or {},
                                max_cases=options['max_cases'])
    data['subcommand'] = subcommand
    return scenario_from_json(data)


def _artifact(kind, body, seed):
    artifact = {
        'kind': kind,
        'schema_version': qkdlab_setting('ARTIFACT_SCHEMA_VERSION'),
        'seed': seed,
    }
    artifact.update(body)
    return artifact


def _outcome(artifact, failure=None):
    return Outcome(artifact, emit_report([artifact]), failure)


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def dump_artifact(artifact):
    """Artifact text: sorted keys, so equal artifacts give equal bytes."""
    return json.dumps(artifact, sort_keys=True, indent=2,
                      default=_jsonable) + '\n'


def reverse_space_command(config):
    receiver = config.build_receiver()
    basis = reversed_space(receiver)
    return _outcome(_artifact('reverse-space', {
        'receiver': ReceiverSummarySerializer(receiver).data,
        'dimension': len(basis),
        'labels': [basis_label(state, i) for i, state in enumerate(basis)],
        'basis': [state_to_json(state) for state in basis],
    }, config.seed))


def synth_command(config):
    receiver = config.build_receiver()
    alice = config.build_alice(receiver)
    system = build_constraint_system(
        receiver, alice, invalid_as_loss=config.invalid_as_loss)
    family = synthesize_attacks(
        system, eve_dim=config.eve_dim,
        include_vacuum=config.include_vacuum, seed=config.seed)
    return _outcome(_artifact(
        'attack-family', AttackFamilySerializer(family).data, config.seed))


def verify_command(config):
    receiver = config.build_receiver()
    alice = config.build_alice(receiver)
    attack = config.build_attack(receiver)
    report = verify_oblivious(
        attack, receiver, alice, invalid_as_loss=config.invalid_as_loss)
    body = report.as_dict()
    body['attack'] = attack.name
    body['receiver'] = receiver.kind
    body['eve_guess_probability'] = eve_guess_probability(
        eve_conditional_states(attack, receiver, alice))
    failure = None
    if not report.oblivious:
        failure = VerificationFailure(
            f'Attack {attack.name!r} is not oblivious on {receiver.kind}.',
            {'max_error_amplitude': report.max_error_amplitude,
             'failing_rows': sum(1 for row in report.rows
                                 if row['residual'] > 0)},
        )
    return _outcome(_artifact('oblivious-report', body, config.seed),
                    failure)


def simulate_command(config):
    receiver = config.build_receiver()
    alice = config.build_alice(receiver)
    channel = config.build_channel(receiver)
    log = simulate_rounds(alice, channel, receiver, config.rounds,
                          seed=config.seed,
                          flip_fraction=config.flip_fraction)
    if config.log:
        write_round_log(log, config.log)
    report = sift_and_estimate(log, config.test_fraction)
    return _outcome(report.as_dict())


def _logged_anomaly(anomaly_id):
    try:
        logged = (FuzzAnomaly.objects.select_related('run')
                  .filter(anomaly_id=anomaly_id)
                  .order_by('-run__created', '-run__id').first())
    except DatabaseError as exc:
        raise ConfigError('The run ledger is unavailable.',
                          {'detail': str(exc)})
    if logged is None:
        raise ConfigError(f'No logged anomaly {anomaly_id!r}.',
                          {'anomaly': anomaly_id})
    return logged


def fuzz_command(config):
    if config.replay:
        logged = _logged_anomaly(config.replay)
        device_config = scenario_from_json({
            key: logged.run.config[key]
            for key in ('device', 'device_params') if key in logged.run.config
        })
        anomaly = anomaly_from_json(logged.document)
        classes, reproduced = replay(device_config.build_device, anomaly)
        return _outcome(_artifact('fuzz-replay', {
            'anomaly': anomaly.id,
            'device': device_config.device,
            'tag': anomaly.tag.value,
            'classes': classes,
            'logged_classes': anomaly.classes,
            'reproduced': reproduced,
        }, anomaly.seed))

    report = run_fuzz_campaign(config.build_device(),
                               strategy_from_json(config.strategy),
                               seed=config.seed)
    if config.trace:
        write_trace(report, config.trace)
    return _outcome(report.as_dict())


def classify_command(config):
    graph = None
    if config.footprint is not None:
        results = [{
            'name': 'footprint',
            'footprint': config.footprint.as_dict(),
            'classified_as': classify(config.footprint).value,
            'expected_class': None,
        }]
    elif config.attack is not None:
        receiver = config.build_receiver()
        attack = config.build_attack(receiver)
        footprint = attack_footprint(attack, receiver)
        results = [{
            'name': attack.name,
            'footprint': footprint.as_dict(),
            'classified_as': classify(footprint).value,
            'expected_class': None,
        }]
    elif config.record:
        record = find_record(config.record)
        if record is None:
            raise ConfigError(f'No registry record {config.record!r}.',
                              {'known': [r.name for r in registry()]})
        results = [record.as_dict()]
    else:
        results = [record.as_dict() for record in registry()]
        graph = registry_graph()
    body = {'results': results}
    if graph is not None:
        body['graph'] = graph
    return _outcome(_artifact('classification', body, config.seed))


def report_command(config):
    artifacts = [load_json(path) for path in config.artifacts]
    return Outcome(None, emit_report(artifacts))


COMMANDS = {
    'reverse-space': reverse_space_command,
    'synth': synth_command,
    'verify': verify_command,
    'simulate': simulate_command,
    'fuzz': fuzz_command,
    'classify': classify_command,
    'report': report_command,
}


def record_run(subcommand, config, artifact, exit_code):
    """Store the run in the ledger; failures only log a warning."""
    if not qkdlab_setting('RECORD_RUNS'):
        return None
    artifact = json.loads(dump_artifact(artifact)) if artifact else {}
    try:
        with transaction.atomic():
            run = ScenarioRun.objects.record(
                subcommand,
                seed=None if config is None else config.seed,
                config={} if config is None else config.as_dict(),
                artifact=artifact,
                exit_code=exit_code,
            )
            if artifact.get('kind') == 'fuzz-report':
                FuzzAnomaly.objects.bulk_create([
                    FuzzAnomaly(
                        run=run,
                        anomaly_id=anomaly['id'],
                        tag=anomaly['tag'],
                        input=anomaly['input'],
                        observation=anomaly['observation'],
                        document=anomaly,
                    )
                    for anomaly in artifact['anomalies']
                ])
    except DatabaseError as exc:
        logger.warning('Run ledger unavailable, %s not recorded: %s',
                       subcommand, exc)
        return None
    return run


def execute(options, stdout, stderr):
    """Run one parsed command line and return its exit code."""
    subcommand = options['subcommand']
    config, artifact, exit_code = None, None, 0
    try:
        config = options_to_config(options)
        logger.info('Running %s (seed %s)', subcommand, config.seed)
        outcome = COMMANDS[subcommand](config)
        artifact = outcome.artifact
        if artifact is not None and config.out:
            with open(config.out, 'w') as handle:
                handle.write(dump_artifact(artifact))
        stdout.write(outcome.text)
        if outcome.failure is not None:
            raise outcome.failure
    except QkdlabError as exc:
        stderr.write(json.dumps(exc.to_dict(), sort_keys=True,
                                default=_jsonable) + '\n')
        exit_code = exc.exit_code
    except OSError as exc:
        error = ConfigError('Cannot write output.', {'detail': str(exc)})
        stderr.write(json.dumps(error.to_dict(), sort_keys=True) + '\n')
        exit_code = error.exit_code
    record_run(subcommand, config, artifact, exit_code)
    logger.info('Finished %s with exit code %d', subcommand, exit_code)
    return exit_code


def run_command(argv, stdout=None, stderr=None):
    """Parse argv, run the subcommand and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = argparse.ArgumentParser(prog='qkdlab')
    add_arguments(parser)
    try:
        options = vars(parser.parse_args(argv))
    except SystemExit as exc:
        return ConfigError.exit_code if exc.code else 0
    return execute(options, stdout, stderr)
