"""
Plain-text tables for run artifacts.

Rendering only reads the artifact dicts, so identical artifacts always give
identical bytes.
"""
from core.conf import qkdlab_setting
from core.errors import ConfigError, SchemaVersionError

BASIS_ABBREVIATIONS = {
    'computational': 'comp',
    'hadamard': 'had',
}

_BASIS_HEADER = ('basis', 'rounds', 'sifted', 'tested', 'errors', 'qber',
                 'eff', 'loss', 'invalid', 'eve')


def _rate(value):
    if value is None:
        return '-'
    if value == 0:
        return '0'
    return f'{value:.3f}'


def _fixed(value):
    return '-' if value is None else f'{value:.3f}'


def _table(header, rows):
    widths = [max(len(str(cell)) for cell in column)
              for column in zip(header, *rows)]
    lines = []
    for row in (header, *rows):
        cells = [str(cell).ljust(width) for cell, width in zip(row, widths)]
        lines.append('  '.join(cells).rstrip())
    return lines


def _channel_label(channel):
    if not channel:
        return '-'
    label = channel.get('kind', '-')
    for key in ('attack', 'p_multi', 'loss'):
        if key in channel:
            label += f':{channel[key]}'
    return label


def _simulation(artifact):
    bases = artifact['bases']
    names = sorted(bases)
    lines = [
        f'simulation receiver={artifact.get("receiver") or "-"} '
        f'channel={_channel_label(artifact.get("channel"))} '
        f'rounds={artifact["rounds"]} seed={artifact["seed"]}',
        'efficiency ' + ' '.join(
            f'{BASIS_ABBREVIATIONS.get(name, name)}='
            f'{_fixed(bases[name]["efficiency"])}' for name in names
        ) + f' qber={_rate(artifact["qber"])}',
        f'eve_accuracy={_rate(artifact.get("eve_guess_accuracy"))} '
        f'invalid={_rate(artifact.get("invalid_rate"))}',
    ]
    rows = [
        (name, stats['rounds'], stats['sifted'], stats['tested'],
         stats['errors'], _rate(stats['qber']), _fixed(stats['efficiency']),
         _fixed(stats['loss_rate']), _fixed(stats['invalid_rate']),
         _rate(stats.get('eve_guess_accuracy')))
        for name, stats in ((name, bases[name]) for name in names)
    ]
    return lines + _table(_BASIS_HEADER, rows)


def _fuzz(artifact):
    properties = artifact.get('properties_found') or []
    counts = artifact.get('anomaly_counts') or {}
    lines = [
        f'fuzz device={artifact["device"].get("name", "-")} '
        f'cases={artifact["test_cases_run"]} '
        f'anomalies={len(artifact.get("anomalies", []))} '
        f'seed={artifact["seed"]}',
        'properties ' + (', '.join(properties) if properties else 'none'),
    ]
    if counts:
        lines.append('tags ' + ' '.join(
            f'{tag}={count}' for tag, count in sorted(counts.items())))
    for record in artifact.get('derived_vulnerabilities', []):
        lines.append(
            f'derived {record["polarization"]} {record["basis"]} '
            f'bit={record["bit"]} mean_photons={record["mean_photons"]} '
            f'blinding={record["blinding_mean_photons"]} '
            f'anomaly={record["anomaly"]}')
    return lines


def _fuzz_replay(artifact):
    classes = ' '.join(f'{key}={count}'
                       for key, count in sorted(artifact['classes'].items()))
    return [
        f'replay anomaly={artifact["anomaly"]} '
        f'reproduced={"yes" if artifact["reproduced"] else "no"}',
        f'classes {classes}',
    ]


def _attack_family(artifact):
    lines = [
        f'family receiver={artifact["receiver"]} '
        f'dimension={artifact["dimension"]} '
        f'trivial={"yes" if artifact["is_trivial"] else "no"} '
        f'seed={artifact.get("seed", "-")}',
        'columns ' + ' '.join(artifact.get('column_labels', [])),
    ]
    if artifact.get('note'):
        lines.append(f'note {artifact["note"]}')
    return lines


def _oblivious(artifact):
    lines = [
        f'verify attack={artifact["attack"]} '
        f'receiver={artifact["receiver"]} '
        f'oblivious={"yes" if artifact["oblivious"] else "no"} '
        f'max_error={_rate(artifact["max_error_amplitude"])} '
        f'isometry_residual={_rate(artifact["isometry_residual"])}',
    ]
    guesses = artifact.get('eve_guess_probability') or {}
    if guesses:
        lines.append('eve_guess ' + ' '.join(
            f'{BASIS_ABBREVIATIONS.get(name, name)}={_fixed(value)}'
            for name, value in sorted(guesses.items())))
    failing = [row for row in artifact.get('per_row_residuals', [])
               if row['residual'] > 0]
    if failing:
        lines += _table(
            ('alice', 'setting', 'outcome', 'reason', 'residual'),
            [(row['alice'], row['setting'], row['outcome'], row['reason'],
              f'{row["residual"]:.6f}') for row in failing],
        )
    return lines


def _reverse_space(artifact):
    return [
        f'reverse-space receiver={artifact["receiver"]["kind"]} '
        f'dimension={artifact["dimension"]}',
        'basis ' + ' '.join(artifact['labels']),
    ]


def _classification(artifact):
    rows = [
        (result['name'], result['classified_as'],
         result.get('expected_class') or '-')
        for result in artifact['results']
    ]
    return _table(('attack', 'class', 'expected'), rows)


RENDERERS = {
    'simulation-report': _simulation,
    'fuzz-report': _fuzz,
    'fuzz-replay': _fuzz_replay,
    'attack-family': _attack_family,
    'oblivious-report': _oblivious,
    'reverse-space': _reverse_space,
    'classification': _classification,
}


def check_artifact(artifact):
    """Raise unless the artifact is a known kind at the current schema."""
    if not isinstance(artifact, dict) or 'kind' not in artifact:
        raise ConfigError('Artifacts are JSON objects with a kind.')
    expected = qkdlab_setting('ARTIFACT_SCHEMA_VERSION')
    if artifact.get('schema_version') != expected:
        raise SchemaVersionError(
            'Artifact schema version does not match.',
            {'found': artifact.get('schema_version'), 'expected': expected,
             'kind': artifact['kind']},
        )
    if artifact['kind'] not in RENDERERS:
        raise ConfigError(f'Unknown artifact kind {artifact["kind"]!r}.',
                          {'known': sorted(RENDERERS)})


def emit_report(artifacts):
    """Render artifacts in order, separated by blank lines."""
    blocks = []
    for artifact in artifacts:
        check_artifact(artifact)
        blocks.append('\n'.join(RENDERERS[artifact['kind']](artifact)))
    if not blocks:
        return ''
    return '\n\n'.join(blocks) + '\n'
