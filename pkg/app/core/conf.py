"""
Access to the QKDLAB settings dict.
"""
from django.conf import settings

DEFAULTS = {
    'PHOTON_CUTOFF': 10,
    'DEFAULT_SEED': 0,
    'RECORD_RUNS': True,
    'ARTIFACT_SCHEMA_VERSION': '1',
    'SIMULATION_CHUNK': 65536,
    'FUZZ_REPEATS': 20,
    'FUZZ_FRAME_SLOTS': 16,
}


def qkdlab_setting(name):
    """Return a toolkit setting, falling back to the built-in default."""
    configured = getattr(settings, 'QKDLAB', {})
    if name in configured:
        return configured[name]
    return DEFAULTS[name]
