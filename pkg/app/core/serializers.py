"""
Serializers for scenario documents.
"""
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from rest_framework import serializers

from core.conf import qkdlab_setting
from core.errors import ConfigError
from attacks.library import BUILT_IN_ATTACKS, default_receiver_kind, make_attack
from attacks.serializers import attack_from_json
from classify.serializers import SpaceFootprintSerializer
from fuzz.device import DEVICE_FACTORIES, make_device
from fuzz.serializers import apd_params_from_json
from protocol.channels import make_channel
from protocol.serializers import ChannelSerializer
from receivers.builders import RECEIVER_KINDS, alice_for, make_receiver
from receivers.serializers import alice_from_json

SUBCOMMANDS = (
    'reverse-space',
    'synth',
    'verify',
    'simulate',
    'fuzz',
    'classify',
    'report',
)


def load_json(path):
    """Read a JSON document, raising ConfigError when it cannot be read."""
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError(f'Cannot read {path}.', {'path': str(path),
                                                   'detail': str(exc)})
    except json.JSONDecodeError as exc:
        raise ConfigError(f'{path} is not valid JSON.',
                          {'path': str(path), 'line': exc.lineno})


class ReceiverSpecField(serializers.JSONField):
    """A receiver kind, or {"kind": ..., "params": {...}}."""

    def to_internal_value(self, data):
        data = super().to_internal_value(data)
        if isinstance(data, str):
            data = {'kind': data, 'params': {}}
        if not isinstance(data, dict) or 'kind' not in data:
            raise serializers.ValidationError(
                'Expected a receiver kind or an object with a kind.')
        if data['kind'] not in RECEIVER_KINDS:
            raise serializers.ValidationError(
                f'Unknown receiver kind {data["kind"]!r}.')
        extra = set(data) - {'kind', 'params'}
        if extra:
            raise serializers.ValidationError(
                f'Unknown receiver keys: {sorted(extra)}.')
        return {'kind': data['kind'], 'params': dict(data.get('params') or {})}


class ScenarioConfigSerializer(serializers.Serializer):
    """Serializer for scenario documents; unknown keys are rejected."""
    subcommand = serializers.ChoiceField(choices=SUBCOMMANDS, required=False)
    receiver = ReceiverSpecField(required=False)
    alice = serializers.JSONField(required=False)
    attack = serializers.JSONField(required=False)
    channel = ChannelSerializer(required=False)
    rounds = serializers.IntegerField(min_value=1, default=100_000)
    seed = serializers.IntegerField(required=False, allow_null=True)
    test_fraction = serializers.FloatField(
        min_value=0.0, max_value=1.0, default=0.5)
    flip_fraction = serializers.FloatField(
        min_value=0.0, max_value=1.0, default=0.0)
    eve_dim = serializers.IntegerField(required=False, allow_null=True)
    include_vacuum = serializers.BooleanField(default=False)
    invalid_as_loss = serializers.BooleanField(default=False)
    device = serializers.ChoiceField(
        choices=sorted(DEVICE_FACTORIES), default='apd')
    device_params = serializers.DictField(required=False)
    strategy = serializers.DictField(required=False)
    footprint = SpaceFootprintSerializer(required=False)
    record = serializers.CharField(required=False)
    replay = serializers.CharField(required=False)
    artifacts = serializers.ListField(
        child=serializers.CharField(), required=False)
    out = serializers.CharField(required=False)
    log = serializers.CharField(required=False)
    trace = serializers.CharField(required=False)

    def validate(self, attrs):
        unknown = set(self.initial_data) - set(self.fields)
        if unknown:
            raise serializers.ValidationError(
                {key: 'Unknown key.' for key in sorted(unknown)})
        return attrs

    def create(self, validated_data):
        """Create and return the ScenarioConfig."""
        data = dict(validated_data)
        if 'footprint' in data:
            data['footprint'] = SpaceFootprintSerializer().create(
                data['footprint'])
        if 'channel' in data:
            data['channel'] = dict(data['channel'])
        if data.get('seed') is None:
            data['seed'] = qkdlab_setting('DEFAULT_SEED')
        return ScenarioConfig(**data)


@dataclass
class ScenarioConfig:
    """A validated scenario, with builders for the objects it names."""
    subcommand: Optional[str] = None
    receiver: Optional[dict] = None
    alice: Optional[dict] = None
    attack: object = None
    channel: Optional[dict] = None
    rounds: int = 100_000
    seed: int = 0
    test_fraction: float = 0.5
    flip_fraction: float = 0.0
    eve_dim: Optional[int] = None
    include_vacuum: bool = False
    invalid_as_loss: bool = False
    device: str = 'apd'
    device_params: dict = field(default_factory=dict)
    strategy: dict = field(default_factory=dict)
    footprint: object = None
    record: Optional[str] = None
    replay: Optional[str] = None
    artifacts: list = field(default_factory=list)
    out: Optional[str] = None
    log: Optional[str] = None
    trace: Optional[str] = None

    def require(self, *names):
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ConfigError(
                f'{self.subcommand} needs {", ".join(missing)}.',
                {'missing': missing, 'subcommand': self.subcommand},
            )

    def build_receiver(self):
        """The named receiver, or the one a built-in attack was written for."""
        if (self.receiver is None and isinstance(self.attack, str)
                and self.attack in BUILT_IN_ATTACKS):
            return make_receiver(default_receiver_kind(self.attack))
        self.require('receiver')
        return make_receiver(self.receiver['kind'], self.receiver['params'])

    def build_alice(self, receiver):
        if self.alice is None:
            return alice_for(receiver)
        return alice_from_json(self.alice)

    def build_attack(self, receiver):
        """Resolve a built-in name, a JSON file path or an inline document."""
        self.require('attack')
        attack = self.attack
        if isinstance(attack, str):
            if attack in BUILT_IN_ATTACKS:
                return make_attack(attack, receiver)
            if not os.path.exists(attack):
                raise ConfigError(
                    f'{attack!r} is neither a built-in attack nor a file.',
                    {'attack': attack, 'built_in': sorted(BUILT_IN_ATTACKS)},
                )
            attack = load_json(attack)
        return attack_from_json(attack)

    def build_channel(self, receiver):
        """The channel spec if given, else the attack, else identity."""
        if self.channel is not None:
            serializer = ChannelSerializer(data=self.channel)
            if not serializer.is_valid():
                raise ConfigError('Malformed channel.',
                                  {'errors': serializer.errors})
            return serializer.build(receiver)
        if self.attack is not None:
            return make_channel('attack-isometry',
                                self.build_attack(receiver), receiver)
        return make_channel('identity')

    def build_device(self):
        params = None
        if self.device == 'apd':
            params = apd_params_from_json(self.device_params)
        elif self.device_params:
            raise ConfigError(f'Device {self.device!r} takes no parameters.')
        return make_device(self.device, params)

    def as_dict(self):
        data = {
            key: value for key, value in vars(self).items()
            if value not in (None, {}, []) and key != 'footprint'
        }
        if self.footprint is not None:
            data['footprint'] = self.footprint.as_dict()
        return data


def scenario_from_json(data):
    """Validate a scenario document and return its ScenarioConfig."""
    if not isinstance(data, dict):
        raise ConfigError('A scenario must be a JSON object.')
    serializer = ScenarioConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError('Malformed scenario.', {'errors': serializer.errors})
    return serializer.save()
