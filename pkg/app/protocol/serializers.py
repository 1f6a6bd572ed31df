"""
Serializers for channel specs and simulation reports.
"""
from rest_framework import serializers

from core.conf import qkdlab_setting
from core.errors import ConfigError, SchemaVersionError
from attacks.library import make_attack
from attacks.serializers import attack_from_json
from protocol.channels import ChannelKind, make_channel
from protocol.simulation import BasisStatistics, SimulationReport


class ChannelSerializer(serializers.Serializer):
    """Serializer for the channel part of a scenario.

    attack is either a built-in attack name or an inline attack document.
    """
    kind = serializers.ChoiceField(choices=[k.value for k in ChannelKind])
    attack = serializers.JSONField(required=False)
    p_multi = serializers.FloatField(required=False, min_value=0.0,
                                     max_value=1.0)
    loss = serializers.FloatField(required=False, min_value=0.0,
                                  max_value=1.0)

    def validate(self, attrs):
        kind = ChannelKind(attrs['kind'])
        needed = {
            ChannelKind.ATTACK: 'attack',
            ChannelKind.PNS: 'p_multi',
            ChannelKind.LOSSY: 'loss',
        }.get(kind)
        if needed and needed not in attrs:
            raise serializers.ValidationError(
                {needed: f'Required for {kind.value} channels.'})
        return attrs

    def build(self, receiver):
        """Create and return the channel for a receiver."""
        data = self.validated_data
        kind = ChannelKind(data['kind'])
        if kind is ChannelKind.ATTACK:
            attack = data['attack']
            if isinstance(attack, str):
                attack = make_attack(attack, receiver)
            else:
                attack = attack_from_json(attack)
            return make_channel(kind, attack, receiver)
        if kind is ChannelKind.PNS:
            return make_channel(kind, data['p_multi'])
        if kind is ChannelKind.LOSSY:
            return make_channel(kind, data['loss'])
        return make_channel(kind)


class BasisStatisticsSerializer(serializers.Serializer):
    rounds = serializers.IntegerField(min_value=0)
    sifted = serializers.IntegerField(min_value=0)
    tested = serializers.IntegerField(min_value=0)
    errors = serializers.IntegerField(min_value=0)
    efficiency = serializers.FloatField(min_value=0.0, max_value=1.0)
    loss_rate = serializers.FloatField(min_value=0.0, max_value=1.0)
    invalid_rate = serializers.FloatField(min_value=0.0, max_value=1.0)
    eve_guess_accuracy = serializers.FloatField(allow_null=True)


class SimulationReportSerializer(serializers.Serializer):
    """Serializer for simulation report artifacts."""
    schema_version = serializers.CharField()
    receiver = serializers.CharField(allow_blank=True)
    channel = serializers.DictField()
    rounds = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    test_fraction = serializers.FloatField()
    bases = serializers.DictField(child=BasisStatisticsSerializer())

    def to_representation(self, instance):
        return instance.as_dict()

    def validate_schema_version(self, value):
        expected = qkdlab_setting('ARTIFACT_SCHEMA_VERSION')
        if value != expected:
            raise SchemaVersionError(
                'Report was written with another schema version.',
                {'found': value, 'expected': expected},
            )
        return value

    def create(self, validated_data):
        """Create and return a report from its counts."""
        bases = {}
        for name, stats in validated_data['bases'].items():
            rounds = stats['rounds']
            bases[name] = BasisStatistics(
                rounds=rounds,
                valid=round(stats['efficiency'] * rounds),
                lost=round(stats['loss_rate'] * rounds),
                invalid=round(stats['invalid_rate'] * rounds),
                sifted=stats['sifted'],
                tested=stats['tested'],
                errors=stats['errors'],
                eve_guesses=stats['sifted']
                if stats['eve_guess_accuracy'] is not None else 0,
                eve_correct=round((stats['eve_guess_accuracy'] or 0.0)
                                  * stats['sifted']),
            )
        return SimulationReport(
            rounds=validated_data['rounds'],
            seed=validated_data['seed'],
            test_fraction=validated_data['test_fraction'],
            bases=bases,
            receiver=validated_data['receiver'],
            channel=validated_data['channel'],
        )


def report_from_json(data):
    """Create and return a SimulationReport from its JSON document."""
    serializer = SimulationReportSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError('Malformed simulation report.',
                          {'errors': serializer.errors})
    return serializer.save()
