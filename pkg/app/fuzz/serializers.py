"""
Serializers for fuzz inputs, device parameters, strategies and anomalies.
"""
import math

from rest_framework import serializers

from core.errors import ConfigError
from fuzz.campaign import Anomaly, AnomalyTag, FuzzStrategy
from fuzz.device import NAMED_POLARIZATIONS, APDParams, FuzzInput, Pulse


class PulseSerializer(serializers.Serializer):
    time_slot = serializers.IntegerField()
    polarization = serializers.JSONField()
    mean_photons = serializers.FloatField(min_value=0.0)

    def validate_polarization(self, value):
        if isinstance(value, str):
            if value not in NAMED_POLARIZATIONS:
                raise serializers.ValidationError(
                    f'Use an angle or one of {list(NAMED_POLARIZATIONS)}.')
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise serializers.ValidationError('Expected a name or an angle.')
        if not 0.0 <= value < math.pi:
            raise serializers.ValidationError('Angles lie in [0, pi).')
        return float(value)


class FuzzInputSerializer(serializers.Serializer):
    """Serializer for one multi-pulse fuzz input."""
    pulses = PulseSerializer(many=True)

    def validate_pulses(self, value):
        if not value:
            raise serializers.ValidationError('At least one pulse.')
        slots = [pulse['time_slot'] for pulse in value]
        if slots != sorted(slots):
            raise serializers.ValidationError(
                'Time slots must be non-decreasing.')
        return value

    def create(self, validated_data):
        """Create and return the fuzz input."""
        return FuzzInput(tuple(
            Pulse(**pulse) for pulse in validated_data['pulses']))


class APDParamsSerializer(serializers.Serializer):
    p_th = serializers.FloatField(default=1.0)
    blind_threshold = serializers.FloatField(default=50.0)
    recovery_slots = serializers.IntegerField(default=4, min_value=0)
    geiger_efficiency = serializers.FloatField(
        default=1.0, min_value=0.0, max_value=1.0)
    double_click = serializers.ChoiceField(
        choices=['Invalid', 'Loss'], default='Invalid')

    def validate(self, attrs):
        if attrs['p_th'] <= 0:
            raise serializers.ValidationError({'p_th': 'Must be positive.'})
        if attrs['blind_threshold'] <= attrs['p_th']:
            raise serializers.ValidationError(
                {'blind_threshold': 'Must exceed p_th.'})
        return attrs

    def create(self, validated_data):
        """Create and return the APD parameters."""
        return APDParams(**validated_data)


class FuzzStrategySerializer(serializers.Serializer):
    max_cases = serializers.IntegerField(default=10_000, min_value=1)
    intensities = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), required=False)
    time_shifts = serializers.ListField(
        child=serializers.IntegerField(), required=False)
    depth = serializers.IntegerField(default=2, min_value=1)
    refine_depth = serializers.IntegerField(default=2, min_value=0)
    repeats = serializers.IntegerField(required=False, min_value=1)
    intensity_scale = serializers.FloatField(default=1.0)

    def create(self, validated_data):
        """Create and return the strategy."""
        return FuzzStrategy(**validated_data)


class AnomalySerializer(serializers.Serializer):
    """Serializer for logged anomalies, enough to replay them."""
    id = serializers.CharField()
    case = serializers.IntegerField(min_value=0)
    stage = serializers.IntegerField(min_value=0)
    seed = serializers.IntegerField()
    repeats = serializers.IntegerField(min_value=1)
    input = FuzzInputSerializer()
    observation = serializers.DictField()
    classes = serializers.DictField(child=serializers.IntegerField())
    tag = serializers.ChoiceField(choices=[t.value for t in AnomalyTag])
    parent = serializers.CharField(allow_null=True, required=False)

    def to_representation(self, instance):
        return instance.as_dict()

    def create(self, validated_data):
        """Create and return the anomaly."""
        data = dict(validated_data)
        data['input'] = FuzzInputSerializer().create(data['input'])
        data['tag'] = AnomalyTag(data['tag'])
        data['classes'] = dict(sorted(data['classes'].items()))
        return Anomaly(**data)


def _load(serializer_class, data, what):
    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        raise ConfigError(f'Malformed {what}.', {'errors': serializer.errors})
    return serializer.save()


def fuzz_input_from_json(data):
    return _load(FuzzInputSerializer, data, 'fuzz input')


def apd_params_from_json(data):
    return _load(APDParamsSerializer, data or {}, 'APD parameters')


def strategy_from_json(data):
    return _load(FuzzStrategySerializer, data or {}, 'fuzz strategy')


def anomaly_from_json(data):
    return _load(AnomalySerializer, data, 'anomaly')
