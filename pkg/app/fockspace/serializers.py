"""
Serializers for the JSON state format.

Mode labels are "kind:index" strings and amplitudes are [re, im] pairs.
"""
from rest_framework import serializers

from core.errors import ConfigError
from fockspace.modes import FockBasisState, ModeLabel
from fockspace.states import PhotonicState


class ComplexField(serializers.Field):
    """Complex number as an [re, im] pair."""

    def to_representation(self, value):
        value = complex(value)
        return [float(value.real), float(value.imag)]

    def to_internal_value(self, data):
        if isinstance(data, (int, float)):
            return complex(data)
        if not isinstance(data, (list, tuple)) or len(data) != 2:
            raise serializers.ValidationError(
                'Expected an [re, im] pair.', code='complex')
        try:
            return complex(float(data[0]), float(data[1]))
        except (TypeError, ValueError):
            raise serializers.ValidationError(
                'Expected numeric components.', code='complex')


class ModeLabelField(serializers.CharField):
    """Mode label in its "kind:index" form."""

    def to_representation(self, value):
        return str(value)

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return ModeLabel.parse(text)
        except ConfigError as exc:
            raise serializers.ValidationError(exc.message, code='mode')


class TermSerializer(serializers.Serializer):
    """One Fock basis state with its amplitude."""
    occupation = serializers.DictField(
        child=serializers.IntegerField(min_value=0))
    amplitude = ComplexField()

    def validate_occupation(self, value):
        """Check every key is a mode label."""
        for key in value:
            try:
                ModeLabel.parse(key)
            except ConfigError as exc:
                raise serializers.ValidationError(exc.message, code='mode')
        return value


class PhotonicStateSerializer(serializers.Serializer):
    """Serializer for photonic states."""
    terms = TermSerializer(many=True)
    registry = serializers.ListField(
        child=ModeLabelField(), required=False, allow_null=True)

    def to_representation(self, instance):
        return {
            'terms': [
                {
                    'occupation': {
                        str(mode): count
                        for mode, count in basis_state.occupation
                    },
                    'amplitude': ComplexField().to_representation(amplitude),
                }
                for basis_state, amplitude in instance.items()
            ],
            'registry': None if instance.registry is None else
            [str(mode) for mode in sorted(instance.registry)],
        }

    def create(self, validated_data):
        """Create and return a PhotonicState."""
        registry = validated_data.get('registry')
        amplitudes = {}
        for term in validated_data['terms']:
            basis_state = FockBasisState.of({
                ModeLabel.parse(key): count
                for key, count in term['occupation'].items()
            })
            amplitudes[basis_state] = amplitudes.get(basis_state, 0j) + \
                term['amplitude']
        return PhotonicState(
            amplitudes, None if registry is None else frozenset(registry))


def state_to_json(state):
    return PhotonicStateSerializer(state).data


def state_from_json(data):
    """Validate and build a state, raising ConfigError on bad input."""
    serializer = PhotonicStateSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError('Malformed state document.', {
            'errors': serializer.errors,
        })
    return serializer.save()
