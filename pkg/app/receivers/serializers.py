"""
Serializers for receiver and source documents.
"""
import numpy as np
from rest_framework import serializers

from core.errors import ConfigError
from fockspace.linalg import LinearMap
from fockspace.modes import FockBasisState, ModeLabel
from fockspace.serializers import (
    ComplexField,
    ModeLabelField,
    PhotonicStateSerializer,
)
from receivers.receiver import (
    AliceSourceModel,
    AliceState,
    InterpretationSets,
    ReceiverModel,
    ReceiverSetting,
)


def _occupation(data):
    return FockBasisState.of({
        ModeLabel.parse(key): count for key, count in data.items()
    })


class InterpretationSetsSerializer(serializers.Serializer):
    """Serializer for the J0 / J1 / J_loss / J_invalid partition."""
    j0 = serializers.ListField(child=serializers.CharField(), default=list)
    j1 = serializers.ListField(child=serializers.CharField(), default=list)
    loss = serializers.ListField(child=serializers.CharField(), default=list)
    invalid = serializers.ListField(
        child=serializers.CharField(), default=list)

    def to_representation(self, instance):
        return {
            'j0': sorted(instance.j0),
            'j1': sorted(instance.j1),
            'loss': sorted(instance.j_loss),
            'invalid': sorted(instance.j_invalid),
        }

    def create(self, validated_data):
        """Create and return the interpretation sets."""
        try:
            return InterpretationSets(
                validated_data['j0'], validated_data['j1'],
                validated_data['loss'], validated_data['invalid'],
            )
        except ConfigError as exc:
            raise serializers.ValidationError(exc.message, code='partition')


class OutcomeSerializer(serializers.Serializer):
    id = serializers.CharField()
    state = PhotonicStateSerializer()


class SettingSerializer(serializers.Serializer):
    """One setting given as an explicit matrix."""
    id = serializers.CharField()
    basis = serializers.CharField()
    input_basis = serializers.ListField(
        child=serializers.DictField(child=serializers.IntegerField(min_value=0)))
    output_basis = serializers.ListField(
        child=serializers.DictField(child=serializers.IntegerField(min_value=0)))
    matrix = serializers.ListField(
        child=serializers.ListField(child=ComplexField()))
    outcomes = OutcomeSerializer(many=True)
    interpretation = InterpretationSetsSerializer()

    def validate(self, attrs):
        """Check the matrix shape against the declared bases."""
        rows = len(attrs['matrix'])
        columns = {len(row) for row in attrs['matrix']}
        if rows != len(attrs['output_basis']) or \
                columns - {len(attrs['input_basis'])}:
            msg = 'Matrix shape does not match the declared bases.'
            raise serializers.ValidationError(msg, code='shape')
        try:
            attrs['input_basis'] = [_occupation(b) for b in attrs['input_basis']]
            attrs['output_basis'] = [
                _occupation(b) for b in attrs['output_basis']]
        except ConfigError as exc:
            raise serializers.ValidationError(exc.message, code='mode')
        return attrs


class AliceStateSerializer(serializers.Serializer):
    label = serializers.CharField()
    basis = serializers.CharField()
    bit = serializers.ChoiceField(choices=[0, 1])
    state = PhotonicStateSerializer()


class AliceSourceSerializer(serializers.Serializer):
    """Serializer for an ideal Alice source."""
    name = serializers.CharField()
    states = AliceStateSerializer(many=True)

    def to_representation(self, instance):
        return {
            'name': instance.name,
            'states': [
                {
                    'label': s.label,
                    'basis': s.basis,
                    'bit': s.bit,
                    'state': PhotonicStateSerializer(s.state).data,
                }
                for s in instance.states
            ],
        }

    def create(self, validated_data):
        """Create and return an AliceSourceModel."""
        states = []
        for item in validated_data['states']:
            state = PhotonicStateSerializer().create(item['state'])
            states.append(AliceState(
                item['label'], item['basis'], item['bit'], state))
        return AliceSourceModel(validated_data['name'], states)


class CustomReceiverSerializer(serializers.Serializer):
    """Serializer for receivers declared through explicit matrices."""
    settings = SettingSerializer(many=True)
    channel_modes = serializers.ListField(child=ModeLabelField())
    ancilla_modes = serializers.ListField(
        child=ModeLabelField(), default=list)
    passive_choice = serializers.BooleanField(default=False)
    single_photon = serializers.BooleanField(default=False)
    alice = AliceSourceSerializer(required=False)

    def create(self, validated_data):
        """Create and return the receiver model."""
        settings = []
        for item in validated_data['settings']:
            unitary = LinearMap(
                item['input_basis'], item['output_basis'],
                np.array(item['matrix'], dtype=complex),
            )
            outcomes = [
                (outcome['id'],
                 PhotonicStateSerializer().create(outcome['state']))
                for outcome in item['outcomes']
            ]
            interpretation = InterpretationSetsSerializer().create(
                item['interpretation'])
            settings.append(ReceiverSetting(
                item['id'], item['basis'], unitary, outcomes, interpretation))
        return ReceiverModel(
            kind='custom',
            settings=settings,
            channel_modes=validated_data['channel_modes'],
            ancilla_modes=validated_data['ancilla_modes'],
            passive_choice=validated_data['passive_choice'],
            single_photon=validated_data['single_photon'],
            params=dict(self.initial_data),
        )


class ReceiverSummarySerializer(serializers.Serializer):
    """Read-only summary of a receiver for artifacts."""

    def to_representation(self, instance):
        return {
            'kind': instance.kind,
            'channel_modes': sorted(str(m) for m in instance.channel_modes),
            'ancilla_modes': sorted(str(m) for m in instance.ancilla_modes),
            'passive_choice': instance.passive_choice,
            'single_photon': instance.single_photon,
            'settings': [
                {
                    'id': setting.id,
                    'basis': setting.basis,
                    'outcomes': setting.outcome_ids,
                    'interpretation': InterpretationSetsSerializer(
                        setting.interpretation).data,
                }
                for setting in instance.settings
            ],
        }


def build_custom_receiver(params):
    """Validate a custom receiver document, raising ConfigError on bad input."""
    serializer = CustomReceiverSerializer(data=params)
    if not serializer.is_valid():
        raise ConfigError('Malformed custom receiver.', {
            'errors': serializer.errors,
        })
    return serializer.save()


def alice_from_json(data):
    serializer = AliceSourceSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError('Malformed Alice source.', {
            'errors': serializer.errors,
        })
    return serializer.save()
