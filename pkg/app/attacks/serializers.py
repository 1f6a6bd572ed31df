"""
Serializers for attack isometries and attack families.
"""
import numpy as np
from rest_framework import serializers

from core.errors import ConfigError
from fockspace.serializers import ComplexField, PhotonicStateSerializer
from attacks.isometry import AttackIsometry


def _complex_table(array):
    field = ComplexField()
    if np.ndim(array) == 0:
        return field.to_representation(array)
    return [_complex_table(entry) for entry in array]


class AttackIsometrySerializer(serializers.Serializer):
    """Serializer for attack coefficient tables."""
    name = serializers.CharField(required=False, default='attack')
    alice_labels = serializers.ListField(child=serializers.CharField())
    p_basis = PhotonicStateSerializer(many=True)
    coefficients = serializers.ListField(
        child=serializers.ListField(
            child=serializers.ListField(child=ComplexField())))
    provenance = serializers.DictField(required=False, default=dict)

    def to_representation(self, instance):
        return {
            'name': instance.name,
            'alice_labels': list(instance.alice_labels),
            'eve_dim': instance.eve_dim,
            'p_basis': PhotonicStateSerializer(
                instance.p_basis, many=True).data,
            'coefficients': _complex_table(instance.coefficients),
            'provenance': instance.provenance,
        }

    def validate(self, attrs):
        """Check the table is (labels, H^P, eve_dim) shaped."""
        rows = attrs['coefficients']
        if len(rows) != len(attrs['alice_labels']) or any(
                len(row) != len(attrs['p_basis']) for row in rows):
            raise serializers.ValidationError(
                'Coefficient rows must match labels and H^P basis.',
                code='shape')
        widths = {len(entry) for row in rows for entry in row}
        if len(widths) != 1 or widths == {0}:
            raise serializers.ValidationError(
                'Every Eve vector needs the same positive length.',
                code='shape')
        return attrs

    def create(self, validated_data):
        """Create and return an AttackIsometry."""
        p_basis = [
            PhotonicStateSerializer().create(state)
            for state in validated_data['p_basis']
        ]
        return AttackIsometry(
            validated_data['alice_labels'],
            p_basis,
            np.array(validated_data['coefficients'], dtype=complex),
            name=validated_data['name'],
            provenance=validated_data['provenance'],
        )


class AttackFamilySerializer(serializers.Serializer):
    """Read-only view of a synthesized family."""

    def to_representation(self, instance):
        return {
            'receiver': instance.system.receiver.kind,
            'dimension': instance.dimension,
            'is_trivial': instance.is_trivial,
            'include_vacuum': instance.include_vacuum,
            'column_labels': instance.system.column_labels,
            'null_basis': _complex_table(instance.null_basis.T),
            'named_parameters': instance.named_parameters,
            'vertices': [[float(w) for w in vertex]
                         for vertex in instance.vertices],
            'provenance': instance.provenance(),
            'instance': None if instance.instance is None else
            AttackIsometrySerializer(instance.instance).data,
            'note': 'Only attacks independent of the sent state avoid errors.'
            if instance.is_trivial else '',
        }


def attack_to_json(attack):
    return AttackIsometrySerializer(attack).data


def attack_from_json(data):
    """Validate and build an attack, raising ConfigError on bad input."""
    serializer = AttackIsometrySerializer(data=data)
    if not serializer.is_valid():
        raise ConfigError('Malformed attack document.', {
            'errors': serializer.errors,
        })
    return serializer.save()
