"""
Serializers for footprints and the attack registry.
"""
from rest_framework import serializers

from classify.footprint import READ_SPACES, WRITE_SPACES, SpaceFootprint


class SpaceFootprintSerializer(serializers.Serializer):
    """Serializer for footprints."""
    reads = serializers.ListField(
        child=serializers.ChoiceField(choices=sorted(READ_SPACES)),
        required=False)
    writes = serializers.ListField(
        child=serializers.ChoiceField(choices=sorted(WRITE_SPACES)),
        required=False)
    inert_env_write = serializers.BooleanField(required=False, default=False)

    def to_representation(self, instance):
        return instance.as_dict()

    def create(self, validated_data):
        """Create and return a SpaceFootprint."""
        return SpaceFootprint(
            frozenset(validated_data.get('reads', ())),
            frozenset(validated_data.get('writes', ())),
            validated_data.get('inert_env_write', False),
        )


class AttackRecordSerializer(serializers.Serializer):
    """Read-only view of a registry record."""

    def to_representation(self, instance):
        return instance.as_dict()
