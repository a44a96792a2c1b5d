"""
Serializers for CLI reports.

Human and JSON output are both rendered from these records.
"""

from rest_framework import serializers


class OptionsField(serializers.Field):
    def to_representation(self, value):
        return value.as_dict() if value is not None else None


class CapacityReportSerializer(serializers.Serializer):
    """Report of a capacity run; ``M_star`` and ``capacity`` are null unless proven."""

    network = serializers.CharField(source='network.name')
    q = serializers.IntegerField()
    M_star = serializers.IntegerField(source='m_star', allow_null=True)
    capacity = serializers.SerializerMethodField()
    capacity_text = serializers.SerializerMethodField()
    status = serializers.CharField()
    lower = serializers.IntegerField()
    upper = serializers.IntegerField()
    nodes = serializers.IntegerField()
    wall_ms = serializers.IntegerField()
    linear = serializers.BooleanField()
    supersource_applied = serializers.BooleanField()
    options = OptionsField()

    def get_capacity(self, obj):
        return obj.capacity.value if obj.capacity is not None else None

    def get_capacity_text(self, obj):
        if obj.capacity is not None:
            return str(obj.capacity)
        return f"between log_{obj.q} {obj.lower} and log_{obj.q} {obj.upper}"


class DecisionReportSerializer(serializers.Serializer):
    """Report of one ``solve`` run."""

    network = serializers.SerializerMethodField()
    q = serializers.SerializerMethodField()
    M = serializers.SerializerMethodField()
    status = serializers.CharField(source='status.value')
    nodes = serializers.IntegerField()
    wall_ms = serializers.IntegerField()
    options = serializers.SerializerMethodField()

    def get_network(self, obj):
        return self.context['network'].name

    def get_q(self, obj):
        return self.context['alphabet'].q

    def get_M(self, obj):
        return self.context['code_size']

    def get_options(self, obj):
        return self.context['options'].as_dict()


class VerificationReportSerializer(serializers.Serializer):
    valid = serializers.BooleanField()
    size = serializers.IntegerField()
    reasons = serializers.ListField(child=serializers.CharField())
    witness = serializers.SerializerMethodField()
    linear = serializers.BooleanField(allow_null=True)

    def get_witness(self, obj):
        if obj.witness is None:
            return None
        return {
            'terminal': obj.witness.terminal,
            'codeword': list(obj.witness.codeword),
            'other': list(obj.witness.other),
            'output': list(obj.witness.output),
        }
