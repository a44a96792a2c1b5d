"""
Serializers for exported model metadata.
"""

from rest_framework import serializers


class ModelSidecarSerializer(serializers.Serializer):
    """Metadata written next to every exported LP / MPS file."""

    name = serializers.CharField()
    network = serializers.SerializerMethodField()
    q = serializers.IntegerField()
    code_size = serializers.IntegerField()
    format = serializers.SerializerMethodField()
    options = serializers.SerializerMethodField()
    edge_order = serializers.SerializerMethodField()
    vertex_tokens = serializers.DictField(child=serializers.CharField())
    edge_tokens = serializers.DictField(child=serializers.CharField())
    stats = serializers.SerializerMethodField()

    def get_network(self, obj):
        return obj.network.name

    def get_format(self, obj):
        return self.context.get('format', 'lp')

    def get_options(self, obj):
        return {
            'routing_fix': obj.options.routing_fix,
            'symmetry_break': obj.options.symmetry_break,
        }

    def get_edge_order(self, obj):
        return list(obj.order.sequence)

    def get_stats(self, obj):
        return self.context.get('stats')
