"""
Networks module application configuration.
"""

from django.apps import AppConfig


class NetworksConfig(AppConfig):
    """Configuration for the Networks module."""

    name = 'modules.networks'
    verbose_name = 'Multicast Networks'
