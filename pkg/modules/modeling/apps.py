"""
Modeling module application configuration.
"""

from django.apps import AppConfig


class ModelingConfig(AppConfig):
    """Configuration for the Modeling module."""

    name = 'modules.modeling'
    verbose_name = 'Feasibility Models'
