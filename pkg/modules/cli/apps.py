"""
CLI module application configuration.
"""

from django.apps import AppConfig


class CliConfig(AppConfig):
    """Configuration for the CLI module."""

    name = 'modules.cli'
    verbose_name = 'Command Line'
