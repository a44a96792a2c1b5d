"""
Coding module application configuration.
"""

from django.apps import AppConfig


class CodingConfig(AppConfig):
    """Configuration for the Coding module."""

    name = 'modules.coding'
    verbose_name = 'Alphabets & Network Codes'
