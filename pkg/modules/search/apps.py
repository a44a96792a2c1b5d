"""
Search module application configuration.
"""

from django.apps import AppConfig


class SearchConfig(AppConfig):
    """Configuration for the Search module."""

    name = 'modules.search'
    verbose_name = 'Capacity Search'
