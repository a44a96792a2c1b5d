"""
``python manage.py netcap <subcommand>``: network-coding capacity tools.
"""

import argparse
import sys

from django.core.management.base import BaseCommand

from modules.cli.runner import add_arguments, execute


class Command(BaseCommand):
    help = "Validate networks, export models, compute capacities and verify certificates."

    def add_arguments(self, parser):
        add_arguments(parser)

    def handle(self, *args, **options):
        exit_code = execute(argparse.Namespace(**options), self.stdout, self.stderr)
        if exit_code:
            sys.exit(exit_code)
