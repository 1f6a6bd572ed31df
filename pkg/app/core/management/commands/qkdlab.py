"""
Django command running qkdlab scenarios.
"""
from django.core.management.base import BaseCommand, CommandError

from core import cli


class Command(BaseCommand):
    """Django command for the qkdlab subcommands."""
    help = 'Reverse spaces, synthesize and verify attacks, simulate, fuzz.'

    def add_arguments(self, parser):
        cli.add_arguments(parser)

    def handle(self, *args, **options):
        """Entrypoint for command."""
        exit_code = cli.execute(options, self.stdout, self.stderr)
        if exit_code:
            raise CommandError(
                f'qkdlab {options["subcommand"]} failed.',
                returncode=exit_code,
            )
        if options.get('out'):
            self.stdout.write(self.style.SUCCESS(
                f'Artifact written to {options["out"]}.'))
