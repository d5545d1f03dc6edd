import logging

import simplejson as json
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import APIException

from ..core.exceptions import core_exception_handler
from .exceptions import ConfigError
from .utils import load_config, validate_config, write_outputs

logger = logging.getLogger(__name__)


class ConfigCommand(BaseCommand):
    """
    A command driven by one JSON run config.

    Subclasses name their serializer and implement `run(config, hashed,
    threads)` returning a `RunResult`. Domain errors are printed as an
    `errors` payload and end the command with exit status 1.
    """
    command = None
    serializer_class = None
    config_required = True

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON run config')
        parser.add_argument('--seed', type=int,
                            help='master seed, overrides the config')
        parser.add_argument('--out', help='output directory')
        parser.add_argument('--threads', type=int,
                            help='worker threads (default NONLOCAL_KOCH_THREADS)')

    def handle(self, *args, **options):
        try:
            if options.get('config') is None and self.config_required:
                raise ConfigError({'config': 'a --config file is required'})
            config, hashed = validate_config(
                self.serializer_class, load_config(options.get('config')),
                self.command, seed=options.get('seed'), out=options.get('out'))
            threads = (options.get('threads') or config.get('threads')
                       or settings.NONLOCAL_KOCH_THREADS)
            result = self.run(config, hashed, threads)
            paths = write_outputs(config['out'], result.outputs)
        except APIException as exc:
            payload = core_exception_handler(exc)
            self.stderr.write(json.dumps(payload, sort_keys=True, indent=2))
            raise CommandError('%s failed' % self.command, returncode=1)
        for path in paths:
            self.stdout.write(path)
        logger.info('%s: %s', self.command, json.dumps(
            result.report, sort_keys=True, ignore_nan=True, default=str))
        if result.failed:
            raise CommandError(self.failure_message(result), returncode=1)

    def run(self, config, hashed, threads):
        raise NotImplementedError

    def failure_message(self, result):
        return '%s reported failures' % self.command
