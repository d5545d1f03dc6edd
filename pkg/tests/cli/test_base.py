import os
import shutil
import tempfile
from io import StringIO

import simplejson as json
from django.core.management import call_command

from tests.test_base import BaseTest


class CommandTest(BaseTest):
    """Runs management commands against config files in a scratch directory."""

    def setUp(self):
        super().setUp()
        self.workdir = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.workdir, True)
        self.out = os.path.join(self.workdir, 'out')

    def write_config(self, data, name='config.json'):
        path = os.path.join(self.workdir, name)
        with open(path, 'w', encoding='utf-8') as handle:
            if isinstance(data, str):
                handle.write(data)
            else:
                json.dump(data, handle)
        return path

    def call(self, command, config=None, **options):
        stdout, stderr = StringIO(), StringIO()
        if config is not None:
            options['config'] = self.write_config(config)
        options.setdefault('out', self.out)
        call_command(command, stdout=stdout, stderr=stderr, **options)
        return stdout.getvalue(), stderr.getvalue()

    def read(self, name, out=None):
        with open(os.path.join(out or self.out, name), 'rb') as handle:
            return handle.read()

    def read_json(self, name, out=None):
        return json.loads(self.read(name, out).decode('utf-8'))

    def read_csv(self, name, out=None):
        """(comment, header, rows) of a CSV output."""
        lines = self.read(name, out).decode('utf-8').splitlines()
        header = lines[1].split(',')
        return lines[0], header, [line.split(',') for line in lines[2:]]
