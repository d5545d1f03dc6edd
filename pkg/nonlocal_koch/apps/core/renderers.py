import hashlib
import io
import os

import simplejson as json
from django.conf import settings
from rest_framework.renderers import JSONRenderer


def config_hash(config):
    """sha256 of the canonical JSON form of a run config."""
    canonical = json.dumps(config, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def provenance(config):
    return {
        'config_hash': config_hash(config),
        'version': settings.NONLOCAL_KOCH_VERSION,
    }


class MainRenderer(JSONRenderer):
    """
    Render a report under its object label with a provenance block.

    Error payloads are written as they come.
    """
    charset = 'utf-8'
    object_label = 'object'

    def render(self, data, accepted_media_type=None, renderer_context=None):
        renderer_context = renderer_context or {}
        if isinstance(data, dict) and data.get('errors') is not None:
            return json.dumps(data, sort_keys=True, indent=2).encode(
                self.charset)
        label = self.object_label
        if isinstance(data, (list, tuple)):
            label = label + 's'
        payload = {label: data}
        config = renderer_context.get('config')
        if config is not None:
            payload['meta'] = provenance(config)
        return json.dumps(
            payload, sort_keys=True, indent=2, ignore_nan=True,
        ).encode(self.charset)


class CSVRenderer:
    """
    Tables with a provenance comment line, '.' decimals and '\\n' endings.

    Floats are written with `repr` so identical inputs give identical bytes.
    """
    charset = 'utf-8'

    def render(self, header, rows, config=None):
        out = io.StringIO(newline='')
        if config is not None:
            meta = provenance(config)
            out.write('# config_hash={config_hash},version={version}\n'.format(
                **meta))
        out.write(','.join(header) + '\n')
        for row in rows:
            out.write(','.join(_cell(value) for value in row) + '\n')
        return out.getvalue().encode(self.charset)


def _cell(value):
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, 'item'):
        return _cell(value.item())
    return str(value)


def write_output(directory, filename, content):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, filename)
    with open(path, 'wb') as handle:
        handle.write(content)
    return path
