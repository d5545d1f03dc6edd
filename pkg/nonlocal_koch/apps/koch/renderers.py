import logging

from ..core.renderers import provenance

logger = logging.getLogger(__name__)

MAX_TRACES = 100


def _points(values):
    # SVG y grows downwards
    return ' '.join('%r,%r' % (float(z.real), float(-z.imag)) for z in values)


class SVGRenderer:
    """
    Boundary, walls and optional walker traces as a standalone SVG file.

    The viewBox is the bounding box of the geometry plus a small margin.
    """
    charset = 'utf-8'
    margin = 0.02
    boundary_style = 'fill="none" stroke="black" stroke-width="{w}"'
    wall_style = 'fill="none" stroke="crimson" stroke-width="{w}"'
    trace_style = 'fill="none" stroke="steelblue" stroke-opacity="0.6" stroke-width="{w}"'

    def render(self, domain, traces=(), config=None):
        traces = list(traces)
        if len(traces) > MAX_TRACES:
            logger.warning('only the first %d of %d traces are drawn',
                           MAX_TRACES, len(traces))
            traces = traces[:MAX_TRACES]
        min_x, min_y, max_x, max_y = domain.bounding_box
        width, height = max_x - min_x, max_y - min_y
        pad = self.margin * max(width, height)
        stroke = 0.002 * max(width, height)
        lines = ['<?xml version="1.0" encoding="UTF-8"?>']
        if config is not None:
            lines.append('<!-- config_hash={config_hash} version={version} -->'
                         .format(**provenance(config)))
        lines.append(
            '<svg xmlns="http://www.w3.org/2000/svg" viewBox="%r %r %r %r">' % (
                min_x - pad, -max_y - pad, width + 2 * pad, height + 2 * pad))
        lines.append('<polygon points="%s" %s/>' % (
            _points(domain.vertices), self.boundary_style.format(w=stroke)))
        for start, end in domain.walls:
            lines.append('<polyline points="%s" %s/>' % (
                _points((start, end)), self.wall_style.format(w=stroke)))
        for trace in traces:
            lines.append('<polyline points="%s" %s/>' % (
                _points(trace), self.trace_style.format(w=stroke / 2)))
        lines.append('</svg>')
        return ('\n'.join(lines) + '\n').encode(self.charset)
