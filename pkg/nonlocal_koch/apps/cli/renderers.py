from ..core.renderers import MainRenderer


class ReportRenderer(MainRenderer):
    object_label = 'report'


class DomainRenderer(MainRenderer):
    object_label = 'domain'


class RunRenderer(MainRenderer):
    object_label = 'run'


class ComparisonRenderer(MainRenderer):
    object_label = 'comparison'


def render_json(renderer_class, data, config):
    return renderer_class().render(data, renderer_context={'config': config})
