import math

from rest_framework import serializers

from ..koch.renderers import MAX_TRACES
from ..koch.serializers import DomainConfigSerializer
from ..spectral.models import CONDITIONS, DIRICHLET, INTERVAL, RECTANGLE, EigenBasis
from ..symbols.serializers import SymbolSerializer, build_symbol
from ..walker.domains import build_domain
from ..walker.models import KILL, MODES, REFLECT, BoundaryMode
from ..walker.utils import CHANGES, MIN_PATHS
from .batteries import CHECKS
from .functions import resolve_function

VERIFY = 'verify'
KOCH = 'koch'
WALK = 'walk'
SPECTRAL = 'spectral'
COMPARE = 'compare'
COMMANDS = (VERIFY, KOCH, WALK, SPECTRAL, COMPARE)

CSV = 'csv'
JSON = 'json'
SVG = 'svg'
FORMATS = (CSV, JSON, SVG)

WALK_QUANTITIES = (
    'exit_time', 'hitting_time', 'value', 'survival', 'classify', 'trap_scan',
    'sticky', 'hat', 'jump_and_stop', 'characteristic',
)
SPECTRAL_PROBLEMS = (
    'space', 'time', 'subordination', 'elliptic', 'elliptic_classical',
    'hf', 'lf', 'hbar', 'lbar',
)
BASIS_PROBLEMS = ('space', 'time', 'subordination', 'elliptic',
                  'elliptic_classical')
TIMED_PROBLEMS = ('space', 'time', 'subordination', 'hf', 'lf')
COMPARE_MODES = ('spectral', 'boundary')
BASE = 'none'

DOMAIN_TYPES = ('interval', 'half_line', 'rectangle', 'disk', 'polygon', 'koch')

# keys that never change the bytes a run writes
UNHASHED_KEYS = ('out', 'threads')


def point_field(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), min_length=1,
                                 max_length=2, **kwargs)


def positive_grid(**kwargs):
    return serializers.ListField(child=serializers.FloatField(min_value=0),
                                 min_length=1, **kwargs)


class FunctionField(serializers.JSONField):
    """A catalogue name or {"name": ..., parameters...}."""

    def to_internal_value(self, data):
        data = super().to_internal_value(data)
        resolve_function(data)
        return data


class RunConfigSerializer(serializers.Serializer):
    """
    Fields every run config shares.

    Stochastic commands refuse to run without a seed; `--seed` on the
    command line fills or overrides it.
    """
    stochastic = True
    default_formats = (CSV, JSON)

    command = serializers.ChoiceField(choices=COMMANDS, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1,
                                    required=False, allow_null=True)
    out = serializers.CharField(default='out')
    threads = serializers.IntegerField(min_value=1, required=False,
                                       allow_null=True)
    formats = serializers.ListField(
        child=serializers.ChoiceField(choices=FORMATS), required=False)

    def validate(self, data):
        if self.stochastic and data.get('seed') is None:
            raise serializers.ValidationError(
                {'seed': 'A seed is required for stochastic commands'})
        data.setdefault('formats', list(self.default_formats))
        return data


class VerifyConfigSerializer(RunConfigSerializer):
    stochastic = False
    default_formats = (JSON,)

    battery = serializers.ListField(child=serializers.CharField(),
                                    required=False, allow_null=True)
    tolerance = serializers.FloatField(min_value=0, required=False)
    tolerances = serializers.DictField(
        child=serializers.FloatField(min_value=0), required=False, default=dict)

    def validate_battery(self, value):
        unknown = [name for name in value or () if name not in CHECKS]
        if unknown:
            raise serializers.ValidationError(
                'Unknown checks: %s' % ', '.join(unknown))
        return value


class KochConfigSerializer(RunConfigSerializer):
    stochastic = False
    default_formats = (JSON, SVG)

    domain = DomainConfigSerializer()
    box_scales = serializers.ListField(
        child=serializers.FloatField(min_value=0), required=False)


class WalkDomainSerializer(serializers.Serializer):
    """Walker domain: an analytic shape, a polygon or a Koch prefractal."""
    type = serializers.ChoiceField(choices=DOMAIN_TYPES)
    lower = serializers.FloatField(required=False)
    upper = serializers.FloatField(required=False)
    bounds = serializers.ListField(child=serializers.FloatField(),
                                   min_length=4, max_length=4, required=False)
    center = point_field(required=False)
    radius = serializers.FloatField(required=False)
    vertices = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(),
                                    min_length=2, max_length=2),
        min_length=3, required=False)
    walls = serializers.ListField(required=False)
    koch = DomainConfigSerializer(required=False)

    def validate(self, data):
        if data['type'] == 'koch' and 'koch' not in data:
            raise serializers.ValidationError(
                {'koch': 'This field is required for koch domains'})
        if data['type'] == 'polygon' and 'vertices' not in data:
            raise serializers.ValidationError(
                {'vertices': 'This field is required for polygons'})
        return data

    def create(self, validated_data):
        if validated_data['type'] == 'koch':
            prefractal = DomainConfigSerializer().create(validated_data['koch'])
            return build_domain(prefractal)
        return build_domain(dict(validated_data))


class BoundarySerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=MODES, default=KILL)
    c = serializers.FloatField(default=0.0)
    sigma = serializers.FloatField(default=1.0)
    eta = serializers.FloatField(default=0.0)
    symbol = SymbolSerializer(required=False)
    space_symbol = SymbolSerializer(required=False)

    def create(self, validated_data):
        symbol = validated_data.get('symbol')
        space_symbol = validated_data.get('space_symbol')
        return BoundaryMode(
            validated_data['kind'], c=validated_data['c'],
            sigma=validated_data['sigma'], eta=validated_data['eta'],
            symbol=build_symbol(symbol) if symbol else None,
            space_symbol=build_symbol(space_symbol) if space_symbol else None,
        )


class ChangeSerializer(serializers.Serializer):
    tag = serializers.ChoiceField(choices=CHANGES)
    symbol = SymbolSerializer()
    clock_dt = serializers.FloatField(min_value=0, required=False)


class BallSerializer(serializers.Serializer):
    center = point_field()
    radius = serializers.FloatField(min_value=0)


class WalkConfigSerializer(RunConfigSerializer):
    quantity = serializers.ChoiceField(choices=WALK_QUANTITIES)
    domain = WalkDomainSerializer(required=False)
    start = point_field(required=False)
    dt = serializers.FloatField(min_value=0, default=1e-3)
    boundary = BoundarySerializer(required=False)
    edges = serializers.DictField(child=BoundarySerializer(), required=False)
    max_steps = serializers.IntegerField(min_value=1, required=False)
    n_paths = serializers.IntegerField(min_value=MIN_PATHS, default=10000)
    t_grid = positive_grid(required=False)
    function = FunctionField(required=False)
    change = ChangeSerializer(required=False)
    ball = BallSerializer(required=False)
    starts_per_side = serializers.IntegerField(min_value=1, default=4)
    xi = serializers.FloatField(default=1.0)
    traces = serializers.IntegerField(min_value=0, max_value=MAX_TRACES,
                                      default=0)
    horizon = serializers.FloatField(min_value=0, default=1.0)

    needs = {
        'value': ('domain', 'start', 't_grid', 'function'),
        'survival': ('domain', 'start', 't_grid', 'change'),
        'classify': ('domain', 'start', 'change'),
        'exit_time': ('domain', 'start'),
        'hitting_time': ('domain', 'start', 'ball'),
        'trap_scan': ('domain', 'ball'),
        'sticky': ('domain', 'start', 't_grid', 'function'),
        'hat': ('domain', 'start', 't_grid', 'function'),
        'jump_and_stop': ('domain', 'start', 't_grid', 'function'),
        'characteristic': ('t_grid', 'change'),
    }

    def validate(self, data):
        data = super().validate(data)
        missing = [name for name in self.needs[data['quantity']]
                   if name not in data]
        if missing:
            raise serializers.ValidationError(
                {name: 'This field is required for %s runs' % data['quantity']
                 for name in missing})
        if not data['dt'] > 0:
            raise serializers.ValidationError({'dt': 'must be positive'})
        return data


class BasisSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=(INTERVAL, RECTANGLE), default=INTERVAL)
    condition = serializers.ChoiceField(choices=CONDITIONS, default=DIRICHLET)
    length = serializers.FloatField(default=math.pi)
    a = serializers.FloatField(default=1.0)
    b = serializers.FloatField(default=1.0)
    modes = serializers.IntegerField(min_value=1, required=False)

    def create(self, validated_data):
        modes = validated_data.get('modes')
        if validated_data['kind'] == INTERVAL:
            return EigenBasis.interval(validated_data['length'],
                                       validated_data['condition'], modes)
        return EigenBasis.rectangle(validated_data['a'], validated_data['b'],
                                    validated_data['condition'], modes)


class SpectralConfigSerializer(RunConfigSerializer):
    stochastic = False

    problem = serializers.ChoiceField(choices=SPECTRAL_PROBLEMS)
    symbol = SymbolSerializer()
    basis = BasisSerializer(required=False)
    function = FunctionField(default='one')
    t_grid = positive_grid(required=False)
    x_grid = serializers.ListField(child=serializers.FloatField(), min_length=1)
    y_grid = serializers.ListField(child=serializers.FloatField(), min_length=1,
                                   required=False)
    coefficients = serializers.BooleanField(default=False)

    def validate(self, data):
        data = super().validate(data)
        problem = data['problem']
        if problem in BASIS_PROBLEMS and 'basis' not in data:
            raise serializers.ValidationError(
                {'basis': 'This field is required for %s problems' % problem})
        if problem in TIMED_PROBLEMS and 't_grid' not in data:
            raise serializers.ValidationError(
                {'t_grid': 'This field is required for %s problems' % problem})
        rectangle = data.get('basis', {}).get('kind') == RECTANGLE
        if rectangle and 'y_grid' not in data:
            raise serializers.ValidationError(
                {'y_grid': 'This field is required on a rectangle'})
        return data


class CompareConfigSerializer(RunConfigSerializer):
    """
    `spectral` compares walker estimates with eigenfunction solutions on
    the same (t, x) grid; `boundary` compares the two constructions of the
    sticky walker on an interval, with the η = 0 walker as a baseline.
    """
    mode = serializers.ChoiceField(choices=COMPARE_MODES, default='spectral')
    symbol = SymbolSerializer()
    spectral_symbol = SymbolSerializer(required=False)
    tag = serializers.ChoiceField(choices=CHANGES + (BASE,), default=BASE)
    basis = BasisSerializer(required=False)
    function = FunctionField(default='one')
    t_grid = positive_grid()
    x_grid = serializers.ListField(child=serializers.FloatField(), min_length=1)
    y_grid = serializers.ListField(child=serializers.FloatField(), min_length=1,
                                   required=False)
    spectral_t_grid = positive_grid(required=False)
    spectral_x_grid = serializers.ListField(child=serializers.FloatField(),
                                            required=False)
    n_paths = serializers.IntegerField(min_value=MIN_PATHS, default=10000)
    dt = serializers.FloatField(min_value=0, default=1e-3)
    clock_dt = serializers.FloatField(min_value=0, required=False)
    separation = serializers.FloatField(min_value=0, default=3.0)
    length = serializers.FloatField(min_value=0, default=1.0)
    eta = serializers.FloatField(min_value=0, default=1.0)
    sigma = serializers.FloatField(default=1.0)
    c = serializers.FloatField(min_value=0, default=0.0)
    right = serializers.ChoiceField(choices=(KILL, REFLECT), default=KILL)

    def validate(self, data):
        data = super().validate(data)
        if not data['dt'] > 0:
            raise serializers.ValidationError({'dt': 'must be positive'})
        if data['mode'] == 'spectral':
            data.setdefault('basis', BasisSerializer().to_internal_value({}))
            if data['basis']['kind'] == RECTANGLE and 'y_grid' not in data:
                raise serializers.ValidationError(
                    {'y_grid': 'This field is required on a rectangle'})
        return data
