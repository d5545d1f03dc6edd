import numpy as np
from rest_framework import serializers

from .models import (
    CAPUTO_FABRIZIO, COMPOUND_POISSON, DRIFTED_CF, GAMMA, KINDS, LINEAR,
    STABLE, TELEGRAPH_SUM, TEMPERED, BernsteinSymbol, is_infinite,
)
from .utils import (
    exponential_jump_law, mittag_leffler_jump_law, phi_prime_at_zero,
    symbol_from_jump_law, truncated_power_law,
)

JUMP_LAWS = ('exponential', 'mittag_leffler', 'point_mass',
             'truncated_power_law')

REQUIRED_FIELDS = {
    STABLE: ('alpha',),
    GAMMA: ('a', 'b'),
    CAPUTO_FABRIZIO: ('alpha',),
    DRIFTED_CF: ('c', 'alpha'),
    TELEGRAPH_SUM: ('alpha',),
    TEMPERED: ('mu',),
    COMPOUND_POISSON: ('jumps',),
    LINEAR: (),
}


class JumpLawSerializer(serializers.Serializer):
    law = serializers.ChoiceField(choices=JUMP_LAWS)
    rate = serializers.FloatField(required=False, min_value=0)
    theta = serializers.FloatField(required=False, min_value=0)
    alpha = serializers.FloatField(required=False)
    r = serializers.FloatField(required=False)
    at = serializers.FloatField(required=False)
    n = serializers.FloatField(required=False)

    def validate(self, data):
        needed = {
            'exponential': ('rate', 'theta'),
            'mittag_leffler': ('rate', 'alpha', 'r'),
            'point_mass': ('rate', 'at'),
            'truncated_power_law': ('alpha', 'n'),
        }[data['law']]
        missing = [name for name in needed if name not in data]
        if missing:
            raise serializers.ValidationError(
                {name: 'This field is required for %s jumps' % data['law']
                 for name in missing})
        return data


class SymbolSerializer(serializers.Serializer):
    """
    JSON form of a Bernstein symbol, e.g. {"kind": "stable", "alpha": 0.5}.

    Compound Poisson symbols name their jump law:
    {"kind": "compound_poisson", "jumps": {"law": "exponential",
    "rate": 2, "theta": 1}}.
    """
    kind = serializers.ChoiceField(choices=KINDS)
    alpha = serializers.FloatField(required=False)
    a = serializers.FloatField(required=False)
    b = serializers.FloatField(required=False)
    c = serializers.FloatField(required=False)
    mu = serializers.FloatField(required=False)
    jumps = JumpLawSerializer(required=False)

    def validate(self, data):
        missing = [name for name in REQUIRED_FIELDS[data['kind']]
                   if name not in data]
        if missing:
            raise serializers.ValidationError(
                {name: 'This field is required for %s symbols' % data['kind']
                 for name in missing})
        return data

    def create(self, validated_data):
        return build_symbol(validated_data)

    def to_representation(self, instance):
        if not isinstance(instance, BernsteinSymbol):
            return super().to_representation(instance)
        representation = {'kind': instance.kind}
        for name in ('alpha', 'a', 'b', 'c', 'mu', 'rate'):
            value = getattr(instance, name)
            if value is not None:
                representation[name] = value
        if instance.label:
            representation['label'] = instance.label
        prime = phi_prime_at_zero(instance)
        representation['phi_prime_at_zero'] = (
            'infinity' if is_infinite(prime) else prime)
        representation['finite_levy_mass'] = instance.finite_levy_mass
        return representation


def build_symbol(data):
    kind = data['kind']
    if kind == STABLE:
        return BernsteinSymbol.stable(data['alpha'])
    if kind == GAMMA:
        return BernsteinSymbol.gamma(data['a'], data['b'])
    if kind == CAPUTO_FABRIZIO:
        return BernsteinSymbol.caputo_fabrizio(data['alpha'])
    if kind == DRIFTED_CF:
        return BernsteinSymbol.drifted_cf(data['c'], data['alpha'])
    if kind == TELEGRAPH_SUM:
        return BernsteinSymbol.telegraph_sum(data['alpha'])
    if kind == TEMPERED:
        return BernsteinSymbol.tempered(data['mu'])
    if kind == COMPOUND_POISSON:
        return _build_jump_law(data['jumps'])
    return BernsteinSymbol.linear()


def _build_jump_law(jumps):
    law = jumps['law']
    if law == 'exponential':
        return exponential_jump_law(jumps['rate'], jumps['theta'])
    if law == 'mittag_leffler':
        return mittag_leffler_jump_law(jumps['rate'], jumps['alpha'], jumps['r'])
    if law == 'point_mass':
        at = jumps['at']
        return symbol_from_jump_law(
            jumps['rate'], lambda y: 1.0 if y < at else 0.0,
            jump_sampler=lambda rng, size: _constant(at, size),
            mean_jump=at, breakpoints=(at,), label='point_mass_jumps',
        )
    return truncated_power_law(jumps['alpha'], jumps['n'])


def _constant(value, size):
    return np.full(size, float(value))


def parse_symbol(data):
    """Validate a JSON symbol description and build the symbol."""
    serializer = SymbolSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
