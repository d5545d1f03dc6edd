import numpy as np
from rest_framework import serializers

from .models import (
    ORIENTATIONS, OUTWARD, EnvironmentSequence, PrefractalDomain,
)
from .utils import build_domain, build_trapped_domain

SCHEDULES = ('constant', 'geometric')


class EnvironmentSerializer(serializers.Serializer):
    """
    {"ell": 3} for a fixed family, {"cycle": [2.7, 3.3]} for a periodic
    one, or {"alphabet": [2.7, 3.3], "probabilities": [0.5, 0.5]} for
    i.i.d. generations.
    """
    ell = serializers.FloatField(required=False)
    cycle = serializers.ListField(child=serializers.FloatField(),
                                  required=False, min_length=1)
    alphabet = serializers.ListField(child=serializers.FloatField(),
                                     required=False, min_length=1)
    probabilities = serializers.ListField(child=serializers.FloatField(),
                                          required=False)
    seed = serializers.IntegerField(required=False, min_value=0)

    def validate(self, data):
        given = [key for key in ('ell', 'cycle', 'alphabet') if key in data]
        if len(given) != 1:
            raise serializers.ValidationError(
                'Give exactly one of ell, cycle or alphabet')
        if 'alphabet' in data and 'probabilities' not in data:
            raise serializers.ValidationError(
                {'probabilities': 'This field is required with an alphabet'})
        return data

    def create(self, validated_data):
        if 'ell' in validated_data:
            return EnvironmentSequence.constant(validated_data['ell'])
        if 'cycle' in validated_data:
            return EnvironmentSequence.cycle(validated_data['cycle'])
        return EnvironmentSequence.iid(
            validated_data['alphabet'], validated_data['probabilities'],
            seed=validated_data.get('seed'))


class OpeningSerializer(serializers.Serializer):
    """Fraction of each mouth left open: value or value**k at level k."""
    schedule = serializers.ChoiceField(choices=SCHEDULES, default='constant')
    value = serializers.FloatField(min_value=0, max_value=1)

    def create(self, validated_data):
        value = validated_data['value']
        if validated_data['schedule'] == 'geometric':
            return lambda k: value ** k
        return lambda k: value


class DomainConfigSerializer(serializers.Serializer):
    m = serializers.IntegerField(min_value=3, default=4)
    n = serializers.IntegerField(min_value=0, max_value=8)
    orientation = serializers.ChoiceField(choices=ORIENTATIONS, default=OUTWARD)
    environment = EnvironmentSerializer()
    opening = OpeningSerializer(required=False)

    def validate(self, data):
        if 'opening' in data and data['orientation'] != OUTWARD:
            raise serializers.ValidationError(
                {'opening': 'trap walls are built on outward domains only'})
        return data

    def create(self, validated_data):
        env = EnvironmentSerializer().create(validated_data['environment'])
        if 'opening' in validated_data:
            opening = OpeningSerializer().create(validated_data['opening'])
            return build_trapped_domain(env, validated_data['n'], opening,
                                        m=validated_data['m'])
        return build_domain(validated_data['m'], env, validated_data['n'],
                            validated_data['orientation'])


def _pair(z):
    return [float(z.real), float(z.imag)]


class DomainDescriptorSerializer(serializers.Serializer):
    """JSON descriptor of a built domain: vertices, walls and metadata."""
    m = serializers.IntegerField(min_value=3)
    orientation = serializers.ChoiceField(choices=ORIENTATIONS)
    level = serializers.IntegerField(min_value=0)
    realization = serializers.ListField(child=serializers.FloatField())
    openings = serializers.ListField(child=serializers.FloatField(),
                                     required=False, default=list)
    vertices = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(),
                                    min_length=2, max_length=2),
        min_length=3)
    walls = serializers.ListField(
        child=serializers.ListField(
            child=serializers.ListField(child=serializers.FloatField(),
                                        min_length=2, max_length=2),
            min_length=2, max_length=2),
        required=False, default=list)

    def validate(self, data):
        if len(data['realization']) != data['level']:
            raise serializers.ValidationError(
                {'realization': 'one ℓ per level is required'})
        return data

    def create(self, validated_data):
        vertices = np.array([complex(x, y) for x, y in validated_data['vertices']])
        walls = np.array([[complex(*start), complex(*end)]
                          for start, end in validated_data['walls']],
                         dtype=complex).reshape(-1, 2)
        return PrefractalDomain(
            m=validated_data['m'],
            orientation=validated_data['orientation'],
            level=validated_data['level'],
            realization=tuple(validated_data['realization']),
            vertices=vertices, walls=walls,
            openings=tuple(validated_data['openings']),
        )

    def to_representation(self, instance):
        return {
            'm': instance.m,
            'orientation': instance.orientation,
            'level': instance.level,
            'realization': list(instance.realization),
            'openings': list(instance.openings),
            'sigma': instance.sigma,
            'vertices': [_pair(z) for z in instance.vertices],
            'walls': [[_pair(start), _pair(end)] for start, end in instance.walls],
        }
