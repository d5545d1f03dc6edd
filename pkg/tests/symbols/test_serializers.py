import math

from rest_framework.exceptions import ValidationError

from nonlocal_koch.apps.symbols.models import COMPOUND_POISSON
from nonlocal_koch.apps.symbols.serializers import (
    SymbolSerializer, parse_symbol,
)
from nonlocal_koch.apps.symbols.utils import eval_phi, levy_tail
from tests.test_base import BaseTest


class TestSymbolSerializer(BaseTest):

    def test_parse_stable(self):
        self.assertEqual(parse_symbol({'kind': 'stable', 'alpha': 0.5}),
                         self.stable_half)

    def test_parse_drifted(self):
        sym = parse_symbol({'kind': 'drifted_cf', 'c': 1, 'alpha': 0.5})
        self.assertEqual(sym, self.drifted)

    def test_parse_exponential_jumps(self):
        sym = parse_symbol({
            'kind': 'compound_poisson',
            'jumps': {'law': 'exponential', 'rate': 2, 'theta': 1},
        })
        self.assertEqual(sym.kind, COMPOUND_POISSON)
        self.assertAlmostEqual(eval_phi(sym, 1.0), 1.0, places=8)

    def test_parse_mittag_leffler_jumps(self):
        sym = parse_symbol({
            'kind': 'compound_poisson',
            'jumps': {'law': 'mittag_leffler', 'rate': 1, 'alpha': 0.5, 'r': 1},
        })
        # E_{1/2}(−1) = e·erfc(1)
        self.assertAlmostEqual(levy_tail(sym, 1.0), 0.4275836, places=6)

    def test_missing_parameter(self):
        with self.assertRaises(ValidationError) as context:
            parse_symbol({'kind': 'gamma', 'a': 1})
        self.assertIn('b', context.exception.detail)

    def test_missing_jump_parameter(self):
        with self.assertRaises(ValidationError):
            parse_symbol({'kind': 'compound_poisson',
                          'jumps': {'law': 'point_mass', 'rate': 1}})

    def test_unknown_kind(self):
        serializer = SymbolSerializer(data={'kind': 'levy_flight'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('kind', serializer.errors)

    def test_representation(self):
        data = SymbolSerializer(self.gamma).data
        self.assertEqual(data['kind'], 'gamma')
        self.assertEqual(data['phi_prime_at_zero'], 0.5)
        self.assertFalse(data['finite_levy_mass'])
        stable = SymbolSerializer(self.stable_half).data
        self.assertEqual(stable['phi_prime_at_zero'], 'infinity')

    def test_point_mass(self):
        sym = parse_symbol({'kind': 'compound_poisson',
                            'jumps': {'law': 'point_mass', 'rate': 1, 'at': 2}})
        self.assertAlmostEqual(eval_phi(sym, 1.0), 1 - math.exp(-2), places=8)
