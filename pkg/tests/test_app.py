"""
Unit tests for the JSON API

Tests cover:
- Factorization, roots and splits endpoints
- Basis construction and split validation
- Verification reports
- Error responses
"""

import unittest
import json
from pathlib import Path
import sys

# Add parent directory to path to import app
sys.path.insert(0, str(Path(__file__).parent.parent))

from app import app


class TestApi(unittest.TestCase):
    """Test suite for the representation API."""

    def setUp(self):
        """Set up test client."""
        self.app = app
        self.app.config['TESTING'] = True
        self.client = self.app.test_client()

    def get_json(self, url, status=200):
        response = self.client.get(url)
        self.assertEqual(response.status_code, status)
        return json.loads(response.data)

    def test_index_lists_checks(self):
        data = self.get_json('/')
        self.assertIn('/api/factor/<M>', data['endpoints'])
        self.assertIn('unit-root-set', data['checks'])

    def test_factor(self):
        data = self.get_json('/api/factor/105')
        self.assertEqual([c['m'] for c in data['constituents']], [3, 5, 7])
        self.assertEqual([c['L'] for c in data['constituents']], [35, 21, 15])

    def test_roots(self):
        data = self.get_json('/api/roots/105')
        self.assertEqual([r['a'] for r in data['roots']], [1, 29, 34, 41, 64, 71, 76, 104])
        by_value = {r['a']: r for r in data['roots']}
        self.assertEqual(by_value[76]['split'], [7, 15])
        self.assertEqual(by_value[76]['signs'], [1, 1, -1])

    def test_exotic_roots_have_no_split(self):
        data = self.get_json('/api/roots/24')
        exotic = [r for r in data['roots'] if not r['sign_root']]
        self.assertEqual(len(exotic), 4)
        self.assertTrue(all(r['split'] is None for r in exotic))

    def test_splits(self):
        data = self.get_json('/api/splits/2310')
        self.assertEqual(len(data['splits']), 16)

    def test_basis(self):
        data = self.get_json('/api/basis/6?type=kq&split=2,3')
        self.assertEqual(data['kind'], 'kq')
        self.assertEqual(len(data['states']), 6)
        self.assertTrue(data['one_based'])

    def test_basis_zero_based(self):
        data = self.get_json('/api/basis/6?type=q1q2&split=2,3&zero_based=true')
        self.assertEqual(data['states'][0]['label'], [0, 0])
        self.assertEqual(data['states'][0]['support'], [0])

    def test_basis_rejects_non_coprime_split(self):
        data = self.get_json('/api/basis/12?type=kq&split=2,6', status=400)
        self.assertIn('relatively prime', data['error'])

    def test_basis_requires_type(self):
        data = self.get_json('/api/basis/12', status=400)
        self.assertIn('type', data['error'])

    def test_basis_rejects_malformed_split(self):
        self.get_json('/api/basis/12?type=kq&split=three,four', status=400)

    def test_check(self):
        data = self.get_json('/api/check/15?checks=clock-shift-commutator,kq-generation')
        self.assertEqual(data['summary']['pass'], 2)
        self.assertEqual(data['summary']['fail'], 0)

    def test_check_unknown_id(self):
        data = self.get_json('/api/check/15?checks=nope', status=400)
        self.assertIn('nope', data['error'])

    def test_products(self):
        data = self.get_json('/api/products/105')
        self.assertEqual(len(data['products']), 8)

    def test_invalid_modulus(self):
        self.get_json('/api/factor/0', status=400)
        self.get_json('/api/products/1', status=400)


if __name__ == '__main__':
    unittest.main()
