import os
import unittest
from unittest import mock

from stacklab import config


class TestConfig(unittest.TestCase):

    def test_get_config(self):
        '''
        Assert `config` dict contains the expected environment keys
        '''
        expected = {'cap'}
        actual = set(config.get_config().keys())

        self.assertEqual(expected, actual)

    @mock.patch.dict(os.environ, {'STACKLAB_CAP': '10'})
    def test_get_config_reads_env(self):
        self.assertEqual(config.get_config()['cap'], 10)

    @mock.patch.dict(os.environ, {}, clear=True)
    def test_get_config_default(self):
        self.assertEqual(config.get_config()['cap'], config.DEFAULT_CAP)

    def test_get_params(self):
        '''
        Assert `params` dict contains the search and oracle bounds, all ints
        '''
        expected_keys = {"table_order", "iso_order", "iso_gens",
                         "max_degree", "oracle_objects", "oracle_arrows",
                         "words", "word_length", "random_groupoids",
                         "workers", "seed"}

        actual = config.get_params()

        self.assertEqual(expected_keys, set(actual.keys()))
        for v in actual.values():
            self.assertIsInstance(v, int)
        self.assertGreaterEqual(actual['words'], 10_000)
        self.assertGreaterEqual(actual['random_groupoids'], 100)

    @mock.patch.dict(os.environ, {'STACKLAB_CAP': '7'})
    def test_get_cap(self):
        self.assertEqual(config.get_cap(), 7)
        self.assertEqual(config.get_cap(3), 3)
        self.assertIsInstance(config.get_cap(), int)
