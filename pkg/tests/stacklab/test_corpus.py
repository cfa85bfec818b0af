import os
import unittest

from stacklab import corpus, formats, gog


class TestCorpus(unittest.TestCase):

    def test_corpus_names(self):
        names = corpus.corpus_names()
        self.assertGreaterEqual(len(names), 10)
        self.assertIn("segment_z2_z3", names)
        self.assertEqual(names, sorted(names))

    def test_load_corpus(self):
        '''
        Every shipped graph parses, is connected and carries its file stem
        as name
        '''
        graphs = corpus.load_corpus()
        self.assertEqual(list(graphs), corpus.corpus_names())
        for name, g in graphs.items():
            self.assertEqual(g.name, name)
            self.assertTrue(gog.is_connected(g), name)

    def test_golden_files(self):
        paths = corpus.golden_files()
        self.assertTrue(paths)
        for path in paths:
            self.assertTrue(os.path.isfile(path))
            self.assertIn(corpus.golden_kind(path), formats.KINDS)

    def test_golden_kind(self):
        self.assertEqual(corpus.golden_kind("swap.groupoid.json"),
                         "groupoid")
        self.assertEqual(corpus.golden_kind("/x/segment_z2_z3.gog.json"),
                         "gog")

    def test_read_golden(self):
        text = corpus.read_golden("z2.group.json")
        self.assertEqual(formats.parse(text, "group").order, 2)
