import unittest

from fractions import Fraction

from stacklab import gog
from stacklab import groups as grp
from stacklab.corpus import load_corpus_gog
from stacklab.errors import (DisconnectedGraph, InvalidGroup,
                             NonInjectiveInclusion, StacklabError,
                             UnknownObject)


class TestGraphOfGroups(unittest.TestCase):

    def test_segment(self):
        z2, z3, one = (grp.cyclic_group(2), grp.cyclic_group(3),
                       grp.trivial_group())

        g = gog.segment(z2, z3, one, [0], [0])

        self.assertEqual(g.vertex_ids, ["v1", "v2"])
        self.assertEqual(g.edge_ids, ["e1"])
        self.assertEqual(g.basepoint, "v1")
        self.assertEqual(g.group("v2"), z3)
        self.assertEqual(g.leaving("v2"), [("e1", -1)])

    def test_loop_leaves_both_ways(self):
        g = load_corpus_gog("hnn_z2")

        self.assertEqual(g.leaving("v1"), [("e1", 1), ("e1", -1)])
        e = g.edge("e1")
        self.assertEqual((e.start(-1), e.end(-1)), ("v1", "v1"))

    def test_rejects_non_injective(self):
        z2 = grp.cyclic_group(2)

        with self.assertRaises(NonInjectiveInclusion) as ctx:
            gog.segment(z2, z2, z2, [0, 0], [0, 1])
        self.assertEqual(ctx.exception.vertex, "v1")
        self.assertEqual(ctx.exception.kernel, [0, 1])

    def test_rejects_non_homomorphism(self):
        z3 = grp.cyclic_group(3)

        with self.assertRaises(InvalidGroup):
            gog.segment(z3, z3, z3, [0, 1, 1], [0, 1, 2])

    def test_rejects_bad_ids(self):
        z2 = grp.cyclic_group(2)
        v = gog.VertexGroup("v1", z2)

        with self.assertRaises(StacklabError):
            gog.GraphOfGroups([v, v], [])
        with self.assertRaises(UnknownObject):
            gog.GraphOfGroups([v], [], basepoint="v9")
        with self.assertRaises(UnknownObject):
            gog.GraphOfGroups([v], []).edge("e1")

    def test_underlying_graph(self):
        theta = load_corpus_gog("theta")

        graph = gog.coarse_graph(theta)

        self.assertEqual(graph.number_of_edges(), 2)
        self.assertEqual(graph.nodes["v1"]["order"], 2)
        self.assertTrue(gog.is_connected(theta))
        self.assertEqual(gog.betti_number(theta), 1)
        self.assertEqual(gog.betti_number(load_corpus_gog("dinfty")), 0)
        self.assertEqual(gog.betti_number(load_corpus_gog("triangle")), 1)

    def test_disconnected(self):
        z2 = grp.cyclic_group(2)
        g = gog.GraphOfGroups([gog.VertexGroup("v1", z2),
                               gog.VertexGroup("v2", z2)], [])

        self.assertFalse(gog.is_connected(g))
        with self.assertRaises(DisconnectedGraph):
            gog.pi1_presentation(g)

    def test_euler_characteristic(self):
        cases = {
            "segment_z2_z3": Fraction(-1, 6),
            "weighted_4_6": Fraction(-1, 12),
            "circle": Fraction(0),
            "point": Fraction(1),
        }

        for name, chi in cases.items():
            self.assertEqual(gog.euler_characteristic(load_corpus_gog(name)),
                             chi, name)

    def test_residue_gerbes(self):
        gerbes = gog.residue_gerbes(load_corpus_gog("weighted_4_6"))

        self.assertEqual({k: v.order for k, v in gerbes.items()},
                         {("vertex", "v1"): 4, ("vertex", "v2"): 6,
                          ("edge", "e1"): 2})


class TestPresentation(unittest.TestCase):

    def test_texts(self):
        cases = {
            "segment_z2_z3": "<a, b | a^2, b^3>",
            "circle": "<t | >",
            "hnn_z2": "<a, t | a^2, t a t^-1 = a>",
            "theta": "<a, b, t | a^2, b^2>",
            "point": "< | >",
        }

        for name, text in cases.items():
            pres = gog.pi1_presentation(load_corpus_gog(name))
            self.assertEqual(pres.text(), text, name)

    def test_spanning_tree(self):
        pres = gog.pi1_presentation(load_corpus_gog("triangle"))

        self.assertEqual(pres.tree, ("e1", "e3"))
        self.assertEqual(pres.parent["v3"], ("e3", -1))
        self.assertEqual(pres.stable, {"e2": "t"})
        self.assertEqual(pres.symbols["t"], ("t", "e2", 1))
        self.assertEqual(gog.tree_path(pres, "v3"), [("e", "e3", -1)])

    def test_basepoint_override(self):
        g = load_corpus_gog("segment_z2_z3")

        pres = gog.pi1_presentation(g, basepoint="v2")

        self.assertEqual(pres.basepoint, "v2")
        self.assertEqual(pres.parent["v1"], ("e1", -1))

    def test_vertex_word(self):
        pres = gog.pi1_presentation(load_corpus_gog("segment_z2_z3"))

        self.assertEqual(pres.vertex_word("v2", 2), (("b", 1), ("b", 1)))
        self.assertEqual(pres.vertex_word("v1", 0), ())

    def test_render_symbols(self):
        self.assertEqual(gog.render_symbols((("a", 1), ("a", 1), ("t", -1))),
                         "a^2 t^-1")
        self.assertEqual(gog.render_symbols((("a", 1), ("a", -1))), "1")
        self.assertEqual(gog.render_symbols(()), "1")

    def test_relator(self):
        rel = gog.Relation("stable", (("t", 1), ("a", 1), ("t", -1)),
                           (("a", 1),))

        self.assertEqual(rel.relator(),
                         (("t", 1), ("a", 1), ("t", -1), ("a", -1)))

    def test_abelianization(self):
        cases = {
            "segment_z2_z3": (0, [6]),
            "dinfty": (0, [2, 2]),
            "hnn_z2": (1, [2]),
            "hnn_z4_twist": (1, [2]),
            "theta": (1, [2, 2]),
            "circle": (1, []),
            "point": (0, []),
        }

        for name, expected in cases.items():
            pres = gog.pi1_presentation(load_corpus_gog(name))
            self.assertEqual(gog.abelianization(pres), expected, name)

    def test_weighted_segments(self):
        got = [gog.abelianization(gog.pi1_presentation(
            gog.weighted_segment(m, n))) for m, n in ((2, 3), (4, 6), (6, 9))]

        self.assertEqual(got, [(0, [6]), (0, [12]), (0, [18])])
        self.assertEqual(gog.weighted_segment(4, 6).edges[0].incl_v.image,
                         (0, 2))


class TestInertiaGog(unittest.TestCase):

    def test_z2_identity_segment(self):
        ig = gog.inertia_gog(load_corpus_gog("z2_identity_segment"))

        self.assertEqual(ig.vertex_ids, ["v1:0", "v1:1", "v2:0", "v2:1"])
        self.assertEqual(ig.edge_ids, ["e1:0", "e1:1"])
        self.assertEqual(ig.basepoint, "v1:0")
        self.assertEqual((ig.edge("e1:1").v, ig.edge("e1:1").w),
                         ("v1:1", "v2:1"))

    def test_s3_identity_segment(self):
        ig = gog.inertia_gog(load_corpus_gog("s3_identity_segment"))

        self.assertEqual(len(ig.vertices), 6)
        self.assertEqual(sorted(e.group.order for e in ig.edges), [2, 3, 6])
        self.assertEqual(sorted(v.group.order for v in ig.vertices),
                         [2, 2, 3, 3, 6, 6])

    def test_amalgam(self):
        ig = gog.inertia_gog(load_corpus_gog("s3_amalgam"))

        self.assertEqual(len(ig.vertices), 6)
        self.assertEqual(ig.edge_ids, ["e1:0", "e1:1"])
        self.assertEqual(ig.edge("e1:1").w, "v2:2")
