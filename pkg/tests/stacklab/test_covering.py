import dataclasses
import unittest
import unittest.mock as mock

from fractions import Fraction

from stacklab import covering as cov
from stacklab import gog
from stacklab.corpus import load_corpus_gog
from stacklab.errors import CapExceeded, InvalidAction, StacklabError
from stacklab.groups import GroupHom


class TestActions(unittest.TestCase):

    def get_modular(self) -> cov.Pi1Action:
        '''
        Helper to return Z2 * Z3 acting on three points through S3
        '''
        g = load_corpus_gog("segment_z2_z3")
        return cov.Pi1Action(gog.pi1_presentation(g), 3,
                             {"a": (1, 0, 2), "b": (1, 2, 0)})

    def get_swap(self) -> cov.Pi1Action:
        g = load_corpus_gog("dinfty")
        return cov.Pi1Action(gog.pi1_presentation(g), 2,
                             {"a": (1, 0), "b": (1, 0)})

    def test_apply(self):
        a = self.get_modular()

        self.assertEqual(a.permutation((("a", 1), ("b", 1))), (2, 1, 0))
        self.assertEqual(a.apply((("b", -1),), 0), 2)
        self.assertEqual(a.key(), (3, ((1, 0, 2), (1, 2, 0))))

    def test_validate_action(self):
        self.assertEqual(cov.validate_action(self.get_modular()), (True, None))

        pres = self.get_modular().presentation
        ok, rel = cov.validate_action(cov.Pi1Action(
            pres, 3, {"a": (1, 2, 0), "b": (1, 2, 0)}))
        self.assertFalse(ok)
        self.assertEqual(gog.render_symbols(rel.relator()), "a^2")

    def test_rejects_non_permutations(self):
        '''
        Assert malformed images make validate_action false without raising,
        while covering_from_action refuses them
        '''
        pres = self.get_modular().presentation
        repeated = cov.Pi1Action(pres, 3, {"a": (0, 0, 1), "b": (1, 2, 0)})
        missing = cov.Pi1Action(pres, 3, {"a": (1, 0, 2)})

        self.assertEqual(cov.validate_action(repeated), (False, None))
        self.assertEqual(cov.validate_action(missing), (False, None))
        self.assertEqual(cov.malformed_generator(repeated), "a")
        self.assertEqual(cov.malformed_generator(missing), "b")
        self.assertIsNone(cov.malformed_generator(self.get_modular()))

        with self.assertRaises(InvalidAction) as ctx:
            cov.covering_from_action(pres.graph, repeated)
        self.assertIn("not a permutation", str(ctx.exception))

    def test_rejects_repeated_images_on_dinfty(self):
        swap = self.get_swap()
        collapsed = cov.Pi1Action(swap.presentation, 2,
                                  {"a": (0, 0), "b": (1, 0)})

        self.assertEqual(cov.validate_action(collapsed), (False, None))

    def test_orbits_and_sums(self):
        swap = self.get_swap()
        one = cov.Pi1Action(swap.presentation, 1, {"a": (0,), "b": (0,)})

        both = cov.direct_sum(swap, one)

        self.assertEqual(both.images, {"a": (1, 0, 2), "b": (1, 0, 2)})
        self.assertEqual(cov.orbits(both), [[0, 1], [2]])
        self.assertFalse(cov.is_connected_cover(both))
        self.assertTrue(cov.is_connected_cover(swap))

    def test_actions_conjugate(self):
        a = self.get_modular()
        relabelled = cov.Pi1Action(a.presentation, 3,
                                   {"a": (0, 2, 1), "b": (2, 0, 1)})
        other = cov.Pi1Action(a.presentation, 3,
                              {"a": (0, 1, 2), "b": (1, 2, 0)})

        self.assertTrue(cov.actions_conjugate(a, relabelled))
        self.assertFalse(cov.actions_conjugate(a, other))
        self.assertFalse(cov.actions_conjugate(a, self.get_swap()))
        self.assertEqual(cov.canonical_action(a).key(),
                         cov.canonical_action(relabelled).key())

    def test_enumerate_actions(self):
        pres = self.get_modular().presentation

        found = cov.enumerate_actions(pres, 3)

        self.assertEqual([a.degree for a in found], [1, 2, 3, 3])
        for a in found:
            self.assertTrue(cov.validate_action(a)[0])
            self.assertTrue(cov.is_connected_cover(a))

    def test_enumeration_counts(self):
        circle = gog.pi1_presentation(load_corpus_gog("circle"))
        point = gog.pi1_presentation(load_corpus_gog("point"))

        self.assertEqual(len(cov.enumerate_actions(circle, 2)), 2)
        self.assertEqual(len(cov.enumerate_actions(
            self.get_swap().presentation, 2)), 4)
        self.assertEqual(len(cov.enumerate_actions(point, 4)), 1)

    def test_enumeration_cap(self):
        pres = self.get_modular().presentation

        with self.assertRaises(CapExceeded):
            cov.enumerate_actions(pres, 3, cap=2)
        with mock.patch('stacklab.covering.get_params',
                        return_value={'max_degree': 2}):
            with self.assertRaises(CapExceeded):
                cov.enumerate_actions(pres, 3)


class TestCovers(unittest.TestCase):

    def get_modular(self) -> cov.Pi1Action:
        g = load_corpus_gog("segment_z2_z3")
        return cov.Pi1Action(gog.pi1_presentation(g), 3,
                             {"a": (1, 0, 2), "b": (1, 2, 0)})

    def test_circle_over_dinfty(self):
        g = load_corpus_gog("dinfty")
        a = cov.Pi1Action(gog.pi1_presentation(g), 2,
                          {"a": (1, 0), "b": (1, 0)})

        c = cov.covering_from_action(g, a)

        self.assertEqual(c.total.vertex_ids, ["v1.0", "v2.0"])
        self.assertEqual(c.total.edge_ids, ["e1.0", "e1.1"])
        self.assertEqual({v.group.order for v in c.total.vertices}, {1})
        self.assertEqual(gog.betti_number(c.total), 1)
        self.assertEqual(c.total.basepoint, "v1.0")
        self.assertEqual(c.degree, 2)

    def test_modular_cover(self):
        a = self.get_modular()
        g = a.presentation.graph

        c = cov.covering_from_action(g, a)

        self.assertEqual(sorted(c.total.group(u).order for u in c.over("v1")),
                         [1, 2])
        self.assertEqual(c.over("v2"), ["v2.0"])
        self.assertEqual(len(c.total.edges), 3)
        self.assertEqual(gog.euler_characteristic(c.total), Fraction(-1, 2))
        self.assertTrue(cov.cover_euler_check(c))
        self.assertEqual(c.components(), [c.total.vertex_ids])

    def test_monodromy_round_trip(self):
        for name in ("segment_z2_z3", "hnn_z2", "theta"):
            g = load_corpus_gog(name)
            pres = gog.pi1_presentation(g)
            for a in cov.enumerate_actions(pres, 3):
                c = cov.covering_from_action(g, a)
                self.assertTrue(cov.actions_conjugate(cov.monodromy(c), a),
                                f"{name}: {a.images}")

    def test_disconnected_cover(self):
        g = load_corpus_gog("dinfty")
        one = cov.Pi1Action(gog.pi1_presentation(g), 1,
                            {"a": (0,), "b": (0,)})

        c = cov.covering_from_action(g, cov.direct_sum(one, one))

        self.assertEqual(len(c.components()), 2)
        self.assertEqual(cov.monodromy(c).images,
                         {"a": (0, 1), "b": (0, 1)})

    def test_invalid_action(self):
        a = self.get_modular()
        bad = cov.Pi1Action(a.presentation, 3,
                            {"a": (1, 2, 0), "b": (1, 2, 0)})

        with self.assertRaises(InvalidAction) as ctx:
            cov.covering_from_action(a.presentation.graph, bad)
        self.assertEqual(ctx.exception.relation, "a^2")
        with self.assertRaises(InvalidAction):
            cov.covering_from_action(load_corpus_gog("segment_z2_z3"), a)

    def test_inertia_cartesian_check(self):
        a = self.get_modular()
        g = a.presentation.graph

        self.assertEqual([cov.inertia_cartesian_check(g, a, "v1", p)
                          for p in range(3)], [True] * 3)
        with self.assertRaises(StacklabError):
            cov.inertia_cartesian_check(g, a, "v1", 3)

    def test_inertia_cartesian_check_reads_cover_groups(self):
        '''
        Assert the check uses the covering vertex groups: collapsing the
        embedding of the Z2 vertex over v1 breaks it only at its point
        '''
        a = self.get_modular()
        g = a.presentation.graph
        c = cov.covering_from_action(g, a)
        uid = next(u for u in c.over("v1") if c.total.group(u).order == 2)
        emb = c.vertex_embeddings[uid]
        collapsed = dict(c.vertex_embeddings)
        collapsed[uid] = GroupHom(emb.domain, emb.codomain,
                                  (0,) * emb.domain.order)
        tampered = dataclasses.replace(c, vertex_embeddings=collapsed)
        fixed = c.vertex_points[uid]
        moved = next(p for p in range(3) if p != fixed)

        with mock.patch('stacklab.covering.covering_from_action',
                        return_value=tampered):
            self.assertFalse(cov.inertia_cartesian_check(g, a, "v1", fixed))
            self.assertTrue(cov.inertia_cartesian_check(g, a, "v1", moved))

    def test_universal_cover_ball(self):
        g = load_corpus_gog("segment_z2_z3")

        self.assertEqual(cov.universal_cover_ball(g, 2).number_of_nodes(), 7)

    def test_torsion_free_cover(self):
        c = cov.torsion_free_cover(load_corpus_gog("dinfty"), 2)

        self.assertEqual(c.degree, 2)
        self.assertEqual({v.group.order for v in c.total.vertices}, {1})
        self.assertIsNone(cov.torsion_free_cover(
            load_corpus_gog("segment_z2_z3"), 3))
