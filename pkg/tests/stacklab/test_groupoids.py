import unittest

from stacklab import groupoids as gpd
from stacklab import groups as grp
from stacklab.errors import (NotAnAction, SizeCapExceeded, StacklabError,
                             UnknownObject, ValidationError)


class TestGroupoids(unittest.TestCase):

    def get_swap(self) -> gpd.FiniteGroupoid:
        '''
        Helper to return Z2 swapping two points; arrows 0: a -> a,
        1: b -> b, 2: a -> b, 3: b -> a
        '''
        flip = {"a": "b", "b": "a"}
        return gpd.action_groupoid(grp.cyclic_group(2), ["a", "b"],
                                   lambda g, x: x if g == 0 else flip[x])

    def get_bs3(self) -> gpd.FiniteGroupoid:
        return gpd.classifying_groupoid(grp.symmetric_group(3))

    def test_action_groupoid(self):
        swap = self.get_swap()

        self.assertEqual(swap.objects, ("a", "b"))
        self.assertEqual(swap.src, (0, 1, 0, 1))
        self.assertEqual(swap.tgt, (0, 1, 1, 0))
        self.assertEqual(swap.identities, (0, 1))
        self.assertEqual(swap.compose(2, 3), 0)
        self.assertEqual(swap.inverse(2), 3)
        self.assertEqual(swap.arrow_labels[2], (1, "a"))
        self.assertTrue(gpd.validate_groupoid(swap).ok)

    def test_action_groupoid_rejects_non_actions(self):
        z2 = grp.cyclic_group(2)

        with self.assertRaises(NotAnAction):
            gpd.action_groupoid(z2, ["a", "b"], lambda g, x: "b")
        with self.assertRaises(NotAnAction):
            gpd.action_groupoid(z2, ["a"], lambda g, x: "c")

    def test_permutation_action(self):
        gen = grp.perm_from_cycles([[1, 2, 3], [4, 5, 6]], 6)
        z3 = grp.group_from_permutations("Z3", 6, [gen])
        points, act = gpd.permutation_action(z3)

        g = gpd.action_groupoid(z3, points, act)

        self.assertEqual(g.n_arrows, 18)
        self.assertEqual(gpd.pi0(g), [[0, 1, 2], [3, 4, 5]])
        self.assertEqual(gpd.isotropy_orders(g), [1] * 6)

        with self.assertRaises(StacklabError):
            gpd.permutation_action(grp.cyclic_group(3))

    def test_validate_groupoid(self):
        broken = gpd.FiniteGroupoid(["x"], [0, 0], [0, 0],
                                    {(0, 0): 0, (0, 1): 1, (1, 0): 1}, [0])

        report = gpd.validate_groupoid(broken)

        self.assertFalse(report.ok)
        self.assertEqual(report.violations[0].axiom, "compose-domain")
        self.assertEqual(report.violations[0].witness, (1, 1))
        self.assertTrue(report.lines()[0].startswith("compose-domain"))

    def test_validate_bad_identity(self):
        g = gpd.FiniteGroupoid(["x", "y"], [0, 1], [1, 1],
                               {(0, 1): 0, (1, 1): 1}, [0, 1])

        report = gpd.validate_groupoid(g)

        self.assertEqual(report.violations[0].axiom, "identity")
        self.assertEqual(len(report), 1)

    def test_classifying_groupoid(self):
        bs3 = self.get_bs3()

        self.assertEqual(bs3.objects, ("*",))
        self.assertEqual(bs3.name, "BS3")
        self.assertEqual(bs3.n_arrows, 6)
        self.assertTrue(gpd.validate_groupoid(bs3).ok)

        with self.assertRaises(SizeCapExceeded):
            gpd.classifying_groupoid(grp.symmetric_group(3), cap=5)

    def test_unit_groupoid(self):
        u = gpd.unit_groupoid(3)

        self.assertEqual(u.name, "unit3")
        self.assertEqual(u.identities, (0, 1, 2))
        self.assertEqual(gpd.unit_groupoid(["p", "q"]).objects, ("p", "q"))

    def test_index_of(self):
        with self.assertRaises(UnknownObject):
            self.get_swap().index_of("c")

    def test_isotropy(self):
        iso = gpd.isotropy(self.get_bs3(), "*")

        self.assertEqual(iso.order, 6)
        self.assertEqual(iso, grp.symmetric_group(3))
        self.assertEqual(gpd.isotropy(self.get_swap(), "b").order, 1)

    def test_orbits_and_coarse_space(self):
        swap = self.get_swap()
        g = gpd.disjoint_union([swap, self.get_bs3()])

        self.assertEqual(gpd.orbit(swap, "a"), ["a", "b"])
        self.assertEqual(gpd.pi0(g), [[(0, "a"), (0, "b")], [(1, "*")]])
        classes, proj = gpd.coarse_space(g)
        self.assertEqual(classes, [0, 1])
        self.assertEqual(proj[(0, "b")], 0)
        self.assertEqual(proj[(1, "*")], 1)

    def test_restrict_and_include(self):
        swap = self.get_swap()

        r = gpd.restrict_groupoid(swap, ["b"])
        self.assertEqual(r.objects, ("b",))
        self.assertEqual(r.arrow_labels, (1,))

        incl = gpd.inclusion_functor(swap, ["b"])
        self.assertEqual(incl.obj_map, (1,))
        self.assertTrue(gpd.check_functor(incl).ok)

    def test_product_groupoid(self):
        swap = self.get_swap()

        p = gpd.product_groupoid(swap, swap)

        self.assertEqual(p.n_objects, 4)
        self.assertEqual(p.n_arrows, 16)
        self.assertTrue(gpd.validate_groupoid(p).ok)
        self.assertTrue(gpd.check_functor(gpd.diagonal_functor(swap)).ok)

    def test_functor(self):
        swap = self.get_swap()
        point = gpd.unit_groupoid(["*"])

        f = gpd.functor(swap, point, {"a": "*", "b": "*"}, [0, 0, 0, 0])
        self.assertEqual(f.obj_map, (0, 0))

        with self.assertRaises(ValidationError):
            gpd.functor(point, swap, {"*": "a"}, [2])

    def test_compose_functors(self):
        swap = self.get_swap()
        ident = gpd.identity_functor(swap)
        incl = gpd.inclusion_functor(swap, ["a"])

        f = gpd.compose_functors(incl, ident)

        self.assertEqual(f.obj_map, incl.obj_map)
        self.assertEqual(f.arr_map, incl.arr_map)

    def test_hom_functor(self):
        z2 = grp.cyclic_group(2)
        s3 = grp.symmetric_group(3)
        f = gpd.hom_functor(grp.group_hom(z2, s3, [0, 2]))

        self.assertEqual(f.arr_map, (0, 2))
        self.assertTrue(gpd.check_functor(f).ok)

    def test_natural_transformation(self):
        s3 = grp.symmetric_group(3)
        bs3 = self.get_bs3()
        ident = gpd.identity_functor(bs3)

        for x in s3.elements():
            conj = gpd.hom_functor(grp.conjugation_hom(grp.identity_hom(s3),
                                                       s3.inv(x)))
            nt = gpd.NaturalTransformation(ident, conj, (x,))
            self.assertTrue(gpd.check_natural_transformation(nt))

        wrong = gpd.hom_functor(grp.conjugation_hom(grp.identity_hom(s3), 2))
        nt = gpd.NaturalTransformation(ident, wrong, (0,))
        self.assertFalse(gpd.check_natural_transformation(nt))
        self.assertTrue(gpd.check_natural_transformation(
            gpd.identity_transformation(ident)))

    def test_classifying_homotopy(self):
        z2 = grp.cyclic_group(2)
        pi = gpd.classifying_homotopy(z2)

        self.assertEqual(sorted(pi), [1, 2, 3])
        self.assertEqual(pi[1], z2)
        self.assertEqual(pi[2].order, 1)
