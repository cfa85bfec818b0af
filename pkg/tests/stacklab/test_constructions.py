import unittest

from stacklab import constructions as cons
from stacklab import groupoids as gpd
from stacklab import groups as grp
from stacklab import morita
from stacklab.errors import MismatchedBase, NotEquivariant, SizeCapExceeded


class TestFiberProduct(unittest.TestCase):

    def get_inclusions(self):
        '''
        Helper to return S3 with Z2 = <(1 2)> and Z3 = <(1 2 3)> included
        '''
        s3 = grp.symmetric_group(3)
        z2, incl2 = grp.subgroup(s3, [0, 2], name="Z2")
        z3, incl3 = grp.subgroup(
            s3, grp.generated_subgroup(s3, [1]), name="Z3")
        return s3, incl2, incl3

    def test_free_fiber_product(self):
        _, incl2, incl3 = self.get_inclusions()
        f, g = gpd.hom_functor(incl2), gpd.hom_functor(incl3)

        result = cons.fiber_product(f, g)
        total = result.total

        self.assertEqual(total.n_objects, 6)
        self.assertEqual(total.n_arrows, 36)
        self.assertEqual(len(gpd.pi0(total)), 1)
        self.assertEqual(gpd.isotropy_orders(total), [1] * 6)
        self.assertTrue(gpd.validate_groupoid(total).ok)
        self.assertTrue(gpd.check_functor(result.proj_left).ok)
        self.assertTrue(gpd.check_functor(result.proj_right).ok)
        self.assertTrue(gpd.check_natural_transformation(result.two_cell))
        self.assertTrue(morita.morita_equivalent(
            total, gpd.unit_groupoid(["*"]))[0])

    def test_self_fiber_product_of_z2(self):
        h = gpd.hom_functor(grp.identity_hom(grp.cyclic_group(2)))

        total = cons.fiber_product(h, h).total

        self.assertEqual(total.n_objects, 2)
        self.assertEqual(total.n_arrows, 8)
        self.assertEqual(len(gpd.pi0(total)), 1)
        self.assertEqual(gpd.isotropy(total, total.objects[0]).order, 2)

    def test_matches_oracle(self):
        _, incl2, incl3 = self.get_inclusions()
        pairs = [(incl2, incl3), (incl2, incl2), (incl3, incl3)]

        for a, b in pairs:
            f, g = gpd.hom_functor(a), gpd.hom_functor(b)
            self.assertTrue(cons.fiber_product_matches_oracle(f, g))

    def test_oracle_description(self):
        h = gpd.hom_functor(grp.identity_hom(grp.cyclic_group(2)))

        objects, arrows = cons.brute_force_fiber_product(h, h)

        self.assertEqual(objects, {("*", "*", 0), ("*", "*", 1)})
        self.assertEqual(len(arrows), 8)

    def test_mismatched_base(self):
        _, incl2, _ = self.get_inclusions()
        f = gpd.hom_functor(incl2)
        g = gpd.hom_functor(grp.identity_hom(grp.cyclic_group(2)))

        with self.assertRaises(MismatchedBase):
            cons.fiber_product(f, g)

    def test_size_cap(self):
        _, incl2, incl3 = self.get_inclusions()
        f, g = gpd.hom_functor(incl2), gpd.hom_functor(incl3)

        with self.assertRaises(SizeCapExceeded) as ctx:
            cons.fiber_product(f, g, cap=10)
        self.assertEqual(ctx.exception.size, 36)


class TestInertia(unittest.TestCase):

    def test_inertia_of_bs3(self):
        bs3 = gpd.classifying_groupoid(grp.symmetric_group(3))

        ig, projection = cons.inertia(bs3)

        self.assertEqual(ig.n_objects, 6)
        self.assertEqual(len(gpd.pi0(ig)), 3)
        self.assertEqual(morita.isotropy_profile(ig), [2, 3, 6])
        self.assertTrue(gpd.check_functor(projection).ok)
        self.assertTrue(gpd.validate_groupoid(ig).ok)

    def test_inertia_of_free_action(self):
        flip = {"a": "b", "b": "a"}
        swap = gpd.action_groupoid(grp.cyclic_group(2), ["a", "b"],
                                   lambda g, x: x if g == 0 else flip[x])

        ig, _ = cons.inertia(swap)

        self.assertEqual(ig.n_objects, 2)
        self.assertEqual(ig.objects, (("a", 0), ("b", 1)))

    def test_inertia_comparison(self):
        for group in (grp.symmetric_group(3), grp.cyclic_group(4)):
            g = gpd.classifying_groupoid(group)
            comparison = cons.inertia_comparison(g)
            self.assertTrue(gpd.check_functor(comparison).ok)
            self.assertTrue(morita.is_weak_equivalence(comparison)[0])

    def test_inertia_of_BG(self):
        s3 = grp.symmetric_group(3)

        entries = cons.inertia_of_BG(s3)

        self.assertEqual([rep for rep, _ in entries], [0, 1, 2])
        self.assertEqual([c.order for _, c in entries], [6, 3, 2])

        g = cons.inertia_of_BG_groupoid(grp.cyclic_group(4))
        self.assertEqual(morita.isotropy_profile(g), [4, 4, 4, 4])

    def test_inertia_size_cap(self):
        bs3 = gpd.classifying_groupoid(grp.symmetric_group(3))

        with self.assertRaises(SizeCapExceeded):
            cons.inertia(bs3, cap=20)

    def test_residue_gerbe(self):
        bs3 = gpd.classifying_groupoid(grp.symmetric_group(3))

        group, gerbe = cons.residue_gerbe(bs3, "*")

        self.assertEqual(group.order, 6)
        self.assertEqual(gerbe.n_arrows, 6)


class TestDoubleCosets(unittest.TestCase):

    def test_double_cosets(self):
        s3 = grp.symmetric_group(3)
        _, incl = grp.subgroup(s3, [0, 2])

        d = cons.double_coset_fiber_product(incl, incl)

        self.assertEqual([c.representative for c in d.cosets], [0, 1])
        self.assertEqual([len(c.elements) for c in d.cosets], [2, 4])
        self.assertEqual([c.stabilizer.order for c in d.cosets], [2, 1])
        self.assertEqual(d.to_groupoid().n_objects, 2)

    def test_agrees_with_fiber_product(self):
        s3 = grp.symmetric_group(3)
        _, incl2 = grp.subgroup(s3, [0, 2])
        _, incl3 = grp.subgroup(s3, grp.generated_subgroup(s3, [1]))

        d = cons.double_coset_fiber_product(incl2, incl3)
        total = cons.fiber_product(gpd.hom_functor(incl2),
                                   gpd.hom_functor(incl3)).total

        self.assertEqual(len(d.cosets), len(gpd.pi0(total)))
        self.assertTrue(morita.morita_equivalent(d.to_groupoid(), total)[0])

    def test_mismatched_base(self):
        s3 = grp.symmetric_group(3)
        _, incl = grp.subgroup(s3, [0, 2])
        z2 = grp.identity_hom(grp.cyclic_group(2))

        with self.assertRaises(MismatchedBase):
            cons.double_coset_fiber_product(incl, z2)


class TestActionFiberProduct(unittest.TestCase):

    def get_maps(self, points=None):
        '''
        Helper to return a point mapping to 0 in S3 acting on three points,
        and a self map of that action
        '''
        s3 = grp.symmetric_group(3)
        carrier, act = gpd.permutation_action(s3)
        base = cons.GroupAction(s3, tuple(carrier), act)
        one = grp.trivial_group()
        left = cons.EquivariantMap(
            cons.GroupAction(one, ("*",), lambda g, x: x), base,
            grp.trivial_hom(one, s3), {"*": 0})
        right = cons.EquivariantMap(
            base, base, grp.identity_hom(s3),
            points or {x: x for x in carrier})
        return left, right

    def test_action_fiber_product(self):
        left, right = self.get_maps()

        afp = cons.action_fiber_product(left, right)

        self.assertEqual(len(afp.points), 6)
        self.assertEqual(afp.group.order, 6)
        self.assertEqual(len(gpd.pi0(afp.groupoid)), 1)
        self.assertEqual(gpd.isotropy_orders(afp.groupoid), [1] * 6)

    def test_comparison_functor(self):
        left, right = self.get_maps()
        afp = cons.action_fiber_product(left, right)

        functor, fp = cons.comparison_functor(afp)

        self.assertTrue(gpd.check_functor(functor).ok)
        self.assertTrue(morita.is_weak_equivalence(functor)[0])
        self.assertEqual(len(set(functor.obj_map)), fp.total.n_objects)

    def test_equivariant_functor(self):
        _, right = self.get_maps()

        f = cons.equivariant_functor(right)

        self.assertEqual(f.obj_map, (0, 1, 2))
        self.assertTrue(gpd.check_functor(f).ok)

    def test_not_equivariant(self):
        left, right = self.get_maps(points={0: 1, 1: 0, 2: 2})

        with self.assertRaises(NotEquivariant):
            cons.action_fiber_product(left, right)

    def test_mismatched_targets(self):
        left, right = self.get_maps()
        z2 = grp.cyclic_group(2)
        other = cons.GroupAction(z2, ("p",), lambda g, x: x)
        stray = cons.EquivariantMap(other, other, grp.identity_hom(z2),
                                    {"p": "p"})

        with self.assertRaises(MismatchedBase):
            cons.action_fiber_product(left, stray)
