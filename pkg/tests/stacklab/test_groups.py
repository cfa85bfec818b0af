import unittest
from unittest import mock

from stacklab import groups as grp
from stacklab.errors import InvalidGroup


class TestGroups(unittest.TestCase):

    def get_s3(self) -> grp.FiniteGroup:
        '''
        Helper to return S3 with element ids
        0 = e, 1 = (1 2 3), 2 = (1 2), 3 = (1 3 2)
        '''
        return grp.symmetric_group(3)

    def test_cyclic_group(self):
        z6 = grp.cyclic_group(6)

        self.assertEqual(z6.name, "Z6")
        self.assertEqual(z6.order, 6)
        self.assertEqual(z6.mul(4, 5), 3)
        self.assertEqual(z6.inv(2), 4)
        self.assertTrue(z6.is_abelian)

        with self.assertRaises(InvalidGroup):
            grp.cyclic_group(0)

    def test_trivial_group(self):
        one = grp.trivial_group()

        self.assertEqual(one.name, "1")
        self.assertEqual(one.order, 1)
        self.assertEqual(list(one.elements()), [0])

    def test_validate_table(self):
        self.assertEqual(grp.validate_table([[0, 1], [1, 0]]), [])

        problems = grp.validate_table([[1, 0], [0, 1]])
        self.assertEqual(problems, ["element 0 is not a two-sided identity"])

        self.assertTrue(grp.validate_table([[0, 1, 2], [1, 2, 0]]))
        self.assertTrue(grp.validate_table([[0, 1], [1, 5]]))

    def test_group_from_table(self):
        g = grp.group_from_table("C3", [[0, 1, 2], [1, 2, 0], [2, 0, 1]])

        self.assertEqual(g, grp.cyclic_group(3))
        with self.assertRaises(InvalidGroup):
            grp.group_from_table("bad", [[1, 0], [0, 1]])

    def test_perm_cycles(self):
        self.assertEqual(grp.perm_from_cycles([[1, 2, 3]], 3), (1, 2, 0))
        self.assertEqual(grp.perm_from_cycles([], 2), (0, 1))
        self.assertEqual(grp.perm_to_cycles((1, 2, 0)), [[1, 2, 3]])
        self.assertEqual(grp.perm_to_cycles((0, 1)), [])

        with self.assertRaises(InvalidGroup):
            grp.perm_from_cycles([[0, 1]], 2)

    def test_group_from_permutations(self):
        s3 = self.get_s3()

        self.assertEqual(s3.order, 6)
        self.assertEqual(s3.degree, 3)
        self.assertEqual(s3.perms[0], (0, 1, 2))
        self.assertEqual(s3.perms[1], (1, 2, 0))
        self.assertEqual(s3.perms[2], (1, 0, 2))
        self.assertEqual(s3.mul(1, 1), 3)
        self.assertFalse(s3.is_abelian)

        gens = [grp.perm_from_cycles([[1, 2]], 2)]
        with self.assertRaises(InvalidGroup):
            grp.group_from_permutations("Z2", 2, gens, order=3)
        with self.assertRaises(InvalidGroup):
            grp.group_from_permutations("bad", 2, [(0, 0)])

    @mock.patch('stacklab.groups.get_params')
    def test_group_without_table(self, mock_params):
        '''
        Assert groups above `table_order` multiply their permutations
        '''
        mock_params.return_value = {'table_order': 4}

        s3 = self.get_s3()

        self.assertIsNone(s3.table)
        self.assertEqual(s3.mul(1, 1), 3)
        self.assertEqual(s3.inv(1), 3)
        self.assertEqual(s3, grp.symmetric_group(3))

    def test_named_groups(self):
        self.assertEqual(grp.alternating_group(4).order, 12)
        self.assertEqual(grp.dihedral_group(4).order, 8)

        q8 = grp.quaternion_group()
        self.assertEqual(grp.element_order_profile(q8),
                         ((1, 1), (2, 1), (4, 6)))
        self.assertFalse(q8.is_abelian)

    def test_direct_product(self):
        v4 = grp.direct_product(grp.cyclic_group(2), grp.cyclic_group(2))

        self.assertEqual(v4.order, 4)
        self.assertEqual(grp.element_order_profile(v4), ((1, 1), (2, 3)))
        self.assertEqual(grp.product_pair(grp.cyclic_group(2), 3), (1, 1))

    def test_element_arithmetic(self):
        z6 = grp.cyclic_group(6)
        s3 = self.get_s3()

        self.assertEqual(grp.power(z6, 1, -1), 5)
        self.assertEqual(grp.power(z6, 2, 3), 0)
        self.assertEqual(grp.element_order(z6, 2), 3)
        self.assertEqual(grp.conjugate(s3, 2, 1), 3)
        self.assertEqual(grp.element_order_profile(s3),
                         ((1, 1), (2, 3), (3, 2)))

    def test_subgroups(self):
        s3 = self.get_s3()

        self.assertEqual(grp.generated_subgroup(s3, [1]),
                         frozenset({0, 1, 3}))
        sub, incl = grp.subgroup(s3, [0, 1, 3], name="A3")
        self.assertEqual(sub, grp.cyclic_group(3))
        self.assertEqual(incl.image, (0, 1, 3))
        self.assertTrue(grp.hom_is_injective(incl))

        with self.assertRaises(InvalidGroup):
            grp.subgroup(s3, [0, 1])

    def test_generators(self):
        s3 = self.get_s3()

        self.assertEqual(grp.group_generators(s3), [1, 2])
        self.assertEqual(grp.generating_set(grp.cyclic_group(6)), [1])
        self.assertEqual(grp.generating_set(grp.trivial_group()), [])

    def test_conjugacy(self):
        s3 = self.get_s3()

        self.assertEqual(grp.conjugacy_classes(s3),
                         [(0,), (1, 3), (2, 4, 5)])
        self.assertEqual(grp.centralizer(s3, 1)[0].order, 3)
        self.assertEqual(grp.centralizer(s3, 0)[0].order, 6)
        self.assertEqual(grp.derived_subgroup(s3), frozenset({0, 1, 3}))
        self.assertEqual(grp.abelianization_profile(s3),
                         (2, ((1, 1), (2, 1))))

    def test_cosets(self):
        s3 = self.get_s3()

        right = grp.right_cosets(s3, [0, 2])
        left = grp.left_cosets(s3, [0, 2])
        self.assertEqual(len(right), 3)
        self.assertEqual(len(left), 3)
        self.assertEqual(sorted(x for c in right for x in c), list(range(6)))

        doubles = grp.double_cosets(s3, [0, 2], [0, 1, 3])
        self.assertEqual(doubles, [(0, 1, 2, 3, 4, 5)])
        self.assertEqual([len(c) for c in grp.double_cosets(s3, [0, 2],
                                                            [0, 2])],
                         [2, 4])

    def test_homs(self):
        z4, z2 = grp.cyclic_group(4), grp.cyclic_group(2)

        f = grp.group_hom(z4, z2, [0, 1, 0, 1])
        self.assertEqual(grp.hom_kernel(f), [0, 2])
        self.assertFalse(grp.hom_is_injective(f))
        self.assertEqual(grp.hom_image(f), frozenset({0, 1}))

        with self.assertRaises(InvalidGroup):
            grp.group_hom(z2, z4, [0, 1])
        with self.assertRaises(InvalidGroup):
            grp.group_hom(z2, z4, [0])

        double = grp.group_hom(z2, z4, [0, 2])
        self.assertEqual(grp.compose_homs(double, f).image, (0, 0))
        self.assertEqual(grp.trivial_hom(z2, z4).image, (0, 0))
        self.assertEqual(grp.identity_hom(z4).image, (0, 1, 2, 3))

    def test_conjugation_hom(self):
        s3 = self.get_s3()
        f = grp.conjugation_hom(grp.identity_hom(s3), 2)

        self.assertEqual(f(1), 3)
        self.assertEqual(f(0), 0)
        self.assertEqual(grp.hom_problems(s3, s3, f.image), [])

    def test_cayley(self):
        z3 = grp.cyclic_group(3)

        self.assertEqual(grp.cayley_words(z3, [1]), [(), (0,), (0, 0)])
        self.assertEqual(grp.cayley_relators(z3, [1]),
                         [((0, 1), (0, 1), (0, 1))])
        self.assertEqual(grp.free_reduce([(0, 1), (1, 1), (1, -1)]),
                         ((0, 1),))

        with self.assertRaises(InvalidGroup):
            grp.cayley_words(grp.cyclic_group(4), [2])
