import logging
import os
import numpy as np
import pandas as pd
import typing as tp

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from stacklab import (bass_serre as bs, constructions as cons, covering as cov,
                      formats, gog, groupoids as gpd, groups as grp, morita)
from stacklab.config import get_params
from stacklab.corpus import (golden_files, golden_kind, load_corpus,
                             load_corpus_gog, read_golden)


logger = logging.getLogger(__name__)

Outcome = tp.Tuple[bool, str]
Check = tp.Tuple[str, str, tp.Callable[[], Outcome]]

# Segments (Z_m, Z_n, 1) whose ball growth is checked against the closed form
COPRIME_SEGMENTS = ((2, 3), (2, 5), (3, 4), (3, 5), (4, 5), (2, 7))

# Random groupoids added to the fixed fiber product oracle instances
ORACLE_SAMPLE = 6


# Shared fixtures


def swap_groupoid() -> gpd.FiniteGroupoid:
    '''
    Z2 swapping two points a, b.
    '''
    flip = {"a": "b", "b": "a"}
    return gpd.action_groupoid(grp.cyclic_group(2), ["a", "b"],
                               lambda g, x: x if g == 0 else flip[x])


def point_groupoid() -> gpd.FiniteGroupoid:
    return gpd.unit_groupoid(["*"])


def cyclic_subgroup(g: grp.FiniteGroup, order: int
                    ) -> tp.Tuple[grp.FiniteGroup, grp.GroupHom]:
    '''
    The subgroup generated by the least element of the given order.
    '''
    a = next(x for x in g.elements() if grp.element_order(g, x) == order)
    return grp.subgroup(g, grp.generated_subgroup(g, [a]), name=f"Z{order}")


def homs_from_cyclic(k: int, target: grp.FiniteGroup
                     ) -> tp.List[grp.GroupHom]:
    source = grp.cyclic_group(k)
    return [grp.GroupHom(source, target,
                         tuple(grp.power(target, x, i) for i in range(k)))
            for x in target.elements()
            if k % grp.element_order(target, x) == 0]


def _expect(value: tp.Any, expected: tp.Any) -> Outcome:
    return value == expected, f"got {value!r}, expected {expected!r}"


# Suites


def groupoid_checks() -> tp.List[Check]:
    s3 = grp.symmetric_group(3)
    bs3 = gpd.classifying_groupoid(s3)
    swap = swap_groupoid()

    def conjugation_natural() -> Outcome:
        ident = gpd.identity_functor(bs3)
        for x in s3.elements():
            conj = gpd.hom_functor(grp.conjugation_hom(grp.identity_hom(s3),
                                                       s3.inv(x)))
            nt = gpd.NaturalTransformation(ident, conj, (x,))
            if not gpd.check_natural_transformation(nt):
                return False, f"naturality fails for {x}"
        return True, f"{s3.order} transformations"

    def z3_on_six() -> Outcome:
        gen = grp.perm_from_cycles([[1, 2, 3], [4, 5, 6]], 6)
        z3 = grp.group_from_permutations("Z3", 6, [gen])
        points, act = gpd.permutation_action(z3)
        return _expect(len(gpd.pi0(gpd.action_groupoid(z3, points, act))), 2)

    def swap_shape() -> Outcome:
        sizes = {len(swap.hom(x, y)) for x in range(2) for y in range(2)}
        return _expect((swap.n_objects, swap.n_arrows, sizes), (2, 4, {1}))

    trivial_s3 = gpd.action_groupoid(s3, ["*"], lambda g, x: x)
    return [
        ("groupoid", "validate unit groupoid",
         lambda: _expect(gpd.validate_groupoid(point_groupoid()).ok, True)),
        ("groupoid", "validate S3 on a point",
         lambda: _expect(gpd.validate_groupoid(trivial_s3).ok, True)),
        ("groupoid", "Z2 swap arrows", swap_shape),
        ("groupoid", "Z2 swap isotropy",
         lambda: _expect(gpd.isotropy(swap, "a").order, 1)),
        ("groupoid", "Z3 on six points pi0", z3_on_six),
        ("groupoid", "Z2 swap coarse space",
         lambda: _expect(len(gpd.coarse_space(swap)[0]), 1)),
        ("groupoid", "Z2 swap restricted",
         lambda: _expect(gpd.restrict_groupoid(swap, ["a"]).n_arrows, 1)),
        ("groupoid", "conjugation is natural", conjugation_natural),
    ]


def construction_checks() -> tp.List[Check]:
    s3 = grp.symmetric_group(3)
    z2, incl2 = cyclic_subgroup(s3, 2)
    z3, incl3 = cyclic_subgroup(s3, 3)
    point = point_groupoid()

    def z2_z3_over_s3() -> Outcome:
        f, g = gpd.hom_functor(incl2), gpd.hom_functor(incl3)
        total = cons.fiber_product(f, g).total
        ok = (total.n_objects == 6 and len(gpd.pi0(total)) == 1
              and gpd.isotropy(total, total.objects[0]).order == 1
              and cons.fiber_product_matches_oracle(f, g)
              and morita.morita_equivalent(total, point)[0])
        return ok, f"{total.n_objects} objects"

    def z2_over_z2() -> Outcome:
        h = gpd.hom_functor(grp.identity_hom(grp.cyclic_group(2)))
        total = cons.fiber_product(h, h).total
        shape = (total.n_objects, len(gpd.pi0(total)),
                 gpd.isotropy(total, total.objects[0]).order)
        return _expect(shape, (2, 1, 2))

    def inertia_bs3() -> Outcome:
        ig, _ = cons.inertia(gpd.classifying_groupoid(s3))
        return _expect((ig.n_objects, morita.isotropy_profile(ig)),
                       (6, [2, 3, 6]))

    def double_cosets() -> Outcome:
        d = cons.double_coset_fiber_product(incl2, incl3)
        return _expect([c.stabilizer.order for c in d.cosets], [1])

    def action_form() -> Outcome:
        base = cons.GroupAction(s3, ("*",), lambda g, x: x)
        left = cons.EquivariantMap(cons.GroupAction(z2, ("*",),
                                                    lambda g, x: x),
                                   base, incl2, {"*": "*"})
        right = cons.EquivariantMap(cons.GroupAction(z3, ("*",),
                                                     lambda g, x: x),
                                    base, incl3, {"*": "*"})
        afp = cons.action_fiber_product(left, right)
        functor, fp = cons.comparison_functor(afp)
        iso = (morita.is_weak_equivalence(functor)[0]
               and len(set(functor.obj_map)) == fp.total.n_objects)
        return iso and len(afp.points) == 6, f"{len(afp.points)} points"

    def residue_swap() -> Outcome:
        swap = swap_groupoid()
        group, gerbe = cons.residue_gerbe(swap, "a")
        orbit = gpd.restrict_groupoid(swap, gpd.orbit(swap, "a"))
        return _expect((group.order, morita.morita_equivalent(orbit,
                                                              gerbe)[0]),
                       (1, True))

    def inertia_of_groups() -> Outcome:
        for g in (s3, grp.cyclic_group(4), grp.dihedral_group(4),
                  grp.quaternion_group(), grp.alternating_group(4)):
            ig, _ = cons.inertia(gpd.classifying_groupoid(g))
            entries = cons.inertia_of_BG(g)
            classes = gpd.pi0(ig)
            if len(classes) != len(grp.conjugacy_classes(g)):
                return False, f"{g.name}: {len(classes)} components"
            if not morita.morita_equivalent(
                    ig, cons.inertia_of_BG_groupoid(g))[0]:
                return False, f"{g.name}: centralizers do not match"
            if sorted(c.order for _, c in entries) != sorted(
                    morita.isotropy_profile(ig)):
                return False, f"{g.name}: isotropy orders differ"
        return True, "S3 Z4 D4 Q8 A4"

    return [
        ("constructions", "BZ2 x_BS3 BZ3", z2_z3_over_s3),
        ("constructions", "BZ2 x_BZ2 BZ2", z2_over_z2),
        ("constructions", "inertia of BS3", inertia_bs3),
        ("constructions", "double cosets Z2 Z3 in S3", double_cosets),
        ("constructions", "action fiber product", action_form),
        ("constructions", "residue gerbe of the swap", residue_swap),
        ("constructions", "inertia of BG", inertia_of_groups),
    ]


def fiber_product_oracle_checks(seed: int) -> tp.List[Check]:
    '''
    Every pair of functors BZk -> BG (k <= 3) over G in {Z2, Z6, S3}, every
    pair among the identity of the swap groupoid and the functors from a
    point or BZ2 onto one of its objects, and every pair from functors_into
    over the oracle_groupoids.
    '''
    checks = []

    def add(name: str, functors: tp.Sequence[gpd.GroupoidFunctor]):
        for i, f in enumerate(functors):
            for j, g in enumerate(functors):
                checks.append((
                    "fiber-product oracle", f"{name} pair {i:02d} {j:02d}",
                    lambda f=f, g=g: (cons.fiber_product_matches_oracle(f, g),
                                      f"{f.domain.n_objects} x "
                                      f"{g.domain.n_objects} objects")))

    for target in (grp.cyclic_group(2), grp.cyclic_group(6),
                   grp.symmetric_group(3)):
        add(target.name, [gpd.hom_functor(h) for k in (1, 2, 3)
                          for h in homs_from_cyclic(k, target)])
    swap = swap_groupoid()
    into_swap = [gpd.identity_functor(swap)]
    for source in (point_groupoid(),
                   gpd.classifying_groupoid(grp.cyclic_group(2))):
        for x in range(swap.n_objects):
            into_swap.append(gpd.GroupoidFunctor(
                source, swap, (x,),
                (swap.identities[x],) * source.n_arrows))
    add("swap", into_swap)
    for n, g in enumerate(oracle_groupoids(seed)):
        add(f"action groupoid {n:02d}", functors_into(g))
    return checks


def elementary_implies_weak(groupoids: tp.Sequence[gpd.FiniteGroupoid]
                            ) -> Outcome:
    '''
    Every elementary Morita functor among the identity, the skeleton
    inclusion and the retraction of each groupoid is a weak equivalence.
    '''
    elementary = 0
    for i, g in enumerate(groupoids):
        sk = morita.skeleton(g)
        for f in (gpd.identity_functor(g), sk.inclusion,
                  morita.retraction_functor(sk)):
            if not morita.is_elementary_morita(f):
                continue
            elementary += 1
            ok, cert = morita.is_weak_equivalence(f)
            if not ok:
                return False, f"groupoid {i}: {cert.failure}"
    return elementary > 0, f"{elementary} elementary functors"


def morita_invariance(groupoids: tp.Sequence[gpd.FiniteGroupoid]
                      ) -> Outcome:
    '''
    Components, isotropy and inertia agree between each groupoid and its
    skeleton.
    '''
    for i, g in enumerate(groupoids):
        sk = morita.skeleton(g)
        s = sk.groupoid
        ok, cert = morita.is_weak_equivalence(sk.inclusion)
        if not ok:
            return False, f"groupoid {i}: {cert.failure}"
        if len(gpd.pi0(g)) != len(gpd.pi0(s)):
            return False, f"groupoid {i}: components differ"
        if morita.isotropy_profile(g) != morita.isotropy_profile(s):
            return False, f"groupoid {i}: isotropy differs"
        ig, _ = cons.inertia(g)
        isk, _ = cons.inertia(s)
        if morita.isotropy_profile(ig) != morita.isotropy_profile(isk):
            return False, f"groupoid {i}: inertia isotropy differs"
        if not morita.morita_equivalent(ig, isk)[0]:
            return False, f"groupoid {i}: inertia not Morita equivalent"
    return True, f"{len(groupoids)} groupoids"


def morita_checks(seed: int) -> tp.List[Check]:
    s3 = grp.symmetric_group(3)
    bs3 = gpd.classifying_groupoid(s3)
    swap, point = swap_groupoid(), point_groupoid()
    _, incl2 = cyclic_subgroup(s3, 2)

    def relation_axioms() -> Outcome:
        corpus = random_groupoids(seed, get_params()['random_groupoids'])
        eq = morita.morita_equivalent
        for i, g in enumerate(corpus):
            if not eq(g, g)[0]:
                return False, f"not reflexive at {i}"
            h, k = corpus[(i + 1) % len(corpus)], corpus[(i + 2) % len(corpus)]
            if eq(g, h)[0] != eq(h, g)[0]:
                return False, f"not symmetric at {i}"
            if eq(g, h)[0] and eq(h, k)[0] and not eq(g, k)[0]:
                return False, f"not transitive at {i}"
            if not eq(g, morita.skeleton(g).groupoid)[0]:
                return False, f"not equivalent to its skeleton at {i}"
        return True, f"{len(corpus)} groupoids"

    def small() -> tp.List[gpd.FiniteGroupoid]:
        params = get_params()
        return [g for g in random_groupoids(seed, params['random_groupoids'])
                if g.n_objects <= params['oracle_objects']]

    def span() -> Outcome:
        ok, witness = morita.morita_equivalent(swap, point)
        left, right = witness.span()
        return (ok and morita.is_weak_equivalence(left)[0]
                and morita.is_weak_equivalence(right)[0]), ""

    return [
        ("morita", "BZ2 -> BS3 not a weak equivalence",
         lambda: _expect(morita.is_weak_equivalence(
             gpd.hom_functor(incl2))[0], False)),
        ("morita", "skeleton of the swap",
         lambda: _expect(morita.skeleton(swap).groupoid.n_objects, 1)),
        ("morita", "skeleton inclusion",
         lambda: _expect(morita.is_weak_equivalence(
             morita.skeleton(gpd.disjoint_union([bs3, swap])).inclusion)[0],
             True)),
        ("morita", "swap -> point elementary",
         lambda: _expect(morita.is_elementary_morita(gpd.GroupoidFunctor(
             swap, point, (0, 0), (0, 0, 0, 0))), True)),
        ("morita", "BZ2 -> BS3 not elementary",
         lambda: _expect(morita.is_elementary_morita(
             gpd.hom_functor(incl2)), False)),
        ("morita", "S3 vs Z6",
         lambda: _expect(morita.group_isomorphic(s3, grp.cyclic_group(6)),
                         None)),
        ("morita", "Z2xZ2 vs Z4",
         lambda: _expect(morita.group_isomorphic(
             grp.direct_product(grp.cyclic_group(2), grp.cyclic_group(2)),
             grp.cyclic_group(4)), None)),
        ("morita", "swap vs point",
         lambda: _expect(morita.morita_equivalent(swap, point)[0], True)),
        ("morita", "BS3 vs BZ6",
         lambda: _expect(morita.morita_equivalent(
             bs3, gpd.classifying_groupoid(grp.cyclic_group(6)))[0], False)),
        ("morita", "span of weak equivalences", span),
        ("morita", "relation axioms", relation_axioms),
        ("morita", "elementary implies weak",
         lambda: elementary_implies_weak(small())),
        ("morita", "invariants agree with the skeleton",
         lambda: morita_invariance(small())),
    ]


def random_groupoids(seed: int, n: int) -> tp.List[gpd.FiniteGroupoid]:
    '''
    Disjoint unions of action groupoids of small groups on small orbits,
    drawn from a seeded generator.
    '''
    rng = np.random.default_rng(seed)
    logger.info("random groupoid corpus with seed %d", seed)
    pool = [grp.trivial_group(), grp.cyclic_group(2), grp.cyclic_group(3),
            grp.symmetric_group(3)]
    out = []
    for _ in range(n):
        parts = []
        for _ in range(int(rng.integers(1, 4))):
            g = pool[int(rng.integers(len(pool)))]
            if g.perms is not None and rng.integers(2):
                points, act = gpd.permutation_action(g)
            else:
                size = int(rng.integers(1, 3))
                points, act = list(range(size)), (lambda a, x: x)
            parts.append(gpd.action_groupoid(g, points, act))
        out.append(gpd.disjoint_union(parts))
    return out


def oracle_groupoids(seed: int) -> tp.List[gpd.FiniteGroupoid]:
    '''
    Multi-object action groupoids within the oracle object and arrow bounds:
    fixed permutation actions of Z2, Z3 and S3, then a seeded sample of
    random_groupoids.
    '''
    params = get_params()
    fixed = [swap_groupoid()]
    for name, degree, gens in (("Z3", 3, [[[1, 2, 3]]]),
                               ("S3", 3, [[[1, 2]], [[1, 2, 3]]]),
                               ("Z2", 4, [[[1, 2], [3, 4]]])):
        group = grp.group_from_permutations(
            name, degree, [grp.perm_from_cycles(c, degree) for c in gens])
        points, act = gpd.permutation_action(group)
        fixed.append(gpd.action_groupoid(group, points, act))

    def within(g: gpd.FiniteGroupoid) -> bool:
        return (1 < g.n_objects <= params['oracle_objects']
                and g.n_arrows <= params['oracle_arrows'])

    sample = [g for g in random_groupoids(seed, 4 * ORACLE_SAMPLE)
              if within(g) and g not in fixed]
    return [g for g in fixed if within(g)] + sample[:ORACLE_SAMPLE]


def functors_into(g: gpd.FiniteGroupoid) -> tp.List[gpd.GroupoidFunctor]:
    '''
    Identity, skeleton inclusion, and retraction followed by inclusion.
    '''
    sk = morita.skeleton(g)
    return [gpd.identity_functor(g), sk.inclusion,
            gpd.compose_functors(morita.retraction_functor(sk), sk.inclusion)]


def gog_checks(seed: int) -> tp.List[Check]:
    seg = load_corpus_gog("segment_z2_z3")
    dinfty = load_corpus_gog("dinfty")

    def reduce_text(g, text) -> str:
        pres = gog.pi1_presentation(g)
        tables = bs.transversal_tables(g)
        return bs.render_word(g, pres, bs.reduce_word(
            g, tables, bs.parse_word(g, pres, text)))

    def weighted() -> Outcome:
        got = [gog.abelianization(gog.pi1_presentation(
            gog.weighted_segment(m, n))) for m, n in ((2, 3), (4, 6), (6, 9))]
        return _expect(got, [(0, [6]), (0, [12]), (0, [18])])

    def modular_length() -> Outcome:
        pres = gog.pi1_presentation(seg)
        w = bs.parse_word(seg, pres, "a b " * 6)
        r = bs.reduce_word(seg, bs.transversal_tables(seg), w)
        return _expect(bs.syllable_length(r, pres.tree), 12)

    def abab() -> Outcome:
        pres = gog.pi1_presentation(dinfty)
        t = bs.transversal_tables(dinfty)
        return _expect(bs.words_equal(dinfty, t,
                                      bs.parse_word(dinfty, pres, "a b a b"),
                                      bs.parse_word(dinfty, pres, "b a b a")),
                       False)

    def balls() -> Outcome:
        return _expect([bs.bass_serre_ball(seg, r).number_of_nodes()
                        for r in (0, 1, 2)], [1, 3, 7])

    def ball_growth() -> Outcome:
        radius = 5
        for m, n in COPRIME_SEGMENTS:
            g = gog.weighted_segment(m, n)
            got = [bs.bass_serre_ball(g, r).number_of_nodes()
                   for r in range(radius + 1)]
            expected = bs.segment_ball_sizes(g, radius)
            if got != expected:
                return False, f"({m}, {n}): got {got}, expected {expected}"
        return True, f"{len(COPRIME_SEGMENTS)} segments to radius {radius}"

    def inertia_segments() -> Outcome:
        shapes = []
        for name in ("z2_identity_segment", "s3_identity_segment"):
            ig = gog.inertia_gog(load_corpus_gog(name))
            shapes.append((len(ig.vertices), len(ig.edges),
                           sorted(e.group.order for e in ig.edges)))
        return _expect(shapes, [(4, 2, [2, 2]), (6, 3, [2, 3, 6])])

    def certificates() -> Outcome:
        corpus = load_corpus()
        failed = [n for n, g in corpus.items()
                  if not bs.omega_injectivity_certificate(g).passed]
        return not failed and len(corpus) >= 10, f"{len(corpus)} graphs"

    def normal_forms() -> Outcome:
        return normal_form_suite(seed, get_params()['words'])

    return [
        ("gog", "pi1 of the Z2 Z3 segment",
         lambda: _expect(gog.pi1_presentation(seg).text(),
                         "<a, b | a^2, b^3>")),
        ("gog", "pi1 of the circle",
         lambda: _expect(gog.pi1_presentation(
             load_corpus_gog("circle")).text(), "<t | >")),
        ("gog", "Z2 Z3 abelianization",
         lambda: _expect(gog.abelianization(gog.pi1_presentation(seg)),
                         (0, [6]))),
        ("gog", "weighted projective lines", weighted),
        ("gog", "reduce a a b in D_inf",
         lambda: _expect(reduce_text(dinfty, "a a b"), "b")),
        ("gog", "(ab)^6 in Z2 * Z3", modular_length),
        ("gog", "abab vs baba", abab),
        ("gog", "Bass-Serre balls", balls),
        ("gog", "biregular ball growth", ball_growth),
        ("gog", "inertia of identity segments", inertia_segments),
        ("gog", "vertex groups inject", certificates),
        ("gog", "normal forms", normal_forms),
    ]


def normal_form_suite(seed: int, n_words: int) -> Outcome:
    '''
    Random words over the corpus: reduction is idempotent and conjugates of
    relators reduce to the identity.
    '''
    rng = np.random.default_rng(seed)
    length = get_params()['word_length']
    corpus = [g for g in load_corpus().values() if gog.is_connected(g)]
    per_graph = max(1, n_words // len(corpus))
    checked = 0
    for g in corpus:
        pres = gog.pi1_presentation(g)
        tables = bs.transversal_tables(g)
        gens = list(pres.generators)
        if not gens:
            continue

        def random_letters(k: int) -> gog.SymWord:
            return tuple((gens[int(rng.integers(len(gens)))],
                          1 if rng.integers(2) else -1) for _ in range(k))

        for _ in range(per_graph):
            w = bs.word_from_symbols(
                pres, random_letters(int(rng.integers(0, length + 1))))
            r = bs.reduce_word(g, tables, w, basepoint=pres.basepoint)
            again = bs.reduce_word(g, tables, r, basepoint=pres.basepoint)
            if again.syllables != r.syllables:
                return False, f"{g.name}: reduction not idempotent"
            checked += 1
        for rel in pres.relations:
            u = random_letters(int(rng.integers(0, 4)))
            inv = tuple((s, -k) for s, k in reversed(u))
            w = bs.word_from_symbols(pres, u + rel.relator() + inv)
            if not bs.reduce_word(g, tables, w,
                                  basepoint=pres.basepoint).is_identity:
                return False, f"{g.name}: relator {rel.kind} survives"
    return True, f"{checked} words"


def covering_checks() -> tp.List[Check]:
    seg = load_corpus_gog("segment_z2_z3")
    dinfty = load_corpus_gog("dinfty")
    seg_pres = gog.pi1_presentation(seg)
    d_pres = gog.pi1_presentation(dinfty)
    d_swap = cov.Pi1Action(d_pres, 2, {"a": (1, 0), "b": (1, 0)})
    modular3 = cov.Pi1Action(seg_pres, 3, {"a": (1, 0, 2), "b": (1, 2, 0)})

    def circle_cover() -> Outcome:
        c = cov.covering_from_action(dinfty, d_swap)
        shape = (len(c.total.vertices), len(c.total.edges),
                 {v.group.order for v in c.total.vertices},
                 gog.betti_number(c.total))
        return _expect(shape, (2, 2, {1}, 1))

    def modular_cover() -> Outcome:
        c = cov.covering_from_action(seg, modular3)
        over = {v: sorted(c.total.group(u).order for u in c.over(v))
                for v in ("v1", "v2")}
        return _expect((over, len(c.total.edges),
                        gog.euler_characteristic(c.total)),
                       ({"v1": [1, 2], "v2": [1]}, 3, Fraction(-1, 2)))

    def added_relation() -> Outcome:
        rel = gog.Relation("vertex", (("a", 1),) * 3)
        pres = gog.Pi1Presentation(
            d_pres.graph, d_pres.basepoint, d_pres.tree, d_pres.parent,
            d_pres.generators, d_pres.symbols, d_pres.vertex_gens,
            d_pres.stable, d_pres.relations + (rel,))
        return _expect(cov.validate_action(cov.Pi1Action(
            pres, 2, d_swap.images))[0], False)

    def enumerations() -> Outcome:
        circle = gog.pi1_presentation(load_corpus_gog("circle"))
        point = gog.pi1_presentation(load_corpus_gog("point"))
        got = [len(cov.enumerate_actions(circle, 2)),
               len(cov.enumerate_actions(d_pres, 2)),
               len(cov.enumerate_actions(point, 4))]
        return _expect(got, [2, 4, 1])

    def cartesian() -> Outcome:
        return _expect([cov.inertia_cartesian_check(seg, modular3, "v1", p)
                        for p in range(3)], [True] * 3)

    def round_trips() -> Outcome:
        count = 0
        names = ("dinfty", "segment_z2_z3", "circle", "hnn_z2", "theta")
        for name in names:
            g = load_corpus_gog(name)
            pres = gog.pi1_presentation(g)
            n_max = 4 if name in ("dinfty", "segment_z2_z3") else 3
            for a in cov.enumerate_actions(pres, n_max):
                c = cov.covering_from_action(g, a)
                if not cov.actions_conjugate(cov.monodromy(c), a):
                    return False, f"{name}: monodromy differs for {a.images}"
                if not cov.cover_euler_check(c):
                    return False, f"{name}: Euler characteristic"
                if len(c.components()) != 1:
                    return False, f"{name}: transitive cover disconnected"
                count += 1
        return True, f"{count} actions over {len(names)} graphs"

    def sums() -> Outcome:
        one = cov.Pi1Action(d_pres, 1, {"a": (0,), "b": (0,)})
        both = cov.direct_sum(one, one)
        c = cov.covering_from_action(dinfty, both)
        return _expect((cov.is_connected_cover(both), len(c.components()),
                        cov.monodromy(c).images), (False, 2,
                                                   {"a": (0, 1),
                                                    "b": (0, 1)}))

    return [
        ("covering", "D_inf swap is an action",
         lambda: _expect(cov.validate_action(d_swap)[0], True)),
        ("covering", "relation a^3 fails", added_relation),
        ("covering", "D_inf circle cover", circle_cover),
        ("covering", "degree 3 modular cover", modular_cover),
        ("covering", "cartesian inertia", cartesian),
        ("covering", "enumeration counts", enumerations),
        ("covering", "monodromy round trips", round_trips),
        ("covering", "direct sums", sums),
        ("covering", "universal cover ball",
         lambda: _expect(cov.universal_cover_ball(seg, 2).number_of_nodes(),
                         7)),
    ]


def format_checks() -> tp.List[Check]:
    seg = load_corpus_gog("segment_z2_z3")

    def round_trip(path: str) -> Outcome:
        kind = golden_kind(path)
        stem = os.path.basename(path).split(".")[0]
        context = None
        if kind == "action":
            context = gog.pi1_presentation(load_corpus_gog(stem))
        elif kind == "cover":
            context = load_corpus_gog(stem)
        with open(path) as f:
            text = f.read()
        again = formats.serialize(formats.parse(text, kind, context))
        return again == text, "bit-exact" if again == text else "differs"

    checks = [("formats", f"round trip {path.split('/')[-1]}",
               lambda path=path: round_trip(path))
              for path in golden_files()]
    checks += [
        ("formats", "point groupoid golden",
         lambda: _expect(formats.serialize(point_groupoid()),
                         read_golden("point.groupoid.json"))),
        ("formats", "swap groupoid golden",
         lambda: _expect(formats.serialize(swap_groupoid()),
                         read_golden("swap.groupoid.json"))),
        ("formats", "Z6 table golden",
         lambda: _expect(formats.serialize(grp.cyclic_group(6)),
                         read_golden("z6.group.json"))),
        ("formats", "segment golden",
         lambda: _expect(formats.serialize(seg),
                         read_golden("segment_z2_z3.gog.json"))),
        ("formats", "Euler characteristic as a rational",
         lambda: _expect(formats.serialize(
             {"chi": gog.euler_characteristic(seg), "ok": True}),
             read_golden("segment_z2_z3_chi.report.json"))),
        ("formats", "DOT of the radius 1 ball",
         lambda: _expect(formats.to_dot(
             bs.bass_serre_ball(seg, 1)).count("[label="), 3 + 2)),
    ]
    return checks


def all_checks(seed: int) -> tp.List[Check]:
    return (groupoid_checks() + construction_checks()
            + fiber_product_oracle_checks(seed) + morita_checks(seed)
            + gog_checks(seed) + covering_checks() + format_checks())


def _run(check: Check) -> tp.Dict[str, tp.Any]:
    suite, name, fn = check
    try:
        passed, detail = fn()
    except Exception as e:
        logger.exception("check %s / %s raised", suite, name)
        passed, detail = False, f"{type(e).__name__}: {e}"
    return {"suite": suite, "check": name, "passed": bool(passed),
            "detail": detail}


def run_selftest(seed: tp.Optional[int] = None,
                 workers: tp.Optional[int] = None) -> pd.DataFrame:
    '''
    Runs every oracle check.

    Inputs:
        seed     [int]:  seed of the random corpora, `seed` param by default
        workers  [int]:  threads, `workers` param by default

    Outputs:
        [pd.DataFrame]: columns suite, check, passed, detail sorted by
                        (suite, check)
    '''
    params = get_params()
    seed = params['seed'] if seed is None else seed
    workers = workers or params['workers']
    logger.info("selftest with seed %d on %d workers", seed, workers)
    checks = all_checks(seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run, checks))
    else:
        rows = [_run(c) for c in checks]
    df = pd.DataFrame(rows, columns=["suite", "check", "passed", "detail"])
    return df.sort_values(by=["suite", "check"], ignore_index=True)
