import logging
import typing as tp

from dataclasses import dataclass

from stacklab.config import get_cap
from stacklab.errors import MismatchedBase, NotEquivariant, SizeCapExceeded
from stacklab.groupoids import (Action, FiniteGroupoid, GroupoidFunctor,
                                Label, NaturalTransformation, action_groupoid,
                                check_natural_transformation,
                                classifying_groupoid, compose_functors,
                                diagonal_functor, disjoint_union, isotropy)
from stacklab.groups import (FiniteGroup, GroupHom, centralizer,
                             conjugacy_classes, direct_product, subgroup)


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiberProductResult:
    '''
    The 2-fiber product Y x_C Z of f: Y -> C and g: Z -> C. Objects are
    triples (y, z, alpha) with alpha: f(y) -> g(z); arrows are pairs (u, v)
    of arrows of Y and Z, stored as arrow labels.
    '''
    total: FiniteGroupoid
    proj_left: GroupoidFunctor
    proj_right: GroupoidFunctor
    two_cell: NaturalTransformation

    def arrow_id(self, obj: int, u: int, v: int) -> int:
        total = self.total
        for a in total.out_arrows(obj):
            if total.arrow_labels[a] == (u, v):
                return a
        raise KeyError((obj, u, v))


def fiber_product(f: GroupoidFunctor, g: GroupoidFunctor,
                  cap: tp.Optional[int] = None) -> FiberProductResult:
    '''
    Builds the 2-fiber product of two functors into a common base.

    Objects (y, z, alpha) are numbered lexicographically; the arrow (u, v)
    out of (y, z, alpha) lands on (y', z', f(u)^-1 alpha g(v)).

    Inputs:
        f    [GroupoidFunctor]:  Y -> C
        g    [GroupoidFunctor]:  Z -> C
        cap  [int]:              arrow cap, STACKLAB_CAP by default

    Outputs:
        [FiberProductResult]
    '''
    if f.codomain != g.codomain:
        raise MismatchedBase("functors do not share a codomain")
    y_gr, z_gr, base = f.domain, g.domain, f.codomain

    triples = [(y, z, alpha)
               for y in range(y_gr.n_objects)
               for z in range(z_gr.n_objects)
               for alpha in base.hom(f.obj(y), g.obj(z))]
    size = sum(len(y_gr.out_arrows(y)) * len(z_gr.out_arrows(z))
               for y, z, _ in triples)
    cap = get_cap(cap)
    if size > cap:
        raise SizeCapExceeded("fiber product arrows", size, cap)
    index = {t: i for i, t in enumerate(triples)}

    src, tgt, labels = [], [], []
    arrow_at = {}
    for i, (y, z, alpha) in enumerate(triples):
        for u in y_gr.out_arrows(y):
            back = base.inverse(f.arr(u))
            for v in z_gr.out_arrows(z):
                target_alpha = base.compose(base.compose(back, alpha),
                                            g.arr(v))
                j = index[(y_gr.tgt[u], z_gr.tgt[v], target_alpha)]
                arrow_at[(i, u, v)] = len(src)
                src.append(i)
                tgt.append(j)
                labels.append((u, v))

    comp = {}
    for a, (u, v) in enumerate(labels):
        j = tgt[a]
        y2, z2, _ = triples[j]
        for u2 in y_gr.out_arrows(y2):
            for v2 in z_gr.out_arrows(z2):
                b = arrow_at[(j, u2, v2)]
                comp[(a, b)] = arrow_at[(src[a], y_gr.compose(u, u2),
                                         z_gr.compose(v, v2))]
    identities = [arrow_at[(i, y_gr.identities[y], z_gr.identities[z])]
                  for i, (y, z, _) in enumerate(triples)]
    objects = [(y_gr.objects[y], z_gr.objects[z], alpha)
               for y, z, alpha in triples]
    total = FiniteGroupoid(objects, src, tgt, comp, identities,
                           arrow_labels=labels,
                           name=f"{y_gr.name}x_{base.name}{z_gr.name}")
    logger.debug("fiber product: %d objects, %d arrows", len(triples),
                 len(src))

    proj_left = GroupoidFunctor(total, y_gr, tuple(t[0] for t in triples),
                                tuple(u for u, _ in labels))
    proj_right = GroupoidFunctor(total, z_gr, tuple(t[1] for t in triples),
                                 tuple(v for _, v in labels))
    two_cell = NaturalTransformation(
        compose_functors(proj_left, f), compose_functors(proj_right, g),
        tuple(t[2] for t in triples))
    return FiberProductResult(total, proj_left, proj_right, two_cell)


def brute_force_fiber_product(f: GroupoidFunctor, g: GroupoidFunctor
                              ) -> tp.Tuple[tp.Set, tp.Set]:
    '''
    Independent enumeration of the fiber product straight from its
    description: every triple (y, z, alpha) with alpha: f(y) -> g(z), and
    every (u, v) between triples making the square f(u) alpha' = alpha g(v)
    commute.

    Outputs:
        [tuple]
          objects  [set]: (y label, z label, alpha)
          arrows   [set]: (source triple, target triple, u, v)
    '''
    y_gr, z_gr, base = f.domain, g.domain, f.codomain
    objects = set()
    for alpha in base.arrows():
        for y in range(y_gr.n_objects):
            if f.obj(y) != base.src[alpha]:
                continue
            for z in range(z_gr.n_objects):
                if g.obj(z) == base.tgt[alpha]:
                    objects.add((y, z, alpha))

    arrows = set()
    for (y, z, alpha) in objects:
        for (y2, z2, alpha2) in objects:
            for u in y_gr.hom(y, y2):
                for v in z_gr.hom(z, z2):
                    if (base.compose(f.arr(u), alpha2)
                            == base.compose(alpha, g.arr(v))):
                        arrows.add(((y, z, alpha), (y2, z2, alpha2), u, v))

    def named(t):
        return (y_gr.objects[t[0]], z_gr.objects[t[1]], t[2])

    return ({named(t) for t in objects},
            {(named(s), named(t), u, v) for s, t, u, v in arrows})


def fiber_product_matches_oracle(f: GroupoidFunctor, g: GroupoidFunctor
                                 ) -> bool:
    '''
    Compares fiber_product against brute_force_fiber_product: identical
    object and arrow descriptions, componentwise composition, a natural
    two-cell.
    '''
    result = fiber_product(f, g)
    total = result.total
    objects, arrows = brute_force_fiber_product(f, g)
    if set(total.objects) != objects or len(total.objects) != len(objects):
        return False
    built = {(total.objects[total.src[a]], total.objects[total.tgt[a]])
             + total.arrow_labels[a] for a in total.arrows()}
    if built != arrows or len(built) != total.n_arrows:
        return False
    y_gr, z_gr = f.domain, g.domain
    for (a, b), c in total.composition_table().items():
        u, v = total.arrow_labels[a]
        u2, v2 = total.arrow_labels[b]
        if total.arrow_labels[c] != (y_gr.compose(u, u2),
                                     z_gr.compose(v, v2)):
            return False
    return check_natural_transformation(result.two_cell)


def diagonal_fiber_product(g: FiniteGroupoid) -> FiberProductResult:
    return fiber_product(diagonal_functor(g), diagonal_functor(g))


# Inertia


def inertia(g: FiniteGroupoid, cap: tp.Optional[int] = None
            ) -> tp.Tuple[FiniteGroupoid, GroupoidFunctor]:
    '''
    The inertia groupoid: objects (x, alpha) with alpha an automorphism of
    x, arrows gamma: (x, alpha) -> (x', gamma^-1 alpha gamma).

    Outputs:
        [tuple]
          inertia     [FiniteGroupoid]
          projection  [GroupoidFunctor]: forgets alpha
    '''
    pairs = [(x, alpha) for x in range(g.n_objects) for alpha in g.hom(x, x)]
    size = sum(len(g.out_arrows(x)) for x, _ in pairs)
    cap = get_cap(cap)
    if size > cap:
        raise SizeCapExceeded("inertia arrows", size, cap)
    index = {p: i for i, p in enumerate(pairs)}

    src, tgt, labels, base_arrow = [], [], [], []
    arrow_at = {}
    for i, (x, alpha) in enumerate(pairs):
        for gamma in g.out_arrows(x):
            conj = g.compose(g.compose(g.inverse(gamma), alpha), gamma)
            arrow_at[(i, gamma)] = len(src)
            src.append(i)
            tgt.append(index[(g.tgt[gamma], conj)])
            labels.append((alpha, gamma))
            base_arrow.append(gamma)

    comp = {}
    for a in range(len(src)):
        j = tgt[a]
        x2 = pairs[j][0]
        for delta in g.out_arrows(x2):
            b = arrow_at[(j, delta)]
            comp[(a, b)] = arrow_at[(src[a], g.compose(base_arrow[a], delta))]
    identities = [arrow_at[(i, g.identities[x])]
                  for i, (x, _) in enumerate(pairs)]
    total = FiniteGroupoid([(g.objects[x], alpha) for x, alpha in pairs],
                           src, tgt, comp, identities, arrow_labels=labels,
                           name=f"I{g.name}")
    projection = GroupoidFunctor(total, g, tuple(x for x, _ in pairs),
                                 tuple(base_arrow))
    return total, projection


def inertia_comparison(g: FiniteGroupoid) -> GroupoidFunctor:
    '''
    The functor from inertia(g) to the diagonal self fiber product sending
    (x, alpha) to (x, x, (id_x, alpha)) and gamma to (gamma, gamma); a weak
    equivalence.
    '''
    ig, _ = inertia(g)
    diag = diagonal_fiber_product(g)
    total = diag.total
    m = g.n_arrows
    index = {lab: i for i, lab in enumerate(total.objects)}
    obj_map, arr_map = [], []
    for (x_label, alpha) in ig.objects:
        x = g.index_of(x_label)
        pair = g.identities[x] * m + alpha
        obj_map.append(index[(x_label, x_label, pair)])
    for a in ig.arrows():
        gamma = ig.arrow_labels[a][1]
        arr_map.append(diag.arrow_id(obj_map[ig.src[a]], gamma, gamma))
    return GroupoidFunctor(ig, total, tuple(obj_map), tuple(arr_map))


def inertia_of_BG(group: FiniteGroup
                  ) -> tp.List[tp.Tuple[int, FiniteGroup]]:
    '''
    One (representative, centralizer) entry per conjugacy class, the
    representative being the least element id of its class.
    '''
    return [(cls[0], centralizer(group, cls[0])[0])
            for cls in conjugacy_classes(group)]


def inertia_of_BG_groupoid(group: FiniteGroup) -> FiniteGroupoid:
    return disjoint_union([classifying_groupoid(c)
                           for _, c in inertia_of_BG(group)])


# Double cosets


@dataclass(frozen=True, eq=False)
class DoubleCoset:
    representative: int
    elements: tp.Tuple[int, ...]
    stabilizer: FiniteGroup
    inclusion: GroupHom


@dataclass(frozen=True, eq=False)
class DoubleCosetDecomposition:
    '''
    G as the disjoint union of the double cosets f(H) a g(K), each with
    C_a = {(h, k) : f(h) a g(k)^-1 = a} inside H x K.
    '''
    ambient: FiniteGroup
    left: GroupHom
    right: GroupHom
    cosets: tp.Tuple[DoubleCoset, ...]

    def to_groupoid(self) -> FiniteGroupoid:
        return disjoint_union([classifying_groupoid(c.stabilizer)
                               for c in self.cosets])


def double_coset_fiber_product(f: GroupHom, g: GroupHom
                               ) -> DoubleCosetDecomposition:
    if f.codomain != g.codomain:
        raise MismatchedBase("homomorphisms do not share a codomain")
    ambient, h_gr, k_gr = f.codomain, f.domain, g.domain
    hk = direct_product(h_gr, k_gr)

    seen: tp.Set[int] = set()
    cosets = []
    for a in ambient.elements():
        if a in seen:
            continue
        elements = set()
        stab = []
        for h in h_gr.elements():
            left = ambient.mul(f(h), a)
            for k in k_gr.elements():
                b = ambient.mul(left, ambient.inv(g(k)))
                elements.add(b)
                if b == a:
                    stab.append(h * k_gr.order + k)
        seen.update(elements)
        sub, incl = subgroup(hk, stab, name=f"C{a}")
        cosets.append(DoubleCoset(a, tuple(sorted(elements)), sub, incl))
    logger.debug("%d double cosets in %s", len(cosets), ambient.name)
    return DoubleCosetDecomposition(ambient, f, g, tuple(cosets))


# Action groupoid fiber products


@dataclass(frozen=True, eq=False)
class GroupAction:
    group: FiniteGroup
    carrier: tp.Tuple[Label, ...]
    act: Action

    def groupoid(self) -> FiniteGroupoid:
        return action_groupoid(self.group, self.carrier, self.act)


@dataclass(frozen=True, eq=False)
class EquivariantMap:
    '''
    A hom-equivariant map of points: points(h.y) == hom(h).points(y).
    '''
    source: GroupAction
    target: GroupAction
    hom: GroupHom
    points: tp.Mapping[Label, Label]


def check_equivariance(m: EquivariantMap):
    s, t = m.source, m.target
    for h in s.group.elements():
        for y in s.carrier:
            if m.points[s.act(h, y)] != t.act(m.hom(h), m.points[y]):
                raise NotEquivariant(
                    f"map is not equivariant at ({h}, {y!r})", h, y)


def equivariant_functor(m: EquivariantMap) -> GroupoidFunctor:
    '''
    The functor of action groupoids induced by an equivariant map:
    (h, y) -> (hom(h), points(y)).
    '''
    s, t = m.source, m.target
    n_s, n_t = len(s.carrier), len(t.carrier)
    t_index = {x: i for i, x in enumerate(t.carrier)}
    obj_map = tuple(t_index[m.points[y]] for y in s.carrier)
    arr_map = tuple(m.hom(h) * n_t + obj_map[i]
                    for h in s.group.elements() for i in range(n_s))
    return GroupoidFunctor(s.groupoid(), t.groupoid(), obj_map, arr_map)


@dataclass(frozen=True, eq=False)
class ActionFiberProduct:
    '''
    H x K acting on P0 = {(y, z, gamma) : gamma p(y) = q(z)} by
    (h, k).(y, z, gamma) = (h y, k z, psi(k) gamma phi(h)^-1).
    '''
    left: EquivariantMap
    right: EquivariantMap
    group: FiniteGroup
    points: tp.Tuple[tp.Tuple[Label, Label, int], ...]
    groupoid: FiniteGroupoid


def action_fiber_product(left: EquivariantMap, right: EquivariantMap
                         ) -> ActionFiberProduct:
    if left.target.group != right.target.group or (
            tuple(left.target.carrier) != tuple(right.target.carrier)):
        raise MismatchedBase("equivariant maps do not share a target action")
    check_equivariance(left)
    check_equivariance(right)
    h_act, k_act, base = left.source, right.source, left.target
    g_gr = base.group
    phi, psi = left.hom, right.hom

    points = tuple(
        (y, z, gamma)
        for y in h_act.carrier for z in k_act.carrier
        for gamma in g_gr.elements()
        if base.act(gamma, left.points[y]) == right.points[z])
    hk = direct_product(h_act.group, k_act.group)
    n_k = k_act.group.order

    def act(pair: int, point: tp.Tuple) -> tp.Tuple:
        h, k = divmod(pair, n_k)
        y, z, gamma = point
        moved = g_gr.mul(g_gr.mul(psi(k), gamma), g_gr.inv(phi(h)))
        return (h_act.act(h, y), k_act.act(k, z), moved)

    groupoid = action_groupoid(hk, points, act)
    return ActionFiberProduct(left, right, hk, points, groupoid)


def comparison_functor(afp: ActionFiberProduct
                       ) -> tp.Tuple[GroupoidFunctor, FiberProductResult]:
    '''
    The isomorphism from the H x K action groupoid on P0 onto the fiber
    product of the two induced action groupoid functors.
    '''
    fp = fiber_product(equivariant_functor(afp.left),
                       equivariant_functor(afp.right))
    h_act, k_act = afp.left.source, afp.right.source
    base = afp.left.target
    y_idx = {y: i for i, y in enumerate(h_act.carrier)}
    z_idx = {z: i for i, z in enumerate(k_act.carrier)}
    x_idx = {x: i for i, x in enumerate(base.carrier)}
    n_x, n_y, n_z = len(base.carrier), len(h_act.carrier), len(k_act.carrier)
    n_k = k_act.group.order

    index = {lab: i for i, lab in enumerate(fp.total.objects)}
    obj_map = []
    for y, z, gamma in afp.points:
        alpha = gamma * n_x + x_idx[afp.left.points[y]]
        obj_map.append(index[(y, z, alpha)])

    arr_map = []
    n_p = len(afp.points)
    for a in afp.groupoid.arrows():
        pair, i = divmod(a, n_p)
        h, k = divmod(pair, n_k)
        y, z, _ = afp.points[i]
        u = h * n_y + y_idx[y]
        v = k * n_z + z_idx[z]
        arr_map.append(fp.arrow_id(obj_map[i], u, v))
    return GroupoidFunctor(afp.groupoid, fp.total, tuple(obj_map),
                           tuple(arr_map)), fp


def residue_gerbe(g: FiniteGroupoid, x: Label
                  ) -> tp.Tuple[FiniteGroup, FiniteGroupoid]:
    '''
    The inertia group I_x and its classifying groupoid B I_x.
    '''
    group = isotropy(g, x)
    return group, classifying_groupoid(group)
