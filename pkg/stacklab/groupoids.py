import logging
import networkx as nx
import numpy as np
import typing as tp

from collections import defaultdict
from dataclasses import dataclass, field

from stacklab.config import get_cap
from stacklab.errors import (NotAnAction, SizeCapExceeded, StacklabError,
                             UnknownObject, ValidationError)
from stacklab.groups import (FiniteGroup, GroupHom, group_from_table,
                             trivial_group)


logger = logging.getLogger(__name__)

Label = tp.Hashable
Action = tp.Callable[[int, Label], Label]


class FiniteGroupoid:
    '''
    A finite groupoid on objects 0..n-1 (carrying hashable labels) and dense
    arrow ids 0..m-1.

    Composition is diagrammatic: compose(f, g) is "f then g" and is defined
    exactly when tgt(f) == src(g). Hom-sets are indexed eagerly, so an
    instance is immutable and safe to share between threads.
    '''

    def __init__(self, objects: tp.Sequence[Label],
                 src: tp.Sequence[int], tgt: tp.Sequence[int],
                 compose: tp.Mapping[tp.Tuple[int, int], int],
                 identities: tp.Sequence[int],
                 arrow_labels: tp.Optional[tp.Sequence[tp.Any]] = None,
                 name: str = ""):
        self.name = name
        self.objects = tuple(objects)
        self.src = tuple(src)
        self.tgt = tuple(tgt)
        self.identities = tuple(identities)
        self.arrow_labels = (tuple(arrow_labels) if arrow_labels is not None
                             else tuple(range(len(self.src))))
        self._comp = dict(compose)
        self._index = {x: i for i, x in enumerate(self.objects)}
        if len(self._index) != len(self.objects):
            raise StacklabError(f"groupoid {name}: duplicate object labels")
        if len(self.src) != len(self.tgt):
            raise StacklabError(f"groupoid {name}: src and tgt lengths differ")

        homs = defaultdict(list)
        out = defaultdict(list)
        for f, (s, t) in enumerate(zip(self.src, self.tgt)):
            homs[(s, t)].append(f)
            out[s].append(f)
        self._homs = {k: tuple(v) for k, v in homs.items()}
        self._out = {k: tuple(v) for k, v in out.items()}
        self.inverses = tuple(self._find_inverse(f) for f in self.arrows())

    def _find_inverse(self, f: int) -> int:
        s, t = self.src[f], self.tgt[f]
        if s >= len(self.identities) or t >= len(self.identities):
            return -1
        for h in self.hom(t, s):
            if (self._comp.get((f, h)) == self.identities[s]
                    and self._comp.get((h, f)) == self.identities[t]):
                return h
        return -1

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_arrows(self) -> int:
        return len(self.src)

    def arrows(self) -> range:
        return range(len(self.src))

    def index_of(self, x: Label) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise UnknownObject(x)

    def hom(self, x: int, y: int) -> tp.Tuple[int, ...]:
        return self._homs.get((x, y), ())

    def out_arrows(self, x: int) -> tp.Tuple[int, ...]:
        return self._out.get(x, ())

    def compose(self, f: int, g: int) -> int:
        try:
            return self._comp[(f, g)]
        except KeyError:
            raise StacklabError(f"arrows {f} and {g} are not composable")

    def inverse(self, f: int) -> int:
        return self.inverses[f]

    def composition_table(self) -> tp.Dict[tp.Tuple[int, int], int]:
        return dict(self._comp)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroupoid):
            return NotImplemented
        return (self is other
                or (self.objects == other.objects and self.src == other.src
                    and self.tgt == other.tgt
                    and self.identities == other.identities
                    and self._comp == other._comp))

    def __hash__(self) -> int:
        return hash((self.n_objects, self.n_arrows))

    def __repr__(self) -> str:
        return (f"FiniteGroupoid({self.name or '?'}, objects={self.n_objects},"
                f" arrows={self.n_arrows})")


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tp.Tuple
    message: str


@dataclass
class ValidationReport:
    violations: tp.List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness: tp.Tuple, message: str):
        self.violations.append(Violation(axiom, witness, message))

    def __len__(self) -> int:
        return len(self.violations)

    def lines(self) -> tp.List[str]:
        return [f"{v.axiom} {v.witness}: {v.message}" for v in self.violations]


@dataclass(frozen=True, eq=False)
class GroupoidFunctor:
    '''
    Functor given on object indices and arrow ids.
    '''
    domain: FiniteGroupoid
    codomain: FiniteGroupoid
    obj_map: tp.Tuple[int, ...]
    arr_map: tp.Tuple[int, ...]

    def obj(self, x: int) -> int:
        return self.obj_map[x]

    def arr(self, f: int) -> int:
        return self.arr_map[f]


@dataclass(frozen=True, eq=False)
class NaturalTransformation:
    '''
    component[x] is an arrow source(x) -> target(x) of the common codomain.
    '''
    source: GroupoidFunctor
    target: GroupoidFunctor
    component: tp.Tuple[int, ...]


def _check_size(what: str, size: int, cap: tp.Optional[int]):
    cap = get_cap(cap)
    if size > cap:
        raise SizeCapExceeded(what, size, cap)


# Validation


def validate_groupoid(g: FiniteGroupoid) -> ValidationReport:
    '''
    Exhaustive axiom check.

    Inputs:
        g  [FiniteGroupoid]

    Outputs:
        [ValidationReport]: every violated axiom with its offending arrows;
                            empty iff `g` is a groupoid
    '''
    report = ValidationReport()
    n, m = g.n_objects, g.n_arrows

    for f in g.arrows():
        if not (0 <= g.src[f] < n and 0 <= g.tgt[f] < n):
            report.add("endpoints", (f,), "src or tgt is not an object")
    if len(g.identities) != n:
        report.add("identity", (), f"{len(g.identities)} identities for "
                   f"{n} objects")
        return report
    for x, i in enumerate(g.identities):
        if not (0 <= i < m) or g.src[i] != x or g.tgt[i] != x:
            report.add("identity", (x,), f"identity arrow {i} is not a loop "
                       f"at object {x}")
    if not report.ok:
        return report

    comp = g.composition_table()
    for (f, h), k in sorted(comp.items()):
        if not (0 <= f < m and 0 <= h < m) or g.tgt[f] != g.src[h]:
            report.add("compose-domain", (f, h), "defined on a pair that is "
                       "not composable")
        elif not (0 <= k < m) or g.src[k] != g.src[f] or g.tgt[k] != g.tgt[h]:
            report.add("compose-endpoints", (f, h, k),
                       "composite has the wrong source or target")

    for f in g.arrows():
        for h in g.out_arrows(g.tgt[f]):
            if (f, h) not in comp:
                report.add("compose-domain", (f, h), "composable pair without"
                           " a composite")
    if not report.ok:
        return report

    for f in g.arrows():
        s, t = g.src[f], g.tgt[f]
        if comp[(g.identities[s], f)] != f or comp[(f, g.identities[t])] != f:
            report.add("unit", (f,), "identities are not neutral")

    for f in g.arrows():
        for h in g.out_arrows(g.tgt[f]):
            fh = comp[(f, h)]
            for k in g.out_arrows(g.tgt[h]):
                if comp[(fh, k)] != comp[(f, comp[(h, k)])]:
                    report.add("associativity", (f, h, k),
                               "(f h) k != f (h k)")

    for f in g.arrows():
        if g.inverse(f) < 0:
            report.add("inverse", (f,), "arrow has no two-sided inverse")
    return report


def check_functor(f: GroupoidFunctor) -> ValidationReport:
    report = ValidationReport()
    d, c = f.domain, f.codomain
    if len(f.obj_map) != d.n_objects or len(f.arr_map) != d.n_arrows:
        report.add("shape", (), "object or arrow map has the wrong length")
        return report
    if any(not 0 <= x < c.n_objects for x in f.obj_map) or any(
            not 0 <= a < c.n_arrows for a in f.arr_map):
        report.add("range", (), "map leaves the codomain")
        return report
    for u in d.arrows():
        a = f.arr(u)
        if c.src[a] != f.obj(d.src[u]) or c.tgt[a] != f.obj(d.tgt[u]):
            report.add("endpoints", (u,), "src/tgt not preserved")
    for x in range(d.n_objects):
        if f.arr(d.identities[x]) != c.identities[f.obj(x)]:
            report.add("identity", (x,), "identity not preserved")
    if not report.ok:
        return report
    for (u, v), w in sorted(d.composition_table().items()):
        if c.compose(f.arr(u), f.arr(v)) != f.arr(w):
            report.add("compose", (u, v), "composition not preserved")
    return report


def functor(domain: FiniteGroupoid, codomain: FiniteGroupoid,
            obj_map: tp.Mapping[Label, Label],
            arr_map: tp.Union[tp.Sequence[int], tp.Mapping[int, int]]
            ) -> GroupoidFunctor:
    '''
    Builds a functor from an object-label map and an arrow-id map, checking
    every functor law.
    '''
    objs = tuple(codomain.index_of(obj_map[x]) for x in domain.objects)
    if isinstance(arr_map, tp.Mapping):
        arrs = tuple(arr_map[u] for u in domain.arrows())
    else:
        arrs = tuple(arr_map)
    f = GroupoidFunctor(domain, codomain, objs, arrs)
    report = check_functor(f)
    if not report.ok:
        raise ValidationError("not a functor: " + report.lines()[0], report)
    return f


def check_natural_transformation(nt: NaturalTransformation) -> bool:
    '''
    True iff component(x) target(u) == source(u) component(y) for every
    arrow u: x -> y.
    '''
    f, g = nt.source, nt.target
    if f.domain != g.domain or f.codomain != g.codomain:
        return False
    d, c = f.domain, f.codomain
    if len(nt.component) != d.n_objects:
        return False
    for x, eta in enumerate(nt.component):
        if not 0 <= eta < c.n_arrows:
            return False
        if c.src[eta] != f.obj(x) or c.tgt[eta] != g.obj(x):
            return False
    for u in d.arrows():
        x, y = d.src[u], d.tgt[u]
        lhs = c.compose(nt.component[x], g.arr(u))
        rhs = c.compose(f.arr(u), nt.component[y])
        if lhs != rhs:
            logger.debug("naturality fails on arrow %d", u)
            return False
    return True


def identity_transformation(f: GroupoidFunctor) -> NaturalTransformation:
    c = f.codomain
    return NaturalTransformation(
        f, f, tuple(c.identities[f.obj(x)] for x in range(f.domain.n_objects)))


# Constructors


def unit_groupoid(objects: tp.Union[int, tp.Sequence[Label]]
                  ) -> FiniteGroupoid:
    if isinstance(objects, int):
        objects = list(range(objects))
    n = len(objects)
    return FiniteGroupoid(objects, range(n), range(n),
                          {(i, i): i for i in range(n)}, range(n),
                          name=f"unit{n}")


def classifying_groupoid(group: FiniteGroup,
                         cap: tp.Optional[int] = None) -> FiniteGroupoid:
    '''
    BG: one object "*" whose arrows are the group elements, composed by the
    group product.
    '''
    _check_size("arrows", group.order, cap)
    comp = {(a, b): group.mul(a, b)
            for a in group.elements() for b in group.elements()}
    return FiniteGroupoid(["*"], [0] * group.order, [0] * group.order, comp,
                          [0], name=f"B{group.name}")


def action_groupoid(group: FiniteGroup, carrier: tp.Sequence[Label],
                    act: Action, cap: tp.Optional[int] = None
                    ) -> FiniteGroupoid:
    '''
    Action groupoid of a left action. Arrow (g, x): x -> g.x has id
    g * |X| + index(x); (g, x) then (h, g.x) is (h g, x).

    Inputs:
        group    [FiniteGroup]
        carrier  [tp.Sequence]: point labels
        act      [tp.Callable]: act(g, x) -> point label

    Outputs:
        [FiniteGroupoid]
    '''
    carrier = list(carrier)
    n = len(carrier)
    _check_size("arrows", group.order * n, cap)
    index = {x: i for i, x in enumerate(carrier)}

    moves = np.zeros((group.order, n), dtype=np.int64)
    for a in group.elements():
        for i, x in enumerate(carrier):
            y = act(a, x)
            if y not in index:
                raise NotAnAction(f"{y!r} is not a point of the carrier",
                                  a, x)
            moves[a, i] = index[y]
    for i, x in enumerate(carrier):
        if moves[0, i] != i:
            raise NotAnAction("identity moves a point", 0, x)
    for a in group.elements():
        for b in group.elements():
            ab = group.mul(a, b)
            bad = np.flatnonzero(moves[ab] != moves[a][moves[b]])
            if len(bad):
                raise NotAnAction(f"act({a}*{b}, x) != act({a}, act({b}, x))",
                                  ab, carrier[int(bad[0])])

    moves = moves.tolist()
    src, tgt, labels = [], [], []
    for a in group.elements():
        for i in range(n):
            src.append(i)
            tgt.append(moves[a][i])
            labels.append((a, carrier[i]))
    comp = {}
    for a in group.elements():
        for i in range(n):
            j = moves[a][i]
            for b in group.elements():
                comp[(a * n + i, b * n + j)] = group.mul(b, a) * n + i
    logger.debug("action groupoid of %s on %d points: %d arrows",
                 group.name, n, len(src))
    return FiniteGroupoid(carrier, src, tgt, comp, list(range(n)),
                          arrow_labels=labels,
                          name=f"[{n}/{group.name}]")


def permutation_action(group: FiniteGroup
                       ) -> tp.Tuple[tp.List[int], Action]:
    '''
    The left action g.x = x^(g^-1) on the points of a permutation group.
    '''
    if group.perms is None:
        raise StacklabError(f"{group.name} has no permutation representation")
    perms = group.perms

    def act(a: int, x: int) -> int:
        return perms[group.inv(a)][x]

    return list(range(group.degree)), act


def disjoint_union(groupoids: tp.Sequence[FiniteGroupoid]) -> FiniteGroupoid:
    '''
    Objects are labelled (summand index, label).
    '''
    objects, src, tgt, ids, labels = [], [], [], [], []
    comp = {}
    obj_off = arr_off = 0
    for k, g in enumerate(groupoids):
        objects.extend((k, x) for x in g.objects)
        src.extend(s + obj_off for s in g.src)
        tgt.extend(t + obj_off for t in g.tgt)
        ids.extend(i + arr_off for i in g.identities)
        labels.extend((k, a) for a in g.arrow_labels)
        for (f, h), r in g.composition_table().items():
            comp[(f + arr_off, h + arr_off)] = r + arr_off
        obj_off += g.n_objects
        arr_off += g.n_arrows
    return FiniteGroupoid(objects, src, tgt, comp, ids, arrow_labels=labels,
                          name="+".join(g.name for g in groupoids))


def product_groupoid(a: FiniteGroupoid, b: FiniteGroupoid,
                     cap: tp.Optional[int] = None) -> FiniteGroupoid:
    '''
    Objects (x, y) at index i * |B0| + j, arrows (f, g) at f * |B1| + g.
    '''
    nb, mb = b.n_objects, b.n_arrows
    _check_size("arrows", a.n_arrows * mb, cap)
    objects = [(x, y) for x in a.objects for y in b.objects]
    src, tgt, labels = [], [], []
    for f in a.arrows():
        for h in b.arrows():
            src.append(a.src[f] * nb + b.src[h])
            tgt.append(a.tgt[f] * nb + b.tgt[h])
            labels.append((a.arrow_labels[f], b.arrow_labels[h]))
    comp = {}
    b_comp = b.composition_table()
    for (f1, f2), f in a.composition_table().items():
        for (h1, h2), h in b_comp.items():
            comp[(f1 * mb + h1, f2 * mb + h2)] = f * mb + h
    ids = [a.identities[x] * mb + b.identities[y]
           for x in range(a.n_objects) for y in range(nb)]
    return FiniteGroupoid(objects, src, tgt, comp, ids, arrow_labels=labels,
                          name=f"{a.name}x{b.name}")


def restrict_groupoid(g: FiniteGroupoid, sub: tp.Iterable[Label]
                      ) -> FiniteGroupoid:
    '''
    Full subgroupoid on `sub`; objects and arrows keep their relative order
    and arrow labels point back at the ambient arrow ids.
    '''
    keep = sorted({g.index_of(x) for x in sub})
    pos = {x: i for i, x in enumerate(keep)}
    arrows = [f for f in g.arrows() if g.src[f] in pos and g.tgt[f] in pos]
    apos = {f: i for i, f in enumerate(arrows)}
    comp = {(apos[f], apos[h]): apos[r]
            for (f, h), r in g.composition_table().items()
            if f in apos and h in apos}
    return FiniteGroupoid(
        [g.objects[x] for x in keep],
        [pos[g.src[f]] for f in arrows], [pos[g.tgt[f]] for f in arrows],
        comp, [apos[g.identities[x]] for x in keep], arrow_labels=arrows,
        name=f"{g.name}|{len(keep)}")


def inclusion_functor(g: FiniteGroupoid, sub: tp.Iterable[Label]
                      ) -> GroupoidFunctor:
    r = restrict_groupoid(g, sub)
    return GroupoidFunctor(r, g, tuple(g.index_of(x) for x in r.objects),
                           tuple(r.arrow_labels))


def identity_functor(g: FiniteGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(g, g, tuple(range(g.n_objects)),
                           tuple(g.arrows()))


def compose_functors(f: GroupoidFunctor, g: GroupoidFunctor
                     ) -> GroupoidFunctor:
    '''
    f then g.
    '''
    if f.codomain != g.domain:
        raise StacklabError("functors are not composable")
    return GroupoidFunctor(f.domain, g.codomain,
                           tuple(g.obj(x) for x in f.obj_map),
                           tuple(g.arr(u) for u in f.arr_map))


def diagonal_functor(g: FiniteGroupoid) -> GroupoidFunctor:
    gg = product_groupoid(g, g)
    n, m = g.n_objects, g.n_arrows
    return GroupoidFunctor(g, gg, tuple(x * n + x for x in range(n)),
                           tuple(f * m + f for f in g.arrows()))


def hom_functor(h: GroupHom) -> GroupoidFunctor:
    '''
    Bh: BH -> BG.
    '''
    return GroupoidFunctor(classifying_groupoid(h.domain),
                           classifying_groupoid(h.codomain), (0,),
                           tuple(h.image))


# Invariants


def isotropy(g: FiniteGroupoid, x: Label) -> FiniteGroup:
    '''
    The group of arrows x -> x. Element 0 is the identity arrow, the others
    follow in arrow id order; `labels` maps element ids back to arrow ids.
    '''
    i = g.index_of(x)
    ident = g.identities[i]
    loops = [ident] + [f for f in g.hom(i, i) if f != ident]
    pos = {f: k for k, f in enumerate(loops)}
    table = [[pos[g.compose(a, b)] for b in loops] for a in loops]
    return group_from_table(f"I({x})", table, labels=loops)


def orbit(g: FiniteGroupoid, x: Label) -> tp.List[Label]:
    i = g.index_of(x)
    reach = sorted({g.tgt[f] for f in g.out_arrows(i)})
    return [g.objects[y] for y in reach]


def pi0(g: FiniteGroupoid) -> tp.List[tp.List[Label]]:
    '''
    Connected components, each sorted by object index, ordered by their
    least object.
    '''
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n_objects))
    graph.add_edges_from(zip(g.src, g.tgt))
    components = sorted(sorted(c) for c in nx.connected_components(graph))
    return [[g.objects[x] for x in c] for c in components]


def coarse_space(g: FiniteGroupoid
                 ) -> tp.Tuple[tp.List[int], tp.Dict[Label, int]]:
    '''
    The orbit set X/R as class indices 0..k-1 and the quotient map.
    '''
    classes = pi0(g)
    projection = {x: k for k, c in enumerate(classes) for x in c}
    return list(range(len(classes))), projection


def isotropy_orders(g: FiniteGroupoid) -> tp.List[int]:
    return [len(g.hom(i, i)) for i in range(g.n_objects)]


def classifying_homotopy(group: FiniteGroup, up_to: int = 3
                         ) -> tp.Dict[int, FiniteGroup]:
    '''
    Homotopy groups of BG for a discrete group: pi_1 = G and pi_n trivial
    for n >= 2, i.e. pi_n(BG) = pi_(n-1)(G) where G has only pi_0.
    '''
    return {n: (group if n == 1 else trivial_group())
            for n in range(1, up_to + 1)}
