import logging
import typing as tp

from dataclasses import dataclass, field

from stacklab.config import get_params
from stacklab.errors import IsomorphismSearchLimit
from stacklab.groupoids import (FiniteGroupoid, GroupoidFunctor, Label,
                                inclusion_functor, isotropy, pi0,
                                restrict_groupoid)
from stacklab.groups import (FiniteGroup, GroupHom, abelianization_profile,
                             derived_subgroup, element_order,
                             element_order_profile, generating_set)


logger = logging.getLogger(__name__)


@dataclass
class Certificate:
    '''
    Outcome of a weak equivalence check: the hom-set bijections and the
    essential-surjectivity witnesses, or the first failure.
    '''
    ok: bool
    failure: tp.Optional[str] = None
    bijections: tp.Dict[tp.Tuple[int, int], tp.Dict[int, int]] = field(
        default_factory=dict)
    essential: tp.Dict[int, tp.Tuple[int, int]] = field(default_factory=dict)


def is_weak_equivalence(f: GroupoidFunctor) -> tp.Tuple[bool, Certificate]:
    '''
    True iff f is fully faithful and essentially surjective.

    Inputs:
        f  [GroupoidFunctor]

    Outputs:
        [tuple]
          ok           [bool]
          certificate  [Certificate]: bijection per pair of domain objects,
                                      and for every codomain object c a
                                      pair (x, arrow F(x) -> c)
    '''
    d, c = f.domain, f.codomain
    cert = Certificate(ok=True)
    for x in range(d.n_objects):
        for y in range(d.n_objects):
            source = d.hom(x, y)
            target = c.hom(f.obj(x), f.obj(y))
            images = {u: f.arr(u) for u in source}
            if len(set(images.values())) != len(source) or (
                    len(source) != len(target)):
                cert.ok = False
                cert.failure = (f"not full and faithful on ({d.objects[x]!r},"
                                f" {d.objects[y]!r}): |Hom| {len(source)} vs "
                                f"{len(target)}")
                return False, cert
            cert.bijections[(x, y)] = images

    image = {}
    for x in range(d.n_objects):
        image.setdefault(f.obj(x), x)
    for obj in range(c.n_objects):
        witness = None
        for a in c.out_arrows(obj):
            if c.tgt[a] in image:
                witness = (image[c.tgt[a]], c.inverse(a))
                break
        if witness is None:
            cert.ok = False
            cert.failure = (f"object {c.objects[obj]!r} is not isomorphic to "
                            f"an image object")
            return False, cert
        cert.essential[obj] = witness
    return True, cert


def is_elementary_morita(f: GroupoidFunctor) -> bool:
    '''
    Surjective on objects, and every domain arrow corresponds to exactly one
    codomain arrow between the image objects.
    '''
    d, c = f.domain, f.codomain
    if set(f.obj_map) != set(range(c.n_objects)):
        return False
    pulled_back = sum(len(c.hom(f.obj(x), f.obj(y)))
                      for x in range(d.n_objects) for y in range(d.n_objects))
    if pulled_back != d.n_arrows:
        return False
    seen = {(d.src[u], d.tgt[u], f.arr(u)) for u in d.arrows()}
    return len(seen) == d.n_arrows


@dataclass(frozen=True, eq=False)
class Skeleton:
    '''
    One representative (least object index) per connected component.
    `retraction[x]` is the chosen arrow x -> representative(x), the identity
    on representatives.
    '''
    groupoid: FiniteGroupoid
    inclusion: GroupoidFunctor
    representative: tp.Tuple[int, ...]
    retraction: tp.Tuple[int, ...]


def skeleton(g: FiniteGroupoid) -> Skeleton:
    classes = pi0(g)
    reps = [g.index_of(c[0]) for c in classes]
    rep_of = [0] * g.n_objects
    for c, r in zip(classes, reps):
        for x in c:
            rep_of[g.index_of(x)] = r
    tau = []
    for x in range(g.n_objects):
        r = rep_of[x]
        tau.append(g.identities[x] if x == r else min(g.hom(x, r)))
    labels = [g.objects[r] for r in reps]
    return Skeleton(restrict_groupoid(g, labels), inclusion_functor(g, labels),
                    tuple(rep_of), tuple(tau))


def retraction_functor(sk: Skeleton) -> GroupoidFunctor:
    '''
    g -> skeleton(g), sending u: x -> y to tau_x^-1 u tau_y.
    '''
    g = sk.inclusion.codomain
    s = sk.groupoid
    pos = {g.index_of(x): i for i, x in enumerate(s.objects)}
    local = {ambient: i for i, ambient in enumerate(s.arrow_labels)}
    obj_map = tuple(pos[sk.representative[x]] for x in range(g.n_objects))
    arr_map = []
    for u in g.arrows():
        x, y = g.src[u], g.tgt[u]
        loop = g.compose(g.compose(g.inverse(sk.retraction[x]), u),
                         sk.retraction[y])
        arr_map.append(local[loop])
    return GroupoidFunctor(g, s, obj_map, tuple(arr_map))


def isotropy_profile(g: FiniteGroupoid) -> tp.List[int]:
    '''
    Sorted isotropy orders, one per connected component.
    '''
    return sorted(len(g.hom(g.index_of(c[0]), g.index_of(c[0])))
                  for c in pi0(g))


# Group isomorphism


def _invariants(g: FiniteGroup) -> tp.Tuple:
    return (g.order, element_order_profile(g), len(derived_subgroup(g)),
            abelianization_profile(g))


def _extend(a: FiniteGroup, b: FiniteGroup, gens: tp.Sequence[int],
            images: tp.Sequence[int]) -> tp.Optional[tp.Dict[int, int]]:
    '''
    Propagates gens -> images over the Cayley graph of the subgroup they
    generate; None when two paths disagree or the map stops being injective.
    '''
    mapping = {0: 0}
    queue = [0]
    for x in queue:
        fx = mapping[x]
        for s, t in zip(gens, images):
            y, fy = a.mul(x, s), b.mul(fx, t)
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                mapping[y] = fy
                queue.append(y)
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def group_isomorphic(a: FiniteGroup, b: FiniteGroup
                     ) -> tp.Optional[GroupHom]:
    '''
    An explicit isomorphism a -> b, or None when none exists.

    Invariant screening (order, element order multiset, derived subgroup,
    abelianization) runs first, then generator images are backtracked over
    a greedy generating set of `a`.
    '''
    if a == b:
        return GroupHom(a, b, tuple(a.elements()))
    if _invariants(a) != _invariants(b):
        return None

    params = get_params()
    if a.order > params['iso_order']:
        raise IsomorphismSearchLimit(
            f"order {a.order} exceeds the isomorphism search bound "
            f"{params['iso_order']}")
    gens = generating_set(a)
    if len(gens) > params['iso_gens']:
        raise IsomorphismSearchLimit(
            f"{a.name} needs {len(gens)} generators, bound is "
            f"{params['iso_gens']}")

    candidates = [[t for t in b.elements()
                   if element_order(b, t) == element_order(a, s)]
                  for s in gens]

    def search(k: int, images: tp.List[int]) -> tp.Optional[tp.Dict]:
        if k == len(gens):
            mapping = _extend(a, b, gens, images)
            return mapping if mapping and len(mapping) == a.order else None
        for t in candidates[k]:
            trial = images + [t]
            if _extend(a, b, gens[:k + 1], trial) is None:
                continue
            found = search(k + 1, trial)
            if found is not None:
                return found
        return None

    mapping = search(0, [])
    if mapping is None:
        logger.debug("no isomorphism %s -> %s", a.name, b.name)
        return None
    return GroupHom(a, b, tuple(mapping[x] for x in a.elements()))


# Morita equivalence


@dataclass(frozen=True, eq=False)
class MoritaWitness:
    '''
    Matching of connected components with an isomorphism of isotropy groups
    at the representatives, read as a span skeleton(g) -> g, skeleton(g) -> h.
    '''
    left: FiniteGroupoid
    right: FiniteGroupoid
    matching: tp.Tuple[tp.Tuple[Label, Label, GroupHom], ...]

    def span(self) -> tp.Tuple[GroupoidFunctor, GroupoidFunctor]:
        sk = skeleton(self.left)
        s, h = sk.groupoid, self.right
        matched = {x: (y, iso) for x, y, iso in self.matching}
        obj_map, arr_map = [], []
        isos = {}
        for x in s.objects:
            y, iso = matched[x]
            obj_map.append(h.index_of(y))
            isos[x] = (isotropy(self.left, x), isotropy(h, y), iso)
        for a in s.arrows():
            x = s.objects[s.src[a]]
            src_group, tgt_group, iso = isos[x]
            element = src_group.labels.index(s.arrow_labels[a])
            arr_map.append(tgt_group.labels[iso(element)])
        return sk.inclusion, GroupoidFunctor(s, h, tuple(obj_map),
                                             tuple(arr_map))


def morita_equivalent(g: FiniteGroupoid, h: FiniteGroupoid
                      ) -> tp.Tuple[bool, tp.Optional[MoritaWitness]]:
    '''
    Decides Morita equivalence by matching components with isomorphic
    isotropy groups.

    Outputs:
        [tuple]
          equivalent  [bool]
          witness     [MoritaWitness]: None when not equivalent
    '''
    g_classes, h_classes = pi0(g), pi0(h)
    if len(g_classes) != len(h_classes):
        return False, None
    if isotropy_profile(g) != isotropy_profile(h):
        return False, None

    h_groups = [isotropy(h, c[0]) for c in h_classes]
    used = [False] * len(h_classes)
    matching = []
    for c in g_classes:
        group = isotropy(g, c[0])
        for k, other in enumerate(h_groups):
            if used[k] or other.order != group.order:
                continue
            iso = group_isomorphic(group, other)
            if iso is not None:
                used[k] = True
                matching.append((c[0], h_classes[k][0], iso))
                break
        else:
            logger.debug("component of %r has no partner", c[0])
            return False, None
    return True, MoritaWitness(g, h, tuple(matching))
