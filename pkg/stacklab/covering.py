import itertools
import logging
import networkx as nx
import typing as tp

from dataclasses import dataclass

import sympy.combinatorics as comb

from stacklab.bass_serre import bass_serre_ball, symbol_loop
from stacklab.config import get_params
from stacklab.errors import CapExceeded, InvalidAction, StacklabError
from stacklab.gog import (EdgeGroup, GraphOfGroups, Pi1Presentation,
                          Relation, SymWord, VertexGroup, coarse_graph,
                          euler_characteristic, pi1_presentation,
                          render_symbols)
from stacklab.groups import (FiniteGroup, GroupHom, element_order,
                             right_cosets, subgroup)


logger = logging.getLogger(__name__)

Perm = tp.Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Pi1Action:
    '''
    A right action of pi_1 on the points 0..degree-1 (1-based outside the
    library): images[symbol] is the one-line permutation p -> p^symbol, and
    p^(xy) = (p^x)^y.
    '''
    presentation: Pi1Presentation
    degree: int
    images: tp.Dict[str, Perm]

    def apply(self, word: SymWord, point: int) -> int:
        for symbol, k in word:
            perm = self.images[symbol]
            point = perm[point] if k > 0 else perm.index(point)
        return point

    def permutation(self, word: SymWord) -> Perm:
        return tuple(self.apply(word, p) for p in range(self.degree))

    def key(self) -> tp.Tuple:
        return (self.degree,
                tuple(self.images[s] for s in self.presentation.generators))


def malformed_generator(a: Pi1Action) -> tp.Optional[str]:
    '''
    First generator whose image is missing or not a permutation of the
    fiber.
    '''
    points = list(range(a.degree))
    for s in a.presentation.generators:
        perm = a.images.get(s)
        if perm is None or sorted(perm) != points:
            return s
    return None


def validate_action(a: Pi1Action
                    ) -> tp.Tuple[bool, tp.Optional[Relation]]:
    '''
    True iff every generator acts by a permutation and every relation of
    the presentation acts trivially.

    Outputs:
        [tuple]
          ok        [bool]
          relation  [Relation]:  first relation acting nontrivially; None
                                 when ok or when an image is malformed
    '''
    bad = malformed_generator(a)
    if bad is not None:
        logger.debug("image of %s is not a permutation of %d points", bad,
                     a.degree)
        return False, None
    identity = tuple(range(a.degree))
    for rel in a.presentation.relations:
        if a.permutation(rel.relator()) != identity:
            logger.debug("relation %s acts nontrivially",
                         render_symbols(rel.relator()))
            return False, rel
    return True, None


def orbits(a: Pi1Action) -> tp.List[tp.List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(range(a.degree))
    for perm in a.images.values():
        graph.add_edges_from(enumerate(perm))
    return sorted(sorted(c) for c in nx.connected_components(graph))


def is_connected_cover(a: Pi1Action) -> bool:
    return len(orbits(a)) == 1


def direct_sum(a: Pi1Action, b: Pi1Action) -> Pi1Action:
    n = a.degree
    images = {s: a.images[s] + tuple(p + n for p in b.images[s])
              for s in a.presentation.generators}
    return Pi1Action(a.presentation, n + b.degree, images)


# Canonical forms


def _relabel(a: Pi1Action, start: int, points: tp.Sequence[int]
             ) -> tp.Tuple[tp.Tuple[Perm, ...], tp.List[int]]:
    gens = a.presentation.generators
    label = {start: 0}
    order = [start]
    for p in order:
        for s in gens:
            q = a.images[s][p]
            if q not in label:
                label[q] = len(order)
                order.append(q)
    images = tuple(tuple(label[a.images[s][p]] for p in order) for s in gens)
    return images, order


def canonical_action(a: Pi1Action) -> Pi1Action:
    '''
    Relabels points so that each orbit is numbered breadth first from the
    start point giving the least image sequence; orbits are then sorted.
    '''
    pieces = []
    for orbit in orbits(a):
        best = min(_relabel(a, p, orbit)[0] for p in orbit)
        pieces.append((len(orbit), best))
    pieces.sort()
    gens = a.presentation.generators
    images = {s: [] for s in gens}
    offset = 0
    for size, block in pieces:
        for s, perm in zip(gens, block):
            images[s].extend(p + offset for p in perm)
        offset += size
    return Pi1Action(a.presentation, a.degree,
                     {s: tuple(v) for s, v in images.items()})


def actions_conjugate(a: Pi1Action, b: Pi1Action) -> bool:
    if a.degree != b.degree or (a.presentation.generators
                                != b.presentation.generators):
        return False
    return canonical_action(a).key() == canonical_action(b).key()


def _generator_order(pres: Pi1Presentation, symbol: str
                     ) -> tp.Optional[int]:
    kind, ref, value = pres.symbols[symbol]
    if kind == "v":
        return element_order(pres.graph.group(ref), value)
    return None


def enumerate_actions(pres: Pi1Presentation, n_max: int,
                      cap: tp.Optional[int] = None) -> tp.List[Pi1Action]:
    '''
    All transitive actions of degree <= n_max up to simultaneous
    conjugation, by backtracking over generator images. A generator of a
    vertex group only takes permutations whose order divides its own, and a
    relation is checked as soon as all its symbols carry images.

    Inputs:
        pres   [Pi1Presentation]
        n_max  [int]
        cap    [int]:  largest allowed n_max, `max_degree` param by default

    Outputs:
        [tp.List[Pi1Action]]: canonical forms sorted by degree and images
    '''
    cap = get_params()['max_degree'] if cap is None else cap
    if n_max > cap:
        raise CapExceeded(f"degree {n_max} exceeds the enumeration cap {cap}")
    gens = list(pres.generators)
    pos = {s: i for i, s in enumerate(gens)}
    relators = [r.relator() for r in pres.relations]
    ready: tp.Dict[int, tp.List[SymWord]] = {i: [] for i in range(len(gens))}
    for rel in relators:
        last = max((pos[s] for s, _ in rel), default=-1)
        if last >= 0:
            ready[last].append(rel)

    found: tp.Dict[tp.Tuple, Pi1Action] = {}
    for n in range(1, n_max + 1):
        perms = list(itertools.permutations(range(n)))
        orders = {p: comb.Permutation(list(p)).order() for p in perms}
        candidates = []
        for s in gens:
            k = _generator_order(pres, s)
            candidates.append([p for p in perms
                               if k is None or k % orders[p] == 0])

        def search(i: int, images: tp.Dict[str, Perm]):
            if i == len(gens):
                action = Pi1Action(pres, n, dict(images))
                if is_connected_cover(action):
                    canon = canonical_action(action)
                    found.setdefault(canon.key(), canon)
                return
            for p in candidates[i]:
                images[gens[i]] = p
                partial = Pi1Action(pres, n, images)
                identity = tuple(range(n))
                if all(partial.permutation(rel) == identity
                       for rel in ready[i]):
                    search(i + 1, images)
                del images[gens[i]]

        search(0, {})
    logger.info("%d transitive actions of degree <= %d", len(found), n_max)
    return [found[k] for k in sorted(found)]


# Covers


@dataclass(frozen=True, eq=False)
class CoveringGoG:
    '''
    The covering graph of groups of a pi_1-set.

    Each covering vertex over v is an orbit of G_v on the fiber, carrying
    the stabilizer of its least point (`vertex_points`), embedded into G_v.
    Each covering edge over e is an orbit of G_e acting through incl_v, with
    `conjugators[edge] = (x, y)` such that p^x is the edge point on the
    v side and p'^y its image on the w side.
    '''
    base: GraphOfGroups
    action: Pi1Action
    total: GraphOfGroups
    vertex_map: tp.Dict[str, str]
    edge_map: tp.Dict[str, str]
    vertex_points: tp.Dict[str, int]
    edge_points: tp.Dict[str, int]
    vertex_embeddings: tp.Dict[str, GroupHom]
    edge_embeddings: tp.Dict[str, GroupHom]
    conjugators: tp.Dict[str, tp.Tuple[int, int]]

    @property
    def degree(self) -> int:
        return self.action.degree

    def over(self, vid: str) -> tp.List[str]:
        return [u for u in self.total.vertex_ids if self.vertex_map[u] == vid]

    def components(self) -> tp.List[tp.List[str]]:
        graph = coarse_graph(self.total)
        order = {v: i for i, v in enumerate(self.total.vertex_ids)}
        comps = [sorted(c, key=order.get)
                 for c in nx.connected_components(graph)]
        return sorted(comps, key=lambda c: order[c[0]])


def _vertex_perms(a: Pi1Action, vid: str) -> tp.List[Perm]:
    pres = a.presentation
    group = pres.graph.group(vid)
    return [a.permutation(pres.vertex_word(vid, x))
            for x in group.elements()]


def _orbit_data(perms: tp.List[Perm], degree: int
                ) -> tp.List[tp.Tuple[int, tp.List[int], tp.Dict[int, int]]]:
    '''
    Orbits of a group acting through `perms` (element id -> permutation).
    Returns (least point, stabilizer elements, point -> least conjugator
    x with least^x = point) per orbit.
    '''
    seen: tp.Set[int] = set()
    out = []
    for p in range(degree):
        if p in seen:
            continue
        reach: tp.Dict[int, int] = {}
        for x, perm in enumerate(perms):
            reach.setdefault(perm[p], x)
        seen.update(reach)
        stab = [x for x, perm in enumerate(perms) if perm[p] == p]
        out.append((p, stab, reach))
    return out


def _crossing(a: Pi1Action, e: EdgeGroup) -> Perm:
    pres = a.presentation
    if e.id not in pres.stable:
        return tuple(range(a.degree))
    t = pres.stable[e.id]
    return a.permutation(((t, pres.symbols[t][2]),))


def covering_from_action(g: GraphOfGroups, a: Pi1Action) -> CoveringGoG:
    '''
    Builds the covering graph of groups classified by the action.

    Inputs:
        g  [GraphOfGroups]:  base, the graph of the action's presentation
        a  [Pi1Action]

    Outputs:
        [CoveringGoG]
    '''
    bad = malformed_generator(a)
    if bad is not None:
        raise InvalidAction(f"image of {bad} is not a permutation of "
                            f"{a.degree} points")
    ok, rel = validate_action(a)
    if not ok:
        raise InvalidAction(f"relation {render_symbols(rel.relator())} acts "
                            f"nontrivially", render_symbols(rel.relator()))
    if a.presentation.graph is not g:
        raise InvalidAction("action is not over this graph of groups")

    vertices, vertex_map, vertex_points, vertex_emb = [], {}, {}, {}
    perms_of: tp.Dict[str, tp.List[Perm]] = {}
    locate: tp.Dict[str, tp.Dict[int, tp.Tuple[str, int]]] = {}
    for v in g.vertices:
        perms = _vertex_perms(a, v.id)
        perms_of[v.id] = perms
        locate[v.id] = {}
        for k, (p, stab, reach) in enumerate(_orbit_data(perms, a.degree)):
            uid = f"{v.id}.{k}"
            sub, incl = subgroup(v.group, stab, name=f"{v.group.name}_{p}")
            vertices.append(VertexGroup(uid, sub))
            vertex_map[uid] = v.id
            vertex_points[uid] = p
            vertex_emb[uid] = incl
            for q, x in reach.items():
                locate[v.id][q] = (uid, x)

    def end_inclusion(vid: str, point: int, incl: GroupHom,
                      stab_sub: FiniteGroup, stab_incl: GroupHom
                      ) -> tp.Tuple[str, int, GroupHom]:
        uid, x = locate[vid][point]
        group = g.group(vid)
        local = {y: i for i, y in enumerate(vertex_emb[uid].image)}
        image = tuple(
            local[group.mul(group.mul(x, incl(stab_incl(b))), group.inv(x))]
            for b in stab_sub.elements())
        target = next(vg.group for vg in vertices if vg.id == uid)
        return uid, x, GroupHom(stab_sub, target, image)

    edges, edge_map, edge_points, edge_emb, conjugators = [], {}, {}, {}, {}
    for e in g.edges:
        perms_v = perms_of[e.v]
        edge_perms = [perms_v[e.incl_v(b)] for b in e.group.elements()]
        cross = _crossing(a, e)
        for k, (q, stab, _) in enumerate(_orbit_data(edge_perms, a.degree)):
            eid = f"{e.id}.{k}"
            sub, incl = subgroup(e.group, stab, name=f"{e.group.name}_{q}")
            v_end, x, hom_v = end_inclusion(e.v, q, e.incl_v, sub, incl)
            w_end, y, hom_w = end_inclusion(e.w, cross[q], e.incl_w, sub,
                                            incl)
            edges.append(EdgeGroup(eid, v_end, w_end, sub, hom_v, hom_w))
            edge_map[eid] = e.id
            edge_points[eid] = q
            edge_emb[eid] = incl
            conjugators[eid] = (x, y)

    base_cover = locate[a.presentation.basepoint][0][0]
    total = GraphOfGroups(vertices, edges, basepoint=base_cover,
                          name=f"{g.name}~{a.degree}")
    logger.info("cover of %s of degree %d: %d vertices, %d edges", g.name,
                a.degree, len(vertices), len(edges))
    return CoveringGoG(g, a, total, vertex_map, edge_map, vertex_points,
                       edge_points, vertex_emb, edge_emb, conjugators)


def monodromy(c: CoveringGoG) -> Pi1Action:
    '''
    Lifts every presentation generator through the cover. The fiber over a
    base vertex v consists of pairs (covering vertex u, right coset of the
    embedded G_u in G_v); vertex elements act by right multiplication and
    edges are crossed through the edge fibers.
    '''
    g, total = c.base, c.total
    pres = c.action.presentation

    def coset_rep(uid: str, z: int) -> int:
        group = g.group(c.vertex_map[uid])
        return min(group.mul(s, z) for s in c.vertex_embeddings[uid].image)

    fibers: tp.Dict[str, tp.List[tp.Tuple[str, int]]] = {}
    for v in g.vertices:
        points = []
        for uid in c.over(v.id):
            image = c.vertex_embeddings[uid].image
            points.extend((uid, coset[0])
                          for coset in right_cosets(v.group, image))
        fibers[v.id] = points

    forward: tp.Dict[str, tp.Dict[tp.Tuple[str, int], tp.Tuple[str, int]]]
    forward = {e.id: {} for e in g.edges}
    for ce in total.edges:
        e = g.edge(c.edge_map[ce.id])
        x, y = c.conjugators[ce.id]
        gv, gw = g.group(e.v), g.group(e.w)
        for b in e.group.elements():
            v_point = (ce.v, coset_rep(ce.v, gv.mul(x, e.incl_v(b))))
            w_point = (ce.w, coset_rep(ce.w, gw.mul(y, e.incl_w(b))))
            forward[e.id][v_point] = w_point
    backward = {eid: {w: v for v, w in m.items()}
                for eid, m in forward.items()}

    def walk(point, syllables):
        for kind, ref, value in syllables:
            if kind == "v":
                uid, r = point
                group = g.group(c.vertex_map[uid])
                point = (uid, coset_rep(uid, group.mul(r, value)))
            else:
                point = (forward if value > 0 else backward)[ref][point]
        return point

    base_fiber = fibers[pres.basepoint]
    index = {p: i for i, p in enumerate(base_fiber)}
    images = {}
    for s in pres.generators:
        syllables = symbol_loop(pres, s).syllables
        images[s] = tuple(index[walk(p, syllables)] for p in base_fiber)
    return Pi1Action(pres, len(base_fiber), images)


def inertia_cartesian_check(g: GraphOfGroups, a: Pi1Action, vid: str,
                            point: int) -> bool:
    '''
    Compares the stabilizer of `point` in G_v, read off the action, with the
    vertex group of the covering vertex through it, embedded into G_v and
    conjugated from that vertex's chosen point.
    '''
    if not 0 <= point < a.degree:
        raise StacklabError(f"point {point} is not in the fiber")
    c = covering_from_action(g, a)
    pres = a.presentation
    group = g.group(vid)

    def move(x: int, p: int) -> int:
        return a.apply(pres.vertex_word(vid, x), p)

    direct = {x for x in group.elements() if move(x, point) == point}
    for uid in c.over(vid):
        p = c.vertex_points[uid]
        z = next((x for x in group.elements() if move(x, p) == point), None)
        if z is None:
            continue
        emb = c.vertex_embeddings[uid]
        local = c.total.group(uid)
        if emb.domain.order != local.order:
            return False
        conj = {group.mul(group.mul(group.inv(z), emb(s)), z)
                for s in local.elements()}
        return conj == direct
    return False


def universal_cover_ball(g: GraphOfGroups, radius: int,
                         cap: tp.Optional[int] = None) -> nx.Graph:
    '''
    The radius-r ball of the universal cover, which for a graph of groups is
    its Bass-Serre tree.
    '''
    pi1_presentation(g)
    return bass_serre_ball(g, radius, cap=cap)


def cover_euler_check(c: CoveringGoG) -> bool:
    return (euler_characteristic(c.total)
            == c.degree * euler_characteristic(c.base))


def torsion_free_cover(g: GraphOfGroups, n_max: int,
                       cap: tp.Optional[int] = None
                       ) -> tp.Optional[CoveringGoG]:
    '''
    Least degree connected cover whose vertex groups are all trivial, found
    among the transitive actions of degree <= n_max. None is inconclusive:
    a larger degree may still work.
    '''
    pres = pi1_presentation(g)
    for a in enumerate_actions(pres, n_max, cap=cap):
        # every vertex group acts freely on the fiber
        if all(perm[p] != p for v in g.vertices
               for perm in _vertex_perms(a, v.id)[1:]
               for p in range(a.degree)):
            logger.info("torsion free cover of %s in degree %d", g.name,
                        a.degree)
            return covering_from_action(g, a)
    return None
