import functools
import logging
import math
import networkx as nx
import typing as tp

from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from stacklab.errors import (DisconnectedGraph, InvalidGroup,
                             NonInjectiveInclusion, StacklabError,
                             UnknownObject)
from stacklab.groups import (FiniteGroup, GroupHom, cayley_relators,
                             cayley_words, centralizer_elements,
                             conjugacy_classes, conjugate, cyclic_group,
                             group_generators, hom_kernel, hom_problems,
                             subgroup)


logger = logging.getLogger(__name__)

# Letters for vertex generators; "t" is reserved for stable letters
SYMBOLS = "abcdefghijklmnopqrsuvwxyz"

# A word in presentation symbols: (symbol, +1 | -1) letters
SymWord = tp.Tuple[tp.Tuple[str, int], ...]


@dataclass(frozen=True, eq=False)
class VertexGroup:
    id: str
    group: FiniteGroup


@dataclass(frozen=True, eq=False)
class EdgeGroup:
    '''
    Edge `id` from `v` to `w` (possibly equal) with injective inclusions of
    its group into both vertex groups.
    '''
    id: str
    v: str
    w: str
    group: FiniteGroup
    incl_v: GroupHom
    incl_w: GroupHom

    def inclusion(self, sign: int) -> GroupHom:
        '''
        Inclusion on the side an oriented traversal leaves from.
        '''
        return self.incl_v if sign > 0 else self.incl_w

    def start(self, sign: int) -> str:
        return self.v if sign > 0 else self.w

    def end(self, sign: int) -> str:
        return self.w if sign > 0 else self.v


class GraphOfGroups:
    '''
    A finite graph (loops and multiedges allowed) with finite vertex and
    edge groups and injective edge-to-vertex inclusions, validated on
    construction.
    '''

    def __init__(self, vertices: tp.Sequence[VertexGroup],
                 edges: tp.Sequence[EdgeGroup],
                 basepoint: tp.Optional[str] = None, name: str = ""):
        self.name = name
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self._vertex = {v.id: v for v in self.vertices}
        self._edge = {e.id: e for e in self.edges}
        if len(self._vertex) != len(self.vertices):
            raise StacklabError("duplicate vertex ids")
        if len(self._edge) != len(self.edges):
            raise StacklabError("duplicate edge ids")
        if basepoint is None and self.vertices:
            basepoint = self.vertices[0].id
        if basepoint is not None and basepoint not in self._vertex:
            raise UnknownObject(basepoint)
        self.basepoint = basepoint
        for e in self.edges:
            self._check_edge(e)

    def _check_edge(self, e: EdgeGroup):
        for end, incl in ((e.v, e.incl_v), (e.w, e.incl_w)):
            if end not in self._vertex:
                raise UnknownObject(end)
            target = self._vertex[end].group
            if incl.domain != e.group or incl.codomain != target:
                raise InvalidGroup(f"inclusion of edge {e.id} into {end} has "
                                   f"the wrong domain or codomain")
            problems = hom_problems(e.group, target, incl.image)
            if problems:
                raise InvalidGroup(f"inclusion of edge {e.id} into {end}: "
                                   f"{problems[0]}")
            kernel = hom_kernel(incl)
            if len(kernel) > 1:
                raise NonInjectiveInclusion(e.id, end, kernel)

    def vertex(self, vid: str) -> VertexGroup:
        try:
            return self._vertex[vid]
        except KeyError:
            raise UnknownObject(vid)

    def edge(self, eid: str) -> EdgeGroup:
        try:
            return self._edge[eid]
        except KeyError:
            raise UnknownObject(eid)

    def group(self, vid: str) -> FiniteGroup:
        return self.vertex(vid).group

    @property
    def vertex_ids(self) -> tp.List[str]:
        return [v.id for v in self.vertices]

    @property
    def edge_ids(self) -> tp.List[str]:
        return [e.id for e in self.edges]

    def leaving(self, vid: str) -> tp.List[tp.Tuple[str, int]]:
        '''
        Oriented edges (edge id, sign) starting at `vid`, in edge order; a
        loop contributes both orientations.
        '''
        out = []
        for e in self.edges:
            if e.v == vid:
                out.append((e.id, 1))
            if e.w == vid:
                out.append((e.id, -1))
        return out

    def __repr__(self) -> str:
        return (f"GraphOfGroups({self.name or '?'}, vertices="
                f"{len(self.vertices)}, edges={len(self.edges)})")


def _as_hom(domain: FiniteGroup, codomain: FiniteGroup,
            incl: tp.Union[GroupHom, tp.Sequence[int]]) -> GroupHom:
    if isinstance(incl, GroupHom):
        return incl
    return GroupHom(domain, codomain, tuple(int(x) for x in incl))


def segment(g1: FiniteGroup, g2: FiniteGroup, a: FiniteGroup,
            incl1: tp.Union[GroupHom, tp.Sequence[int]],
            incl2: tp.Union[GroupHom, tp.Sequence[int]],
            name: str = "segment") -> GraphOfGroups:
    '''
    v1 --e1-- v2 carrying g1, g2 and the edge group a.
    '''
    edge = EdgeGroup("e1", "v1", "v2", a, _as_hom(a, g1, incl1),
                     _as_hom(a, g2, incl2))
    return GraphOfGroups([VertexGroup("v1", g1), VertexGroup("v2", g2)],
                         [edge], basepoint="v1", name=name)


def loop(g: FiniteGroup, a: FiniteGroup,
         incl1: tp.Union[GroupHom, tp.Sequence[int]],
         incl2: tp.Union[GroupHom, tp.Sequence[int]],
         name: str = "loop") -> GraphOfGroups:
    '''
    One vertex with a loop edge; the first inclusion is the identified side
    of the HNN relation.
    '''
    edge = EdgeGroup("e1", "v1", "v1", a, _as_hom(a, g, incl1),
                     _as_hom(a, g, incl2))
    return GraphOfGroups([VertexGroup("v1", g)], [edge], basepoint="v1",
                         name=name)


def weighted_segment(m: int, n: int) -> GraphOfGroups:
    '''
    The segment (Z_m, Z_n, Z_d) with d = gcd(m, n) and inclusions
    k -> k m/d, k -> k n/d.
    '''
    d = math.gcd(m, n)
    a = cyclic_group(d)
    return segment(cyclic_group(m), cyclic_group(n), a,
                   [k * (m // d) for k in range(d)],
                   [k * (n // d) for k in range(d)],
                   name=f"weighted_{m}_{n}")


# Underlying graph


def coarse_graph(g: GraphOfGroups) -> nx.MultiGraph:
    '''
    The underlying graph with every group forgotten; group orders are kept
    as node and edge attributes for display only.
    '''
    graph = nx.MultiGraph(name=g.name)
    for v in g.vertices:
        graph.add_node(v.id, order=v.group.order)
    for e in g.edges:
        graph.add_edge(e.v, e.w, key=e.id, order=e.group.order)
    return graph


def is_connected(g: GraphOfGroups) -> bool:
    graph = coarse_graph(g)
    return graph.number_of_nodes() > 0 and nx.is_connected(graph)


def betti_number(g: GraphOfGroups) -> int:
    graph = coarse_graph(g)
    return (len(g.edges) - len(g.vertices)
            + nx.number_connected_components(graph))


def euler_characteristic(g: GraphOfGroups) -> Fraction:
    return (sum((Fraction(1, v.group.order) for v in g.vertices), Fraction(0))
            - sum((Fraction(1, e.group.order) for e in g.edges), Fraction(0)))


def residue_gerbes(g: GraphOfGroups
                   ) -> tp.Dict[tp.Tuple[str, str], FiniteGroup]:
    '''
    Inertia groups of the points of the graph of groups: G_v at a vertex,
    G_e in the interior of an edge.
    '''
    gerbes = {("vertex", v.id): v.group for v in g.vertices}
    gerbes.update({("edge", e.id): e.group for e in g.edges})
    return gerbes


# Fundamental group presentations


@dataclass(frozen=True)
class Relation:
    kind: str  # vertex | edge | stable
    lhs: SymWord
    rhs: SymWord = ()

    def relator(self) -> SymWord:
        return self.lhs + tuple((s, -k) for s, k in reversed(self.rhs))


@dataclass(frozen=True, eq=False)
class Pi1Presentation:
    '''
    Presentation of pi_1 relative to a breadth first spanning tree.

    `symbols` maps a vertex generator to ("v", vertex id, element id) and a
    stable letter to ("t", edge id, sign), the sign orienting the edge from
    its BFS-earlier endpoint. `parent[u]` is the tree letter (edge id, sign)
    arriving at u.
    '''
    graph: GraphOfGroups
    basepoint: str
    tree: tp.Tuple[str, ...]
    parent: tp.Dict[str, tp.Optional[tp.Tuple[str, int]]]
    generators: tp.Tuple[str, ...]
    symbols: tp.Dict[str, tp.Tuple[str, str, int]]
    vertex_gens: tp.Dict[str, tp.Tuple[str, ...]]
    stable: tp.Dict[str, str]
    relations: tp.Tuple[Relation, ...]

    def vertex_word(self, vid: str, x: int) -> SymWord:
        '''
        Breadth first word for element x of G_v in that vertex's symbols.
        '''
        syms = self.vertex_gens[vid]
        elements = [self.symbols[s][2] for s in syms]
        words = _cayley_words(self.graph.group(vid), tuple(elements))
        return tuple((syms[i], 1) for i in words[x])

    def text(self) -> str:
        rels = []
        for r in self.relations:
            if r.rhs:
                rels.append(f"{render_symbols(r.lhs)} = "
                            f"{render_symbols(r.rhs)}")
            else:
                rels.append(render_symbols(r.lhs))
        return f"<{', '.join(self.generators)} | {', '.join(rels)}>"


@functools.lru_cache(maxsize=256)
def _cayley_words(group: FiniteGroup, gens: tp.Tuple[int, ...]
                  ) -> tp.List[tp.Tuple[int, ...]]:
    return cayley_words(group, list(gens))


def render_symbols(word: SymWord) -> str:
    '''
    Renders letters with runs collapsed into powers, e.g. "a^2 t^-1"; the
    empty word is "1".
    '''
    runs: tp.List[tp.List] = []
    for s, k in word:
        if runs and runs[-1][0] == s:
            runs[-1][1] += k
            if runs[-1][1] == 0:
                runs.pop()
        else:
            runs.append([s, k])
    if not runs:
        return "1"
    return " ".join(s if k == 1 else f"{s}^{k}" for s, k in runs)


def spanning_tree(g: GraphOfGroups, basepoint: str
                  ) -> tp.Tuple[tp.List[str], tp.Dict, tp.List[str]]:
    '''
    Breadth first spanning tree from `basepoint`, edges scanned in input
    order.

    Outputs:
        [tuple]
          tree    [tp.List[str]]:  tree edge ids in discovery order
          parent  [tp.Dict]:       vertex -> arriving (edge id, sign)
          order   [tp.List[str]]:  vertices in BFS order
    '''
    g.vertex(basepoint)
    order = [basepoint]
    parent: tp.Dict[str, tp.Optional[tp.Tuple[str, int]]] = {basepoint: None}
    tree = []
    for u in order:
        for e in g.edges:
            if e.v == u and e.w not in parent:
                parent[e.w] = (e.id, 1)
            elif e.w == u and e.v not in parent:
                parent[e.v] = (e.id, -1)
            else:
                continue
            tree.append(e.id)
            order.append(e.w if e.v == u else e.v)
    return tree, parent, order


def tree_path(pres: Pi1Presentation, vid: str
              ) -> tp.List[tp.Tuple[str, str, int]]:
    '''
    Edge syllables leading from the basepoint to `vid` inside the tree.
    '''
    path = []
    u = vid
    while pres.parent[u] is not None:
        eid, sign = pres.parent[u]
        path.append(("e", eid, sign))
        u = pres.graph.edge(eid).start(sign)
    return list(reversed(path))


def pi1_presentation(g: GraphOfGroups, basepoint: tp.Optional[str] = None
                     ) -> Pi1Presentation:
    '''
    Presentation of the fundamental group at `basepoint`: vertex group
    generators with their Cayley graph relators, tree edge identifications
    and one stable letter per non-tree edge with
    t incl_tail(a) t^-1 = incl_head(a).

    Inputs:
        g          [GraphOfGroups]
        basepoint  [str]:  defaults to the graph's basepoint

    Outputs:
        [Pi1Presentation]
    '''
    basepoint = basepoint or g.basepoint
    if basepoint is None or not is_connected(g):
        raise DisconnectedGraph(f"graph of groups {g.name} is not connected")
    tree, parent, order = spanning_tree(g, basepoint)
    rank = {v: i for i, v in enumerate(order)}
    logger.info("spanning tree of %s at %s: %s", g.name, basepoint, tree)

    vertex_elems = {v.id: group_generators(v.group) for v in g.vertices}
    total = sum(len(x) for x in vertex_elems.values())
    names = (iter(SYMBOLS) if total <= len(SYMBOLS)
             else (f"g{i}" for i in range(1, total + 1)))

    symbols: tp.Dict[str, tp.Tuple[str, str, int]] = {}
    vertex_gens: tp.Dict[str, tp.Tuple[str, ...]] = {}
    generators: tp.List[str] = []
    for v in g.vertices:
        syms = []
        for x in vertex_elems[v.id]:
            s = next(names)
            symbols[s] = ("v", v.id, x)
            syms.append(s)
        vertex_gens[v.id] = tuple(syms)
        generators.extend(syms)

    in_tree = set(tree)
    non_tree = [e for e in g.edges if e.id not in in_tree]
    stable: tp.Dict[str, str] = {}
    for k, e in enumerate(non_tree, start=1):
        s = "t" if len(non_tree) == 1 else f"t{k}"
        sign = 1 if e.v == e.w or rank[e.v] <= rank[e.w] else -1
        symbols[s] = ("t", e.id, sign)
        stable[e.id] = s
        generators.append(s)

    pres = Pi1Presentation(g, basepoint, tuple(tree), parent,
                           tuple(generators), symbols, vertex_gens, stable, ())

    relations: tp.List[Relation] = []
    for v in g.vertices:
        syms = vertex_gens[v.id]
        for rel in cayley_relators(v.group, list(vertex_elems[v.id])):
            relations.append(Relation("vertex",
                                      tuple((syms[i], k) for i, k in rel)))
    for e in g.edges:
        edge_gens = group_generators(e.group)
        if e.id in stable:
            t = stable[e.id]
            sign = symbols[t][2]
            head, tail = e.inclusion(sign), e.inclusion(-sign)
            head_v, tail_v = e.start(sign), e.end(sign)
            for s in edge_gens:
                lhs = (((t, 1),) + pres.vertex_word(tail_v, tail(s))
                       + ((t, -1),))
                relations.append(Relation(
                    "stable", lhs, pres.vertex_word(head_v, head(s))))
        else:
            for s in edge_gens:
                relations.append(Relation(
                    "edge", pres.vertex_word(e.v, e.incl_v(s)),
                    pres.vertex_word(e.w, e.incl_w(s))))

    return Pi1Presentation(g, basepoint, tuple(tree), parent,
                           tuple(generators), symbols, vertex_gens, stable,
                           tuple(relations))


def abelianization(pres: Pi1Presentation) -> tp.Tuple[int, tp.List[int]]:
    '''
    The abelianized fundamental group from the Smith normal form of the
    exponent-sum relation matrix.

    Outputs:
        [tuple]
          free_rank  [int]
          torsion    [tp.List[int]]:  invariant factors greater than 1
    '''
    gens = list(pres.generators)
    pos = {s: i for i, s in enumerate(gens)}
    rows = []
    for rel in pres.relations:
        row = [0] * len(gens)
        for s, k in rel.relator():
            row[pos[s]] += k
        if any(row):
            rows.append(row)
    if not gens:
        return 0, []
    if not rows:
        return len(gens), []
    size = max(len(rows), len(gens))
    padded = [r + [0] * (size - len(gens)) for r in rows]
    padded += [[0] * size for _ in range(size - len(rows))]
    snf = smith_normal_form(Matrix(padded), domain=ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(size)]
    nonzero = [d for d in diagonal if d != 0]
    return len(gens) - len(nonzero), sorted(d for d in nonzero if d > 1)


# Inertia graph of groups


def _conjugator(group: FiniteGroup, a: int, target: int) -> int:
    for x in group.elements():
        if conjugate(group, x, a) == target:
            return x
    raise StacklabError(f"{a} and {target} are not conjugate")


def inertia_gog(g: GraphOfGroups) -> GraphOfGroups:
    '''
    Vertices v:g per conjugacy class of G_v carrying the centralizer of the
    least representative g, edges e:h likewise; e:h ends at the vertex
    classes containing the images of h, included by a -> x incl(a) x^-1
    with x the least element conjugating incl(h) to the vertex
    representative.
    '''
    vertices = []
    cent = {}
    class_of = {}
    for v in g.vertices:
        for cls in conjugacy_classes(v.group):
            rep = cls[0]
            sub, incl = subgroup(v.group,
                                 centralizer_elements(v.group, rep),
                                 name=f"{v.group.name}_c{rep}")
            vid = f"{v.id}:{rep}"
            cent[vid] = (sub, incl)
            for x in cls:
                class_of[(v.id, x)] = (vid, rep)
            vertices.append(VertexGroup(vid, sub))

    edges = []
    for e in g.edges:
        for cls in conjugacy_classes(e.group):
            h = cls[0]
            sub_e, incl_e = subgroup(e.group,
                                     centralizer_elements(e.group, h),
                                     name=f"{e.group.name}_c{h}")
            ends = []
            for end, incl in ((e.v, e.incl_v), (e.w, e.incl_w)):
                image = incl(h)
                vid, rep = class_of[(end, image)]
                group = g.group(end)
                x = _conjugator(group, image, rep)
                sub_v, incl_v = cent[vid]
                local = {a: i for i, a in enumerate(incl_v.image)}
                hom = GroupHom(sub_e, sub_v, tuple(
                    local[conjugate(group, x, incl(incl_e(a)))]
                    for a in sub_e.elements()))
                ends.append((vid, hom))
            (v_id, hom_v), (w_id, hom_w) = ends
            edges.append(EdgeGroup(f"{e.id}:{h}", v_id, w_id, sub_e,
                                   hom_v, hom_w))
    basepoint = f"{g.basepoint}:0" if g.basepoint else None
    return GraphOfGroups(vertices, edges, basepoint=basepoint,
                         name=f"I{g.name}")
