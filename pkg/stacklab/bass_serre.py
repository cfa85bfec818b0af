import functools
import logging
import networkx as nx
import re
import typing as tp

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from stacklab.config import get_cap, get_params
from stacklab.errors import BallTooLarge, MalformedWord, StacklabError
from stacklab.gog import (GraphOfGroups, Pi1Presentation, SymWord,
                          pi1_presentation, render_symbols, tree_path)


logger = logging.getLogger(__name__)

# ("v", vertex id, element id) or ("e", edge id, +1 | -1)
Syllable = tp.Tuple[str, str, int]

TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    '''
    A loop at the basepoint alternating vertex group elements and signed
    edge letters; (e, +1) runs from e.v to e.w.
    '''
    syllables: tp.Tuple[Syllable, ...] = ()

    def __add__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)


@dataclass(frozen=True)
class ReducedWord(Word):
    '''
    Normal form g0 y1 r1 ... yk rk: every r_i is the least-id
    representative of its right coset of the arriving edge group image and
    no y g y^-1 with g in that image survives. Identity syllables are
    dropped.
    '''

    @property
    def is_identity(self) -> bool:
        return not self.syllables


@dataclass(frozen=True, eq=False)
class SideTable:
    '''
    Coset data of one edge group image H inside a vertex group: for every
    vertex element x, x = incl(right_part[x]) right_rep[x] and
    x = left_rep[x] incl(left_part[x]).
    '''
    preimage: tp.Dict[int, int]
    right_rep: tp.Tuple[int, ...]
    right_part: tp.Tuple[int, ...]
    left_rep: tp.Tuple[int, ...]
    left_part: tp.Tuple[int, ...]

    @property
    def left_reps(self) -> tp.List[int]:
        return sorted(set(self.left_rep))

    @property
    def right_reps(self) -> tp.List[int]:
        return sorted(set(self.right_rep))


class TransversalTables:
    '''
    Right and left coset transversals of every edge group image, fixed once
    per graph of groups. Sides are keyed by (edge id, sign): the side a
    letter with that sign leaves from.
    '''

    def __init__(self, g: GraphOfGroups):
        self.graph = g
        self._sides: tp.Dict[tp.Tuple[str, int], SideTable] = {}
        for e in g.edges:
            for sign in (1, -1):
                incl = e.inclusion(sign)
                group = g.group(e.start(sign))
                self._sides[(e.id, sign)] = _side_table(group, incl.image)

    def departing(self, eid: str, sign: int) -> SideTable:
        return self._sides[(eid, sign)]

    def arriving(self, eid: str, sign: int) -> SideTable:
        return self._sides[(eid, -sign)]


def _side_table(group, image: tp.Sequence[int]) -> SideTable:
    preimage = {x: a for a, x in enumerate(image)}
    right_rep, right_part, left_rep, left_part = [], [], [], []
    for x in group.elements():
        r = min(group.mul(h, x) for h in image)
        right_rep.append(r)
        right_part.append(preimage[group.mul(x, group.inv(r))])
        s = min(group.mul(x, h) for h in image)
        left_rep.append(s)
        left_part.append(preimage[group.mul(group.inv(s), x)])
    return SideTable(preimage, tuple(right_rep), tuple(right_part),
                     tuple(left_rep), tuple(left_part))


@functools.lru_cache(maxsize=64)
def transversal_tables(g: GraphOfGroups) -> TransversalTables:
    return TransversalTables(g)


# Words


def invert_word(g: GraphOfGroups, w: Word) -> Word:
    out = []
    for kind, ref, value in reversed(w.syllables):
        if kind == "v":
            out.append(("v", ref, g.group(ref).inv(value)))
        else:
            out.append(("e", ref, -value))
    return Word(tuple(out))


def _alternate(g: GraphOfGroups, w: Word, base: str
               ) -> tp.Tuple[tp.List[int], tp.List[tp.Tuple[str, int]],
                             tp.List[str]]:
    '''
    Splits a loop into vertex elements g0..gk, letters y1..yk and the
    vertex each g_i lives at; raises MalformedWord on a broken loop.
    '''
    elems, letters, where = [0], [], [base]
    for pos, syl in enumerate(w.syllables):
        try:
            kind, ref, value = syl
        except (TypeError, ValueError):
            raise MalformedWord(f"syllable {pos} is not a triple: {syl!r}")
        current = where[-1]
        if kind == "v":
            if ref != current:
                raise MalformedWord(f"syllable {pos} sits at {ref!r} but the "
                                    f"path is at {current!r}")
            group = g.group(ref)
            if not isinstance(value, int) or not 0 <= value < group.order:
                raise MalformedWord(f"syllable {pos}: no element {value!r} "
                                    f"in {group.name}")
            elems[-1] = group.mul(elems[-1], value)
        elif kind == "e":
            if value not in (1, -1):
                raise MalformedWord(f"syllable {pos}: sign must be +1 or -1")
            try:
                e = g.edge(ref)
            except ValueError:
                raise MalformedWord(f"syllable {pos}: unknown edge {ref!r}")
            if e.start(value) != current:
                raise MalformedWord(f"syllable {pos}: edge {ref} does not "
                                    f"leave {current!r}")
            letters.append((ref, value))
            elems.append(0)
            where.append(e.end(value))
        else:
            raise MalformedWord(f"syllable {pos}: unknown kind {kind!r}")
    if where[-1] != base:
        raise MalformedWord(f"word ends at {where[-1]!r}, not at {base!r}")
    return elems, letters, where


def reduce_word(g: GraphOfGroups, tables: TransversalTables, w: Word,
                basepoint: tp.Optional[str] = None) -> ReducedWord:
    '''
    Bass-Serre normal form of a loop.

    Pinches y g y^-1 with g in the arriving edge group image are collapsed
    first, then vertex elements are factored right to left into
    edge-image part times transversal representative, the edge-image part
    crossing its letter to the left.

    Inputs:
        g          [GraphOfGroups]
        tables     [TransversalTables]
        w          [Word]:  loop at the basepoint
        basepoint  [str]:   defaults to the graph's basepoint

    Outputs:
        [ReducedWord]
    '''
    base = basepoint or g.basepoint
    elems, letters, where = _alternate(g, w, base)

    st_elems, st_letters, st_where = [elems[0]], [], [base]
    for (eid, sign), x, at in zip(letters, elems[1:], where[1:]):
        if st_letters and st_letters[-1] == (eid, -sign):
            top = st_elems[-1]
            side = tables.arriving(eid, -sign)
            if top in side.preimage:
                a = side.preimage[top]
                st_letters.pop()
                st_elems.pop()
                st_where.pop()
                group = g.group(st_where[-1])
                dep = g.edge(eid).inclusion(-sign)
                st_elems[-1] = group.mul(group.mul(st_elems[-1], dep(a)), x)
                continue
        st_letters.append((eid, sign))
        st_elems.append(x)
        st_where.append(at)

    for i in range(len(st_letters), 0, -1):
        eid, sign = st_letters[i - 1]
        side = tables.arriving(eid, sign)
        x = st_elems[i]
        a, r = side.right_part[x], side.right_rep[x]
        st_elems[i] = r
        group = g.group(st_where[i - 1])
        dep = g.edge(eid).inclusion(sign)
        st_elems[i - 1] = group.mul(st_elems[i - 1], dep(a))

    out: tp.List[Syllable] = []
    if st_elems[0] != 0:
        out.append(("v", base, st_elems[0]))
    for (eid, sign), x, at in zip(st_letters, st_elems[1:], st_where[1:]):
        out.append(("e", eid, sign))
        if x != 0:
            out.append(("v", at, x))
    return ReducedWord(tuple(out))


def words_equal(g: GraphOfGroups, tables: TransversalTables, w1: Word,
                w2: Word) -> bool:
    return (reduce_word(g, tables, w1).syllables
            == reduce_word(g, tables, w2).syllables)


def syllable_length(w: Word, tree: tp.Iterable[str] = ()) -> int:
    '''
    Nontrivial vertex syllables plus letters of edges outside `tree`.
    '''
    tree = set(tree)
    return sum(1 for kind, ref, value in w.syllables
               if (kind == "v" and value != 0)
               or (kind == "e" and ref not in tree))


# Presentation symbols as loops


def _reverse_path(path: tp.List[Syllable]) -> tp.List[Syllable]:
    return [("e", eid, -sign) for _, eid, sign in reversed(path)]


def vertex_loop(pres: Pi1Presentation, vid: str, x: int) -> Word:
    '''
    Element x of G_v as a loop through the spanning tree.
    '''
    path = tree_path(pres, vid)
    middle = [("v", vid, x)] if x != 0 else []
    return Word(tuple(path + middle + _reverse_path(path)))


def symbol_loop(pres: Pi1Presentation, symbol: str) -> Word:
    try:
        kind, ref, value = pres.symbols[symbol]
    except KeyError:
        raise MalformedWord(f"unknown symbol {symbol!r}")
    if kind == "v":
        return vertex_loop(pres, ref, value)
    e = pres.graph.edge(ref)
    return Word(tuple(tree_path(pres, e.start(value)) + [("e", ref, value)]
                      + _reverse_path(tree_path(pres, e.end(value)))))


def word_from_symbols(pres: Pi1Presentation, letters: SymWord) -> Word:
    g = pres.graph
    w = Word()
    for symbol, k in letters:
        piece = symbol_loop(pres, symbol)
        w = w + (piece if k > 0 else invert_word(g, piece))
    return w


def parse_word(g: GraphOfGroups, pres: Pi1Presentation, text: str) -> Word:
    '''
    Parses "a b^-1 t^2"; "1" is the identity.
    '''
    letters = []
    for token in text.split():
        if token == "1":
            continue
        match = TOKEN.match(token)
        if not match or match.group(1) not in pres.symbols:
            raise MalformedWord(f"cannot read {token!r} as a generator power")
        symbol, power = match.group(1), int(match.group(2) or 1)
        sign = 1 if power > 0 else -1
        letters.extend([(symbol, sign)] * abs(power))
    return word_from_symbols(pres, tuple(letters))


def render_word(g: GraphOfGroups, pres: Pi1Presentation, w: Word) -> str:
    '''
    Reads a loop back in presentation symbols; tree edges are dropped.
    '''
    letters: tp.List[tp.Tuple[str, int]] = []
    for kind, ref, value in w.syllables:
        if kind == "v":
            letters.extend(pres.vertex_word(ref, value))
        elif ref in pres.stable:
            t = pres.stable[ref]
            letters.append((t, value * pres.symbols[t][2]))
    return render_symbols(tuple(letters))


# Injectivity of vertex groups


def omega_map(g: GraphOfGroups, vid: str,
              pres: tp.Optional[Pi1Presentation] = None
              ) -> tp.List[ReducedWord]:
    '''
    Normal forms of the images of every element of G_v in pi_1.
    '''
    pres = pres or pi1_presentation(g)
    tables = transversal_tables(g)
    return [reduce_word(g, tables, vertex_loop(pres, vid, x), pres.basepoint)
            for x in g.group(vid).elements()]


@dataclass
class OmegaReport:
    passed: bool
    vertex_checks: tp.Dict[str, int] = field(default_factory=dict)
    edge_checks: tp.Dict[str, int] = field(default_factory=dict)
    counterexample: tp.Optional[tp.Tuple[str, str, int]] = None

    def lines(self) -> tp.List[str]:
        if not self.passed:
            kind, ref, x = self.counterexample
            return [f"FAIL {kind} {ref}: element {x} reduces to the identity"]
        out = ["PASS"]
        out += [f"vertex {v}: {n} nontrivial elements"
                for v, n in self.vertex_checks.items()]
        out += [f"edge {e}: {n} nontrivial elements"
                for e, n in self.edge_checks.items()]
        return out


def omega_injectivity_certificate(g: GraphOfGroups,
                                  workers: tp.Optional[int] = None
                                  ) -> OmegaReport:
    '''
    Checks that no nontrivial vertex or edge group element reduces to the
    identity of pi_1; vertices are checked on `workers` threads with results
    merged in vertex order.
    '''
    pres = pi1_presentation(g)
    tables = transversal_tables(g)
    workers = workers or get_params()['workers']

    def check(item) -> tp.Tuple[int, tp.Optional[int]]:
        vid, elements = item
        count = 0
        for x in elements:
            if x == 0:
                continue
            count += 1
            loop = vertex_loop(pres, vid, x)
            if reduce_word(g, tables, loop, pres.basepoint).is_identity:
                return count, x
        return count, None

    vertex_items = [(v.id, list(v.group.elements())) for v in g.vertices]
    edge_items = [(e.v, [e.incl_v(a) for a in e.group.elements()])
                  for e in g.edges]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vertex_results = list(pool.map(check, vertex_items))
            edge_results = list(pool.map(check, edge_items))
    else:
        vertex_results = [check(item) for item in vertex_items]
        edge_results = [check(item) for item in edge_items]

    report = OmegaReport(passed=True)
    for v, (count, bad) in zip(g.vertices, vertex_results):
        report.vertex_checks[v.id] = count
        if bad is not None and report.passed:
            report.passed = False
            report.counterexample = ("vertex", v.id, bad)
    for e, (count, bad) in zip(g.edges, edge_results):
        report.edge_checks[e.id] = count
        if bad is not None and report.passed:
            report.passed = False
            report.counterexample = ("edge", e.id, bad)
    logger.info("omega certificate for %s: %s", g.name,
                "PASS" if report.passed else "FAIL")
    return report


# Bass-Serre tree


def bass_serre_ball(g: GraphOfGroups, radius: int,
                    basepoint: tp.Optional[str] = None,
                    cap: tp.Optional[int] = None) -> nx.Graph:
    '''
    The radius-r ball of the Bass-Serre tree around the coset of the base
    vertex group.

    A tree vertex over u has one child per oriented edge y leaving u and
    left coset representative s of the departing edge group image, except
    the way back to its parent.

    Inputs:
        g          [GraphOfGroups]
        radius     [int]:  nonnegative
        basepoint  [str]:  defaults to the graph's basepoint
        cap        [int]:  largest ball, STACKLAB_CAP by default

    Outputs:
        [nx.Graph]: nodes 0.. in BFS order with attributes `vertex`,
                    `path` ((s, edge id, sign) steps), `depth`, `order`
                    (stabilizer order) and `stabilizer` (its group name)
    '''
    if radius < 0:
        raise StacklabError("radius must be nonnegative")
    base = basepoint or g.basepoint
    tables = transversal_tables(g)
    cap = get_cap(cap)

    ball = nx.Graph()
    root = g.vertex(base)
    ball.add_node(0, vertex=base, path=(), depth=0, order=root.group.order,
                  stabilizer=root.group.name)
    queue = [(0, None)]
    for node, arrived in queue:
        attrs = ball.nodes[node]
        if attrs["depth"] == radius:
            continue
        u = attrs["vertex"]
        for eid, sign in g.leaving(u):
            e = g.edge(eid)
            for s in tables.departing(eid, sign).left_reps:
                if arrived == (eid, -sign) and s == 0:
                    continue
                child = ball.number_of_nodes()
                if child + 1 > cap:
                    raise BallTooLarge("ball vertices", child + 1, cap)
                target = g.vertex(e.end(sign))
                ball.add_node(child, vertex=target.id,
                              path=attrs["path"] + ((s, eid, sign),),
                              depth=attrs["depth"] + 1,
                              order=target.group.order,
                              stabilizer=target.group.name)
                ball.add_edge(node, child, edge=eid)
                queue.append((child, (eid, sign)))
    logger.debug("ball of radius %d in %s: %d vertices", radius, g.name,
                 ball.number_of_nodes())
    return ball


def biregular_ball_sizes(p: int, q: int, radius: int) -> tp.List[int]:
    '''
    Vertex counts of the balls of radius 0..radius around a degree-p vertex
    of the (p, q)-biregular tree.
    '''
    sizes, layer = [1], 1
    for r in range(1, radius + 1):
        if r == 1:
            layer = p
        else:
            layer *= (q - 1) if r % 2 == 0 else (p - 1)
        sizes.append(sizes[-1] + layer)
    return sizes


def segment_ball_sizes(g: GraphOfGroups, radius: int) -> tp.List[int]:
    '''
    Closed form ball growth of a segment of groups: its Bass-Serre tree is
    ([G_v:A], [G_w:A])-biregular, rooted at the basepoint.
    '''
    if len(g.vertices) != 2 or len(g.edges) != 1 or (
            g.edges[0].v == g.edges[0].w):
        raise StacklabError(f"{g.name} is not a segment of groups")
    e = g.edges[0]
    index = {e.v: g.group(e.v).order // e.group.order,
             e.w: g.group(e.w).order // e.group.order}
    other = e.w if g.basepoint == e.v else e.v
    return biregular_ball_sizes(index[g.basepoint], index[other], radius)
