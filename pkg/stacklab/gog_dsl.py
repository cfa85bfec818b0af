import logging
import os
import re
import typing as tp

from dataclasses import dataclass

from stacklab.errors import GogSyntaxError, UnknownGroupRef
from stacklab.gog import EdgeGroup, GraphOfGroups, VertexGroup
from stacklab.groups import (FiniteGroup, GroupHom, cyclic_group,
                             group_from_permutations, group_from_table,
                             perm_from_cycles, perm_to_cycles, trivial_group)


logger = logging.getLogger(__name__)

TOKEN = re.compile(r"""
    (?P<list>\[[^\]]*\])
  | (?P<cycles>(?:\([^)]*\))+)
  | (?P<semi>;)
  | (?P<word>[^\s\[\]();\#]+)
""", re.VERBOSE)

CYCLE = re.compile(r"\(([^)]*)\)")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(line: str, lineno: int) -> tp.List[Token]:
    '''
    Splits one DSL line into tokens with 1-based columns; `#` starts a
    comment.
    '''
    tokens = []
    pos = 0
    while pos < len(line):
        ch = line[pos]
        if ch == "#":
            break
        if ch.isspace():
            pos += 1
            continue
        match = TOKEN.match(line, pos)
        if match is None:
            raise GogSyntaxError(f"unexpected character {ch!r}", lineno,
                                 pos + 1)
        tokens.append(Token(match.lastgroup, match.group(), lineno, pos + 1))
        pos = match.end()
    return tokens


class _Line:
    '''
    Cursor over the tokens of one line.
    '''

    def __init__(self, tokens: tp.List[Token], lineno: int, width: int):
        self.tokens = tokens
        self.lineno = lineno
        self.width = width
        self.pos = 0

    def error(self, msg: str, token: tp.Optional[Token] = None):
        column = token.column if token else self.width + 1
        return GogSyntaxError(msg, self.lineno, column)

    def peek(self) -> tp.Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token is None:
            raise self.error(f"expected {what}")
        if token.kind != kind:
            raise self.error(f"expected {what}, got {token.text!r}", token)
        self.pos += 1
        return token

    def keyword(self, word: str) -> Token:
        token = self.next("word", f"'{word}'")
        if token.text != word:
            raise self.error(f"expected '{word}', got {token.text!r}", token)
        return token

    def integer(self, what: str) -> int:
        token = self.next("word", what)
        try:
            return int(token.text)
        except ValueError:
            raise self.error(f"expected {what}, got {token.text!r}", token)

    def ints(self, token: Token) -> tp.List[int]:
        try:
            return [int(x) for x in token.text.strip("[]").split()]
        except ValueError:
            raise self.error("list entries must be integers", token)

    def end(self):
        token = self.peek()
        if token is not None:
            raise self.error(f"unexpected {token.text!r}", token)


def _parse_group(cur: _Line, name: str) -> FiniteGroup:
    kind = cur.next("word", "group kind")
    if kind.text == "trivial":
        group = trivial_group(name)
    elif kind.text == "cyclic":
        group = cyclic_group(cur.integer("cyclic order"), name=name)
    elif kind.text == "perm":
        degree = cur.integer("permutation degree")
        gens = []
        while cur.peek() is not None:
            token = cur.next("cycles", "a cycle generator like (1 2)(3 4)")
            try:
                cycles = [[int(x) for x in c.split()]
                          for c in CYCLE.findall(token.text)]
            except ValueError:
                raise cur.error("cycle entries must be integers", token)
            gens.append(perm_from_cycles(cycles, degree))
        group = group_from_permutations(name, degree, gens)
    elif kind.text == "table":
        rows: tp.List[tp.List[int]] = [[]]
        while cur.peek() is not None:
            token = cur.peek()
            if token.kind == "semi":
                cur.pos += 1
                rows.append([])
            else:
                rows[-1].append(cur.integer("table entry"))
        group = group_from_table(name, rows)
    else:
        raise cur.error(f"unknown group kind {kind.text!r}", kind)
    cur.end()
    return group


def parse_gog(text: str, name: str = "") -> GraphOfGroups:
    '''
    Parses the line-oriented graph of groups DSL:

        group S3 perm 3 (1 2) (1 2 3)
        group Z2 cyclic 2
        group C4 table 0 1 2 3 ; 1 2 3 0 ; 2 3 0 1 ; 3 0 1 2
        vertex v1 S3
        edge e1 v1 v2 group Z2 into_v1 [0 1] into_v2 [0 3]
        basepoint v1

    Inputs:
        text  [str]:  DSL source
        name  [str]:  graph name unless a `name` line sets one

    Outputs:
        [GraphOfGroups]: validated, inclusions checked injective
    '''
    groups: tp.Dict[str, FiniteGroup] = {}
    vertices: tp.List[VertexGroup] = []
    vertex_ids: tp.Set[str] = set()
    edges: tp.List[tp.Tuple[tp.Any, ...]] = []
    basepoint = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = tokenize(line, lineno)
        if not tokens:
            continue
        cur = _Line(tokens, lineno, len(line.rstrip()))
        head = cur.next("word", "a directive")

        if head.text == "group":
            gname = cur.next("word", "group name").text
            if gname in groups:
                raise cur.error(f"group {gname!r} defined twice", tokens[1])
            groups[gname] = _parse_group(cur, gname)
        elif head.text == "vertex":
            vid = cur.next("word", "vertex id")
            ref = cur.next("word", "group name")
            cur.end()
            if ref.text not in groups:
                raise UnknownGroupRef(ref.text, lineno)
            if vid.text in vertex_ids:
                raise cur.error(f"vertex {vid.text!r} defined twice", vid)
            vertex_ids.add(vid.text)
            vertices.append(VertexGroup(vid.text, groups[ref.text]))
        elif head.text == "edge":
            eid = cur.next("word", "edge id").text
            ends = [cur.next("word", "endpoint") for _ in range(2)]
            for token in ends:
                if token.text not in vertex_ids:
                    raise cur.error(f"unknown vertex {token.text!r}", token)
            cur.keyword("group")
            ref = cur.next("word", "group name")
            if ref.text not in groups:
                raise UnknownGroupRef(ref.text, lineno)
            images = []
            for token in ends:
                cur.keyword(f"into_{token.text}")
                images.append(cur.ints(cur.next("list", "[image ids]")))
            cur.end()
            edges.append((eid, ends[0].text, ends[1].text, groups[ref.text],
                          images, lineno))
        elif head.text == "basepoint":
            token = cur.next("word", "vertex id")
            cur.end()
            basepoint = (token.text, lineno, token.column)
        elif head.text == "name":
            name = cur.next("word", "graph name").text
            cur.end()
        else:
            raise cur.error(f"unknown directive {head.text!r}", head)

    vertex_of = {v.id: v for v in vertices}
    built = []
    for eid, v, w, group, (img_v, img_w), lineno in edges:
        for end, img in ((v, img_v), (w, img_w)):
            if len(img) != group.order:
                raise GogSyntaxError(
                    f"into_{end} lists {len(img)} images, group "
                    f"{group.name} has {group.order} elements", lineno, 1)
        built.append(EdgeGroup(eid, v, w, group,
                               GroupHom(group, vertex_of[v].group,
                                        tuple(img_v)),
                               GroupHom(group, vertex_of[w].group,
                                        tuple(img_w))))
    base = None
    if basepoint is not None:
        base, lineno, column = basepoint
        if base not in vertex_of:
            raise GogSyntaxError(f"unknown basepoint {base!r}", lineno,
                                 column)
    g = GraphOfGroups(vertices, built, basepoint=base, name=name)
    logger.debug("parsed %r", g)
    return g


def load_gog(path: str) -> GraphOfGroups:
    with open(path) as f:
        text = f.read()
    stem = os.path.basename(path)
    return parse_gog(text, name=stem[:-4] if stem.endswith(".gog") else stem)


# Writing


def _group_line(name: str, group: FiniteGroup) -> str:
    if group.order == 1:
        return f"group {name} trivial"
    if group.perm_gens is not None and group.degree is not None:
        gens = " ".join(
            "".join(f"({' '.join(map(str, c))})" for c in perm_to_cycles(p))
            or "()" for p in group.perm_gens)
        return f"group {name} perm {group.degree} {gens}".rstrip()
    if group == cyclic_group(group.order):
        return f"group {name} cyclic {group.order}"
    rows = " ; ".join(" ".join(str(group.mul(a, b)) for b in group.elements())
                      for a in group.elements())
    return f"group {name} table {rows}"


def group_names(g: GraphOfGroups
                ) -> tp.Tuple[tp.List[tp.Tuple[str, FiniteGroup]],
                              tp.Dict[str, str], tp.Dict[str, str]]:
    '''
    Assigns printable names to the groups of `g`, vertices first then edges.
    Distinct groups sharing a name get a numeric suffix.

    Outputs:
        [tuple]
          named   [tp.List]:  (name, group) in first-use order
          vertex  [tp.Dict]:  vertex id -> group name
          edge    [tp.Dict]:  edge id -> group name
    '''
    named: tp.List[tp.Tuple[str, FiniteGroup]] = []

    def name_of(group: FiniteGroup) -> str:
        for n, known in named:
            if known is group or (known == group and known.name == group.name
                                  and known.perm_gens == group.perm_gens):
                return n
        base = re.sub(r"[\s\[\]();#]", "_", group.name) or "G"
        taken = {n for n, _ in named}
        n, k = base, 2
        while n in taken:
            n, k = f"{base}_{k}", k + 1
        named.append((n, group))
        return n

    vertex = {v.id: name_of(v.group) for v in g.vertices}
    edge = {e.id: name_of(e.group) for e in g.edges}
    return named, vertex, edge


def write_gog(g: GraphOfGroups) -> str:
    '''
    DSL text for `g`; parse_gog reproduces the same element ids.
    '''
    named, vertex, edge = group_names(g)
    lines = []
    if g.name and not re.search(r"[\s\[\]();#]", g.name):
        lines.append(f"name {g.name}")
    lines += [_group_line(n, group) for n, group in named]
    for v in g.vertices:
        lines.append(f"vertex {v.id} {vertex[v.id]}")
    for e in g.edges:
        lines.append(f"edge {e.id} {e.v} {e.w} group {edge[e.id]} "
                     f"into_{e.v} [{' '.join(map(str, e.incl_v.image))}] "
                     f"into_{e.w} [{' '.join(map(str, e.incl_w.image))}]")
    if g.basepoint is not None:
        lines.append(f"basepoint {g.basepoint}")
    return "\n".join(lines) + "\n"
