import json
import logging
import networkx as nx
import numpy as np
import typing as tp

from dataclasses import dataclass
from fractions import Fraction

from stacklab.covering import (CoveringGoG, Pi1Action, covering_from_action,
                               validate_action)
from stacklab.errors import (DocumentSyntaxError, SchemaError,
                             StacklabError, UnsupportedKind, ValidationError)
from stacklab.gog import (EdgeGroup, GraphOfGroups, Pi1Presentation,
                          VertexGroup, coarse_graph, pi1_presentation,
                          render_symbols)
from stacklab.gog_dsl import group_names
from stacklab.groupoids import FiniteGroupoid, validate_groupoid
from stacklab.groups import (FiniteGroup, GroupHom, group_from_permutations,
                             group_from_table, perm_from_cycles,
                             perm_to_cycles)


logger = logging.getLogger(__name__)

VERSION = 1
KINDS = ("group", "groupoid", "gog", "action", "cover", "report")


@dataclass(frozen=True)
class CanonicalDocument:
    kind: str
    payload: tp.Dict[str, tp.Any]
    version: int = VERSION


def label_text(x: tp.Any) -> str:
    '''
    Object labels are strings on disk; tuples render as "(a,b,c)".
    '''
    if isinstance(x, tuple):
        return "(" + ",".join(label_text(y) for y in x) + ")"
    return str(x)


def rational(q: Fraction) -> tp.Dict[str, int]:
    return {"den": q.denominator, "num": q.numerator}


def _json_safe(value: tp.Any) -> tp.Any:
    if isinstance(value, Fraction):
        return rational(value)
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        raise StacklabError(f"floating point value {value} in a document")
    if isinstance(value, dict):
        return {label_text(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return label_text(value)


def _dumps(value: tp.Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(", ", ": "))


# Payload encoders


def group_payload(g: FiniteGroup) -> tp.Dict[str, tp.Any]:
    if g.perm_gens is not None and g.degree is not None:
        return {"degree": g.degree, "name": g.name, "order": g.order,
                "perm_gens": [perm_to_cycles(p) for p in g.perm_gens]}
    return {"mul": [[g.mul(a, b) for b in g.elements()]
                    for a in g.elements()],
            "name": g.name, "order": g.order}


def groupoid_payload(g: FiniteGroupoid) -> tp.Dict[str, tp.Any]:
    labels = [label_text(x) for x in g.objects]
    return {
        "arrows": [{"id": f, "src": g.src[f], "tgt": g.tgt[f]}
                   for f in g.arrows()],
        "compose": sorted([f, h, k]
                          for (f, h), k in g.composition_table().items()),
        "identities": {labels[x]: g.identities[x]
                       for x in range(g.n_objects)},
        "objects": labels,
    }


def gog_payload(g: GraphOfGroups) -> tp.Dict[str, tp.Any]:
    named, vertex, edge = group_names(g)
    return {
        "basepoint": g.basepoint,
        "edges": [{"group": edge[e.id], "id": e.id,
                   "into_v": list(e.incl_v.image),
                   "into_w": list(e.incl_w.image), "v": e.v, "w": e.w}
                  for e in g.edges],
        "groups": {n: group_payload(group) for n, group in named},
        "name": g.name,
        "vertices": [{"group": vertex[v.id], "id": v.id} for v in g.vertices],
    }


def action_payload(a: Pi1Action) -> tp.Dict[str, tp.Any]:
    return {"degree": a.degree,
            "images": {s: [p + 1 for p in a.images[s]]
                       for s in a.presentation.generators}}


def cover_payload(c: CoveringGoG) -> tp.Dict[str, tp.Any]:
    return {
        "action": action_payload(c.action),
        "base": c.base.name,
        "conjugators": {eid: list(xy) for eid, xy in c.conjugators.items()},
        "degree": c.degree,
        "edge_map": dict(c.edge_map),
        "edge_points": {eid: p + 1 for eid, p in c.edge_points.items()},
        "total": gog_payload(c.total),
        "vertex_map": dict(c.vertex_map),
        "vertex_points": {uid: p + 1 for uid, p in c.vertex_points.items()},
    }


def document(obj: tp.Any) -> CanonicalDocument:
    '''
    Wraps a domain object (or a plain dict, as a report) in its document.
    '''
    if isinstance(obj, CanonicalDocument):
        return obj
    if isinstance(obj, FiniteGroup):
        return CanonicalDocument("group", group_payload(obj))
    if isinstance(obj, FiniteGroupoid):
        return CanonicalDocument("groupoid", groupoid_payload(obj))
    if isinstance(obj, GraphOfGroups):
        return CanonicalDocument("gog", gog_payload(obj))
    if isinstance(obj, Pi1Action):
        return CanonicalDocument("action", action_payload(obj))
    if isinstance(obj, CoveringGoG):
        return CanonicalDocument("cover", cover_payload(obj))
    if isinstance(obj, dict):
        return CanonicalDocument("report", obj)
    raise UnsupportedKind(f"cannot serialize {type(obj).__name__}")


def serialize(doc: tp.Any) -> str:
    '''
    Canonical text of a document: keys sorted, one payload key per line,
    compact JSON values, no floating point.

    Inputs:
        doc  [CanonicalDocument | domain object | dict]

    Outputs:
        [str]: newline terminated text, byte-identical for equal inputs
    '''
    doc = document(doc)
    payload = _json_safe(doc.payload)
    items = sorted(payload.items())
    lines = [f'{{"kind": {_dumps(doc.kind)}, "payload": {{']
    for i, (key, value) in enumerate(items):
        comma = "," if i < len(items) - 1 else ""
        lines.append(f"{_dumps(key)}: {_dumps(value)}{comma}")
    lines.append(f'}}, "version": {doc.version}}}')
    return "\n".join(lines) + "\n"


# Parsing


def _reject_float(text: str):
    raise SchemaError(f"floating point value {text} is not allowed",
                      "document")


def parse_document(text: str) -> CanonicalDocument:
    '''
    Reads the envelope: syntax, kind and version.
    '''
    try:
        raw = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, e.pos, e.lineno, e.colno)
    if not isinstance(raw, dict) or set(raw) != {"kind", "payload",
                                                 "version"}:
        raise SchemaError("expected an object with kind, payload and version",
                          "document")
    version = raw["version"]
    if not _is_int(version) or version != VERSION:
        raise SchemaError(f"unsupported version {version!r}", "version")
    if raw["kind"] not in KINDS:
        raise SchemaError(f"unknown kind {raw['kind']!r}", "kind")
    if not isinstance(raw["payload"], dict):
        raise SchemaError("payload must be an object", "payload")
    return CanonicalDocument(raw["kind"], raw["payload"], version)


def _is_int(x: tp.Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _field(obj: tp.Dict, key: str, check: tp.Callable[[tp.Any], bool],
           what: str, where: str) -> tp.Any:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", where)
    if key not in obj:
        raise SchemaError(f"missing {key}", where)
    value = obj[key]
    if not check(value):
        raise SchemaError(f"expected {what}", f"{where}.{key}")
    return value


def _int_list(x: tp.Any) -> bool:
    return isinstance(x, list) and all(_is_int(v) for v in x)


def _str(x: tp.Any) -> bool:
    return isinstance(x, str)


def decode_group(p: tp.Dict, where: str = "payload") -> FiniteGroup:
    name = _field(p, "name", _str, "a string", where)
    order = _field(p, "order", _is_int, "an integer", where)
    try:
        if "mul" in p:
            rows = _field(p, "mul", lambda x: isinstance(x, list)
                          and all(_int_list(r) for r in x),
                          "a list of integer rows", where)
            if len(rows) != order:
                raise SchemaError(f"order {order} but {len(rows)} rows",
                                  f"{where}.mul")
            return group_from_table(name, rows)
        if "perm_gens" in p:
            degree = _field(p, "degree", _is_int, "an integer", where)
            gens = _field(p, "perm_gens", lambda x: isinstance(x, list)
                          and all(isinstance(c, list)
                                  and all(_int_list(y) for y in c)
                                  for c in x),
                          "a list of cycle lists", where)
            return group_from_permutations(
                name, degree, [perm_from_cycles(c, degree) for c in gens],
                order=order)
    except (SchemaError, ValidationError):
        raise
    except StacklabError as e:
        raise ValidationError(str(e))
    raise SchemaError("a group needs mul or perm_gens", where)


def decode_groupoid(p: tp.Dict, where: str = "payload") -> FiniteGroupoid:
    objects = _field(p, "objects", lambda x: isinstance(x, list)
                     and all(_str(o) for o in x), "a list of strings", where)
    arrows = _field(p, "arrows", lambda x: isinstance(x, list),
                    "a list", where)
    n = len(objects)
    src, tgt = [], []
    for i, arrow in enumerate(arrows):
        at = f"{where}.arrows[{i}]"
        ident = _field(arrow, "id", _is_int, "an integer", at)
        if ident != i:
            raise SchemaError(f"arrow {ident} is out of id order", at)
        for key, out in (("src", src), ("tgt", tgt)):
            end = _field(arrow, key, _is_int, "an integer", at)
            if not 0 <= end < n:
                raise SchemaError(f"arrow {ident} has dangling {key} {end}",
                                  f"{at}.{key}")
            out.append(end)
    m = len(arrows)
    table = {}
    for i, triple in enumerate(_field(p, "compose", lambda x: isinstance(
            x, list), "a list", where)):
        at = f"{where}.compose[{i}]"
        if not (_int_list(triple) and len(triple) == 3):
            raise SchemaError("expected [f, g, f then g]", at)
        if not all(0 <= a < m for a in triple):
            raise SchemaError(f"dangling arrow id in {triple}", at)
        table[(triple[0], triple[1])] = triple[2]
    ids = _field(p, "identities", lambda x: isinstance(x, dict)
                 and all(_is_int(v) for v in x.values()),
                 "an object of arrow ids", where)
    if len(set(objects)) != n:
        dup = next(o for i, o in enumerate(objects) if o in objects[:i])
        raise SchemaError(f"duplicate object label {dup!r}",
                          f"{where}.objects")
    if set(ids) != set(objects):
        raise SchemaError("identities must name every object exactly once",
                          f"{where}.identities")
    for label, f in ids.items():
        if not 0 <= f < m:
            raise SchemaError(f"identity of {label} is a dangling arrow {f}",
                              f"{where}.identities.{label}")
    g = FiniteGroupoid(objects, src, tgt, table, [ids[x] for x in objects])
    report = validate_groupoid(g)
    if not report.ok:
        raise ValidationError(report.lines()[0], report)
    return g


def decode_gog(p: tp.Dict, where: str = "payload") -> GraphOfGroups:
    raw_groups = _field(p, "groups", lambda x: isinstance(x, dict),
                        "an object", where)
    groups = {n: decode_group(q, f"{where}.groups.{n}")
              for n, q in raw_groups.items()}

    def group_ref(obj: tp.Dict, at: str) -> FiniteGroup:
        ref = _field(obj, "group", _str, "a group name", at)
        if ref not in groups:
            raise SchemaError(f"unknown group {ref!r}", f"{at}.group")
        return groups[ref]

    vertices = []
    for i, v in enumerate(_field(p, "vertices", lambda x: isinstance(
            x, list), "a list", where)):
        at = f"{where}.vertices[{i}]"
        vertices.append(VertexGroup(_field(v, "id", _str, "a string", at),
                                    group_ref(v, at)))
    vertex_group = {v.id: v.group for v in vertices}
    edges = []
    for i, e in enumerate(_field(p, "edges", lambda x: isinstance(x, list),
                                 "a list", where)):
        at = f"{where}.edges[{i}]"
        group = group_ref(e, at)
        ends = []
        for key in ("v", "w"):
            end = _field(e, key, _str, "a vertex id", at)
            if end not in vertex_group:
                raise SchemaError(f"unknown vertex {end!r}", f"{at}.{key}")
            image = _field(e, f"into_{key}", _int_list, "a list of ids", at)
            if len(image) != group.order:
                raise SchemaError(f"{len(image)} images for a group of order "
                                  f"{group.order}", f"{at}.into_{key}")
            ends.append((end, GroupHom(group, vertex_group[end],
                                       tuple(image))))
        edges.append(EdgeGroup(_field(e, "id", _str, "a string", at),
                               ends[0][0], ends[1][0], group, ends[0][1],
                               ends[1][1]))
    basepoint = _field(p, "basepoint", lambda x: x is None or _str(x),
                       "a vertex id or null", where)
    name = _field(p, "name", _str, "a string", where)
    try:
        return GraphOfGroups(vertices, edges, basepoint=basepoint, name=name)
    except StacklabError as e:
        raise ValidationError(str(e))


def decode_action(p: tp.Dict, pres: Pi1Presentation,
                  where: str = "payload") -> Pi1Action:
    degree = _field(p, "degree", lambda x: _is_int(x) and x > 0,
                    "a positive integer", where)
    images = _field(p, "images", lambda x: isinstance(x, dict),
                    "an object", where)
    if set(images) != set(pres.generators):
        raise SchemaError(f"images must be given for exactly "
                          f"{', '.join(pres.generators) or 'no generators'}",
                          f"{where}.images")
    perms = {}
    for s in pres.generators:
        perm = images[s]
        if not _int_list(perm) or sorted(perm) != list(range(1, degree + 1)):
            raise SchemaError(f"not a permutation of 1..{degree}",
                              f"{where}.images.{s}")
        perms[s] = tuple(x - 1 for x in perm)
    action = Pi1Action(pres, degree, perms)
    ok, rel = validate_action(action)
    if not ok:
        raise ValidationError(f"relation {render_symbols(rel.relator())} "
                              f"acts nontrivially")
    return action


def decode_cover(p: tp.Dict, base: GraphOfGroups,
                 where: str = "payload") -> CoveringGoG:
    pres = pi1_presentation(base)
    action = decode_action(_field(p, "action", lambda x: isinstance(x, dict),
                                  "an object", where), pres,
                           f"{where}.action")
    c = covering_from_action(base, action)
    if _json_safe(cover_payload(c)) != p:
        raise ValidationError("cover data does not match its action")
    return c


def decode_report(p: tp.Dict, where: str = "payload") -> tp.Dict:
    _field(p, "ok", lambda x: isinstance(x, bool), "a boolean", where)
    return p


def parse(text: str, kind: str, context: tp.Any = None) -> tp.Any:
    '''
    Parses a canonical document of the expected kind into its domain object.

    Inputs:
        text     [str]
        kind     [str]:  one of KINDS
        context  [tp.Any]:  the Pi1Presentation of an action, the base
                            GraphOfGroups of a cover

    Outputs:
        [tp.Any]: FiniteGroup, FiniteGroupoid, GraphOfGroups, Pi1Action,
                  CoveringGoG or the report dict

    Raises DocumentSyntaxError, SchemaError or ValidationError.
    '''
    doc = parse_document(text)
    if doc.kind != kind:
        raise SchemaError(f"expected a {kind} document, got {doc.kind}",
                          "kind")
    p = doc.payload
    if kind == "group":
        return decode_group(p)
    if kind == "groupoid":
        return decode_groupoid(p)
    if kind == "gog":
        return decode_gog(p)
    if kind == "action":
        if context is None:
            raise StacklabError("an action document needs its presentation")
        return decode_action(p, context)
    if kind == "cover":
        if context is None:
            raise StacklabError("a cover document needs its base graph")
        return decode_cover(p, context)
    return decode_report(p)


def read_action(text: str, pres: Pi1Presentation) -> Pi1Action:
    '''
    Accepts a full action document or the bare {"degree", "images"} object.
    '''
    try:
        raw = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as e:
        raise DocumentSyntaxError(e.msg, e.pos, e.lineno, e.colno)
    if isinstance(raw, dict) and "kind" in raw:
        return parse(text, "action", pres)
    if not isinstance(raw, dict):
        raise SchemaError("expected an object", "document")
    return decode_action(raw, pres, "document")


# DOT


def _q(x: tp.Any) -> str:
    return json.dumps(label_text(x))


def _groupoid_dot(g: FiniteGroupoid) -> tp.List[str]:
    lines = []
    for x in range(g.n_objects):
        label = f"{label_text(g.objects[x])}\n|I|={len(g.hom(x, x))}"
        lines.append(f"  {_q(g.objects[x])} [label={_q(label)}];")
    for x in range(g.n_objects):
        for y in range(x + 1, g.n_objects):
            n = len(g.hom(x, y))
            if n:
                lines.append(f"  {_q(g.objects[x])} -- {_q(g.objects[y])} "
                             f"[label={_q(n)}];")
    return lines


def _multigraph_dot(graph: nx.MultiGraph,
                    names: tp.Optional[tp.Dict[str, str]] = None
                    ) -> tp.List[str]:
    lines = []
    for v, attrs in graph.nodes(data=True):
        head = f"{v} over {names[v]}" if names else f"{v}"
        label = f"{head}\n|G|={attrs.get('order', 1)}"
        lines.append(f"  {_q(v)} [label={_q(label)}];")
    for v, w, key, attrs in graph.edges(keys=True, data=True):
        label = f"{key} |G|={attrs.get('order', 1)}"
        lines.append(f"  {_q(v)} -- {_q(w)} [label={_q(label)}];")
    return lines


def _ball_dot(ball: nx.Graph) -> tp.List[str]:
    lines = []
    for node in sorted(ball.nodes):
        attrs = ball.nodes[node]
        label = f"{attrs['vertex']}\n|G|={attrs['order']}"
        lines.append(f"  {node} [label={_q(label)}];")
    for v, w in sorted(tuple(sorted(e)) for e in ball.edges):
        lines.append(f"  {v} -- {w} [label={_q(ball.edges[v, w]['edge'])}];")
    return lines


def to_dot(obj: tp.Any, name: tp.Optional[str] = None) -> str:
    '''
    Deterministic DOT text for a groupoid, a graph of groups (its coarse
    graph), a coarse graph, a Bass-Serre ball or a cover.
    '''
    if isinstance(obj, FiniteGroupoid):
        body, default = _groupoid_dot(obj), obj.name or "groupoid"
    elif isinstance(obj, GraphOfGroups):
        body, default = _multigraph_dot(coarse_graph(obj)), obj.name or "gog"
    elif isinstance(obj, CoveringGoG):
        body = _multigraph_dot(coarse_graph(obj.total), obj.vertex_map)
        default = obj.total.name or "cover"
    elif isinstance(obj, nx.MultiGraph):
        body, default = _multigraph_dot(obj), obj.graph.get("name") or "gog"
    elif isinstance(obj, nx.Graph) and all(
            "vertex" in attrs for _, attrs in obj.nodes(data=True)):
        body, default = _ball_dot(obj), "ball"
    else:
        raise UnsupportedKind(f"no DOT rendering for {type(obj).__name__}")
    return "\n".join([f"graph {_q(name or default)} {{"] + body + ["}"]) + "\n"
