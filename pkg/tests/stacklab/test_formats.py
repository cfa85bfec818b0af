import os
import unittest

from fractions import Fraction

from stacklab import bass_serre as bs
from stacklab import covering as cov
from stacklab import formats
from stacklab import gog
from stacklab import groupoids as gpd
from stacklab import groups as grp
from stacklab.corpus import (golden_files, golden_kind, load_corpus_gog,
                             read_golden)
from stacklab.errors import (DocumentSyntaxError, SchemaError, StacklabError,
                             UnsupportedKind, ValidationError)


class TestFormats(unittest.TestCase):

    def get_helper(self, name: str) -> str:
        '''
        Helper to return the text of a fixture in `tests/helpers/formats`
        '''
        base = os.path.dirname(os.path.abspath(__file__))
        base = os.path.abspath(os.path.join(base, os.pardir))
        base = os.path.join(base, 'helpers')
        base = os.path.join(base, 'formats')
        with open(os.path.join(base, name)) as f:
            return f.read()

    def get_swap(self) -> gpd.FiniteGroupoid:
        flip = {"a": "b", "b": "a"}
        return gpd.action_groupoid(grp.cyclic_group(2), ["a", "b"],
                                   lambda g, x: x if g == 0 else flip[x])

    def test_golden_documents(self):
        seg = load_corpus_gog("segment_z2_z3")
        cases = [
            (grp.cyclic_group(6), "z6.group.json"),
            (grp.symmetric_group(3), "s3.group.json"),
            (self.get_swap(), "swap.groupoid.json"),
            (gpd.unit_groupoid(["*"]), "point.groupoid.json"),
            (seg, "segment_z2_z3.gog.json"),
            ({"chi": gog.euler_characteristic(seg), "ok": True},
             "segment_z2_z3_chi.report.json"),
        ]

        for obj, name in cases:
            self.assertEqual(formats.serialize(obj), read_golden(name), name)

    def test_golden_round_trips(self):
        for path in golden_files():
            kind = golden_kind(path)
            stem = os.path.basename(path).split(".")[0]
            context = None
            if kind == "action":
                context = gog.pi1_presentation(load_corpus_gog(stem))
            with open(path) as f:
                text = f.read()

            again = formats.serialize(formats.parse(text, kind, context))

            self.assertEqual(again, text, path)

    def test_cover_round_trip(self):
        g = load_corpus_gog("segment_z2_z3")
        a = cov.Pi1Action(gog.pi1_presentation(g), 3,
                          {"a": (1, 0, 2), "b": (1, 2, 0)})
        text = formats.serialize(cov.covering_from_action(g, a))

        c = formats.parse(text, "cover", g)

        self.assertEqual(formats.serialize(c), text)
        self.assertEqual(c.action.images, a.images)

        tampered = text.replace('"base": "segment_z2_z3"', '"base": "other"')
        with self.assertRaises(ValidationError):
            formats.parse(tampered, "cover", g)

    def test_values(self):
        self.assertEqual(formats.label_text((1, "a", (2, 3))), "(1,a,(2,3))")
        self.assertEqual(formats.rational(Fraction(-1, 6)),
                         {"den": 6, "num": -1})
        with self.assertRaises(StacklabError):
            formats.serialize({"ok": True, "x": 0.5})
        with self.assertRaises(UnsupportedKind):
            formats.serialize(object())

    def test_envelope_errors(self):
        with self.assertRaises(DocumentSyntaxError) as ctx:
            formats.parse_document('{"kind": "group",\n"payload": ')
        self.assertEqual(ctx.exception.line, 2)

        cases = [
            ('[1, 2]', "document"),
            ('{"kind": "group", "payload": {}}', "document"),
            ('{"kind": "group", "payload": {}, "version": 2}', "version"),
            ('{"kind": "stack", "payload": {}, "version": 1}', "kind"),
            ('{"kind": "group", "payload": [], "version": 1}', "payload"),
            ('{"kind": "report", "payload": {"ok": 1.5}, "version": 1}',
             "document"),
        ]
        for text, location in cases:
            with self.assertRaises(SchemaError) as ctx:
                formats.parse_document(text)
            self.assertEqual(ctx.exception.location, location, text)

    def test_kind_mismatch(self):
        with self.assertRaises(SchemaError) as ctx:
            formats.parse(read_golden("z2.group.json"), "groupoid")
        self.assertEqual(ctx.exception.location, "kind")

    def test_group_errors(self):
        bad_table = ('{"kind": "group", "payload": {"mul": [[0, 1], [1, 1]],'
                     ' "name": "G", "order": 2}, "version": 1}')
        short = ('{"kind": "group", "payload": {"mul": [[0]], "name": "G",'
                 ' "order": 2}, "version": 1}')
        wrong_order = ('{"kind": "group", "payload": {"degree": 3, "name": '
                       '"G", "order": 3, "perm_gens": [[[1, 2]]]}, '
                       '"version": 1}')

        with self.assertRaises(ValidationError):
            formats.parse(bad_table, "group")
        with self.assertRaises(SchemaError) as ctx:
            formats.parse(short, "group")
        self.assertEqual(ctx.exception.location, "payload.mul")
        with self.assertRaises(ValidationError):
            formats.parse(wrong_order, "group")

    def test_groupoid_errors(self):
        with self.assertRaises(ValidationError) as ctx:
            formats.parse(self.get_helper('missing_composite.groupoid.json'),
                          "groupoid")
        self.assertEqual(ctx.exception.report.violations[0].axiom,
                         "compose-domain")

        with self.assertRaises(SchemaError) as ctx:
            formats.parse(self.get_helper('dangling_arrow.groupoid.json'),
                          "groupoid")
        self.assertEqual(ctx.exception.location, "payload.arrows[0].tgt")

    def test_duplicate_object_labels(self):
        payload = {"objects": ["x", "x"],
                   "arrows": [{"id": 0, "src": 0, "tgt": 0},
                              {"id": 1, "src": 1, "tgt": 1}],
                   "compose": [[0, 0, 0], [1, 1, 1]],
                   "identities": {"x": 0}}

        with self.assertRaises(SchemaError) as ctx:
            formats.decode_groupoid(payload)
        self.assertEqual(ctx.exception.location, "payload.objects")
        self.assertIn("'x'", str(ctx.exception))

    def test_gog_errors(self):
        text = read_golden("segment_z2_z3.gog.json")

        unknown = text.replace('"group": "Z3", "id": "v2"',
                               '"group": "Z5", "id": "v2"')
        with self.assertRaises(SchemaError) as ctx:
            formats.parse(unknown, "gog")
        self.assertEqual(ctx.exception.location, "payload.vertices[1].group")

        dangling = text.replace('"w": "v2"', '"w": "v7"')
        with self.assertRaises(SchemaError):
            formats.parse(dangling, "gog")

        base = text.replace('"basepoint": "v1"', '"basepoint": "v9"')
        with self.assertRaises(ValidationError):
            formats.parse(base, "gog")

    def test_actions(self):
        pres = gog.pi1_presentation(load_corpus_gog("dinfty"))

        bare = formats.read_action(self.get_helper('bare_dinfty.action.json'),
                                   pres)
        self.assertEqual(bare.images, {"a": (1, 0), "b": (0, 1)})

        full = formats.read_action(read_golden("dinfty.action.json"), pres)
        self.assertEqual(full.images, {"a": (1, 0), "b": (1, 0)})

        with self.assertRaises(SchemaError):
            formats.read_action('{"degree": 2, "images": {"a": [2, 1]}}',
                                pres)
        with self.assertRaises(SchemaError):
            formats.read_action('{"degree": 2, "images": {"a": [2, 2], '
                                '"b": [1, 2]}}', pres)
        with self.assertRaises(SchemaError):
            formats.read_action('[2, 1]', pres)
        with self.assertRaises(StacklabError):
            formats.parse(read_golden("dinfty.action.json"), "action")

    def test_action_relation_fails(self):
        pres = gog.pi1_presentation(load_corpus_gog("segment_z2_z3"))

        with self.assertRaises(ValidationError):
            formats.read_action('{"degree": 3, "images": {"a": [2, 3, 1], '
                                '"b": [2, 3, 1]}}', pres)


class TestDot(unittest.TestCase):

    def test_groupoid(self):
        flip = {"a": "b", "b": "a"}
        swap = gpd.action_groupoid(grp.cyclic_group(2), ["a", "b"],
                                   lambda g, x: x if g == 0 else flip[x])

        self.assertEqual(formats.to_dot(swap, name="swap"),
                         'graph "swap" {\n'
                         '  "a" [label="a\\n|I|=1"];\n'
                         '  "b" [label="b\\n|I|=1"];\n'
                         '  "a" -- "b" [label="1"];\n'
                         '}\n')

    def test_gog(self):
        dot = formats.to_dot(load_corpus_gog("segment_z2_z3"))

        self.assertTrue(dot.startswith('graph "segment_z2_z3" {\n'))
        self.assertIn('  "v2" [label="v2\\n|G|=3"];', dot)
        self.assertIn('  "v1" -- "v2" [label="e1 |G|=1"];', dot)

    def test_ball(self):
        ball = bs.bass_serre_ball(load_corpus_gog("segment_z2_z3"), 1)

        dot = formats.to_dot(ball)

        self.assertEqual(dot.count("[label="), 5)
        self.assertIn('  0 -- 2 [label="e1"];', dot)

    def test_cover(self):
        g = load_corpus_gog("dinfty")
        a = cov.Pi1Action(gog.pi1_presentation(g), 2,
                          {"a": (1, 0), "b": (1, 0)})

        dot = formats.to_dot(cov.covering_from_action(g, a))

        self.assertIn('"v1.0" [label="v1.0 over v1\\n|G|=1"];', dot)
        self.assertEqual(dot, formats.to_dot(cov.covering_from_action(g, a)))

    def test_unsupported(self):
        with self.assertRaises(UnsupportedKind):
            formats.to_dot(42)
