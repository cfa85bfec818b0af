import click
import logging
import os
import sys
import typing as tp

from stacklab import __version__
from stacklab import (bass_serre as bs, constructions as cons, covering as cov,
                      formats, gog, groupoids as gpd, morita)
from stacklab.config import get_params
from stacklab.corpus import corpus_names, get_corpus_path, get_golden_path
from stacklab.errors import (InvalidAction, InvalidGroup,
                             NonInjectiveInclusion, StacklabError,
                             ValidationError)
from stacklab.gog_dsl import parse_gog, write_gog
from stacklab.groups import FiniteGroup, GroupHom, group_hom
from stacklab.selftest import run_selftest


logger = logging.getLogger(__name__)

# Exit statuses
TRUE, FALSE, ERROR = 0, 1, 2


class StacklabGroup(click.Group):
    '''
    Maps domain errors to exit status 2 with the message on stderr.
    '''

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except StacklabError as e:
            if not (ctx.obj or {}).get('quiet'):
                logger.exception("stacklab failed")
            click.echo(f"error: {e}", err=True)
            ctx.exit(ERROR)


def configure_logging(quiet: bool, verbose: bool):
    level = logging.INFO if verbose else logging.WARNING
    if quiet:
        level = logging.CRITICAL + 1
    logging.basicConfig(stream=sys.stderr, level=level, force=True,
                        format="%(levelname)s %(name)s: %(message)s")


# Inputs


def read_input(path: str) -> str:
    '''
    Reads `path`, falling back to the graphs and documents shipped with
    the package when no such file exists.
    '''
    candidates = [path]
    name = os.path.basename(path)
    candidates += [os.path.join(get_corpus_path(), name),
                   os.path.join(get_golden_path(), name)]
    if name in corpus_names():
        candidates.append(os.path.join(get_corpus_path(), f"{name}.gog"))
    for candidate in candidates:
        if os.path.isfile(candidate):
            with open(candidate) as f:
                return f.read()
    raise StacklabError(f"no such file {path!r}")


def _stem(path: str) -> str:
    return os.path.basename(path).split(".")[0]


def load_graph(path: str) -> gog.GraphOfGroups:
    text = read_input(path)
    if path.endswith(".json"):
        return formats.parse(text, "gog")
    return parse_gog(text, name=_stem(path))


def load_document(path: str) -> formats.CanonicalDocument:
    return formats.parse_document(read_input(path))


def load_groupoid(path: str) -> gpd.FiniteGroupoid:
    '''
    A groupoid document, or a group document read as its BG.
    '''
    doc = load_document(path)
    if doc.kind == "group":
        return gpd.classifying_groupoid(formats.decode_group(doc.payload))
    if doc.kind != "groupoid":
        raise StacklabError(f"{path}: expected a groupoid or group, got "
                            f"{doc.kind}")
    return formats.decode_groupoid(doc.payload)


def load_group(path: str) -> FiniteGroup:
    return formats.parse(read_input(path), "group")


def load_hom(path: str, images: str, base: FiniteGroup) -> GroupHom:
    try:
        image = [int(x) for x in images.replace(",", " ").split()]
    except ValueError:
        raise StacklabError(f"images {images!r} are not element ids")
    return group_hom(load_group(path), base, image)


def emit(obj: tp.Any, as_dot: bool = False, name: tp.Optional[str] = None):
    if as_dot:
        click.echo(formats.to_dot(obj, name=name), nl=False)
    else:
        click.echo(formats.serialize(obj), nl=False)


def decide(ok: bool):
    click.get_current_context().exit(TRUE if ok else FALSE)


json_flag = click.option('--json', 'as_json', is_flag=True,
                         help='Emit a canonical JSON document.')
dot_flag = click.option('--dot', 'as_dot', is_flag=True,
                        help='Emit Graphviz DOT instead.')


# Commands


@click.group(cls=StacklabGroup)
@click.version_option(__version__, prog_name="stacklab")
@click.option('--seed', type=int, default=None,
              help='Seed of randomized searches.')
@click.option('-q', '--quiet', is_flag=True, help='Suppress diagnostics.')
@click.option('-v', '--verbose', is_flag=True, help='Log progress.')
@click.pass_context
def cli(ctx: click.Context, seed: tp.Optional[int], quiet: bool,
        verbose: bool):
    '''
    Finite groupoids, graphs of groups and their covers.
    '''
    configure_logging(quiet, verbose)
    seed = get_params()['seed'] if seed is None else seed
    ctx.obj = {'seed': seed, 'quiet': quiet}


@cli.command()
@click.argument('path')
@click.option('--gog', 'base', default=None,
              help='Base graph of an action or cover document.')
def validate(path: str, base: tp.Optional[str]):
    '''
    Checks a .gog file or a canonical document; exit 1 when invalid.
    '''
    report: tp.Dict[str, tp.Any] = {"ok": True}
    try:
        if not path.endswith(".json"):
            g = load_graph(path)
            report.update(kind="gog", vertices=len(g.vertices),
                          edges=len(g.edges), connected=gog.is_connected(g))
        else:
            doc = load_document(path)
            report["kind"] = doc.kind
            if doc.kind in ("action", "cover"):
                if base is None:
                    raise StacklabError(f"a {doc.kind} document needs --gog")
                g = load_graph(base)
                context = (gog.pi1_presentation(g) if doc.kind == "action"
                           else g)
                obj = formats.parse(read_input(path), doc.kind, context)
                if doc.kind == "action":
                    ok, rel = cov.validate_action(obj)
                    if not ok:
                        report.update(ok=False, violations=[
                            f"relation {gog.render_symbols(rel.relator())} "
                            f"acts nontrivially" if rel is not None
                            else "an image is not a permutation"])
            else:
                formats.parse(read_input(path), doc.kind)
    except ValidationError as e:
        lines = e.report.lines() if e.report is not None else [str(e)]
        report.update(ok=False, violations=lines)
    except (InvalidGroup, NonInjectiveInclusion, InvalidAction) as e:
        report.update(ok=False, violations=[str(e)])
    emit(report)
    decide(report["ok"])


@cli.command()
@click.argument('path')
@dot_flag
def skeleton(path: str, as_dot: bool):
    '''
    One object per connected component of a groupoid.
    '''
    sk = morita.skeleton(load_groupoid(path))
    emit(sk.groupoid, as_dot)


@cli.command('morita-check')
@click.argument('left')
@click.argument('right')
def morita_check(left: str, right: str):
    '''
    Decides Morita equivalence; exit 0 with a witness, 1 when inequivalent.
    '''
    g, h = load_groupoid(left), load_groupoid(right)
    ok, witness = morita.morita_equivalent(g, h)
    report: tp.Dict[str, tp.Any] = {"ok": ok,
                                    "profile": morita.isotropy_profile(g)}
    if witness is not None:
        report["matching"] = [
            {"left": formats.label_text(x), "right": formats.label_text(y),
             "isomorphism": list(iso.image)}
            for x, y, iso in witness.matching]
    emit(report)
    decide(ok)


@cli.command('fiber-product')
@click.argument('base')
@click.argument('left')
@click.argument('left_images')
@click.argument('right')
@click.argument('right_images')
@dot_flag
def fiber_product(base: str, left: str, left_images: str, right: str,
                  right_images: str, as_dot: bool):
    '''
    BH x_BG BK for homomorphisms H -> G <- K given by element images,
    e.g. `fiber-product s3.group.json z2.group.json "0 2" z3.group.json
    "0 1 3"`.
    '''
    g = load_group(base)
    f = gpd.hom_functor(load_hom(left, left_images, g))
    k = gpd.hom_functor(load_hom(right, right_images, g))
    result = cons.fiber_product(f, k)
    emit(result.total, as_dot)


@cli.command()
@click.argument('path')
@dot_flag
def inertia(path: str, as_dot: bool):
    '''
    Inertia groupoid of a groupoid, or of BG for a group document.
    '''
    ig, _ = cons.inertia(load_groupoid(path))
    emit(ig, as_dot)


@cli.command('double-cosets')
@click.argument('base')
@click.argument('left')
@click.argument('left_images')
@click.argument('right')
@click.argument('right_images')
def double_cosets(base: str, left: str, left_images: str, right: str,
                  right_images: str):
    '''
    Double cosets f(H) a g(K) of G with their stabilizers in H x K.
    '''
    g = load_group(base)
    d = cons.double_coset_fiber_product(load_hom(left, left_images, g),
                                        load_hom(right, right_images, g))
    emit({"ok": True,
          "cosets": [{"representative": c.representative,
                      "elements": list(c.elements),
                      "stabilizer": list(c.inclusion.image)}
                     for c in d.cosets]})


@cli.command()
@click.argument('path')
@click.option('--basepoint', default=None, help='Base vertex id.')
@json_flag
def pi1(path: str, basepoint: tp.Optional[str], as_json: bool):
    '''
    Presentation of the fundamental group of a graph of groups.
    '''
    pres = gog.pi1_presentation(load_graph(path), basepoint)
    if not as_json:
        click.echo(pres.text())
        return
    free_rank, torsion = gog.abelianization(pres)
    emit({"ok": True, "generators": list(pres.generators),
          "relations": [gog.render_symbols(r.relator())
                        for r in pres.relations],
          "abelianization": {"free_rank": free_rank, "torsion": torsion}})


@cli.command()
@click.argument('path')
@click.argument('word')
def reduce(path: str, word: str):
    '''
    Normal form of a word in the presentation symbols, e.g. "a b^-1 t".
    '''
    g = load_graph(path)
    pres = gog.pi1_presentation(g)
    w = bs.reduce_word(g, bs.transversal_tables(g),
                       bs.parse_word(g, pres, word), pres.basepoint)
    click.echo(bs.render_word(g, pres, w))


@cli.command()
@click.argument('path')
@click.argument('radius', type=click.IntRange(min=0))
@dot_flag
@json_flag
def ball(path: str, radius: int, as_dot: bool, as_json: bool):
    '''
    A ball of the Bass-Serre tree around the base vertex.
    '''
    g = load_graph(path)
    tree = cov.universal_cover_ball(g, radius)
    if as_dot:
        emit(tree, True, name=f"{g.name}_ball_{radius}")
    elif as_json:
        emit({"ok": True, "radius": radius,
              "nodes": [{"id": n, "vertex": tree.nodes[n]['vertex'],
                         "depth": tree.nodes[n]['depth']}
                        for n in sorted(tree.nodes)],
              "edges": sorted(sorted(e) for e in tree.edges)})
    else:
        click.echo(f"{tree.number_of_nodes()} vertices "
                   f"{tree.number_of_edges()} edges")


@cli.command('inertia-gog')
@click.argument('path')
@dot_flag
@json_flag
def inertia_gog(path: str, as_dot: bool, as_json: bool):
    '''
    Inertia graph of groups: conjugacy classes with their centralizers.
    '''
    ig = gog.inertia_gog(load_graph(path))
    if as_dot or as_json:
        emit(ig, as_dot)
    else:
        click.echo(write_gog(ig), nl=False)


@cli.command()
@click.argument('path')
@click.option('--max-degree', type=int, default=0,
              help='Also search torsion free covers up to this degree.')
@json_flag
def uniformize(path: str, max_degree: int, as_json: bool):
    '''
    Certifies that every vertex group injects into pi_1; exit 1 otherwise.
    A missing torsion free cover within --max-degree is inconclusive.
    '''
    g = load_graph(path)
    report = bs.omega_injectivity_certificate(g)
    cover = cov.torsion_free_cover(g, max_degree) if max_degree else None
    if as_json:
        emit({"ok": report.passed, "vertex_checks": report.vertex_checks,
              "edge_checks": report.edge_checks,
              "counterexample": report.counterexample,
              "torsion_free_cover": cover.degree if cover else None})
    else:
        for line in report.lines():
            click.echo(line)
        if max_degree:
            click.echo(f"torsion free cover of degree {cover.degree}" if cover
                       else f"no torsion free cover of degree <= "
                            f"{max_degree} (inconclusive)")
    decide(report.passed)


@cli.command()
@click.argument('path')
@click.option('--action', 'action_path', required=True,
              help='Action JSON: {"degree": n, "images": {...}}.')
@dot_flag
@json_flag
def cover(path: str, action_path: str, as_dot: bool, as_json: bool):
    '''
    The covering graph of groups classified by a pi_1 action.
    '''
    g = load_graph(path)
    a = formats.read_action(read_input(action_path), gog.pi1_presentation(g))
    c = cov.covering_from_action(g, a)
    if as_dot or as_json:
        emit(c, as_dot)
    else:
        click.echo(write_gog(c.total), nl=False)


@cli.command()
@click.argument('path')
@click.argument('cover_path')
def monodromy(path: str, cover_path: str):
    '''
    Recovers the pi_1 action from a cover document over PATH; exit 1 when
    it is not conjugate to the recorded action.
    '''
    g = load_graph(path)
    c = formats.parse(read_input(cover_path), "cover", g)
    a = cov.monodromy(c)
    emit(a)
    decide(cov.actions_conjugate(a, c.action))


@cli.command('enumerate')
@click.argument('path')
@click.option('--max-degree', type=int, required=True,
              help='Largest degree of the enumerated actions.')
def enumerate_actions(path: str, max_degree: int):
    '''
    Transitive pi_1 actions up to conjugacy.
    '''
    pres = gog.pi1_presentation(load_graph(path))
    actions = cov.enumerate_actions(pres, max_degree)
    emit({"ok": True, "count": len(actions),
          "actions": [formats.action_payload(a) for a in actions]})


@cli.command('export-dot')
@click.argument('path')
@click.option('--gog', 'base', default=None,
              help='Base graph of a cover document.')
def export_dot(path: str, base: tp.Optional[str]):
    '''
    DOT for a .gog file or a groupoid, group, gog or cover document.
    '''
    if not path.endswith(".json"):
        emit(load_graph(path), True)
        return
    doc = load_document(path)
    if doc.kind in ("group", "groupoid"):
        obj: tp.Any = load_groupoid(path)
    elif doc.kind == "cover":
        if base is None:
            raise StacklabError("a cover document needs --gog")
        obj = formats.parse(read_input(path), "cover", load_graph(base))
    else:
        obj = formats.parse(read_input(path), doc.kind)
    emit(obj, True, name=_stem(path))


@cli.command()
@click.option('--workers', type=int, default=None, help='Checker threads.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False),
              default=None, help='Also write the results as CSV.')
@click.pass_context
def selftest(ctx: click.Context, workers: tp.Optional[int],
             csv_path: tp.Optional[str]):
    '''
    Runs every oracle suite; exit 1 if any check fails.
    '''
    df = run_selftest(seed=ctx.obj['seed'], workers=workers)
    for row in df.itertuples(index=False):
        status = "PASS" if row.passed else "FAIL"
        click.echo(f"{status} {row.suite}: {row.check} {row.detail}".rstrip())
    failed = int((~df['passed']).sum())
    click.echo(f"{len(df) - failed}/{len(df)} checks passed")
    if csv_path:
        df.to_csv(csv_path, index=False)
    decide(failed == 0)


def main():
    cli(prog_name="stacklab")


if __name__ == '__main__':
    main()
