import os
import typing as tp

from stacklab.gog import GraphOfGroups
from stacklab.gog_dsl import load_gog


def get_corpus_path() -> str:
    base = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(base, 'constants', 'gog')


def get_golden_path() -> str:
    base = os.path.dirname(os.path.abspath(__file__))
    return os.path.join(base, 'constants', 'golden')


def corpus_names() -> tp.List[str]:
    return sorted(f[:-4] for f in os.listdir(get_corpus_path())
                  if f.endswith('.gog'))


def load_corpus_gog(name: str) -> GraphOfGroups:
    return load_gog(os.path.join(get_corpus_path(), f'{name}.gog'))


def load_corpus() -> tp.Dict[str, GraphOfGroups]:
    '''
    Every graph of groups shipped in constants/gog, keyed by file stem.
    '''
    return {name: load_corpus_gog(name) for name in corpus_names()}


def golden_files() -> tp.List[str]:
    '''
    Paths of the golden documents; the kind is the second to last suffix,
    e.g. `swap.groupoid.json`.
    '''
    base = get_golden_path()
    return [os.path.join(base, f) for f in sorted(os.listdir(base))
            if f.endswith('.json')]


def golden_kind(path: str) -> str:
    return os.path.basename(path).split('.')[-2]


def read_golden(name: str) -> str:
    with open(os.path.join(get_golden_path(), name)) as f:
        return f.read()
