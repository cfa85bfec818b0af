import os
import typing as tp


# Default bound on groupoid arrow counts and tree ball sizes
DEFAULT_CAP = 1_000_000


def get_config() -> tp.Dict:
    '''
    Returns a `config` dict read from the environment

    Outputs:
        [tp.Dict]
        cap  [int]:  STACKLAB_CAP env, size cap for constructed groupoids
                     and Bass-Serre tree balls
    '''
    return {
        "cap": int(os.getenv('STACKLAB_CAP', DEFAULT_CAP)),
    }


def get_params() -> tp.Dict:
    '''
    Returns a `params` dict of fixed search and oracle bounds.

    Outputs:
        [tp.Dict]
        table_order       [int]:  largest group order with a stored
                                  multiplication table
        iso_order         [int]:  largest order group_isomorphic searches
        iso_gens          [int]:  largest generating set it backtracks over
        max_degree        [int]:  cap on enumerate_actions degree
        oracle_objects    [int]:  object bound of the fiber product oracle
        oracle_arrows     [int]:  arrow bound of the fiber product oracle
        words             [int]:  generated words in the normal form suite
        word_length       [int]:  syllable bound of generated words
        random_groupoids  [int]:  corpus size of the Morita relation suite
        workers           [int]:  threads used by parallel oracle checks
        seed              [int]:  default seed of randomized searches
    '''
    return {
        "table_order": 512,
        "iso_order": 512,
        "iso_gens": 4,
        "max_degree": 7,
        "oracle_objects": 4,
        "oracle_arrows": 24,
        "words": 10_000,
        "word_length": 12,
        "random_groupoids": 100,
        "workers": 1,
        "seed": 0,
    }


def get_cap(cap: tp.Optional[int] = None) -> int:
    return get_config()['cap'] if cap is None else cap
