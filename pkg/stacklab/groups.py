import logging
import numpy as np
import typing as tp

from collections import Counter
from dataclasses import dataclass

import sympy.combinatorics as comb
from sympy.combinatorics import named_groups

from stacklab.config import get_params
from stacklab.errors import InvalidGroup


logger = logging.getLogger(__name__)

Perm = tp.Tuple[int, ...]
# A word over a generating set: (generator index, +1 | -1) letters
GenWord = tp.Tuple[tp.Tuple[int, int], ...]


def _compose(p: Perm, q: Perm) -> Perm:
    # p then q
    return tuple(q[i] for i in p)


class FiniteGroup:
    '''
    A finite group on element ids 0..order-1 with 0 the identity.

    Groups up to `table_order` elements keep a full multiplication table;
    larger groups must come from permutation generators and multiply their
    permutations on the fly.
    '''

    def __init__(self, name: str, order: int,
                 table: tp.Optional[np.ndarray] = None,
                 perms: tp.Optional[tp.Sequence[Perm]] = None,
                 degree: tp.Optional[int] = None,
                 perm_gens: tp.Optional[tp.Sequence[Perm]] = None,
                 labels: tp.Optional[tp.Sequence[tp.Any]] = None):
        self.name = name
        self.order = order
        self.degree = degree
        self.perm_gens = tuple(perm_gens) if perm_gens is not None else None
        self.perms = tuple(perms) if perms is not None else None
        self.labels = tuple(labels) if labels is not None else None
        self._index = (
            {p: i for i, p in enumerate(self.perms)}
            if self.perms is not None else None
        )

        if table is None and self.perms is None:
            raise InvalidGroup(f"group {name} needs a table or permutations")

        if table is not None:
            table = np.asarray(table, dtype=np.int64)
            table.flags.writeable = False
            self.table = table
            self._rows = tuple(tuple(r) for r in table.tolist())
            self._inv = tuple(int(np.flatnonzero(row == 0)[0])
                              for row in table)
        else:
            self.table = None
            self._rows = None
            inv_perm = [tuple(np.argsort(p).tolist()) for p in self.perms]
            self._inv = tuple(self._index[p] for p in inv_perm)

    def mul(self, a: int, b: int) -> int:
        if self._rows is not None:
            return self._rows[a][b]
        return self._index[_compose(self.perms[a], self.perms[b])]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def label(self, a: int) -> tp.Any:
        return a if self.labels is None else self.labels[a]

    @property
    def is_abelian(self) -> bool:
        if self.table is not None:
            return bool(np.array_equal(self.table, self.table.T))
        return all(self.mul(a, b) == self.mul(b, a)
                   for a in self.elements() for b in self.elements())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        if self is other:
            return True
        if self.order != other.order:
            return False
        if self.table is not None and other.table is not None:
            return bool(np.array_equal(self.table, other.table))
        return all(self.mul(a, b) == other.mul(a, b)
                   for a in self.elements() for b in self.elements())

    def __hash__(self) -> int:
        return hash(("FiniteGroup", self.order))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


@dataclass(frozen=True, eq=False)
class GroupHom:
    '''
    A homomorphism given by the image of every domain element id.
    '''
    domain: FiniteGroup
    codomain: FiniteGroup
    image: tp.Tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.image[a]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (self.image == other.image and self.domain == other.domain
                and self.codomain == other.codomain)

    def __hash__(self) -> int:
        return hash(self.image)


# Constructors


def validate_table(mul: tp.Sequence[tp.Sequence[int]]) -> tp.List[str]:
    '''
    Exhaustively checks the group axioms on a multiplication table.

    Inputs:
        mul  [tp.Sequence]:  row-major table over element ids 0..n-1

    Outputs:
        [tp.List[str]]:  one message per violated axiom, empty if valid
    '''
    try:
        t = np.asarray(mul, dtype=np.int64)
    except (TypeError, ValueError):
        return ["table is not a rectangular integer array"]
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        return [f"table has shape {t.shape}, expected a nonempty square"]
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        return [f"table entries must lie in 0..{n - 1}"]

    problems = []
    ids = np.arange(n)
    if not np.array_equal(t[0], ids) or not np.array_equal(t[:, 0], ids):
        problems.append("element 0 is not a two-sided identity")
    for a in range(n):
        if len(np.unique(t[a])) != n:
            problems.append(f"row {a} is not a permutation (no inverse)")
            break
        if len(np.unique(t[:, a])) != n:
            problems.append(f"column {a} is not a permutation (no inverse)")
            break
    if problems:
        return problems

    for a in range(n):
        # (a b) c == a (b c) for all b, c
        left = t[t[a]]
        right = t[a][t]
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = bad[0]
            problems.append(f"not associative on ({a}, {b}, {c})")
            break
    return problems


def group_from_table(name: str, mul: tp.Sequence[tp.Sequence[int]],
                     labels: tp.Optional[tp.Sequence[tp.Any]] = None
                     ) -> FiniteGroup:
    problems = validate_table(mul)
    if problems:
        raise InvalidGroup(f"group {name}: " + "; ".join(problems))
    table = np.asarray(mul, dtype=np.int64)
    return FiniteGroup(name, table.shape[0], table=table, labels=labels)


def perm_from_cycles(cycles: tp.Sequence[tp.Sequence[int]],
                     degree: int) -> Perm:
    '''
    Converts 1-based cycles, e.g. [[1, 2], [3, 4]], into a 0-based array
    form permutation of `degree` points.
    '''
    flat = [c for cycle in cycles for c in cycle]
    if any(c < 1 or c > degree for c in flat):
        raise InvalidGroup(f"cycle entries must lie in 1..{degree}")
    cycles0 = [[c - 1 for c in cycle] for cycle in cycles if cycle]
    if not cycles0:
        return tuple(range(degree))
    return tuple(comb.Permutation(cycles0, size=degree).array_form)


def perm_to_cycles(p: Perm) -> tp.List[tp.List[int]]:
    if all(i == x for i, x in enumerate(p)):
        return []
    cyclic = comb.Permutation(list(p)).cyclic_form
    return [[c + 1 for c in cycle] for cycle in cyclic]


def group_from_permutations(name: str, degree: int,
                            gens: tp.Sequence[Perm],
                            order: tp.Optional[int] = None) -> FiniteGroup:
    '''
    Enumerates the group generated by permutations `gens` breadth first from
    the identity, multiplying on the right by the generators in order. This
    fixes element ids: 0 is the identity and ids follow discovery order.

    Inputs:
        name    [str]:             group name
        degree  [int]:             number of points permuted
        gens    [tp.Sequence]:     0-based array form permutations
        order   [int]:             optional expected order, checked

    Outputs:
        [FiniteGroup]
    '''
    gens = [tuple(int(x) for x in g) for g in gens]
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise InvalidGroup(f"group {name}: {g} is not a permutation "
                               f"of {degree} points")

    expected = comb.PermutationGroup(
        [comb.Permutation(list(g)) for g in gens]
        or [comb.Permutation(list(range(degree)))]).order()
    if order is not None and order != expected:
        raise InvalidGroup(f"group {name}: generators give order {expected},"
                           f" declared {order}")

    identity = tuple(range(degree))
    perms = [identity]
    index = {identity: 0}
    head = 0
    while head < len(perms):
        p = perms[head]
        head += 1
        for g in gens:
            q = _compose(p, g)
            if q not in index:
                index[q] = len(perms)
                perms.append(q)
    assert len(perms) == expected

    table = None
    if len(perms) <= get_params()['table_order']:
        table = np.array([[index[_compose(p, q)] for q in perms]
                          for p in perms], dtype=np.int64)
    else:
        logger.info("group %s has order %d, no table stored",
                    name, len(perms))
    return FiniteGroup(name, len(perms), table=table, perms=perms,
                       degree=degree, perm_gens=gens)


def cyclic_group(n: int, name: tp.Optional[str] = None) -> FiniteGroup:
    if n < 1:
        raise InvalidGroup(f"cyclic group order must be positive, got {n}")
    ids = np.arange(n)
    table = np.add.outer(ids, ids) % n
    return FiniteGroup(name or (f"Z{n}" if n > 1 else "1"), n, table=table)


def trivial_group(name: str = "1") -> FiniteGroup:
    return cyclic_group(1, name=name)


def _from_sympy(name: str, group: comb.PermutationGroup) -> FiniteGroup:
    gens = [tuple(g.array_form) for g in group.generators]
    return group_from_permutations(name, group.degree, gens)


def symmetric_group(n: int) -> FiniteGroup:
    return _from_sympy(f"S{n}", named_groups.SymmetricGroup(n))


def alternating_group(n: int) -> FiniteGroup:
    return _from_sympy(f"A{n}", named_groups.AlternatingGroup(n))


def dihedral_group(n: int) -> FiniteGroup:
    '''
    The dihedral group of order 2n.
    '''
    return _from_sympy(f"D{n}", named_groups.DihedralGroup(n))


def quaternion_group() -> FiniteGroup:
    # ids 0..3 = +1, +i, +j, +k and 4..7 = -1, -i, -j, -k
    units = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ]

    def split(a):
        return (1 if a < 4 else -1), a % 4

    table = np.zeros((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            sa, ua = split(a)
            sb, ub = split(b)
            s, u = units[ua][ub]
            table[a, b] = u if s * sa * sb == 1 else u + 4
    return FiniteGroup("Q8", 8, table=table)


def direct_product(a: FiniteGroup, b: FiniteGroup,
                   name: tp.Optional[str] = None) -> FiniteGroup:
    '''
    Direct product with element (x, y) stored at id x * |b| + y.
    '''
    n = a.order * b.order
    ia = np.arange(n) // b.order
    ib = np.arange(n) % b.order
    ta = np.array([[a.mul(x, y) for y in range(a.order)]
                   for x in range(a.order)], dtype=np.int64)
    tb = np.array([[b.mul(x, y) for y in range(b.order)]
                   for x in range(b.order)], dtype=np.int64)
    table = (ta[ia[:, None], ia[None, :]] * b.order
             + tb[ib[:, None], ib[None, :]])
    return FiniteGroup(name or f"{a.name}x{b.name}", n, table=table)


def product_pair(b: FiniteGroup, x: int) -> tp.Tuple[int, int]:
    # inverse of the direct_product id packing
    return divmod(x, b.order)


# Element arithmetic


def power(g: FiniteGroup, a: int, k: int) -> int:
    if k < 0:
        a, k = g.inv(a), -k
    result = 0
    for _ in range(k):
        result = g.mul(result, a)
    return result


def element_order(g: FiniteGroup, a: int) -> int:
    k, x = 1, a
    while x != 0:
        x = g.mul(x, a)
        k += 1
    return k


def conjugate(g: FiniteGroup, x: int, a: int) -> int:
    '''
    x a x^-1
    '''
    return g.mul(g.mul(x, a), g.inv(x))


def element_order_profile(g: FiniteGroup) -> tp.Tuple[tp.Tuple[int, int], ...]:
    return tuple(sorted(Counter(element_order(g, a)
                                for a in g.elements()).items()))


# Subgroups


def generated_subgroup(g: FiniteGroup, gens: tp.Iterable[int]
                       ) -> tp.FrozenSet[int]:
    gens = list(gens)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = g.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def generating_set(g: FiniteGroup) -> tp.List[int]:
    '''
    Greedy generating set: each step adds the element that enlarges the
    generated subgroup most, ties broken by least id.
    '''
    gens: tp.List[int] = []
    current = frozenset({0})
    while len(current) < g.order:
        best, best_sub = None, current
        for a in g.elements():
            if a in current:
                continue
            sub = generated_subgroup(g, gens + [a])
            if len(sub) > len(best_sub):
                best, best_sub = a, sub
                if len(sub) == g.order:
                    break
        gens.append(best)
        current = best_sub
    return gens


def group_generators(g: FiniteGroup) -> tp.List[int]:
    '''
    Generators used for presentations: the permutation generators when the
    group came from them, the greedy generating set otherwise.
    '''
    if g.perm_gens is not None and g.perms is not None:
        gens = []
        for p in g.perm_gens:
            x = g._index[p]
            if x != 0 and x not in gens:
                gens.append(x)
        return gens
    return generating_set(g)


def is_subgroup(g: FiniteGroup, elements: tp.Iterable[int]) -> bool:
    elements = set(elements)
    if 0 not in elements:
        return False
    return all(g.mul(a, g.inv(b)) in elements
               for a in elements for b in elements)


def subgroup(g: FiniteGroup, elements: tp.Iterable[int],
             name: tp.Optional[str] = None
             ) -> tp.Tuple[FiniteGroup, GroupHom]:
    '''
    Materializes a subgroup with its elements relabelled in increasing
    ambient id.

    Outputs:
        [tuple]
          sub        [FiniteGroup]:  the subgroup
          inclusion  [GroupHom]:     its embedding into `g`
    '''
    members = sorted(set(elements))
    if not is_subgroup(g, members):
        raise InvalidGroup(f"{members} is not a subgroup of {g.name}")
    pos = {a: i for i, a in enumerate(members)}
    table = np.array([[pos[g.mul(a, b)] for b in members] for a in members],
                     dtype=np.int64)
    sub = FiniteGroup(name or f"{g.name}<{len(members)}>", len(members),
                      table=table)
    return sub, GroupHom(sub, g, tuple(members))


def conjugacy_classes(g: FiniteGroup) -> tp.List[tp.Tuple[int, ...]]:
    '''
    Conjugacy classes ordered by representative, the least id in the class.
    '''
    seen: tp.Set[int] = set()
    classes = []
    for a in g.elements():
        if a in seen:
            continue
        cls = sorted({conjugate(g, x, a) for x in g.elements()})
        seen.update(cls)
        classes.append(tuple(cls))
    return classes


def centralizer_elements(g: FiniteGroup, a: int) -> tp.List[int]:
    return [x for x in g.elements() if g.mul(x, a) == g.mul(a, x)]


def centralizer(g: FiniteGroup, a: int
                ) -> tp.Tuple[FiniteGroup, GroupHom]:
    return subgroup(g, centralizer_elements(g, a), name=f"C({g.name},{a})")


def derived_subgroup(g: FiniteGroup) -> tp.FrozenSet[int]:
    commutators = {g.mul(g.mul(a, b), g.inv(g.mul(b, a)))
                   for a in g.elements() for b in g.elements()}
    return generated_subgroup(g, sorted(commutators))


def abelianization_profile(g: FiniteGroup) -> tp.Tuple:
    '''
    Isomorphism invariant of G/[G,G]: its order and the multiset of element
    orders of the quotient.
    '''
    d = derived_subgroup(g)
    reps = [c[0] for c in right_cosets(g, d)]
    orders = []
    for r in reps:
        k, x = 1, r
        while x not in d:
            x = g.mul(x, r)
            k += 1
        orders.append(k)
    return len(reps), tuple(sorted(Counter(orders).items()))


def right_cosets(g: FiniteGroup, h: tp.Iterable[int]
                 ) -> tp.List[tp.Tuple[int, ...]]:
    '''
    Right cosets H x ordered by their least element, the representative.
    '''
    h = list(h)
    seen: tp.Set[int] = set()
    cosets = []
    for x in g.elements():
        if x in seen:
            continue
        coset = sorted({g.mul(a, x) for a in h})
        seen.update(coset)
        cosets.append(tuple(coset))
    return cosets


def left_cosets(g: FiniteGroup, h: tp.Iterable[int]
                ) -> tp.List[tp.Tuple[int, ...]]:
    h = list(h)
    seen: tp.Set[int] = set()
    cosets = []
    for x in g.elements():
        if x in seen:
            continue
        coset = sorted({g.mul(x, a) for a in h})
        seen.update(coset)
        cosets.append(tuple(coset))
    return cosets


def double_cosets(g: FiniteGroup, h: tp.Iterable[int], k: tp.Iterable[int]
                  ) -> tp.List[tp.Tuple[int, ...]]:
    h, k = list(h), list(k)
    seen: tp.Set[int] = set()
    cosets = []
    for x in g.elements():
        if x in seen:
            continue
        coset = sorted({g.mul(g.mul(a, x), b) for a in h for b in k})
        seen.update(coset)
        cosets.append(tuple(coset))
    return cosets


# Homomorphisms


def hom_problems(domain: FiniteGroup, codomain: FiniteGroup,
                 image: tp.Sequence[int]) -> tp.List[str]:
    if len(image) != domain.order:
        return [f"image lists {len(image)} elements, domain has "
                f"{domain.order}"]
    if any(x < 0 or x >= codomain.order for x in image):
        return [f"image ids must lie in 0..{codomain.order - 1}"]
    if image[0] != 0:
        return ["identity does not map to identity"]
    for a in domain.elements():
        for b in domain.elements():
            if image[domain.mul(a, b)] != codomain.mul(image[a], image[b]):
                return [f"image({a}*{b}) != image({a})*image({b})"]
    return []


def group_hom(domain: FiniteGroup, codomain: FiniteGroup,
              image: tp.Sequence[int]) -> GroupHom:
    image = tuple(int(x) for x in image)
    problems = hom_problems(domain, codomain, image)
    if problems:
        raise InvalidGroup(f"{domain.name} -> {codomain.name} is not a "
                           f"homomorphism: {problems[0]}")
    return GroupHom(domain, codomain, image)


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, tuple(g.elements()))


def trivial_hom(domain: FiniteGroup, codomain: FiniteGroup) -> GroupHom:
    return GroupHom(domain, codomain, (0,) * domain.order)


def hom_kernel(f: GroupHom) -> tp.List[int]:
    return [a for a in f.domain.elements() if f(a) == 0]


def hom_is_injective(f: GroupHom) -> bool:
    return len(hom_kernel(f)) == 1


def hom_image(f: GroupHom) -> tp.FrozenSet[int]:
    return frozenset(f.image)


def compose_homs(f: GroupHom, g: GroupHom) -> GroupHom:
    '''
    g after f
    '''
    return GroupHom(f.domain, g.codomain, tuple(g(x) for x in f.image))


def conjugation_hom(f: GroupHom, x: int) -> GroupHom:
    '''
    f followed by conjugation a -> x a x^-1 in the codomain.
    '''
    c = f.codomain
    return GroupHom(f.domain, c, tuple(conjugate(c, x, a) for a in f.image))


# Cayley graph words and relators


def cayley_words(g: FiniteGroup, gens: tp.Sequence[int]
                 ) -> tp.List[tp.Tuple[int, ...]]:
    '''
    Breadth first words (generator indices, positive letters only) reaching
    every element by right multiplication.
    '''
    words: tp.List[tp.Optional[tp.Tuple[int, ...]]] = [None] * g.order
    words[0] = ()
    queue = [0]
    for x in queue:
        for i, s in enumerate(gens):
            y = g.mul(x, s)
            if words[y] is None:
                words[y] = words[x] + (i,)
                queue.append(y)
    if any(w is None for w in words):
        raise InvalidGroup(f"{list(gens)} does not generate {g.name}")
    return words


def free_reduce(word: tp.Sequence[tp.Tuple[int, int]]) -> GenWord:
    out: tp.List[tp.Tuple[int, int]] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cayley_relators(g: FiniteGroup, gens: tp.Sequence[int]
                    ) -> tp.List[GenWord]:
    '''
    Relators read off the Cayley graph: for every edge (x, s) outside the
    breadth first tree, word(x) s word(x s)^-1.
    '''
    words = cayley_words(g, gens)
    tree = set()
    for y in range(1, g.order):
        w = words[y]
        tree.add((_word_value(g, gens, w[:-1]), w[-1]))
    relators = []
    for x in g.elements():
        for i, s in enumerate(gens):
            if (x, i) in tree:
                continue
            y = g.mul(x, s)
            word = ([(j, 1) for j in words[x]] + [(i, 1)]
                    + [(j, -1) for j in reversed(words[y])])
            relators.append(free_reduce(word))
    return relators


def _word_value(g: FiniteGroup, gens: tp.Sequence[int],
                word: tp.Sequence[int]) -> int:
    x = 0
    for i in word:
        x = g.mul(x, gens[i])
    return x
