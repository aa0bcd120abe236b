"""Finite groups given by total multiplication tables.

Elements are the integers ``0..order-1`` and ``0`` is always the identity.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .. import _kernels
from ..errors import GroupTooLarge, NotABijection, NotAGroup, NotASubgroup

DEFAULT_CLOSURE_CAP = 100_000
# Cayley tables are dense order x order int64 arrays; beyond this they stop fitting.
MAX_TABLE_ORDER = 6_000


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group with elements ``0..order-1`` and identity ``0``.

    ``elements`` optionally carries a hashable representation of each
    element (a permutation, a matrix, ...) in table order.
    """

    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    elements: tuple[Hashable, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.mul.setflags(write=False)
        self.inv.setflags(write=False)

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @property
    def identity(self) -> int:
        return 0

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def i(self, a: int) -> int:
        return int(self.inv[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.i(a), -k
        out = 0
        for _ in range(k):
            out = self.m(out, a)
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.m(x, a)
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def index_of(self, rep: Hashable) -> int:
        if self.elements is None:
            raise KeyError("group carries no element representation")
        lookup = self.__dict__.get("_lookup")
        if lookup is None:
            lookup = {e: k for k, e in enumerate(self.elements)}
            object.__setattr__(self, "_lookup", lookup)
        return lookup[rep]

    def same_table(self, other: "FiniteGroup") -> bool:
        return self.order == other.order and bool(np.array_equal(self.mul, other.mul))


def _check_latin_rows(mul: np.ndarray) -> None:
    n = mul.shape[0]
    target = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(mul[a]), target):
            raise NotAGroup(f"row {a} is not a permutation of the elements")
        if not np.array_equal(np.sort(mul[:, a]), target):
            raise NotAGroup(f"column {a} is not a permutation of the elements")


def group_from_table(
    mul_table,
    labels: Sequence[str] | None = None,
    elements: Sequence[Hashable] | None = None,
    check: bool = True,
) -> FiniteGroup:
    """Validate a Cayley table and relabel it so the identity is element 0."""
    mul = np.array(mul_table, dtype=np.int64)
    if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
        raise NotAGroup("table must be a non-empty square array")
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        raise NotAGroup("table entries must lie in 0..n-1")
    target = np.arange(n)
    ident = [e for e in range(n) if np.array_equal(mul[e], target) and np.array_equal(mul[:, e], target)]
    if not ident:
        raise NotAGroup("no two-sided identity")
    e = ident[0]
    if labels is None:
        labels = [str(k) for k in range(n)]
    if e != 0:
        perm = np.array([e] + [k for k in range(n) if k != e])
        pos = np.empty(n, dtype=np.int64)
        pos[perm] = np.arange(n)
        mul = pos[mul[np.ix_(perm, perm)]]
        labels = [labels[k] for k in perm]
        if elements is not None:
            elements = [elements[k] for k in perm]
    if check:
        _check_latin_rows(mul)
        a, b, c = _kernels.associativity_witness(mul)
        if a >= 0:
            raise NotAGroup(f"not associative at ({a}, {b}, {c})")
    inv = np.argmin(mul, axis=1)  # the identity 0 is the row minimum
    if check and not np.all(mul[inv, target] == 0):
        raise NotAGroup("left and right inverses differ")
    return FiniteGroup(
        mul=mul,
        inv=inv.astype(np.int64),
        labels=tuple(labels),
        elements=None if elements is None else tuple(elements),
    )


def _default_names(k: int) -> list[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return [letters[i] if i < 26 else f"g{i}" for i in range(k)]


def group_from_permutations(
    degree: int,
    generators: Sequence[Sequence[int]],
    names: Sequence[str] | None = None,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> FiniteGroup:
    """Close a set of permutations of ``range(degree)`` under composition.

    Composition is ``(p*q)(i) = p[q[i]]``.  Labels are shortest positive
    words in the generator names, found breadth first.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    for g in gens:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise NotABijection(f"{list(g)} is not a bijection of range({degree})")
    names = list(names) if names is not None else _default_names(len(gens))
    ident = tuple(range(degree))
    elems = [ident]
    words = ["1"]
    index = {ident: 0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        p = elems[k]
        for g, name in zip(gens, names):
            q = tuple(g[i] for i in p)  # g after p
            if q not in index:
                if len(elems) >= cap:
                    raise GroupTooLarge(f"closure exceeds {cap} elements")
                index[q] = len(elems)
                elems.append(q)
                words.append(name if k == 0 else name + words[k])
                queue.append(index[q])
    if len(elems) > MAX_TABLE_ORDER:
        raise GroupTooLarge(f"order {len(elems)} exceeds the table limit {MAX_TABLE_ORDER}")
    perms = np.array(elems, dtype=np.int64).reshape(len(elems), degree)
    mul = np.empty((len(elems), len(elems)), dtype=np.int64)
    for a in range(len(elems)):
        comp = perms[a][perms]  # row b is perm_a after perm_b
        mul[a] = [index[tuple(row)] for row in comp.tolist()]
    return group_from_table(mul, labels=words, elements=elems, check=False)


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return group_from_table((idx[:, None] + idx[None, :]) % n, check=False)


def symmetric_group(degree: int) -> FiniteGroup:
    if degree < 2:
        return group_from_permutations(max(degree, 0), [])
    cycle = list(range(1, degree)) + [0]
    swap = [1, 0] + list(range(2, degree))
    return group_from_permutations(degree, [cycle, swap], names=["r", "s"])


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon as permutations of its vertices."""
    rot = [(i + 1) % n for i in range(n)]
    refl = [(-i) % n for i in range(n)]
    return group_from_permutations(n, [rot, refl], names=["r", "s"])


def general_linear_group(n: int, m: int, cap: int = DEFAULT_CLOSURE_CAP) -> FiniteGroup:
    """GL(n, Z/m) with matrices stored as row-major tuples."""
    cells = n * n
    if m ** cells > 50 * cap:
        raise GroupTooLarge(f"GL({n}, Z/{m}) enumeration exceeds the closure cap")
    grid = np.array(list(itertools.product(range(m), repeat=cells)), dtype=np.int64)
    mats = grid.reshape(-1, n, n)
    dets = np.rint(np.linalg.det(mats.astype(np.float64))).astype(np.int64) % m
    units = [u for u in range(m) if np.gcd(u, m) == 1]
    mats = mats[np.isin(dets, units)]
    size = len(mats)
    if size > min(cap, MAX_TABLE_ORDER):
        raise GroupTooLarge(f"|GL({n}, Z/{m})| = {size} exceeds the cap {min(cap, MAX_TABLE_ORDER)}")
    # identity first, the rest in lexicographic order
    flat = mats.reshape(size, cells)
    ident = np.eye(n, dtype=np.int64).reshape(cells)
    first = int(np.flatnonzero((flat == ident).all(axis=1))[0])
    order = [first] + [k for k in range(size) if k != first]
    mats = mats[order]
    flat = mats.reshape(size, cells)
    weights = m ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    codes = flat @ weights
    lookup = np.full(m ** cells, -1, dtype=np.int64)
    lookup[codes] = np.arange(size)
    mul = np.empty((size, size), dtype=np.int64)
    for a in range(size):
        prod = np.einsum("ij,bjk->bik", mats[a], mats) % m
        mul[a] = lookup[prod.reshape(size, cells) @ weights]
    elements = tuple(tuple(int(v) for v in row) for row in flat)
    labels = tuple(str([list(r) for r in mats[k]]) for k in range(size))
    return group_from_table(mul, labels=labels, elements=elements, check=False)


def subgroup_closure(G: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    """Smallest subgroup of ``G`` containing ``gens``, as a sorted tuple."""
    gens = sorted({int(g) for g in gens} - {0})
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(G.mul[x, g])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(seen))


def is_subgroup(G: FiniteGroup, H: Iterable[int]) -> bool:
    H = np.unique(np.asarray(list(H), dtype=np.int64))
    if H.size == 0 or H[0] != 0 or H[-1] >= G.order:
        return False
    member = np.zeros(G.order, dtype=bool)
    member[H] = True
    return bool(member[G.mul[np.ix_(H, H)]].all() and member[G.inv[H]].all())


def _require_subgroup(G: FiniteGroup, H) -> np.ndarray:
    if not is_subgroup(G, H):
        raise NotASubgroup(f"{sorted(H)} is not a subgroup")
    return np.unique(np.asarray(list(H), dtype=np.int64))


def left_cosets(G: FiniteGroup, H: Iterable[int]) -> list[tuple[int, ...]]:
    """Cosets ``gH`` ordered by their minimal element."""
    H = _require_subgroup(G, H)
    covered = np.zeros(G.order, dtype=bool)
    out = []
    for g in range(G.order):
        if not covered[g]:
            coset = np.sort(G.mul[g, H])
            covered[coset] = True
            out.append(tuple(int(x) for x in coset))
    return out


def right_cosets(G: FiniteGroup, H: Iterable[int]) -> list[tuple[int, ...]]:
    """Cosets ``Hg`` (orbits of ``H`` acting by left multiplication)."""
    H = _require_subgroup(G, H)
    covered = np.zeros(G.order, dtype=bool)
    out = []
    for g in range(G.order):
        if not covered[g]:
            coset = np.sort(G.mul[H, g])
            covered[coset] = True
            out.append(tuple(int(x) for x in coset))
    return out


def subgroup_as_group(G: FiniteGroup, H: Iterable[int]) -> tuple[FiniteGroup, np.ndarray]:
    """Extract a subgroup as a standalone group.

    Returns the group and the embedding array ``emb`` with ``emb[k]`` the
    element of ``G`` standing for element ``k`` of the subgroup.
    """
    emb = _require_subgroup(G, H)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[emb] = np.arange(emb.size)
    mul = pos[G.mul[np.ix_(emb, emb)]]
    inv = pos[G.inv[emb]]
    elements = None if G.elements is None else tuple(G.elements[k] for k in emb)
    sub = FiniteGroup(mul=mul, inv=inv, labels=tuple(G.labels[k] for k in emb), elements=elements)
    return sub, emb


def trivial_group() -> FiniteGroup:
    return group_from_table([[0]], labels=["1"], check=False)


def _generating_set(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = {0}
    for g in range(G.order):
        if g not in span:
            gens.append(g)
            span = set(subgroup_closure(G, gens))
    return gens


def find_isomorphism(G: FiniteGroup, K: FiniteGroup) -> np.ndarray | None:
    """Exhaustive search for an isomorphism ``G -> K``; ``None`` if there is none."""
    if G.order != K.order:
        return None
    gens = _generating_set(G)
    orders_k: dict[int, list[int]] = {}
    for y in range(K.order):
        orders_k.setdefault(K.element_order(y), []).append(y)
    choices = [orders_k.get(G.element_order(g), []) for g in gens]
    for images in itertools.product(*choices):
        phi = np.full(G.order, -1, dtype=np.int64)
        phi[0] = 0
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, y in zip(gens, images):
                    xg = int(G.mul[x, g])
                    val = int(K.mul[phi[x], y])
                    if phi[xg] < 0:
                        phi[xg] = val
                        nxt.append(xg)
                    elif phi[xg] != val:
                        ok = False
                        break
                if not ok:
                    break
            frontier = nxt
        if not ok or len(set(phi.tolist())) != G.order:
            continue
        if np.array_equal(phi[G.mul], K.mul[np.ix_(phi, phi)]):
            return phi
    return None
