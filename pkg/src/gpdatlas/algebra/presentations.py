"""Finitely presented groups.

A word is a tuple of nonzero integers: letter ``k+1`` is generator ``k`` and
``-(k+1)`` its inverse.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .smith import sparse_invariant_factors

Word = tuple[int, ...]


def gen(k: int, power: int = 1) -> Word:
    """Word for generator ``k`` raised to ``power``."""
    letter = k + 1 if power > 0 else -(k + 1)
    return (letter,) * abs(power)


def free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word: Iterable[int]) -> Word:
    w = free_reduce(word)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def invert(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def cyclic_canonical(word: Sequence[int]) -> Word:
    """Representative of a cyclic word up to rotation and inversion.

    Letters are ordered ``a < a^-1 < b < b^-1 < ...``, so a relator written
    with positive letters keeps them.
    """
    w = cyclic_reduce(word)
    if not w:
        return w
    best, best_key = None, None
    for cand in (w, invert(w)):
        for k in range(len(cand)):
            rot = cand[k:] + cand[:k]
            key = tuple((abs(x), x < 0) for x in rot)
            if best_key is None or key < best_key:
                best, best_key = rot, key
    return best


def _letter_name(x: int, names: Sequence[str]) -> str:
    name = names[abs(x) - 1]
    return name if x > 0 else name + "^-1"


@dataclass(frozen=True)
class GroupPresentation:
    generator_count: int
    relators: tuple[Word, ...] = ()
    generator_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for r in self.relators:
            for x in r:
                if x == 0 or abs(x) > self.generator_count:
                    raise ValueError(f"letter {x} out of range in relator {r}")
        if not self.generator_names:
            object.__setattr__(
                self, "generator_names", tuple(f"x{k}" for k in range(self.generator_count))
            )

    @classmethod
    def build(cls, generator_count: int, relators: Iterable[Iterable[int]], names=()) -> "GroupPresentation":
        """Presentation with freely reduced relators, dropping empty ones."""
        rels = []
        for r in relators:
            w = free_reduce(r)
            if w:
                rels.append(w)
        return cls(generator_count, tuple(rels), tuple(names))

    def word_str(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        return "*".join(_letter_name(x, self.generator_names) for x in word)

    def __str__(self):
        gens = ", ".join(self.generator_names)
        rels = ", ".join(self.word_str(r) for r in self.relators)
        return f"< {gens} | {rels} >"

    def free_rank_detected(self) -> int | None:
        """Rank if the relator set is empty, otherwise ``None``."""
        return self.generator_count if not self.relators else None

    def describe(self) -> str:
        rank = self.free_rank_detected()
        if rank == 0:
            return "trivial (detected)"
        if rank is not None:
            return f"free of rank {rank} (detected)"
        return str(self)

    def to_dict(self) -> dict:
        return {
            "generators": list(self.generator_names),
            "relators": [self.word_str(r) for r in self.relators],
            "description": self.describe(),
        }


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __str__(self):
        parts = (["Z"] if self.free_rank == 1 else [f"Z^{self.free_rank}"] if self.free_rank else [])
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "group": str(self)}

    def __add__(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return direct_sum([self, other])


def invariants_from_factors(n_generators: int, factors: Sequence[int]) -> AbelianInvariants:
    return AbelianInvariants(n_generators - len(factors), tuple(d for d in factors if d > 1))


def direct_sum(groups: Iterable[AbelianInvariants]) -> AbelianInvariants:
    """Direct sum, with torsion brought back into divisibility-chain form."""
    groups = list(groups)
    rank = sum(g.free_rank for g in groups)
    diag = [t for g in groups for t in g.torsion]
    if not diag:
        return AbelianInvariants(rank)
    cols = [{k: t} for k, t in enumerate(diag)]
    factors = sparse_invariant_factors(len(diag), cols)
    return AbelianInvariants(rank, tuple(d for d in factors if d > 1))


def exponent_columns(P: GroupPresentation) -> list[dict[int, int]]:
    """Relator exponent-sum vectors, one sparse column per relator."""
    cols = []
    for r in P.relators:
        c: dict[int, int] = {}
        for x in r:
            k = abs(x) - 1
            c[k] = c.get(k, 0) + (1 if x > 0 else -1)
        cols.append({k: v for k, v in c.items() if v})
    return cols


def abelianization(P: GroupPresentation) -> AbelianInvariants:
    factors = sparse_invariant_factors(P.generator_count, exponent_columns(P))
    return invariants_from_factors(P.generator_count, factors)


@dataclass(frozen=True)
class TietzeResult:
    """Simplified presentation plus the image of every original generator."""

    presentation: GroupPresentation
    images: tuple[Word, ...]
    survivors: tuple[int, ...] = ()  # original generator behind each remaining one


def tietze_reduce(P: GroupPresentation, budget: int = 1_000_000) -> TietzeResult:
    """Eliminate generators that occur exactly once in some relator.

    Shortest relators are used first; among the generators occurring once in
    it the one with the largest index is removed.  ``budget`` bounds the
    number of eliminations.
    """
    rels: dict[int, Word] = {}
    seen: set[Word] = set()
    for r in P.relators:
        c = cyclic_canonical(r)
        if c and c not in seen:
            seen.add(c)
            rels[len(rels)] = c
    occ: dict[int, set[int]] = {g: set() for g in range(P.generator_count)}
    for rid, r in rels.items():
        for x in r:
            occ[abs(x) - 1].add(rid)
    alive = [True] * P.generator_count
    subst: dict[int, Word] = {}
    heap = [(len(r), r, rid) for rid, r in rels.items()]
    heapq.heapify(heap)
    steps = 0
    while heap and steps < budget:
        length, _, rid = heapq.heappop(heap)
        r = rels.get(rid)
        if r is None or len(r) != length:
            continue
        counts: dict[int, int] = {}
        for x in r:
            counts[abs(x) - 1] = counts.get(abs(x) - 1, 0) + 1
        once = [g for g, c in counts.items() if c == 1]
        if not once:
            continue
        g = max(once)
        k = next(i for i, x in enumerate(r) if abs(x) - 1 == g)
        rot = r[k + 1:] + r[:k]  # r is conjugate to rot * g^eps
        eps = 1 if r[k] > 0 else -1
        value = invert(rot) if eps > 0 else rot  # g = value
        subst[g] = value
        alive[g] = False
        steps += 1
        del rels[rid]
        for x in r:
            occ[abs(x) - 1].discard(rid)
        inv_value = invert(value)
        for other in sorted(occ[g]):
            old = rels[other]
            new: list[int] = []
            for x in old:
                if abs(x) - 1 == g:
                    new.extend(value if x > 0 else inv_value)
                else:
                    new.append(x)
            new_w = cyclic_canonical(new)
            for x in old:
                occ[abs(x) - 1].discard(other)
            if not new_w or new_w in seen and new_w != old:
                del rels[other]
                continue
            seen.add(new_w)
            rels[other] = new_w
            for x in new_w:
                occ[abs(x) - 1].add(other)
            heapq.heappush(heap, (len(new_w), new_w, other))
        occ[g] = set()
    survivors = [g for g in range(P.generator_count) if alive[g]]
    renum = {g: i for i, g in enumerate(survivors)}
    final_rels = []
    final_seen = set()
    for rid in sorted(rels):
        w = cyclic_canonical(
            tuple((renum[abs(x) - 1] + 1) * (1 if x > 0 else -1) for x in rels[rid])
        )
        if w and w not in final_seen:
            final_seen.add(w)
            final_rels.append(w)
    final_rels.sort(key=lambda w: (len(w), w))
    images_of: dict[int, Word] = {g: (renum[g] + 1,) for g in survivors}
    for g in reversed(list(subst)):  # later eliminations only use earlier survivors
        parts: list[int] = []
        for x in subst[g]:
            w = images_of[abs(x) - 1]
            parts.extend(w if x > 0 else invert(w))
        images_of[g] = free_reduce(parts)
    images = tuple(images_of[g] for g in range(P.generator_count))
    names = tuple(P.generator_names[g] for g in survivors)
    return TietzeResult(GroupPresentation(len(survivors), tuple(final_rels), names), images, tuple(survivors))


def tietze_simplify(P: GroupPresentation, budget: int = 1_000_000) -> GroupPresentation:
    return tietze_reduce(P, budget).presentation


def map_word(word: Sequence[int], images: Sequence[Word]) -> Word:
    """Apply a generator substitution to a word and freely reduce."""
    out: list[int] = []
    for x in word:
        w = images[abs(x) - 1]
        out.extend(w if x > 0 else invert(w))
    return free_reduce(out)
