"""Finite groupoids in trivialized form.

Every finite groupoid is a disjoint union of connected components, and a
connected component with object set ``C`` and vertex group ``V`` is
isomorphic to ``C x C x V`` with composition

    (y, z, w) o (x, y, v) = (x, z, w * v).

Groupoids are stored that way.  Arrow ids are assigned so that arrows are
sorted by ``(src, tgt, v)``; for a component with ``n`` objects and ``m``
group elements, the arrow ``(x, y, v)`` has id
``out_offset[x] + pos(y) * m + v``.

Functors are plain integer arrays indexed by arrow id, holding the image
arrow id or ``-1`` where the functor is undefined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .algebra.groups import FiniteGroup, subgroup_as_group, trivial_group
from .errors import EmptyObjectSet, GpdAtlasError, NotAnAction, ObjectNotFound


@dataclass(frozen=True)
class Component:
    """A connected component: sorted object ids and the vertex group."""

    objects: tuple[int, ...]
    group: FiniteGroup

    @property
    def n(self) -> int:
        return len(self.objects)

    @property
    def m(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class GroupoidComponent:
    objects: tuple[int, ...]
    arrows: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class Groupoid:
    """A finite groupoid.

    ``act_elem`` and ``act_arrow`` are only present for action groupoids:
    ``act_elem[a]`` is the group element carried by arrow ``a`` and
    ``act_arrow[g, x]`` is the arrow id of the pair ``(g, x)``.
    """

    comps: tuple[Component, ...]
    acting_group: FiniteGroup | None = field(default=None, repr=False)
    act_elem: np.ndarray | None = field(default=None, repr=False)
    act_arrow: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        comps = tuple(sorted(self.comps, key=lambda c: c.objects[0] if c.objects else -1))
        if any(not c.objects for c in comps):
            raise GpdAtlasError("components must be nonempty")
        object.__setattr__(self, "comps", comps)
        objs = [x for c in comps for x in c.objects]
        if len(set(objs)) != len(objs):
            raise GpdAtlasError("components share an object")
        objects = np.array(sorted(objs), dtype=np.int64)
        obj_comp: dict[int, int] = {}
        obj_pos: dict[int, int] = {}
        for ci, c in enumerate(comps):
            if list(c.objects) != sorted(c.objects):
                raise GpdAtlasError("component objects must be sorted")
            for p, x in enumerate(c.objects):
                obj_comp[x] = ci
                obj_pos[x] = p
        offset: dict[int, int] = {}
        total = 0
        for x in objects.tolist():
            offset[x] = total
            c = comps[obj_comp[x]]
            total += c.n * c.m
        src = np.empty(total, dtype=np.int64)
        tgt = np.empty(total, dtype=np.int64)
        val = np.empty(total, dtype=np.int64)
        cmp_ = np.empty(total, dtype=np.int64)
        for x in objects.tolist():
            ci = obj_comp[x]
            c = comps[ci]
            o = offset[x]
            size = c.n * c.m
            src[o:o + size] = x
            tgt[o:o + size] = np.repeat(np.array(c.objects, dtype=np.int64), c.m)
            val[o:o + size] = np.tile(np.arange(c.m, dtype=np.int64), c.n)
            cmp_[o:o + size] = ci
        for arr in (objects, src, tgt, val, cmp_):
            arr.setflags(write=False)
        size_tab = int(objects[-1]) + 1 if objects.size else 0
        off_arr = np.full(size_tab, -1, dtype=np.int64)
        pos_arr = np.full(size_tab, -1, dtype=np.int64)
        comp_arr = np.full(size_tab, -1, dtype=np.int64)
        m_arr = np.zeros(size_tab, dtype=np.int64)
        for x in objects.tolist():
            off_arr[x] = offset[x]
            pos_arr[x] = obj_pos[x]
            comp_arr[x] = obj_comp[x]
            m_arr[x] = comps[obj_comp[x]].m
        object.__setattr__(self, "_off_arr", off_arr)
        object.__setattr__(self, "_pos_arr", pos_arr)
        object.__setattr__(self, "_comp_arr", comp_arr)
        object.__setattr__(self, "_m_arr", m_arr)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "_obj_comp", obj_comp)
        object.__setattr__(self, "_obj_pos", obj_pos)
        object.__setattr__(self, "_offset", offset)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "comp", cmp_)

    # ------------------------------------------------------------- basics
    def __repr__(self):
        return f"Groupoid(objects={self.num_objects}, arrows={self.num_arrows}, components={len(self.comps)})"

    @property
    def num_objects(self) -> int:
        return int(self.objects.size)

    @property
    def num_arrows(self) -> int:
        return int(self.src.size)

    def has_object(self, x: int) -> bool:
        return int(x) in self._obj_comp

    def _check(self, x: int) -> None:
        if int(x) not in self._obj_comp:
            raise ObjectNotFound(f"object {x} not in groupoid")

    def component_index(self, x: int) -> int:
        self._check(x)
        return self._obj_comp[int(x)]

    def component_of(self, x: int) -> Component:
        return self.comps[self.component_index(x)]

    def position(self, x: int) -> int:
        self._check(x)
        return self._obj_pos[int(x)]

    def offset(self, x: int) -> int:
        self._check(x)
        return self._offset[int(x)]

    def arrow(self, x: int, y: int, v: int = 0) -> int:
        """Arrow id of ``(x, y, v)``."""
        cx, cy = self.component_index(x), self.component_index(y)
        if cx != cy:
            raise GpdAtlasError(f"objects {x} and {y} lie in different components")
        c = self.comps[cx]
        if not 0 <= v < c.m:
            raise GpdAtlasError(f"vertex group element {v} out of range")
        return self._offset[int(x)] + self._obj_pos[int(y)] * c.m + int(v)

    def arrows_vec(self, x, y, v) -> np.ndarray:
        """Vectorized ``arrow`` assuming every triple is valid."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return self._off_arr[x] + self._pos_arr[y] * self._m_arr[x] + v

    def component_indices(self, xs) -> np.ndarray:
        """Component index per object, ``-1`` for objects not in the groupoid."""
        xs = np.asarray(xs, dtype=np.int64)
        out = np.full(xs.shape, -1, dtype=np.int64)
        ok = (xs >= 0) & (xs < self._comp_arr.size)
        out[ok] = self._comp_arr[xs[ok]]
        return out

    def identity(self, x: int) -> int:
        return self.arrow(x, x, 0)

    def is_identity(self, a: int) -> bool:
        return bool(self.src[a] == self.tgt[a] and self.val[a] == 0)

    def hom(self, x: int, y: int) -> range:
        c = self.component_of(x)
        if self.component_index(y) != self.component_index(x):
            return range(0)
        start = self._offset[int(x)] + self._obj_pos[int(y)] * c.m
        return range(start, start + c.m)

    def arrows_from(self, x: int) -> range:
        c = self.component_of(x)
        o = self._offset[int(x)]
        return range(o, o + c.n * c.m)

    def inverse(self, a: int) -> int:
        x, y, v = int(self.src[a]), int(self.tgt[a]), int(self.val[a])
        c = self.comps[int(self.comp[a])]
        return self.arrow(y, x, c.group.i(v))

    def compose(self, g: int, f: int) -> int:
        """``g o f``; defined when ``tgt(f) == src(g)``."""
        if self.tgt[f] != self.src[g]:
            raise GpdAtlasError(f"arrows {g} and {f} are not composable")
        c = self.comps[int(self.comp[f])]
        return self.arrow(int(self.src[f]), int(self.tgt[g]), c.group.m(int(self.val[g]), int(self.val[f])))

    def vertex_group(self, x: int) -> FiniteGroup:
        return self.component_of(x).group

    def is_connected(self) -> bool:
        return len(self.comps) <= 1

    def is_discrete(self) -> bool:
        return all(c.n == 1 and c.m == 1 for c in self.comps)

    def is_simply_connected(self) -> bool:
        """Every vertex group is trivial."""
        return all(c.m == 1 for c in self.comps)

    def arrow_label(self, a: int) -> str:
        x, y, v = int(self.src[a]), int(self.tgt[a]), int(self.val[a])
        if self.acting_group is not None:
            return f"{self.acting_group.labels[int(self.act_elem[a])]}@{x}"
        c = self.comps[int(self.comp[a])]
        return f"{x}->{y}:{c.group.labels[v]}"

    def object_set(self) -> frozenset[int]:
        return frozenset(self.objects.tolist())


# ------------------------------------------------------------ constructors

def groupoid_from_components(comps: Iterable[tuple[Iterable[int], FiniteGroup]]) -> Groupoid:
    return Groupoid(tuple(Component(tuple(sorted(int(x) for x in objs)), grp) for objs, grp in comps))


def discrete_groupoid(objects: Iterable[int]) -> Groupoid:
    triv = trivial_group()
    return Groupoid(tuple(Component((int(x),), triv) for x in sorted(set(objects))))


def one_object_groupoid(G: FiniteGroup, obj: int = 0) -> Groupoid:
    """The group ``G`` viewed as a groupoid with the single object ``obj``."""
    return Groupoid((Component((int(obj),), G),))


def tree_groupoid(objects: Iterable[int]) -> Groupoid:
    """The simply connected groupoid with exactly one arrow between any two objects."""
    objs = tuple(sorted({int(x) for x in objects}))
    if not objs:
        raise EmptyObjectSet("a tree groupoid needs at least one object")
    return Groupoid((Component(objs, trivial_group()),))


def _action_table(G: FiniteGroup, X: Sequence[Hashable], act) -> np.ndarray:
    if callable(act):
        pos = {x: k for k, x in enumerate(X)}
        table = np.empty((G.order, len(X)), dtype=np.int64)
        elems = G.elements if G.elements is not None else range(G.order)
        for g in range(G.order):
            for k, x in enumerate(X):
                y = act(elems[g], x)
                if y not in pos:
                    raise NotAnAction(f"{g}.{x!r} leaves the set", witness=(g, k))
                table[g, k] = pos[y]
        return table
    table = np.array(act, dtype=np.int64)
    if table.shape != (G.order, len(X)):
        raise NotAnAction(f"action table must have shape ({G.order}, {len(X)})")
    if table.size and (table.min() < 0 or table.max() >= len(X)):
        raise NotAnAction("action table entries out of range")
    return table


def action_groupoid(G: FiniteGroup, X: int | Sequence[int], act) -> Groupoid:
    """The action groupoid ``G x| X``.

    ``X`` is a number of points (objects ``0..X-1``) or a sorted sequence of
    object ids; ``act`` is a ``(|G|, |X|)`` table of point positions or a
    callable ``act(element, x)`` on element representations.
    """
    objs = list(range(X)) if isinstance(X, (int, np.integer)) else [int(x) for x in X]
    if not objs:
        raise EmptyObjectSet("an action groupoid needs at least one point")
    if objs != sorted(set(objs)):
        raise GpdAtlasError("object ids must be sorted and distinct")
    table = _action_table(G, objs, act)
    n = len(objs)
    if not np.array_equal(table[0], np.arange(n)):
        bad = int(np.flatnonzero(table[0] != np.arange(n))[0])
        raise NotAnAction("the identity does not act trivially", witness=(0, 0, bad))
    for g in range(G.order):
        if np.unique(table[g]).size != n:
            raise NotAnAction(f"element {g} does not act bijectively", witness=(g,))
    witness = _kernels.action_witness(G.mul, table)
    if witness[0] >= 0:
        raise NotAnAction("(gh).x != g.(h.x)", witness=witness)

    u = np.repeat(np.arange(n, dtype=np.int64), G.order)
    v = table.T.reshape(-1)
    orbit_of = _kernels.union_find(n, u, v)
    comps = []
    transport = np.zeros(n, dtype=np.int64)
    stab_pos = {}
    for base in np.unique(orbit_of).tolist():
        members = np.flatnonzero(orbit_of == base)
        # minimal transport g with g.base = x, scanning g in table order
        seen = np.zeros(n, dtype=bool)
        for g in range(G.order):
            x = int(table[g, base])
            if not seen[x]:
                seen[x] = True
                transport[x] = g
        stab = np.flatnonzero(table[:, base] == base)
        sub, emb = subgroup_as_group(G, stab.tolist())
        pos = np.full(G.order, -1, dtype=np.int64)
        pos[emb] = np.arange(emb.size)
        stab_pos[base] = pos
        comps.append(Component(tuple(objs[k] for k in members.tolist()), sub))
    gpd = Groupoid(tuple(comps), acting_group=G)
    act_arrow = np.empty((G.order, n), dtype=np.int64)
    for k in range(n):
        base = int(orbit_of[k])
        pos = stab_pos[base]
        tx = int(transport[k])
        ys = table[:, k]
        ty_inv = G.inv[transport[ys]]
        # t_y^-1 g t_x lies in the stabilizer of the base point
        inner = G.mul[ty_inv, G.mul[np.arange(G.order), tx]]
        vs = pos[inner]
        x_obj = objs[k]
        act_arrow[:, k] = gpd.arrows_vec(np.full(G.order, x_obj), np.array(objs)[ys], vs)
    act_elem = np.empty(gpd.num_arrows, dtype=np.int64)
    act_elem[act_arrow.reshape(-1)] = np.repeat(np.arange(G.order, dtype=np.int64), n)
    act_arrow.setflags(write=False)
    act_elem.setflags(write=False)
    object.__setattr__(gpd, "act_elem", act_elem)
    object.__setattr__(gpd, "act_arrow", act_arrow)
    object.__setattr__(gpd, "action_table", table)
    return gpd


def left_multiplication_groupoid(G: FiniteGroup, H: Iterable[int]) -> Groupoid:
    """``H x| G`` for a subgroup ``H`` acting on ``G`` by left multiplication."""
    H = sorted({int(h) for h in H})
    sub, emb = subgroup_as_group(G, H)
    table = G.mul[emb, :]
    gpd = action_groupoid(sub, G.order, table)
    object.__setattr__(gpd, "ambient_elements", emb)
    return gpd


# -------------------------------------------------------------- operations

def components(gpd: Groupoid) -> list[GroupoidComponent]:
    out = []
    for ci, c in enumerate(gpd.comps):
        arrows = np.flatnonzero(gpd.comp == ci)
        arrows.setflags(write=False)
        out.append(GroupoidComponent(c.objects, arrows))
    return out


def full_subgroupoid(gpd: Groupoid, S: Iterable[int]) -> Groupoid:
    """Full subgroupoid on ``S``.  Arrow coordinates ``(x, y, v)`` are kept."""
    S = {int(x) for x in S}
    for x in S:
        gpd._check(x)
    comps = []
    for c in gpd.comps:
        objs = tuple(x for x in c.objects if x in S)
        if objs:
            comps.append(Component(objs, c.group))
    return Groupoid(tuple(comps))


def restriction_embedding(sub: Groupoid, gpd: Groupoid) -> np.ndarray:
    """Arrow ids in ``gpd`` of the arrows of a full subgroupoid ``sub``."""
    if sub.num_arrows == 0:
        return np.zeros(0, dtype=np.int64)
    return gpd.arrows_vec(sub.src, sub.tgt, sub.val)


def vertex_group(gpd: Groupoid, x: int) -> FiniteGroup:
    return gpd.vertex_group(x)


# ---------------------------------------------------------------- functors

def compose_maps(second: np.ndarray, first: np.ndarray) -> np.ndarray:
    """``second o first`` for arrow maps, keeping ``-1`` for undefined."""
    out = np.full(first.shape, -1, dtype=np.int64)
    ok = first >= 0
    out[ok] = second[first[ok]]
    return out


def functor_from_data(
    A: Groupoid,
    B: Groupoid,
    domain: Iterable[int],
    rho: dict[int, Sequence[int]] | None = None,
    twist: dict[int, int] | None = None,
) -> np.ndarray:
    """Identity-on-objects functor defined on the components of ``A`` inside ``domain``.

    For a component with index ``ci`` of ``A``, ``rho[ci]`` lists the image
    in the target vertex group of every element of the source vertex group
    (default: everything to the identity), and ``twist[x]`` is an element
    ``w_x`` of the target vertex group.  The arrow ``(x, y, v)`` goes to
    ``(x, y, w_y * rho(v) * w_x^-1)``.
    """
    rho = rho or {}
    twist = twist or {}
    dom = {int(x) for x in domain}
    F = np.full(A.num_arrows, -1, dtype=np.int64)
    for ci, c in enumerate(A.comps):
        if not dom.issuperset(c.objects):
            continue
        bc = B.component_index(c.objects[0])
        for x in c.objects:
            if B.component_index(x) != bc:
                raise GpdAtlasError(f"component of {x} is not mapped into one component")
        grp = B.comps[bc].group
        r = np.array(rho.get(ci, [0] * c.m), dtype=np.int64)
        if r.shape != (c.m,):
            raise GpdAtlasError(f"homomorphism for component {ci} needs {c.m} images")
        arrows = np.flatnonzero(A.comp == ci)
        xs, ys, vs = A.src[arrows], A.tgt[arrows], A.val[arrows]
        wx = np.array([twist.get(int(x), 0) for x in xs], dtype=np.int64)
        wy = np.array([twist.get(int(y), 0) for y in ys], dtype=np.int64)
        image_v = grp.mul[grp.mul[wy, r[vs]], grp.inv[wx]]
        F[arrows] = B.arrows_vec(xs, ys, image_v)
    return F


def action_inclusion(A: Groupoid, B: Groupoid, domain: Iterable[int] | None = None) -> np.ndarray:
    """Functor between action groupoids over a common ambient group.

    Both must come from ``left_multiplication_groupoid`` (or share the acting
    group) so that an arrow ``(h, x)`` of ``A`` can be read in ``B``.
    """
    emb_a = getattr(A, "ambient_elements", None)
    emb_b = getattr(B, "ambient_elements", None)
    if emb_a is None or emb_b is None:
        raise GpdAtlasError("both groupoids must be left-multiplication groupoids")
    pos_b = np.full(int(max(emb_a.max(), emb_b.max())) + 1, -1, dtype=np.int64)
    pos_b[emb_b] = np.arange(emb_b.size)
    arrows = np.arange(A.num_arrows)
    if domain is not None:
        dom = np.zeros(int(A.objects[-1]) + 1, dtype=bool)
        dom[[int(x) for x in domain if 0 <= int(x) < dom.size]] = True
        arrows = arrows[dom[A.src]]
    k = pos_b[emb_a[A.act_elem[arrows]]]
    if (k < 0).any():
        raise GpdAtlasError("the source acting group is not contained in the target one")
    F = np.full(A.num_arrows, -1, dtype=np.int64)
    F[arrows] = B.act_arrow[k, A.src[arrows]]
    return F


def functor_violation(
    F: np.ndarray, A: Groupoid, B: Groupoid, obj_map: np.ndarray | None = None
) -> tuple | None:
    """Witness that ``F`` fails to be a functor ``A -> B``, else ``None``.

    ``obj_map`` sends object ids of ``A`` to object ids of ``B``; by default
    the functor must be the identity on objects.  ``F`` may be undefined
    (``-1``) but only on whole components of ``A``.  Multiplicativity is
    checked for every arrow ``f`` against a generating set of each
    component (star arrows at the first object, both ways, and the vertex
    group at that object), which implies it for all composable pairs.
    """
    F = np.asarray(F, dtype=np.int64)
    if F.shape != (A.num_arrows,):
        return ("shape", F.shape)
    defined = F >= 0
    for ci, c in enumerate(A.comps):
        d = defined[A.comp == ci]
        if d.any() and not d.all():
            return ("partial component", c.objects[0])
    if not defined.any():
        return None
    where = np.flatnonzero(defined)
    img = F[where]
    if img.max() >= B.num_arrows:
        return ("image out of range", int(where[0]))
    if obj_map is None:
        want_s, want_t = A.src[where], A.tgt[where]
    else:
        obj_map = np.asarray(obj_map, dtype=np.int64)
        want_s, want_t = obj_map[A.src[where]], obj_map[A.tgt[where]]
    bad = np.flatnonzero((B.src[img] != want_s) | (B.tgt[img] != want_t))
    if bad.size:
        return ("wrong objects", int(where[bad[0]]))
    for ci, c in enumerate(A.comps):
        b = c.objects[0]
        if F[A.arrow(b, b, 0)] < 0:
            continue
        gens = [A.arrow(b, y, 0) for y in c.objects[1:]]
        gens += [A.arrow(y, b, 0) for y in c.objects[1:]]
        gens += [A.arrow(b, b, v) for v in range(1, c.m)]
        gens.append(A.arrow(b, b, 0))
        for g in gens:
            y = int(A.src[g])
            fs = np.array([a for x in c.objects for a in A.hom(x, y)], dtype=np.int64)
            gf = A.arrows_vec(A.src[fs], np.full(fs.size, A.tgt[g]), c.group.mul[A.val[g], A.val[fs]])
            Fg = int(F[g])
            bgrp = B.comps[int(B.comp[Fg])].group
            lhs = F[gf]
            rhs = B.arrows_vec(B.src[F[fs]], np.full(fs.size, B.tgt[Fg]), bgrp.mul[B.val[Fg], B.val[F[fs]]])
            bad = np.flatnonzero(lhs != rhs)
            if bad.size:
                return ("not multiplicative", int(g), int(fs[bad[0]]))
    return None
