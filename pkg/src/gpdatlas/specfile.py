"""Reading atlas description files (schema ``v1``, JSON or YAML).

A file has three sections::

    version: v1
    groups:                       # named groups
      D3: {permutations: {degree: 3, generators: [[1,2,0],[1,0,2]], names: [r, s]}}
      Z2: {cyclic: 2}
      T:  {table: [[0,1],[1,0]]}
    atlas:                        # exactly one atlas
      kind: global_action         # global_action | gl | complex | single_groupoid | explicit | corpus
      group: D3
      subgroups: [[r], [s]]       # element labels or indices
      relation: discrete
    options:
      max_dim: 4
      budget: 1000000
      pipeline: [regularize]      # any of regularize, irreducibilize, dedupe, in order

Groupoids (``single_groupoid.groupoid`` and each entry of
``explicit.locals``) are given as ``components: [{objects: [...], group: G}]``
(group defaults to the trivial group) or as
``action: {group: G, points: [...], table: [[...]]}``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .algebra.groups import (
    FiniteGroup,
    cyclic_group,
    dihedral_group,
    group_from_permutations,
    group_from_table,
    symmetric_group,
    trivial_group,
)
from .atlas.constructors import (
    explicit_atlas,
    from_global_action,
    from_simplicial_complex,
    from_single_groupoid,
    gl_atlas,
)
from .atlas.model import Atlas
from .atlas.transforms import dedupe_paired_indices, irreducibilize, regularize
from .errors import GpdAtlasError, SpecError
from .groupoid import Groupoid, action_groupoid, groupoid_from_components

SCHEMA_VERSION = "v1"
PIPELINE_STEPS = ("regularize", "irreducibilize", "dedupe")


@dataclass(frozen=True, eq=False)
class AtlasSpec:
    atlas: Atlas
    digest: str
    max_dim: int | None = None
    budget: int | None = None
    pipeline: tuple[str, ...] = ()
    groups: dict[str, FiniteGroup] = field(default_factory=dict, repr=False)


def load_document(path: str | Path) -> tuple[dict, str]:
    """Parse a JSON or YAML file; returns the document and the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    text = raw.decode("utf-8", errors="replace")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise SpecError(f"{path} is neither JSON nor YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("the document must be a mapping")
    return doc, digest


def _require(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict) or key not in d:
        raise SpecError(f"{where}: missing '{key}'")
    return d[key]


def parse_group(name: str, spec: Any) -> FiniteGroup:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SpecError(f"group {name}: expected exactly one of table, permutations, cyclic, dihedral, symmetric, trivial")
    (kind, val), = spec.items()
    try:
        if kind == "table":
            return group_from_table(val)
        if kind == "permutations":
            return group_from_permutations(int(_require(val, "degree", name)), val.get("generators", []), val.get("names"))
        if kind == "cyclic":
            return cyclic_group(int(val))
        if kind == "dihedral":
            return dihedral_group(int(val))
        if kind == "symmetric":
            return symmetric_group(int(val))
        if kind == "trivial":
            return trivial_group()
    except GpdAtlasError as exc:
        raise SpecError(f"group {name}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SpecError(f"group {name}: malformed data ({exc})") from exc
    raise SpecError(f"group {name}: unknown kind {kind!r}")


def _element(G: FiniteGroup, x: Any, where: str) -> int:
    if isinstance(x, bool):
        raise SpecError(f"{where}: {x!r} is not a group element")
    if isinstance(x, int):
        if 0 <= x < G.order:
            return x
        raise SpecError(f"{where}: element index {x} out of range")
    if isinstance(x, str) and x in G.labels:
        return G.labels.index(x)
    raise SpecError(f"{where}: unknown element {x!r}")


def _group_ref(groups: dict[str, FiniteGroup], name: Any, where: str) -> FiniteGroup:
    if name is None:
        return trivial_group()
    if name not in groups:
        raise SpecError(f"{where}: unknown group {name!r}")
    return groups[name]


def _point_ids(points: list[str], xs: Any, where: str) -> list[int]:
    pos = {p: k for k, p in enumerate(points)}
    out = []
    for x in xs:
        if str(x) not in pos:
            raise SpecError(f"{where}: unknown point {x!r}")
        out.append(pos[str(x)])
    return out


def _groupoid(spec: dict, points: list[str], groups: dict[str, FiniteGroup], where: str) -> Groupoid:
    try:
        if "components" in spec:
            comps = []
            for k, c in enumerate(spec["components"]):
                objs = _point_ids(points, _require(c, "objects", f"{where}.components[{k}]"), where)
                comps.append((objs, _group_ref(groups, c.get("group"), where)))
            seen: set[int] = set()
            for objs, _ in comps:
                if seen & set(objs):
                    raise SpecError(f"{where}: components overlap")
                seen |= set(objs)
            return groupoid_from_components(comps)
        if "action" in spec:
            act = spec["action"]
            G = _group_ref(groups, _require(act, "group", where), where)
            objs = _point_ids(points, _require(act, "points", where), where)
            if objs != sorted(objs):
                raise SpecError(f"{where}: action points must be listed in point order")
            return action_groupoid(G, objs, _require(act, "table", where))
    except GpdAtlasError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"{where}: {exc}") from exc
    raise SpecError(f"{where}: a groupoid needs 'components' or 'action'")


def _build_atlas(a: dict, groups: dict[str, FiniteGroup]) -> Atlas:
    kind = _require(a, "kind", "atlas")
    if kind == "global_action":
        G = _group_ref(groups, _require(a, "group", "atlas"), "atlas")
        subs = [[_element(G, x, "atlas.subgroups") for x in s] for s in _require(a, "subgroups", "atlas")]
        relation = a.get("relation", "inclusion")
        try:
            return from_global_action(G, subs, relation=relation, labels=a.get("labels"))
        except GpdAtlasError as exc:
            raise SpecError(f"atlas: {exc}") from exc
    if kind == "gl":
        return gl_atlas(int(_require(a, "n", "atlas")), int(_require(a, "m", "atlas")))
    if kind == "complex":
        facets = _require(a, "facets", "atlas")
        if not isinstance(facets, list):
            raise SpecError("atlas.facets must be a list")
        return from_simplicial_complex([tuple(str(v) for v in f) for f in facets])
    if kind == "single_groupoid":
        points = [str(p) for p in _require(a, "points", "atlas")]
        gpd = _groupoid(_require(a, "groupoid", "atlas"), points, groups, "atlas.groupoid")
        return from_single_groupoid(gpd, points, label=str(a.get("label", "G")))
    if kind == "explicit":
        points = [str(p) for p in _require(a, "points", "atlas")]
        if len(set(points)) != len(points):
            raise SpecError("atlas.points: duplicate labels")
        locals_ = _require(a, "locals", "atlas")
        labels = [str(_require(l, "label", f"atlas.locals[{k}]")) for k, l in enumerate(locals_)]
        gpds = [_groupoid(l, points, groups, f"atlas.locals[{l['label']}]") for l in locals_]
        pos = {l: k for k, l in enumerate(labels)}
        rel, data = [], {}
        for k, r in enumerate(a.get("relation", [])):
            if not isinstance(r, (list, tuple)) or len(r) != 2 or r[0] not in pos or r[1] not in pos:
                raise SpecError(f"atlas.relation[{k}]: expected a pair of local labels")
            rel.append((pos[r[0]], pos[r[1]]))
        for k, f in enumerate(a.get("functors", [])):
            src, dst = _require(f, "from", f"atlas.functors[{k}]"), _require(f, "to", f"atlas.functors[{k}]")
            if src not in pos or dst not in pos:
                raise SpecError(f"atlas.functors[{k}]: unknown local")
            ga, gb = gpds[pos[src]], gpds[pos[dst]]
            entry: dict = {}
            if "rho" in f:
                entry["rho"] = {}
                for ci, images in enumerate(f["rho"]):
                    tgt_group = gb.component_of(ga.comps[ci].objects[0]).group if ci < len(ga.comps) else None
                    if tgt_group is None:
                        raise SpecError(f"atlas.functors[{k}]: more homomorphisms than components")
                    entry["rho"][ci] = [_element(tgt_group, x, f"atlas.functors[{k}].rho") for x in images]
            if "twist" in f:
                entry["twist"] = {}
                for p, x in f["twist"].items():
                    (pid,) = _point_ids(points, [p], f"atlas.functors[{k}].twist")
                    entry["twist"][pid] = _element(gb.component_of(pid).group, x, f"atlas.functors[{k}].twist")
            data[(pos[src], pos[dst])] = entry
        try:
            return explicit_atlas(points, gpds, labels, rel, data)
        except GpdAtlasError as exc:
            raise SpecError(f"atlas: {exc}") from exc
    if kind == "corpus":
        from .corpus import build

        try:
            return build(str(_require(a, "name", "atlas")))
        except KeyError as exc:
            raise SpecError(str(exc)) from exc
    raise SpecError(f"atlas: unknown kind {kind!r}")


def apply_pipeline(A: Atlas, steps: tuple[str, ...]) -> Atlas:
    for step in steps:
        if step == "regularize":
            A = regularize(A).atlas
        elif step == "irreducibilize":
            A = irreducibilize(A).atlas
        elif step == "dedupe":
            A = dedupe_paired_indices(A).atlas
        else:
            raise SpecError(f"unknown pipeline step {step!r}; known: {', '.join(PIPELINE_STEPS)}")
    return A


def parse_document(doc: dict, digest: str = "") -> AtlasSpec:
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise SpecError(f"unsupported or missing version {version!r} (expected {SCHEMA_VERSION!r})")
    groups_doc = doc.get("groups", {}) or {}
    if not isinstance(groups_doc, dict):
        raise SpecError("groups must be a mapping")
    groups = {str(k): parse_group(str(k), v) for k, v in groups_doc.items()}
    atlas_doc = doc.get("atlas")
    if not isinstance(atlas_doc, dict):
        raise SpecError("exactly one atlas mapping is required")
    try:
        A = _build_atlas(atlas_doc, groups)
    except (TypeError, ValueError, AttributeError) as exc:
        raise SpecError(f"atlas: malformed data ({exc})") from exc
    opts = doc.get("options", {}) or {}
    if not isinstance(opts, dict):
        raise SpecError("options must be a mapping")
    pipeline = tuple(str(s) for s in opts.get("pipeline", []))
    for s in pipeline:
        if s not in PIPELINE_STEPS:
            raise SpecError(f"unknown pipeline step {s!r}")
    max_dim = opts.get("max_dim")
    budget = opts.get("budget")
    return AtlasSpec(
        A,
        digest,
        int(max_dim) if max_dim is not None else None,
        int(budget) if budget is not None else None,
        pipeline,
        groups,
    )


def load_spec(path: str | Path) -> AtlasSpec:
    doc, digest = load_document(path)
    return parse_document(doc, digest)
