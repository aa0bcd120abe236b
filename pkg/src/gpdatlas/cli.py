"""Command line front end: ``gpdatlas <command> FILE [options]``.

Every command prints a report with the command echo, the sha256 of the
input file, the applied pipeline, a ``results`` block and the elapsed
time.  The results block is serialized with sorted keys and carries no
timestamps, so identical inputs give byte-identical results.

Exit codes: 0 success, 1 unreadable or malformed input, 2 the atlas fails
validation (or lacks a property the command needs), 3 a size budget was
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable

from . import __version__
from .atlas.model import Atlas, predicates, require_valid, validate_atlas
from .errors import (
    BasePointNotFound,
    ComplexTooLarge,
    GpdAtlasError,
    GroupTooLarge,
    InvalidAtlas,
    NotIrreducible,
    PhiNotDiscrete,
    SpecError,
)
from .fundamental import check_p_iso_hypotheses, p_induced, pi0, pi1_strong, pi1_weak, resolve_point
from .homology import homology, homology_of, j_map_analysis
from .nerve import DEFAULT_MAX_DIM, nerve_counts, resolve_budget, simplicial_set_from_dict, strong_nerve, weak_nerve
from .specfile import AtlasSpec, apply_pipeline, load_document, parse_document

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


def _budget(args, spec: AtlasSpec | None) -> int:
    if args.budget is not None:
        return args.budget
    if spec is not None and spec.budget is not None:
        return spec.budget
    return resolve_budget(None)


def _dim(value: int | None, spec: AtlasSpec | None, default: int) -> int:
    if value is not None:
        return value
    if spec is not None and spec.max_dim is not None:
        return spec.max_dim
    return default


def _point_name(A: Atlas, x: int) -> str:
    return A.points[x]


# ---------------------------------------------------------------- commands

def cmd_validate(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    rep = validate_atlas(A)
    results = {
        "points": A.num_points,
        "indices": len(A.local),
        "validation": rep.to_dict(),
    }
    lines = [f"points: {A.num_points}, indices: {len(A.local)}"]
    if not rep.valid:
        lines.append(f"INVALID: {len(rep.violations)} violation(s)")
        lines += [f"  [{v.clause}] {v.message} {list(map(str, v.witness))}" for v in rep.violations[:20]]
        return results, lines, EXIT_INVALID
    preds = predicates(A, strong_dim=2, budget=_budget(args, spec))
    results["predicates"] = preds.to_dict()
    lines.append("valid")
    for k, v in preds.values.items():
        wit = preds.witnesses.get(k)
        lines.append(f"  {k:<16} {str(v).lower()}" + (f"  (witness: {', '.join(map(str, wit))})" if wit else ""))
    return results, lines, EXIT_OK


def cmd_pi0(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    part = pi0(A)
    lines = [f"{part.count} component(s)"]
    for b in part.blocks[:50]:
        names = [_point_name(A, x) for x in b]
        lines.append("  {" + ", ".join(names[:12]) + (", ..." if len(names) > 12 else "") + f"}}  ({len(b)} points)")
    if part.count > 50:
        lines.append(f"  ... {part.count - 50} more")
    return part.to_dict(), lines, EXIT_OK


def _pi1_lines(title: str, res) -> list[str]:
    p = res.presentation
    out = [f"{title}: {res.describe()}", f"  abelianization: {res.abelianization}"]
    out.append(f"  generators: {p.generator_count}, relators: {len(p.relators)}")
    for r in p.relators[:10]:
        out.append(f"    {p.word_str(r)}")
    if len(p.relators) > 10:
        out.append(f"    ... {len(p.relators) - 10} more")
    return out


def cmd_pi1(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    base = resolve_point(A, args.base if args.base is not None else 0)
    results: dict = {"base": _point_name(A, base)}
    lines = [f"base point: {_point_name(A, base)}"]
    if args.mode == "both":
        pm = p_induced(A, base)
        results.update(pm.to_dict())
        lines += _pi1_lines("strong", pm.strong) + _pi1_lines("weak", pm.weak)
        lines.append("p on generators:")
        sp, wp = pm.strong.presentation, pm.weak.presentation
        for k, w in enumerate(pm.images):
            lines.append(f"  {sp.generator_names[k]} -> {wp.word_str(w)}")
        lines.append(f"  abelianized p surjective: {str(pm.abelian_surjective).lower()}, iso: {str(pm.abelian_iso).lower()}")
    else:
        res = pi1_strong(A, base) if args.mode == "strong" else pi1_weak(A, base, budget=_budget(args, spec))
        results[args.mode] = res.to_dict()
        lines += _pi1_lines(args.mode, res)
    return results, lines, EXIT_OK


def cmd_nerve(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    K = _dim(args.dim, spec, DEFAULT_MAX_DIM)
    budget = _budget(args, spec)
    S = weak_nerve(A, K, budget) if args.kind == "weak" else strong_nerve(A, K, budget)
    results = {"nerve": args.kind, "max_dim": K, **nerve_counts(S)}
    lines = [f"{args.kind} nerve truncated at {K}"]
    lines += [f"  dim {k}: {c} nondegenerate simplices" for k, c in enumerate(S.counts)]
    lines.append(f"  euler characteristic (truncated): {S.euler_characteristic()}")
    if args.export:
        payload = S.to_dot() if args.export == "dot" else S.to_json()
        if args.output:
            Path(args.output).write_text(payload + ("" if payload.endswith("\n") else "\n"))
            results["export"] = {"format": args.export, "path": str(args.output)}
            lines.append(f"  wrote {args.export} export to {args.output}")
        else:
            raise _DirectOutput(payload)
    return results, lines, EXIT_OK


class _DirectOutput(Exception):
    """Raised to print an export verbatim instead of a report."""

    def __init__(self, payload: str):
        super().__init__("direct output")
        self.payload = payload


def _homology_lines(H) -> list[str]:
    lines = [f"chain ranks: {list(H.chain_ranks)}"]
    lines += [f"  H_{n} = {g}" for n, g in enumerate(H.groups)]
    return lines


def cmd_homology(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    K = _dim(args.max_dim, spec, DEFAULT_MAX_DIM)
    H = homology(A, K, _budget(args, spec), nerve=args.kind)
    return {"nerve": args.kind, "max_dim": K, **H.to_dict()}, [f"{args.kind} nerve, K = {K}"] + _homology_lines(H), EXIT_OK


def cmd_jmap(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    K = _dim(args.dim, spec, 2)
    rep = j_map_analysis(A, K, _budget(args, spec))
    lines = [f"j-map up to dimension {K}"]
    for d in rep.dims:
        lines.append(
            f"  dim {d.dim}: rank {d.rank}/{d.source_rank}, kernel {d.kernel_rank}, "
            f"classes {d.classes}, classes with cycles {d.cyclic_classes}"
        )
    lines.append(f"  injective: {str(rep.injective).lower()}, class graphs acyclic: {str(rep.acyclic).lower()}")
    lines.append(f"  equivalence holds: {str(rep.equivalence_holds).lower()}")
    for k, s in rep.cycle_witnesses[:5]:
        lines.append(f"  cycle witness (dim {k}): {s}")
    return {"max_dim": K, **rep.to_dict()}, lines, EXIT_OK


def cmd_p_check(A: Atlas, spec: AtlasSpec, args) -> tuple[dict, list[str], int]:
    hyp = check_p_iso_hypotheses(A)
    base = resolve_point(A, args.base if args.base is not None else 0)
    pm = p_induced(A, base)
    consistent = (not hyp.passes) or pm.abelian_iso
    results = {
        "base": _point_name(A, base),
        "hypotheses": {**hyp.to_dict(), "passes": hyp.passes},
        "p": pm.to_dict(),
        "consistent": consistent,
    }
    lines = [
        f"base point: {_point_name(A, base)}",
        f"hypotheses: infimum {str(hyp.infimum).lower()}, filtered {str(hyp.filtered_variant).lower()}, "
        f"locals simply connected {str(hyp.all_locals_simply_connected).lower()}",
        f"strong: {pm.strong.describe()}  (abelianized {pm.strong.abelianization})",
        f"weak:   {pm.weak.describe()}  (abelianized {pm.weak.abelianization})",
        f"p abelianized surjective: {str(pm.abelian_surjective).lower()}, iso: {str(pm.abelian_iso).lower()}",
        f"consistent with the hypotheses: {str(consistent).lower()}",
    ]
    return results, lines, EXIT_OK


def cmd_selfcheck(args) -> tuple[dict, list[str], int]:
    """Cross-engine agreement on seeded random atlases."""
    from .corpus import random_atlas
    from .fundamental import pi1_via_nerve

    seeds = list(range(args.seed, args.seed + args.count))
    failures = []
    for s in seeds:
        A = random_atlas(s)
        x = 0
        ab = {e.engine: e.abelianization for e in (pi1_strong(A, x), pi1_via_nerve(A, x))}
        H1 = homology(A, 2).groups[1]
        if len(set(ab.values())) != 1 or pi0(A).count != homology(A, 2).groups[0].free_rank:
            failures.append(s)
        elif pi0(A).count == 1 and H1 != next(iter(ab.values())):
            failures.append(s)
    results = {"seeds": seeds, "failures": failures, "ok": not failures}
    lines = [f"seeds {seeds[0]}..{seeds[-1]}: {len(seeds) - len(failures)}/{len(seeds)} consistent"]
    if failures:
        lines.append(f"  failing seeds: {failures}")
    return results, lines, EXIT_OK if not failures else EXIT_INVALID


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "pi0": cmd_pi0,
    "pi1": cmd_pi1,
    "nerve": cmd_nerve,
    "homology": cmd_homology,
    "jmap": cmd_jmap,
    "p-check": cmd_p_check,
}


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpdatlas", description="Invariants of finite groupoid atlases and global actions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="atlas description (JSON or YAML, schema v1)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget", type=int, default=None, help="largest number of chains per dimension")
    common.add_argument("--no-timing", action="store_true", help="omit the elapsed time from the report")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check the atlas axioms and print the predicate table")
    sub.add_parser("pi0", parents=[common], help="path components")

    p = sub.add_parser("pi1", parents=[common], help="fundamental group presentations")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strong", dest="mode", action="store_const", const="strong")
    mode.add_argument("--weak", dest="mode", action="store_const", const="weak")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    p.set_defaults(mode="strong")
    p.add_argument("--base", default=None, help="base point label or index (default: the first point)")

    n = sub.add_parser("nerve", parents=[common], help="truncated nerve counts and exports")
    n.add_argument("--dim", type=int, default=None)
    kind = n.add_mutually_exclusive_group()
    kind.add_argument("--strong", dest="kind", action="store_const", const="strong")
    kind.add_argument("--weak", dest="kind", action="store_const", const="weak")
    n.set_defaults(kind="strong")
    n.add_argument("--export", choices=("dot", "json"), default=None)
    n.add_argument("--output", default=None, help="write the export here instead of stdout")

    h = sub.add_parser("homology", parents=[common], help="integer homology (input may also be an exported simplicial set)")
    h.add_argument("--max-dim", type=int, default=None, help="truncation K; groups H_0 .. H_{K-1} are reported")
    hk = h.add_mutually_exclusive_group()
    hk.add_argument("--strong", dest="kind", action="store_const", const="strong")
    hk.add_argument("--weak", dest="kind", action="store_const", const="weak")
    h.set_defaults(kind="strong")

    j = sub.add_parser("jmap", parents=[common], help="the j-map against cycles of the class graphs (irreducible atlases)")
    j.add_argument("--dim", type=int, default=None)

    pc = sub.add_parser("p-check", parents=[common], help="the map from strong to weak fundamental group and its hypotheses")
    pc.add_argument("--base", default=None)

    sc = sub.add_parser("selfcheck", help="cross-engine agreement on seeded random atlases")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--count", type=int, default=20)
    sc.add_argument("--format", choices=("text", "json"), default="text")
    sc.add_argument("--no-timing", action="store_true")
    return parser


def _base_arg(value):
    if value is None:
        return None
    return int(value) if isinstance(value, str) and value.isdigit() else value


def _emit(report: dict, lines: list[str], fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return
    out.write(f"gpdatlas {report['command']['name']}" + (f" {report['input']['path']}" if "input" in report else "") + "\n")
    opts = {k: v for k, v in report["command"]["options"].items() if v is not None}
    if opts:
        out.write("options: " + ", ".join(f"{k}={v}" for k, v in opts.items()) + "\n")
    if "input" in report:
        out.write(f"sha256: {report['input']['sha256']}\n")
    if report.get("pipeline"):
        out.write(f"pipeline: {' -> '.join(report['pipeline'])}\n")
    for line in lines:
        out.write(line + "\n")
    if "error" in report:
        out.write(f"error: {report['error']}\n")
    if "timing_seconds" in report:
        out.write(f"time: {report['timing_seconds']:.3f}s\n")


def _echo(args) -> dict:
    skip = {"command", "format", "no_timing", "file", "output"}
    return {"name": args.command, "options": {k: v for k, v in sorted(vars(args).items()) if k not in skip}}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if hasattr(args, "base"):
        args.base = _base_arg(args.base)
    start = time.perf_counter()
    report: dict = {"command": _echo(args)}
    lines: list[str] = []
    code = EXIT_OK
    try:
        if args.command == "selfcheck":
            results, lines, code = cmd_selfcheck(args)
        else:
            doc, digest = load_document(args.file)
            report["input"] = {"path": str(args.file), "sha256": digest}
            if args.command == "homology" and doc.get("kind") == "simplicial_set":
                S = simplicial_set_from_dict(doc)
                H = homology_of(S)
                results = {"nerve": doc.get("nerve", "imported"), "max_dim": S.max_dim, **H.to_dict()}
                lines = [f"imported simplicial set, K = {S.max_dim}"] + _homology_lines(H)
            else:
                spec = parse_document(doc, digest)
                report["pipeline"] = list(spec.pipeline)
                A = apply_pipeline(spec.atlas, spec.pipeline)
                if args.command != "validate":
                    require_valid(A)
                results, lines, code = COMMANDS[args.command](A, spec, args)
        report["results"] = results
    except _DirectOutput as d:
        out.write(d.payload if d.payload.endswith("\n") else d.payload + "\n")
        return EXIT_OK
    except (SpecError, BasePointNotFound) as exc:
        code, report["error"] = EXIT_PARSE, str(exc)
    except (InvalidAtlas, NotIrreducible, PhiNotDiscrete) as exc:
        code, report["error"] = EXIT_INVALID, f"{type(exc).__name__}: {exc}"
    except (ComplexTooLarge, GroupTooLarge) as exc:
        code, report["error"] = EXIT_BUDGET, f"{type(exc).__name__}: {exc}"
    except GpdAtlasError as exc:
        code, report["error"] = EXIT_INVALID, f"{type(exc).__name__}: {exc}"
    report["exit_code"] = code
    if not args.no_timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    _emit(report, lines, args.format, out)
    return code


def results_block(report_json: str) -> str:
    """The canonical serialization of a JSON report's results block."""
    return json.dumps(json.loads(report_json).get("results"), sort_keys=True)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
