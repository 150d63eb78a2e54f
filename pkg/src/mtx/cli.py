"""Command-line orchestration.

Subcommands: build, rings, decompose, render, verify.  All outputs are
deterministic for fixed flags and seeds.  Exit codes: 0 success, 2 bad
input/domain, 3 ring placement failure, 4 split budget exhausted, 5 I/O
failure, 6 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import (
    BudgetExceededError,
    CapacityError,
    ClearanceError,
    DomainError,
    PlacementError,
    SchemaError,
)
from .multitwist import DecomposeConfig, decompose, multitwist_map, place_rings, unwind_path
from .scene import Scene, dump_factors, load_factors
from .verify import (
    DistortionReport,
    composition_residual,
    distortion_estimate,
    path_probe,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PLACEMENT = 3
EXIT_BUDGET = 4
EXIT_IO = 5
EXIT_VERIFY = 6


class VerificationFailure(RuntimeError):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtx", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a scene: cell tree for (alpha, depth)")
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--out", required=True)

    r = sub.add_parser("rings", help="place round rings into a scene")
    r.add_argument("--scene", required=True)
    r.add_argument("--margin", type=float, default=0.25)
    r.add_argument("--l-twist", type=float, default=2.0)
    r.add_argument("--out", default=None, help="default: rewrite the scene in place")

    d = sub.add_parser("decompose", help="factor the unwinding path into small-distortion maps")
    d.add_argument("--scene", required=True)
    d.add_argument("--epsilon", type=float, required=True)
    d.add_argument("--out-factors", required=True)
    d.add_argument("--report", default=None, help="CSV distortion report path")
    d.add_argument("--pairs", type=int, default=2 * 10**4)
    d.add_argument("--samples", type=int, default=10**4)
    d.add_argument("--seed", type=int, default=42)
    d.add_argument("--depth-cut", type=int, default=None)

    n = sub.add_parser("render", help="render SVG frames of the unwinding path")
    n.add_argument("--scene", required=True)
    n.add_argument("--frames", type=int, default=1)
    n.add_argument("--outdir", required=True)

    v = sub.add_parser("verify", help="re-measure factors or probe fixtures")
    v.add_argument("--scene", default=None)
    v.add_argument("--factors", default=None)
    v.add_argument("--epsilon", type=float, default=None,
                   help="override the epsilon recorded in the factors file")
    v.add_argument("--pairs", type=int, default=2 * 10**4)
    v.add_argument("--samples", type=int, default=10**4)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--report", default=None)
    v.add_argument("--example33", action="store_true",
                   help="probe the non-uniform composition fixture (expected failure)")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (SchemaError, DomainError, CapacityError, ClearanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PlacementError as exc:
        print(f"placement error: {exc}", file=sys.stderr)
        return EXIT_PLACEMENT
    except BudgetExceededError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def console_main():  # pragma: no cover
    sys.exit(main())


def _dispatch(args) -> int:
    if args.command == "build":
        scene = Scene.build(args.alpha, args.depth)
        scene.save(args.out)
        print(f"wrote scene with {2**args.depth} leaf cells to {args.out}")
        return EXIT_OK
    if args.command == "rings":
        scene = Scene.load(args.scene)
        scene.rings = place_rings(scene.tree, args.margin, args.l_twist)
        scene.params = dict(scene.params, margin=args.margin, l_twist=args.l_twist)
        out = args.out or args.scene
        scene.save(out)
        print(f"placed {len(scene.rings.words)} rings "
              f"(effective L {scene.rings.reported_l:.4f}) into {out}")
        return EXIT_OK
    if args.command == "decompose":
        return _cmd_decompose(args)
    if args.command == "render":
        from .render import render_frames

        scene = Scene.load(args.scene)
        if scene.rings is not None:
            path = unwind_path(scene.rings)
        else:
            from .paths import Map2, Path

            ident = Map2.identity()
            path = Path(lambda t: ident, ident, ident, label="identity")
        names = render_frames(scene, path, args.frames, args.outdir)
        print(f"wrote {len(names)} frames to {args.outdir}")
        return EXIT_OK
    if args.command == "verify":
        return _cmd_verify(args)
    raise DomainError(f"unknown command {args.command}")


def _split_budget() -> int:
    raw = os.environ.get("MTX_BUDGET")
    return int(raw) if raw else 2**14


def _cmd_decompose(args) -> int:
    scene = Scene.load(args.scene)
    if scene.rings is None:
        raise SchemaError("scene has no rings; run `mtx rings` first")
    cut = scene.depth if args.depth_cut is None else args.depth_cut
    path = unwind_path(scene.rings, cut)
    f = multitwist_map(scene.rings, cut)
    cfg = DecomposeConfig(seed=args.seed, budget=_split_budget())
    factors = decompose(path, args.epsilon, cfg)
    with open(args.out_factors, "w") as fh:
        fh.write(dump_factors(factors, cut))
    rows = [DistortionReport.csv_header()]
    worst = 1.0
    for k, fac in enumerate(factors.factors):
        rep = distortion_estimate(fac.map2, path.support, args.pairs, args.seed + 1 + k,
                                  map_id=f"factor-{k}")
        rows.append(rep.csv_row())
        worst = max(worst, rep.distortion)
    residual = composition_residual(factors, f.map2, args.samples, args.seed,
                                    region=path.support)
    rows.append(f"residual,,,,{residual!r},{args.seed}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    print(f"N={len(factors.factors)} factors, max distortion {worst:.6f}, "
          f"residual {residual:.3e}, intervals tested {factors.intervals_tested}")
    if worst > 1.0 + args.epsilon or residual > 1e-9:
        raise VerificationFailure(
            f"factor distortion {worst} vs 1+eps={1 + args.epsilon}, residual {residual}"
        )
    return EXIT_OK


def _intervals_form_partition(intervals, tol=1e-12) -> bool:
    # factors are emitted with the interval nearest t=1 first
    spans = list(reversed([tuple(iv) for iv in intervals]))
    if abs(spans[0][0]) > tol or abs(spans[-1][1] - 1.0) > tol:
        return False
    for (a, b), (c, d) in zip(spans[:-1], spans[1:]):
        if b <= a or abs(c - b) > tol:
            return False
    return spans[-1][1] > spans[-1][0]


def _cmd_verify(args) -> int:
    if args.example33:
        return _verify_example33(args)
    if not (args.scene and args.factors):
        raise SchemaError("verify needs --scene and --factors (or --example33)")
    scene = Scene.load(args.scene)
    if scene.rings is None:
        raise SchemaError("scene has no rings")
    doc = load_factors(args.factors)
    eps = args.epsilon if args.epsilon is not None else doc["epsilon"]
    cut = doc.get("depth_cut", scene.depth)
    path = unwind_path(scene.rings, cut)
    f = multitwist_map(scene.rings, cut)
    intervals = [tuple(entry["interval"]) for entry in doc["factors"]]
    if not _intervals_form_partition(intervals):
        raise VerificationFailure("factor intervals do not partition [0,1]")
    from .multitwist import Factor, FactorList, _transition

    factors = FactorList(
        [Factor((a, b), _transition(path, a, b), entry["distortion"])
         for (a, b), entry in zip(intervals, doc["factors"])],
        eps,
        doc["seed"],
    )
    rows = [DistortionReport.csv_header()]
    worst = 1.0
    for k, fac in enumerate(factors.factors):
        rep = distortion_estimate(fac.map2, path.support, args.pairs, args.seed + 1 + k,
                                  map_id=f"factor-{k}")
        rows.append(rep.csv_row())
        worst = max(worst, rep.distortion)
    residual = composition_residual(factors, f.map2, args.samples, args.seed,
                                    region=path.support)
    rows.append(f"residual,,,,{residual!r},{args.seed}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    print(f"verified N={len(factors.factors)}: max distortion {worst:.6f}, "
          f"residual {residual:.3e}")
    if worst > 1.0 + eps or residual > 1e-9:
        raise VerificationFailure(
            f"factor distortion {worst} vs 1+eps={1 + eps}, residual {residual}"
        )
    return EXIT_OK


def _verify_example33(args) -> int:
    from .geom import Disk
    from .paths import example_nonpath

    copies = 50
    path = example_nonpath(copies=copies)
    far = Disk(complex(copies - 1, 0.0), 1.0 / 3.0)
    table = path_probe(path, [(0.0, 0.01)], region=far, seed=args.seed,
                       samples=256, stretch_pairs=2048)
    worst = float(table.distortion.max())
    if args.report:
        with open(args.report, "w") as fh:
            fh.write("\n".join(table.csv_lines()) + "\n")
    print(f"probe distortion {worst:.4f} at |s-t|=0.01 on the far translate")
    if worst > 1.5:
        print("warning: composition is not a uniform path (expected for this fixture)")
    return EXIT_OK
