"""Command line driver: build, query, export, roadsign, validate."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import relations
from .containment import contains
from .map_core import dart_sort_key, to_dot, validate
from .netpbm import load_image, save_pgm
from .pyramid import Pyramid
from .segmentation import RoadsignNotFound, SegmentedImage, roadsign_extract


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RoadsignNotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="combipyramid", description=__doc__)
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("build", help="build a pyramid from a PGM/PPM image")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--max-levels", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="ask relationship questions at one level")
    p.add_argument("--pyr", required=True)
    p.add_argument("--level", default="top")
    p.add_argument("--contains", nargs=2, type=int, metavar=("A", "B"))
    p.add_argument("--inside", nargs=2, type=int, metavar=("A", "B"))
    p.add_argument("--meets-each", nargs=2, type=int, metavar=("A", "B"))
    p.add_argument("--composed-of", type=int, metavar="V")
    p.add_argument("--report", action="store_true")
    p.add_argument("--region", type=int, default=None)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("export", help="emit DOT graphs or a label image")
    p.add_argument("--pyr", required=True)
    p.add_argument("--level", default="top")
    p.add_argument("--map-dot")
    p.add_argument("--rag-dot")
    p.add_argument("--labels")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("roadsign", help="extract the symbol of a road sign image")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--background-color", default="0,0,200")
    p.add_argument("--symbol-color", default="255,255,255")
    p.add_argument("--max-levels", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_roadsign)

    p = sub.add_parser("validate", help="run the invariant suite on a pyramid file")
    p.add_argument("--pyr", required=True)
    p.set_defaults(func=_cmd_validate)
    return parser


def _load_pyramid(path: str) -> Pyramid:
    with open(path, "r", encoding="ascii") as fh:
        return Pyramid.from_json(fh.read())


def _parse_level(pyr: Pyramid, text: str) -> int:
    if text == "top":
        return pyr.top_level
    i = int(text)
    if not 0 <= i <= pyr.top_level:
        raise ValueError(f"level {i} out of range 0..{pyr.top_level}")
    return i


def _cmd_build(args) -> int:
    image = load_image(args.input)
    seg = SegmentedImage(image).run(args.threshold, args.max_levels)
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(seg.pyramid.to_json())
    print(json.dumps({
        "levels": seg.pyramid.top_level,
        "regions": seg.region_count(),
        "out": args.out,
    }, sort_keys=True))
    return 0


def _cmd_query(args) -> int:
    pyr = _load_pyramid(args.pyr)
    i = _parse_level(pyr, args.level)
    out: dict = {"level": i}
    if args.contains:
        a, b = args.contains
        out["contains"] = contains(pyr, i, a, b)
    elif args.inside:
        a, b = args.inside
        out["inside"] = contains(pyr, i, b, a)
    elif args.meets_each:
        a, b = args.meets_each
        segs = relations.meets_each(pyr, i, a, b)
        out["meets_exists"] = bool(segs)
        out["meets_each"] = [
            {"darts": list(s.darts), "freeman": s.cracks.freeman(), "cracks": s.cracks.to_records()}
            for s in segs
        ]
    elif args.composed_of is not None:
        out["composed_of"] = sorted(pyr.composed_of(i, args.composed_of), key=dart_sort_key)
    else:
        out = relations.relation_report(pyr, i, args.region)
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_export(args) -> int:
    pyr = _load_pyramid(args.pyr)
    i = _parse_level(pyr, args.level)
    if not (args.map_dot or args.rag_dot or args.labels):
        raise ValueError("nothing to export: pass --map-dot, --rag-dot or --labels")
    if args.map_dot:
        with open(args.map_dot, "w", encoding="ascii") as fh:
            fh.write(to_dot(pyr.reconstruct_level(i), name=f"level{i}"))
    if args.rag_dot:
        with open(args.rag_dot, "w", encoding="ascii") as fh:
            fh.write(relations.rag_to_dot(pyr, i, name=f"rag{i}"))
    if args.labels:
        emb = pyr.embedding
        rows = pyr.pixel_labels(i)
        reps = sorted({v for row in rows for v in row}, key=dart_sort_key)
        dense = {v: k for k, v in enumerate(reps)}
        arr = np.zeros((emb.height, emb.width), dtype=np.int64)
        for y in range(emb.height):
            for x in range(emb.width):
                arr[y, x] = dense[rows[y][x]]
        maxval = max(1, int(arr.max()))
        save_pgm(args.labels, arr, maxval=min(65535, maxval))
        with open(args.labels + ".json", "w", encoding="ascii") as fh:
            fh.write(json.dumps({"regions": {str(k): v for v, k in dense.items()}}, sort_keys=True) + "\n")
    return 0


def _parse_color(text: str) -> tuple[float, ...]:
    parts = tuple(float(p) for p in text.split(","))
    if len(parts) not in (1, 3):
        raise ValueError(f"bad color {text!r}: expected 1 or 3 comma-separated values")
    return parts


def _cmd_roadsign(args) -> int:
    image = load_image(args.input)
    channels = image.shape[2]
    bg = _parse_color(args.background_color)[:channels]
    sym = _parse_color(args.symbol_color)[:channels]
    seg = SegmentedImage(image).run(args.threshold, args.max_levels)
    symbol = roadsign_extract(seg, k=args.k, background_color=bg, symbol_color=sym)
    mask = np.zeros((seg.height, seg.width), dtype=np.uint8)
    rows = seg.pyramid.pixel_labels(seg.pyramid.top_level)
    for y in range(seg.height):
        for x in range(seg.width):
            if rows[y][x] in symbol:
                mask[y, x] = 255
    save_pgm(args.out, mask)
    print(json.dumps({
        "symbol_regions": sorted(symbol, key=dart_sort_key),
        "symbol_pixels": int((mask > 0).sum()),
        "out": args.out,
    }, sort_keys=True))
    return 0


def _cmd_validate(args) -> int:
    pyr = _load_pyramid(args.pyr)
    problems: list[str] = []
    for i in range(pyr.top_level + 1):
        report = validate(pyr.reconstruct_level(i))
        for name in report.failed():
            problems.append(f"level {i}: {name}")
    sizes = [len(pyr.reconstruct_level(i)) for i in range(pyr.top_level + 1)]
    for i, kernel in enumerate(pyr.kernels, start=1):
        if kernel.darts and sizes[i] >= sizes[i - 1]:
            problems.append(f"level {i}: dart count did not shrink under a non-empty kernel")
        for d in kernel.darts:
            if pyr.level(d) != i:
                problems.append(f"level {i}: kernel dart {d} has level {pyr.level(d)}")
    ok = not problems
    print(json.dumps({"ok": ok, "levels": pyr.top_level, "problems": problems}, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
