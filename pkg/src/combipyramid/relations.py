"""Uniform query layer over one pyramid level.

Five relationships between regions: meets_exists, meets_each (one boundary
piece per shared border), contains, inside and composed_of. Regions are named
by the canonical dart of their vertex cycle; exactly one region per level is
the outside face.
"""

from __future__ import annotations

from .boundary import CrackChain, Segment, segment
from .containment import inside_all
from .map_core import Dart, dart_sort_key
from .pyramid import Pyramid

__all__ = [
    "region_ids",
    "infinite_region",
    "meets_each",
    "meets_exists",
    "rag_export",
    "rag_to_dot",
    "relation_report",
]


def region_ids(pyr: Pyramid, i: int) -> list[Dart]:
    """Canonical representative darts of all level-i vertices."""
    return [cyc[0] for cyc in pyr.reconstruct_level(i).vertices()]


def infinite_region(pyr: Pyramid, i: int) -> Dart:
    """Representative of the vertex encoding the outside of the image."""
    m = pyr.reconstruct_level(i)
    d = next(d for d in sorted(m.darts, key=dart_sort_key) if pyr.embedding.pixel_of(d) is None)
    return m.vertex_of(d)


def meets_each(pyr: Pyramid, i: int, a: Dart, b: Dart) -> list[Segment]:
    """One Segment per connected boundary piece between regions a and b.

    A piece may span several map edges: where an inner self loop anchors on
    the boundary it pins a junction that does not separate two pieces of the
    a/b border, so edges continuing through such junctions are glued. Empty
    when the regions are not adjacent.
    """
    m = pyr.reconstruct_level(i)
    rep = {}
    for cyc in m.vertices():
        for d in cyc:
            rep[d] = cyc[0]
    ra, rb = rep[a], rep[b]
    if ra == rb:
        raise ValueError("meets_each needs two distinct regions")
    facing = [d for d in m.orbit(ra, "sigma") if rep[m.alpha(d)] == rb]

    def continuation(d: Dart) -> Dart | None:
        # the junction at the far end of d's piece: glue when every incident
        # edge except the two a/b ones is a self loop
        junction = m.orbit(m.alpha(d), "phi")
        separating = [x for x in junction if rep[x] != rep[m.alpha(x)]]
        if len(separating) != 2:
            return None
        y = separating[0] if separating[1] == m.alpha(d) else separating[1]
        if rep[y] == ra and rep[m.alpha(y)] == rb and y != d:
            return y
        return None

    nxt = {d: continuation(d) for d in facing}
    has_pred = {c for c in nxt.values() if c is not None}
    chains = []
    seen: set[Dart] = set()
    for d in sorted(facing, key=dart_sort_key):
        if d in has_pred or d in seen:
            continue
        chain = [d]
        seen.add(d)
        while nxt[chain[-1]] is not None:
            chain.append(nxt[chain[-1]])
            seen.add(chain[-1])
        chains.append(chain)
    for d in sorted(facing, key=dart_sort_key):
        if d in seen:
            continue
        chain = [d]  # a closed ring pinned only by loop anchors
        seen.add(d)
        while nxt[chain[-1]] != d:
            step = nxt[chain[-1]]
            if step is None or len(chain) > len(facing):
                raise RuntimeError("boundary ring between the regions does not close")
            chain.append(step)
            seen.add(step)
        chains.append(chain)

    out = []
    for chain in chains:
        pieces = [segment(pyr, i, d) for d in chain]
        darts: list[Dart] = []
        moves = []
        for k, piece in enumerate(pieces):
            if k and piece.cracks.start != pieces[k - 1].cracks.points()[-1]:
                raise RuntimeError("glued boundary pieces do not touch")
            darts.extend(piece.darts)
            moves.extend(piece.cracks.moves)
        out.append(Segment(tuple(darts), CrackChain(pieces[0].cracks.start, tuple(moves))))
    return out


def meets_exists(pyr: Pyramid, i: int, a: Dart, b: Dart) -> bool:
    return bool(meets_each(pyr, i, a, b))


def rag_export(pyr: Pyramid, i: int) -> tuple[list[Dart], list[tuple[Dart, Dart]]]:
    """Plain region adjacency graph: one vertex per region, one undirected
    edge per adjacent pair. Self loops and parallel edges collapse."""
    m = pyr.reconstruct_level(i)
    regions = region_ids(pyr, i)
    edges: set[tuple[Dart, Dart]] = set()
    rep = {}
    for cyc in m.vertices():
        for d in cyc:
            rep[d] = cyc[0]
    for cyc in m.edges():
        d = cyc[0]
        u, v = rep[d], rep[m.alpha(d)]
        if u == v:
            continue
        edges.add((u, v) if dart_sort_key(u) <= dart_sort_key(v) else (v, u))
    return regions, sorted(edges, key=lambda e: (dart_sort_key(e[0]), dart_sort_key(e[1])))


def rag_to_dot(pyr: Pyramid, i: int, name: str = "rag") -> str:
    regions, edges = rag_export(pyr, i)
    outside = infinite_region(pyr, i)
    lines = [f"graph {name} {{"]
    for r in regions:
        shape = ' [shape=doublecircle]' if r == outside else ""
        lines.append(f'  "r{r}"{shape};')
    for u, v in edges:
        lines.append(f'  "r{u}" -- "r{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def relation_report(pyr: Pyramid, i: int, region: Dart | None = None) -> dict:
    """All five relationships at level i as one JSON-ready record.

    Enclosure entries are dropped with a warning while the level still has
    redundant edges; everything else is always reported. The optional region
    filter keeps only pairs involving that region.
    """
    m = pyr.reconstruct_level(i)
    regions = region_ids(pyr, i)
    outside = infinite_region(pyr, i)
    _, rag_edges = rag_export(pyr, i)
    warnings: list[str] = []

    meets = []
    for u, v in rag_edges:
        segs = meets_each(pyr, i, u, v)
        meets.append({"a": u, "b": v, "segments": len(segs)})

    contains_pairs: list[tuple[Dart, Dart]] = []
    if pyr.redundant_darts(i):
        warnings.append("redundant edges present: enclosure entries omitted")
    else:
        for r in regions:
            for inner in sorted(inside_all(pyr, i, r), key=dart_sort_key):
                contains_pairs.append((r, inner))

    composed = []
    if i >= 1:
        for r in regions:
            children = sorted(pyr.composed_of(i, r), key=dart_sort_key)
            composed.append({"parent": r, "children": children})

    def keep(*darts: Dart) -> bool:
        return region is None or m.vertex_of(region) in darts

    report = {
        "level": i,
        "regions": regions,
        "infinite_region": outside,
        "meets": [e for e in meets if keep(e["a"], e["b"])],
        "contains": [[a, b] for a, b in contains_pairs if keep(a, b)],
        "inside": [[b, a] for a, b in contains_pairs if keep(a, b)],
        "composed_of": [e for e in composed if keep(e["parent"])],
        "warnings": warnings,
    }
    return report
