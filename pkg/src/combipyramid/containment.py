"""Which regions lie inside which: loop classification and enclosure queries.

A region that surrounds other regions carries self loops in its vertex cycle.
The two darts of such a loop bracket the part of the cycle that faces the
enclosed component. Walking the cycle once while tracking the running turn
count tells the two darts apart: the bracketed span winds clockwise (+4) as
seen from the surrounding region, the rest counter-clockwise (-4). The dart
whose span is the +4 side is the loop's starting dart.

The span's turn count comes for free from prefix counts kept on a stack, so
one traversal of the cycle classifies every loop, and a second bounded sweep
collects the enclosed neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .map_core import Dart, dart_sort_key
from .moves import turn_angle
from .pyramid import Pyramid

__all__ = [
    "VisitCounter",
    "starting_darts",
    "inside_direct",
    "inside_all",
    "contains",
    "flood_fill_contains_oracle",
]


@dataclass
class VisitCounter:
    """Counts cycle-advancing dart visits, for the work-bound checks."""

    visits: int = 0
    loops: list[tuple[Dart, int]] = field(default_factory=list)

    def hit(self) -> None:
        self.visits += 1


def require_clean_level(pyr: Pyramid, i: int) -> None:
    """Enclosure queries need a level free of redundant edges."""
    bad = pyr.redundant_darts(i)
    if bad:
        witness = min(bad, key=dart_sort_key)
        raise ValueError(
            f"level {i} still has redundant edges (for example at dart {witness}); "
            "apply the self-loop and double-edge kernels first"
        )


def starting_darts(pyr: Pyramid, i: int, v: Dart, counter: VisitCounter | None = None) -> list[Dart]:
    """Starting darts of all self loops incident to the vertex of v.

    Single pass over the vertex cycle. Prefix turn counts are pushed with
    each dart; when a dart's partner is found below the stack top, the darts
    popped over it belong to neither side of any loop and are discarded,
    which planarity makes safe. The span count of the closing loop is then
    the current prefix minus the stored one, corrected by the two junction
    turns at the span ends.
    """
    require_clean_level(pyr, i)
    pyr._require_alive(i, v)
    cycle = _vertex_cycle(pyr, i, v)
    out: list[Dart] = []
    stack: list[tuple[Dart, int]] = []
    on_stack: set[Dart] = set()
    discarded: set[Dart] = set()
    prefix = 0
    prev = None
    for dk in cycle:
        if counter is not None:
            counter.hit()
        before = prefix
        if prev is not None:
            prefix += turn_angle(pyr.last_move(i, prev), pyr.first_move(dk))
        prefix += pyr.cached_orientation(i, dk)
        partner = pyr.alpha_at(i, dk)
        if partner in discarded:
            raise RuntimeError(f"crossing loops at dart {dk}: the map is not planar")
        if partner in on_stack:
            while stack and stack[-1][0] != partner:
                gone, _ = stack.pop()
                on_stack.discard(gone)
                discarded.add(gone)
            if not stack:
                raise RuntimeError(f"stack exhausted looking for the partner of dart {dk}")
            dj, prefix_j = stack.pop()
            on_stack.discard(dj)
            dj_next = pyr.sigma_at(i, dj)
            or_c1 = (
                before
                - prefix_j
                - turn_angle(pyr.last_move(i, dj), pyr.first_move(dj_next))
                + turn_angle(pyr.last_move(i, prev), pyr.first_move(dj_next))
            )
            if or_c1 not in (4, -4):
                raise RuntimeError(f"loop span at dart {dj} has turn count {or_c1}, expected +4 or -4")
            start = dj if or_c1 == 4 else dk
            out.append(start)
            if counter is not None:
                counter.loops.append((start, or_c1))
        else:
            stack.append((dk, prefix))
            on_stack.add(dk)
        prev = dk
    return out


def inside_direct(pyr: Pyramid, i: int, v: Dart, counter: VisitCounter | None = None) -> frozenset[Dart]:
    """Vertices adjacent to v from inside one of its loops.

    For each starting dart the bracketed span is swept once; nested starting
    darts are skipped by jumping to their partner, so no dart of the cycle is
    visited twice across all loops.
    """
    starts = starting_darts(pyr, i, v, counter)
    start_set = set(starts)
    end_set = {pyr.alpha_at(i, s) for s in starts}
    cur = pyr.reconstruct_level(i)
    found: set[Dart] = set()
    for s in starts:
        stop = pyr.alpha_at(i, s)
        e = cur.sigma(s)
        while e != stop:
            if counter is not None:
                counter.hit()
            if e in start_set:
                # a nested loop: its span is handled from its own starting dart
                e = cur.sigma(pyr.alpha_at(i, e))
                continue
            if e in end_set:
                raise RuntimeError(f"ending dart {e} reached before its starting dart")
            found.add(cur.vertex_of(cur.alpha(e)))
            e = cur.sigma(e)
    return frozenset(found)


def inside_all(pyr: Pyramid, i: int, v: Dart) -> frozenset[Dart]:
    """All vertices enclosed by v: everything reachable from the directly
    enclosed neighbours without stepping across v."""
    cur = pyr.reconstruct_level(i)
    home = cur.vertex_of(v)
    seeds = inside_direct(pyr, i, v)
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        u = stack.pop()
        for d in cur.orbit(u, "sigma"):
            w = cur.vertex_of(cur.alpha(d))
            if w != home and w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def contains(pyr: Pyramid, i: int, a: Dart, b: Dart) -> bool:
    """True when region b lies inside region a at level i."""
    cur = pyr.reconstruct_level(i)
    return cur.vertex_of(b) in inside_all(pyr, i, a)


def _vertex_cycle(pyr: Pyramid, i: int, v: Dart) -> list[Dart]:
    cur = pyr.reconstruct_level(i)
    cyc = cur.orbit(v, "sigma")
    k = cyc.index(min(cyc, key=dart_sort_key))
    return list(cyc[k:] + cyc[:k])


def flood_fill_contains_oracle(labels, a: int, b: int) -> bool:
    """Pixel-level reference for contains: flooding from region b over the
    complement of region a never reaches the image border.

    Regions are 4-connected, so the complement floods with 8-connectivity:
    a pocket touching other boundaries only at a corner point is not sealed.
    This is the standard connectivity pairing and it matches crack-boundary
    enclosure exactly.
    """
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise ValueError("labels must be a 2D array")
    if a == b:
        raise ValueError("regions must differ")
    for r in (a, b):
        if not (arr == r).any():
            raise ValueError(f"unknown region label {r}")
    h, w = arr.shape
    blocked = arr == a
    seen = np.zeros_like(blocked)
    stack = [(int(y), int(x)) for y, x in zip(*np.nonzero(arr == b))]
    for y, x in stack:
        seen[y, x] = True
    while stack:
        y, x = stack.pop()
        if y == 0 or x == 0 or y == h - 1 or x == w - 1:
            return False
        for ny in (y - 1, y, y + 1):
            for nx in (x - 1, x, x + 1):
                if not seen[ny, nx] and not blocked[ny, nx]:
                    seen[ny, nx] = True
                    stack.append((ny, nx))
    return True
