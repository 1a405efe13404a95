"""Hierarchy of successively merged partitions stored implicitly.

Only the base map is kept in full. Each reduction step is a kernel, a set of
darts that disappears at that level, tagged with how it disappears:

* CK: a forest of edges whose contraction merges adjacent regions,
* RKESL: empty self loops (inner boundaries around nothing),
* RKEDE: darts at degree-2 dual vertices, whose removal fuses consecutive
  boundary pieces into a single edge.

Every reduced level is recovered from the base by replaying absorbed darts.
Walking from a surviving dart d with sigma0, taking phi0 after a contracted
dart and sigma0 after a removed dart, yields the darts swallowed between d
and its level-i successor: the first surviving dart hit is sigma_i(d). The
partner alpha_i(d) is read off d's boundary piece instead: scanning around
base corners, the piece grows by one absorbed double-edge dart at a time and
stops where a survivor is met, and the base partner of its last dart is
alpha_i(d) (just -d while the piece is a single crack).

A removed double-edge joint drops one dart from each of the two boundary
directions, so kernels with state RKEDE pair surviving darts of formerly
distinct edges; CK and RKESL kernels always remove whole base edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .map_core import (
    CombinatorialMap,
    CrackEmbedding,
    Dart,
    build_grid_map,
    dart_sort_key,
)
from .moves import Move, turn_angle

__all__ = ["KernelState", "Kernel", "Pyramid", "KernelError"]


class KernelState(Enum):
    CK = "CK"
    RKESL = "RKESL"
    RKEDE = "RKEDE"


@dataclass(frozen=True)
class Kernel:
    """Dart set removed by one reduction level, with its removal mode."""

    state: KernelState
    darts: frozenset[Dart]

    @staticmethod
    def of(state: KernelState, darts: Iterable[Dart]) -> "Kernel":
        return Kernel(state, frozenset(darts))

    def __len__(self) -> int:
        return len(self.darts)


class KernelError(ValueError):
    """A kernel does not satisfy the invariants of its state."""


class Pyramid:
    """Base grid map plus the per-dart level and per-kernel state functions.

    Construction is single writer via apply_kernel; all queries afterwards
    are read only and reconstruct any level from the base on demand.
    """

    def __init__(self, base: CombinatorialMap, embedding: CrackEmbedding):
        self.base = base
        self.embedding = embedding
        self.kernels: list[Kernel] = []
        self._killed: dict[Dart, int] = {}
        # orientation cache: per level, the darts whose turn count changed
        self._or_updates: list[dict[Dart, int]] = []
        self._level_maps: dict[int, CombinatorialMap] = {0: base}

    @classmethod
    def from_grid(cls, width: int, height: int) -> "Pyramid":
        return cls(*build_grid_map(width, height))

    # -- the implicit encoding ------------------------------------------------

    @property
    def top_level(self) -> int:
        return len(self.kernels)

    def level(self, d: Dart) -> int:
        """Highest level where d survives, top_level + 1 if it never dies."""
        if d not in self.base:
            raise KeyError(f"dart {d} is not in the base map")
        return self._killed.get(d, len(self.kernels) + 1)

    def state(self, i: int) -> KernelState:
        return self.kernels[i - 1].state

    def alive(self, d: Dart, i: int) -> bool:
        return self.level(d) > i

    def top_map(self) -> CombinatorialMap:
        return self.reconstruct_level(self.top_level)

    # -- replay of absorbed darts ---------------------------------------------

    def _absorbed(self, i: int, d: Dart) -> tuple[list[Dart], Dart]:
        """Darts replayed between d and its level-i sigma successor.

        Returns (walk, successor): walk starts at d and lists every dart that
        died at level <= i before the successor, the first survivor, is hit.
        """
        walk = [d]
        c = self.base.sigma(d)
        limit = len(self.base)
        while self.level(c) <= i:
            walk.append(c)
            if len(walk) > limit:
                raise RuntimeError("absorbed-dart replay does not terminate")
            if self.state(self.level(c)) is KernelState.CK:
                c = self.base.phi(c)
            else:
                c = self.base.sigma(c)
        return walk, c

    def receptive_field(self, i: int, d: Dart) -> tuple[Dart, ...]:
        """Base darts reduced onto d at level i, in replay order."""
        self._require_alive(i, d)
        return tuple(self._absorbed(i, d)[0])

    def _segment_walk(self, i: int, d: Dart) -> list[Dart]:
        """Base darts of d's boundary piece at level i, in chain order.

        After each dart c the scan turns around the base corner at the end of
        c's crack: darts contracted or removed as loops at or below level i
        are internal there and skipped; a dart removed as a double edge
        continues the piece; a surviving dart means the boundary stops, so c
        was the last dart and its base partner is alpha_i(d).
        """
        out = [d]
        limit = len(self.base)
        c = d
        while True:
            hop = self.base.phi(-c)
            steps = 0
            nxt = None
            while True:
                lvl = self.level(hop)
                if lvl > i:
                    break
                if self.state(lvl) is KernelState.RKEDE:
                    nxt = hop
                    break
                hop = self.base.phi(hop)
                steps += 1
                if steps > limit:
                    raise RuntimeError(f"corner scan from dart {c} does not terminate")
            if nxt is None:
                return out
            out.append(nxt)
            if len(out) > limit:
                raise RuntimeError(f"boundary piece of dart {d} does not terminate")
            c = nxt

    def sigma_at(self, i: int, d: Dart) -> Dart:
        self._require_alive(i, d)
        return self.reconstruct_level(i).sigma(d)

    def alpha_at(self, i: int, d: Dart) -> Dart:
        """Level-i edge partner: base partner of the last dart of d's
        boundary piece, which is -d while the piece is a single crack."""
        self._require_alive(i, d)
        return self.reconstruct_level(i).alpha(d)

    def reconstruct_level(self, i: int) -> CombinatorialMap:
        """The level-i map, rebuilt from the base and the level function."""
        if not 0 <= i <= self.top_level:
            raise ValueError(f"level {i} out of range 0..{self.top_level}")
        cached = self._level_maps.get(i)
        if cached is not None:
            return cached
        survivors = [d for d in sorted(self.base.darts, key=dart_sort_key) if self.level(d) > i]
        sigma: dict[Dart, Dart] = {}
        alpha: dict[Dart, Dart] = {}
        for d in survivors:
            sigma[d] = self._absorbed(i, d)[1]
            alpha[d] = -self._segment_walk(i, d)[-1]
        m = CombinatorialMap(survivors, sigma, alpha)
        self._level_maps[i] = m
        return m

    def _require_alive(self, i: int, d: Dart) -> None:
        if not 0 <= i <= self.top_level:
            raise ValueError(f"level {i} out of range 0..{self.top_level}")
        if self.level(d) <= i:
            raise ValueError(f"dart {d} does not survive at level {i}")

    # -- orientation cache ----------------------------------------------------

    def cached_orientation(self, i: int, d: Dart) -> int:
        """Accumulated quarter turns along d's boundary piece at level i.

        Zero at the base; updated whenever a double-edge removal extends the
        piece, by folding in the absorbed darts' counts and junction turns.
        """
        self._require_alive(i, d)
        for updates in reversed(self._or_updates[:i]):
            if d in updates:
                return updates[d]
        return 0

    def first_move(self, d: Dart) -> Move:
        return self.embedding.move(d)

    def last_move(self, i: int, d: Dart) -> Move:
        return self.embedding.move(-self.alpha_at(i, d))

    # -- kernel application ---------------------------------------------------

    def apply_kernel(self, kernel: Kernel) -> "Pyramid":
        """Append one reduction level. The kernel is checked against the
        current top map before any state is touched."""
        top = self.top_map()
        dead = [d for d in kernel.darts if d not in top.darts]
        if dead:
            raise KernelError(f"kernel contains dead or unknown darts: {sorted(dead, key=dart_sort_key)[:4]}")
        if kernel.state is KernelState.CK:
            self._check_ck(top, kernel.darts)
            updates: dict[Dart, int] = {}
        elif kernel.state is KernelState.RKESL:
            self._check_rkesl(top, kernel.darts)
            updates = {}
        else:
            self._check_rkede(top, kernel.darts)
            updates = self._fold_orientations(top, kernel.darts)
        new_level = len(self.kernels) + 1
        self.kernels.append(kernel)
        for d in kernel.darts:
            self._killed[d] = new_level
        self._or_updates.append(updates)
        self.reconstruct_level(new_level)
        return self

    def _check_ck(self, top: CombinatorialMap, darts: frozenset[Dart]) -> None:
        for d in darts:
            if top.alpha(d) not in darts:
                raise KernelError(f"contraction kernel is not closed under alpha at dart {d}")
        vertex_of = {}
        for cyc in top.vertices():
            for d in cyc:
                vertex_of[d] = cyc[0]
        parent: dict[Dart, Dart] = {}

        def find(v: Dart) -> Dart:
            while parent.get(v, v) != v:
                parent[v] = parent.get(parent[v], parent[v])
                v = parent[v]
            return v

        for d in sorted(darts, key=dart_sort_key):
            if dart_sort_key(top.alpha(d)) < dart_sort_key(d):
                continue
            a, b = vertex_of[d], vertex_of[top.alpha(d)]
            if a == b:
                raise KernelError(f"contraction kernel contains the self-loop edge of dart {d}")
            ra, rb = find(a), find(b)
            if ra == rb:
                raise KernelError(f"contraction kernel contains a cycle through dart {d}")
            parent[ra] = rb

    def _check_rkesl(self, top: CombinatorialMap, darts: frozenset[Dart]) -> None:
        for d in darts:
            if top.alpha(d) not in darts:
                raise KernelError(f"self-loop kernel is not closed under alpha at dart {d}")
        loops = _empty_self_loops(top)
        for d in sorted(darts, key=dart_sort_key):
            if d not in loops:
                raise KernelError(f"dart {d} is not part of an empty self loop")
        self._check_keeps_vertices(top, darts)

    def _check_rkede(self, top: CombinatorialMap, darts: frozenset[Dart]) -> None:
        if _empty_self_loops(top):
            raise KernelError("empty self loops present; remove them before double edges")
        for d in sorted(darts, key=dart_sort_key):
            cyc = top.orbit(d, "phi")
            if len(cyc) != 2:
                raise KernelError(f"dart {d} is not at a degree-2 dual vertex")
            other = cyc[1]
            if other == top.alpha(d):
                raise KernelError(f"dart {d} bounds a single-edge boundary, not a double edge")
            if other not in darts:
                raise KernelError(f"joint of dart {d} is only half removed")
            if self.embedding.start(d) != self.embedding.start(other):
                raise KernelError(f"joint at dart {d} does not meet at one grid corner")
        self._check_keeps_vertices(top, darts)

    def _check_keeps_vertices(self, top: CombinatorialMap, darts: frozenset[Dart]) -> None:
        for cyc in top.vertices():
            if all(d in darts for d in cyc):
                raise KernelError(f"kernel consumes every dart of the vertex of {cyc[0]}")

    def _fold_orientations(self, top: CombinatorialMap, darts: frozenset[Dart]) -> dict[Dart, int]:
        """New turn counts for survivors whose boundary piece grows.

        A survivor f1 whose partner dies heads a chain f1, sigma(f1), ... of
        same-direction darts ending just before the surviving reverse dart;
        its new count folds the chain's counts and the turns at the joints.
        """
        i = self.top_level
        updates: dict[Dart, int] = {}
        for f1 in sorted(top.darts, key=dart_sort_key):
            if f1 in darts or top.alpha(f1) not in darts:
                continue
            total = self.cached_orientation(i, f1)
            last = self.last_move(i, f1)
            f = f1
            while top.alpha(f) in darts:
                f = top.sigma(f)
                if f == f1:
                    raise KernelError("double-edge chain is not terminated by a surviving partner")
                total += turn_angle(last, self.first_move(f)) + self.cached_orientation(i, f)
                last = self.last_move(i, f)
            updates[f1] = total
        return updates

    # -- kernel construction --------------------------------------------------

    def compute_rkesl(self) -> Kernel:
        """Maximal kernel of empty self loops of the current top map."""
        return Kernel.of(KernelState.RKESL, _empty_self_loops(self.top_map()))

    def compute_rkede(self) -> Kernel:
        """Maximal kernel of double-edge joints of the current top map.

        Joints are degree-2 dual vertices whose two darts come from distinct
        edges and meet at one grid corner. Chains of joints keep their first
        dart in each traversal direction; closed boundary rings also keep one
        whole edge so every region keeps a border.
        """
        top = self.top_map()
        link: dict[Dart, Dart] = {}
        for cyc in top.faces():
            if len(cyc) != 2:
                continue
            x, y = cyc
            if y == top.alpha(x):
                continue
            if self.embedding.start(x) != self.embedding.start(y):
                continue
            link[top.alpha(x)] = y
            link[top.alpha(y)] = x
        has_pred = set(link.values())
        removed: set[Dart] = set()
        seen: set[Dart] = set()
        for f in sorted(link, key=dart_sort_key):
            if f in has_pred or f in seen:
                continue
            seen.add(f)
            c = f
            while c in link:
                c = link[c]
                seen.add(c)
                removed.add(c)
        # leftover links all lie on closed rings; keep one edge per ring
        for f in sorted(link, key=dart_sort_key):
            if f in seen:
                continue
            ring = [f]
            c = link[f]
            while c != f:
                ring.append(c)
                c = link[c]
            seen.update(ring)
            mates = [top.alpha(d) for d in ring]
            seen.update(mates)
            start = min(ring + mates, key=dart_sort_key)
            if start not in ring:
                ring = [top.alpha(d) for d in reversed(ring)]
            k = ring.index(start)
            ordered = ring[k:] + ring[:k]
            removed.update(ordered[1:])
            removed.update(top.alpha(d) for d in ordered[:-1])
        return Kernel.of(KernelState.RKEDE, removed)

    def vertex_of_pixel(self, i: int, x: int, y: int) -> Dart:
        """Representative of the level-i region containing pixel (x, y)."""
        emb = self.embedding
        if not (0 <= x < emb.width and 0 <= y < emb.height):
            raise ValueError(f"pixel ({x}, {y}) outside the {emb.width}x{emb.height} grid")
        left_side = -(y * (emb.width + 1) + x + 1)
        d = _backtrack_survivor(self, i, left_side)
        return self.reconstruct_level(i).vertex_of(d)

    def pixel_labels(self, i: int) -> list[list[Dart]]:
        """Region representative of every pixel at level i, row by row.

        Resolved walks are shared across pixels, so the whole image costs
        one pass over the base darts instead of one walk per pixel.
        """
        m = self.reconstruct_level(i)
        resolved: dict[Dart, Dart] = {}
        for cyc in m.vertices():
            for d in cyc:
                resolved[d] = cyc[0]
        emb = self.embedding
        out = []
        for y in range(emb.height):
            row = []
            for x in range(emb.width):
                d = -(y * (emb.width + 1) + x + 1)
                path = []
                c = d
                while c not in resolved:
                    path.append(c)
                    if len(path) > len(self.base):
                        raise RuntimeError("replay from a contracted dart does not terminate")
                    if self.state(self.level(c)) is KernelState.CK:
                        c = self.base.phi(c)
                    else:
                        c = self.base.sigma(c)
                rep = resolved[c]
                for p in path:
                    resolved[p] = rep
                row.append(rep)
            out.append(row)
        return out

    def redundant_darts(self, i: int) -> frozenset[Dart]:
        """Darts of empty self loops and of removable double-edge joints at
        level i. Empty means the level is safe for enclosure queries."""
        m = self.reconstruct_level(i)
        bad = set(_empty_self_loops(m))
        for cyc in m.faces():
            if len(cyc) != 2:
                continue
            x, y = cyc
            if y == m.alpha(x):
                continue
            if self.embedding.start(x) != self.embedding.start(y):
                continue
            bad.update(cyc)
        return frozenset(bad)

    def composed_of(self, i: int, v: Dart) -> frozenset[Dart]:
        """Level-(i-1) vertices merged into vertex v by the level-i kernel."""
        if not 1 <= i <= self.top_level:
            raise ValueError(f"level {i} out of range 1..{self.top_level}")
        cur = self.reconstruct_level(i)
        if v not in cur.darts:
            raise ValueError(f"dart {v} does not survive at level {i}")
        v = cur.vertex_of(v)
        prev = self.reconstruct_level(i - 1)
        out = []
        for cyc in prev.vertices():
            parent = None
            for d in cyc:
                if d in cur.darts:
                    parent = cur.vertex_of(d)
                    break
            if parent is None:
                parent = cur.vertex_of(_backtrack_survivor(self, i, cyc[0]))
            if parent == v:
                out.append(cyc[0])
        return frozenset(out)

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        """Flat record of the implicit encoding; loading replays the kernels."""
        base_sigma = [self.base.sigma(d) for d in sorted(self.base.darts, key=dart_sort_key)]
        payload = {
            "format": "combipyramid-pyramid",
            "version": 1,
            "width": self.embedding.width,
            "height": self.embedding.height,
            "base_sigma": base_sigma,
            "states": [k.state.value for k in self.kernels],
            "kernels": [sorted(k.darts, key=dart_sort_key) for k in self.kernels],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Pyramid":
        payload = json.loads(text)
        if payload.get("format") != "combipyramid-pyramid":
            raise ValueError("not a serialized pyramid")
        pyr = cls.from_grid(payload["width"], payload["height"])
        stored = payload["base_sigma"]
        actual = [pyr.base.sigma(d) for d in sorted(pyr.base.darts, key=dart_sort_key)]
        if stored != actual:
            raise ValueError("stored base permutation does not match the grid layout")
        for state, darts in zip(payload["states"], payload["kernels"]):
            pyr.apply_kernel(Kernel.of(KernelState(state), darts))
        return pyr


def _backtrack_survivor(pyr: Pyramid, i: int, d: Dart) -> Dart:
    """From a dart contracted at or below level i, follow the replay rule
    forward to a dart surviving at level i."""
    limit = len(pyr.base)
    c = d
    steps = 0
    while pyr.level(c) <= i:
        if pyr.state(pyr.level(c)) is KernelState.CK:
            c = pyr.base.phi(c)
        else:
            c = pyr.base.sigma(c)
        steps += 1
        if steps > limit:
            raise RuntimeError("replay from a contracted dart does not terminate")
    return c


def _empty_self_loops(m: CombinatorialMap) -> set[Dart]:
    """Darts of self loops enclosing nothing, grown to the fixed point.

    Seeded by loops whose inner face is a single dart, then extended by loops
    whose inner face sees only loops already collected.
    """
    vertex_of = {}
    for cyc in m.vertices():
        for d in cyc:
            vertex_of[d] = cyc[0]
    loop_darts = {d for d in m.darts if vertex_of[d] == vertex_of[m.alpha(d)]}
    marked: set[Dart] = set()
    changed = True
    while changed:
        changed = False
        for d in sorted(loop_darts, key=dart_sort_key):
            if d in marked:
                continue
            for side in (d, m.alpha(d)):
                if all(x == side or x in marked for x in m.orbit(side, "phi")):
                    marked.add(d)
                    marked.add(m.alpha(d))
                    changed = True
                    break
    return marked
