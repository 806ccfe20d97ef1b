"""Filled, tight and saturated status of a drawing.

The saturation oracle walks the dual of the planarization: a candidate
new edge is a walk through cells, one existing segment crossed per
step.  Any insertable curve induces such a walk with the same per-edge
crossing counts, so when no walk survives the style budgets the
SATURATED answer is exact.  The converse direction is weaker: a walk
only certifies insertability once it is realized as a curve, and when
the style forbids selfcrossings the walk must additionally pass a
simple-realization check before it is reported INSERTABLE.  Walks that
all fail that check give the UNKNOWN verdict instead of a guess.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import (
    CROSSING,
    Cell,
    DartId,
    EdgeId,
    NodeId,
    NotInStyle,
    Planarization,
    PreconditionFailed,
)
from .builder import begin_edge_at
from .styles import StyleSpec, check_homotopy_free, check_style

__all__ = [
    "SATURATED",
    "INSERTABLE",
    "UNKNOWN",
    "SIMPLE",
    "NOT_CHECKED_SIMPLE",
    "FilledReport",
    "InsertionWitness",
    "SaturationVerdict",
    "is_filled",
    "is_tight",
    "check_saturated",
    "verify_saturated_implies_filled",
]

SATURATED = "SATURATED"
INSERTABLE = "INSERTABLE"
UNKNOWN = "UNKNOWN"

SIMPLE = "Simple"
NOT_CHECKED_SIMPLE = "NotCheckedSimple"

# enumeration caps; walks beyond these turn a would-be INSERTABLE into
# UNKNOWN (noted), never into SATURATED
_MAX_CANDIDATES = 4096
_MAX_POPS = 200_000


@dataclass(frozen=True)
class FilledReport:
    """Whether every coincident vertex pair is joined along its cell.

    ``missing`` lists one (cell id, u, v) triple per pair of distinct
    vertices incident to a common cell that lack an uncrossed edge lying
    on that cell's boundary.
    """

    filled: bool
    missing: tuple[tuple[int, NodeId, NodeId], ...]


@dataclass(frozen=True)
class InsertionWitness:
    """A dual walk describing one way to add an edge from u to v.

    ``walk`` holds one (dart, edge) pair per crossed segment, in order;
    the dart is the boundary dart on the side the segment is crossed
    from.  ``realization_status`` records whether the greedy chord test
    found a selfcrossing-free routing for the walk.
    """

    endpoints: tuple[NodeId, NodeId]
    walk: tuple[tuple[DartId, EdgeId], ...]
    start_cell: int
    end_cell: int
    needs_simple_realization: bool
    realization_status: str


@dataclass(frozen=True)
class SaturationVerdict:
    status: str
    witness: Optional[InsertionWitness] = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if (self.status == INSERTABLE) != (self.witness is not None):
            raise ValueError("INSERTABLE carries a witness, other verdicts do not")


def is_filled(p: Planarization) -> FilledReport:
    """Every two vertices meeting a common cell must share an uncrossed
    edge lying on that cell's boundary."""
    uncrossed_pairs_by_cell: dict[int, set[tuple[NodeId, NodeId]]] = {}
    missing: list[tuple[int, NodeId, NodeId]] = []
    for cell in p.cells:
        verts = sorted(cell.incident_vertices)
        if len(verts) < 2:
            continue
        flat: set[tuple[NodeId, NodeId]] = set()
        for d in cell.boundary_darts():
            e = p.edge_of(d)
            if p.trace_of(e).crossing_count == 0:
                a, b = p.edge_endpoints(e)
                flat.add((min(a, b), max(a, b)))
        uncrossed_pairs_by_cell[cell.id] = flat
        for i, u in enumerate(verts):
            for v in verts[i + 1 :]:
                if (u, v) not in flat:
                    missing.append((cell.id, u, v))
    return FilledReport(not missing, tuple(missing))


def is_tight(p: Planarization, k: int) -> bool:
    """Every edge crossed exactly k times and every cell holding exactly
    one vertex (and at least one edge present)."""
    if p.num_edges < 1:
        return False
    if any(t.crossing_count != k for t in p.traces):
        return False
    return all(len(c.incident_vertices) == 1 for c in p.cells)


# ---------------------------------------------------------------------------
# Insertion oracle
# ---------------------------------------------------------------------------


class _Oracle:
    """Shared indexes for one check_saturated run."""

    def __init__(self, p: Planarization, s: StyleSpec) -> None:
        self.p = p
        self.s = s
        self.cells = p.cells
        self.cell_idx = {id(c): i for i, c in enumerate(self.cells)}
        self.cc = {t.edge: t.crossing_count for t in p.traces}
        self.incident: dict[NodeId, list[int]] = {}
        for i, c in enumerate(self.cells):
            for n in c.incident_vertices:
                self.incident.setdefault(n, []).append(i)
        # per cell: crossable boundary (dart, edge, target cell index)
        self.steps: dict[int, list[tuple[DartId, EdgeId, int]]] = {}
        for i, c in enumerate(self.cells):
            out = []
            for d in sorted(c.boundary_darts()):
                t = p.twin(d)
                out.append((d, p.edge_of(d), self.cell_idx[id(p.cell_left_of(t))]))
            self.steps[i] = out
        self.parallel: set[tuple[NodeId, NodeId]] = set()
        for e in p.edges():
            a, b = p.edge_endpoints(e)
            self.parallel.add((min(a, b), max(a, b)))
        self._h_cache: dict[tuple[NodeId, NodeId, int], bool] = {}

    # -- per pair -------------------------------------------------------------

    def budget(self, u: NodeId, v: NodeId) -> dict[EdgeId, int]:
        """Remaining crossings per existing edge for a new u-v edge."""
        k, x = self.s.k, self.s.restrictions
        eff: dict[EdgeId, int] = {}
        for e in self.p.edges():
            b = k - self.cc[e]
            if "M" in x:
                b = min(b, 1)
            if "I" in x and set(self.p.edge_endpoints(e)) & {u, v}:
                b = 0
            if b > 0:
                eff[e] = b
        return eff

    def zero_walk_ok(self, u: NodeId, v: NodeId, cell_i: int) -> bool:
        """Gate a crossing-free insertion: with H in the style and a
        parallel edge present, the new edge must be non-homotopic."""
        if "H" not in self.s.restrictions:
            return True
        if (min(u, v), max(u, v)) not in self.parallel:
            return True
        key = (min(u, v), max(u, v), cell_i)
        hit = self._h_cache.get(key)
        if hit is not None:
            return hit
        ok = self._try_noncrossing_insertions(u, v, cell_i)
        self._h_cache[key] = ok
        return ok

    def _try_noncrossing_insertions(self, u: NodeId, v: NodeId, cell_i: int) -> bool:
        p = self.p
        cell = self.cells[cell_i]
        if p.degree(u) == 0:
            starts: list[Optional[DartId]] = (
                [None] if p.cell_containing(u) is cell else []
            )
        else:
            starts = [d for d in sorted(p.darts())
                      if p.node_of(d) == u and p.cell_left_of(d) is cell]
        for bu in starts:
            pen = begin_edge_at(p, u, before=bu)
            tcell = pen.tip_cell()
            q = pen.p
            if q.degree(v) == 0:
                ends: list[Optional[DartId]] = (
                    [None] if q.cell_containing(v) is tcell else []
                )
            else:
                ends = [d for d in sorted(q.darts())
                        if q.node_of(d) == v and q.cell_left_of(d) is tcell]
            for bv in ends:
                candidate = pen.end_at(v, before=bv)
                if check_homotopy_free(candidate).in_style:
                    return True
        return False

    def walk_exists(self, u: NodeId, v: NodeId) -> bool:
        """Exact reachability over (cell, remaining budgets) states."""
        eff0 = self.budget(u, v)
        order = sorted(eff0)
        pos = {e: i for i, e in enumerate(order)}
        start_budget = tuple(eff0[e] for e in order)
        ucells = self.incident.get(u, [])
        vcells = set(self.incident.get(v, []))
        for i in ucells:
            if i in vcells and self.zero_walk_ok(u, v, i):
                return True
        seen = {(i, start_budget) for i in ucells}
        frontier = [(i, start_budget) for i in ucells]
        for _ in range(self.s.k):
            nxt = []
            for ci, bud in frontier:
                for _d, e, ti in self.steps[ci]:
                    j = pos.get(e)
                    if j is None or bud[j] == 0:
                        continue
                    nb = bud[:j] + (bud[j] - 1,) + bud[j + 1 :]
                    state = (ti, nb)
                    if state in seen:
                        continue
                    if ti in vcells:
                        return True
                    seen.add(state)
                    nxt.append(state)
            if not nxt:
                return False
            frontier = nxt
        return False

    def least_witness(
        self, u: NodeId, v: NodeId
    ) -> tuple[Optional[InsertionWitness], bool]:
        """Enumerate surviving walks in lexicographic order.

        Returns (witness or None, enumeration capped).  The first
        candidate passing the realization gate wins; with S in the style
        a candidate failing it is skipped, otherwise it is returned with
        its realization status recorded.
        """
        p, s = self.p, self.s
        eff0 = self.budget(u, v)
        order = sorted(eff0)
        pos = {e: i for i, e in enumerate(order)}
        start_budget = tuple(eff0[e] for e in order)
        ucells = sorted(set(self.incident.get(u, [])), key=lambda i: self.cells[i].id)
        vcells = set(self.incident.get(v, []))
        dist = self._distance_to(vcells)
        want_simple = "S" in s.restrictions

        heap: list[tuple[tuple[DartId, ...], int, int, tuple[int, ...]]] = []
        for ci in ucells:
            heapq.heappush(heap, ((), self.cells[ci].id, ci, start_budget))
        candidates = 0
        pops = 0
        while heap:
            pops += 1
            if pops > _MAX_POPS or candidates > _MAX_CANDIDATES:
                return None, True
            path, start_id, ci, bud = heapq.heappop(heap)
            if ci in vcells and (path or self.zero_walk_ok(u, v, ci)):
                candidates += 1
                start_i = next(
                    i for i, c in enumerate(self.cells) if c.id == start_id
                )
                simple = _simple_realization(p, u, v, start_i, path, self)
                status = SIMPLE if simple else NOT_CHECKED_SIMPLE
                if simple or not want_simple:
                    w = InsertionWitness(
                        endpoints=(u, v),
                        walk=tuple((d, p.edge_of(d)) for d in path),
                        start_cell=start_id,
                        end_cell=self.cells[ci].id,
                        needs_simple_realization=want_simple,
                        realization_status=status,
                    )
                    return w, False
            room = s.k - len(path)
            if room <= 0 or dist.get(ci, s.k + 1) > room:
                continue
            for d, e, ti in self.steps[ci]:
                j = pos.get(e)
                if j is None or bud[j] == 0:
                    continue
                if dist.get(ti, s.k + 1) > room - 1:
                    continue
                nb = bud[:j] + (bud[j] - 1,) + bud[j + 1 :]
                heapq.heappush(heap, (path + (d,), start_id, ti, nb))
        return None, False

    def _distance_to(self, targets: set[int]) -> dict[int, int]:
        """Unweighted cell distance ignoring budgets; a lower bound."""
        dist = {i: 0 for i in targets}
        dq = deque(targets)
        while dq:
            ci = dq.popleft()
            for _d, _e, ti in self.steps[ci]:
                if ti not in dist:
                    dist[ti] = dist[ci] + 1
                    dq.append(ti)
        return dist


def _simple_realization(
    p: Planarization,
    u: NodeId,
    v: NodeId,
    start_cell_i: int,
    path: tuple[DartId, ...],
    oracle: _Oracle,
) -> bool:
    """Greedy test that the walk's chords can be drawn without the new
    edge crossing itself.

    Crossing points on a multiply-crossed segment are ordered along the
    segment in walk order; within each visited cell the chords must
    either be alone, or lie on one boundary walk without interleaving.
    Failure means "not certified", not "impossible".
    """
    cells = oracle.cells
    # visited cell sequence and chord endpoints per visit
    visit_cells = [start_cell_i]
    for d in path:
        visit_cells.append(oracle.cell_idx[id(p.cell_left_of(p.twin(d)))])

    # order crossing points along each segment greedily, in walk order
    seg_hits: dict[DartId, list[int]] = {}
    seg_ref: dict[DartId, DartId] = {}
    for t, d in enumerate(path):
        key = min(d, p.twin(d))
        seg_ref.setdefault(key, d)
        seg_hits.setdefault(key, []).append(t)

    def cross_point(t: int, side_dart: DartId) -> tuple[str, DartId, int]:
        key = min(side_dart, p.twin(side_dart))
        hits = seg_hits[key]
        rank = hits.index(t)
        if oracle.p.twin(seg_ref[key]) == side_dart:
            rank = len(hits) - 1 - rank
        return ("x", side_dart, rank)

    ends: list[list[tuple]] = [[] for _ in visit_cells]
    ends[0].append(("vtx", u))
    for t, d in enumerate(path):
        ends[t].append(cross_point(t, d))
        ends[t + 1].append(cross_point(t, p.twin(d)))
    ends[-1].append(("vtx", v))

    by_cell: dict[int, list[tuple[tuple, tuple]]] = {}
    for i, ci in enumerate(visit_cells):
        by_cell.setdefault(ci, []).append((ends[i][0], ends[i][1]))

    for ci, chords in by_cell.items():
        if len(chords) == 1:
            continue
        cell = cells[ci]
        keyed = []
        for a, b in chords:
            ka = _boundary_key(p, cell, a)
            kb = _boundary_key(p, cell, b)
            if ka is None or kb is None:
                return False  # interior endpoint among several chords
            keyed.append((ka, kb))
        walks = {ka[0] for ka, kb in keyed} | {kb[0] for ka, kb in keyed}
        if len(walks) > 1:
            return False  # chords spread over several boundary walks
        flat = [(ka[1:], kb[1:]) for ka, kb in keyed]
        ordered = sorted({x for ch in flat for x in ch})
        rank = {x: i for i, x in enumerate(ordered)}
        n = len(ordered)
        for i in range(len(flat)):
            for j in range(i + 1, len(flat)):
                a, b = rank[flat[i][0]], rank[flat[i][1]]
                c, d = rank[flat[j][0]], rank[flat[j][1]]
                inside_c = (c - a) % n < (b - a) % n
                inside_d = (d - a) % n < (b - a) % n
                if inside_c != inside_d:
                    return False
    return True


def _boundary_key(p: Planarization, cell: Cell, end: tuple) -> Optional[tuple]:
    """Position of a chord endpoint on the cell boundary.

    Darts sit at even slots, the corner following a dart at the next odd
    slot; crossing ranks order points within one dart's slot.  Interior
    endpoints (degree-0 vertices anchored in the cell) have no position.
    """
    if end[0] == "x":
        _, dart, rank = end
        for wi, walk in enumerate(cell.boundary_walks):
            if dart in walk:
                return (wi, 2 * walk.index(dart), rank)
        raise AssertionError("crossed dart missing from its cell boundary")
    _, vtx = end
    if p.degree(vtx) == 0:
        return None
    best = None
    for wi, walk in enumerate(cell.boundary_walks):
        for i, d in enumerate(walk):
            if p.head_of(d) == vtx:
                key = (wi, 2 * i + 1, 0)
                if best is None or key < best:
                    best = key
    return best


def check_saturated(p: Planarization, s: StyleSpec) -> SaturationVerdict:
    """Decide whether any new edge fits the drawing within style s.

    Examines every unordered pair of distinct graph vertices; a pair
    survives when a dual walk within all crossing budgets connects a
    cell incident to one endpoint to a cell incident to the other.  No
    surviving walk anywhere certifies SATURATED.  The reported witness
    is the lexicographically least by (u, v, walk).
    """
    verdict = check_style(p, s)
    if not verdict.in_style:
        codes = sorted({v.code for v in verdict.violations})
        raise NotInStyle(f"drawing violates the style: {', '.join(codes)}")

    oracle = _Oracle(p, s)
    verts = sorted(n for n in p.nodes() if p.kind(n) != CROSSING)
    notes: list[str] = []
    unknown = False
    for i, u in enumerate(verts):
        for v in verts[i + 1 :]:
            if not oracle.walk_exists(u, v):
                continue
            w, capped = oracle.least_witness(u, v)
            if w is not None:
                return SaturationVerdict(INSERTABLE, w, tuple(notes))
            unknown = True
            if capped:
                notes.append(
                    f"walk enumeration for ({u}, {v}) hit the search cap"
                )
            else:
                notes.append(
                    f"walks survive for ({u}, {v}) but none passed the"
                    " simple-realization check"
                )
    if unknown:
        return SaturationVerdict(UNKNOWN, None, tuple(notes))
    return SaturationVerdict(SATURATED, None, tuple(notes))


def verify_saturated_implies_filled(p: Planarization, s: StyleSpec) -> bool:
    """Saturated drawings must be filled; a False here is a kernel bug."""
    v = check_saturated(p, s)
    if v.status != SATURATED:
        raise PreconditionFailed(
            f"drawing is not saturated for {s} (got {v.status})"
        )
    return is_filled(p).filled
