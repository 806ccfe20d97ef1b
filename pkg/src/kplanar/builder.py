"""Constructive surgery on planarizations.

The central tool is a pen: an edge is drawn segment by segment, starting
at a vertex, crossing existing segments one at a time, and ending at a
vertex.  Every intermediate state is itself a valid planarization (the
unfinished edge ends at a temporary degree-1 vertex), so style checks can
prune partial drawings during search.

Also here: realization of insertion witnesses produced by the saturation
oracle, and gluing of two drawings at a shared vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .core import (
    CROSSING,
    ISOLATED,
    OUTER,
    VERTEX,
    AnchorTarget,
    Cell,
    DartId,
    EdgeId,
    KPlanarError,
    NodeId,
    NotIncident,
    Planarization,
    PreconditionFailed,
    _Outer,
    _Shell,
    build_anchor_forest,
)

__all__ = [
    "PenState",
    "add_isolated",
    "begin_edge_at",
    "begin_edge_in_cell",
    "insert_edge",
    "glue",
]


# ---------------------------------------------------------------------------
# Cell bookkeeping across one surgical step
# ---------------------------------------------------------------------------


def _cell_indexer(
    p: Planarization,
) -> tuple[dict[int, int], Callable[[DartId], int]]:
    index = {id(c): i for i, c in enumerate(p.cells)}

    def of_dart(d: DartId) -> int:
        return index[id(p.cell_left_of(d))]

    return index, of_dart


def _classify_faces(
    old: Planarization,
    shell: _Shell,
    split_idx: Optional[int] = None,
    chord: Optional[tuple[DartId, DartId]] = None,
    seeds: Optional[Mapping[DartId, object]] = None,
    outer_dart: Optional[DartId] = None,
) -> tuple[dict[int, object], object, bool]:
    """Map every face of the edited shell to a cell class of the result.

    Faces inherit the cell of their surviving darts.  ``split_idx`` names
    the one old cell allowed to split in two; when the ``chord`` darts end
    up on distinct faces, those faces become the two fresh halves and
    everything still unresolved (boundary faces of sibling components,
    floating vertices) is pulled to a side by chasing its anchor dart.

    Returns the face classes, the class of the unbounded cell, and whether
    a split actually happened.
    """
    index, oc = _cell_indexer(old)
    old_darts = set(old.darts())

    labels: dict[int, object] = {}
    pending: list[int] = []
    for fi, f in enumerate(shell.faces):
        votes = set()
        for d in f:
            if d in old_darts:
                c = oc(d)
                if c != split_idx:
                    votes.add(c)
        if len(votes) > 1:
            raise KPlanarError(
                f"surgery produced inconsistent cell classes {sorted(votes)}"
            )
        if votes:
            labels[fi] = ("cell", votes.pop())
        else:
            pending.append(fi)

    split = False
    if chord is not None:
        f_left = shell.face_of[chord[0]]
        f_right = shell.face_of[chord[1]]
        split = f_left != f_right
        if split:
            if f_left in labels or f_right in labels:
                raise KPlanarError("a split side carries a foreign cell class")
            labels[f_left] = ("fresh", 0)
            labels[f_right] = ("fresh", 1)
            pending = [fi for fi in pending if fi not in (f_left, f_right)]

    for d, lab in (seeds or {}).items():
        fi = shell.face_of[d]
        labels[fi] = lab
        pending = [x for x in pending if x != fi]

    outer_idx = index[id(old.outer_cell())]
    if split and outer_idx == split_idx:
        if outer_dart is not None:
            fo = shell.face_of.get(outer_dart)
            lab = labels.get(fo)
            if lab not in (("fresh", 0), ("fresh", 1)):
                raise PreconditionFailed(
                    "outer_dart does not lie on a side of the split cell"
                )
            outer_label: object = lab
        else:
            outer_label = ("fresh", 0)
    else:
        outer_label = ("cell", outer_idx)

    if pending and not split:
        if split_idx is None:
            raise KPlanarError("unclassifiable faces outside any split context")
        for fi in pending:
            labels[fi] = ("cell", split_idx)
        pending = []

    if pending:
        # sibling components of the split cell: each follows its anchor dart
        anchor_of_comp: dict[int, AnchorTarget] = {}
        for kdart, target in old.comp_anchor.items():
            if kdart in shell.dart_node:
                anchor_of_comp[shell.comp_of[shell.dart_node[kdart]]] = target
        while pending:
            progressed = False
            still: list[int] = []
            for fi in pending:
                ci = shell.comp_of[shell.dart_node[shell.faces[fi][0]]]
                target = anchor_of_comp.get(ci)
                if isinstance(target, _Outer):
                    labels[fi] = outer_label
                    progressed = True
                    continue
                lab = (
                    labels.get(shell.face_of[target])
                    if target is not None and target in shell.face_of
                    else None
                )
                if lab is None:
                    still.append(fi)
                else:
                    labels[fi] = lab
                    progressed = True
            if still and not progressed:
                raise PreconditionFailed(
                    "cell split leaves nested content on an undetermined side"
                )
            pending = still

    return labels, outer_label, split


def _assemble(
    old: Planarization,
    shell: _Shell,
    labels: Mapping[int, object],
    outer_label: object,
    va_targets: Mapping[NodeId, AnchorTarget],
) -> Planarization:
    iso_class: dict[NodeId, object] = {}
    for n in shell.degree_zero_nodes():
        t = va_targets[n]
        if isinstance(t, _Outer):
            iso_class[n] = outer_label
        else:
            iso_class[n] = labels[shell.face_of[t]]
    ca, va = build_anchor_forest(shell, labels, iso_class, outer_label)
    return Planarization(
        shell.kind,
        shell.dart_node,
        shell.twin,
        shell.sigma,
        shell.segment_edge,
        ca,
        va,
        shell.label,
    )


def _fresh_ids(p: Planarization) -> tuple[NodeId, DartId, EdgeId]:
    nodes = p.nodes()
    darts = p.darts()
    edges = p.edges()
    return (
        (max(nodes) + 1) if nodes else 0,
        (max(darts) + 1) if darts else 0,
        (max(edges) + 1) if edges else 0,
    )


# ---------------------------------------------------------------------------
# The pen
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PenState:
    """An edge in mid-air: drawn from its origin up to a floating tip."""

    p: Planarization
    tip: NodeId
    edge: EdgeId
    origin: NodeId
    crossings_so_far: int

    @property
    def tip_dart(self) -> DartId:
        return self.p.rotation(self.tip)[0]

    def tip_cell(self) -> Cell:
        return self.p.cell_left_of(self.tip_dart)

    def frozen_piece_darts(self) -> tuple[DartId, DartId]:
        """The two darts of the piece currently being extended; crossing
        them is meaningless (the piece has no settled geometry yet)."""
        b = self.tip_dart
        return (self.p.twin(b), b)

    def crossable_darts(self) -> tuple[DartId, ...]:
        """Boundary darts of the tip's cell that the pen may cross next.

        The darts of the unfinished piece itself are included: crossing
        one of them pinches off a loop of the pen's own curve.
        """
        return tuple(sorted(self.tip_cell().boundary_darts()))

    # -- operations -----------------------------------------------------

    def cross(self, delta: DartId, outer_dart: Optional[DartId] = None) -> "PenState":
        """Extend the edge across the segment of ``delta``.

        ``delta`` must border the tip's cell on the tip's side; afterwards
        the tip sits in the cell on the other side of that segment.  When
        the new piece closes a loop against the pen's own component, the
        tip cell splits; if the split cell was unbounded the unbounded
        side defaults to the face of the piece's origin dart (override
        with ``outer_dart``).

        Crossing a dart of the unfinished piece itself is allowed: the
        piece is pinched into a loop that crosses the rest of the edge,
        and the chosen dart names the flank approached.
        """
        p = self.p
        b = self.tip_dart
        pi = p.twin(b)
        if delta not in set(p.darts()):
            raise PreconditionFailed(f"no such dart {delta}")
        tipcell = p.cell_left_of(b)
        if p.cell_left_of(delta) is not tipcell:
            raise PreconditionFailed(
                f"dart {delta} does not border the tip's cell on its side"
            )

        index, oc = _cell_indexer(p)
        split_idx = index[id(tipcell)]
        teardrop = delta in (pi, b)
        same_comp = (
            True
            if teardrop
            else p.component_of(p.node_of(delta)) == p.component_of(self.tip)
        )

        kind, dn, tw, sg, se, _ca, va, lb = p.raw_maps()
        x, d0, _ = _fresh_ids(p)
        d1, d2, b1, b2 = d0, d0 + 1, d0 + 2, d0 + 3
        tau = tw[delta]
        e_hit = se[delta]

        kind[x] = CROSSING
        for d in (d1, d2, b1, b2):
            dn[d] = x
        se[d1] = se[d2] = e_hit
        se[b1] = se[b2] = self.edge
        if teardrop:
            # pieces along the curve: origin side, the pinched loop, and
            # the continuation to the tip
            tw[pi], tw[d1] = d1, pi
            tw[d2], tw[b1] = b1, d2
            tw[b2], tw[b] = b, b2
            if delta == pi:
                sg[d2], sg[b2], sg[d1], sg[b1] = b2, d1, b1, d2
                chord = (pi, d2)
            else:
                sg[d2], sg[b1], sg[d1], sg[b2] = b1, d1, b2, d2
                chord = (pi, b1)
        else:
            tw[delta], tw[d1] = d1, delta
            tw[d2], tw[tau] = tau, d2
            tw[pi], tw[b1] = b1, pi
            tw[b2], tw[b] = b, b2
            # rotation at the new crossing: the crossed segment's darts
            # sit opposite each other, as do the pen's
            sg[d2], sg[b2], sg[d1], sg[b1] = b2, d1, b1, d2
            chord = (pi, b1)

        shell = _Shell(kind, dn, tw, sg, se, lb)
        labels, outer_label, split = _classify_faces(
            p, shell, split_idx=split_idx, chord=chord, outer_dart=outer_dart
        )
        if split != same_comp:
            raise KPlanarError("face split disagrees with component structure")
        newp = _assemble(p, shell, labels, outer_label, va)
        return PenState(
            p=newp,
            tip=self.tip,
            edge=self.edge,
            origin=self.origin,
            crossings_so_far=self.crossings_so_far
            + (2 if e_hit == self.edge else 1),
        )

    def end_at(
        self,
        v: NodeId,
        before: Optional[DartId] = None,
        outer_dart: Optional[DartId] = None,
    ) -> Planarization:
        """Land the edge on vertex ``v``, in the corner just before dart
        ``before`` in the rotation there (omit for a degree-0 node).

        The corner must face the tip's cell.  Ending on the pen's own
        component splits that cell in two; the unbounded side is chosen as
        in :meth:`cross`.
        """
        p = self.p
        if v == self.origin:
            raise PreconditionFailed("an edge may not be a loop at one vertex")
        if v == self.tip or p.kind(v) == CROSSING:
            raise PreconditionFailed(f"node {v} is not a vertex to land on")
        b = self.tip_dart
        pi = p.twin(b)
        tipcell = p.cell_left_of(b)
        index, oc = _cell_indexer(p)
        split_idx = index[id(tipcell)]

        deg0 = p.degree(v) == 0
        if deg0:
            if before is not None:
                raise PreconditionFailed("degree-0 landing takes no corner dart")
            if p.cell_containing(v) is not tipcell:
                raise NotIncident(f"node {v} floats outside the tip's cell")
        else:
            if before is None or p.node_of(before) != v:
                raise PreconditionFailed("corner dart must belong to the landing vertex")
            if p.cell_left_of(before) is not tipcell:
                raise NotIncident("landing corner does not face the tip's cell")

        same_comp = p.component_of(v) == p.component_of(self.tip)

        kind, dn, tw, sg, se, _ca, va, lb = p.raw_maps()
        dn[b] = v
        if deg0:
            sg[b] = b
            va.pop(v, None)
            if kind[v] == ISOLATED:
                kind[v] = VERTEX
        else:
            rot = p.rotation(v)
            pred = rot[rot.index(before) - 1]
            sg[pred] = b
            sg[b] = before
        kind.pop(self.tip)
        lb.pop(self.tip, None)

        shell = _Shell(kind, dn, tw, sg, se, lb)
        labels, outer_label, split = _classify_faces(
            p, shell, split_idx=split_idx, chord=(pi, b), outer_dart=outer_dart
        )
        if split != same_comp:
            raise KPlanarError("face split disagrees with component structure")
        return _assemble(p, shell, labels, outer_label, va).require_valid()

    def end_new_vertex(self) -> Planarization:
        """Let the tip solidify into a brand-new degree-1 vertex."""
        return self.p.require_valid()


def begin_edge_at(
    p: Planarization, v: NodeId, before: Optional[DartId] = None
) -> PenState:
    """Start drawing a new edge at vertex ``v``.

    ``before`` picks the corner: the first piece leaves ``v`` through the
    corner just before that dart in the rotation, into
    ``cell_left_of(before)``.  A degree-0 ``v`` needs no corner.
    """
    if p.kind(v) == CROSSING:
        raise PreconditionFailed(f"node {v} is a crossing, not a vertex")
    deg0 = p.degree(v) == 0
    if deg0 != (before is None):
        raise PreconditionFailed(
            "corner dart required exactly when the vertex has edges"
        )
    if not deg0 and p.node_of(before) != v:
        raise PreconditionFailed("corner dart must belong to the starting vertex")

    kind, dn, tw, sg, se, _ca, va, lb = p.raw_maps()
    t, d0, e = _fresh_ids(p)
    a, b = d0, d0 + 1
    kind[t] = VERTEX
    dn[a], dn[b] = v, t
    tw[a], tw[b] = b, a
    se[a] = se[b] = e
    sg[b] = b

    seeds: dict[DartId, object] = {}
    index, oc = _cell_indexer(p)
    if deg0:
        sg[a] = a
        seeds[a] = ("cell", index[id(p.cell_containing(v))])
        va.pop(v, None)
        if kind[v] == ISOLATED:
            kind[v] = VERTEX
    else:
        rot = p.rotation(v)
        pred = rot[rot.index(before) - 1]
        sg[pred] = a
        sg[a] = before

    shell = _Shell(kind, dn, tw, sg, se, lb)
    labels, outer_label, _ = _classify_faces(p, shell, seeds=seeds)
    newp = _assemble(p, shell, labels, outer_label, va)
    return PenState(p=newp, tip=t, edge=e, origin=v, crossings_so_far=0)


def begin_edge_in_cell(p: Planarization, cell_id: int) -> PenState:
    """Start a new edge at a brand-new vertex dropped into the given cell."""
    target = None
    for c in p.cells:
        if c.id == cell_id:
            target = c
            break
    if target is None:
        raise PreconditionFailed(f"no cell with id {cell_id}")

    kind, dn, tw, sg, se, _ca, va, lb = p.raw_maps()
    u, d0, e = _fresh_ids(p)
    t = u + 1
    a, b = d0, d0 + 1
    kind[u] = VERTEX
    kind[t] = VERTEX
    dn[a], dn[b] = u, t
    tw[a], tw[b] = b, a
    sg[a], sg[b] = a, b
    se[a] = se[b] = e

    cell_idx = next(i for i, c in enumerate(p.cells) if c is target)
    shell = _Shell(kind, dn, tw, sg, se, lb)
    labels, outer_label, _ = _classify_faces(
        p, shell, seeds={a: ("cell", cell_idx)}
    )
    newp = _assemble(p, shell, labels, outer_label, va)
    return PenState(p=newp, tip=t, edge=e, origin=u, crossings_so_far=0)


def add_isolated(p: Planarization, cell_id: int) -> Planarization:
    """Drop a single isolated vertex into the cell with the given id."""
    target = None
    for c in p.cells:
        if c.id == cell_id:
            target = c
            break
    if target is None:
        raise PreconditionFailed(f"no cell with id {cell_id}")
    kind, dn, tw, sg, se, ca, va, lb = p.raw_maps()
    n, _, _ = _fresh_ids(p)
    kind[n] = ISOLATED
    va[n] = OUTER if target.is_outer else min(target.boundary_darts())
    return Planarization(kind, dn, tw, sg, se, ca, va, lb)


# ---------------------------------------------------------------------------
# Witness realization
# ---------------------------------------------------------------------------


def insert_edge(
    p: Planarization,
    u: NodeId,
    v: NodeId,
    crossed: Sequence[DartId],
    start_cell_id: Optional[int] = None,
    end_cell_id: Optional[int] = None,
) -> Planarization:
    """Draw a new edge from ``u`` to ``v`` crossing the named segments in
    order.  Each entry of ``crossed`` is a dart of ``p`` whose cell (on
    the dart's own side) the edge passes through just before crossing it.

    Segments already split by an earlier step are tracked, so a witness
    may cross the same original segment several times.  The realization
    is greedy; it raises if no surviving piece of a requested segment
    borders the pen's current cell.
    """
    start = _corner_for(p, u, start_cell_id)
    pen = begin_edge_at(p, u, start)

    pieces: dict[DartId, list[DartId]] = {d: [d] for d in crossed}
    for step in crossed:
        boundary = set(pen.tip_cell().boundary_darts())
        candidates = [d for d in pieces[step] if d in boundary]
        if not candidates:
            raise KPlanarError(
                f"witness step at dart {step} is unreachable from the pen's cell"
            )
        hit = min(candidates)
        d2 = max(pen.p.darts()) + 2
        pen = pen.cross(hit)
        # the crossing split the segment; both halves on our side of it
        # remain usable for later steps through the same original segment
        pieces[step].append(d2)

    end = _corner_for(pen.p, v, end_cell_id, must_cell=pen.tip_cell())
    return pen.end_at(v, end)


def _corner_for(
    p: Planarization,
    v: NodeId,
    cell_id: Optional[int],
    must_cell: Optional[Cell] = None,
) -> Optional[DartId]:
    """A deterministic corner dart of ``v`` facing the requested cell."""
    if p.degree(v) == 0:
        return None
    want = must_cell
    if want is None and cell_id is not None:
        want = next((c for c in p.cells if c.id == cell_id), None)
        if want is None:
            raise PreconditionFailed(f"no cell with id {cell_id}")
    options = [d for d in p.rotation(v)]
    if want is not None:
        options = [d for d in options if p.cell_left_of(d) is want]
    if not options:
        raise NotIncident(f"vertex {v} has no corner on the requested cell")
    return min(options)


# ---------------------------------------------------------------------------
# Gluing
# ---------------------------------------------------------------------------


def glue(
    d1: Planarization,
    v1: NodeId,
    d2: Planarization,
    v2: NodeId,
    host_cell_id: int,
) -> Planarization:
    """Identify ``v2`` of ``d2`` with ``v1`` of ``d1``, nesting ``d2``
    inside the named cell of ``d1``.

    The host cell must be incident to ``v1``; when ``d2`` carries edges it
    must moreover have no other incident vertex, so one-vertex-per-cell
    survives the merge.  ``d2`` is re-rooted on the sphere so that its
    least cell incident to ``v2`` opens into the host cell.
    """
    if d1.kind(v1) == CROSSING or d2.kind(v2) == CROSSING:
        raise PreconditionFailed("gluing points must be graph vertices")
    host = next((c for c in d1.cells if c.id == host_cell_id), None)
    if host is None:
        raise PreconditionFailed(f"no cell with id {host_cell_id} in the host")
    if v1 not in host.incident_vertices:
        raise NotIncident(f"cell {host_cell_id} is not incident to vertex {v1}")
    if d2.num_edges >= 1 and host.incident_vertices != frozenset({v1}):
        raise PreconditionFailed(
            "host cell has other incident vertices; gluing would crowd it"
        )

    if len(d2.nodes()) == 1 and not d2.darts():
        return d1

    c2 = min(
        (c for c in d2.cells if v2 in c.incident_vertices),
        key=lambda c: c.id,
        default=None,
    )
    if c2 is None:
        raise NotIncident(f"vertex {v2} is incident to no cell of its drawing")

    node_off = max(d1.nodes()) + 1
    dart_off = (max(d1.darts()) + 1) if d1.darts() else 0
    edge_off = (max(d1.edges()) + 1) if d1.edges() else 0

    kind, dn, tw, sg, se, _ca1, va, lb = d1.raw_maps()
    k2, dn2, tw2, sg2, se2, _ca2, va2, lb2 = d2.raw_maps()

    def nmap(n: NodeId) -> NodeId:
        return v1 if n == v2 else n + node_off

    for n, kk in k2.items():
        if n != v2:
            kind[nmap(n)] = kk
            if n in lb2:
                lb[nmap(n)] = lb2[n]
    for d, n in dn2.items():
        dn[d + dart_off] = nmap(n)
    for d, t in tw2.items():
        tw[d + dart_off] = t + dart_off
    for d, s in sg2.items():
        sg[d + dart_off] = s + dart_off
    for d, e in se2.items():
        se[d + dart_off] = e + edge_off

    # splice the two rotations at the merged vertex
    deg1, deg2 = d1.degree(v1), d2.degree(v2)
    if deg1 and deg2:
        before1 = min(d for d in d1.rotation(v1) if d1.cell_left_of(d) is host)
        rot1 = d1.rotation(v1)
        pred1 = rot1[rot1.index(before1) - 1]
        before2 = min(d for d in d2.rotation(v2) if d2.cell_left_of(d) is c2)
        rot2 = d2.rotation(v2)
        pred2 = rot2[rot2.index(before2) - 1]
        sg[pred1] = before2 + dart_off
        sg[pred2 + dart_off] = before1
    if deg1 + deg2 >= 1:
        kind[v1] = VERTEX
        va.pop(v1, None)
    else:
        kind[v1] = VERTEX if VERTEX in (d1.kind(v1), d2.kind(v2)) else ISOLATED
    for n, t in va2.items():
        if n != v2:
            va[nmap(n)] = t if isinstance(t, _Outer) else t + dart_off

    # cell classes: d2's chosen cell pours into the host cell
    index1, oc1 = _cell_indexer(d1)
    index2, oc2 = _cell_indexer(d2)
    host_idx = index1[id(host)]
    c2_idx = index2[id(c2)]

    def lab2(i: int) -> object:
        return ("d1", host_idx) if i == c2_idx else ("d2", i)

    shell = _Shell(kind, dn, tw, sg, se, lb)
    labels: dict[int, object] = {}
    for fi, f in enumerate(shell.faces):
        votes = set()
        for d in f:
            if d >= dart_off:
                votes.add(lab2(oc2(d - dart_off)))
            else:
                votes.add(("d1", oc1(d)))
        if len(votes) != 1:
            raise KPlanarError(
                f"glue produced inconsistent cell classes {sorted(map(str, votes))}"
            )
        labels[fi] = votes.pop()

    outer_label = ("d1", index1[id(d1.outer_cell())])
    outer2_label = lab2(index2[id(d2.outer_cell())])
    iso_class: dict[NodeId, object] = {}
    for n in shell.degree_zero_nodes():
        t = va[n]
        if isinstance(t, _Outer):
            iso_class[n] = outer2_label if n >= node_off else outer_label
        else:
            iso_class[n] = labels[shell.face_of[t]]

    ca, va_new = build_anchor_forest(shell, labels, iso_class, outer_label)
    return Planarization(kind, dn, tw, sg, se, ca, va_new, lb).require_valid()
