"""Combinatorial drawings of loopless multigraphs, stored as planarizations.

A drawing is kept purely combinatorially: every crossing is an explicit
degree-4 node, and the curve system is a rotation system over darts
(half-segments).  Faces are orbits of ``sigma . twin`` under the left-face
convention with counterclockwise rotations.  Disconnected pieces and
degree-0 vertices are pinned into the cell structure by an anchor forest:
each dart-bearing component points, via a dart on its outward face, to a
dart of a different component whose left face hosts it (or to ``OUTER``
for the unbounded cell), and each degree-0 node points to its host cell
the same way.

Everything downstream (style checks, counting identities, saturation,
generators) works on top of this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

DartId = int
NodeId = int
EdgeId = int

VERTEX = "vertex"
CROSSING = "crossing"
ISOLATED = "isolated"
NODE_KINDS = frozenset({VERTEX, CROSSING, ISOLATED})


class _Outer:
    """Singleton sentinel naming the unbounded cell in anchor targets."""

    _instance: Optional["_Outer"] = None

    def __new__(cls) -> "_Outer":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OUTER"


OUTER = _Outer()

AnchorTarget = Union[DartId, _Outer]


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class KPlanarError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(KPlanarError):
    """A planarization failed validation; carries the report."""

    def __init__(self, report: "ValidationReport") -> None:
        self.report = report
        head = "; ".join(v.message for v in report.violations[:4])
        more = len(report.violations) - 4
        if more > 0:
            head += f" (+{more} more)"
        super().__init__(f"invalid planarization: {head}")


class TraceBroken(KPlanarError):
    """An edge's segment chain does not terminate properly at vertices."""


class AnchorCycle(KPlanarError):
    """The component nesting relation contains a cycle."""


class NotApplicable(KPlanarError):
    """An identity's applicability preconditions do not hold."""


class PreconditionFailed(KPlanarError):
    """A required precondition fails; the message names it."""


class UnsupportedStyle(KPlanarError):
    """The requested check lies outside the supported style regime."""


class NotInStyle(KPlanarError):
    """The drawing violates the style it was required to be in."""


class NotIncident(KPlanarError):
    """A cell/vertex incidence required by an operation does not hold."""


class BadParity(KPlanarError):
    """A generator was called with k of the wrong parity."""


class Unresolved(KPlanarError):
    """The extremal density for this style and k is an open problem."""


class GeneralizationUnverified(KPlanarError):
    """A pattern extension beyond cataloged parameters failed its gate."""


class BudgetExceeded(KPlanarError):
    """A bounded search ran out of budget; partial results attached."""

    def __init__(self, message: str, partial: Optional[list] = None) -> None:
        super().__init__(message)
        self.partial = partial if partial is not None else []


class DslSyntaxError(KPlanarError):
    """Parse error in the drawing DSL, with location."""

    def __init__(self, message: str, line: int, column: int = 0) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# Reports and value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One validation failure.

    Attributes:
        code: stable machine-readable identifier, e.g. ``"crossing-degree"``.
        message: human-readable description.
        where: offending dart/node/edge ids, if any.
    """

    code: str
    message: str
    where: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def raise_if_invalid(self) -> None:
        if self.violations:
            raise ValidationError(self)


@dataclass(frozen=True)
class EdgeTrace:
    """An original edge as its ordered walk of planarization segments.

    ``darts`` holds one dart per segment, oriented along the walk from
    ``endpoints[0]`` to ``endpoints[1]``.  ``crossings`` lists the interior
    crossing nodes in walk order, with multiplicity; a selfcrossing node
    appears twice and therefore contributes 2 to ``crossing_count``.
    """

    edge: EdgeId
    endpoints: tuple[NodeId, NodeId]
    darts: tuple[DartId, ...]
    crossings: tuple[NodeId, ...]

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    @property
    def segment_count(self) -> int:
        return len(self.darts)

    def is_selfcrossing(self) -> bool:
        return len(set(self.crossings)) < len(self.crossings)


@dataclass(frozen=True)
class Cell:
    """A face of the full drawing: planarization faces glued across anchors.

    Attributes:
        id: minimum boundary dart id, or -1 for a bare unbounded cell.
        boundary_walks: one closed dart walk per planarization face in the
            cell, each rotated to start at its minimum dart.
        interior_nodes: degree-0 nodes anchored inside this cell.
        incident_vertices: graph vertices on the boundary walks plus the
            interior degree-0 nodes (crossing nodes are never included).
        corner_multiplicity: graph-vertex appearances along the walks plus
            one per interior node; distinct from ``len(incident_vertices)``
            only when some vertex meets the cell in several corners.
        is_outer: whether this cell is the unbounded one.
    """

    id: int
    boundary_walks: tuple[tuple[DartId, ...], ...]
    interior_nodes: tuple[NodeId, ...]
    incident_vertices: frozenset[NodeId]
    corner_multiplicity: int
    is_outer: bool

    def boundary_darts(self) -> frozenset[DartId]:
        return frozenset(d for walk in self.boundary_walks for d in walk)


@dataclass(frozen=True)
class ConnectivityReport:
    """Connectivity facts about a drawing.

    ``planarization_cut_nodes`` may contain crossing nodes; the drawing's
    cut-vertices are the graph vertices cut in both the multigraph and the
    planarization.
    """

    components: tuple[frozenset[NodeId], ...]
    graph_cut_vertices: frozenset[NodeId]
    planarization_cut_nodes: frozenset[NodeId]
    drawing_cut_vertices: frozenset[NodeId]
    essentially_2_connected: bool


class _DSU:
    """Plain union-find over arbitrary hashable items."""

    def __init__(self) -> None:
        self._parent: dict = {}

    def find(self, x):
        parent = self._parent
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._parent[rb] = ra

    def groups(self) -> dict:
        out: dict = {}
        for x in list(self._parent):
            out.setdefault(self.find(x), []).append(x)
        return out


# ---------------------------------------------------------------------------
# Planarization
# ---------------------------------------------------------------------------


class Planarization:
    """A drawing, represented by its planarization.

    Instances are treated as immutable after construction; derived data
    (faces, cells, traces) is computed lazily and cached.  Construction
    does not validate; call :meth:`validate` or :meth:`require_valid`.

    Args:
        node_kind: node id to one of ``vertex`` / ``crossing`` / ``isolated``.
        dart_node: dart id to the node it emanates from.
        twin: dart involution (segment reversal).
        sigma: counterclockwise rotation successor at each node.
        segment_edge: dart to the original edge its segment belongs to.
        comp_anchor: outward dart of each dart-bearing component to a host
            dart of a different component, or ``OUTER``.
        vertex_anchor: each degree-0 node to a host dart or ``OUTER``.
        node_label: optional display names.
    """

    __slots__ = (
        "_kind",
        "_label",
        "_dart_node",
        "_twin",
        "_sigma",
        "_edge",
        "_comp_anchor",
        "_vertex_anchor",
        "__dict__",
    )

    def __init__(
        self,
        node_kind: Mapping[NodeId, str],
        dart_node: Mapping[DartId, NodeId],
        twin: Mapping[DartId, DartId],
        sigma: Mapping[DartId, DartId],
        segment_edge: Mapping[DartId, EdgeId],
        comp_anchor: Mapping[DartId, AnchorTarget],
        vertex_anchor: Mapping[NodeId, AnchorTarget],
        node_label: Optional[Mapping[NodeId, str]] = None,
    ) -> None:
        self._kind = dict(node_kind)
        self._label = dict(node_label or {})
        self._dart_node = dict(dart_node)
        self._twin = dict(twin)
        self._sigma = dict(sigma)
        self._edge = dict(segment_edge)
        self._comp_anchor = dict(comp_anchor)
        self._vertex_anchor = dict(vertex_anchor)

    @classmethod
    def empty(cls) -> "Planarization":
        return cls({}, {}, {}, {}, {}, {}, {})

    # -- raw accessors ------------------------------------------------------

    def nodes(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self._kind))

    def darts(self) -> tuple[DartId, ...]:
        return tuple(sorted(self._dart_node))

    def kind(self, n: NodeId) -> str:
        return self._kind[n]

    def label(self, n: NodeId) -> Optional[str]:
        return self._label.get(n)

    def node_of(self, d: DartId) -> NodeId:
        return self._dart_node[d]

    def twin(self, d: DartId) -> DartId:
        return self._twin[d]

    def sigma(self, d: DartId) -> DartId:
        return self._sigma[d]

    def edge_of(self, d: DartId) -> EdgeId:
        return self._edge[d]

    def head_of(self, d: DartId) -> NodeId:
        """Node a dart points to (the node of its twin)."""
        return self._dart_node[self._twin[d]]

    def phi(self, d: DartId) -> DartId:
        """Next dart along the face to the left of ``d``."""
        return self._sigma[self._twin[d]]

    @property
    def comp_anchor(self) -> Mapping[DartId, AnchorTarget]:
        return dict(self._comp_anchor)

    @property
    def vertex_anchor(self) -> Mapping[NodeId, AnchorTarget]:
        return dict(self._vertex_anchor)

    def raw_maps(self) -> tuple[dict, dict, dict, dict, dict, dict, dict, dict]:
        """Copies of all defining maps, for builders."""
        return (
            dict(self._kind),
            dict(self._dart_node),
            dict(self._twin),
            dict(self._sigma),
            dict(self._edge),
            dict(self._comp_anchor),
            dict(self._vertex_anchor),
            dict(self._label),
        )

    # -- basic derived quantities -------------------------------------------

    @cached_property
    def _node_darts(self) -> dict[NodeId, list[DartId]]:
        out: dict[NodeId, list[DartId]] = {n: [] for n in self._kind}
        for d, n in self._dart_node.items():
            out[n].append(d)
        return out

    def degree(self, n: NodeId) -> int:
        return len(self._node_darts[n])

    def rotation(self, n: NodeId) -> tuple[DartId, ...]:
        """Darts at ``n`` in counterclockwise order, starting at the least."""
        ds = self._node_darts[n]
        if not ds:
            return ()
        start = min(ds)
        out = [start]
        cur = self._sigma[start]
        while cur != start:
            out.append(cur)
            cur = self._sigma[cur]
        return tuple(out)

    def vertices(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes() if self._kind[n] == VERTEX)

    def crossing_nodes(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes() if self._kind[n] == CROSSING)

    def isolated_nodes(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes() if self._kind[n] == ISOLATED)

    def degree_zero_nodes(self) -> tuple[NodeId, ...]:
        return tuple(n for n in self.nodes() if not self._node_darts[n])

    def edges(self) -> tuple[EdgeId, ...]:
        return tuple(sorted(set(self._edge.values())))

    @property
    def num_edges(self) -> int:
        return len(set(self._edge.values()))

    @property
    def num_vertices(self) -> int:
        """Graph vertices: real plus isolated (crossings excluded)."""
        return sum(1 for k in self._kind.values() if k != CROSSING)

    @property
    def num_crossings(self) -> int:
        return sum(1 for k in self._kind.values() if k == CROSSING)

    @property
    def num_segments(self) -> int:
        return len(self._dart_node) // 2

    # -- faces ---------------------------------------------------------------

    @cached_property
    def faces(self) -> tuple[tuple[DartId, ...], ...]:
        """Orbits of ``phi``, each rotated to start at its least dart."""
        seen: set[DartId] = set()
        out: list[tuple[DartId, ...]] = []
        for d in sorted(self._dart_node):
            if d in seen:
                continue
            orbit = [d]
            seen.add(d)
            cur = self.phi(d)
            while cur != d:
                orbit.append(cur)
                seen.add(cur)
                cur = self.phi(cur)
            k = orbit.index(min(orbit))
            out.append(tuple(orbit[k:] + orbit[:k]))
        return tuple(sorted(out))

    @cached_property
    def _face_index_of_dart(self) -> dict[DartId, int]:
        out = {}
        for i, f in enumerate(self.faces):
            for d in f:
                out[d] = i
        return out

    def face_of(self, d: DartId) -> tuple[DartId, ...]:
        return self.faces[self._face_index_of_dart[d]]

    # -- components ----------------------------------------------------------

    @cached_property
    def components(self) -> tuple[frozenset[NodeId], ...]:
        """Connected components of the planarization, singletons included."""
        dsu = _DSU()
        for n in self._kind:
            dsu.find(n)
        for d, t in self._twin.items():
            dsu.union(self._dart_node[d], self._dart_node[t])
        groups = dsu.groups()
        return tuple(
            sorted((frozenset(g) for g in groups.values()), key=min)
        )

    @cached_property
    def _component_of(self) -> dict[NodeId, int]:
        out = {}
        for i, comp in enumerate(self.components):
            for n in comp:
                out[n] = i
        return out

    def component_of(self, n: NodeId) -> int:
        return self._component_of[n]

    def dart_component_count(self) -> int:
        return sum(1 for c in self.components if any(self._node_darts[n] for n in c))

    # -- cells ----------------------------------------------------------------

    _OUTER_SLOT = -1

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        """Faces merged across the anchor forest, plus the unbounded cell."""
        dsu = _DSU()
        dsu.find(self._OUTER_SLOT)
        for i in range(len(self.faces)):
            dsu.find(i)
        fidx = self._face_index_of_dart
        for key_dart, target in self._comp_anchor.items():
            a = fidx[key_dart]
            b = self._OUTER_SLOT if isinstance(target, _Outer) else fidx[target]
            dsu.union(a, b)
        interior: dict[int, list[NodeId]] = {}
        for n, target in self._vertex_anchor.items():
            slot = self._OUTER_SLOT if isinstance(target, _Outer) else fidx[target]
            interior.setdefault(dsu.find(slot), []).append(n)

        cells: list[Cell] = []
        for root, members in dsu.groups().items():
            face_ids = sorted(i for i in members if i != self._OUTER_SLOT)
            walks = tuple(self.faces[i] for i in face_ids)
            inside = tuple(sorted(interior.get(root, ())))
            verts = set(inside)
            corners = len(inside)
            for walk in walks:
                for d in walk:
                    n = self._dart_node[d]
                    if self._kind[n] != CROSSING:
                        verts.add(n)
                        corners += 1
            cells.append(
                Cell(
                    id=min(walks[0]) if walks else -1,
                    boundary_walks=walks,
                    interior_nodes=inside,
                    incident_vertices=frozenset(verts),
                    corner_multiplicity=corners,
                    is_outer=(self._OUTER_SLOT in members),
                )
            )
        cells.sort(key=lambda c: c.id)
        return tuple(cells)

    @cached_property
    def _cell_of_dart(self) -> dict[DartId, Cell]:
        out = {}
        for c in self.cells:
            for d in c.boundary_darts():
                out[d] = c
        return out

    def cell_left_of(self, d: DartId) -> Cell:
        """The cell containing the face to the left of ``d``."""
        return self._cell_of_dart[d]

    def outer_cell(self) -> Cell:
        for c in self.cells:
            if c.is_outer:
                return c
        raise KPlanarError("no unbounded cell; anchors are inconsistent")

    def cell_containing(self, n: NodeId) -> Cell:
        """The cell a degree-0 node floats in."""
        for c in self.cells:
            if n in c.interior_nodes:
                return c
        raise NotIncident(f"node {n} is not an interior occupant of any cell")

    # -- edge traces -----------------------------------------------------------

    @cached_property
    def traces(self) -> tuple[EdgeTrace, ...]:
        """All edges as walks of segments.

        Raises:
            TraceBroken: if some edge's segments do not chain into a single
                walk between two non-crossing endpoints.
        """
        by_edge: dict[EdgeId, list[DartId]] = {}
        for d, e in self._edge.items():
            by_edge.setdefault(e, []).append(d)
        out = []
        for e in sorted(by_edge):
            out.append(self._trace_one(e, by_edge[e]))
        return tuple(out)

    def _trace_one(self, e: EdgeId, edge_darts: list[DartId]) -> EdgeTrace:
        ends = sorted(
            d for d in edge_darts if self._kind[self._dart_node[d]] != CROSSING
        )
        if len(ends) != 2:
            raise TraceBroken(
                f"edge {e} has {len(ends)} endpoint darts, expected 2"
            )
        start = ends[0]
        walk = [start]
        crossings: list[NodeId] = []
        cur = start
        limit = len(edge_darts)
        while True:
            arrive = self._twin[cur]
            n = self._dart_node[arrive]
            if self._kind[n] != CROSSING:
                break
            crossings.append(n)
            cur = self._sigma[self._sigma[arrive]]
            if self._edge.get(cur) != e:
                raise TraceBroken(
                    f"edge {e} changes label when passing crossing {n}"
                )
            walk.append(cur)
            if len(walk) > limit:
                raise TraceBroken(f"edge {e} trace does not terminate")
        if 2 * len(walk) != len(edge_darts):
            raise TraceBroken(
                f"edge {e} has orphan segments off its endpoint-to-endpoint walk"
            )
        u = self._dart_node[start]
        v = self._dart_node[self._twin[walk[-1]]]
        return EdgeTrace(
            edge=e, endpoints=(u, v), darts=tuple(walk), crossings=tuple(crossings)
        )

    @cached_property
    def _trace_by_edge(self) -> dict[EdgeId, EdgeTrace]:
        return {t.edge: t for t in self.traces}

    def trace_of(self, e: EdgeId) -> EdgeTrace:
        return self._trace_by_edge[e]

    def edge_endpoints(self, e: EdgeId) -> tuple[NodeId, NodeId]:
        return self.trace_of(e).endpoints

    def vertex_edges(self, v: NodeId) -> tuple[EdgeId, ...]:
        return tuple(t.edge for t in self.traces if v in t.endpoints)

    # -- connectivity ------------------------------------------------------------

    def connectivity(self) -> ConnectivityReport:
        """Components, cut-vertices, and the essentially-2-connected flag.

        A graph vertex is a cut-vertex of the drawing when it cuts both the
        abstract multigraph and the planarization.  The drawing counts as
        essentially 2-connected when it has at least one edge, no drawing
        cut-vertex, and at most one component carrying edges.
        """
        p_adj: dict[NodeId, set[NodeId]] = {n: set() for n in self._kind}
        for d, t in self._twin.items():
            a, b = self._dart_node[d], self._dart_node[t]
            if a != b:
                p_adj[a].add(b)
                p_adj[b].add(a)
        g_adj: dict[NodeId, set[NodeId]] = {
            n: set() for n, k in self._kind.items() if k != CROSSING
        }
        for t in self.traces:
            u, v = t.endpoints
            if u != v:
                g_adj[u].add(v)
                g_adj[v].add(u)

        p_cuts = frozenset(_cut_nodes(p_adj))
        g_cuts = frozenset(_cut_nodes(g_adj))
        drawing_cuts = frozenset(
            n for n in g_cuts & p_cuts if self._kind[n] == VERTEX
        )
        ess2 = (
            self.num_edges >= 1
            and not drawing_cuts
            and self.dart_component_count() <= 1
        )
        return ConnectivityReport(
            components=self.components,
            graph_cut_vertices=g_cuts,
            planarization_cut_nodes=p_cuts,
            drawing_cut_vertices=drawing_cuts,
            essentially_2_connected=ess2,
        )

    @property
    def essentially_2_connected(self) -> bool:
        return self.connectivity().essentially_2_connected

    # -- validation ---------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check every structural invariant; violations become report entries.

        Never raises on malformed input.  Derived accessors such as
        :attr:`faces` and :attr:`cells` assume a valid instance and may
        fail arbitrarily on an invalid one, so gate on this first.
        """
        v: list[Violation] = []
        add = lambda code, msg, *where: v.append(Violation(code, msg, where))

        darts = set(self._dart_node)
        for n, k in self._kind.items():
            if k not in NODE_KINDS:
                add("bad-node-kind", f"node {n} has unknown kind {k!r}", n)
        for d, n in self._dart_node.items():
            if n not in self._kind:
                add("dart-node-missing", f"dart {d} emanates from unknown node {n}", d)

        # twin: involution without fixed points, total on darts
        for d in darts:
            t = self._twin.get(d)
            if t is None or t not in darts:
                add("twin-missing", f"dart {d} has no valid twin", d)
            elif t == d:
                add("twin-fixed-point", f"dart {d} is its own twin", d)
            elif self._twin.get(t) != d:
                add("twin-not-involution", f"twin(twin({d})) != {d}", d)
        if set(self._twin) != darts:
            extra = set(self._twin) - darts
            if extra:
                add("twin-domain", f"twin defined on unknown darts {sorted(extra)}")

        # sigma: permutation of darts whose cycles stay at one node
        if set(self._sigma) != darts or set(self._sigma.values()) != darts:
            add("sigma-not-permutation", "sigma is not a permutation of the darts")
        else:
            for d in darts:
                if self._dart_node[self._sigma[d]] != self._dart_node[d]:
                    add(
                        "sigma-crosses-nodes",
                        f"sigma moves dart {d} to another node",
                        d,
                    )

        # segment labels: total, twin-consistent
        for d in darts:
            if d not in self._edge:
                add("segment-edge-missing", f"dart {d} has no edge label", d)
        for d in darts:
            t = self._twin.get(d)
            if (
                t in darts
                and d in self._edge
                and t in self._edge
                and self._edge[d] != self._edge[t]
            ):
                add(
                    "segment-edge-mismatch",
                    f"darts {d},{t} of one segment carry different edges",
                    d,
                    t,
                )

        if v:
            return ValidationReport(tuple(v))  # degrees/traces need sane maps

        # degrees by kind
        for n, k in self._kind.items():
            deg = len(self._node_darts[n])
            if k == CROSSING and deg != 4:
                add("crossing-degree", f"crossing {n} has degree {deg} != 4", n)
            if k == ISOLATED and deg != 0:
                add("isolated-degree", f"isolated node {n} has degree {deg}", n)

        # proper crossings: opposite darts continue the same edge
        for n, k in self._kind.items():
            if k != CROSSING or len(self._node_darts[n]) != 4:
                continue
            rot = self.rotation(n)
            if self._edge[rot[0]] != self._edge[rot[2]] or (
                self._edge[rot[1]] != self._edge[rot[3]]
            ):
                add(
                    "improper-crossing",
                    f"crossing {n} pairs darts of mismatched edges",
                    n,
                )

        # traces: chains terminate, cover their edge, endpoints distinct
        by_edge: dict[EdgeId, list[DartId]] = {}
        for d, e in self._edge.items():
            by_edge.setdefault(e, []).append(d)
        for e, eds in sorted(by_edge.items()):
            try:
                tr = self._trace_one(e, eds)
            except TraceBroken as exc:
                add("trace-broken", str(exc), e)
                continue
            if tr.endpoints[0] == tr.endpoints[1]:
                add("loop-edge", f"edge {e} is a loop at {tr.endpoints[0]}", e)

        # anchors
        v.extend(self._validate_anchors())

        # per-component Euler relation on the sphere
        if not any(x.code in ("trace-broken",) for x in v):
            face_comp: dict[int, int] = {}
            try:
                for i, f in enumerate(self.faces):
                    face_comp[i] = self._component_of[self._dart_node[f[0]]]
            except KeyError:
                face_comp = {}
            counts: dict[int, list[int]] = {}
            for ci, comp in enumerate(self.components):
                comp_darts = [d for n in comp for d in self._node_darts[n]]
                if not comp_darts:
                    continue
                counts[ci] = [len(comp), len(comp_darts) // 2, 0]
            for i, ci in face_comp.items():
                if ci in counts:
                    counts[ci][2] += 1
            for ci, (nv, ne, nf) in counts.items():
                if nv - ne + nf != 2:
                    add(
                        "euler-genus",
                        f"component {ci} violates V-E+F=2 "
                        f"({nv}-{ne}+{nf}={nv - ne + nf})",
                        ci,
                    )

        return ValidationReport(tuple(v))

    def _validate_anchors(self) -> list[Violation]:
        v: list[Violation] = []
        add = lambda code, msg, *where: v.append(Violation(code, msg, where))
        darts = set(self._dart_node)

        dart_comps = {
            i
            for i, comp in enumerate(self.components)
            if any(self._node_darts[n] for n in comp)
        }
        keyed: dict[int, DartId] = {}
        for key_dart, target in self._comp_anchor.items():
            if key_dart not in darts:
                add("anchor-dangling", f"anchor key dart {key_dart} does not exist")
                continue
            ci = self._component_of[self._dart_node[key_dart]]
            if ci in keyed:
                add(
                    "anchor-duplicate",
                    f"component of dart {key_dart} anchored twice",
                    key_dart,
                )
            keyed[ci] = key_dart
            if isinstance(target, _Outer):
                continue
            if target not in darts:
                add(
                    "anchor-dangling",
                    f"anchor target dart {target} does not exist",
                    key_dart,
                )
            elif self._component_of[self._dart_node[target]] == ci:
                add(
                    "anchor-self",
                    f"component anchored to its own dart {target}",
                    key_dart,
                )
        for ci in dart_comps - set(keyed):
            add(
                "anchor-missing",
                f"component {ci} (node {min(self.components[ci])}) has no anchor",
                ci,
            )

        deg0 = set(self.degree_zero_nodes())
        for n, target in self._vertex_anchor.items():
            if n not in self._kind:
                add("anchor-dangling", f"anchor for unknown node {n}")
            elif n not in deg0:
                add("anchor-kind", f"node {n} has edges but carries a node anchor", n)
            if not isinstance(target, _Outer) and target not in darts:
                add("anchor-dangling", f"node {n} anchored to missing dart {target}", n)
        for n in deg0 - set(self._vertex_anchor):
            add("anchor-missing", f"degree-0 node {n} has no anchor", n)

        # acyclic nesting among components
        if not any(x.code in ("anchor-dangling", "anchor-duplicate") for x in v):
            succ: dict[int, Optional[int]] = {}
            for ci, key_dart in keyed.items():
                target = self._comp_anchor[key_dart]
                succ[ci] = (
                    None
                    if isinstance(target, _Outer)
                    else self._component_of[self._dart_node[target]]
                )
            state: dict[int, int] = {}
            for start in succ:
                path = []
                cur: Optional[int] = start
                while cur is not None and state.get(cur, 0) == 0:
                    state[cur] = 1
                    path.append(cur)
                    cur = succ.get(cur)
                if cur is not None and state.get(cur) == 1:
                    add("anchor-cycle", f"component nesting cycles through {cur}")
                for x in path:
                    state[x] = 2
        return v

    @cached_property
    def is_valid(self) -> bool:
        return self.validate().ok

    def require_valid(self) -> "Planarization":
        self.validate().raise_if_invalid()
        return self

    # -- filling -------------------------------------------------------------------

    def add_isolated_in_empty_cells(self) -> "Planarization":
        """Drop one isolated vertex into every cell with no incident vertex."""
        empty = [c for c in self.cells if not c.incident_vertices]
        if not empty:
            return self
        kind, dn, tw, sg, se, ca, va, lb = self.raw_maps()
        nid = max(self._kind, default=-1) + 1
        for c in empty:
            kind[nid] = ISOLATED
            va[nid] = OUTER if c.is_outer else min(c.boundary_darts())
            nid += 1
        return Planarization(kind, dn, tw, sg, se, ca, va, lb)

    # -- deletion --------------------------------------------------------------------

    def delete_edge(self, e: EdgeId) -> "Planarization":
        """Remove edge ``e``, splicing other edges across its crossings.

        Every cell touching the removed curve merges into one; anchors are
        rebuilt from the merged cell structure.
        """
        tr = self.trace_of(e)
        dead_nodes = set(tr.crossings)
        dead_darts = {d for d in self._edge if self._edge[d] == e}
        dead_darts |= {d for d in self._dart_node if self._dart_node[d] in dead_nodes}

        touched: set[int] = set()
        cell_index = {id(c): i for i, c in enumerate(self.cells)}
        for d in tr.darts:
            touched.add(cell_index[id(self.cell_left_of(d))])
            touched.add(cell_index[id(self.cell_left_of(self._twin[d]))])

        kind, dn, tw, sg, se, ca, va, lb = self.raw_maps()

        # splice every other edge across the crossings it shared with e
        for other in sorted({self._edge[d] for d in self._dart_node} - {e}):
            ot = self.trace_of(other)
            if not dead_nodes & set(ot.crossings):
                continue
            run_start: Optional[DartId] = None
            for i, d in enumerate(ot.darts):
                last = i == len(ot.darts) - 1
                head = self.head_of(d)
                if run_start is None:
                    run_start = d
                if last or head not in dead_nodes:
                    if run_start != d:
                        a, b = run_start, self._twin[d]
                        tw[a] = b
                        tw[b] = a
                    run_start = None

        for d in dead_darts:
            if self._dart_node[d] not in dead_nodes:
                _rotation_remove(sg, d)
            dn.pop(d, None)
            sg.pop(d, None)
            se.pop(d, None)
            tw.pop(d, None)
        for n in dead_nodes:
            kind.pop(n, None)
            lb.pop(n, None)

        for u in set(tr.endpoints):
            if not any(nd == u for nd in dn.values()):
                kind[u] = ISOLATED

        return self._rebuild_after_surgery(
            kind, dn, tw, sg, se, lb, merged_cells=touched, new_floaters=set(tr.endpoints)
        )

    def delete_vertex(self, n: NodeId) -> "Planarization":
        """Remove a graph vertex together with all its edges."""
        if self._kind.get(n) == CROSSING:
            raise PreconditionFailed(f"node {n} is a crossing, not a graph vertex")
        p: Planarization = self
        while True:
            incident = [t.edge for t in p.traces if n in t.endpoints]
            if not incident:
                break
            p = p.delete_edge(incident[0])
        kind, dn, tw, sg, se, ca, va, lb = p.raw_maps()
        kind.pop(n, None)
        lb.pop(n, None)
        va.pop(n, None)
        return Planarization(kind, dn, tw, sg, se, ca, va, lb)

    def _rebuild_after_surgery(
        self,
        kind: dict,
        dn: dict,
        tw: dict,
        sg: dict,
        se: dict,
        lb: dict,
        merged_cells: set[int],
        new_floaters: set[NodeId],
    ) -> "Planarization":
        """Finish a structural edit: derive the new cell partition from the
        old one (all ``merged_cells`` fuse into a single class) and grow a
        fresh anchor forest for it."""
        cell_index = {id(c): i for i, c in enumerate(self.cells)}
        merged_key = ("merged",)

        def old_class(old_cell: Cell):
            i = cell_index[id(old_cell)]
            return merged_key if i in merged_cells else ("cell", i)

        shell = _Shell(kind, dn, tw, sg, se, lb)
        face_class = {}
        for fi, f in enumerate(shell.faces):
            classes = {old_class(self.cell_left_of(d)) for d in f if d in self._dart_node}
            if len(classes) != 1:
                raise KPlanarError(
                    f"surgery produced an inconsistent cell partition: {classes}"
                )
            face_class[fi] = classes.pop()

        iso_class = {}
        for n in shell.degree_zero_nodes():
            if n in new_floaters:
                iso_class[n] = merged_key
            else:
                iso_class[n] = old_class(self.cell_containing(n))

        outer_idx = cell_index[id(self.outer_cell())]
        outer_class = merged_key if outer_idx in merged_cells else ("cell", outer_idx)
        ca, va = build_anchor_forest(shell, face_class, iso_class, outer_class)
        return Planarization(kind, dn, tw, sg, se, ca, va, lb)


# ---------------------------------------------------------------------------
# Anchor forest reconstruction
# ---------------------------------------------------------------------------


class _Shell:
    """Rotation-system maps without anchors: just enough structure to
    compute faces and components while a drawing is being rebuilt."""

    def __init__(self, kind, dn, tw, sg, se, lb) -> None:
        self.kind = kind
        self.dart_node = dn
        self.twin = tw
        self.sigma = sg
        self.segment_edge = se
        self.label = lb
        self.faces = self._faces()
        self.face_of = {}
        for i, f in enumerate(self.faces):
            for d in f:
                self.face_of[d] = i
        self.comp_of = self._components()

    def _faces(self) -> list[tuple[DartId, ...]]:
        seen: set[DartId] = set()
        out = []
        for d in sorted(self.dart_node):
            if d in seen:
                continue
            orbit = [d]
            seen.add(d)
            cur = self.sigma[self.twin[d]]
            while cur != d:
                orbit.append(cur)
                seen.add(cur)
                cur = self.sigma[self.twin[cur]]
            k = orbit.index(min(orbit))
            out.append(tuple(orbit[k:] + orbit[:k]))
        return sorted(out)

    def _components(self) -> dict[NodeId, int]:
        dsu = _DSU()
        for n in self.kind:
            dsu.find(n)
        for d, t in self.twin.items():
            dsu.union(self.dart_node[d], self.dart_node[t])
        groups = dsu.groups()
        order = sorted(groups, key=lambda r: min(groups[r]))
        index = {r: i for i, r in enumerate(order)}
        return {n: index[dsu.find(n)] for n in self.kind}

    def degree_zero_nodes(self) -> list[NodeId]:
        present = set(self.dart_node.values())
        return [n for n in self.kind if n not in present]


def build_anchor_forest(
    shell: _Shell,
    face_class: Mapping[int, object],
    iso_class: Mapping[NodeId, object],
    outer_class: object,
) -> tuple[dict[DartId, AnchorTarget], dict[NodeId, AnchorTarget]]:
    """Construct a valid anchor forest realizing a known cell partition.

    On the sphere, the incidence graph between components and cells is a
    tree; rooting it at the unbounded cell yields, for every component, a
    unique parent cell, and for every cell a unique parent component.  The
    forest produced here anchors each component to its parent component's
    least dart on the shared cell (or to ``OUTER`` at the root), which is
    deterministic and acyclic by construction.

    Raises:
        KPlanarError: if the incidence structure is not a tree, which means
            the supplied partition does not describe a sphere drawing.
    """
    comp_faces: dict[int, set[int]] = {}
    for fi, f in enumerate(shell.faces):
        ci = shell.comp_of[shell.dart_node[f[0]]]
        comp_faces.setdefault(ci, set()).add(fi)

    cell_comps: dict[object, set[int]] = {outer_class: set()}
    comp_cells: dict[int, set[object]] = {}
    for ci, fis in comp_faces.items():
        for fi in fis:
            cls = face_class[fi]
            cell_comps.setdefault(cls, set()).add(ci)
            comp_cells.setdefault(ci, set()).add(cls)

    n_inc = sum(len(s) for s in cell_comps.values())
    if comp_faces and n_inc != len(cell_comps) + len(comp_faces) - 1:
        raise KPlanarError("component-cell incidences do not form a tree")

    # BFS the bipartite incidence tree from the unbounded cell
    parent_cell_of_comp: dict[int, object] = {}
    parent_comp_of_cell: dict[object, Optional[int]] = {outer_class: None}
    frontier: list[object] = [outer_class]
    seen_cells = {outer_class}
    seen_comps: set[int] = set()
    while frontier:
        nxt: list[object] = []
        for cls in frontier:
            for ci in sorted(cell_comps.get(cls, ())):
                if ci in seen_comps:
                    continue
                seen_comps.add(ci)
                parent_cell_of_comp[ci] = cls
                for sub in sorted(comp_cells[ci], key=repr):
                    if sub not in seen_cells:
                        seen_cells.add(sub)
                        parent_comp_of_cell[sub] = ci
                        nxt.append(sub)
        frontier = nxt
    if len(seen_comps) != len(comp_faces):
        raise KPlanarError("cell partition is disconnected; not a sphere drawing")

    def comp_dart_on(ci: int, cls: object) -> DartId:
        return min(
            f[0]
            for fi in comp_faces[ci]
            if face_class[fi] == cls
            for f in (shell.faces[fi],)
        )

    comp_anchor: dict[DartId, AnchorTarget] = {}
    for ci, cls in parent_cell_of_comp.items():
        key = min(
            d
            for fi in comp_faces[ci]
            if face_class[fi] == cls
            for d in shell.faces[fi]
            if shell.comp_of[shell.dart_node[d]] == ci
        )
        up = parent_comp_of_cell[cls]
        comp_anchor[key] = OUTER if up is None else comp_dart_on(up, cls)

    vertex_anchor: dict[NodeId, AnchorTarget] = {}
    for n, cls in iso_class.items():
        up = parent_comp_of_cell.get(cls)
        if cls == outer_class and up is None:
            vertex_anchor[n] = OUTER
        elif up is not None:
            vertex_anchor[n] = comp_dart_on(up, cls)
        else:
            raise KPlanarError(f"floating node {n} assigned to unknown cell {cls!r}")
    return comp_anchor, vertex_anchor


def _rotation_remove(sigma: dict[DartId, DartId], d: DartId) -> None:
    """Unlink ``d`` from its rotation cycle in place."""
    prev = d
    while sigma[prev] != d:
        prev = sigma[prev]
    if prev == d:
        return
    sigma[prev] = sigma[d]


def _cut_nodes(adj: Mapping[NodeId, set[NodeId]]) -> set[NodeId]:
    """Nodes whose removal increases the component count (brute force)."""

    def count(skip: Optional[NodeId]) -> int:
        seen: set[NodeId] = set()
        comps = 0
        for start in adj:
            if start == skip or start in seen:
                continue
            comps += 1
            stack = [start]
            seen.add(start)
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y != skip and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return comps

    base = count(None)
    out = set()
    for n, nbrs in adj.items():
        if len(nbrs) >= 2 and count(n) > base:
            out.add(n)
    return out
