"""Drawing styles: bounded crossings per edge plus optional restrictions.

A style is a crossing budget k together with a subset of four letters:

    S  selfcrossing-free   no edge crosses itself
    I  locally starlike    edges sharing an endpoint never cross
    M  single-crossing     each edge pair crosses at most once,
                           each edge selfcrosses at most once
    H  homotopy-free       no two parallel edges bound a vertex-free disk

H is only decidable here in combination with S, I and M; anything else
raises UnsupportedStyle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    CROSSING,
    EdgeId,
    KPlanarError,
    NodeId,
    Planarization,
    UnsupportedStyle,
    Violation,
)

__all__ = [
    "RESTRICTIONS",
    "StyleSpec",
    "StyleVerdict",
    "check_k_planar",
    "check_single_crossing",
    "check_locally_starlike",
    "check_selfcrossing_free",
    "check_homotopy_free",
    "check_style",
]

RESTRICTIONS = frozenset({"S", "I", "M", "H"})

_BRANCHING = frozenset({"S", "I", "M"})


@dataclass(frozen=True)
class StyleSpec:
    """A crossing budget and a set of restriction letters."""

    k: int
    restrictions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise KPlanarError(f"crossing budget must be positive, got {self.k}")
        object.__setattr__(self, "restrictions", frozenset(self.restrictions))
        bad = self.restrictions - RESTRICTIONS
        if bad:
            raise KPlanarError(f"unknown restriction letters {sorted(bad)}")

    def requires_branching(self) -> bool:
        return "H" in self.restrictions

    def __str__(self) -> str:
        letters = "".join(sorted(self.restrictions)) or "-"
        return f"k={self.k} restrict={letters}"


@dataclass(frozen=True)
class StyleVerdict:
    """Outcome of a style check, with one witness per violation."""

    in_style: bool
    violations: tuple[Violation, ...] = ()

    def __post_init__(self) -> None:
        if self.in_style != (not self.violations):
            raise KPlanarError("verdict flag disagrees with its violation list")

    @staticmethod
    def ok() -> "StyleVerdict":
        return StyleVerdict(True, ())

    @staticmethod
    def of(violations: list[Violation]) -> "StyleVerdict":
        return StyleVerdict(not violations, tuple(violations))


def check_k_planar(p: Planarization, k: int) -> StyleVerdict:
    """Every edge is crossed at most k times; selfcrossings count twice."""
    bad = []
    for e in p.edges():
        t = p.trace_of(e)
        if t.crossing_count > k:
            bad.append(
                Violation(
                    "k-planar",
                    f"edge {e} is crossed {t.crossing_count} times, budget {k}",
                    (e,),
                )
            )
    return StyleVerdict.of(bad)


def check_single_crossing(p: Planarization) -> StyleVerdict:
    """Each edge pair shares at most one crossing; each edge selfcrosses
    at most once."""
    seen: dict[tuple[EdgeId, EdgeId], NodeId] = {}
    bad = []
    flagged = set()
    for x in sorted(p.crossing_nodes()):
        pair = _crossing_passages_at(p, x)
        if pair in seen and pair not in flagged:
            kind = "selfcrossing" if pair[0] == pair[1] else "crossing"
            bad.append(
                Violation(
                    "single-crossing",
                    f"edges {pair[0]} and {pair[1]} share a second {kind}",
                    (pair[0], pair[1], seen[pair], x),
                )
            )
            flagged.add(pair)
        seen.setdefault(pair, x)
    return StyleVerdict.of(bad)


def _crossing_passages_at(p: Planarization, x: NodeId) -> tuple[EdgeId, EdgeId]:
    rot = p.rotation(x)
    e_a = p.edge_of(rot[0])
    e_b = p.edge_of(rot[1])
    return (min(e_a, e_b), max(e_a, e_b))


def check_locally_starlike(p: Planarization) -> StyleVerdict:
    """Distinct edges with a common endpoint never cross each other."""
    bad = []
    for x in sorted(p.crossing_nodes()):
        e_a, e_b = _crossing_passages_at(p, x)
        if e_a == e_b:
            continue  # selfcrossings are allowed here
        if set(p.edge_endpoints(e_a)) & set(p.edge_endpoints(e_b)):
            bad.append(
                Violation(
                    "locally-starlike",
                    f"incident edges {e_a} and {e_b} cross at {x}",
                    (e_a, e_b, x),
                )
            )
    return StyleVerdict.of(bad)


def check_selfcrossing_free(p: Planarization) -> StyleVerdict:
    """No edge passes through the same crossing twice."""
    bad = []
    for e in p.edges():
        t = p.trace_of(e)
        dup = sorted({x for x in t.crossings if t.crossings.count(x) > 1})
        if dup:
            bad.append(
                Violation(
                    "selfcrossing-free",
                    f"edge {e} crosses itself at {dup}",
                    (e, *dup),
                )
            )
    return StyleVerdict.of(bad)


def check_homotopy_free(p: Planarization) -> StyleVerdict:
    """No two parallel edges together bound a disk free of other vertices.

    Only defined for drawings that are selfcrossing-free and locally
    starlike: there each parallel pair forms a simple closed curve, and
    the pair is homotopic exactly when one side of that curve contains no
    real vertex besides the shared endpoints.
    """
    if not check_selfcrossing_free(p).in_style or not check_locally_starlike(p).in_style:
        raise UnsupportedStyle(
            "homotopy testing requires a selfcrossing-free, locally starlike drawing"
        )

    by_pair: dict[tuple[NodeId, NodeId], list[EdgeId]] = {}
    for e in p.edges():
        u, v = p.edge_endpoints(e)
        by_pair.setdefault((min(u, v), max(u, v)), []).append(e)

    bad = []
    for (u, v), es in sorted(by_pair.items()):
        if len(es) < 2:
            continue
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                if not _pair_non_homotopic(p, es[i], es[j], u, v):
                    bad.append(
                        Violation(
                            "homotopy-free",
                            f"parallel edges {es[i]} and {es[j]} are homotopic",
                            (es[i], es[j]),
                        )
                    )
    return StyleVerdict.of(bad)


def _pair_non_homotopic(
    p: Planarization, e1: EdgeId, e2: EdgeId, u: NodeId, v: NodeId
) -> bool:
    """Both sides of the closed curve e1+e2 hold a vertex besides u, v."""
    curve = {e1, e2}
    # face adjacency that refuses to step over the curve
    faces = p.faces
    fidx = {}
    for i, f in enumerate(faces):
        for d in f:
            fidx[d] = i
    adj: dict[int, set[int]] = {i: set() for i in range(len(faces))}
    for d in p.darts():
        if p.edge_of(d) in curve:
            continue
        a, b = fidx[d], fidx[p.twin(d)]
        adj[a].add(b)
        adj[b].add(a)
    # cells of one drawing component may be glued across anchors; walking
    # between boundary walks of one cell also never crosses the curve
    for c in p.cells:
        walks = [w for w in c.boundary_walks]
        for w in walks[1:]:
            a, b = fidx[walks[0][0]], fidx[w[0]]
            adj[a].add(b)
            adj[b].add(a)

    comp: dict[int, int] = {}
    for start in range(len(faces)):
        if start in comp:
            continue
        stack = [start]
        comp[start] = start
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in comp:
                    comp[nxt] = start
                    stack.append(nxt)

    sides = sorted({comp[i] for i in range(len(faces))})
    if len(sides) != 2:
        raise KPlanarError(
            f"curve of edges {e1},{e2} does not split the sphere in two"
        )

    # every cell is one region, so all its walks sit on one side; vertices
    # strictly off the curve (everything except u, v) inherit that side
    blockers: dict[int, int] = {s: 0 for s in sides}
    for c in p.cells:
        hosts = {comp[fidx[w[0]]] for w in c.boundary_walks}
        for n in c.incident_vertices:
            if n in (u, v):
                continue
            for s in hosts:
                blockers[s] += 1
    return all(blockers[s] > 0 for s in sides)


def check_style(p: Planarization, s: StyleSpec) -> StyleVerdict:
    """Conjunction of the k budget and every selected restriction."""
    if s.requires_branching() and not _BRANCHING <= s.restrictions:
        raise UnsupportedStyle(
            "homotopy-free styles are supported only together with S, I and M"
        )
    checks = [check_k_planar(p, s.k)]
    if "S" in s.restrictions:
        checks.append(check_selfcrossing_free(p))
    if "I" in s.restrictions:
        checks.append(check_locally_starlike(p))
    if "M" in s.restrictions:
        checks.append(check_single_crossing(p))
    if "H" in s.restrictions:
        s_ok = checks[1].in_style  # S ran just above
        i_ok = checks[2].in_style
        if s_ok and i_ok:
            checks.append(check_homotopy_free(p))
    bad = [v for c in checks for v in c.violations]
    return StyleVerdict.of(bad)
