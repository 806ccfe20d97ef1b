"""Canonical forms for planarizations.

Two drawings of the same abstract multigraph are considered equal when
their planarizations are isomorphic as labeled spheres: a bijection of
darts preserving twin, rotation (up to a global reflection), node kinds,
the grouping of segments into edges, and the placement of degree-0
nodes.  Which cell is unbounded is deliberately ignored; the canonical
form is a sphere invariant.

For a drawing with at most one dart-bearing component the form is exact:
equal forms if and only if isomorphic.  With several dart-bearing
components the form is conservative: equal forms still imply isomorphic
drawings, but symmetric arrangements of identical components may hash
differently.  Exactness there is never needed; search states are
connected.
"""

from __future__ import annotations

from typing import Callable, Optional

from .core import (
    CROSSING,
    ISOLATED,
    DartId,
    NodeId,
    Planarization,
    _Outer,
)

__all__ = ["canonical_form", "same_drawing"]

_KIND_CODE = {ISOLATED: 0, CROSSING: 2}  # vertices (the default) code as 1


def _kind_code(p: Planarization, n: NodeId) -> int:
    return _KIND_CODE.get(p.kind(n), 1)


def _orbit_code(
    p: Planarization,
    start: DartId,
    succ: Callable[[DartId], DartId],
) -> tuple[tuple, dict[DartId, int]]:
    """Relabel the component of ``start`` by traversal order and encode it."""
    ids: dict[DartId, int] = {start: 0}
    order: list[DartId] = [start]
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for nb in (p.twin(d), succ(d)):
            if nb not in ids:
                ids[nb] = len(order)
                order.append(nb)
    edge_rank: dict[int, int] = {}
    tw_enc, sg_enc, kd_enc, ed_enc = [], [], [], []
    for d in order:
        tw_enc.append(ids[p.twin(d)])
        sg_enc.append(ids[succ(d)])
        kd_enc.append(_kind_code(p, p.node_of(d)))
        e = p.edge_of(d)
        if e not in edge_rank:
            edge_rank[e] = len(edge_rank)
        ed_enc.append(edge_rank[e])
    code = (tuple(tw_enc), tuple(sg_enc), tuple(kd_enc), tuple(ed_enc))
    return code, ids


def _faces_under(
    darts: list[DartId],
    twin: Callable[[DartId], DartId],
    succ: Callable[[DartId], DartId],
) -> list[tuple[DartId, ...]]:
    seen: set[DartId] = set()
    faces = []
    for d in darts:
        if d in seen:
            continue
        walk = []
        cur = d
        while cur not in seen:
            seen.add(cur)
            walk.append(cur)
            cur = succ(twin(cur))
        faces.append(tuple(walk))
    return faces


def _floater_hosts(p: Planarization, mirrored: bool) -> dict[DartId, list[int]]:
    """Host dart -> [isolated count, plain-vertex count] for degree-0 nodes.

    A node anchored to the unbounded cell is hosted by the face of its
    component anchor's key dart; under reflection every face is carried
    to the twin image of itself.
    """
    outer_keys = {
        k for k, t in p.comp_anchor.items() if isinstance(t, _Outer)
    }
    hosts: dict[DartId, list[int]] = {}
    for n, t in p.vertex_anchor.items():
        if isinstance(t, _Outer):
            if not outer_keys:
                continue  # no dart-bearing component; handled separately
            d = min(outer_keys)
        else:
            d = t
        if mirrored:
            d = p.twin(d)
        slot = hosts.setdefault(d, [0, 0])
        slot[0 if p.kind(n) == ISOLATED else 1] += 1
    return hosts


def _component_form(
    p: Planarization,
    comp_darts: list[DartId],
    succ: Callable[[DartId], DartId],
    hosts: dict[DartId, list[int]],
) -> tuple[tuple, dict[frozenset, int]]:
    """Minimal encoding of one dart component under a fixed orientation.

    Returns the code and a map from each face (as a dart set, in this
    orientation) to its canonical face index under the minimizing start.
    """
    best: Optional[tuple] = None
    best_ids: Optional[dict[DartId, int]] = None
    for start in sorted(comp_darts):
        code, ids = _orbit_code(p, start, succ)
        # append degree-0 occupancy per face, in canonical face order
        faces = _faces_under(sorted(ids, key=ids.get), p.twin, succ)
        keyed = sorted(
            (min(ids[d] for d in f), f) for f in faces
        )
        occ = []
        for fi, (_, f) in enumerate(keyed):
            iso = sum(hosts.get(d, (0, 0))[0] for d in f)
            flo = sum(hosts.get(d, (0, 0))[1] for d in f)
            if iso or flo:
                occ.append((fi, iso, flo))
        full = code + (tuple(occ),)
        if best is None or full < best:
            best, best_ids = full, ids
    faces = _faces_under(sorted(best_ids, key=best_ids.get), p.twin, succ)
    keyed = sorted((min(best_ids[d] for d in f), f) for f in faces)
    face_index = {frozenset(f): fi for fi, (_, f) in enumerate(keyed)}
    return best, face_index


def canonical_form(p: Planarization) -> tuple:
    """A hashable sphere-level invariant of the drawing.

    Exact (iso iff equal) when at most one component carries darts.
    """
    darts = p.darts()
    if not darts:
        iso = sum(1 for n in p.nodes() if p.kind(n) == ISOLATED)
        return ("bare", iso, len(p.nodes()) - iso)

    comps = [list(c) for c in p.components if len(c) > 1 or p.degree(min(c))]
    comp_darts = [
        sorted(d for d in darts if p.node_of(d) in set(c)) for c in comps
    ]

    sigma_inv = {v: k for k, v in ((d, p.sigma(d)) for d in darts)}
    variants = []
    for mirrored, succ in ((False, p.sigma), (True, sigma_inv.__getitem__)):
        hosts = _floater_hosts(p, mirrored)
        forms = []
        face_maps = []
        for cd in comp_darts:
            form, fmap = _component_form(p, cd, succ, hosts)
            forms.append(form)
            face_maps.append(fmap)

        if len(forms) == 1:
            variants.append(("map", forms[0]))
            continue

        # conservative multi-component key: rank components, then record
        # which faces share a cell
        ranked = sorted(range(len(forms)), key=lambda i: (forms[i], min(comp_darts[i])))
        rank_of = {ci: r for r, ci in enumerate(ranked)}
        dart_comp = {}
        for ci, cd in enumerate(comp_darts):
            for d in cd:
                dart_comp[d] = ci
        cells_enc = []
        for c in p.cells:
            slots = []
            for walk in c.boundary_walks:
                fs = frozenset(walk if not mirrored else (p.twin(d) for d in walk))
                ci = dart_comp[next(iter(fs))]
                slots.append((rank_of[ci], face_maps[ci][fs]))
            iso = sum(1 for n in c.interior_nodes if p.kind(n) == ISOLATED)
            flo = len(c.interior_nodes) - iso
            cells_enc.append((tuple(sorted(slots)), iso, flo))
        variants.append(
            ("multi", tuple(forms[i] for i in ranked), tuple(sorted(cells_enc)))
        )
    return min(variants)


def same_drawing(p: Planarization, q: Planarization) -> bool:
    """Sphere-level isomorphism test via canonical forms."""
    return canonical_form(p) == canonical_form(q)
