"""Tight drawing families with minimum edge count, and bounded search.

Each generator returns a drawing in which every edge is crossed exactly
k times and every cell holds exactly one vertex, hitting the density
floor m = alpha * (n - 1) for its style.  Patterns beyond the verified
parameter range are extended speculatively and re-checked; a failed
check raises GeneralizationUnverified rather than returning a drawing
that was never certified.
"""

from __future__ import annotations

from dataclasses import dataclass

from .builder import PenState, add_isolated, begin_edge_at, begin_edge_in_cell, glue
from .canon import canonical_form
from .core import (
    BadParity,
    BudgetExceeded,
    GeneralizationUnverified,
    KPlanarError,
    Planarization,
    PreconditionFailed,
    UnsupportedStyle,
)
from .saturation import is_tight
from .styles import StyleSpec, check_style

__all__ = [
    "FamilyId",
    "CatalogEntry",
    "SearchResult",
    "family_style",
    "search_tight",
    "gen_spiral",
    "gen_odd_pair",
    "gen_weave",
    "gen_star",
    "gen_cycle",
    "gen_im",
    "gen_sim_matching",
    "generate",
    "load_catalog",
    "glue",
]


_CASES = (
    "Spiral",
    "OddPair",
    "Weave",
    "Star",
    "Cycle",
    "IM4",
    "IMMatching",
    "SIMMatching",
)

# Style each family is extremal for, by case name.
_CASE_RESTRICTIONS: dict[str, frozenset[str]] = {
    "Spiral": frozenset(),
    "OddPair": frozenset(),
    "Weave": frozenset("S"),
    "Star": frozenset("M"),
    "Cycle": frozenset("SM"),
    "IM4": frozenset("IM"),
    "IMMatching": frozenset("IM"),
    "SIMMatching": frozenset("SIM"),
}


@dataclass(frozen=True)
class FamilyId:
    """Names one member of one tight family: a case tag plus the k it is for."""

    case: str
    k: int

    def __post_init__(self) -> None:
        if self.case not in _CASES:
            raise KPlanarError(f"unknown family case {self.case!r}")
        k = self.k
        if self.case == "Spiral":
            if k < 4:
                raise PreconditionFailed("Spiral needs k >= 4")
            if k % 2 != 0:
                raise BadParity("Spiral exists for even k only")
        elif self.case == "OddPair":
            if k < 5:
                raise PreconditionFailed("OddPair needs k >= 5")
            if k % 2 != 1:
                raise BadParity("OddPair exists for odd k only")
        elif self.case == "IM4":
            if k != 4:
                raise PreconditionFailed("IM4 is a single drawing at k = 4")
        elif self.case == "IMMatching":
            if k < 5:
                raise PreconditionFailed("IMMatching needs k >= 5")
        elif self.case == "SIMMatching":
            if k < 7:
                raise PreconditionFailed("SIMMatching needs k >= 7")
        else:
            if k < 4:
                raise PreconditionFailed(f"{self.case} needs k >= 4")


def family_style(f: FamilyId) -> StyleSpec:
    """The style a family's drawings are tight for."""
    return StyleSpec(f.k, _CASE_RESTRICTIONS[f.case])


@dataclass(frozen=True)
class CatalogEntry:
    """A cataloged reference drawing: family, its data file, the parsed
    drawing, and the expected (m, n, cr) counts."""

    family: FamilyId
    source: str
    drawing: Planarization
    expected: tuple[int, int, int]


class SearchResult(list):
    """Tight in-style drawings found, one per sphere-symmetry class.

    ``exhaustive`` is True only when the search provably visited the whole
    space within its limits, so an empty exhaustive result certifies that
    no tight drawing exists within the given bounds.
    """

    def __init__(self, items=(), exhaustive: bool = False) -> None:
        super().__init__(items)
        self.exhaustive = exhaustive


# ---------------------------------------------------------------------------
# Bounded exhaustive search
# ---------------------------------------------------------------------------

_EXHAUSTIVE_M_MAX = 4


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int) -> None:
        self.left = limit

    def spend(self) -> bool:
        self.left -= 1
        return self.left >= 0


def _edge_cc(p: Planarization) -> dict[int, int]:
    return {t.edge: t.crossing_count for t in p.traces}


class _Searcher:
    """Depth-first pen enumeration of drawings, deduplicated on the sphere.

    Edges are drawn one at a time; every edge after the first must touch
    the structure drawn so far (start or land on an old vertex, or cross
    an old segment), which reaches every connected drawing in at least
    one insertion order while skipping unreachable archipelagos.
    """

    def __init__(self, s: StyleSpec, m_max: int, budget: _Budget) -> None:
        self.k = s.k
        self.x = s.restrictions
        self.spec = s
        self.m_max = m_max
        self.budget = budget
        self.seen: set[tuple] = set()
        self.found: list[Planarization] = []
        self.found_forms: set[tuple] = set()

    # -- pruning helpers --------------------------------------------------

    def _pair_cap(self) -> int:
        return 1 if "M" in self.x else self.k

    def _deficit_reachable(
        self, cc: dict[int, int], edges_open: int, pen_rem: int, pen_edge: int | None,
        pair_counts: dict[int, int] | None,
    ) -> bool:
        """Optimistic test: can every finished edge still be crossed up to
        exactly k by the pen's remainder plus `edges_open` future edges?"""
        cap = self._pair_cap()
        for e, c in cc.items():
            if e == pen_edge:
                continue
            cur = c + (pair_counts.get(e, 0) if pair_counts is not None else 0)
            gain = edges_open * cap
            if pen_edge is not None:
                room = pen_rem
                if "M" in self.x and pair_counts is not None:
                    room = min(room, max(0, 1 - pair_counts.get(e, 0)))
                gain += room
            if cur + gain < self.k:
                return False
        return True

    # -- edge starts -------------------------------------------------------

    def _starts(self, p: Planarization):
        if p.num_edges == 0:
            yield begin_edge_in_cell(p, p.cells[0].id), False
            return
        for v in sorted(p.vertices()):
            for before in p.rotation(v):
                yield begin_edge_at(p, v, before), True
        for c in p.cells:
            yield begin_edge_in_cell(p, c.id), False

    # -- state expansion ---------------------------------------------------

    def run(self) -> None:
        self._closed(Planarization.empty())

    def _record(self, p: Planarization) -> None:
        q = p.add_isolated_in_empty_cells()
        if not is_tight(q, self.k):
            return
        if not check_style(q, self.spec).in_style:
            return
        if not q.connectivity().essentially_2_connected:
            return
        form = canonical_form(q)
        if form not in self.found_forms:
            self.found_forms.add(form)
            self.found.append(q)

    def _closed(self, p: Planarization) -> None:
        if not self.budget.spend():
            raise BudgetExceeded("search budget exhausted", partial=self.found)
        form = canonical_form(p)
        if form in self.seen:
            return
        self.seen.add(form)

        cc = _edge_cc(p)
        if p.num_edges >= 1 and all(c == self.k for c in cc.values()):
            self._record(p)
        if p.num_edges >= self.m_max:
            return
        if not self._deficit_reachable(
            cc, self.m_max - p.num_edges, 0, None, None
        ):
            return
        for pen, at_old in self._starts(p):
            self._extend(pen, cc, {}, 0, at_old)

    def _extend(
        self,
        pen: PenState,
        base_cc: dict[int, int],
        pair_counts: dict[int, int],
        self_events: int,
        touched: bool,
    ) -> None:
        if not self.budget.spend():
            raise BudgetExceeded("search budget exhausted", partial=self.found)
        p = pen.p
        k = self.k
        rem = k - pen.crossings_so_far
        first_edge = p.num_edges == 1

        if not self._deficit_reachable(
            base_cc, self.m_max - p.num_edges, rem, pen.edge, pair_counts
        ):
            return

        # Close the edge at a fresh vertex.
        if touched or first_edge:
            self._closed(pen.end_new_vertex())

        # Close it on an existing vertex (never the origin: loopless).
        tipcell = pen.tip_cell()
        for v in sorted(p.vertices()):
            if v in (pen.origin, pen.tip):
                continue
            if "I" in self.x and any(
                pair_counts.get(e, 0) for e in p.vertex_edges(v)
            ):
                continue
            for before in p.rotation(v):
                if p.cell_left_of(before) is not tipcell:
                    continue
                self._closed(pen.end_at(v, before))

        # Or keep crossing.
        if rem <= 0:
            return
        for delta in pen.crossable_darts():
            e = p.edge_of(delta)
            own = e == pen.edge
            if own:
                if rem < 2 or "S" in self.x:
                    continue
                if "M" in self.x and self_events >= 1:
                    continue
                # A loop pinched off by a drifting island is ambiguous about
                # what it encloses; such edges are reached from their other
                # end instead (see search_tight docstring for the one loss).
                if not (touched or first_edge):
                    continue
            else:
                if base_cc[e] + pair_counts.get(e, 0) + 1 > k:
                    continue
                if "M" in self.x and pair_counts.get(e, 0) >= 1:
                    continue
                if "I" in self.x and pen.origin in p.edge_endpoints(e):
                    continue
            counts = dict(pair_counts)
            if not own:
                counts[e] = counts.get(e, 0) + 1
            self._extend(
                pen.cross(delta),
                base_cc,
                counts,
                self_events + (1 if own else 0),
                touched or not own,
            )


def search_tight(s: StyleSpec, m_max: int, budget: int = 500_000) -> SearchResult:
    """Enumerate tight in-style drawings with at most ``m_max`` edges.

    Runs a depth-first pen search over essentially-2-connected drawings
    whose edges each carry at most ``s.k`` crossings, up to sphere
    symmetry.  For ``m_max`` <= 4 the enumeration is complete: an empty
    result certifies non-existence within the bounds, and running out of
    ``budget`` raises BudgetExceeded with the partial finds attached.
    Larger ``m_max`` switches to best-effort mode: the result is flagged
    non-exhaustive and a blown budget truncates it silently.

    One corner is out of scope: an edge that is vertex-disjoint from the
    rest of the drawing and pinches off selfcrossing loops before its
    first crossing with the rest, measured from both of its endpoints.
    Such an edge selfcrosses at least twice, so searches under S or M are
    unaffected, as is any search with ``m_max`` 1.
    """
    if m_max < 1:
        raise PreconditionFailed("m_max must be at least 1")
    if "H" in s.restrictions and not {"S", "I"} <= s.restrictions:
        raise UnsupportedStyle(
            "homotopy-free search is only supported alongside S and I"
        )
    exhaustive = m_max <= _EXHAUSTIVE_M_MAX
    b = _Budget(budget)
    searcher = _Searcher(s, m_max, b)
    try:
        searcher.run()
    except BudgetExceeded:
        if exhaustive:
            raise
        return SearchResult(searcher.found, exhaustive=False)
    return SearchResult(searcher.found, exhaustive=exhaustive)
