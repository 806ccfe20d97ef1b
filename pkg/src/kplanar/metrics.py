"""Exact counting and density identities for k-planar drawings.

Everything here is integer or ``fractions.Fraction`` arithmetic; no
floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    NotApplicable,
    Planarization,
    PreconditionFailed,
    Unresolved,
    UnsupportedStyle,
)
from .styles import StyleSpec, check_style

__all__ = [
    "CountsReport",
    "IdentityReport",
    "counts",
    "verify_angle_identity",
    "verify_planar_side_identity",
    "verify_edge_count_formula",
    "min_edge_density",
    "verify_density_lower_bound",
]


@dataclass(frozen=True)
class CountsReport:
    """Every counted quantity of a drawing, for a fixed crossing budget k.

    ``c_0`` .. ``c_3`` count cells by the exact number of incident graph
    vertices (on a boundary walk or anchored inside); cells incident to
    four or more vertices land in ``c_4plus``, which is nonzero only for
    drawings that are not filled.  ``c2_prime`` counts cells whose
    boundary carries exactly two distinct uncrossed edges, independent of
    the incident-vertex count.
    """

    k: int
    n: int
    m: int
    m_p: int
    m_x: int
    cr: int
    iso: int
    c_0: int
    c_1: int
    c_2: int
    c_3: int
    c_4plus: int
    c2_prime: int
    epsilon: Fraction


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of an exact identity, kept as rationals."""

    lhs: Fraction
    rhs: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def _cell_census(p: Planarization) -> tuple[list[int], int, int]:
    """Per-cell tallies: [c_0..c_3], c_4plus, c2_prime."""
    uncrossed = {e for e in p.edges() if p.trace_of(e).crossing_count == 0}
    c = [0, 0, 0, 0]
    c4 = 0
    c2p = 0
    for cell in p.cells:
        inc = len(cell.incident_vertices)
        if inc >= 4:
            c4 += 1
        else:
            c[inc] += 1
        flat = {p.edge_of(d) for d in cell.boundary_darts()} & uncrossed
        if len(flat) == 2:
            c2p += 1
    return c, c4, c2p


def counts(p: Planarization, k: int) -> CountsReport:
    """Tally vertices, edges, crossings and cells of a valid drawing.

    ``epsilon`` is the slack (k/2 * m_x - cr) + (k-4)/4 * m_p + c2_prime
    + c_3; it is nonnegative on every k-planar drawing once k >= 4.
    """
    m = p.num_edges
    m_x = sum(1 for t in p.traces if t.crossing_count > 0)
    m_p = m - m_x
    cr = p.num_crossings
    iso = len(p.degree_zero_nodes())
    n = p.num_vertices
    c, c4, c2p = _cell_census(p)
    eps = (Fraction(k, 2) * m_x - cr) + Fraction(k - 4, 4) * m_p + c2p + c[3]
    return CountsReport(
        k=k,
        n=n,
        m=m,
        m_p=m_p,
        m_x=m_x,
        cr=cr,
        iso=iso,
        c_0=c[0],
        c_1=c[1],
        c_2=c[2],
        c_3=c[3],
        c_4plus=c4,
        c2_prime=c2p,
        epsilon=eps,
    )


def _require_corner_counting(p: Planarization, what: str) -> tuple[list[int], int]:
    """Shared gate for the two counting identities.

    Both identities count each vertex-cell incidence once per side or
    angle, which needs an essentially 2-connected drawing, and need every
    cell's incidence count to land in c_1..c_3.
    """
    if not p.connectivity().essentially_2_connected:
        raise NotApplicable(f"{what} needs an essentially 2-connected drawing")
    c, c4, c2p = _cell_census(p)
    if c4:
        raise NotApplicable(
            f"{what} needs every cell incident to at most 3 vertices"
        )
    return c, c2p


def verify_angle_identity(p: Planarization) -> bool:
    """Check iso + 2m = c_1 + 2c_2 + 3c_3, counting angles at vertices."""
    c, _ = _require_corner_counting(p, "the angle identity")
    iso = len(p.degree_zero_nodes())
    return iso + 2 * p.num_edges == c[1] + 2 * c[2] + 3 * c[3]


def verify_planar_side_identity(p: Planarization) -> bool:
    """Check 2*m_p = c_2 + c2_prime + 3c_3, counting uncrossed edge sides."""
    c, c2p = _require_corner_counting(p, "the planar-side identity")
    if p.num_vertices < 3:
        raise NotApplicable("the planar-side identity needs at least 3 vertices")
    m_p = sum(1 for t in p.traces if t.crossing_count == 0)
    return 2 * m_p == c[2] + c2p + 3 * c[3]


def verify_edge_count_formula(p: Planarization, k: int) -> IdentityReport:
    """Evaluate m = 2/(k-2) * (n + c_0 - 2 + epsilon) on both sides.

    Holds for every filled, essentially 2-connected drawing with at least
    3 vertices; a report with unequal sides on such input is a kernel bug.
    """
    from .saturation import is_filled

    if k <= 2:
        raise PreconditionFailed(f"the edge-count formula needs k > 2, got {k}")
    if not is_filled(p).filled:
        raise PreconditionFailed("the edge-count formula needs a filled drawing")
    if not p.connectivity().essentially_2_connected:
        raise PreconditionFailed(
            "the edge-count formula needs an essentially 2-connected drawing"
        )
    if p.num_vertices < 3:
        raise PreconditionFailed("the edge-count formula needs at least 3 vertices")
    rep = counts(p, k)
    lhs = Fraction(rep.m)
    rhs = Fraction(2, k - 2) * (rep.n + rep.c_0 - 2 + rep.epsilon)
    return IdentityReport(lhs, rhs)


def min_edge_density(s: StyleSpec) -> Fraction:
    """Minimum edges per (n + c_0 - 1) over saturated drawings of style s.

    Exact rational, by case over the restriction letters.  Styles with H
    resolve like S,I,M; the branch with S,I,M and k in {4,5,6} is an open
    problem and raises Unresolved.
    """
    x = s.restrictions
    k = s.k
    if "H" in x and not {"S", "I", "M"} <= x:
        raise UnsupportedStyle(
            "density of homotopy-free styles is known only together with S, I and M"
        )
    if k < 4:
        raise PreconditionFailed(f"the density table starts at k = 4, got {k}")
    core = frozenset(x - {"H"})
    if core == frozenset({"S", "I", "M"}):
        if k < 7:
            raise Unresolved(
                f"minimum density for S,I,M styles with k = {k} is open"
            )
        return Fraction(2 * (k + 1), k * (k - 1))
    if core in (frozenset(), frozenset({"I"})):
        return Fraction(2, k - (k % 2))
    if core in (frozenset({"S"}), frozenset({"S", "I"})):
        return Fraction(2, k - 1)
    if core == frozenset({"M"}):
        return Fraction(2 * (k - 1), (k - 1) * (k - 2) + 2)
    if core == frozenset({"S", "M"}):
        return Fraction(2 * (k + 1), k * (k - 1))
    if core == frozenset({"I", "M"}):
        if k == 4:
            return Fraction(4, 5)
        return Fraction(2 * (k - 1), (k - 1) * (k - 2) + 2)
    raise Unresolved(f"no density case for restrictions {sorted(x)}")


def verify_density_lower_bound(p: Planarization, s: StyleSpec) -> bool:
    """Check m >= min_edge_density(s) * (n + c_0 - 1) as exact rationals."""
    from .saturation import is_filled

    if not check_style(p, s).in_style:
        raise PreconditionFailed(
            "the density lower bound applies only to drawings in the style"
        )
    if not is_filled(p).filled:
        raise PreconditionFailed(
            "the density lower bound applies only to filled drawings"
        )
    a = min_edge_density(s)
    rep = counts(p, s.k)
    return Fraction(rep.m) >= a * (rep.n + rep.c_0 - 1)
