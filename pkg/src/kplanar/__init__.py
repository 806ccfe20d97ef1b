"""kplanar: verification and construction kernel for k-planar drawings.

Drawings of loopless multigraphs are stored combinatorially as
planarizations (rotation systems with explicit crossing nodes).  The
package checks drawing styles, certifies filled/tight/saturated status,
verifies the exact edge-count identities, and generates the minimum-edge
saturated families, with a small DSL and an SVG renderer on top.
"""

from .core import (
    CROSSING,
    ISOLATED,
    OUTER,
    VERTEX,
    AnchorCycle,
    BadParity,
    BudgetExceeded,
    Cell,
    ConnectivityReport,
    DslSyntaxError,
    EdgeTrace,
    GeneralizationUnverified,
    KPlanarError,
    NotApplicable,
    NotIncident,
    NotInStyle,
    Planarization,
    PreconditionFailed,
    TraceBroken,
    Unresolved,
    UnsupportedStyle,
    ValidationError,
    ValidationReport,
    Violation,
)

__all__ = [
    "CROSSING",
    "ISOLATED",
    "OUTER",
    "VERTEX",
    "AnchorCycle",
    "BadParity",
    "BudgetExceeded",
    "Cell",
    "ConnectivityReport",
    "DslSyntaxError",
    "EdgeTrace",
    "GeneralizationUnverified",
    "KPlanarError",
    "NotApplicable",
    "NotIncident",
    "NotInStyle",
    "Planarization",
    "PreconditionFailed",
    "TraceBroken",
    "Unresolved",
    "UnsupportedStyle",
    "ValidationError",
    "ValidationReport",
    "Violation",
]

__version__ = "0.1.0"
