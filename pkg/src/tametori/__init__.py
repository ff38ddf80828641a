"""Tame elliptic maximal tori of reductive groups over non-archimedean local fields.

The package classifies elliptic twisted Weyl classes, places each tame class
at its point of the alcove (with Kac coordinates), and counts stable classes,
embeddings and rational classes of the corresponding tori.
"""

__version__ = "0.1.0"

from .errors import CheckError, InputError, TametoriError  # noqa: E402
from .rootdata import GroupContext, GroupSpec, build_group  # noqa: E402
from .weyl import sigma_classes  # noqa: E402
from .kac import KacPoint, all_points, assign_point  # noqa: E402
from .classify import (  # noqa: E402
    ClassificationReport,
    ToriOrbit,
    embedding_count,
    full_report,
    isogeny_transfer,
    make_orbit,
    rational_classes,
    stable_classes,
)

__all__ = [
    "CheckError",
    "ClassificationReport",
    "GroupContext",
    "GroupSpec",
    "InputError",
    "KacPoint",
    "TametoriError",
    "ToriOrbit",
    "__version__",
    "all_points",
    "assign_point",
    "build_group",
    "embedding_count",
    "full_report",
    "isogeny_transfer",
    "make_orbit",
    "rational_classes",
    "sigma_classes",
    "stable_classes",
]
