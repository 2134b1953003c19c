"""geoquorum: anonymous geo-tagged survey reports with k-anonymous batch release."""

__version__ = "0.1.0"

from .geo import Coordinates, GeoDesignation, Resolution, coarsen, reverse_geocode
from .release import (PendingReport, PublicReport, ReleaseBatch, ReleaseEngine,
                      ReleasePolicy)
from .survey import Catalog, ReportSubmission, load_default_catalog

__all__ = [
    "Coordinates",
    "GeoDesignation",
    "Resolution",
    "coarsen",
    "reverse_geocode",
    "PendingReport",
    "PublicReport",
    "ReleaseBatch",
    "ReleaseEngine",
    "ReleasePolicy",
    "Catalog",
    "ReportSubmission",
    "load_default_catalog",
]
