"""Exception types shared across the engine."""


class PedgraphError(Exception):
    """Base class for all engine errors."""


class ExtentError(PedgraphError):
    """Coordinate falls outside the supported extent (projection or raster)."""


class DegenerateGeometryError(PedgraphError):
    """Geometry too small or malformed to operate on (coincident points, <2 vertices)."""


class FormatError(PedgraphError):
    """Input file does not parse as the expected format."""


class SchemaError(PedgraphError):
    """Input parsed but violates the documented schema (wrong geometry kind, bad keys)."""


class EmptyDatasetError(PedgraphError):
    """An operation that needs data received an empty dataset."""


class NodataError(PedgraphError):
    """Raster sample touches a nodata cell."""


class ParameterError(PedgraphError):
    """Invalid configuration or generator parameters."""


class UnroutableWaypointError(PedgraphError):
    """No graph node within snapping radius of a waypoint."""

    def __init__(self, message: str, nearest_m: float | None = None):
        super().__init__(message)
        self.nearest_m = nearest_m


class NoRouteError(PedgraphError):
    """No path between two snapped nodes under the active cost profile.

    ``constraints`` names the constraint classes (grade / curb_ramps /
    construction) whose relaxation alone restores a path; empty means the
    pair is disconnected even with every exclusion lifted.
    """

    def __init__(self, message: str, constraints: list[str] | None = None):
        super().__init__(message)
        self.constraints = constraints or []
