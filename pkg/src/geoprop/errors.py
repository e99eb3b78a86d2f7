"""Exception hierarchy. InputError and its subclasses map to CLI exit code 2."""


class GeopropError(Exception):
    """Base class for errors raised by this package."""


class InputError(GeopropError):
    """Bad user-supplied data or configuration (file contents, flags, ids)."""


class EmptyFlowMatrixError(InputError):
    """Flow aggregation produced no entries after cleaning and thresholding."""


class DegenerateDistanceError(InputError):
    """Two distinct zones share a centroid, so an edge weight would be infinite."""
