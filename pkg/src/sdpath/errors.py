"""Exception hierarchy shared by every module."""


class SDPError(Exception):
    """Base class for all errors raised by sdpath."""


class ParseError(SDPError):
    """Malformed terrain file (bad directive, number, or vertex index)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonTerrainMesh(SDPError):
    """Mesh fails the terrain property; ``report`` holds the findings."""

    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class EmptyMesh(SDPError):
    pass


class PointOffTerrain(SDPError):
    pass


class InvalidEpsilon(SDPError):
    pass


class UnreachableTarget(SDPError):
    pass
