class SurfacingError(Exception):
    """
    Base class for exceptions
    """


class DrawingParseError(SurfacingError):
    """
    A drawing, camera or edge map file could not be parsed
    """
    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append("line %d" % line)
        if field is not None:
            where.append("field %r" % field)
        if where:
            message = "%s (%s)" % (message, ", ".join(where))
        super().__init__(message)


class DrawingValidationError(SurfacingError):
    """
    A curve drawing violates one of its invariants
    """
    def __init__(self, message, fragment_id=None):
        self.fragment_id = fragment_id
        if fragment_id is not None:
            message = "fragment %s: %s" % (fragment_id, message)
        super().__init__(message)


class EmptyProjectionError(SurfacingError):
    """
    Every sample of a curve lies behind the camera
    """


class LoftError(SurfacingError):
    pass


class DegenerateLoopError(LoftError):
    """
    Two fragments cannot be joined into a usable boundary loop
    """


class NonManifoldError(LoftError):
    pass


class SolverError(SurfacingError):
    """
    A sparse solve did not reach the requested tolerance
    """
    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = "%s (relative residual %.3e)" % (message, residual)
        super().__init__(message)


class StageError(SurfacingError):
    """
    A pipeline stage failed; `exit_code` identifies the stage
    """
    def __init__(self, stage, exit_code, message=""):
        self.stage = stage
        self.exit_code = exit_code
        super().__init__("stage %r failed: %s" % (stage, message))


class StatusTransitionError(SurfacingError):
    """
    A hypothesis status may only move forward
    """
