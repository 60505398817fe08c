"""Exception types raised across the package."""


class ScaleDimError(ValueError):
    """Base class for all validation and computation errors."""


class EscapedOrbit(ScaleDimError):
    def __init__(self, index, point=None):
        self.index = index
        self.point = point
        msg = f"orbit left the trapping region at iteration {index}"
        if point is not None:
            msg += f" (point {point})"
        super().__init__(msg + "; reseed inside the basin")


class PointOutsideBox(ScaleDimError):
    def __init__(self, index, point=None):
        self.index = index
        self.point = point
        where = f" {point}" if point is not None else ""
        super().__init__(f"point {index}{where} lies outside the box")


class ScheduleBelowMicroScale(ScaleDimError):
    pass


class InsufficientSample(ScaleDimError):
    pass


class DegenerateInterval(ScaleDimError):
    pass


class AnchorNotInSchedule(ScaleDimError):
    pass


class BoundsNotInSchedule(ScaleDimError):
    pass


class NonpositiveDenominator(ScaleDimError):
    pass


class DegenerateAbscissa(ScaleDimError):
    pass


class ScheduleMismatch(ScaleDimError):
    pass


class ConfigError(ScaleDimError):
    """Invalid run configuration; ``field`` names the offending setting."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
