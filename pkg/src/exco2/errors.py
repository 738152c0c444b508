"""Exception types raised across the package."""


class Exco2Error(ValueError):
    """Base class for all domain errors."""


class OutOfRangeVertex(Exco2Error):
    pass


class WrongArity(Exco2Error):
    pass


class DuplicateVertexInEdge(Exco2Error):
    pass


class WrongUniformity(Exco2Error):
    pass


class UniformityMismatch(Exco2Error):
    pass


class NotAnEdge(Exco2Error):
    pass


class OverlappingSets(Exco2Error):
    pass


class TooLarge(Exco2Error):
    pass


class TooSmall(Exco2Error):
    pass


class UnknownName(Exco2Error):
    pass


class BadWeights(Exco2Error):
    pass


class NotACycleCover(Exco2Error):
    pass


class SizeMismatch(Exco2Error):
    pass


class DimensionMismatch(Exco2Error):
    pass


class FormatError(Exco2Error):
    """Malformed .hg / SDPA / certificate input."""


class NotPSD(Exco2Error):
    def __init__(self, type_id, pivot_index, message=None):
        self.type_id = type_id
        self.pivot_index = pivot_index
        super().__init__(message or f"matrix for type {type_id} is not PSD (pivot {pivot_index})")


class InequalityViolated(Exco2Error):
    def __init__(self, admissible_id, slack):
        self.admissible_id = admissible_id
        self.slack = slack
        super().__init__(f"inequality for admissible {admissible_id} violated by {slack}")
