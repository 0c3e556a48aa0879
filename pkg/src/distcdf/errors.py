"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid or degenerate geometric input (zero-length segment, collinear
    frame points, self-intersecting or non-coplanar polygon, ...)."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


class NoSolutionError(RuntimeError):
    """Raised when a target probability cannot be bracketed.

    ``attainable`` holds the (low, high) range of probabilities that the
    hazard model can produce.
    """

    def __init__(self, message: str, attainable: tuple[float, float]):
        super().__init__(message)
        self.attainable = attainable
