from __future__ import annotations


class NumericalError(RuntimeError):
    """A computation could not deliver a result within its accuracy contract."""


class ConditioningError(NumericalError):
    pass


class MeshError(NumericalError):
    pass


class NodeDensityError(NumericalError):
    def __init__(self, message: str, required_panels: int) -> None:
        super().__init__(message)
        self.required_panels = required_panels


class SeriesCancellationError(NumericalError):
    def __init__(self, message: str, lost_digits: float) -> None:
        super().__init__(message)
        self.lost_digits = lost_digits


class NormalizationError(NumericalError):
    pass


class NotTrappedError(NumericalError):
    pass


class NoSignChangeError(NumericalError):
    pass


class SectorError(ValueError):
    pass


class GridMismatchError(ValueError):
    pass


class ParityError(ValueError):
    pass
