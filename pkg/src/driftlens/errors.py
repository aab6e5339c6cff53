"""Exception hierarchy shared by all driftlens modules."""


class DriftLensError(Exception):
    """Base class for every error raised by driftlens."""


class NumericalError(DriftLensError, ArithmeticError):
    """A decomposition or solve could not be completed."""


class NotPositiveDefinite(NumericalError):
    """Cholesky met a non-positive pivot (raise the ridge upstream)."""


class SingularDiagonal(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DimensionMismatch(DriftLensError, ValueError):
    pass


class NotSymmetric(DriftLensError, ValueError):
    pass


class DimensionTooLarge(DriftLensError, ValueError):
    """Requested subspace dimension exceeds what the data supports."""


RankDeficient = DimensionTooLarge


class EmptyDataset(DriftLensError, ValueError):
    pass


class EmptyClass(DriftLensError, ValueError):
    pass


class MissingLabels(DriftLensError, ValueError):
    pass


class EmptyReference(DriftLensError, ValueError):
    pass


class LengthMismatch(DriftLensError, ValueError):
    pass


class EmptyInput(DriftLensError, ValueError):
    pass


class InputFormatError(DriftLensError, ValueError):
    """Base for malformed data files."""


class MalformedLine(InputFormatError):
    def __init__(self, lineno, text, reason=""):
        self.lineno = lineno
        self.text = text
        msg = f"line {lineno}: malformed record {text!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class IndexOutOfRange(InputFormatError):
    pass


class NonFiniteValue(InputFormatError):
    pass


class DataInvalid(DriftLensError):
    """Dataset failed validation; ``report`` holds the details."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class AxisNotInSurface(DriftLensError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "axis not in surface"
