"""Exception types raised across the package."""


class DegenerateInput(ValueError):
    """Input geometry has no usable area (e.g. all points collinear)."""


class DegenerateDecode(ValueError):
    """Decoded inclined box collapsed to a segment or a point."""


class DecodeOverflow(OverflowError):
    """A log-space delta is too large to be a plausible prediction."""


class InfiniteLoss(ArithmeticError):
    """Log loss of a class with zero probability."""


class EmptyRoi(ValueError):
    """ROI projects to zero cells on the feature map."""


class ParseError(ValueError):
    """Malformed annotation or fixture line."""

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class FixtureMismatch(ValueError):
    """Fixture files disagree on record counts."""
