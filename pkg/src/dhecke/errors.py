"""Exception hierarchy shared by all modules."""


class DHeckeError(Exception):
    """Base class; ``kind`` is a short machine-readable tag."""

    kind = "error"

    def __init__(self, msg="", kind=None):
        super().__init__(msg)
        if kind is not None:
            self.kind = kind


class InvalidInstance(DHeckeError):
    kind = "invalid-instance"


class InvalidAnchor(DHeckeError):
    kind = "invalid-anchor"


class DomainError(DHeckeError):
    kind = "domain-error"


class RingError(DHeckeError):
    kind = "ring-error"


class TruncationError(DHeckeError):
    kind = "truncation-error"


class NotPolynomialInJ(DHeckeError):
    kind = "not-polynomial-in-j"


class UnsupportedDiscriminant(DHeckeError):
    kind = "unsupported-discriminant"


class UnsupportedField(DHeckeError):
    kind = "unsupported-field"


class ContradictionError(DHeckeError):
    """Raised where the mathematics guarantees success; signals a bug."""

    kind = "contradiction-error"


class UndecidedError(DHeckeError):
    kind = "undecided-error"


class NoSuitableCharacter(DHeckeError):
    kind = "no-suitable-character"


class IncompleteEnumeration(DHeckeError):
    kind = "incomplete-enumeration"


class DegenerateInstance(DHeckeError):
    kind = "degenerate-instance"


class LabelingError(DHeckeError):
    kind = "labeling-error"


class InvalidKernel(DHeckeError):
    kind = "invalid-kernel"


class InvalidAuxiliaryPrime(DHeckeError):
    kind = "invalid-auxiliary-prime"


class Indeterminate(DHeckeError):
    kind = "indeterminate"


class UnsupportedSymbol(DHeckeError):
    kind = "unsupported-symbol"
