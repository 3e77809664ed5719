"""Exception hierarchy. Every error names the offending ids so callers can print a diagnosis."""


class KitlabError(Exception):
    """Base class for all library errors."""


class ValidationError(KitlabError):
    pass


# groupoid tables
class DanglingId(ValidationError):
    pass


class BadIdentity(ValidationError):
    pass


class MissingInverse(ValidationError):
    pass


class NonAssociative(ValidationError):
    pass


class IllTyped(ValidationError):
    """A composite or inverse entry has the wrong source/target."""


class UnknownObject(KitlabError):
    pass


class NotEndomorphism(KitlabError):
    pass


class TypeMismatch(KitlabError):
    pass


class GroupTooLarge(KitlabError):
    pass


class NotSubgroup(ValidationError):
    pass


# kits
class NotConjugationClosed(ValidationError):
    pass


class NotBoolean(KitlabError):
    pass


class BaseMismatch(KitlabError):
    pass


class SearchSpaceTooLarge(KitlabError):
    pass


# sym / exponential
class BudgetExceeded(KitlabError):
    pass


class IndexOutOfRange(KitlabError):
    pass


class NotEndo(KitlabError):
    pass


# profunctors / presheaves / species
class NotFunctorial(ValidationError):
    pass


class UnknownElement(KitlabError):
    pass


class NotStabilized(KitlabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ProbeBudgetExceeded(KitlabError):
    pass


class ParseError(KitlabError):
    pass


class NotNatural(ValidationError):
    """A presheaf action or a map of presheaves fails naturality."""
