"""Exception hierarchy shared by all owlab modules."""


class OwlabError(Exception):
    """Base class for every error raised by owlab."""


class DomainError(OwlabError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidElementError(DomainError):
    """A payload is not an element of the semigroup it was used with."""


class MultipleSolutionsError(DomainError):
    """``a*s = b`` may have several solutions; the caller must enumerate."""


class HypothesisError(DomainError):
    """A strict-mode precondition of the filling theorem does not hold."""


class CertificateRefused(DomainError):
    """A precondition of the certificate chain failed."""


class ResourceError(OwlabError):
    """A configured work budget would be exceeded."""
