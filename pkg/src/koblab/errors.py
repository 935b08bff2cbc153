"""Exception hierarchy shared by all koblab modules."""


class KoblabError(Exception):
    """Base class for all library errors."""


class DomainError(KoblabError, ValueError):
    """A point lies outside (or on the boundary of) the required domain,
    or a domain argument violates its invariants."""


class UnsupportedDomainError(DomainError):
    """The operation does not handle this domain variant; the message
    names the module that does."""


class ParseError(KoblabError, ValueError):
    """Malformed JSON/shorthand spec input."""


class StabilityError(KoblabError, RuntimeError):
    """A numeric limit, fit, or sampling procedure did not stabilize."""


class InternalCheckError(KoblabError, RuntimeError):
    """A certified invariant failed at runtime (signals a bug, not bad input)."""
