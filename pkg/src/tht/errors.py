"""Domain error hierarchy.

Every error carries a machine-readable ``code`` (the class name) so the
HTTP service and the CLI can map failures without string matching.
"""

from __future__ import annotations


class ThtError(Exception):
    """Base for all domain errors."""

    def __init__(self, message: str, detail: object = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    @property
    def code(self) -> str:
        return type(self).__name__


# -- corpus model -----------------------------------------------------------

class DuplicateId(ThtError): ...
class MalformedId(ThtError): ...
class InvalidLabel(ThtError): ...
class UnknownWork(ThtError): ...
class UnknownUnit(ThtError): ...
class AmbiguousUnit(ThtError): ...
class UnknownPath(ThtError): ...
class DuplicateLabel(ThtError): ...
class SiblingLimitExceeded(ThtError): ...
class RevisionConflict(ThtError): ...
class UnknownWitness(ThtError): ...
class DuplicateReading(ThtError): ...
class ForbiddenWitnessKind(ThtError): ...
class UnknownAnnotation(ThtError): ...

# -- evidence ---------------------------------------------------------------

class MalformedTaxonomy(ThtError): ...
class DuplicateSubtype(ThtError): ...
class SpanOutOfRange(ThtError): ...
class SubtypeMismatch(ThtError): ...
class UnknownLayerLabel(ThtError): ...

# -- phylogeny --------------------------------------------------------------

class InsufficientTaxa(ThtError): ...
class InsufficientOverlap(ThtError): ...

# -- store ------------------------------------------------------------------

class ValidationFailed(ThtError): ...
class CorruptLog(ThtError): ...
class UnsupportedVersion(ThtError): ...
class IntegrityViolation(ThtError): ...

# -- service ----------------------------------------------------------------

class InvalidCredentials(ThtError): ...
class AuthExpired(ThtError): ...
class InvalidToken(ThtError): ...


#: Errors that mean "the addressed thing does not exist" (HTTP 404).
NOT_FOUND_CODES = {
    "UnknownWork", "UnknownUnit", "UnknownPath", "UnknownWitness",
    "UnknownLayerLabel", "UnknownAnnotation",
}

#: Errors that mean "the request raced a newer state" (HTTP 409).
CONFLICT_CODES = {"RevisionConflict"}

#: Errors that mean "credentials or token rejected" (HTTP 401).
AUTH_CODES = {"InvalidCredentials", "AuthExpired", "InvalidToken"}
