"""Exception hierarchy shared by the registries, store, API, and CLI.

Every error carries a symbolic ``code`` and the HTTP status the API layer
uses when the error crosses the wire.
"""

from __future__ import annotations

from typing import Any


class FdomError(Exception):
    code = "INTERNAL"
    http_status = 500

    def __init__(self, message: str, *, details: Any = None):
        super().__init__(message)
        self.message = message
        self.details = details


class InvalidPrefix(FdomError):
    code = "INVALID_PREFIX"
    http_status = 400


class MalformedPid(FdomError):
    code = "MALFORMED_PID"
    http_status = 400


class UnknownClass(FdomError):
    code = "UNKNOWN_CLASS"
    http_status = 404


class ValidationFailed(FdomError):
    """Metadata failed schema validation; carries the full report."""

    code = "VALIDATION_FAILED"
    http_status = 422

    def __init__(self, report):
        super().__init__("metadata validation failed", details=report.to_dict())
        self.report = report


class InvalidDoRef(FdomError):
    code = "INVALID_DO_REF"
    http_status = 400


class InvalidChecksum(FdomError):
    code = "INVALID_CHECKSUM"
    http_status = 400


class DuplicatePid(FdomError):
    code = "DUPLICATE_PID"
    http_status = 500


class NotFound(FdomError):
    code = "NOT_FOUND"
    http_status = 404


class Gone(FdomError):
    """The PID is permanently tombstoned; carries the tombstone."""

    code = "GONE"
    http_status = 410

    def __init__(self, message: str, tombstone):
        super().__init__(message, details=tombstone.to_dict())
        self.tombstone = tombstone


class VersionConflict(FdomError):
    code = "VERSION_CONFLICT"
    http_status = 412


class ClassChangeForbidden(FdomError):
    code = "CLASS_CHANGE_FORBIDDEN"
    http_status = 409


class DuplicateOpId(FdomError):
    code = "DUPLICATE_OP_ID"
    http_status = 409


class InvalidDescriptor(FdomError):
    code = "INVALID_DESCRIPTOR"
    http_status = 422


class InvalidPage(FdomError):
    code = "INVALID_PAGE"
    http_status = 400


class NotACreativeWork(FdomError):
    code = "NOT_A_CREATIVE_WORK"
    http_status = 422


class InvalidArgument(FdomError):
    code = "MALFORMED_QUERY"
    http_status = 400


class MalformedBody(FdomError):
    code = "MALFORMED_BODY"
    http_status = 400


class IfMatchRequired(FdomError):
    code = "IF_MATCH_REQUIRED"
    http_status = 428


class MalformedIfMatch(FdomError):
    code = "MALFORMED_IF_MATCH"
    http_status = 400


class StorageFull(FdomError):
    code = "STORAGE_FULL"
    http_status = 507


class SequenceGap(FdomError):
    code = "SEQUENCE_GAP"
    http_status = 500


class CorruptEvent(FdomError):
    """Unreadable journal frame; ``position`` is the 1-based line number."""

    code = "CORRUPT_EVENT"
    http_status = 500

    def __init__(self, message: str, position: int):
        super().__init__(message, details={"position": position})
        self.position = position


class LockHeld(FdomError):
    code = "LOCK_HELD"
    http_status = 503
