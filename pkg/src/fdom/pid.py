"""Persistent identifiers: two-part handles minted, parsed, and formatted canonically.

A PID is ``prefix/suffix``. Both segments are restricted to ``[A-Za-z0-9._-]``
so the canonical form is URL-path-safe without escaping; the suffix is
lowercase in canonical form. Comparison is exact after canonicalization.
"""

from __future__ import annotations

import re
import secrets
from dataclasses import dataclass

from .errors import InvalidPrefix, MalformedPid

DEFAULT_PREFIX = "fdom.local"

_SEGMENT = re.compile(r"[A-Za-z0-9._-]+\Z")
_CANONICAL_SUFFIX = re.compile(r"[a-z0-9._-]+\Z")


@dataclass(frozen=True)
class Pid:
    """A canonical persistent identifier. Construction rejects non-canonical parts."""

    prefix: str
    suffix: str

    def __post_init__(self) -> None:
        if not isinstance(self.prefix, str) or not _SEGMENT.match(self.prefix):
            raise MalformedPid(f"invalid PID prefix: {self.prefix!r}")
        if not isinstance(self.suffix, str) or not _CANONICAL_SUFFIX.match(self.suffix):
            raise MalformedPid(f"invalid PID suffix: {self.suffix!r}")

    def __str__(self) -> str:
        return f"{self.prefix}/{self.suffix}"

    @classmethod
    def parse(cls, text: str) -> Pid:
        """Split on the first ``/`` and return the canonical PID.

        The suffix is lowercased; any string violating the
        ``segment "/" segment`` grammar raises :class:`MalformedPid`.
        """
        if not isinstance(text, str) or "/" not in text:
            raise MalformedPid(f"not a PID (missing '/'): {text!r}")
        prefix, _, suffix = text.partition("/")
        if not _SEGMENT.match(prefix):
            raise MalformedPid(f"invalid PID prefix: {prefix!r}")
        if not _SEGMENT.match(suffix):
            raise MalformedPid(f"invalid PID suffix: {suffix!r}")
        return cls(prefix, suffix.lower())


def mint(prefix: str = DEFAULT_PREFIX) -> Pid:
    """Mint a fresh PID under ``prefix``.

    The suffix is a 128-bit random value as 32 lowercase hex digits, from a
    thread-safe source; collisions are negligible and the registry rejects
    duplicates independently.
    """
    if not isinstance(prefix, str) or not _SEGMENT.match(prefix):
        raise InvalidPrefix(f"invalid PID prefix: {prefix!r}")
    return Pid(prefix, secrets.token_hex(16))
