"""Shared helpers: UTC clock plumbing and RFC 3339 timestamps at second precision."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any, Callable

Clock = Callable[[], datetime]

_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def format_ts(dt: datetime) -> str:
    """Render a datetime as RFC 3339 UTC with a Z suffix, truncated to seconds."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0).strftime(_TS_FORMAT)


def parse_ts(text: str) -> datetime:
    return datetime.strptime(text, _TS_FORMAT).replace(tzinfo=timezone.utc)


def compact_json(obj: Any) -> str:
    """Canonical single-line JSON: no whitespace, keys in construction order."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)
