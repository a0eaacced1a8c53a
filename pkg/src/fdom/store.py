"""Durable persistence: append-only journal, snapshots, and crash recovery.

The journal is line-delimited JSON, one event per line, UTF-8, newline
terminated. Each line is ``{"seq":N,"ts":"...","kind":"...","payload":{...}}``
with keys in exactly that order. Events carry the full post-state of the
mutated record, so replay needs no merge logic. Mutations that touch both
registries (create, delete, property updates) are journaled as two
consecutive events; recovery discards a trailing half-pair left by a crash.

Snapshots are full-state files named ``snapshot-<seq>.json``; startup loads
the newest valid snapshot and replays the journal tail, which is identical
to a full replay. The journal is never truncated, so a full replay always
remains possible.
"""

from __future__ import annotations

import errno
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterator, Optional, Sequence

from .errors import CorruptEvent, LockHeld, SequenceGap, StorageFull
from .util import Clock

if TYPE_CHECKING:
    from .registry import Registry

JOURNAL_NAME = "journal.ndjson"
LOCK_NAME = "LOCK"

EVENT_KINDS = (
    "fdo_created",
    "metadata_created",
    "fdo_updated",
    "metadata_updated",
    "fdo_tombstoned",
    "metadata_tombstoned",
    "op_registered",
)

# Kinds that open a two-event pair, mapped to the kind that must follow.
PAIR_OPENERS = {
    "metadata_created": "fdo_created",
    "metadata_updated": "fdo_updated",
    "fdo_tombstoned": "metadata_tombstoned",
}


@dataclass(frozen=True)
class JournalEvent:
    seq: int
    ts: str
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "ts": self.ts, "kind": self.kind, "payload": self.payload}

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> JournalEvent:
        seq = doc["seq"]
        kind = doc["kind"]
        if not isinstance(seq, int) or seq < 1:
            raise ValueError(f"bad seq: {seq!r}")
        if kind not in EVENT_KINDS:
            raise ValueError(f"bad kind: {kind!r}")
        return cls(seq=seq, ts=str(doc["ts"]), kind=kind, payload=dict(doc["payload"]))


class Journal:
    """Append-only journal file. All writes flush and fsync before returning."""

    def __init__(self, path: Path, last_seq: int = 0):
        self.path = Path(path)
        self.last_seq = last_seq

    def append(self, events: Sequence[JournalEvent]) -> int:
        """Durably write events; seq values must continue densely from last_seq."""
        expected = self.last_seq
        for event in events:
            expected += 1
            if event.seq != expected:
                raise SequenceGap(
                    f"event seq {event.seq} does not follow {expected - 1}")
        data = "".join(e.to_line() for e in events).encode("utf-8")
        try:
            with open(self.path, "ab") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull("journal device full") from exc
            raise
        self.last_seq = expected
        return self.last_seq


def read_journal(path: Path) -> list[JournalEvent]:
    """Read a journal with prefix semantics.

    A truncated or unparseable final line is treated as a crash remnant and
    dropped. Damage anywhere earlier raises CorruptEvent with the 1-based
    line position; a sequence gap raises SequenceGap.
    """
    path = Path(path)
    if not path.exists():
        return []
    raw = path.read_bytes()
    if not raw:
        return []
    lines = raw.split(b"\n")
    trailing_fragment = lines[-1]  # b"" when the file ends with a newline
    lines = lines[:-1]

    events: list[JournalEvent] = []
    for i, line in enumerate(lines):
        position = i + 1
        try:
            doc = json.loads(line.decode("utf-8"))
            event = JournalEvent.from_dict(doc)
        except Exception as exc:
            # A bad final line (even newline-terminated) is crash damage;
            # bad bytes before valid data mean real corruption.
            if position == len(lines) and not trailing_fragment:
                return events
            raise CorruptEvent(f"unreadable journal line: {exc}", position) from exc
        if event.seq != len(events) + 1:
            raise SequenceGap(
                f"journal line {position}: seq {event.seq}, expected {len(events) + 1}")
        events.append(event)
    return events


def trim_dangling_pair(events: list[JournalEvent]) -> list[JournalEvent]:
    """Drop a trailing event that opens a pair whose closer never made it to disk."""
    if events and events[-1].kind in PAIR_OPENERS:
        return events[:-1]
    return events


def check_pairing(events: Sequence[JournalEvent]) -> None:
    """Verify every pair opener is immediately followed by its closing kind."""
    i = 0
    while i < len(events):
        kind = events[i].kind
        closer = PAIR_OPENERS.get(kind)
        if closer is not None:
            if i + 1 >= len(events) or events[i + 1].kind != closer:
                raise CorruptEvent(
                    f"event seq {events[i].seq} ({kind}) is missing its {closer} pair",
                    events[i].seq)
            i += 2
        else:
            i += 1


def replay(events: Sequence[JournalEvent], *, prefix: Optional[str] = None,
           clock: Optional[Clock] = None) -> "Registry":
    """Rebuild registry state from an event stream (trailing half-pair already trimmed)."""
    from .registry import Registry

    registry = Registry(prefix=prefix, clock=clock)
    check_pairing(events)
    for event in events:
        registry.apply_event(event)
    return registry


def snapshot_path(data_dir: Path, seq: int) -> Path:
    return Path(data_dir) / f"snapshot-{seq}.json"


def write_snapshot(data_dir: Path, registry: "Registry") -> Path:
    """Write the full registry state tagged with the covered seq."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    path = snapshot_path(data_dir, registry.last_seq)
    doc = {"format_version": 1, "seq": registry.last_seq, "state": registry.state_dump()}
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(doc, separators=(",", ":"), ensure_ascii=False),
                   encoding="utf-8")
    os.replace(tmp, path)
    return path


def list_snapshots(data_dir: Path) -> list[tuple[int, Path]]:
    """Snapshots in the data dir, newest first."""
    found = []
    for p in Path(data_dir).glob("snapshot-*.json"):
        try:
            seq = int(p.stem.split("-", 1)[1])
        except (IndexError, ValueError):
            continue
        found.append((seq, p))
    return sorted(found, reverse=True)


def load_registry(data_dir: Path, *, prefix: Optional[str] = None,
                  clock: Optional[Clock] = None, attach_journal: bool = True) -> "Registry":
    """Recover state from the newest valid snapshot plus the journal tail.

    A corrupt or unreadable snapshot falls back to older snapshots and
    finally to a full journal replay. The returned registry journals future
    mutations to the data dir when ``attach_journal`` is set.
    """
    from .registry import Registry

    data_dir = Path(data_dir)
    events = trim_dangling_pair(read_journal(data_dir / JOURNAL_NAME))

    registry: Optional[Registry] = None
    for seq, path in list_snapshots(data_dir):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            if doc.get("format_version") != 1 or doc.get("seq") != seq:
                continue
            registry = Registry.from_state(doc["state"], prefix=prefix, clock=clock)
        except Exception:
            continue
        tail = [e for e in events if e.seq > seq]
        check_pairing(tail)
        for event in tail:
            registry.apply_event(event)
        break

    if registry is None:
        registry = replay(events, prefix=prefix, clock=clock)

    if attach_journal:
        registry.attach_journal(Journal(data_dir / JOURNAL_NAME, registry.last_seq))
    return registry


@contextmanager
def data_dir_lock(data_dir: Path) -> Iterator[None]:
    """Exclusive data-dir lock via an O_EXCL-created LOCK file."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    lock_path = data_dir / LOCK_NAME
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockHeld(
            f"data dir {data_dir} is locked by another process "
            f"(remove {lock_path} if it is stale)") from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode("ascii"))
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except FileNotFoundError:
            pass
