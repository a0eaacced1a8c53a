"""The three registries: FDO catalog, metadata registry, and operation registry.

One Registry instance owns all three keyspaces plus the relation index.
Every mutation is serialized under a single lock, journaled (when a journal
is attached) before it is applied, and applied through the same event
dispatch used by crash recovery, so live state and replayed state can never
diverge.

Lifecycle rules enforced here: dual PIDs per object (record PID is never the
metadata PID), disjoint keyspaces, optimistic versioning, class pinned at
creation, and tombstoning instead of deletion so every minted PID resolves
forever.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence, Union
from urllib.parse import urlparse

from . import metadata_model as mm
from .errors import (
    ClassChangeForbidden,
    DuplicateOpId,
    DuplicatePid,
    Gone,
    InvalidArgument,
    InvalidChecksum,
    InvalidDescriptor,
    InvalidDoRef,
    InvalidPage,
    NotACreativeWork,
    NotFound,
    ValidationFailed,
    VersionConflict,
)
from .metadata_model import MetadataClass, MetadataRecord, RecordStatus
from .pid import DEFAULT_PREFIX, Pid, mint
from .relations import ClosureHit, Edge, RelationIndex
from .store import JournalEvent, Journal
from .util import Clock, format_ts, utc_now

_CHECKSUM_RE = re.compile(r"sha256:[0-9a-f]{64}\Z")
_OP_ID_RE = re.compile(r"[a-z0-9_.-]+\Z")
_HTTP_METHODS = ("GET", "POST", "PUT", "DELETE")

MAX_PAGE_LIMIT = 500
DEFAULT_PAGE_LIMIT = 100

_UNSET = object()


@dataclass
class FdoRecord:
    """Catalog entry binding a digital-object reference to its metadata PID."""

    pid: Pid
    do_ref: str
    do_checksum: Optional[str]
    metadata_pid: Pid
    class_name: MetadataClass
    version: int = 1
    created: str = ""
    modified: str = ""
    status: RecordStatus = RecordStatus.ACTIVE

    def to_dict(self) -> dict:
        return {
            "pid": str(self.pid),
            "do_ref": self.do_ref,
            "do_checksum": self.do_checksum,
            "metadata_pid": str(self.metadata_pid),
            "class": self.class_name.value,
            "version": self.version,
            "created": self.created,
            "modified": self.modified,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, object]) -> FdoRecord:
        return cls(
            pid=Pid.parse(str(doc["pid"])),
            do_ref=str(doc["do_ref"]),
            do_checksum=None if doc.get("do_checksum") is None else str(doc["do_checksum"]),
            metadata_pid=Pid.parse(str(doc["metadata_pid"])),
            class_name=mm.as_class(doc["class"]),
            version=int(doc["version"]),  # type: ignore[arg-type]
            created=str(doc["created"]),
            modified=str(doc["modified"]),
            status=RecordStatus(doc["status"]),
        )


@dataclass(frozen=True)
class OperationDescriptor:
    """Operation Registry entry: an executable operation for given record classes."""

    op_id: str
    name: str
    http_method: str
    path_template: str
    applicable_classes: frozenset[MetadataClass]
    description: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.op_id, str) or not _OP_ID_RE.match(self.op_id):
            raise InvalidDescriptor(f"op_id must match [a-z0-9_.-]+: {self.op_id!r}")
        if not isinstance(self.name, str) or not self.name:
            raise InvalidDescriptor("name must be a non-empty string")
        if self.http_method not in _HTTP_METHODS:
            raise InvalidDescriptor(f"http_method must be one of {_HTTP_METHODS}")
        if (not isinstance(self.path_template, str)
                or not self.path_template.startswith("/")
                or self.path_template.count("{pid}") != 1):
            raise InvalidDescriptor(
                "path_template must start with '/' and contain '{pid}' exactly once")
        if not self.applicable_classes:
            raise InvalidDescriptor("applicable_classes must be non-empty")

    def to_dict(self) -> dict:
        return {
            "op_id": self.op_id,
            "name": self.name,
            "http_method": self.http_method,
            "path_template": self.path_template,
            "applicable_classes": sorted(c.value for c in self.applicable_classes),
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, object]) -> OperationDescriptor:
        classes = doc.get("applicable_classes")
        if not isinstance(classes, (list, tuple, set, frozenset)):
            raise InvalidDescriptor("applicable_classes must be a list of class names")
        try:
            applicable = frozenset(mm.as_class(c) for c in classes)
        except Exception:
            raise InvalidDescriptor(f"unknown class in applicable_classes: {classes!r}") from None
        return cls(
            op_id=str(doc.get("op_id", "")),
            name=str(doc.get("name", "")),
            http_method=str(doc.get("http_method", "")),
            path_template=str(doc.get("path_template", "")),
            applicable_classes=applicable,
            description=str(doc.get("description", "")),
        )


@dataclass(frozen=True)
class Tombstone:
    """Permanent resolution target of a deleted record's PID."""

    pid: Pid
    deleted_at: str
    reason: Optional[str]
    former_class: MetadataClass

    def to_dict(self) -> dict:
        return {
            "pid": str(self.pid),
            "deleted_at": self.deleted_at,
            "reason": self.reason,
            "former_class": self.former_class.value,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, object]) -> Tombstone:
        return cls(
            pid=Pid.parse(str(doc["pid"])),
            deleted_at=str(doc["deleted_at"]),
            reason=None if doc.get("reason") is None else str(doc["reason"]),
            former_class=mm.as_class(doc["former_class"]),
        )


@dataclass(frozen=True)
class ResolveResult:
    kind: str  # "fdo" | "metadata" | "tombstone"
    record: Union[FdoRecord, MetadataRecord, Tombstone]


@dataclass(frozen=True)
class Page:
    total: int
    items: tuple[FdoRecord, ...]


def builtin_operations() -> tuple[OperationDescriptor, ...]:
    """Descriptors seeded at startup so no record's operation set is ever empty."""
    every = frozenset(MetadataClass)
    return (
        OperationDescriptor(
            "delete", "Tombstone FDO record", "DELETE", "/fdos/{pid}", every,
            "Tombstone the record and its metadata; the PIDs stay resolvable."),
        OperationDescriptor(
            "get", "Retrieve FDO record", "GET", "/fdos/{pid}", every,
            "Fetch the catalog record with its nested metadata."),
        OperationDescriptor(
            "metadata", "Retrieve metadata", "GET", "/fdos/{pid}/metadata", every,
            "Fetch the standalone metadata record."),
        OperationDescriptor(
            "update", "Update FDO record", "PUT", "/fdos/{pid}", every,
            "Replace metadata properties and/or the digital-object reference."),
    )


def _valid_do_ref(value: object) -> bool:
    if not isinstance(value, str) or not value:
        return False
    parsed = urlparse(value)
    return bool(parsed.scheme) and bool(parsed.netloc or parsed.path)


class Registry:
    """FDO Registry, Metadata Registry, and Operation Registry in one store."""

    def __init__(self, prefix: Optional[str] = None, clock: Optional[Clock] = None,
                 journal: Optional[Journal] = None):
        self.prefix = prefix or DEFAULT_PREFIX
        self._clock = clock or utc_now
        self._journal = journal
        self._lock = threading.RLock()
        self._fdos: dict[str, FdoRecord] = {}
        self._metadata: dict[str, MetadataRecord] = {}
        self._tombstones: dict[str, Tombstone] = {}
        self._operations: dict[str, OperationDescriptor] = {
            d.op_id: d for d in builtin_operations()
        }
        self._relations = RelationIndex()
        self._events: list[JournalEvent] = []
        self._last_seq = 0

    # ------------------------------------------------------------------
    # event plumbing

    @property
    def last_seq(self) -> int:
        return self._last_seq

    def events(self) -> list[JournalEvent]:
        """Events applied in this instance (full history when built by full replay)."""
        with self._lock:
            return list(self._events)

    def attach_journal(self, journal: Journal) -> None:
        with self._lock:
            self._journal = journal

    def _now(self) -> str:
        return format_ts(self._clock())

    def _emit(self, parts: Sequence[tuple[str, dict]], ts: str) -> None:
        events = [
            JournalEvent(seq=self._last_seq + i + 1, ts=ts, kind=kind, payload=payload)
            for i, (kind, payload) in enumerate(parts)
        ]
        if self._journal is not None:
            self._journal.append(events)
        for event in events:
            self._dispatch(event)

    def apply_event(self, event: JournalEvent) -> None:
        """Replay path: apply one journaled event to in-memory state."""
        with self._lock:
            self._dispatch(event)

    def _dispatch(self, event: JournalEvent) -> None:
        kind, payload = event.kind, event.payload
        if kind == "metadata_created":
            record = MetadataRecord.from_jsonld(payload)
            self._metadata[str(record.pid)] = record
            self._relations.record_created(record)
        elif kind == "fdo_created":
            fdo = FdoRecord.from_dict(payload)
            self._fdos[str(fdo.pid)] = fdo
        elif kind == "metadata_updated":
            record = MetadataRecord.from_jsonld(payload)
            key = str(record.pid)
            self._relations.record_updated(self._metadata[key], record)
            self._metadata[key] = record
        elif kind == "fdo_updated":
            fdo = FdoRecord.from_dict(payload)
            self._fdos[str(fdo.pid)] = fdo
        elif kind == "fdo_tombstoned":
            tomb = Tombstone.from_dict(payload)
            key = str(tomb.pid)
            self._fdos[key] = replace(self._fdos[key], status=RecordStatus.TOMBSTONED)
            self._tombstones[key] = tomb
        elif kind == "metadata_tombstoned":
            tomb = Tombstone.from_dict(payload)
            key = str(tomb.pid)
            record = self._metadata[key]
            record.status = RecordStatus.TOMBSTONED
            self._tombstones[key] = tomb
        elif kind == "op_registered":
            descriptor = OperationDescriptor.from_dict(payload)
            self._operations[descriptor.op_id] = descriptor
        else:
            raise ValueError(f"unknown event kind: {kind!r}")
        self._events.append(event)
        self._last_seq = event.seq

    # ------------------------------------------------------------------
    # metadata resolution

    def _resolver(self, pid: Pid) -> Optional[tuple[MetadataClass, RecordStatus]]:
        record = self._metadata.get(str(pid))
        if record is None:
            return None
        return record.class_name, record.status

    def validate_properties(self, class_name: object, properties: Mapping[str, object],
                            *, allow_tombstoned_refs: bool = False) -> mm.ValidationReport:
        """Dry-run validation against the live metadata registry; no writes."""
        with self._lock:
            return mm.validate(class_name, properties, self._resolver,
                               allow_tombstoned_refs=allow_tombstoned_refs)

    # ------------------------------------------------------------------
    # FDO lifecycle

    def _mint_unused(self, taken: set[str]) -> Pid:
        pid = mint(self.prefix)
        if str(pid) in taken:
            pid = mint(self.prefix)  # retried once, then surfaced
            if str(pid) in taken:
                raise DuplicatePid(f"mint collision on {pid}")
        return pid

    def create_fdo(self, do_ref: str, class_name: object,
                   properties: Mapping[str, object],
                   do_checksum: Optional[str] = None) -> FdoRecord:
        with self._lock:
            if not _valid_do_ref(do_ref):
                raise InvalidDoRef(f"do_ref must be an absolute URI: {do_ref!r}")
            if do_checksum is not None and (
                    not isinstance(do_checksum, str) or not _CHECKSUM_RE.match(do_checksum)):
                raise InvalidChecksum(
                    f"do_checksum must be 'sha256:' + 64 hex digits: {do_checksum!r}")
            report = mm.validate(class_name, properties, self._resolver)
            if not report.ok:
                raise ValidationFailed(report)
            klass = mm.as_class(class_name)
            typed = mm.coerce_properties(klass, properties)

            taken = set(self._fdos) | set(self._metadata)
            metadata_pid = self._mint_unused(taken)
            taken.add(str(metadata_pid))
            fdo_pid = self._mint_unused(taken)

            now = self._now()
            metadata = MetadataRecord(
                pid=metadata_pid, class_name=klass, properties=typed,
                version=1, created=now, modified=now, status=RecordStatus.ACTIVE)
            fdo = FdoRecord(
                pid=fdo_pid, do_ref=do_ref, do_checksum=do_checksum,
                metadata_pid=metadata_pid, class_name=klass,
                version=1, created=now, modified=now, status=RecordStatus.ACTIVE)
            self._emit([
                ("metadata_created", metadata.to_jsonld()),
                ("fdo_created", fdo.to_dict()),
            ], now)
            return self._fdos[str(fdo_pid)]

    def get_fdo(self, pid: Pid) -> Union[FdoRecord, Tombstone]:
        with self._lock:
            key = str(pid)
            record = self._fdos.get(key)
            if record is None:
                raise NotFound(f"no FDO record for {pid}")
            if record.status is RecordStatus.TOMBSTONED:
                return self._tombstones[key]
            return record

    def get_metadata(self, pid: Pid) -> Union[MetadataRecord, Tombstone]:
        with self._lock:
            key = str(pid)
            record = self._metadata.get(key)
            if record is None:
                raise NotFound(f"no metadata record for {pid}")
            if record.status is RecordStatus.TOMBSTONED:
                return self._tombstones[key]
            return record

    def fdo_record(self, pid: Pid) -> FdoRecord:
        """The stored FDO record regardless of status (tombstoned included)."""
        with self._lock:
            record = self._fdos.get(str(pid))
            if record is None:
                raise NotFound(f"no FDO record for {pid}")
            return record

    def metadata_record(self, pid: Pid) -> MetadataRecord:
        """The stored metadata record regardless of status (tombstoned included)."""
        with self._lock:
            return self._known_metadata_pid(pid)

    def _active_fdo(self, pid: Pid) -> FdoRecord:
        key = str(pid)
        record = self._fdos.get(key)
        if record is None:
            raise NotFound(f"no FDO record for {pid}")
        if record.status is RecordStatus.TOMBSTONED:
            raise Gone(f"{pid} is tombstoned", self._tombstones[key])
        return record

    def update_fdo(self, pid: Pid, expected_version: int,
                   do_ref: Optional[str] = None,
                   properties: Optional[Mapping[str, object]] = None,
                   do_checksum: object = _UNSET,
                   class_name: object = None) -> FdoRecord:
        """Optimistically-versioned update; property maps are replaced wholesale."""
        with self._lock:
            record = self._active_fdo(pid)
            if class_name is not None and mm.as_class(class_name) is not record.class_name:
                raise ClassChangeForbidden(
                    f"record class is pinned to {record.class_name.value}")
            if expected_version != record.version:
                raise VersionConflict(
                    f"expected version {expected_version}, record is at {record.version}",
                    details={"current_version": record.version,
                             "expected_version": expected_version})
            if do_ref is not None and not _valid_do_ref(do_ref):
                raise InvalidDoRef(f"do_ref must be an absolute URI: {do_ref!r}")
            if do_checksum is not _UNSET and do_checksum is not None and (
                    not isinstance(do_checksum, str) or not _CHECKSUM_RE.match(do_checksum)):
                raise InvalidChecksum(
                    f"do_checksum must be 'sha256:' + 64 hex digits: {do_checksum!r}")

            now = self._now()
            parts: list[tuple[str, dict]] = []
            if properties is not None:
                report = mm.validate(record.class_name, properties, self._resolver)
                if not report.ok:
                    raise ValidationFailed(report)
                typed = mm.coerce_properties(record.class_name, properties)
                old_md = self._metadata[str(record.metadata_pid)]
                new_md = replace(old_md)
                new_md.properties = typed
                new_md.version = old_md.version + 1
                new_md.modified = now
                parts.append(("metadata_updated", new_md.to_jsonld()))

            new_fdo = replace(
                record,
                do_ref=do_ref if do_ref is not None else record.do_ref,
                do_checksum=record.do_checksum if do_checksum is _UNSET else do_checksum,  # type: ignore[arg-type]
                version=record.version + 1,
                modified=now)
            parts.append(("fdo_updated", new_fdo.to_dict()))
            self._emit(parts, now)
            return self._fdos[str(pid)]

    def delete_fdo(self, pid: Pid, reason: Optional[str] = None) -> Tombstone:
        """Tombstone the record and its metadata atomically; PIDs resolve forever."""
        with self._lock:
            record = self._active_fdo(pid)
            now = self._now()
            fdo_tomb = Tombstone(record.pid, now, reason, record.class_name)
            md_tomb = Tombstone(record.metadata_pid, now, reason, record.class_name)
            self._emit([
                ("fdo_tombstoned", fdo_tomb.to_dict()),
                ("metadata_tombstoned", md_tomb.to_dict()),
            ], now)
            return self._tombstones[str(pid)]

    def list_fdos(self, class_name: object = None, include_tombstoned: bool = False,
                  offset: int = 0, limit: int = DEFAULT_PAGE_LIMIT) -> Page:
        if not isinstance(offset, int) or isinstance(offset, bool) or offset < 0:
            raise InvalidPage(f"offset must be a non-negative integer: {offset!r}")
        if (not isinstance(limit, int) or isinstance(limit, bool)
                or not 1 <= limit <= MAX_PAGE_LIMIT):
            raise InvalidPage(f"limit must be in 1..{MAX_PAGE_LIMIT}: {limit!r}")
        klass = None if class_name is None else mm.as_class(class_name)
        with self._lock:
            matches = [
                r for r in self._fdos.values()
                if (include_tombstoned or r.status is RecordStatus.ACTIVE)
                and (klass is None or r.class_name is klass)
            ]
            matches.sort(key=lambda r: (r.created, str(r.pid)))
            return Page(total=len(matches), items=tuple(matches[offset:offset + limit]))

    def resolve_any(self, pid: Pid) -> ResolveResult:
        """Classify a PID across both registries (disjoint, so the answer is unique)."""
        with self._lock:
            key = str(pid)
            fdo = self._fdos.get(key)
            if fdo is not None:
                if fdo.status is RecordStatus.TOMBSTONED:
                    return ResolveResult("tombstone", self._tombstones[key])
                return ResolveResult("fdo", fdo)
            metadata = self._metadata.get(key)
            if metadata is not None:
                if metadata.status is RecordStatus.TOMBSTONED:
                    return ResolveResult("tombstone", self._tombstones[key])
                return ResolveResult("metadata", metadata)
            raise NotFound(f"PID never minted here: {pid}")

    # ------------------------------------------------------------------
    # operation registry

    def register_operation(self, descriptor: OperationDescriptor) -> OperationDescriptor:
        with self._lock:
            if descriptor.op_id in self._operations:
                raise DuplicateOpId(f"op_id already registered: {descriptor.op_id!r}")
            self._emit([("op_registered", descriptor.to_dict())], self._now())
            return self._operations[descriptor.op_id]

    def operations(self) -> list[OperationDescriptor]:
        with self._lock:
            return sorted(self._operations.values(), key=lambda d: d.op_id)

    def operations_for(self, pid: Pid) -> list[OperationDescriptor]:
        with self._lock:
            record = self._active_fdo(pid)
            return sorted(
                (d for d in self._operations.values()
                 if record.class_name in d.applicable_classes),
                key=lambda d: d.op_id)

    # ------------------------------------------------------------------
    # relations facade

    def _known_metadata_pid(self, pid: Pid) -> MetadataRecord:
        record = self._metadata.get(str(pid))
        if record is None:
            raise NotFound(f"no metadata record for {pid}")
        return record

    @staticmethod
    def _check_label(label: Optional[str]) -> None:
        from .relations import EDGE_LABELS
        if label is not None and label not in EDGE_LABELS:
            raise InvalidArgument(f"unknown edge label: {label!r}")

    def edges_from(self, pid: Pid, label: Optional[str] = None) -> list[Edge]:
        with self._lock:
            self._check_label(label)
            self._known_metadata_pid(pid)
            return self._relations.edges_from(pid, label)

    def edges_to(self, pid: Pid, label: Optional[str] = None) -> list[Edge]:
        with self._lock:
            self._check_label(label)
            self._known_metadata_pid(pid)
            return self._relations.edges_to(pid, label)

    def citation_closure(self, pid: Pid, direction: str, max_depth: int) -> list[ClosureHit]:
        with self._lock:
            if direction not in ("outbound", "inbound"):
                raise InvalidArgument(
                    f"direction must be 'outbound' or 'inbound': {direction!r}")
            if not isinstance(max_depth, int) or isinstance(max_depth, bool) or max_depth < 1:
                raise InvalidArgument(f"max_depth must be a positive integer: {max_depth!r}")
            record = self._known_metadata_pid(pid)
            if record.class_name is not MetadataClass.CREATIVE_WORK:
                raise NotACreativeWork(
                    f"{pid} is a {record.class_name.value}, not a CreativeWork")
            return self._relations.citation_closure(pid, direction, max_depth)

    def metadata_status(self, pid: Pid) -> Optional[RecordStatus]:
        with self._lock:
            record = self._metadata.get(str(pid))
            return None if record is None else record.status

    # ------------------------------------------------------------------
    # state snapshot / restore

    def state_dump(self) -> dict:
        """Canonical full-state dict; identical states serialize identically."""
        with self._lock:
            return {
                "format_version": 1,
                "prefix": self.prefix,
                "last_seq": self._last_seq,
                "fdo_records": [
                    self._fdos[k].to_dict() for k in sorted(self._fdos)
                ],
                "metadata_records": [
                    self._metadata[k].to_jsonld() for k in sorted(self._metadata)
                ],
                "tombstones": [
                    self._tombstones[k].to_dict() for k in sorted(self._tombstones)
                ],
                "operations": [d.to_dict() for d in self.operations()],
            }

    @classmethod
    def from_state(cls, state: Mapping[str, object], *, prefix: Optional[str] = None,
                   clock: Optional[Clock] = None) -> Registry:
        registry = cls(prefix=prefix or str(state.get("prefix") or DEFAULT_PREFIX),
                       clock=clock)
        for doc in state["fdo_records"]:  # type: ignore[index]
            fdo = FdoRecord.from_dict(doc)
            registry._fdos[str(fdo.pid)] = fdo
        for doc in state["metadata_records"]:  # type: ignore[index]
            record = MetadataRecord.from_jsonld(doc)
            registry._metadata[str(record.pid)] = record
        for doc in state["tombstones"]:  # type: ignore[index]
            tomb = Tombstone.from_dict(doc)
            registry._tombstones[str(tomb.pid)] = tomb
        for doc in state["operations"]:  # type: ignore[index]
            descriptor = OperationDescriptor.from_dict(doc)
            registry._operations[descriptor.op_id] = descriptor
        registry._relations.rebuild(registry._metadata.values())
        registry._last_seq = int(state["last_seq"])  # type: ignore[arg-type]
        return registry

    def export_records(self) -> list[dict]:
        """Denormalized record pairs (tombstones included), in catalog order."""
        with self._lock:
            items = []
            for key in sorted(self._fdos, key=lambda k: (self._fdos[k].created, k)):
                fdo = self._fdos[key]
                metadata = self._metadata[str(fdo.metadata_pid)]
                tombstones = None
                if fdo.status is RecordStatus.TOMBSTONED:
                    tombstones = [
                        self._tombstones[key].to_dict(),
                        self._tombstones[str(fdo.metadata_pid)].to_dict(),
                    ]
                items.append({"fdo": fdo.to_dict(), "metadata": metadata.to_jsonld(),
                              "tombstones": tombstones})
            return items

    def export_operations(self) -> list[dict]:
        """Registered descriptors, excluding the seeded built-ins."""
        builtin = {d.op_id: d for d in builtin_operations()}
        return [d.to_dict() for d in self.operations() if builtin.get(d.op_id) != d]

    # ------------------------------------------------------------------
    # integrity

    def verify_integrity(self, check_schema: bool = True) -> list[str]:
        """Check every cross-registry invariant; returns human-readable problems.

        ``check_schema=False`` limits the check to structural invariants
        (dual-PID, disjointness, resolution, versioning, edge index), for
        admitting historical data whose schema has since drifted.
        """
        problems: list[str] = []
        with self._lock:
            overlap = set(self._fdos) & set(self._metadata)
            if overlap:
                problems.append(f"registries share PIDs: {sorted(overlap)}")
            for key, fdo in self._fdos.items():
                if str(fdo.metadata_pid) == key:
                    problems.append(f"{key}: pid equals metadata_pid")
                metadata = self._metadata.get(str(fdo.metadata_pid))
                if metadata is None:
                    problems.append(f"{key}: metadata_pid does not resolve")
                    continue
                if metadata.class_name is not fdo.class_name:
                    problems.append(f"{key}: class diverges from metadata record")
                if fdo.version < 1:
                    problems.append(f"{key}: version below 1")
                if (fdo.status is RecordStatus.TOMBSTONED) != (key in self._tombstones):
                    problems.append(f"{key}: tombstone bookkeeping inconsistent")
            for key, record in self._metadata.items():
                if not check_schema or record.status is not RecordStatus.ACTIVE:
                    continue
                report = mm.validate(record.class_name, record.properties,
                                     self._resolver, allow_tombstoned_refs=True)
                if not report.ok:
                    problems.append(f"{key}: stored metadata no longer validates: "
                                    f"{[v.code for v in report.violations]}")
            rebuilt = RelationIndex()
            rebuilt.rebuild(self._metadata.values())
            for key in set(self._metadata):
                pid = Pid.parse(key)
                if self._relations.edges_from(pid) != rebuilt.edges_from(pid):
                    problems.append(f"{key}: outbound edge index diverges from metadata")
                if self._relations.edges_to(pid) != rebuilt.edges_to(pid):
                    problems.append(f"{key}: inbound edge index diverges from metadata")
        return problems

    # ------------------------------------------------------------------
    # bulk import (CLI): re-admit exported records preserving PIDs and versions

    def import_snapshot_records(self, items: Sequence[Mapping[str, object]],
                                operations: Iterable[Mapping[str, object]] = (),
                                *, validate: bool = True) -> int:
        """Insert exported record pairs wholesale.

        Each item is {"fdo": ..., "metadata": ..., "tombstones": [...] | None}.
        Validation runs against the union of existing records and the whole
        incoming bundle (tombstoned targets allowed: the dump flattens
        history, and refs only had to be live at original write time).
        Returns the number of record pairs imported. Raises before any event
        is emitted, so a failed import changes nothing.
        """
        with self._lock:
            staged: list[tuple[FdoRecord, MetadataRecord, Optional[list[Tombstone]]]] = []
            incoming_md: dict[str, MetadataRecord] = {}
            for item in items:
                fdo = FdoRecord.from_dict(item["fdo"])  # type: ignore[arg-type]
                metadata = MetadataRecord.from_jsonld(item["metadata"])  # type: ignore[arg-type]
                tombs_doc = item.get("tombstones")
                tombs = ([Tombstone.from_dict(t) for t in tombs_doc]  # type: ignore[union-attr]
                         if tombs_doc else None)
                if fdo.metadata_pid != metadata.pid:
                    raise ValueError(f"{fdo.pid}: fdo/metadata pair mismatch")
                staged.append((fdo, metadata, tombs))
                incoming_md[str(metadata.pid)] = metadata

            seen: set[str] = set(self._fdos) | set(self._metadata)
            for fdo, metadata, _ in staged:
                for key in (str(fdo.pid), str(metadata.pid)):
                    if key in seen:
                        raise DuplicatePid(f"PID already present: {key}")
                    seen.add(key)

            if validate:
                def resolver(pid: Pid):
                    record = incoming_md.get(str(pid)) or self._metadata.get(str(pid))
                    if record is None:
                        return None
                    return record.class_name, record.status

                for fdo, metadata, _ in staged:
                    if not _valid_do_ref(fdo.do_ref):
                        raise InvalidDoRef(f"{fdo.pid}: do_ref is not an absolute URI")
                    report = mm.validate(metadata.class_name, metadata.properties,
                                         resolver, allow_tombstoned_refs=True)
                    if not report.ok:
                        raise ValidationFailed(report)

            new_ops: list[OperationDescriptor] = []
            for doc in operations:
                descriptor = OperationDescriptor.from_dict(doc)
                existing = self._operations.get(descriptor.op_id)
                if existing is None:
                    new_ops.append(descriptor)
                elif existing != descriptor:
                    raise DuplicateOpId(
                        f"op_id {descriptor.op_id!r} already registered with different content")

            parts: list[tuple[str, dict]] = []
            tombstone_parts: list[tuple[str, list[tuple[str, dict]]]] = []
            for fdo, metadata, tombs in sorted(
                    staged, key=lambda s: (s[0].created, str(s[0].pid))):
                live_md = replace(metadata)
                live_md.status = RecordStatus.ACTIVE
                live_fdo = replace(fdo, status=RecordStatus.ACTIVE)
                parts.append(("metadata_created", live_md.to_jsonld()))
                parts.append(("fdo_created", live_fdo.to_dict()))
                if tombs:
                    by_pid = {str(t.pid): t for t in tombs}
                    fdo_tomb = by_pid[str(fdo.pid)]
                    md_tomb = by_pid[str(metadata.pid)]
                    tombstone_parts.append((fdo_tomb.deleted_at, [
                        ("fdo_tombstoned", fdo_tomb.to_dict()),
                        ("metadata_tombstoned", md_tomb.to_dict()),
                    ]))

            # Creates first (refs were validated bundle-wide), then tombstones
            # in deletion order.
            for _, pair in sorted(tombstone_parts, key=lambda t: t[0]):
                parts.extend(pair)

            # Emit per pair so event timestamps track each record's own history.
            i = 0
            while i < len(parts):
                kind = parts[i][0]
                if kind == "metadata_created":
                    ts = str(parts[i][1]["created"])
                elif kind == "fdo_tombstoned":
                    ts = str(parts[i][1]["deleted_at"])
                else:
                    ts = self._now()
                self._emit(parts[i:i + 2], ts)
                i += 2
            for descriptor in new_ops:
                self._emit([("op_registered", descriptor.to_dict())], self._now())
            return len(staged)
