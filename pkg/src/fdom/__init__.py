"""fdom: a minimum-viable FAIR Digital Object manager.

Dual-PID registries (catalog + standalone metadata), Schema.org-derived
metadata validation, a citation/relationship index, an append-only journal
with snapshot recovery, a REST API, and an operator CLI.
"""

from . import errors
from .metadata_model import (
    EntityRef,
    MetadataClass,
    MetadataRecord,
    RecordStatus,
    ValidationReport,
    class_schema,
    validate,
)
from .pid import DEFAULT_PREFIX, Pid, mint
from .registry import (
    FdoRecord,
    OperationDescriptor,
    Registry,
    ResolveResult,
    Tombstone,
    builtin_operations,
)
from .relations import ClosureHit, Edge
from .store import Journal, JournalEvent, load_registry, read_journal, replay, write_snapshot

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PREFIX",
    "ClosureHit",
    "Edge",
    "EntityRef",
    "FdoRecord",
    "Journal",
    "JournalEvent",
    "MetadataClass",
    "MetadataRecord",
    "OperationDescriptor",
    "Pid",
    "RecordStatus",
    "Registry",
    "ResolveResult",
    "Tombstone",
    "ValidationReport",
    "builtin_operations",
    "class_schema",
    "errors",
    "load_registry",
    "mint",
    "read_journal",
    "replay",
    "validate",
    "write_snapshot",
    "__version__",
]
