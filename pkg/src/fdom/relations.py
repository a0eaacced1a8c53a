"""The relationship graph implied by entity-reference properties.

Edges are an index derived from metadata property maps, never independent
state: creating or updating a record re-derives its outbound edges, and
tombstoning freezes them (the record keeps its property map, so the index
stays exactly re-derivable from stored metadata at any time).

Labels are fixed: citation (CreativeWork to CreativeWork), creator,
provider, and affiliation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .metadata_model import EntityRef, MetadataClass, MetadataRecord
from .pid import Pid

EDGE_LABELS = ("affiliation", "citation", "creator", "provider")

# (class, property name) -> edge label
_PROPERTY_LABELS: dict[tuple[MetadataClass, str], str] = {
    (MetadataClass.CREATIVE_WORK, "creator"): "creator",
    (MetadataClass.CREATIVE_WORK, "citation"): "citation",
    (MetadataClass.SERVICE, "provider"): "provider",
    (MetadataClass.PERSON, "affiliation"): "affiliation",
}


@dataclass(frozen=True)
class Edge:
    """A directed edge between two metadata PIDs.

    ``ordinal`` is the position within the source list property (0 for
    scalar references), making (source, label, ordinal) unique.
    """

    source: Pid
    target: Pid
    label: str
    ordinal: int

    def to_dict(self) -> dict:
        return {
            "from": str(self.source),
            "to": str(self.target),
            "label": self.label,
            "ordinal": self.ordinal,
        }


def edges_of(record: MetadataRecord) -> list[Edge]:
    """Derive the outbound edges of one record from its property map."""
    edges: list[Edge] = []
    for name, value in record.properties.items():
        label = _PROPERTY_LABELS.get((record.class_name, name))
        if label is None:
            continue
        if isinstance(value, EntityRef):
            edges.append(Edge(record.pid, value.target, label, 0))
        elif isinstance(value, tuple):
            for i, item in enumerate(value):
                if isinstance(item, EntityRef):
                    edges.append(Edge(record.pid, item.target, label, i))
    return edges


@dataclass(frozen=True)
class ClosureHit:
    pid: Pid
    depth: int

    def to_dict(self) -> dict:
        return {"pid": str(self.pid), "depth": self.depth}


class RelationIndex:
    """Incremental edge index over the metadata registry."""

    def __init__(self) -> None:
        self._outbound: dict[str, list[Edge]] = {}
        self._inbound: dict[str, list[Edge]] = {}

    def record_created(self, record: MetadataRecord) -> None:
        self._insert(edges_of(record))

    def record_updated(self, old: MetadataRecord, new: MetadataRecord) -> None:
        self._remove(self._outbound.get(str(old.pid), []))
        self._insert(edges_of(new))

    def rebuild(self, records: Iterable[MetadataRecord]) -> None:
        self._outbound.clear()
        self._inbound.clear()
        for record in records:
            self._insert(edges_of(record))

    def _insert(self, edges: list[Edge]) -> None:
        for e in edges:
            self._outbound.setdefault(str(e.source), []).append(e)
            self._inbound.setdefault(str(e.target), []).append(e)

    def _remove(self, edges: list[Edge]) -> None:
        for e in list(edges):
            out = self._outbound.get(str(e.source), [])
            if e in out:
                out.remove(e)
            inb = self._inbound.get(str(e.target), [])
            if e in inb:
                inb.remove(e)

    def edges_from(self, pid: Pid, label: Optional[str] = None) -> list[Edge]:
        edges = self._outbound.get(str(pid), [])
        if label is not None:
            edges = [e for e in edges if e.label == label]
        return sorted(edges, key=lambda e: (e.label, e.ordinal))

    def edges_to(self, pid: Pid, label: Optional[str] = None) -> list[Edge]:
        edges = self._inbound.get(str(pid), [])
        if label is not None:
            edges = [e for e in edges if e.label == label]
        return sorted(edges, key=lambda e: (str(e.source), e.label, e.ordinal))

    def citation_closure(self, start: Pid, direction: str, max_depth: int) -> list[ClosureHit]:
        """Breadth-first closure over citation edges only.

        Every node reachable by a citation path of length 1..max_depth is
        reported once, at its minimum depth. The start node itself appears
        only if a cycle leads back to it (at the cycle's length), which also
        covers self-citation at depth 1.
        """
        if direction == "outbound":
            def neighbors(p: Pid) -> list[Pid]:
                return [e.target for e in self.edges_from(p, "citation")]
        else:
            def neighbors(p: Pid) -> list[Pid]:
                return [e.source for e in self.edges_to(p, "citation")]

        hits: list[ClosureHit] = []
        visited: set[str] = set()
        queue: deque[tuple[Pid, int]] = deque([(start, 0)])
        while queue:
            node, depth = queue.popleft()
            if depth >= max_depth:
                continue
            for nxt in neighbors(node):
                key = str(nxt)
                if key in visited:
                    continue
                visited.add(key)
                hits.append(ClosureHit(nxt, depth + 1))
                queue.append((nxt, depth + 1))
        return sorted(hits, key=lambda h: (h.depth, str(h.pid)))
