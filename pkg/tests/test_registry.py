"""Record lifecycle, catalog, operation registry, and registry-wide invariants."""

from __future__ import annotations

import random
import threading

import pytest

from fdom.errors import (
    ClassChangeForbidden,
    DuplicateOpId,
    Gone,
    InvalidChecksum,
    InvalidDescriptor,
    InvalidDoRef,
    InvalidPage,
    NotFound,
    ValidationFailed,
    VersionConflict,
)
from fdom.metadata_model import RecordStatus
from fdom.pid import Pid
from fdom.registry import (
    OperationDescriptor,
    Registry,
    Tombstone,
    builtin_operations,
)

import oracles
from builders import create_org, create_person, create_service, create_work, md
from workload import run_workload

NEVER = Pid.parse("fdom.local/00000000000000000000000000000000")


# ----------------------------------------------------------------- create


def test_create_assigns_dual_pids(registry):
    person = create_person(registry)
    assert person.pid != person.metadata_pid
    assert person.version == 1
    assert person.status is RecordStatus.ACTIVE
    assert registry.resolve_any(person.pid).kind == "fdo"
    assert registry.resolve_any(person.metadata_pid).kind == "metadata"

    metadata = registry.get_metadata(person.metadata_pid)
    assert metadata.version == 1
    assert metadata.class_name.value == "Person"
    assert metadata.created == person.created


def test_create_read_your_write(registry):
    work = create_work(registry, [md(create_person(registry))])
    assert registry.get_fdo(work.pid) == work
    page = registry.list_fdos()
    assert work in page.items


def test_registries_are_disjoint_keyspaces(registry):
    person = create_person(registry)
    with pytest.raises(NotFound):
        registry.get_fdo(person.metadata_pid)
    with pytest.raises(NotFound):
        registry.get_metadata(person.pid)
    with pytest.raises(NotFound):
        registry.resolve_any(NEVER)


def test_create_rejections(registry):
    with pytest.raises(InvalidDoRef):
        registry.create_fdo(do_ref="not a uri", class_name="Person",
                            properties={"name": "X"})
    with pytest.raises(InvalidChecksum):
        registry.create_fdo(do_ref="https://x.example/1", class_name="Person",
                            properties={"name": "X"}, do_checksum="md5:abc")
    with pytest.raises(ValidationFailed) as exc:
        registry.create_fdo(do_ref="https://x.example/1", class_name="CreativeWork",
                            properties={"name": "X", "additionalType": "Dataset",
                                        "creator": [str(NEVER)]})
    codes = [v.code for v in exc.value.report.violations]
    assert codes == ["DANGLING_REF"]
    with pytest.raises(ValidationFailed) as exc:
        registry.create_fdo(do_ref="https://x.example/1", class_name="Event",
                            properties={"name": "X"})
    assert [v.code for v in exc.value.report.violations] == ["UNKNOWN_CLASS"]
    assert registry.list_fdos().total == 0  # nothing was written


def test_create_stores_checksum(registry):
    checksum = "sha256:" + "ab" * 32
    person = registry.create_fdo(do_ref="https://x.example/1", class_name="Person",
                                 properties={"name": "X"}, do_checksum=checksum)
    assert registry.get_fdo(person.pid).do_checksum == checksum


# ----------------------------------------------------------------- update


def test_update_bumps_both_versions(registry):
    person = create_person(registry)
    updated = registry.update_fdo(person.pid, expected_version=1,
                                  properties={"name": "Renamed"})
    assert updated.version == 2
    metadata = registry.get_metadata(person.metadata_pid)
    assert metadata.version == 2
    assert metadata.properties["name"] == "Renamed"
    assert updated.modified > person.modified
    assert updated.created == person.created


def test_update_do_ref_only_keeps_metadata_version(registry):
    person = create_person(registry)
    updated = registry.update_fdo(person.pid, expected_version=1,
                                  do_ref="https://moved.example/1")
    assert updated.version == 2
    assert updated.do_ref == "https://moved.example/1"
    assert registry.get_metadata(person.metadata_pid).version == 1


def test_update_replaces_properties_wholesale(registry):
    person = create_person(registry, email="ada@example.org")
    registry.update_fdo(person.pid, expected_version=1,
                        properties={"name": "Ada"})
    metadata = registry.get_metadata(person.metadata_pid)
    assert "email" not in metadata.properties


def test_update_stale_version_conflict(registry):
    person = create_person(registry)
    registry.update_fdo(person.pid, expected_version=1, properties={"name": "B"})
    with pytest.raises(VersionConflict) as exc:
        registry.update_fdo(person.pid, expected_version=1, properties={"name": "C"})
    assert exc.value.details == {"current_version": 2, "expected_version": 1}
    assert registry.get_metadata(person.metadata_pid).properties["name"] == "B"


def test_update_class_pinned(registry):
    person = create_person(registry)
    with pytest.raises(ClassChangeForbidden):
        registry.update_fdo(person.pid, expected_version=1,
                            class_name="Organization")
    # Restating the same class is not a change.
    updated = registry.update_fdo(person.pid, expected_version=1,
                                  class_name="Person", properties={"name": "Ada"})
    assert updated.version == 2


def test_update_validation_failure_changes_nothing(registry):
    person = create_person(registry)
    with pytest.raises(ValidationFailed):
        registry.update_fdo(person.pid, expected_version=1,
                            properties={"name": "X", "bogus": "y"})
    assert registry.get_fdo(person.pid).version == 1
    assert registry.get_metadata(person.metadata_pid).version == 1


def test_update_missing_and_tombstoned(registry):
    with pytest.raises(NotFound):
        registry.update_fdo(NEVER, expected_version=1, properties={"name": "X"})
    person = create_person(registry)
    registry.delete_fdo(person.pid)
    with pytest.raises(Gone):
        registry.update_fdo(person.pid, expected_version=1,
                            properties={"name": "X"})


def test_concurrent_updates_one_wins(registry):
    person = create_person(registry)
    barrier = threading.Barrier(2)
    outcomes: list[str] = []

    def attempt(name: str) -> None:
        barrier.wait()
        try:
            registry.update_fdo(person.pid, expected_version=1,
                                properties={"name": name})
            outcomes.append("ok")
        except VersionConflict:
            outcomes.append("conflict")

    threads = [threading.Thread(target=attempt, args=(n,)) for n in ("A", "B")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(outcomes) == ["conflict", "ok"]
    assert registry.get_fdo(person.pid).version == 2


# ----------------------------------------------------------------- delete


def test_delete_tombstones_both_registries(registry):
    person = create_person(registry)
    tombstone = registry.delete_fdo(person.pid, reason="superseded")
    assert isinstance(tombstone, Tombstone)
    assert tombstone.reason == "superseded"
    assert tombstone.former_class.value == "Person"

    fdo_side = registry.get_fdo(person.pid)
    md_side = registry.get_metadata(person.metadata_pid)
    assert isinstance(fdo_side, Tombstone) and fdo_side == tombstone
    assert isinstance(md_side, Tombstone)
    assert md_side.deleted_at == tombstone.deleted_at
    assert registry.resolve_any(person.pid).kind == "tombstone"
    assert registry.resolve_any(person.metadata_pid).kind == "tombstone"


def test_delete_twice_is_gone_with_same_tombstone(registry):
    person = create_person(registry)
    tombstone = registry.delete_fdo(person.pid)
    with pytest.raises(Gone) as exc:
        registry.delete_fdo(person.pid)
    assert exc.value.tombstone == tombstone
    with pytest.raises(NotFound):
        registry.delete_fdo(NEVER)


def test_pid_permanence_after_delete(registry):
    person = create_person(registry)
    registry.delete_fdo(person.pid)
    # Still resolvable, still classified; never NotFound again.
    assert registry.resolve_any(person.pid).kind == "tombstone"
    tomb = registry.get_fdo(person.pid)
    assert tomb.pid == person.pid


# ------------------------------------------------------------------ list


def test_list_sorts_filters_and_counts(registry):
    person = create_person(registry)
    org = create_org(registry)
    works = [create_work(registry, [md(person)], name=f"W{i}") for i in range(3)]
    registry.delete_fdo(works[0].pid)

    default = registry.list_fdos()
    assert default.total == 4  # person, org, two live works
    assert [r.pid for r in default.items] == sorted(
        (r.pid for r in default.items),
        key=lambda p: (registry.fdo_record(p).created, str(p)))

    everything = registry.list_fdos(include_tombstoned=True)
    assert everything.total == 5

    only_works = registry.list_fdos(class_name="CreativeWork")
    assert only_works.total == 2
    with_dead = registry.list_fdos(class_name="CreativeWork", include_tombstoned=True)
    assert with_dead.total == 3

    assert registry.list_fdos(class_name="Service").total == 0


def test_list_pagination_sweep_equals_full(registry):
    person = create_person(registry)
    for i in range(7):
        create_work(registry, [md(person)], name=f"W{i}")
    full = registry.list_fdos(limit=500)
    swept = []
    offset = 0
    while True:
        page = registry.list_fdos(offset=offset, limit=2)
        assert page.total == full.total
        swept.extend(page.items)
        if not page.items:
            break
        offset += len(page.items)
    assert swept == list(full.items)


@pytest.mark.parametrize("kwargs", [
    {"offset": -1},
    {"limit": 0},
    {"limit": 501},
    {"limit": True},
    {"offset": "3"},
])
def test_list_invalid_page(registry, kwargs):
    with pytest.raises(InvalidPage):
        registry.list_fdos(**kwargs)


def test_catalog_completeness(registry):
    rng = random.Random(4242)
    run_workload(registry, rng, n_ops=60)
    created = {doc["pid"] for doc in registry.state_dump()["fdo_records"]}
    listed = {str(r.pid)
              for r in registry.list_fdos(include_tombstoned=True, limit=500).items}
    assert listed == created


# ------------------------------------------------------------ operations


def test_builtin_operations_seeded(registry):
    person = create_person(registry)
    ops = registry.operations_for(person.pid)
    assert [d.op_id for d in ops] == ["delete", "get", "metadata", "update"]
    assert set(builtin_operations()) <= set(registry.operations())


def test_register_and_filter_operations(registry):
    person = create_person(registry)
    work = create_work(registry, [md(person)])
    registry.register_operation(OperationDescriptor.from_dict({
        "op_id": "render", "name": "Render", "http_method": "GET",
        "path_template": "/render/{pid}", "applicable_classes": ["CreativeWork"],
        "description": "thumbnail"}))

    work_ops = [d.op_id for d in registry.operations_for(work.pid)]
    person_ops = [d.op_id for d in registry.operations_for(person.pid)]
    assert "render" in work_ops
    assert "render" not in person_ops
    assert work_ops == sorted(work_ops)

    with pytest.raises(DuplicateOpId):
        registry.register_operation(OperationDescriptor.from_dict({
            "op_id": "render", "name": "Other", "http_method": "GET",
            "path_template": "/other/{pid}", "applicable_classes": ["Service"],
            "description": ""}))


def test_operations_for_matches_linear_scan(registry):
    rng = random.Random(99)
    run_workload(registry, rng, n_ops=80)
    table = [d.to_dict() for d in registry.operations()]
    for record in registry.list_fdos(limit=500).items:
        expected = oracles.operations_for(table, record.class_name.value)
        actual = [d.to_dict() for d in registry.operations_for(record.pid)]
        assert actual == expected


def test_operations_for_requires_active_record(registry):
    person = create_person(registry)
    with pytest.raises(NotFound):
        registry.operations_for(person.metadata_pid)
    registry.delete_fdo(person.pid)
    with pytest.raises(Gone):
        registry.operations_for(person.pid)


@pytest.mark.parametrize("doc", [
    {"op_id": "UPPER", "http_method": "GET", "path_template": "/x/{pid}",
     "applicable_classes": ["Person"]},
    {"op_id": "ok", "http_method": "FETCH", "path_template": "/x/{pid}",
     "applicable_classes": ["Person"]},
    {"op_id": "ok", "http_method": "GET", "path_template": "x/{pid}",
     "applicable_classes": ["Person"]},
    {"op_id": "ok", "http_method": "GET", "path_template": "/x",
     "applicable_classes": ["Person"]},
    {"op_id": "ok", "http_method": "GET", "path_template": "/x/{pid}/y/{pid}",
     "applicable_classes": ["Person"]},
    {"op_id": "ok", "http_method": "GET", "path_template": "/x/{pid}",
     "applicable_classes": []},
])
def test_invalid_descriptors(registry, doc):
    doc = {"name": "X", "description": "", **doc}
    with pytest.raises(InvalidDescriptor):
        registry.register_operation(OperationDescriptor.from_dict(doc))


# ------------------------------------------------------------ invariants


def test_version_monotonicity(registry):
    person = create_person(registry)
    for i in range(5):
        record = registry.fdo_record(person.pid)
        updated = registry.update_fdo(person.pid, expected_version=record.version,
                                      properties={"name": f"v{i}"})
        assert updated.version == record.version + 1
        assert registry.get_metadata(person.metadata_pid).version == updated.version


def test_state_dump_round_trip(registry):
    rng = random.Random(31337)
    run_workload(registry, rng, n_ops=60)
    dump = registry.state_dump()
    clone = Registry.from_state(dump)
    assert clone.state_dump() == dump


def test_integrity_clean_after_workload(registry):
    rng = random.Random(2718)
    run_workload(registry, rng, n_ops=120)
    assert registry.verify_integrity() == []


def test_export_records_shape(registry):
    person = create_person(registry)
    work = create_work(registry, [md(person)])
    registry.delete_fdo(work.pid, reason="gone")
    items = registry.export_records()
    assert [i["fdo"]["pid"] for i in items] == [str(person.pid), str(work.pid)]
    assert items[0]["tombstones"] is None
    dead = items[1]
    assert {t["pid"] for t in dead["tombstones"]} == {str(work.pid),
                                                      str(work.metadata_pid)}
    assert dead["metadata"]["@type"] == "CreativeWork"
    # Built-ins are implicit; only registered descriptors are exported.
    assert registry.export_operations() == []
    registry.register_operation(OperationDescriptor.from_dict({
        "op_id": "extra", "name": "X", "http_method": "GET",
        "path_template": "/x/{pid}", "applicable_classes": ["Person"],
        "description": ""}))
    assert [d["op_id"] for d in registry.export_operations()] == ["extra"]
