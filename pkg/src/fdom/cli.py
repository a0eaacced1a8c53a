"""Operator CLI: run the server, bulk import/export catalogs, validate metadata offline.

Exit codes are a stable scripting contract: 0 success, 1 validation or
domain failure, 2 usage or IO failure.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import metadata_model as mm
from .errors import DuplicatePid, FdomError, LockHeld, MalformedBody, ValidationFailed
from .pid import DEFAULT_PREFIX, Pid
from .registry import Registry
from .store import (
    JOURNAL_NAME,
    JournalEvent,
    check_pairing,
    data_dir_lock,
    load_registry,
    read_journal,
    replay,
    trim_dangling_pair,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_LISTEN = "127.0.0.1:8490"

_METADATA_ENVELOPE = ("@context", "@type", "pid", "version", "created", "modified", "status")


def _fail(message: str, code: int) -> int:
    print(f"fdom: error: {message}", file=sys.stderr)
    return code


def _parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise ValueError(f"listen address must be host:port, got {value!r}")
    return host, int(port)


def _data_dir(args: argparse.Namespace, create: bool = True) -> Path:
    path = Path(args.data_dir)
    if path.exists() and not path.is_dir():
        raise NotADirectoryError(f"data dir is not a directory: {path}")
    if create:
        path.mkdir(parents=True, exist_ok=True)
    return path


# ----------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    try:
        data_dir = _data_dir(args)
        host, port = _parse_listen(args.listen)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    # uvicorn re-raises a captured SIGTERM with the default disposition once
    # it has shut down, which would kill us before the LOCK file is removed.
    # Turn it into SystemExit so the lock context manager unwinds.
    try:
        signal.signal(signal.SIGTERM, lambda signum, frame: sys.exit(0))
    except ValueError:
        pass  # not the main thread (e.g. under test); lock cleanup is the caller's job
    try:
        with data_dir_lock(data_dir):
            registry = load_registry(data_dir, prefix=args.prefix)
            app = create_app(registry, cors_origins=[args.cors_origin],
                             playground_dir=args.playground_dir)
            print(f"fdom: serving {data_dir} (prefix {registry.prefix}) "
                  f"on http://{host}:{port}")
            uvicorn.run(app, host=host, port=port, log_level="warning")
    except LockHeld as exc:
        return _fail(exc.message, EXIT_USAGE)
    except KeyboardInterrupt:
        pass
    except FdomError as exc:
        return _fail(exc.message, EXIT_DOMAIN)
    return EXIT_OK


# ----------------------------------------------------------------------
# export / import


def cmd_export(args: argparse.Namespace) -> int:
    try:
        data_dir = _data_dir(args, create=False)
        if not data_dir.is_dir():
            return _fail(f"no such data dir: {data_dir}", EXIT_USAGE)
        with data_dir_lock(data_dir):
            if args.mode == "events":
                events = trim_dangling_pair(read_journal(data_dir / JOURNAL_NAME))
                dump = {"format_version": 1, "mode": "events",
                        "events": [e.to_dict() for e in events]}
            else:
                registry = load_registry(data_dir, prefix=args.prefix,
                                         attach_journal=False)
                dump = {"format_version": 1, "mode": "records",
                        "records": registry.export_records(),
                        "operations": registry.export_operations()}
        Path(args.file).write_text(json.dumps(dump, indent=2, ensure_ascii=False) + "\n",
                                   encoding="utf-8")
    except LockHeld as exc:
        return _fail(exc.message, EXIT_USAGE)
    except FdomError as exc:
        return _fail(exc.message, EXIT_DOMAIN)
    except OSError as exc:
        return _fail(str(exc), EXIT_USAGE)
    print(f"fdom: exported {args.file}")
    return EXIT_OK


def _metadata_payload_properties(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if k not in _METADATA_ENVELOPE}


def _apply_import_events(registry: Registry, docs: list, validate: bool) -> None:
    """Replay dumped events onto a registry, renumbering and re-validating.

    Validation runs sequentially, so every entity reference must have been
    live when the original write happened, exactly as on the normal write
    path. Raises before the first bad event is applied.
    """
    events = [JournalEvent.from_dict(d) for d in docs]
    for i, event in enumerate(events):
        if event.seq != i + 1:
            raise ValueError(f"event list has a sequence gap at position {i + 1}")
    check_pairing(events)
    base = registry.last_seq
    for event in events:
        renumbered = JournalEvent(seq=base + event.seq, ts=event.ts,
                                  kind=event.kind, payload=event.payload)
        payload = renumbered.payload
        if event.kind in ("metadata_created", "fdo_created"):
            taken = str(payload["pid"])
            try:
                registry.resolve_any(Pid.parse(taken))
            except FdomError:
                pass
            else:
                raise DuplicatePid(f"PID already present: {taken}")
        if validate and event.kind in ("metadata_created", "metadata_updated"):
            report = registry.validate_properties(
                payload["@type"], _metadata_payload_properties(payload))
            if not report.ok:
                raise ValidationFailed(report)
        registry.apply_event(renumbered)


def cmd_import(args: argparse.Namespace) -> int:
    try:
        dump = json.loads(Path(args.file).read_text(encoding="utf-8"))
        if not isinstance(dump, dict) or dump.get("format_version") != 1:
            raise ValueError("not a format_version 1 catalog dump")
        mode = dump.get("mode", "events" if "events" in dump else "records")
        if mode not in ("events", "records"):
            raise ValueError(f"unknown dump mode: {mode!r}")
        data_dir = _data_dir(args)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot read dump: {exc}", EXIT_USAGE)

    journal_path = data_dir / JOURNAL_NAME
    populated = journal_path.exists() and journal_path.stat().st_size > 0
    if populated and not args.merge:
        return _fail(f"data dir {data_dir} is not empty (use --merge)", EXIT_USAGE)

    try:
        with data_dir_lock(data_dir):
            existing = trim_dangling_pair(read_journal(journal_path))
            registry = replay(existing, prefix=args.prefix)
            if mode == "events":
                _apply_import_events(registry, list(dump.get("events", [])),
                                     validate=not args.raw)
            else:
                registry.import_snapshot_records(
                    list(dump.get("records", [])),
                    list(dump.get("operations", [])),
                    validate=not args.raw)
            problems = registry.verify_integrity(check_schema=not args.raw)
            if problems:
                raise MalformedBody("imported state fails integrity checks: "
                                    + "; ".join(problems))
            tmp = journal_path.with_suffix(".ndjson.tmp")
            tmp.write_bytes("".join(e.to_line() for e in registry.events())
                            .encode("utf-8"))
            os.replace(tmp, journal_path)
            imported = registry.last_seq - (existing[-1].seq if existing else 0)
    except LockHeld as exc:
        return _fail(exc.message, EXIT_USAGE)
    except FdomError as exc:
        return _fail(exc.message, EXIT_DOMAIN)
    except (ValueError, KeyError, TypeError) as exc:
        return _fail(f"malformed dump content: {exc}", EXIT_USAGE)
    except OSError as exc:
        return _fail(str(exc), EXIT_USAGE)
    print(f"fdom: imported {imported} events into {data_dir}")
    return EXIT_OK


# ----------------------------------------------------------------------
# offline validation


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        bundle = json.loads(Path(args.file).read_text(encoding="utf-8"))
        if not isinstance(bundle, dict) or bundle.get("format_version") != 1:
            raise ValueError("not a format_version 1 metadata bundle")
        records = bundle["records"]
        if not isinstance(records, list):
            raise ValueError("records must be a list")
        entries = []
        seen: set[str] = set()
        for i, doc in enumerate(records):
            if not isinstance(doc, dict):
                raise ValueError(f"records[{i}] must be an object")
            pid = Pid.parse(str(doc["pid"]))
            if str(pid) in seen:
                raise ValueError(f"duplicate pid in bundle: {pid}")
            seen.add(str(pid))
            properties = doc.get("properties", {})
            if not isinstance(properties, dict):
                raise ValueError(f"records[{i}].properties must be an object")
            entries.append((pid, doc.get("class"), properties))
    except (OSError, ValueError, KeyError, FdomError) as exc:
        return _fail(f"cannot read bundle: {exc}", EXIT_USAGE)

    # Every bundle entry with a known class counts as an active, resolvable
    # record, so references within the same file validate.
    classes: dict[str, mm.MetadataClass] = {}
    for pid, class_name, _ in entries:
        try:
            classes[str(pid)] = mm.as_class(class_name)
        except FdomError:
            pass

    def resolver(target: Pid):
        klass = classes.get(str(target))
        if klass is None:
            return None
        return klass, mm.RecordStatus.ACTIVE

    reports = []
    for pid, class_name, properties in entries:
        report = mm.validate(class_name, properties, resolver)
        reports.append({"pid": str(pid), "class": class_name, **report.to_dict()})

    all_ok = all(r["ok"] for r in reports)
    print(json.dumps({"ok": all_ok, "reports": reports}, indent=2, ensure_ascii=False))
    return EXIT_OK if all_ok else EXIT_DOMAIN


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdom",
        description="FAIR Digital Object manager: registry service and catalog tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data-dir", default=os.environ.get("FDOM_DATA_DIR", "./fdom-data"),
                       help="registry data directory (env FDOM_DATA_DIR)")
        p.add_argument("--prefix", default=os.environ.get("FDOM_PID_PREFIX", DEFAULT_PREFIX),
                       help="PID prefix for newly minted identifiers (env FDOM_PID_PREFIX)")

    serve = sub.add_parser("serve", help="run the REST API server")
    add_common(serve)
    serve.add_argument("--listen", default=os.environ.get("FDOM_LISTEN", DEFAULT_LISTEN),
                       help="host:port to listen on (env FDOM_LISTEN)")
    serve.add_argument("--cors-origin", default="*",
                       help="allowed CORS origin for the playground")
    serve.add_argument("--playground-dir",
                       default=os.environ.get("FDOM_PLAYGROUND_DIR"),
                       help="static playground build to serve under /playground/")
    serve.set_defaults(func=cmd_serve)

    exp = sub.add_parser("export", help="dump the catalog to a JSON file")
    add_common(exp)
    exp.add_argument("file", help="output file")
    exp.add_argument("--mode", choices=("events", "records"), default="events",
                     help="dump the journal events or the denormalized records")
    exp.set_defaults(func=cmd_export)

    imp = sub.add_parser("import", help="load a catalog dump into a data dir")
    add_common(imp)
    imp.add_argument("file", help="catalog dump file")
    imp.add_argument("--merge", action="store_true",
                     help="allow importing into a non-empty data dir")
    imp.add_argument("--raw", action="store_true",
                     help="skip re-validation (disaster recovery only)")
    imp.set_defaults(func=cmd_import)

    val = sub.add_parser("validate", help="validate a metadata bundle offline")
    val.add_argument("file", help="bundle file: {format_version, records:[{pid, class, properties}]}")
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
