"""REST surface over the registries.

Wire contract, uniformly:

- All bodies are ``application/json; charset=utf-8``.
- PIDs appear in paths in raw canonical form, so record routes take two
  path segments: ``/fdos/{prefix}/{suffix}``.
- Every non-2xx body is one ApiError object:
  ``{"status": ..., "code": ..., "message": ..., "details": ...}``.
- Tombstoned PIDs answer 410 (never 404) with the tombstone in
  ``details``; 404 is reserved for PIDs this service never stored.
- PUT is guarded by ``If-Match: "<version>"`` and answers 412 on a stale
  version.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Optional, Sequence

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .errors import (
    FdomError,
    Gone,
    IfMatchRequired,
    InvalidArgument,
    InvalidPage,
    MalformedBody,
    MalformedIfMatch,
    UnknownClass,
)
from .metadata_model import MetadataRecord, class_schema
from .pid import Pid
from .registry import FdoRecord, OperationDescriptor, Registry, Tombstone

JSON_MEDIA_TYPE = "application/json; charset=utf-8"


def _dumps(payload: object) -> str:
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def _json(payload: object, status: int = 200,
          headers: Optional[Mapping[str, str]] = None) -> Response:
    return Response(content=_dumps(payload), status_code=status,
                    media_type=JSON_MEDIA_TYPE, headers=dict(headers or {}))


def _error_response(status: int, code: str, message: str, details: object = None) -> Response:
    return _json({"status": status, "code": code, "message": message,
                  "details": details}, status)


async def _read_json_object(request: Request) -> dict:
    body = await request.body()
    try:
        doc = json.loads(body)
    except Exception:
        raise MalformedBody("request body is not valid JSON") from None
    if not isinstance(doc, dict):
        raise MalformedBody("request body must be a JSON object")
    return doc


def _check_keys(doc: Mapping[str, object], required: Sequence[str],
                optional: Sequence[str]) -> None:
    for key in required:
        if key not in doc:
            raise MalformedBody(f"missing required body key: {key!r}")
    allowed = set(required) | set(optional)
    unknown = [k for k in doc if k not in allowed]
    if unknown:
        raise MalformedBody(f"unexpected body keys: {sorted(unknown)}")


def _path_pid(prefix: str, suffix: str) -> Pid:
    return Pid.parse(f"{prefix}/{suffix}")


def _query_bool(request: Request, name: str, default: bool = False) -> bool:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    lowered = raw.lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise InvalidArgument(f"{name} must be a boolean: {raw!r}")


def _query_int(request: Request, name: str, default: int,
               error: type[FdomError] = InvalidArgument) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise error(f"{name} must be an integer: {raw!r}") from None


def _if_match_version(request: Request) -> int:
    raw = request.headers.get("if-match")
    if raw is None:
        raise IfMatchRequired('PUT requires If-Match: "<version>"')
    value = raw.strip()
    if value.startswith("W/"):
        value = value[2:]
    value = value.strip('"')
    try:
        return int(value)
    except ValueError:
        raise MalformedIfMatch(f'If-Match must quote an integer version: {raw!r}') from None


def _metadata_wire(record: MetadataRecord) -> dict:
    return record.to_jsonld()


def _fdo_wire(registry: Registry, record: FdoRecord) -> dict:
    doc = record.to_dict()
    doc["metadata"] = _metadata_wire(registry.metadata_record(record.metadata_pid))
    return doc


def _etag(record: FdoRecord) -> dict:
    return {"ETag": f'"{record.version}"'}


def create_app(registry: Registry, *, cors_origins: Sequence[str] = ("*",),
               playground_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="fdom", version=__version__, docs_url=None, redoc_url=None,
                  openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["Location", "ETag"],
    )

    @app.exception_handler(FdomError)
    async def fdom_error(request: Request, exc: FdomError) -> Response:
        return _error_response(exc.http_status, exc.code, exc.message, exc.details)

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException) -> Response:
        code = {404: "NOT_FOUND", 405: "METHOD_NOT_ALLOWED"}.get(
            exc.status_code, "INTERNAL")
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    async def unexpected_error(request: Request, exc: Exception) -> Response:
        return _error_response(500, "INTERNAL", "internal error")

    @app.get("/")
    async def service_info() -> Response:
        return _json({"service": "fdom", "version": __version__,
                      "pid_prefix": registry.prefix})

    # ------------------------------------------------------------------
    # FDO Registry

    @app.post("/fdos")
    async def create_fdo(request: Request) -> Response:
        doc = await _read_json_object(request)
        _check_keys(doc, required=("do_ref", "class", "properties"),
                    optional=("do_checksum",))
        if not isinstance(doc["properties"], dict):
            raise MalformedBody("properties must be a JSON object")
        if not isinstance(doc["class"], str):
            raise MalformedBody("class must be a string")
        record = registry.create_fdo(
            do_ref=doc["do_ref"], class_name=doc["class"],
            properties=doc["properties"], do_checksum=doc.get("do_checksum"))
        headers = {"Location": f"/fdos/{record.pid}", **_etag(record)}
        return _json(_fdo_wire(registry, record), 201, headers)

    @app.get("/fdos")
    async def list_fdos(request: Request) -> Response:
        class_name = request.query_params.get("class")
        if class_name is not None:
            try:
                class_schema(class_name)
            except UnknownClass:
                raise InvalidArgument(f"unknown class filter: {class_name!r}") from None
        include_tombstoned = _query_bool(request, "include_tombstoned")
        offset = _query_int(request, "offset", 0, InvalidPage)
        limit = _query_int(request, "limit", 100, InvalidPage)
        page = registry.list_fdos(class_name=class_name,
                                  include_tombstoned=include_tombstoned,
                                  offset=offset, limit=limit)
        return _json({"total": page.total,
                      "items": [_fdo_wire(registry, r) for r in page.items]})

    @app.get("/fdos/{prefix}/{suffix}")
    async def get_fdo(prefix: str, suffix: str) -> Response:
        result = registry.get_fdo(_path_pid(prefix, suffix))
        if isinstance(result, Tombstone):
            raise Gone(f"{result.pid} is tombstoned", result)
        return _json(_fdo_wire(registry, result), headers=_etag(result))

    @app.put("/fdos/{prefix}/{suffix}")
    async def update_fdo(prefix: str, suffix: str, request: Request) -> Response:
        expected_version = _if_match_version(request)
        doc = await _read_json_object(request)
        _check_keys(doc, required=(),
                    optional=("do_ref", "do_checksum", "properties", "class"))
        if "properties" in doc and not isinstance(doc["properties"], dict):
            raise MalformedBody("properties must be a JSON object")
        kwargs: dict = {}
        if "do_checksum" in doc:
            kwargs["do_checksum"] = doc["do_checksum"]
        record = registry.update_fdo(
            _path_pid(prefix, suffix), expected_version,
            do_ref=doc.get("do_ref"), properties=doc.get("properties"),
            class_name=doc.get("class"), **kwargs)
        return _json(_fdo_wire(registry, record), headers=_etag(record))

    @app.delete("/fdos/{prefix}/{suffix}")
    async def delete_fdo(prefix: str, suffix: str, request: Request) -> Response:
        tombstone = registry.delete_fdo(_path_pid(prefix, suffix),
                                        reason=request.query_params.get("reason"))
        return _json(tombstone.to_dict())

    @app.get("/fdos/{prefix}/{suffix}/metadata")
    async def get_fdo_metadata(prefix: str, suffix: str) -> Response:
        record = registry.fdo_record(_path_pid(prefix, suffix))
        result = registry.get_metadata(record.metadata_pid)
        if isinstance(result, Tombstone):
            raise Gone(f"{result.pid} is tombstoned", result)
        return _json(_metadata_wire(result))

    @app.get("/fdos/{prefix}/{suffix}/operations")
    async def operations_for(prefix: str, suffix: str) -> Response:
        descriptors = registry.operations_for(_path_pid(prefix, suffix))
        return _json([d.to_dict() for d in descriptors])

    # ------------------------------------------------------------------
    # Metadata Registry

    @app.get("/metadata/{prefix}/{suffix}")
    async def get_metadata(prefix: str, suffix: str) -> Response:
        result = registry.get_metadata(_path_pid(prefix, suffix))
        if isinstance(result, Tombstone):
            raise Gone(f"{result.pid} is tombstoned", result)
        return _json(_metadata_wire(result))

    @app.get("/metadata/{prefix}/{suffix}/citations")
    async def citations(prefix: str, suffix: str) -> Response:
        edges = registry.edges_from(_path_pid(prefix, suffix), "citation")
        return _json([e.to_dict() for e in edges])

    @app.get("/metadata/{prefix}/{suffix}/cited-by")
    async def cited_by(prefix: str, suffix: str) -> Response:
        edges = registry.edges_to(_path_pid(prefix, suffix), "citation")
        out = []
        for e in edges:
            doc = e.to_dict()
            status = registry.metadata_status(e.source)
            doc["source_status"] = None if status is None else status.value
            out.append(doc)
        return _json(out)

    @app.get("/metadata/{prefix}/{suffix}/closure")
    async def closure(prefix: str, suffix: str, request: Request) -> Response:
        direction = request.query_params.get("direction", "outbound")
        max_depth = _query_int(request, "max_depth", 10)
        hits = registry.citation_closure(_path_pid(prefix, suffix), direction, max_depth)
        return _json([h.to_dict() for h in hits])

    # ------------------------------------------------------------------
    # Operation Registry

    @app.get("/operations")
    async def list_operations() -> Response:
        return _json([d.to_dict() for d in registry.operations()])

    @app.post("/operations")
    async def register_operation(request: Request) -> Response:
        doc = await _read_json_object(request)
        _check_keys(doc, required=("op_id", "name", "http_method", "path_template",
                                   "applicable_classes"),
                    optional=("description",))
        descriptor = OperationDescriptor.from_dict(doc)
        stored = registry.register_operation(descriptor)
        return _json(stored.to_dict(), 201)

    # ------------------------------------------------------------------
    # validation, resolution, schemas

    @app.post("/validate")
    async def validate_dry_run(request: Request) -> Response:
        doc = await _read_json_object(request)
        _check_keys(doc, required=("class", "properties"), optional=())
        if not isinstance(doc["properties"], dict):
            raise MalformedBody("properties must be a JSON object")
        report = registry.validate_properties(doc["class"], doc["properties"])
        return _json(report.to_dict())

    @app.get("/pids/{prefix}/{suffix}")
    async def resolve_pid(prefix: str, suffix: str) -> Response:
        result = registry.resolve_any(_path_pid(prefix, suffix))
        if result.kind == "fdo":
            record_doc = _fdo_wire(registry, result.record)  # type: ignore[arg-type]
        elif result.kind == "metadata":
            record_doc = _metadata_wire(result.record)  # type: ignore[arg-type]
        else:
            record_doc = result.record.to_dict()
        return _json({"kind": result.kind, "record": record_doc})

    @app.get("/schema/{class_name}")
    async def schema(class_name: str) -> Response:
        return _json(class_schema(class_name).to_dict())

    if playground_dir and Path(playground_dir).is_dir():
        app.mount("/playground",
                  StaticFiles(directory=playground_dir, html=True), name="playground")

    return app
