"""The four metadata classes, their property schemas, and the write-gating validator.

Classes are a fixed Schema.org-derived set: CreativeWork, Service, Person,
Organization. Each class has a closed property schema; entity-valued
properties are constrained to specific target classes (e.g. a CreativeWork's
creator must be a Person or an Organization, and its citations may only
point at other CreativeWorks, self-citation included).

Validation is total: it never aborts on the first problem and returns a
report listing every violation, deterministically ordered by (path, code).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Optional, Tuple

from .errors import UnknownClass
from .pid import Pid

SCHEMA_ORG_CONTEXT = "https://schema.org/"

# Violation codes emitted by validate().
REQUIRED_MISSING = "REQUIRED_MISSING"
UNKNOWN_PROPERTY = "UNKNOWN_PROPERTY"
WRONG_SHAPE = "WRONG_SHAPE"
UNKNOWN_CLASS = "UNKNOWN_CLASS"
DANGLING_REF = "DANGLING_REF"
TOMBSTONED_REF = "TOMBSTONED_REF"
CLASS_NOT_ALLOWED = "CLASS_NOT_ALLOWED"
EMPTY_LIST = "EMPTY_LIST"
VALUE_NOT_ALLOWED = "VALUE_NOT_ALLOWED"


class MetadataClass(str, Enum):
    CREATIVE_WORK = "CreativeWork"
    SERVICE = "Service"
    PERSON = "Person"
    ORGANIZATION = "Organization"


class RecordStatus(str, Enum):
    ACTIVE = "active"
    TOMBSTONED = "tombstoned"


class Shape(str, Enum):
    STRING = "string"
    REF = "ref"
    REF_LIST = "ref_list"
    STRING_LIST = "string_list"


@dataclass(frozen=True)
class EntityRef:
    """A reference to another metadata record by its metadata PID.

    ``allowed_classes`` is the validation constraint taken from the class
    schema; it is never serialized (the wire form is the bare PID string).
    """

    target: Pid
    allowed_classes: frozenset[MetadataClass] = frozenset()


@dataclass(frozen=True)
class PropertySpec:
    name: str
    shape: Shape
    required: bool = False
    allowed_classes: frozenset[MetadataClass] = frozenset()
    allowed_values: tuple[str, ...] = ()
    min_items: int = 0

    def to_dict(self) -> dict:
        doc: dict = {
            "name": self.name,
            "shape": self.shape.value,
            "required": self.required,
        }
        if self.allowed_classes:
            doc["allowed_classes"] = sorted(c.value for c in self.allowed_classes)
        if self.allowed_values:
            doc["allowed_values"] = list(self.allowed_values)
        if self.min_items:
            doc["min_items"] = self.min_items
        return doc


@dataclass(frozen=True)
class ClassSchema:
    class_name: MetadataClass
    properties: tuple[PropertySpec, ...]

    def spec(self, name: str) -> Optional[PropertySpec]:
        for p in self.properties:
            if p.name == name:
                return p
        return None

    def to_dict(self) -> dict:
        return {
            "class": self.class_name.value,
            "properties": [p.to_dict() for p in self.properties],
        }


def _refs(*classes: MetadataClass) -> frozenset[MetadataClass]:
    return frozenset(classes)


SCHEMAS: dict[MetadataClass, ClassSchema] = {
    MetadataClass.PERSON: ClassSchema(
        MetadataClass.PERSON,
        (
            PropertySpec("name", Shape.STRING, required=True),
            PropertySpec("identifier", Shape.STRING),
            PropertySpec("email", Shape.STRING),
            PropertySpec(
                "affiliation", Shape.REF,
                allowed_classes=_refs(MetadataClass.ORGANIZATION),
            ),
        ),
    ),
    MetadataClass.ORGANIZATION: ClassSchema(
        MetadataClass.ORGANIZATION,
        (
            PropertySpec("name", Shape.STRING, required=True),
            PropertySpec("url", Shape.STRING),
            PropertySpec("identifier", Shape.STRING),
        ),
    ),
    MetadataClass.CREATIVE_WORK: ClassSchema(
        MetadataClass.CREATIVE_WORK,
        (
            PropertySpec("name", Shape.STRING, required=True),
            PropertySpec(
                "additionalType", Shape.STRING, required=True,
                allowed_values=("Dataset", "SoftwareSourceCode", "ScholarlyArticle"),
            ),
            PropertySpec("description", Shape.STRING),
            PropertySpec(
                "creator", Shape.REF_LIST, required=True, min_items=1,
                allowed_classes=_refs(MetadataClass.PERSON, MetadataClass.ORGANIZATION),
            ),
            PropertySpec(
                "citation", Shape.REF_LIST,
                allowed_classes=_refs(MetadataClass.CREATIVE_WORK),
            ),
            PropertySpec("dateCreated", Shape.STRING),
            PropertySpec("license", Shape.STRING),
        ),
    ),
    MetadataClass.SERVICE: ClassSchema(
        MetadataClass.SERVICE,
        (
            PropertySpec("name", Shape.STRING, required=True),
            PropertySpec(
                "provider", Shape.REF, required=True,
                allowed_classes=_refs(MetadataClass.PERSON, MetadataClass.ORGANIZATION),
            ),
            PropertySpec("description", Shape.STRING),
            PropertySpec("url", Shape.STRING),
        ),
    ),
}


def as_class(name: object) -> MetadataClass:
    """Coerce a class name to the enum, raising UnknownClass outside the four."""
    if isinstance(name, MetadataClass):
        return name
    try:
        return MetadataClass(name)
    except ValueError:
        raise UnknownClass(f"unknown metadata class: {name!r}") from None


def class_schema(class_name: object) -> ClassSchema:
    return SCHEMAS[as_class(class_name)]


@dataclass(frozen=True)
class Violation:
    path: str
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"path": self.path, "code": self.code, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    @classmethod
    def from_violations(cls, violations: list[Violation]) -> ValidationReport:
        ordered = tuple(sorted(violations, key=lambda v: (v.path, v.code)))
        return cls(ok=not ordered, violations=ordered)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


# Resolver answers (class, status) for a metadata PID, or None when unknown.
Resolver = Callable[[Pid], Optional[Tuple[MetadataClass, RecordStatus]]]


def _ref_target(value: object) -> Optional[Pid]:
    if isinstance(value, EntityRef):
        return value.target
    if isinstance(value, Pid):
        return value
    if isinstance(value, str):
        try:
            return Pid.parse(value)
        except Exception:
            return None
    return None


def _check_ref(path: str, value: object, spec: PropertySpec, resolver: Resolver,
               allow_tombstoned_refs: bool, out: list[Violation]) -> None:
    target = _ref_target(value)
    if target is None:
        out.append(Violation(path, WRONG_SHAPE,
                             f"expected a PID string (prefix/suffix), got {value!r}"))
        return
    resolved = resolver(target)
    if resolved is None:
        out.append(Violation(path, DANGLING_REF,
                             f"no metadata record found for {target}"))
        return
    target_class, status = resolved
    if status is RecordStatus.TOMBSTONED and not allow_tombstoned_refs:
        out.append(Violation(path, TOMBSTONED_REF,
                             f"{target} is tombstoned"))
        return
    if target_class not in spec.allowed_classes:
        allowed = ", ".join(sorted(c.value for c in spec.allowed_classes))
        out.append(Violation(path, CLASS_NOT_ALLOWED,
                             f"{target} is a {target_class.value}; allowed: {allowed}"))


def validate(class_name: object, properties: Mapping[str, object], resolver: Resolver,
             *, allow_tombstoned_refs: bool = False) -> ValidationReport:
    """Validate a property map against its class schema.

    Never raises on bad input; every problem becomes a report entry. The
    resolver is consulted for each entity reference: a missing target is a
    dangling ref, a tombstoned target is rejected unless
    ``allow_tombstoned_refs`` (used when re-admitting historical records
    whose targets were live at write time).
    """
    try:
        klass = as_class(class_name)
    except UnknownClass:
        return ValidationReport.from_violations([
            Violation("@type", UNKNOWN_CLASS,
                      f"unknown metadata class: {class_name!r}"),
        ])

    schema = SCHEMAS[klass]
    out: list[Violation] = []

    for name in properties:
        if schema.spec(name) is None:
            out.append(Violation(str(name), UNKNOWN_PROPERTY,
                                 f"{name!r} is not a {klass.value} property"))

    for spec in schema.properties:
        if spec.name not in properties:
            if spec.required:
                out.append(Violation(spec.name, REQUIRED_MISSING,
                                     f"{klass.value} requires {spec.name!r}"))
            continue
        value = properties[spec.name]

        if spec.shape is Shape.STRING:
            if not isinstance(value, str):
                out.append(Violation(spec.name, WRONG_SHAPE,
                                     f"expected a string, got {type(value).__name__}"))
            elif spec.allowed_values and value not in spec.allowed_values:
                allowed = ", ".join(spec.allowed_values)
                out.append(Violation(spec.name, VALUE_NOT_ALLOWED,
                                     f"{value!r} not in {{{allowed}}}"))

        elif spec.shape is Shape.REF:
            _check_ref(spec.name, value, spec, resolver, allow_tombstoned_refs, out)

        elif spec.shape is Shape.REF_LIST:
            if isinstance(value, str) or not isinstance(value, (list, tuple)):
                out.append(Violation(spec.name, WRONG_SHAPE,
                                     f"expected a list of PIDs, got {type(value).__name__}"))
            elif len(value) < spec.min_items:
                out.append(Violation(spec.name, EMPTY_LIST,
                                     f"{spec.name!r} needs at least {spec.min_items} entry"))
            else:
                for i, item in enumerate(value):
                    _check_ref(f"{spec.name}[{i}]", item, spec, resolver,
                               allow_tombstoned_refs, out)

        elif spec.shape is Shape.STRING_LIST:
            if isinstance(value, str) or not isinstance(value, (list, tuple)):
                out.append(Violation(spec.name, WRONG_SHAPE,
                                     f"expected a list of strings, got {type(value).__name__}"))
            else:
                for i, item in enumerate(value):
                    if not isinstance(item, str):
                        out.append(Violation(f"{spec.name}[{i}]", WRONG_SHAPE,
                                             f"expected a string, got {type(item).__name__}"))

    return ValidationReport.from_violations(out)


def coerce_properties(class_name: object, properties: Mapping[str, object]) -> dict[str, object]:
    """Convert a shape-valid property map to typed values, preserving order.

    Entity references become EntityRef objects carrying the schema's allowed
    target classes; list values become tuples. Call only after validate()
    reported ok (shape problems raise ValueError here).
    """
    schema = SCHEMAS[as_class(class_name)]
    typed: dict[str, object] = {}
    for name, value in properties.items():
        spec = schema.spec(name)
        if spec is None:
            raise ValueError(f"unknown property {name!r}")
        if spec.shape is Shape.STRING:
            typed[name] = value
        elif spec.shape is Shape.REF:
            target = _ref_target(value)
            if target is None:
                raise ValueError(f"{name!r} is not a PID")
            typed[name] = EntityRef(target, spec.allowed_classes)
        elif spec.shape is Shape.REF_LIST:
            items = []
            for item in value:  # type: ignore[union-attr]
                target = _ref_target(item)
                if target is None:
                    raise ValueError(f"{name!r} contains a non-PID entry")
                items.append(EntityRef(target, spec.allowed_classes))
            typed[name] = tuple(items)
        elif spec.shape is Shape.STRING_LIST:
            typed[name] = tuple(value)  # type: ignore[arg-type]
    return typed


def serialize_value(value: object) -> object:
    if isinstance(value, EntityRef):
        return str(value.target)
    if isinstance(value, tuple):
        return [serialize_value(v) for v in value]
    return value


_ENVELOPE_KEYS = frozenset({"@context", "@type", "pid", "version", "created", "modified", "status"})


@dataclass
class MetadataRecord:
    """A standalone, PID-addressed metadata instance of one of the four classes."""

    pid: Pid
    class_name: MetadataClass
    properties: dict[str, object] = field(default_factory=dict)
    version: int = 1
    created: str = ""
    modified: str = ""
    status: RecordStatus = RecordStatus.ACTIVE

    def to_jsonld(self) -> dict:
        """Serialize as a JSON-LD-flavored object: context, type, envelope, properties."""
        doc: dict = {
            "@context": SCHEMA_ORG_CONTEXT,
            "@type": self.class_name.value,
            "pid": str(self.pid),
            "version": self.version,
            "created": self.created,
            "modified": self.modified,
            "status": self.status.value,
        }
        for name, value in self.properties.items():
            doc[name] = serialize_value(value)
        return doc

    @classmethod
    def from_jsonld(cls, doc: Mapping[str, object]) -> MetadataRecord:
        klass = as_class(doc["@type"])
        raw = {k: v for k, v in doc.items() if k not in _ENVELOPE_KEYS}
        return cls(
            pid=Pid.parse(str(doc["pid"])),
            class_name=klass,
            properties=coerce_properties(klass, raw),
            version=int(doc["version"]),  # type: ignore[arg-type]
            created=str(doc["created"]),
            modified=str(doc["modified"]),
            status=RecordStatus(doc["status"]),
        )
