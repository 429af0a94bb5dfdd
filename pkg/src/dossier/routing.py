"""Collector registry and the kind/platform capability matrix.

Each collector declares which (kind, platform) pairs it accepts.  Routing a
query means selecting, in lexicographic name order, every registered
collector whose accept set contains the query's pair.  Person-name queries
are looked up as keyword queries: none of the built-in services takes a raw
name, but the keyword engines cover it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .errors import DossierError
from .inputs import InputKind, Platform, QueryInput
from .vocab import ATTRIBUTE_KEYS

AcceptPair = Tuple[InputKind, Optional[Platform]]


class Backend(Enum):
    """How a collector's records are produced."""

    CORPUS = "corpus"
    HTTP = "http"


class DuplicateCollectorError(DossierError):
    """A collector with the same name is already registered."""


class OverlayError(DossierError):
    """A registry overlay file is missing, unreadable, or malformed."""


@dataclass(frozen=True)
class HttpCollectorConfig:
    """Request/response wiring for an HTTP-backed collector.

    ``query_template`` is appended to ``base`` after substituting ``{value}``
    (URL-encoded canonical query) and ``{kind}``.  ``response_mapping`` maps
    dotted field paths in the JSON response body to attribute keys.
    Credentials are never stored inline: ``credential_env`` names an
    environment variable whose value is sent as a bearer token.
    """

    base: str
    method: str = "GET"
    query_template: str = ""
    response_mapping: Tuple[Tuple[str, str], ...] = ()
    credential_env: Optional[str] = None

    def __post_init__(self) -> None:
        if isinstance(self.response_mapping, Mapping):
            object.__setattr__(
                self, "response_mapping", tuple(sorted(self.response_mapping.items()))
            )
        else:
            object.__setattr__(
                self, "response_mapping", tuple(tuple(p) for p in self.response_mapping)
            )
        if self.method.upper() not in ("GET", "POST"):
            raise ValueError(f"unsupported HTTP method: {self.method!r}")
        object.__setattr__(self, "method", self.method.upper())
        for _, attribute in self.response_mapping:
            if attribute not in ATTRIBUTE_KEYS:
                raise ValueError(f"response_mapping targets unknown attribute {attribute!r}")


@dataclass(frozen=True)
class CollectorDescriptor:
    """A named evidence source plus the query kinds it accepts."""

    name: str
    accepts: frozenset  # frozenset[AcceptPair]
    reliability: float = 1.0
    backend: Backend = Backend.CORPUS
    http: Optional[HttpCollectorConfig] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("collector name must be non-empty")
        object.__setattr__(self, "accepts", frozenset(self.accepts))
        if not self.accepts:
            raise ValueError(f"collector {self.name!r} accepts nothing")
        if not 0.0 <= self.reliability <= 1.0:
            raise ValueError(f"reliability must be within [0, 1]: {self.reliability}")
        if (self.backend is Backend.HTTP) != (self.http is not None):
            raise ValueError(
                f"collector {self.name!r}: http config required exactly when "
                "backend is HTTP"
            )


class Registry(Mapping):
    """Immutable name-keyed map of collector descriptors, iterated in name order."""

    __slots__ = ("_by_name",)

    def __init__(self, descriptors: Iterable[CollectorDescriptor] = ()) -> None:
        by_name: dict[str, CollectorDescriptor] = {}
        for descriptor in descriptors:
            if descriptor.name in by_name:
                raise DuplicateCollectorError(
                    f"collector {descriptor.name!r} registered twice"
                )
            by_name[descriptor.name] = descriptor
        self._by_name = dict(sorted(by_name.items()))

    def __getitem__(self, name: str) -> CollectorDescriptor:
        return self._by_name[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._by_name)

    def __len__(self) -> int:
        return len(self._by_name)

    def __repr__(self) -> str:
        return f"Registry({list(self._by_name)})"

    def add(self, descriptor: CollectorDescriptor) -> "Registry":
        """Return a new registry with *descriptor* added; never mutates this one."""
        if descriptor.name in self._by_name:
            raise DuplicateCollectorError(
                f"collector {descriptor.name!r} already registered"
            )
        return Registry(list(self._by_name.values()) + [descriptor])

    def without(self, name: str) -> "Registry":
        """Return a new registry with *name* removed."""
        if name not in self._by_name:
            raise KeyError(name)
        return Registry(d for d in self._by_name.values() if d.name != name)

    def reliability_of(self, name: str, default: float = 1.0) -> float:
        """Reliability weight for a source name; *default* when unregistered."""
        descriptor = self._by_name.get(name)
        return default if descriptor is None else descriptor.reliability


# The accept columns a collector can declare, by config-file spelling.
ACCEPT_COLUMNS: dict[str, AcceptPair] = {
    "domain": (InputKind.DOMAIN, None),
    "email": (InputKind.EMAIL, None),
    "facebook": (InputKind.SOCIAL_HANDLE, Platform.FACEBOOK),
    "instagram": (InputKind.SOCIAL_HANDLE, Platform.INSTAGRAM),
    "keyword": (InputKind.KEYWORD, None),
    "phone": (InputKind.PHONE, None),
    "twitter": (InputKind.SOCIAL_HANDLE, Platform.TWITTER),
    "image": (InputKind.IMAGE_PATH, None),
}


def accepts(*columns: str) -> frozenset:
    """Build an accept set from column names, e.g. ``accepts("email", "phone")``."""
    return frozenset(ACCEPT_COLUMNS[c] for c in columns)


# Built-in capability matrix: which well-known people-search services accept
# which query kinds.  All are corpus-backed stand-ins with full reliability;
# deployments point specific entries at live HTTP endpoints via an overlay.
_BUILTIN_COLUMNS: dict[str, Tuple[str, ...]] = {
    "bmobile": ("phone",),
    "maltego": ("domain", "email", "facebook", "instagram", "keyword", "phone", "twitter"),
    "pipl": ("email", "phone"),
    "rapportive": ("email",),
    "searchbug": ("email",),
    "social_bearing": ("twitter",),
    "social_buzz": ("twitter",),
    "stalkscan": ("facebook",),
    "tinfoleak": ("twitter",),
    "upolos": ("instagram",),
    "verify_email": ("email",),
    "vivial": ("domain",),
    "webmii": ("keyword",),
    "whatbreach": ("email",),
}


def builtin_matrix() -> Registry:
    """The default registry of fourteen corpus-backed collectors."""
    return Registry(
        CollectorDescriptor(name=name, accepts=accepts(*columns))
        for name, columns in _BUILTIN_COLUMNS.items()
    )


def route(query: QueryInput, registry: Registry) -> list[CollectorDescriptor]:
    """Every collector accepting the query's (kind, platform), in name order.

    Name queries are routed as keyword queries.  The list may be empty (for
    example, image queries against the built-in registry).
    """
    kind = InputKind.KEYWORD if query.kind is InputKind.NAME else query.kind
    platform = query.platform if query.kind is InputKind.SOCIAL_HANDLE else None
    pair = (kind, platform)
    return [d for d in registry.values() if pair in d.accepts]


def register_collector(registry: Registry, descriptor: CollectorDescriptor) -> Registry:
    """Functional form of :meth:`Registry.add`."""
    return registry.add(descriptor)


def _descriptor_from_entry(entry: object, path: Path) -> CollectorDescriptor:
    if not isinstance(entry, dict):
        raise OverlayError(f"{path}: each add entry must be an object")
    unknown = set(entry) - {"name", "accepts", "reliability", "backend", "http"}
    if unknown:
        raise OverlayError(f"{path}: unknown entry keys {sorted(unknown)}")
    name = entry.get("name")
    columns = entry.get("accepts")
    if not isinstance(name, str) or not name:
        raise OverlayError(f"{path}: add entry needs a non-empty string name")
    if not isinstance(columns, list) or not columns:
        raise OverlayError(f"{path}: collector {name!r} needs a non-empty accepts list")
    try:
        accept_set = accepts(*columns)
    except (KeyError, TypeError) as exc:
        raise OverlayError(
            f"{path}: collector {name!r} has an unknown accepts column "
            f"(choose from {sorted(ACCEPT_COLUMNS)})"
        ) from exc
    backend_name = entry.get("backend", "corpus")
    try:
        backend = Backend(backend_name)
    except ValueError as exc:
        raise OverlayError(f"{path}: unknown backend {backend_name!r}") from exc
    http_config = None
    if backend is Backend.HTTP:
        raw_http = entry.get("http")
        if not isinstance(raw_http, dict):
            raise OverlayError(f"{path}: collector {name!r} needs an http object")
        try:
            http_config = HttpCollectorConfig(
                base=raw_http.get("base", ""),
                method=raw_http.get("method", "GET"),
                query_template=raw_http.get("query_template", ""),
                response_mapping=raw_http.get("response_mapping", {}),
                credential_env=raw_http.get("credential_env"),
            )
        except (ValueError, TypeError) as exc:
            raise OverlayError(f"{path}: collector {name!r}: {exc}") from exc
        if not http_config.base:
            raise OverlayError(f"{path}: collector {name!r} needs a base URL")
    try:
        return CollectorDescriptor(
            name=name,
            accepts=accept_set,
            reliability=float(entry.get("reliability", 1.0)),
            backend=backend,
            http=http_config,
        )
    except (ValueError, TypeError) as exc:
        raise OverlayError(f"{path}: collector {name!r}: {exc}") from exc


def load_overlay(registry: Registry, path: str | Path) -> Registry:
    """Apply a JSON overlay file to *registry* and return the result.

    The file holds ``{"disable": [names...], "add": [entries...]}``.  Disables
    run first, so an add may redefine a built-in collector under its old name.
    Entry shape: ``{"name", "accepts", "reliability"?, "backend"?, "http"?}``.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OverlayError(f"cannot read registry overlay {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise OverlayError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise OverlayError(f"{path}: overlay must be a JSON object")
    unknown = set(payload) - {"disable", "add"}
    if unknown:
        raise OverlayError(f"{path}: unknown overlay keys {sorted(unknown)}")

    result = registry
    disables = payload.get("disable", [])
    if not isinstance(disables, list):
        raise OverlayError(f"{path}: disable must be a list of names")
    for name in disables:
        try:
            result = result.without(name)
        except KeyError as exc:
            raise OverlayError(f"{path}: cannot disable unknown collector {name!r}") from exc

    additions = payload.get("add", [])
    if not isinstance(additions, list):
        raise OverlayError(f"{path}: add must be a list of entries")
    for entry in additions:
        descriptor = _descriptor_from_entry(entry, path)
        try:
            result = result.add(descriptor)
        except DuplicateCollectorError as exc:
            raise OverlayError(f"{path}: {exc}") from exc
    return result
