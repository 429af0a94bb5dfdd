"""HTTP adapter: turn one web API call into raw evidence records.

This is the hook for wiring real services into the registry.  The adapter
performs exactly one request per query, maps the JSON response onto the
attribute vocabulary, and reports every failure as a typed error for the
executor to absorb.  Nothing in the offline test corpus depends on it.
"""

from __future__ import annotations

import os
import urllib.parse
from typing import Optional

import requests

from ..errors import DossierError
from ..inputs import QueryInput
from ..routing import HttpCollectorConfig
from .records import RawRecord


class AdapterError(DossierError):
    """Base class for HTTP adapter failures."""


class NetworkError(AdapterError):
    """The request could not be completed at the transport level."""


class BadStatusError(AdapterError):
    """The service answered with a non-2xx status code."""

    def __init__(self, status_code: int, url: str) -> None:
        super().__init__(f"HTTP {status_code} from {url}")
        self.status_code = status_code


class ResponseMappingError(AdapterError):
    """The response body cannot be mapped onto attribute records."""


class MissingCredentialError(AdapterError):
    """The configured credential environment variable is not set."""


def _extract(payload: object, path: str) -> object:
    """Walk a dotted field path; integer segments index into lists."""
    current = payload
    for segment in path.split("."):
        if isinstance(current, dict):
            if segment not in current:
                return None
            current = current[segment]
        elif isinstance(current, list):
            try:
                current = current[int(segment)]
            except (ValueError, IndexError):
                return None
        else:
            return None
    return current


def _scalars(value: object, path: str) -> list[str]:
    if value is None:
        return []
    if isinstance(value, bool):
        return [str(value).lower()]
    if isinstance(value, (str, int, float)):
        return [str(value)]
    if isinstance(value, list):
        out: list[str] = []
        for element in value:
            if isinstance(element, bool):
                out.append(str(element).lower())
            elif isinstance(element, (str, int, float)):
                out.append(str(element))
            else:
                raise ResponseMappingError(
                    f"field {path!r} contains a non-scalar list element"
                )
        return out
    raise ResponseMappingError(f"field {path!r} is not a scalar or list of scalars")


def fetch_http(
    name: str,
    config: HttpCollectorConfig,
    query: QueryInput,
    timeout_ms: int = 5000,
) -> list[RawRecord]:
    """Issue the collector's single templated request and map the response.

    All records from one response share the request URL as their provenance
    locator, marking them as one batch about one person.
    """
    substituted = config.query_template.format(
        value=urllib.parse.quote(query.canonical, safe=""),
        kind=query.kind.value,
    )
    url = config.base + substituted
    headers = {"Accept": "application/json"}
    if config.credential_env is not None:
        credential = os.environ.get(config.credential_env)
        if credential is None:
            raise MissingCredentialError(
                f"collector {name!r} expects credentials in ${config.credential_env}"
            )
        headers["Authorization"] = f"Bearer {credential}"
    try:
        response = requests.request(
            config.method, url, headers=headers, timeout=timeout_ms / 1000.0
        )
    except requests.RequestException as exc:
        # Keep the message deterministic: library exception texts embed
        # object reprs that change between runs.
        raise NetworkError(
            f"{config.method} {url} failed: {type(exc).__name__}"
        ) from exc
    if not 200 <= response.status_code < 300:
        raise BadStatusError(response.status_code, url)
    try:
        payload = response.json()
    except ValueError as exc:
        raise ResponseMappingError(f"response from {url} is not JSON") from exc

    records = []
    for path, attribute in config.response_mapping:
        for value in _scalars(_extract(payload, path), path):
            records.append(
                RawRecord(attribute=attribute, value=value, confidence=1.0, provenance=url)
            )
    records.sort(key=lambda r: (r.attribute, r.value))
    return records
