"""Query classification and canonicalization.

A profiling run starts from one raw string.  This module decides what that
string is (email address, phone number, social handle, domain, person name,
keyword, or image path), normalizes it into a canonical form, and wraps both
in an immutable :class:`QueryInput` that the rest of the pipeline consumes.

Classification without a hint applies a fixed rule order so that every
non-empty string lands on exactly one kind:

    email -> phone -> social handle -> domain -> name -> keyword
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .errors import DossierError

logger = logging.getLogger(__name__)


class InputKind(Enum):
    """What a query string denotes."""

    NAME = "name"
    EMAIL = "email"
    PHONE = "phone"
    DOMAIN = "domain"
    KEYWORD = "keyword"
    SOCIAL_HANDLE = "social_handle"
    IMAGE_PATH = "image_path"


class Platform(Enum):
    """Social network a handle belongs to."""

    TWITTER = "twitter"
    FACEBOOK = "facebook"
    INSTAGRAM = "instagram"


class EmptyInputError(DossierError):
    """The query string is empty or whitespace-only."""


class InvalidForHintError(DossierError):
    """A kind hint was given but the string does not fit that kind's syntax."""


class MissingImageError(DossierError):
    """An image-path query does not point at a readable file."""


class MalformedEmailError(DossierError):
    """The string cannot be normalized into a valid email address."""


class MalformedPhoneError(DossierError):
    """The string cannot be normalized into an E.164 phone number."""


class UnknownRegionError(DossierError):
    """No dialing code is known for the requested default region."""


@dataclass(frozen=True)
class QueryInput:
    """A classified query: the raw string plus its canonical form."""

    kind: InputKind
    raw: str
    canonical: str
    platform: Optional[Platform] = None


# Exactly one "@" with non-empty local part and domain, no whitespace.
_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+$")
# Dotted labels ending in an alphabetic TLD; a single trailing dot tolerated.
_DOMAIN_RE = re.compile(
    r"^(?:[a-z0-9](?:[a-z0-9-]*[a-z0-9])?\.)+[a-z]{2,}\.?$", re.IGNORECASE
)
_HANDLE_RE = re.compile(r"^[^\s@]+$")
_PLATFORM_PREFIX_RE = re.compile(r"^(twitter|facebook|instagram):(.*)$", re.IGNORECASE)

# Characters treated as phone formatting noise.
_PHONE_STRIP_TABLE = {ord(ch): None for ch in "()-. "}

MIN_PHONE_DIGITS = 8
MAX_PHONE_DIGITS = 15

# ISO 3166-1 alpha-2 region -> international dialing code.
COUNTRY_CALLING_CODES: dict[str, str] = {
    "AE": "971", "AR": "54", "AT": "43", "AU": "61", "BD": "880", "BE": "32",
    "BR": "55", "CA": "1", "CH": "41", "CL": "56", "CN": "86", "CO": "57",
    "DE": "49", "DK": "45", "EG": "20", "ES": "34", "FI": "358", "FR": "33",
    "GB": "44", "GR": "30", "HK": "852", "ID": "62", "IE": "353", "IL": "972",
    "IN": "91", "IQ": "964", "IR": "98", "IS": "354", "IT": "39", "JP": "81",
    "KE": "254", "KR": "82", "LK": "94", "MX": "52", "MY": "60", "NG": "234",
    "NL": "31", "NO": "47", "NP": "977", "NZ": "64", "PE": "51", "PH": "63",
    "PK": "92", "PL": "48", "PT": "351", "RU": "7", "SA": "966", "SE": "46",
    "SG": "65", "TH": "66", "TR": "90", "US": "1", "VN": "84", "ZA": "27",
}

DEFAULT_REGION = "IN"


def country_calling_code(region: str) -> str:
    """Return the dialing code for a two-letter region, e.g. ``"US" -> "1"``."""
    code = COUNTRY_CALLING_CODES.get(region.strip().upper())
    if code is None:
        raise UnknownRegionError(f"no dialing code known for region {region!r}")
    return code


def normalize_email(raw: str) -> str:
    """Lowercase *raw* and strip whitespace; require exactly one ``@``.

    Raises :class:`MalformedEmailError` when the result does not have a
    non-empty local part and domain separated by a single ``@``.
    """
    collapsed = "".join(raw.split())
    if not _EMAIL_RE.match(collapsed):
        raise MalformedEmailError(f"not a valid email address: {raw!r}")
    return collapsed.lower()


def normalize_phone(raw: str, default_region: str = DEFAULT_REGION) -> str:
    """Normalize *raw* into E.164 form: ``+`` followed by 8-15 digits.

    Formatting characters ``()- .`` are stripped.  A number without a leading
    ``+`` gets the dialing code of *default_region* prefixed.  Numbers already
    in E.164 form pass through unchanged regardless of region.
    """
    text = raw.strip()
    has_plus = text.startswith("+")
    body = text[1:] if has_plus else text
    digits = body.translate(_PHONE_STRIP_TABLE)
    if not digits or not digits.isascii() or not digits.isdigit():
        raise MalformedPhoneError(f"non-digit characters in phone number: {raw!r}")
    if len(digits) < MIN_PHONE_DIGITS:
        raise MalformedPhoneError(f"fewer than {MIN_PHONE_DIGITS} digits: {raw!r}")
    if len(digits) > MAX_PHONE_DIGITS:
        raise MalformedPhoneError(f"more than {MAX_PHONE_DIGITS} digits: {raw!r}")
    if has_plus:
        return "+" + digits
    prefixed = country_calling_code(default_region) + digits
    if len(prefixed) > MAX_PHONE_DIGITS:
        raise MalformedPhoneError(
            f"more than {MAX_PHONE_DIGITS} digits after region prefix: {raw!r}"
        )
    return "+" + prefixed


def normalize_handle(raw: str) -> str:
    """Strip one leading ``@`` and lowercase; reject whitespace or inner ``@``."""
    text = raw.strip()
    if text.startswith("@"):
        text = text[1:]
    if not text or not _HANDLE_RE.match(text):
        raise InvalidForHintError(f"not a valid handle: {raw!r}")
    return text.lower()


def hard_identifier_attribute(kind: InputKind, platform: Optional[Platform]) -> Optional[str]:
    """Map a query kind to the attribute key it identifies, if any."""
    if kind is InputKind.EMAIL:
        return "email"
    if kind is InputKind.PHONE:
        return "phone"
    if kind is InputKind.SOCIAL_HANDLE and platform is not None:
        return f"social_handle_{platform.value}"
    return None


def canonical_hard_value(attribute: str, value: str) -> str:
    """Best-effort canonical form of a hard-identifier value for comparison.

    Never raises: values that cannot be normalized are folded to a lowered,
    trimmed form that simply will not match a well-formed query.
    """
    if attribute == "email":
        try:
            return normalize_email(value)
        except MalformedEmailError:
            return value.strip().lower()
    if attribute == "phone":
        text = value.strip()
        has_plus = text.startswith("+")
        digits = (text[1:] if has_plus else text).translate(_PHONE_STRIP_TABLE)
        return ("+" if has_plus else "") + digits
    if attribute.startswith("social_handle_"):
        text = value.strip()
        if text.startswith("@"):
            text = text[1:]
        return text.lower()
    return value.strip().lower()


def _collapse(text: str) -> str:
    return " ".join(text.split())


def _looks_like_phone(text: str) -> bool:
    body = text[1:] if text.startswith("+") else text
    digits = body.translate(_PHONE_STRIP_TABLE)
    return (
        bool(digits)
        and digits.isascii()
        and digits.isdigit()
        and MIN_PHONE_DIGITS <= len(digits) <= MAX_PHONE_DIGITS
    )


def _looks_like_name(text: str) -> bool:
    alpha_tokens = [t for t in text.split() if t.isalpha() and len(t) >= 2]
    return len(alpha_tokens) >= 2


def _platform_from_prefix(text: str) -> Optional[tuple[Platform, str]]:
    match = _PLATFORM_PREFIX_RE.match(text)
    if match is None:
        return None
    return Platform(match.group(1).lower()), match.group(2)


def classify_input(
    raw: str,
    kind_hint: Optional[InputKind] = None,
    platform_hint: Optional[Platform] = None,
    default_region: str = DEFAULT_REGION,
) -> QueryInput:
    """Classify *raw* into a :class:`QueryInput`.

    With *kind_hint* the string must fit that kind's syntax or
    :class:`InvalidForHintError` is raised.  Without a hint the fixed rule
    order (email, phone, social handle, domain, name, keyword) applies and
    every non-empty string classifies to exactly one kind.  Social handles
    are only detected from explicit ``platform:handle`` syntax or a leading
    ``@`` plus a *platform_hint*; a bare ``@handle`` without a platform falls
    back to keyword with a warning.
    """
    text = raw.strip()
    if not text:
        raise EmptyInputError("query string is empty")

    if kind_hint is not None:
        return _classify_hinted(raw, text, kind_hint, platform_hint, default_region)

    if _EMAIL_RE.match(text):
        return QueryInput(InputKind.EMAIL, raw, normalize_email(text))
    if _looks_like_phone(text):
        return QueryInput(InputKind.PHONE, raw, normalize_phone(text, default_region))
    prefixed = _platform_from_prefix(text)
    if prefixed is not None:
        platform, handle = prefixed
        return QueryInput(
            InputKind.SOCIAL_HANDLE, raw, normalize_handle(handle), platform
        )
    if text.startswith("@"):
        if platform_hint is not None:
            return QueryInput(
                InputKind.SOCIAL_HANDLE, raw, normalize_handle(text), platform_hint
            )
        logger.warning(
            "bare @handle without a platform hint; treating %r as a keyword", raw
        )
        return QueryInput(InputKind.KEYWORD, raw, _collapse(text.lower()))
    if _DOMAIN_RE.match(text):
        return QueryInput(InputKind.DOMAIN, raw, text.lower().rstrip("."))
    if _looks_like_name(text):
        return QueryInput(InputKind.NAME, raw, _collapse(text.lower()))
    return QueryInput(InputKind.KEYWORD, raw, _collapse(text.lower()))


def _classify_hinted(
    raw: str,
    text: str,
    kind_hint: InputKind,
    platform_hint: Optional[Platform],
    default_region: str,
) -> QueryInput:
    if platform_hint is not None and kind_hint is not InputKind.SOCIAL_HANDLE:
        raise InvalidForHintError(
            f"platform hint {platform_hint.value!r} only applies to social handles"
        )

    if kind_hint is InputKind.EMAIL:
        try:
            return QueryInput(InputKind.EMAIL, raw, normalize_email(text))
        except MalformedEmailError as exc:
            raise InvalidForHintError(str(exc)) from exc

    if kind_hint is InputKind.PHONE:
        try:
            return QueryInput(
                InputKind.PHONE, raw, normalize_phone(text, default_region)
            )
        except MalformedPhoneError as exc:
            raise InvalidForHintError(str(exc)) from exc

    if kind_hint is InputKind.SOCIAL_HANDLE:
        prefixed = _platform_from_prefix(text)
        if prefixed is not None:
            platform, handle = prefixed
            if platform_hint is not None and platform_hint is not platform:
                raise InvalidForHintError(
                    f"handle names platform {platform.value!r} but hint says "
                    f"{platform_hint.value!r}"
                )
            return QueryInput(
                InputKind.SOCIAL_HANDLE, raw, normalize_handle(handle), platform
            )
        if platform_hint is None:
            raise InvalidForHintError(
                "social handle needs a platform: use 'platform:handle' syntax "
                "or pass a platform hint"
            )
        return QueryInput(
            InputKind.SOCIAL_HANDLE, raw, normalize_handle(text), platform_hint
        )

    if kind_hint is InputKind.DOMAIN:
        if not _DOMAIN_RE.match(text):
            raise InvalidForHintError(f"not a valid domain: {raw!r}")
        return QueryInput(InputKind.DOMAIN, raw, text.lower().rstrip("."))

    if kind_hint is InputKind.NAME:
        if not _looks_like_name(text):
            raise InvalidForHintError(
                f"a name needs at least two alphabetic words: {raw!r}"
            )
        return QueryInput(InputKind.NAME, raw, _collapse(text.lower()))

    if kind_hint is InputKind.KEYWORD:
        return QueryInput(InputKind.KEYWORD, raw, _collapse(text.lower()))

    if kind_hint is InputKind.IMAGE_PATH:
        path = Path(text)
        if not path.is_file():
            raise MissingImageError(f"image file not found: {text}")
        return QueryInput(InputKind.IMAGE_PATH, raw, text)

    raise InvalidForHintError(f"unsupported kind hint: {kind_hint!r}")
