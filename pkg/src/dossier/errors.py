"""Shared exception root for the dossier package."""

from __future__ import annotations


class DossierError(Exception):
    """Base class for every error raised by this package."""
