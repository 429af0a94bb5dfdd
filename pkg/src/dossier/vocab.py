"""Controlled vocabulary for evidence attributes.

Every record that flows through the pipeline carries one of these attribute
keys.  Keeping the vocabulary closed is what lets the report templates map
attributes to sections deterministically and lets the clustering stage know
which attributes identify a person outright.
"""

from __future__ import annotations

ATTRIBUTE_KEYS: frozenset[str] = frozenset(
    {
        "full_name",
        "alias",
        "date_of_birth",
        "place_of_birth",
        "sex",
        "height_m",
        "weight_kg",
        "eye_color",
        "hair_color",
        "distinguishing_mark",
        "email",
        "phone",
        "social_handle_twitter",
        "social_handle_facebook",
        "social_handle_instagram",
        "url",
        "image_url",
        "location",
        "nationality",
        "religion",
        "ethnicity",
        "education",
        "employer",
        "job_title",
        "career_event",
        "award",
        "honor",
        "research_interest",
        "family_relation",
        "contact_office",
        "criminal_record",
        "breach",
        "interest",
        "favourite",
        "partner_history",
        "marital_status",
        "children",
        "net_worth",
        "habit",
    }
)

# Attributes whose values identify a person on their own.  Two records that
# agree on one of these (attribute, canonical value) pairs always belong to
# the same person; everything else is circumstantial.
HARD_IDENTIFIERS: frozenset[str] = frozenset(
    {
        "email",
        "phone",
        "social_handle_twitter",
        "social_handle_facebook",
        "social_handle_instagram",
    }
)

# Attributes whose values name a person (used for fuzzy matching).
NAME_ATTRIBUTES: frozenset[str] = frozenset({"full_name", "alias"})
