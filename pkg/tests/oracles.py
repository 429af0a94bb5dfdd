"""Independent brute-force reference implementations used by the tests.

Nothing here shares code paths with the package: clustering is done by
explicit pairwise edges plus breadth-first components instead of union-find,
and text similarity is re-derived from scratch.  If the package and these
oracles ever disagree, the package is wrong (or the contract changed).
"""

from __future__ import annotations

import math
import re
import unicodedata
from functools import lru_cache

HARD_ATTRS = {
    "email",
    "phone",
    "social_handle_twitter",
    "social_handle_facebook",
    "social_handle_instagram",
}
NAME_ATTRS = {"full_name", "alias"}

_ORACLE_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@lru_cache(maxsize=4096)
def oracle_tokens(value: str) -> frozenset:
    decomposed = unicodedata.normalize("NFKD", value)
    folded = "".join(c for c in decomposed if not unicodedata.combining(c)).lower()
    return frozenset(_ORACLE_TOKEN_RE.findall(folded))


def oracle_jaccard(left: str, right: str) -> float:
    a, b = oracle_tokens(left), oracle_tokens(right)
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def _hard_edge(a, b) -> bool:
    if a.source == b.source and a.provenance == b.provenance:
        return True
    return (
        a.attribute in HARD_ATTRS
        and a.attribute == b.attribute
        and a.value == b.value
    )


def oracle_partition(records) -> list[list[int]]:
    """Partition record indices by the clustering rules, brute force.

    Hard stage: explicit pairwise edge matrix + BFS components.  Soft stage:
    repeatedly merge any two components that both lack hard identifiers and
    share a name with token overlap >= 0.5, until nothing merges.
    """
    n = len(records)
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if _hard_edge(records[i], records[j]):
                adjacency[i].append(j)
                adjacency[j].append(i)

    seen = [False] * n
    components: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        queue = [start]
        seen[start] = True
        component = []
        while queue:
            node = queue.pop()
            component.append(node)
            for neighbour in adjacency[node]:
                if not seen[neighbour]:
                    seen[neighbour] = True
                    queue.append(neighbour)
        components.append(sorted(component))

    def has_hard(component) -> bool:
        return any(records[i].attribute in HARD_ATTRS for i in component)

    def names(component) -> list[str]:
        return [records[i].value for i in component if records[i].attribute in NAME_ATTRS]

    merged = True
    while merged:
        merged = False
        for x in range(len(components)):
            if has_hard(components[x]):
                continue
            x_names = names(components[x])
            if not x_names:
                continue
            for y in range(x + 1, len(components)):
                if has_hard(components[y]):
                    continue
                y_names = names(components[y])
                if not y_names:
                    continue
                best = max(oracle_jaccard(a, b) for a in x_names for b in y_names)
                if best >= 0.5:
                    components[x] = sorted(components[x] + components[y])
                    del components[y]
                    merged = True
                    break
            if merged:
                break
    return sorted(components)


def oracle_visibility(records, reliabilities) -> float:
    counts: dict[str, int] = {}
    for record in records:
        counts[record.source] = counts.get(record.source, 0) + 1
    return sum(
        reliabilities.get(source, 1.0) * math.log2(1 + count)
        for source, count in sorted(counts.items())
    )


def oracle_best_cluster(clusters, query_kind, canonical, platform, reliabilities):
    """Brute-force candidate choice: score every cluster, apply tie-breaks.

    *clusters* is a list of (cluster_id, records).  Returns the winning
    cluster_id.
    """
    hard_attr = None
    if query_kind == "email":
        hard_attr = "email"
    elif query_kind == "phone":
        hard_attr = "phone"
    elif query_kind == "social_handle" and platform:
        hard_attr = f"social_handle_{platform}"

    visibilities = {
        cluster_id: oracle_visibility(records, reliabilities)
        for cluster_id, records in clusters
    }
    max_visibility = max(visibilities.values()) if visibilities else 0.0

    scored = []
    for cluster_id, records in clusters:
        hard = 0.0
        if hard_attr is not None and any(
            r.attribute == hard_attr and r.value == canonical for r in records
        ):
            hard = 1.0
        name = 0.0
        if query_kind in ("name", "keyword"):
            overlaps = [
                oracle_jaccard(canonical, r.value)
                for r in records
                if r.attribute in NAME_ATTRS
            ]
            if overlaps:
                name = max(overlaps)
        ratio = visibilities[cluster_id] / max_visibility if max_visibility > 0 else 0.0
        score = 3.0 * hard + 1.0 * name + 0.5 * ratio
        scored.append((-score, -visibilities[cluster_id], cluster_id))
    return min(scored)[2]
