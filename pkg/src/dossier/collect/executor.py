"""Bounded-parallel collector fan-out.

One query goes out to every routed collector at once, capped by
``max_parallel``.  Each collector gets its own timeout and its own failure:
a crash or hang in one never disturbs the others, and the caller always
gets exactly one outcome per collector, sorted by name.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from time import perf_counter
from typing import Callable, Optional, Sequence

from ..inputs import QueryInput
from ..routing import Backend, CollectorDescriptor
from .adapters import fetch_http
from .corpus import Corpus, corpus_collect
from .records import CollectorOutcome, ExecutionConfig, OutcomeStatus, RawRecord

# A fetcher produces the raw records for one (collector, query) pair.
Fetcher = Callable[[CollectorDescriptor, QueryInput], Sequence[RawRecord]]


def make_fetcher(corpus: Corpus, timeout_ms: int = 5000) -> Fetcher:
    """Dispatch each collector to its backend: the corpus or an HTTP endpoint."""

    def fetch(descriptor: CollectorDescriptor, query: QueryInput) -> Sequence[RawRecord]:
        if descriptor.backend is Backend.HTTP:
            assert descriptor.http is not None  # enforced by the descriptor
            return fetch_http(descriptor.name, descriptor.http, query, timeout_ms)
        return corpus_collect(corpus, descriptor, query)

    return fetch


_CANCELLED_DETAIL = "cancelled before start (fail-fast)"


def _run_one(
    descriptor: CollectorDescriptor,
    query: QueryInput,
    fetch: Fetcher,
    timeout_ms: int,
    stop: Optional[threading.Event] = None,
) -> CollectorOutcome:
    # Fail-fast: the first failing task sets the event before its future
    # resolves, so any task the pool starts afterwards reliably sees it.
    if stop is not None and stop.is_set():
        return CollectorOutcome(
            collector=descriptor.name,
            status=OutcomeStatus.ERROR,
            error_detail=_CANCELLED_DETAIL,
        )
    box: dict[str, object] = {}

    def target() -> None:
        try:
            box["records"] = tuple(fetch(descriptor, query))
        except Exception as exc:  # failure is data; nothing may escape
            box["error"] = exc

    started = perf_counter()
    worker = threading.Thread(target=target, daemon=True, name=f"collect-{descriptor.name}")
    worker.start()
    worker.join(timeout_ms / 1000.0)
    elapsed_ms = (perf_counter() - started) * 1000.0
    if worker.is_alive():
        outcome = CollectorOutcome(
            collector=descriptor.name,
            status=OutcomeStatus.TIMEOUT,
            error_detail=f"no response within {timeout_ms} ms",
            elapsed_ms=elapsed_ms,
        )
    elif box.get("error") is not None:
        error = box["error"]
        outcome = CollectorOutcome(
            collector=descriptor.name,
            status=OutcomeStatus.ERROR,
            error_detail=f"{type(error).__name__}: {error}",
            elapsed_ms=elapsed_ms,
        )
    else:
        outcome = CollectorOutcome(
            collector=descriptor.name,
            status=OutcomeStatus.SUCCESS,
            records=box.get("records", ()),  # type: ignore[arg-type]
            elapsed_ms=elapsed_ms,
        )
    if stop is not None and outcome.status is not OutcomeStatus.SUCCESS:
        stop.set()
    return outcome


def execute_stack(
    query: QueryInput,
    collectors: Sequence[CollectorDescriptor],
    fetch: Fetcher,
    config: Optional[ExecutionConfig] = None,
) -> list[CollectorOutcome]:
    """Run every collector against *query* and return one outcome per collector.

    Outcomes come back sorted by collector name regardless of completion
    order.  With ``fail_fast`` enabled, collectors that have not started when
    the first failure lands are cancelled and reported as errors; by default
    everything runs to completion.
    """
    if not collectors:
        raise ValueError("execute_stack needs at least one collector")
    config = config or ExecutionConfig()
    ordered = sorted(collectors, key=lambda d: d.name)

    stop = threading.Event() if config.fail_fast else None
    with ThreadPoolExecutor(
        max_workers=config.max_parallel, thread_name_prefix="stack"
    ) as pool:
        futures = {
            pool.submit(
                _run_one, descriptor, query, fetch, config.per_collector_timeout_ms, stop
            ): descriptor
            for descriptor in ordered
        }
        if config.fail_fast:
            for future in as_completed(list(futures)):
                if future.cancelled():
                    continue
                if future.result().status is not OutcomeStatus.SUCCESS:
                    for other in futures:
                        other.cancel()  # skip work the pool has not dequeued yet
                    break
        outcomes = []
        for future, descriptor in futures.items():
            if future.cancelled():
                outcomes.append(
                    CollectorOutcome(
                        collector=descriptor.name,
                        status=OutcomeStatus.ERROR,
                        error_detail=_CANCELLED_DETAIL,
                    )
                )
            else:
                outcomes.append(future.result())
    outcomes.sort(key=lambda outcome: outcome.collector)
    return outcomes
