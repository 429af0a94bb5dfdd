import time

import pytest

from dossier.collect.records import (
    CollectorOutcome,
    ExecutionConfig,
    OutcomeStatus,
    RawRecord,
)
from dossier.collect.executor import execute_stack
from dossier.inputs import InputKind, QueryInput
from dossier.routing import CollectorDescriptor, accepts

QUERY = QueryInput(InputKind.KEYWORD, "probe", "probe")


def descriptor(name: str) -> CollectorDescriptor:
    return CollectorDescriptor(name=name, accepts=accepts("keyword"))


def record(value: str) -> RawRecord:
    return RawRecord(attribute="full_name", value=value, confidence=0.9, provenance="p")


class TestValueTypes:
    def test_raw_record_confidence_bounds(self):
        with pytest.raises(ValueError):
            RawRecord(attribute="a", value="v", confidence=1.5, provenance="p")
        with pytest.raises(ValueError):
            RawRecord(attribute="a", value="v", confidence=-0.1, provenance="p")

    def test_failed_outcome_cannot_carry_records(self):
        with pytest.raises(ValueError):
            CollectorOutcome(
                collector="c",
                status=OutcomeStatus.ERROR,
                records=(record("x"),),
                error_detail="boom",
            )

    def test_status_and_detail_must_agree(self):
        with pytest.raises(ValueError):
            CollectorOutcome(collector="c", status=OutcomeStatus.SUCCESS, error_detail="?")
        with pytest.raises(ValueError):
            CollectorOutcome(collector="c", status=OutcomeStatus.TIMEOUT)

    def test_execution_config_bounds(self):
        with pytest.raises(ValueError):
            ExecutionConfig(per_collector_timeout_ms=0)
        with pytest.raises(ValueError):
            ExecutionConfig(max_parallel=0)


class TestExecuteStack:
    def test_empty_collector_list_rejected(self):
        with pytest.raises(ValueError):
            execute_stack(QUERY, [], lambda d, q: [])

    def test_one_outcome_per_collector_sorted_by_name(self):
        collectors = [descriptor(n) for n in ("zeta", "alpha", "mid")]

        def fetch(d, q):
            return [record(d.name)]

        outcomes = execute_stack(QUERY, collectors, fetch)
        assert [o.collector for o in outcomes] == ["alpha", "mid", "zeta"]
        assert all(o.status is OutcomeStatus.SUCCESS for o in outcomes)
        assert [o.records[0].value for o in outcomes] == ["alpha", "mid", "zeta"]

    def test_failure_is_isolated_data(self):
        def fetch(d, q):
            if d.name == "bad":
                raise ValueError("boom")
            return [record(d.name)]

        outcomes = execute_stack(QUERY, [descriptor("bad"), descriptor("good")], fetch)
        by_name = {o.collector: o for o in outcomes}
        assert by_name["bad"].status is OutcomeStatus.ERROR
        assert by_name["bad"].error_detail == "ValueError: boom"
        assert by_name["bad"].records == ()
        assert by_name["good"].status is OutcomeStatus.SUCCESS

    def test_timeout_becomes_outcome(self):
        def fetch(d, q):
            if d.name == "slow":
                time.sleep(0.5)
            return [record(d.name)]

        outcomes = execute_stack(
            QUERY,
            [descriptor("slow"), descriptor("quick")],
            fetch,
            ExecutionConfig(per_collector_timeout_ms=80),
        )
        by_name = {o.collector: o for o in outcomes}
        assert by_name["slow"].status is OutcomeStatus.TIMEOUT
        assert by_name["slow"].error_detail == "no response within 80 ms"
        assert by_name["quick"].status is OutcomeStatus.SUCCESS

    def test_timeouts_respect_the_parallel_bound(self):
        # Four hung collectors, two at a time, 200 ms budget each: the whole
        # stack must finish in about two timeout windows, not four.
        def fetch(d, q):
            time.sleep(10)
            return []

        started = time.perf_counter()
        outcomes = execute_stack(
            QUERY,
            [descriptor(f"hung-{i}") for i in range(4)],
            fetch,
            ExecutionConfig(per_collector_timeout_ms=200, max_parallel=2),
        )
        elapsed = time.perf_counter() - started
        assert all(o.status is OutcomeStatus.TIMEOUT for o in outcomes)
        assert elapsed < 1.5

    def test_collectors_actually_run_in_parallel(self):
        def fetch(d, q):
            time.sleep(0.15)
            return [record(d.name)]

        started = time.perf_counter()
        outcomes = execute_stack(
            QUERY,
            [descriptor(f"c{i}") for i in range(8)],
            fetch,
            ExecutionConfig(per_collector_timeout_ms=5000, max_parallel=8),
        )
        elapsed = time.perf_counter() - started
        assert len(outcomes) == 8
        assert elapsed < 8 * 0.15  # strictly better than serial

    def test_elapsed_ms_is_recorded(self):
        def fetch(d, q):
            time.sleep(0.05)
            return []

        (outcome,) = execute_stack(QUERY, [descriptor("c")], fetch)
        assert outcome.elapsed_ms >= 40

    def test_fail_fast_cancels_pending_collectors(self):
        def fetch(d, q):
            if d.name == "a_fails":
                raise RuntimeError("dead")
            time.sleep(0.2)
            return [record(d.name)]

        collectors = [descriptor("a_fails"), descriptor("b_later"), descriptor("c_later")]
        outcomes = execute_stack(
            QUERY,
            collectors,
            fetch,
            ExecutionConfig(max_parallel=1, fail_fast=True),
        )
        by_name = {o.collector: o for o in outcomes}
        assert by_name["a_fails"].status is OutcomeStatus.ERROR
        assert by_name["a_fails"].error_detail == "RuntimeError: dead"
        for name in ("b_later", "c_later"):
            assert by_name[name].status is OutcomeStatus.ERROR
            assert by_name[name].error_detail == "cancelled before start (fail-fast)"

    def test_without_fail_fast_everything_runs(self):
        def fetch(d, q):
            if d.name == "a_fails":
                raise RuntimeError("dead")
            return [record(d.name)]

        collectors = [descriptor("a_fails"), descriptor("b_later")]
        outcomes = execute_stack(
            QUERY, collectors, fetch, ExecutionConfig(max_parallel=1)
        )
        by_name = {o.collector: o for o in outcomes}
        assert by_name["b_later"].status is OutcomeStatus.SUCCESS

    def test_fetch_receives_descriptor_and_query(self):
        seen = []

        def fetch(d, q):
            seen.append((d.name, q.canonical))
            return []

        execute_stack(QUERY, [descriptor("only")], fetch)
        assert seen == [("only", "probe")]
