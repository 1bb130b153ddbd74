# tests/test_engine.py
import pytest

from app.engine import THREADS_ENV, WorkerPool, worker_cap
from app.errors import BudgetExceeded


class TestWorkerCap:
    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert worker_cap() == 1

    def test_env_caps_request(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert worker_cap(8) == 2
        assert worker_cap(1) == 1

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "many")
        with pytest.raises(ValueError):
            worker_cap(4)


class TestWorkerPool:
    def test_map_keeps_input_order(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        with WorkerPool(4) as pool:
            assert pool.map_ordered(lambda x: x * x, range(20)) == [x * x for x in range(20)]

    def test_same_result_for_any_worker_count(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        results = []
        for workers in (1, 3):
            with WorkerPool(workers) as pool:
                results.append(pool.map_ordered(str, range(10)))
        assert results[0] == results[1]

    def test_budget(self):
        pool = WorkerPool(1, budget=3)
        pool.charge(3)
        with pytest.raises(BudgetExceeded):
            pool.charge()
        assert pool.nodes == 4
