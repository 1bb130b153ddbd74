# tests/test_config.py
import json
from fractions import Fraction

import pytest

from app.config import RunConfig, parse_rational
from app.embed.dense import DenseParams
from app.engine import THREADS_ENV
from app.errors import InputError, ParametersInfeasible


class TestRationals:
    @pytest.mark.parametrize("value, expected", [
        ("1/3", Fraction(1, 3)),
        (" 2/4 ", Fraction(1, 2)),
        (0.25, Fraction(1, 4)),
        (3, Fraction(3)),
        (Fraction(1, 7), Fraction(1, 7)),
    ])
    def test_accepts(self, value, expected):
        assert parse_rational(value) == expected

    @pytest.mark.parametrize("value", [True, "abc", "1/0", [1], None])
    def test_rejects(self, value):
        with pytest.raises(InputError):
            parse_rational(value)


class TestRunConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV, raising=False)
        cfg = RunConfig()
        assert (cfg.seed, cfg.s, cfg.n, cfg.epsilon) == (0, 3, 4, Fraction(1, 2))
        assert cfg.workers == 1 and cfg.relaxed

    def test_from_dict(self):
        cfg = RunConfig.from_dict({"epsilon": "1/4", "gamma": 0.125, "s": 4})
        assert cfg.epsilon == Fraction(1, 4) and cfg.gamma == Fraction(1, 8) and cfg.s == 4
        with pytest.raises(InputError):
            RunConfig.from_dict({"epsilon": "1/4", "colour": "red"})

    @pytest.mark.parametrize("data", [{"s": 1}, {"n": 0}, {"seed": -1}, {"seed": 1 << 64}, {"epsilon": "0"}])
    def test_invalid(self, data):
        with pytest.raises(InputError):
            RunConfig.from_dict(data)

    def test_load(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 7, "a_ratio": "1/3"}))
        cfg = RunConfig.load(path)
        assert cfg.seed == 7 and cfg.a_ratio == Fraction(1, 3)
        assert RunConfig.load(None) == RunConfig()
        assert cfg.with_seed(None) is cfg and cfg.with_seed(9).seed == 9

    @pytest.mark.parametrize("text", ["{", "[1, 2]"])
    def test_load_rejects(self, tmp_path, text):
        path = tmp_path / "run.json"
        path.write_text(text)
        with pytest.raises(InputError):
            RunConfig.load(path)

    def test_workers_capped_by_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert RunConfig(workers=8).workers == 2


class TestBuilders:
    def test_dense(self):
        assert isinstance(RunConfig().dense_params(4), DenseParams)
        assert RunConfig(d_schedule=[0, 5]).dense_params(4).d_schedule == (0, 5)
        with pytest.raises(ParametersInfeasible):
            RunConfig(relaxed=False, d_schedule=[0, 5]).dense_params(4)

    def test_schedule(self):
        assert RunConfig().size_schedule(31).a == (31, 7, 1)
        assert RunConfig(relaxed=False).size_schedule(64).a == (64, 4)
        with pytest.raises(ParametersInfeasible):
            RunConfig(relaxed=False, a_schedule=[64, 16]).size_schedule(64)

    def test_match_and_stability(self):
        cfg = RunConfig(epsilon="1/4")
        assert cfg.match_params(1).m == 1
        assert cfg.match_params(4).m == 2
        stab = cfg.stability_params(4)
        assert stab.epsilon == Fraction(1, 4) and stab.match.m == 2
        assert cfg.decompose_epsilon() == Fraction(1, 4)
        assert RunConfig(epsilon=2).decompose_epsilon() == Fraction(1, 2)
