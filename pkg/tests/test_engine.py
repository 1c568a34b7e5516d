import numpy as np
import pytest

from fdnag.codec import Genotype, SearchSpaceShape
from fdnag.engine import ConfigError, GenerationConfig, brute_force_optimum, run, run_continuous
from fdnag.oracle import (
    ConstantOracle,
    OracleError,
    SyntheticFunction,
    TabularBenchmark,
    TabularOracle,
    load_tabular,
    tabular_oracle,
)
from fdnag.selection import SelectionConfig

S22 = SearchSpaceShape(2, 2)


def test_brute_force_examples(example_table):
    g, f = brute_force_optimum(load_tabular(example_table, S22))
    assert (str(g), f) == ("0-1", 0.9)
    tied = TabularBenchmark(S22, {"1-1": 1.0, "0-1": 0.2, "1-0": 0.3, "0-0": 1.0})
    assert str(brute_force_optimum(tied)[0]) == "0-0"


def test_brute_force_cap_and_completeness(example_table):
    with pytest.raises(ConfigError, match="cap"):
        brute_force_optimum(load_tabular(example_table, S22), cap=3)
    with pytest.raises(ConfigError, match="complete"):
        brute_force_optimum(TabularBenchmark(S22, {"0-0": 1.0}, allow_partial=True))


def test_brute_force_finds_planted(planted_bench):
    assert str(brute_force_optimum(planted_bench)[0]) == "4-0-3-1-4-0"


def test_config_validation():
    with pytest.raises(ConfigError):
        GenerationConfig(n=1)
    with pytest.raises(ConfigError):
        GenerationConfig(n=5, topk=6)
    with pytest.raises(ConfigError):
        GenerationConfig(steps=0)
    with pytest.raises(ConfigError):
        GenerationConfig(n=3, selection=SelectionConfig(0.5, 0.5, 0.0))


def test_constant_fitness_two_individuals():
    cfg = GenerationConfig(shape=SearchSpaceShape(3, 4), n=2, steps=20, topk=2)
    r = run(cfg, ConstantOracle(cfg.shape, 0.25))
    assert np.all(np.isfinite(r.population))
    assert 1 <= len(r.topk) <= 2
    assert all(f == 0.25 for _, f in r.topk)


def test_run_is_deterministic(planted_bench):
    cfg = GenerationConfig(steps=30, seed=5)
    a = run(cfg, tabular_oracle(planted_bench))
    b = run(cfg, tabular_oracle(planted_bench))
    assert a.to_json() == b.to_json()
    assert a.trace.to_csv() == b.trace.to_csv()
    assert np.array_equal(a.population, b.population)


def test_topk_sorted_unique_and_valid(planted_bench):
    r = run(GenerationConfig(steps=30, topk=10), tabular_oracle(planted_bench))
    fits = [f for _, f in r.topk]
    assert fits == sorted(fits, reverse=True)
    assert len({g for g, _ in r.topk}) == len(r.topk)
    for g, f in r.topk:
        g.validate(r.config.shape)
        assert planted_bench.table[str(g)] == f


def test_evaluation_budget(planted_bench):
    cfg = GenerationConfig(steps=40, n=20)
    uncached = run(cfg, TabularOracle(planted_bench))
    cached = run(cfg, tabular_oracle(planted_bench))
    assert uncached.evaluations <= 2 * cfg.n * cfg.steps
    assert cached.evaluations <= min(uncached.evaluations, 15625)
    np.testing.assert_array_equal(cached.population, uncached.population)


def test_running_best_never_drops(planted_bench):
    r = run(GenerationConfig(seed=3), tabular_oracle(planted_bench))
    assert np.all(np.diff(r.trace.best) >= 0)
    assert [rec.t for rec in r.trace.records] == list(range(100, -1, -1))


def test_rastrigin_runs_with_finite_trace():
    r = run_continuous(GenerationConfig(steps=50), SyntheticFunction("rastrigin", 4))
    rows = [(x.best, x.mean, x.std) for x in r.trace.records]
    assert np.all(np.isfinite(rows))
    assert np.all(np.diff(r.trace.best) >= 0)


def test_sphere_improves_on_initial_population():
    r = run_continuous(GenerationConfig(seed=1), SyntheticFunction("sphere", 8))
    assert r.best_value > r.trace.records[0].best
    assert r.best_value == r.trace.best[-1]


@pytest.mark.xfail(strict=True, reason="farthest-point diversity slots keep far outliers, so the "
                                       "mean per-dimension std grows on the sphere; see README")
def test_sphere_spread_contracts_with_default_selection():
    r = run_continuous(GenerationConfig(seed=0), SyntheticFunction("sphere", 8))
    assert r.trace.records[-1].std < r.trace.records[0].std


def test_sphere_spread_contracts_without_diversity_slots():
    sel = SelectionConfig(0.1, 0.0, 0.9)
    for seed in range(3):
        r = run_continuous(GenerationConfig(seed=seed, selection=sel), SyntheticFunction("sphere", 8))
        assert r.trace.records[-1].std < r.trace.records[0].std


def test_guidance_beats_uniform_density_in_low_dimension():
    fn = SyntheticFunction("sphere", 2)
    fd = [run_continuous(GenerationConfig(seed=s, use_selection=False), fn).best_value for s in range(10)]
    naive = [run_continuous(GenerationConfig(seed=s, use_selection=False, guidance=False), fn).best_value
             for s in range(10)]
    assert np.mean(fd) > np.mean(naive)


def test_timing_column_only_when_requested(planted_bench):
    plain = run(GenerationConfig(steps=3), tabular_oracle(planted_bench)).trace.to_csv()
    timed = run(GenerationConfig(steps=3, record_timing=True), tabular_oracle(planted_bench)).trace.to_csv()
    assert all(line.endswith(",") for line in plain.splitlines()[1:])
    assert not any(line.endswith(",") for line in timed.splitlines()[1:])


class _Failing(ConstantOracle):
    def score(self, genotypes):
        if self.eval_count > 40:
            raise OracleError("backend went away")
        return super().score(genotypes)


def test_oracle_failure_reports_step():
    cfg = GenerationConfig(shape=SearchSpaceShape(3, 3), n=10, steps=20)
    with pytest.raises(OracleError, match=r"step t=\d+"):
        run(cfg, _Failing(cfg.shape))


def test_shape_mismatch_rejected(planted_bench):
    with pytest.raises(ConfigError):
        run(GenerationConfig(shape=SearchSpaceShape(5, 5)), tabular_oracle(planted_bench))
    with pytest.raises(ConfigError):
        from fdnag.oracle import SyntheticOracle
        run(GenerationConfig(), SyntheticOracle(SyntheticFunction("sphere", 30)))
