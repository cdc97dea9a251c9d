import io
from fractions import Fraction

import pytest

from chaincut.experiments import (
    ExperimentConfig,
    SweepSpec,
    gen_layered_network,
    run_sweep,
    summarize,
    write_rows_csv,
    write_summary_csv,
)
from chaincut.fixtures import example2
from chaincut.netgraph import MICRO
from chaincut.solvers import solve_greedy, solve_no_redundancy


def test_generator_validation():
    with pytest.raises(ValueError):
        gen_layered_network(0, 2, 1.0, 0.5, 0)
    with pytest.raises(ValueError):
        gen_layered_network(2, 2, 1.5, 0.5, 0)
    with pytest.raises(ValueError):
        gen_layered_network(2, 2, 1.0, -0.1, 0)


def test_generator_degenerate_is_example2():
    for seed in (0, 7, 123):
        net, req = gen_layered_network(3, 2, 1.0, 0.0, seed)
        enet, ereq = example2(3, 2)
        assert net.edges == enet.edges
        assert req.placements == ereq.placements
        assert all(e.capacity.micro == MICRO for e in net.edges)


def test_generator_capacities_inside_open_interval():
    net, _ = gen_layered_network(4, 3, 1.0, 0.5, 99)
    lo, hi = MICRO // 2, 3 * MICRO // 2
    assert len(net.edges) == 4 + 2 * 16 + 4
    for e in net.edges:
        assert lo < e.capacity.micro < hi


def test_generator_p_zero_is_empty_and_infeasible():
    net, req = gen_layered_network(3, 2, 0.0, 0.5, 5)
    assert net.edges == ()
    assert solve_no_redundancy(net, req).delay.is_infeasible
    assert solve_greedy(net, req).delay.is_infeasible


def test_generator_deterministic_in_seed():
    a, _ = gen_layered_network(3, 3, 0.7, 0.5, 42)
    b, _ = gen_layered_network(3, 3, 0.7, 0.5, 42)
    c, _ = gen_layered_network(3, 3, 0.7, 0.5, 43)
    assert a.edges == b.edges
    assert a.edges != c.edges


def test_config_defaults_and_validation():
    cfg = ExperimentConfig()
    assert (cfg.n, cfg.k, cfg.alpha, cfg.p, cfg.u, cfg.trials) == (
        10,
        10,
        2,
        1.0,
        0.5,
        10,
    )
    with pytest.raises(ValueError):
        ExperimentConfig(p=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(algorithms=("nope",))
    with pytest.raises(ValueError):
        ExperimentConfig(sweep=SweepSpec("bogus", (1, 2)))
    with pytest.raises(ValueError):
        ExperimentConfig(sweep=SweepSpec("n", ()))
    with pytest.raises(ValueError):  # grid validated eagerly: n=0 invalid
        ExperimentConfig(sweep=SweepSpec("n", (0, 2)))


def test_config_dict_round_trip():
    cfg = ExperimentConfig(
        n=3, k=2, trials=4, seed=9, sweep=SweepSpec("u", (0.0, 0.5, 1.0))
    )
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": 3, "mystery": 1})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"sweep": {"param": "n", "other": 1}})


def small_config(**kw):
    base = dict(n=3, k=2, alpha=2, p=0.9, u=0.5, trials=3, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_sweep_shape_and_reproducibility():
    cfg = small_config(sweep=SweepSpec("n", (2, 3)))
    rows = run_sweep(cfg)
    assert len(rows) == 2 * 3 * 4  # values x trials x algorithms
    assert rows == run_sweep(cfg)
    assert rows == run_sweep(cfg, workers=3)
    values = {r.value for r in rows}
    assert values == {2, 3}
    assert all(r.sweep_param == "n" for r in rows)


def test_threads_env_caps_workers(monkeypatch):
    cfg = small_config()
    want = run_sweep(cfg)
    monkeypatch.setenv("CHAINCUT_THREADS", "1")
    assert run_sweep(cfg, workers=8) == want


def test_rows_are_paired_across_algorithm_subsets():
    full = run_sweep(small_config(trials=4))
    only = run_sweep(small_config(trials=4, algorithms=("greedy",)))
    greedy_rows = [r for r in full if r.algorithm == "greedy"]
    assert greedy_rows == list(only)


def test_per_instance_dominance():
    rows = run_sweep(small_config(n=4, k=3, trials=5))
    by_trial = {}
    for r in rows:
        by_trial.setdefault(r.trial, {})[r.algorithm] = r.delay
    for delays in by_trial.values():
        assert delays["greedy"] <= delays["no_redundancy"]
        assert delays["alpha_optimal"] <= delays["alpha_greedy"]
        assert delays["alpha_greedy"] <= delays["no_redundancy"]


def test_u_zero_closed_forms():
    cfg = ExperimentConfig(
        k=4, alpha=2, p=1.0, u=0.0, trials=2, seed=0, sweep=SweepSpec("n", (1, 2, 3))
    )
    for row in run_sweep(cfg):
        n = row.value
        if row.algorithm == "no_redundancy":
            assert row.delay == 5  # K + 1
        elif row.algorithm == "greedy":
            assert row.delay == 1 + Fraction(4, n)
        elif row.algorithm == "alpha_optimal":
            assert row.delay == 1 + Fraction(4, min(2, n))
        assert row.resamples == 0


def test_resample_abort_diagnostic():
    with pytest.raises(RuntimeError, match="100 resamples"):
        run_sweep(ExperimentConfig(n=2, k=2, p=0.0, trials=1))


def test_resampling_skips_infeasible_draws():
    # p=0.35 on a tiny trellis is often disconnected: resamples happen
    # but every kept row carries a finite delay
    rows = run_sweep(ExperimentConfig(n=2, k=2, p=0.35, trials=6, seed=3))
    assert any(r.resamples > 0 for r in rows)
    for r in rows:
        assert isinstance(r.delay, Fraction) and r.delay > 0
        assert r.seed >= 0


def test_summarize_exact_and_errors():
    rows = run_sweep(small_config(trials=3))
    summary = summarize(rows)
    assert [s.algorithm for s in summary] == [
        "no_redundancy",
        "greedy",
        "alpha_optimal",
        "alpha_greedy",
    ]
    for s in summary:
        group = [r.delay for r in rows if r.algorithm == s.algorithm]
        assert s.count == 3
        assert s.mean == sum(group) / 3
    single = summarize(rows[:1])
    assert single[0].count == 1 and single[0].std == 0.0
    dup = summarize([rows[0], rows[0]])
    assert dup[0].std == 0.0 and dup[0].mean == rows[0].delay
    with pytest.raises(ValueError):
        summarize([])


def test_csv_emission():
    rows = run_sweep(small_config(trials=2, algorithms=("greedy",)))
    buf = io.StringIO()
    write_rows_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "sweep_param,value,algorithm,trial,seed,delay_decimal,resamples"
    assert len(lines) == 1 + len(rows)
    first = lines[1].split(",")
    assert first[2] == "greedy"
    assert float(first[5]) == pytest.approx(float(rows[0].delay), abs=0)

    buf = io.StringIO()
    write_summary_csv(summarize(rows), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "sweep_param,value,algorithm,count,mean,std"
    assert len(lines) == 2
