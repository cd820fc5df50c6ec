import numpy as np
import pytest


def _params(n=20, r="1/5", d=2, variant="standard", seed=1):
    from brickqec.core.codes import CodeParams

    return CodeParams(n, r, d, variant, seed)


def test_undetected_logical_error_is_a_failure(make_code):
    from brickqec.core.experiments import run_trial
    from brickqec.core.noise import depolarizing

    code, _ = make_code(10, "1/5", 2, seed=4)
    out = run_trial(code, depolarizing(0.01), np.random.default_rng(0), error=code.logical_x[0])
    assert list(out.failures) == [True, False]
    assert out.any_failure


def test_noiseless_trials_never_fail():
    from brickqec.core.experiments import failure_profile

    prof = failure_profile(_params(), 0.0, 4, seed=3, workers=1, progress=False)
    assert prof.trials == 4
    assert prof.failures.shape == (4, 4)
    assert prof.p_L == 0.0
    assert prof.counts.tolist() == [0, 0, 0, 0]
    assert prof.positions == _params().padded_positions()


@pytest.mark.parametrize("mode", ["fresh", "fixed"])
def test_profile_is_reproducible(mode):
    from brickqec.core.experiments import failure_profile

    a = failure_profile(_params(), 0.1, 6, seed=7, resample_code=mode, workers=1, progress=False)
    b = failure_profile(_params(), 0.1, 6, seed=7, resample_code=mode, workers=1, progress=False)
    assert np.array_equal(a.failures, b.failures)
    assert a.resample_code == mode
    rows = a.rows()
    assert [r["index"] for r in rows] == [0, 1, 2, 3]
    assert rows[1]["x"] == pytest.approx(0.25)


def test_profile_rejects_bad_arguments():
    from brickqec.core.experiments import failure_profile

    with pytest.raises(ValueError):
        failure_profile(_params(), 0.1, 0, seed=1)
    with pytest.raises(ValueError):
        failure_profile(_params(), 0.1, 2, seed=1, resample_code="sometimes")


def test_resource_errors_mark_trials_invalid():
    from brickqec.core.experiments import failure_profile

    prof = failure_profile(_params(), 0.1, 3, seed=1, workers=1, progress=False, max_width=1)
    assert prof.invalid + prof.trials == 3
    assert prof.invalid > 0


def test_bulk_mask_and_rate():
    from brickqec.core.experiments import FailureProfile, bulk_mask, bulk_rate

    mask = bulk_mask([2, 10, 20, 30, 37], 40, 2, margin_factor=4)
    assert mask.tolist() == [False, True, True, True, False]

    params = _params(n=40, d=2)
    failures = np.zeros((10, params.k), dtype=bool)
    failures[:3, :] = True
    prof = FailureProfile(params, 0.1, params.padded_positions(), params.n_phys, failures)
    rate = bulk_rate(prof, margin_factor=4)
    nb = int(bulk_mask(prof.positions, prof.n_phys, 2, 4).sum())
    assert rate.bulk_qubits == nb
    assert rate.p_L_prime == pytest.approx(0.3)
    assert rate.stderr == pytest.approx(np.sqrt(0.3 * 0.7 / (10 * nb)))


def test_empty_bulk_raises():
    from brickqec.core.experiments import FailureProfile, bulk_rate
    from brickqec.errors import FitError

    params = _params(n=10, d=2)
    prof = FailureProfile(params, 0.1, params.padded_positions(), params.n_phys,
                          np.zeros((5, params.k), dtype=bool))
    with pytest.raises(FitError):
        bulk_rate(prof, margin_factor=4)


def test_default_size_leaves_a_bulk():
    from brickqec.core.codes import CodeParams
    from brickqec.core.experiments import bulk_mask, default_size

    n = default_size("1/5", 3, margin_factor=4)
    assert n == 60
    params = CodeParams(n, "1/5", 3)
    assert bulk_mask(params.padded_positions(), params.n_phys, 3, 4).sum() >= 8


def test_correlation_of_perfectly_correlated_failures():
    from brickqec.core.experiments import correlation_curve

    failures = np.zeros((100, 4), dtype=bool)
    failures[:20] = True
    curve = correlation_curve(failures, [2, 7, 12, 17], "1/5", 2, min_events=10)
    assert [c.separation for c in curve] == [1, 2, 3]
    for c in curve:
        assert c.value == pytest.approx(0.8)
        assert c.sigma == pytest.approx(0.04)
        assert not c.low_stats
    assert curve[0].x == pytest.approx(1 / (0.2 * 2))
    assert curve[0].distance == pytest.approx(5.0)


def test_correlation_without_failures_is_flagged():
    import math

    from brickqec.core.experiments import correlation_curve

    curve = correlation_curve(np.zeros((50, 3), dtype=bool), [0, 5, 10], "1/5", 2, min_events=1)
    assert all(math.isnan(c.value) and c.low_stats and c.events == 0 for c in curve)


def test_alpha_depth():
    from brickqec.core.experiments import alpha_depth

    assert alpha_depth("1/5", 80, 1.0) == 4
    assert alpha_depth("1/5", 80, 0.5) == 8
    # raised to the padding minimum
    assert alpha_depth("1/10", 20, 4.0) == 3
    with pytest.raises(ValueError):
        alpha_depth("1/5", 80, 0.0)


def test_sweep_rows_and_shared_size():
    from brickqec.core.experiments import sweep

    pts = sweep("1/5", [2, 3], [0.05, 0.1], 3, seed=1, n=40, workers=1, progress=False)
    assert [(pt.d, pt.p) for pt in pts] == [(2, 0.05), (2, 0.1), (3, 0.05), (3, 0.1)]
    assert {pt.n for pt in pts} == {40}
    row = pts[0].row()
    assert row["r"] == "1/5" and row["n_phys"] == 44 and row["trials"] == 3
    assert 0.0 <= row["p_L_prime"] <= 1.0


def test_alpha_scaling_and_compare_shapes():
    from brickqec.core.experiments import alpha_scaling, compare_variants

    pts = alpha_scaling("1/5", 0.05, [2.0], [20, 30], 2, seed=2, workers=1, progress=False)
    assert [(pt.n, pt.k) for pt in pts] == [(20, 4), (30, 6)]
    res = compare_variants("1/5", 2, 0.05, 2, seed=2, n=40, workers=1, progress=False)
    assert set(res) == {"standard", "greedy"}
    assert res["greedy"].variant == "greedy"


def test_decay_needs_three_depths():
    from brickqec.core.experiments import decay

    with pytest.raises(ValueError):
        decay("1/5", 0.05, [2, 3], 2, seed=1)


def test_run_tasks_serial_keeps_order():
    from brickqec.utils.trials import run_tasks

    assert run_tasks(abs, [-3, 1, -2], workers=1, progress=False) == [3, 1, 2]


@pytest.mark.slow
def test_worker_count_does_not_change_counts():
    from brickqec.core.experiments import failure_profile

    a = failure_profile(_params(), 0.1, 16, seed=5, workers=1, progress=False)
    b = failure_profile(_params(), 0.1, 16, seed=5, workers=2, progress=False)
    assert np.array_equal(a.failures, b.failures)


@pytest.mark.slow
def test_failure_rate_grows_with_noise():
    from brickqec.core.experiments import failure_profile

    low = failure_profile(_params(n=20, d=3), 0.02, 200, seed=1, progress=False)
    high = failure_profile(_params(n=20, d=3), 0.2, 200, seed=1, progress=False)
    assert high.p_L > low.p_L


def test_stabilizer_errors_never_fail(make_code):
    from brickqec.core.experiments import run_trial
    from brickqec.core.noise import depolarizing

    code, _ = make_code(10, "1/5", 2, seed=6)
    e = code.checks[1] * code.checks[5]
    out = run_trial(code, depolarizing(0.05), np.random.default_rng(0), error=e)
    assert not out.failures.any()


def test_independent_failures_show_no_correlation():
    from brickqec.core.experiments import correlation_curve

    rng = np.random.default_rng(21)
    failures = rng.random((20_000, 8)) < 0.2
    curve = correlation_curve(failures, [2 + 5 * j for j in range(8)], "1/5", 2)
    for c in curve:
        assert abs(c.value) < 3 * c.sigma
