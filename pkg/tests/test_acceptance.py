"""Long statistical and exhaustive checks; run with ``pytest -m slow``."""

import math

import numpy as np
import pytest

pytestmark = pytest.mark.slow


def test_contractions_agree_with_enumeration_on_many_codes(random_small_code):
    from brickqec.core.noise import NoiseModel
    from brickqec.core.oracle import brute_coset_probability
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import coset_probability, contract_tanner_chain

    rng = np.random.default_rng(2024)
    for seed in range(200):
        n = int(rng.integers(4, 13))
        k = int(rng.integers(1, min(3, n - 1) + 1))
        d = int(rng.integers(1, 4))
        code = random_small_code(n, k, d, seed)
        px, py, pz = rng.dirichlet([1, 1, 1]) * rng.uniform(0.01, 0.3)
        noise = NoiseModel(1 - px - py - pz, px, py, pz)
        extra = code.logical_generators(exclude=int(rng.integers(k)))
        f = PauliString.from_indices(rng.integers(0, 4, n))
        ref = brute_coset_probability(code, f, noise, extra)
        assert math.exp(coset_probability(code, f, noise, extra)) == pytest.approx(ref, rel=1e-9)
        assert math.exp(contract_tanner_chain(code, f, noise, extra)) == pytest.approx(ref, rel=1e-9)


def test_class_tables_are_normalised(random_small_code):
    from brickqec.core.noise import depolarizing, sample_error, syndrome
    from brickqec.core.oracle import brute_ml_decode, brute_total_probability

    rng = np.random.default_rng(7)
    for seed in range(50):
        n = int(rng.integers(3, 9))
        k = int(rng.integers(1, min(3, n - 1) + 1))
        code = random_small_code(n, k, 2, seed)
        noise = depolarizing(float(rng.uniform(0.02, 0.3)))
        s = syndrome(code, sample_error(noise, n, rng))
        _, table = brute_ml_decode(code, s, noise)
        assert table.sum() == pytest.approx(brute_total_probability(code, s, noise), rel=1e-9)


def test_bulk_rate_decays_with_depth_below_threshold():
    from brickqec.core.experiments import decay

    _, fit = decay("1/5", 0.05, [2, 3, 4, 5], 20_000, seed=3, workers=None, progress=False)
    assert fit.slope < 0
    assert fit.r_squared > 0.95
    assert not fit.excluded


def test_threshold_fit_with_noisy_synthetic_data():
    from brickqec.core.fitting import scaling_model, threshold_fit
    from brickqec.utils.seeding import STREAM_SYNTHETIC, rng_for

    rng = rng_for(11, STREAM_SYNTHETIC)
    pts = []
    for d in (3, 4, 5, 6):
        for p in np.linspace(0.10, 0.19, 10):
            y = float(scaling_model(np.array([[p], [d]]), 0.144, 1.0, 0.1, 1.0, 2.0)[0])
            pts.append({"p": float(p), "d": d, "p_L_prime": y * (1 + 0.01 * rng.standard_normal())})
    fit = threshold_fit(pts, resamples=50, seed=11)
    assert abs(fit.p_c - 0.144) < 0.003


def test_bootstrap_band_usually_covers_the_true_threshold():
    from brickqec.core.fitting import scaling_model, threshold_fit
    from brickqec.utils.seeding import STREAM_SYNTHETIC, rng_for

    grid = [(float(p), d) for d in (3, 4, 5, 6) for p in np.linspace(0.10, 0.19, 10)]
    clean = [float(scaling_model(np.array([[p], [d]]), 0.144, 1.0, 0.1, 1.0, 2.0)[0]) for p, d in grid]
    covered = 0
    for rep in range(100):
        rng = rng_for(rep, STREAM_SYNTHETIC)
        pts = [{"p": p, "d": d, "p_L_prime": y * (1 + 0.01 * rng.standard_normal())}
               for (p, d), y in zip(grid, clean)]
        fit = threshold_fit(pts, resamples=50, seed=rep)
        assert abs(fit.p_c - 0.144) < 0.003
        covered += abs(fit.p_c - 0.144) <= 2 * fit.p_c_err
    assert covered >= 90


def test_pairwise_crossings_bracket_the_threshold():
    from brickqec.core.experiments import sweep
    from brickqec.core.fitting import crossing_points

    ps = [0.10, 0.12, 0.14, 0.16, 0.18]
    pts = sweep("1/5", [3, 4, 5], ps, 20_000, seed=4, n=30, workers=None, progress=False)
    crossings = crossing_points(pts)
    assert {(d1, d2) for d1, d2, _ in crossings} == {(3, 4), (3, 5), (4, 5)}
    for _, _, p in crossings:
        assert 0.124 <= p <= 0.164


def test_bulk_plateau_does_not_depend_on_size():
    from brickqec.core.codes import CodeParams
    from brickqec.core.experiments import bulk_mask, bulk_rate, failure_profile

    rates = {}
    for n in (30, 50):
        prof = failure_profile(CodeParams(n, "1/2", 4, seed=5), 0.02, 5000, seed=5, workers=None, progress=False)
        bulk = bulk_rate(prof)
        edge = ~bulk_mask(prof.positions, prof.n_phys, 4)
        assert prof.rates[edge].mean() > bulk.p_L_prime
        rates[n] = bulk
    a, b = rates[30], rates[50]
    assert abs(a.p_L_prime - b.p_L_prime) <= 3 * math.hypot(a.stderr, b.stderr)


def test_near_threshold_correlations_decay_with_distance():
    from brickqec.core.codes import CodeParams
    from brickqec.core.experiments import correlations, default_size

    params = CodeParams(default_size("1/5", 4), "1/5", 4, seed=6)
    curve = correlations(params, 0.14, 5000, seed=6, workers=None, progress=False)
    assert curve[0].value > 0
    assert curve[-1].value < curve[0].value
    assert curve[-1].x > curve[0].x


def test_greedy_is_no_worse_than_standard():
    from brickqec.core.experiments import compare_variants

    res = compare_variants("1/5", 4, 0.10, 20_000, seed=7, workers=None, progress=False)
    std, greedy = res["standard"], res["greedy"]
    assert greedy.p_L_prime <= std.p_L_prime + 2 * math.hypot(std.stderr, greedy.stderr)


def test_csv_payload_does_not_depend_on_worker_count(tmp_path):
    from brickqec.cli.cli_main import main

    payloads = []
    for workers in ("1", "3"):
        out = tmp_path / f"sweep_{workers}.csv"
        assert main(["--quiet", "--workers", workers, "sweep", "--rate", "1/5", "--depths", "2,3",
                     "--n", "40", "--ps", "0.08,0.12", "--trials", "40", "--seed", "9", "--out", str(out)]) == 0
        payloads.append([line for line in out.read_text().splitlines() if not line.startswith("#")])
    assert payloads[0] == payloads[1]
    assert len(payloads[0]) == 5
