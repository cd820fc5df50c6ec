import math

import numpy as np
import pytest


BIASED = (0.85, 0.05, 0.04, 0.06)


def _one_qubit_code(check=None, k=0):
    from brickqec.core.codes import StabilizerCode
    from brickqec.core.pauli import PauliString

    p = PauliString.from_text
    checks = (p(check),) if check else ()
    logicals = ((p("X"),), (p("Z"),), (0,)) if k else ((), (), ())
    return StabilizerCode(1, k, checks, *logicals)


def test_check_tensor_is_a_controlled_flip():
    from brickqec.core.tn_decoder import check_tensor

    t = check_tensor("Y")
    assert t.shape == (2,) * 6
    assert t.sum() == 8
    assert t[0, 0, 0, 0, 0, 0] == 1
    assert t[1, 1, 0, 0, 1, 1] == 1
    assert t[1, 1, 0, 0, 0, 0] == 0
    assert t[0, 0, 0, 0, 0, 1] == 0
    with pytest.raises(ValueError):
        check_tensor("I")


def test_probability_tensor_shifts_by_representative():
    from brickqec.core.tn_decoder import probability_tensor

    probs = np.array([0.7, 0.1, 0.15, 0.05])
    assert probability_tensor(probs)[0, 0] == pytest.approx(0.7)
    # f = X: (i_X, i_Z) = (1, 0) reads the identity entry
    assert probability_tensor(probs, 1)[1, 0] == pytest.approx(0.7)
    assert probability_tensor(probs, 1)[0, 1] == pytest.approx(0.05)


@pytest.mark.parametrize("backend", ["grid", "explicit", "chain", "brute"])
def test_single_qubit_z_check_cosets(backend):
    from brickqec.core.noise import depolarizing
    from brickqec.core.oracle import brute_coset_probability
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import (
        build_layout, coset_probability, contract_explicit, contract_tanner_chain)

    code = _one_qubit_code("Z")
    noise = depolarizing(0.3)

    def value(f):
        if backend == "grid":
            return math.exp(coset_probability(code, f, noise))
        if backend == "explicit":
            return math.exp(contract_explicit(build_layout(code.checks, 1), f, noise))
        if backend == "chain":
            return math.exp(contract_tanner_chain(code, f, noise))
        return brute_coset_probability(code, f, noise)

    assert value(PauliString.from_text("I")) == pytest.approx(0.7 + 0.1)
    assert value(PauliString.from_text("X")) == pytest.approx(2 * 0.3 / 3)
    # Z lies in the same coset as I
    assert value(PauliString.from_text("Z")) == pytest.approx(0.8)


def test_tie_goes_to_the_first_class_in_i_x_z_y_order():
    from brickqec.core.noise import Syndrome, depolarizing
    from brickqec.core.tn_decoder import decode_marginal

    code = _one_qubit_code(k=1)
    result = decode_marginal(code, Syndrome(np.zeros(0, dtype=np.uint8)), depolarizing(0.9))
    assert result.class_symbols() == ["X"]
    assert result.correction.to_text() == "X"
    assert np.allclose(result.marginals(), [[0.1, 0.3, 0.3, 0.3]])


def test_empty_coset_is_minus_infinity():
    from brickqec.core.noise import NoiseModel
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import coset_probability, contract_tanner_chain

    code = _one_qubit_code("Z")
    noiseless = NoiseModel(1.0, 0.0, 0.0, 0.0)
    x = PauliString.from_text("X")
    assert coset_probability(code, x, noiseless) == -math.inf
    assert contract_tanner_chain(code, x, noiseless) == -math.inf
    assert coset_probability(code, PauliString.from_text("I"), noiseless) == pytest.approx(0.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_contractions_agree_with_enumeration(random_small_code, seed):
    from brickqec.core.noise import NoiseModel
    from brickqec.core.oracle import brute_coset_probability, gray_coset_probability
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout, coset_probability, contract_explicit, contract_tanner_chain

    code = random_small_code(6, 1, 2, seed)
    noise = NoiseModel(*BIASED)
    rng = np.random.default_rng(seed)
    extra = code.logical_generators()[:1]
    layout = build_layout(list(code.checks) + extra, code.n_phys)
    for _ in range(3):
        f = PauliString.from_indices(rng.integers(0, 4, code.n_phys))
        ref = brute_coset_probability(code, f, noise, extra)
        assert gray_coset_probability(code, f, noise, extra) == pytest.approx(ref, rel=1e-10)
        assert math.exp(coset_probability(code, f, noise, extra)) == pytest.approx(ref, rel=1e-9)
        assert math.exp(contract_explicit(layout, f, noise)) == pytest.approx(ref, rel=1e-9)
        assert math.exp(contract_tanner_chain(code, f, noise, extra)) == pytest.approx(ref, rel=1e-9)


def test_pinned_sigma_selects_one_term():
    from brickqec.core.noise import depolarizing
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout, contract_explicit

    code = _one_qubit_code("Z")
    layout = build_layout(code.checks, 1)
    i = PauliString.from_text("I")
    noise = depolarizing(0.3)
    assert math.exp(contract_explicit(layout, i, noise, pinned={0: 0})) == pytest.approx(0.7)
    assert math.exp(contract_explicit(layout, i, noise, pinned={0: 1})) == pytest.approx(0.1)


def test_layout_packs_disjoint_generators_into_one_column():
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout

    p = PauliString.from_text
    layout = build_layout([p("XZII"), p("IIYX"), p("IZZI")], 4)
    assert layout.n_columns == 2
    assert layout.columns[0] == layout.columns[1] == 0
    assert layout.columns[2] == 1
    assert layout.cell(1, 1) == ("Z", 2)
    assert layout.cell(0, 1) is None
    assert layout.wire_span(1) == (2, 3)
    with pytest.raises(ValueError):
        build_layout([p("IIII")], 4)


def test_width_cap_raises():
    from brickqec.core.codes import StabilizerCode
    from brickqec.core.noise import depolarizing
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import coset_probability, contract_tanner_chain
    from brickqec.errors import ResourceLimitError

    p = PauliString.from_text
    code = StabilizerCode(2, 0, (p("XX"), p("ZZ")), (), (), ())
    f = PauliString.identity(2)
    assert math.exp(coset_probability(code, f, depolarizing(0.3), max_width=2)) == pytest.approx(
        0.7 ** 2 + 3 * 0.1 ** 2)
    with pytest.raises(ResourceLimitError):
        coset_probability(code, f, depolarizing(0.1), max_width=0)
    with pytest.raises(ResourceLimitError):
        contract_tanner_chain(code, f, depolarizing(0.1), max_width=0)


def test_approximate_contraction_is_not_offered(random_small_code):
    from brickqec.core.noise import depolarizing
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import Decoder, coset_probability

    code = random_small_code(6, 1, 2, 0)
    with pytest.raises(NotImplementedError):
        coset_probability(code, PauliString.identity(code.n_phys), depolarizing(0.1), approximate=True)
    with pytest.raises(NotImplementedError):
        Decoder(code, depolarizing(0.1), approximate=True)


@pytest.mark.parametrize("seed", [3, 4])
def test_marginal_decoder_matches_global_table(random_small_code, seed):
    from brickqec.core.noise import NoiseModel, sample_error, syndrome
    from brickqec.core.oracle import brute_ml_decode, marginalize
    from brickqec.core.tn_decoder import decode_marginal

    code = random_small_code(7, 2, 2, seed)
    noise = NoiseModel(*BIASED)
    e = sample_error(noise, code.n_phys, np.random.default_rng(seed))
    s = syndrome(code, e)
    result = decode_marginal(code, s, noise)
    _, table = brute_ml_decode(code, s, noise)
    for j in range(code.k):
        marginal = marginalize(table, j)
        assert np.allclose(np.exp(result.log_probs[j]), marginal, rtol=1e-9, atol=0)
        top2 = np.sort(marginal)[-2:]
        if top2[1] - top2[0] > 1e-9 * top2[1]:
            assert result.classes[j] == int(np.argmax(marginal))


def test_backends_and_cache_agree(make_code):
    from brickqec.core.noise import depolarizing, sample_error, syndrome
    from brickqec.core.tn_decoder import Decoder

    code, _ = make_code(10, "1/5", 2, seed=9)
    noise = depolarizing(0.1)
    rng = np.random.default_rng(9)
    cached = Decoder(code, noise)
    plain = Decoder(code, noise, use_cache=False)
    chain = Decoder(code, noise, "chain")
    explicit = Decoder(code, noise, "explicit")
    for _ in range(3):
        s = syndrome(code, sample_error(noise, code.n_phys, rng))
        a = cached.decode(s)
        b = plain.decode(s)
        c = chain.decode(s)
        e = explicit.decode(s)
        assert np.array_equal(a.log_probs, b.log_probs)
        assert np.allclose(a.log_probs, c.log_probs, rtol=1e-9)
        assert np.allclose(a.log_probs, e.log_probs, rtol=1e-9)
        assert a.max_width > 0
        assert not syndrome(code, a.correction * a.pure_error).bits.any()


def test_decode_result_json(make_code):
    from brickqec.core.noise import Syndrome, depolarizing
    from brickqec.core.tn_decoder import decode_marginal

    code, _ = make_code(10, "1/5", 2, seed=1)
    result = decode_marginal(code, Syndrome(np.zeros(code.n_checks)), depolarizing(0.01))
    out = result.to_json()
    assert out["classes"] == ["I", "I"]
    assert out["correction"] == "I" * code.n_phys
    assert len(out["log_probs"]) == 2 and len(out["log_probs"][0]) == 4
    assert np.allclose(result.marginals().sum(axis=1), 1.0)


def test_unknown_backend_raises(make_code):
    from brickqec.core.noise import depolarizing
    from brickqec.core.tn_decoder import Decoder

    code, _ = make_code(10, "1/5", 2)
    with pytest.raises(ValueError):
        Decoder(code, depolarizing(0.1), "mps")


def test_coset_value_is_invariant_under_stabilizers(make_code):
    from brickqec.core.noise import NoiseModel
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import coset_probability

    code, _ = make_code(10, "1/5", 2, seed=12)
    noise = NoiseModel(*BIASED)
    rng = np.random.default_rng(12)
    f = PauliString.from_indices(rng.integers(0, 4, code.n_phys))
    g = code.checks[0] * code.checks[3] * code.checks[7]
    assert coset_probability(code, f * g, noise) == pytest.approx(coset_probability(code, f, noise), rel=1e-12)


def test_pinning_one_generator_gives_that_single_term(random_small_code):
    from brickqec.core.noise import NoiseModel
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout, contract_explicit

    code = random_small_code(5, 1, 2, 6)
    noise = NoiseModel(*BIASED)
    probs = noise.probabilities()
    layout = build_layout(code.checks, code.n_phys)
    f = PauliString.from_indices(np.random.default_rng(6).integers(0, 4, code.n_phys))
    for g in range(layout.n_generators):
        pinned = {h: int(h == g) for h in range(layout.n_generators)}
        term = float(np.prod(probs[(f * code.checks[g]).indices]))
        assert math.exp(contract_explicit(layout, f, noise, pinned)) == pytest.approx(term, rel=1e-12)


def test_all_z_checks_factorise_per_site():
    from brickqec.core.codes import StabilizerCode
    from brickqec.core.noise import NoiseModel
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import coset_probability

    n = 5
    checks = tuple(PauliString.single(n, i, "Z") for i in range(n))
    code = StabilizerCode(n, 0, checks, (), (), ())
    noise = NoiseModel(*BIASED)
    expected = (BIASED[0] + BIASED[3]) ** n
    assert math.exp(coset_probability(code, PauliString.identity(n), noise)) == pytest.approx(expected)


def test_layout_width_is_bounded_by_light_cone(make_code):
    from brickqec.core.tn_decoder import build_layout

    for seed in range(5):
        code, _ = make_code(15, "1/5", 3, seed=seed)
        assert build_layout(code.checks, code.n_phys).n_columns <= 2 * 3 + 1


def test_row_sweep_goes_through_check_tensors(monkeypatch, random_small_code):
    from brickqec.core import tn_decoder
    from brickqec.core.noise import depolarizing
    from brickqec.core.pauli import PauliString

    code = random_small_code(5, 1, 2, 3)
    f = PauliString.identity(code.n_phys)
    assert tn_decoder.coset_probability(code, f, depolarizing(0.1)) > -math.inf
    monkeypatch.setattr(tn_decoder, "check_tensor", lambda kind: np.zeros((2,) * 6))
    assert tn_decoder.coset_probability(code, f, depolarizing(0.1)) == -math.inf


def test_explicit_network_beyond_a_single_einsum(make_code):
    from brickqec.core.noise import NoiseModel
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout, coset_probability, contract_explicit, contract_tanner_chain

    # 28 rows and 24 checks: more operands than one numpy einsum call takes
    code, _ = make_code(20, "1/5", 3, seed=2)
    assert code.n_phys + code.n_checks > 32
    noise = NoiseModel(*BIASED)
    layout = build_layout(code.checks, code.n_phys)
    assert layout.width <= 2 * 3 + 1
    f = PauliString.from_indices(np.random.default_rng(2).integers(0, 4, code.n_phys))
    grid = coset_probability(code, f, noise)
    assert contract_explicit(layout, f, noise) == pytest.approx(grid, rel=1e-9)
    assert contract_tanner_chain(code, f, noise) == pytest.approx(grid, rel=1e-9)


def test_explicit_width_cap(random_small_code):
    from brickqec.core.noise import depolarizing
    from brickqec.core.pauli import PauliString
    from brickqec.core.tn_decoder import build_layout, contract_explicit
    from brickqec.errors import ResourceLimitError

    code = random_small_code(5, 1, 2, 1)
    layout = build_layout(code.checks, code.n_phys)
    with pytest.raises(ResourceLimitError):
        contract_explicit(layout, PauliString.identity(code.n_phys), depolarizing(0.1), max_width=0)
