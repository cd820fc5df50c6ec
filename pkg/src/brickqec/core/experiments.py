"""
brickqec.core.experiments - Monte Carlo studies over random brickwork codes.

One trial samples a code (fresh per trial unless the fixed-code mode is
asked for), a physical error, decodes the syndrome and records which logical
qubits failed.  Every trial draws from its own seeded streams, so results
depend only on (seed, parameters, trial index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from brickqec.core.codes import CodeParams, StabilizerCode, as_rate, minimum_depth, sample_code
from brickqec.core.fitting import DecayFit, decay_fit
from brickqec.core.noise import NoiseModel, depolarizing, logical_failures, sample_error, syndrome
from brickqec.core.pauli import PauliString
from brickqec.core.tn_decoder import Decoder
from brickqec.errors import FitError, ResourceLimitError
from brickqec.utils.libw import verbo, vwarn
from brickqec.utils.seeding import STREAM_CODE, STREAM_NOISE, point_key, rng_for
from brickqec.utils.trials import run_tasks

RESAMPLE_MODES = ("fresh", "fixed")


def _cfg():
    from brickqec.core.config import get_config
    return get_config()


# --------------------------------------------------------------------------- #
# 1.  Single trials
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class TrialOutcome:
    trial: int
    failures: np.ndarray          # (k,) bool
    valid: bool = True
    max_width: int = 0

    @property
    def any_failure(self) -> bool:
        return bool(self.failures.any())


def run_trial(code: StabilizerCode, noise: NoiseModel, rng: np.random.Generator, *,
              decoder: Optional[Decoder] = None, trial: int = 0, backend: str = "grid",
              max_width: Optional[int] = None, error: Optional[PauliString] = None) -> TrialOutcome:
    """Sample an error (or use *error*), decode its syndrome and flag the logical qubits that failed."""
    decoder = decoder or Decoder(code, noise, backend, max_width=max_width)
    e = sample_error(noise, code.n_phys, rng) if error is None else error
    result = decoder.decode(syndrome(code, e))
    failed = logical_failures(code, result.correction * e)
    return TrialOutcome(trial, failed, True, result.max_width)


@dataclass(frozen=True)
class TrialTask:
    params: CodeParams
    noise: NoiseModel
    trial: int
    seed: int
    point: int
    backend: str = "grid"
    max_width: Optional[int] = None
    code: Optional[StabilizerCode] = None


def execute_task(task: TrialTask) -> TrialOutcome:
    """Worker entry point; resource errors mark the trial invalid."""
    code = task.code
    if code is None:
        code, _ = sample_code(task.params, rng_for(task.seed, STREAM_CODE, task.point, task.trial))
    rng = rng_for(task.seed, STREAM_NOISE, task.point, task.trial)
    try:
        return run_trial(code, task.noise, rng, trial=task.trial, backend=task.backend,
                         max_width=task.max_width)
    except ResourceLimitError as e:
        verbo(f"[trials] trial {task.trial} excluded: {e}")
        return TrialOutcome(task.trial, np.zeros(code.k, dtype=bool), valid=False)


# --------------------------------------------------------------------------- #
# 2.  Failure profiles and bulk rates
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class FailureProfile:
    params: CodeParams
    p: float
    positions: tuple
    n_phys: int
    failures: np.ndarray          # (valid trials, k) bool
    invalid: int = 0
    resample_code: str = "fresh"

    @property
    def trials(self) -> int:
        return int(self.failures.shape[0])

    @property
    def counts(self) -> np.ndarray:
        return self.failures.sum(axis=0).astype(np.int64)

    @property
    def rates(self) -> np.ndarray:
        if self.trials == 0:
            return np.zeros(self.failures.shape[1])
        return self.counts / self.trials

    @property
    def index_fraction(self) -> np.ndarray:
        k = self.failures.shape[1]
        return np.arange(k) / k

    @property
    def any_failures(self) -> int:
        return int(self.failures.any(axis=1).sum())

    @property
    def p_L(self) -> float:
        return self.any_failures / self.trials if self.trials else 0.0

    def rows(self) -> list[dict]:
        return [{"index": j, "x": float(x), "position": int(pos), "failures": int(c), "trials": self.trials,
                 "rate": float(rt), "stderr": binomial_stderr(float(rt), self.trials)}
                for j, (x, pos, c, rt) in enumerate(zip(self.index_fraction, self.positions,
                                                        self.counts, self.rates))]


def binomial_stderr(rate: float, trials: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / trials) if trials > 0 else float("nan")


def _noise(p: Union[float, NoiseModel]) -> NoiseModel:
    return p if isinstance(p, NoiseModel) else depolarizing(float(p))


def failure_profile(params: CodeParams, p: Union[float, NoiseModel], trials: int, seed: int, *,
                    resample_code: str = "fresh", workers: Optional[int] = None, backend: str = "grid",
                    max_width: Optional[int] = None, progress: Optional[bool] = None) -> FailureProfile:
    """Per-logical failure rates averaged over noise (and codes, unless fixed)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if resample_code not in RESAMPLE_MODES:
        raise ValueError(f"resample_code must be one of {RESAMPLE_MODES}, got {resample_code!r}")
    noise = _noise(p)
    point = point_key(params.variant, str(params.r), params.d, params.n, noise.p_X, noise.p_Y, noise.p_Z,
                      resample_code)
    fixed = None
    if resample_code == "fixed":
        fixed, _ = sample_code(params, rng_for(seed, STREAM_CODE, point))
    tasks = [TrialTask(params, noise, t, seed, point, backend, max_width, fixed) for t in range(trials)]
    outcomes = run_tasks(execute_task, tasks, workers, desc=f"d={params.d} p={noise.p:.4f}", progress=progress)

    valid = [o.failures for o in outcomes if o.valid]
    invalid = len(outcomes) - len(valid)
    if invalid:
        vwarn(f"[sweep] {invalid} of {trials} trials exceeded resource caps and were excluded")
    mat = np.array(valid, dtype=bool).reshape(len(valid), params.k)
    p_value = noise.p if isinstance(p, NoiseModel) else float(p)
    return FailureProfile(params, p_value, params.padded_positions(), params.n_phys, mat, invalid, resample_code)


@dataclass(frozen=True)
class BulkRate:
    p_L_prime: float
    stderr: float
    failures: int
    bulk_qubits: int
    trials: int


def bulk_mask(positions: Sequence[int], n_phys: int, d: int, margin_factor: Optional[int] = None) -> np.ndarray:
    """Logical qubits at least margin_factor * d sites from both ends."""
    factor = _cfg().bulk_margin_factor if margin_factor is None else margin_factor
    pos = np.asarray(positions, dtype=np.int64)
    margin = factor * d
    return (pos >= margin) & (n_phys - 1 - pos >= margin)


def bulk_rate(profile: FailureProfile, margin_factor: Optional[int] = None) -> BulkRate:
    """Pooled failure rate of bulk logical qubits with a binomial error bar."""
    mask = bulk_mask(profile.positions, profile.n_phys, profile.params.d, margin_factor)
    nb = int(mask.sum())
    if nb == 0:
        raise FitError(f"no logical qubit lies in the bulk (n={profile.params.n}, d={profile.params.d})")
    if profile.trials == 0:
        raise FitError("no valid trials")
    fails = int(profile.counts[mask].sum())
    total = nb * profile.trials
    rate = fails / total
    return BulkRate(rate, binomial_stderr(rate, total), fails, nb, profile.trials)


# --------------------------------------------------------------------------- #
# 3.  Sweep points and sweeps
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class SweepPoint:
    r: Fraction
    d: int
    n: int
    n_phys: int
    p: float
    trials: int
    failures_bulk: int
    bulk_qubits: int
    p_L_prime: float
    stderr: float
    p_L: float
    variant: str
    seed: int
    profile: np.ndarray = field(default_factory=lambda: np.zeros(0))
    invalid: int = 0
    resample_code: str = "fresh"

    def row(self) -> dict:
        return {
            "r": f"{self.r.numerator}/{self.r.denominator}", "d": self.d, "n": self.n, "n_phys": self.n_phys,
            "p": float(self.p), "trials": self.trials, "failures_bulk": self.failures_bulk,
            "bulk_qubits": self.bulk_qubits, "p_L_prime": float(self.p_L_prime), "stderr": float(self.stderr),
            "p_L": float(self.p_L), "variant": self.variant, "seed": self.seed,
        }


def default_size(r, d: int, bulk_logicals: int = 8, margin_factor: Optional[int] = None) -> int:
    """Smallest n (a multiple of 1/r) leaving about *bulk_logicals* logicals in the bulk."""
    m = as_rate(r).denominator
    factor = _cfg().bulk_margin_factor if margin_factor is None else margin_factor
    # bulk needs (factor - 2) d extra sites on each side beyond the 2d padding margin
    edge = max(0, factor - 2) * d
    return m * (math.ceil(2 * edge / m) + bulk_logicals + 1)


def run_point(params: CodeParams, p: float, trials: int, seed: int, **kw) -> SweepPoint:
    prof = failure_profile(params, p, trials, seed, **kw)
    bulk = bulk_rate(prof)
    verbo(f"[sweep] r={params.r} d={params.d} p={prof.p:.5f}: p_L'={bulk.p_L_prime:.5f} "
          f"+/- {bulk.stderr:.5f}, p_L={prof.p_L:.5f}")
    return SweepPoint(params.r, params.d, params.n, params.n_phys, prof.p, prof.trials, bulk.failures,
                      bulk.bulk_qubits, bulk.p_L_prime, bulk.stderr, prof.p_L, params.variant, seed,
                      prof.rates, prof.invalid, prof.resample_code)


def sweep(r, depths: Sequence[int], ps: Sequence[float], trials: int, seed: int, *,
          n: Optional[int] = None, variant: str = "standard", **kw) -> list[SweepPoint]:
    """Sweep points on the (d, p) grid; one n shared by every depth."""
    r = as_rate(r)
    n = default_size(r, max(depths)) if n is None else n
    out = []
    for d in depths:
        params = CodeParams(n, r, d, variant, seed)
        for p in ps:
            out.append(run_point(params, p, trials, seed, **kw))
    return out


def compare_variants(r, d: int, p: float, trials: int, seed: int, *, n: Optional[int] = None,
                     **kw) -> dict[str, SweepPoint]:
    r = as_rate(r)
    n = default_size(r, d) if n is None else n
    return {v: run_point(CodeParams(n, r, d, v, seed), p, trials, seed, **kw) for v in ("standard", "greedy")}


# --------------------------------------------------------------------------- #
# 4.  Correlations
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class CorrelationPoint:
    separation: int               # in logical-index units
    distance: float               # mean pre-encoding physical distance
    x: float                      # separation / (r d)
    value: float                  # P(2 fails | 1 fails) - P(2 fails)
    sigma: float
    events: int
    low_stats: bool


def correlation_curve(failures: np.ndarray, positions: Sequence[int], r, d: int,
                      min_events: Optional[int] = None) -> list[CorrelationPoint]:
    """Conditional-minus-marginal failure probability against separation.

    For every separation s the value is averaged over all ordered qubit
    pairs (q1, q2) with |q2 - q1| = s and at least one failure of q1.
    """
    min_events = _cfg().correlation_min_events if min_events is None else min_events
    f = np.asarray(failures, dtype=bool)
    trials, k = f.shape
    r = float(as_rate(r))
    pos = np.asarray(positions, dtype=np.float64)
    marg = f.mean(axis=0) if trials else np.zeros(k)
    out = []
    for s in range(1, k):
        vals, sds, dists = [], [], []
        events = 0
        for q1 in range(k):
            for q2 in (q1 - s, q1 + s):
                if not 0 <= q2 < k:
                    continue
                dists.append(abs(pos[q2] - pos[q1]))
                n1 = int(f[:, q1].sum())
                if n1 == 0:
                    continue
                events += n1
                cond = float((f[:, q1] & f[:, q2]).sum()) / n1
                p2 = float(marg[q2])
                vals.append(cond - p2)
                sds.append(math.sqrt(cond * (1 - cond) / n1 + p2 * (1 - p2) / trials))
        value = float(np.mean(vals)) if vals else float("nan")
        sigma = float(np.mean(sds)) if sds else float("nan")
        out.append(CorrelationPoint(s, float(np.mean(dists)), s / (r * d), value, sigma, events,
                                    events < min_events))
    return out


def correlations(params: CodeParams, p: float, trials: int, seed: int, **kw) -> list[CorrelationPoint]:
    if params.k < 2:
        raise ValueError("correlations need at least two logical qubits")
    prof = failure_profile(params, p, trials, seed, **kw)
    curve = correlation_curve(prof.failures, prof.positions, params.r, params.d)
    low = [c.separation for c in curve if c.low_stats]
    if low:
        vwarn(f"[sweep] low statistics at separations {low}")
    return curve


# --------------------------------------------------------------------------- #
# 5.  Alpha scaling and decay with depth
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class AlphaPoint:
    alpha: float
    n: int
    k: int
    d: int
    n_phys: int
    p_L: float
    stderr: float
    trials: int


def alpha_depth(r, n: int, alpha: float) -> int:
    """round(log2(r n) / alpha), raised to the smallest depth the padding allows."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    r = as_rate(r)
    k = int(r * n)
    return max(minimum_depth(r), int(round(math.log2(k) / alpha)) if k > 1 else 1)


def alpha_scaling(r, p: float, alphas: Sequence[float], ns: Sequence[int], trials: int, seed: int, *,
                  variant: str = "standard", **kw) -> list[AlphaPoint]:
    r = as_rate(r)
    out = []
    for alpha in alphas:
        for n in ns:
            params = CodeParams(n, r, alpha_depth(r, n, alpha), variant, seed)
            prof = failure_profile(params, p, trials, seed, **kw)
            out.append(AlphaPoint(float(alpha), n, params.k, params.d, params.n_phys, prof.p_L,
                                  binomial_stderr(prof.p_L, prof.trials), prof.trials))
    return out


def decay(r, p: float, depths: Sequence[int], trials: int, seed: int, *, n: Optional[int] = None,
          variant: str = "standard", **kw) -> tuple[list[SweepPoint], DecayFit]:
    """Bulk rate at each depth and the straight-line fit of ln p_L' against d."""
    if len(depths) < 3:
        raise ValueError("decay fit needs at least 3 depths")
    points = sweep(r, depths, [p], trials, seed, n=n, variant=variant, **kw)
    return points, decay_fit([pt.d for pt in points], [pt.p_L_prime for pt in points])
