"""
brickqec.core.fitting - critical-exponent threshold fit and simple regressions.

Near threshold the bulk failure rate is modelled as a quadratic in the
rescaled variable

    x = (p - p_c) * d ** (-1 / nu)
    p_L' = A + B x + C x^2

The fit first scans a coarse (p_c, nu) grid with (A, B, C) solved by linear
least squares at every node, then polishes all five parameters with
``scipy.optimize.curve_fit``.  Error bars come from a bootstrap over data
points.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from brickqec.errors import FitError
from brickqec.utils.libw import verbo, vwarn
from brickqec.utils.seeding import STREAM_FIT, rng_for


@dataclass(frozen=True)
class ThresholdFit:
    p_c: float
    nu: float
    A: float
    B: float
    C: float
    p_c_err: float = float("nan")
    nu_err: float = float("nan")
    A_err: float = float("nan")
    B_err: float = float("nan")
    C_err: float = float("nan")
    residual: float = 0.0
    n_points: int = 0
    bootstrap_resamples: int = 0
    error_method: str = "bootstrap"

    def to_json(self) -> dict:
        return {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in asdict(self).items()}


def scaling_variable(p, d, p_c: float, nu: float) -> np.ndarray:
    return (np.asarray(p, dtype=np.float64) - p_c) * np.asarray(d, dtype=np.float64) ** (-1.0 / nu)


def scaling_model(pd: np.ndarray, p_c: float, nu: float, A: float, B: float, C: float) -> np.ndarray:
    p, d = pd
    x = scaling_variable(p, d, p_c, nu)
    return A + B * x + C * x * x


def _quadratic_lstsq(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    design = np.stack([np.ones_like(x), x, x * x], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(resid @ resid)


def _grid(spec) -> np.ndarray:
    lo, hi, num = spec
    return np.linspace(float(lo), float(hi), int(num))


def _check_design(p: np.ndarray, d: np.ndarray) -> None:
    depths = np.unique(d)
    if depths.size < 2:
        raise FitError(f"need at least 2 distinct depths, got {depths.size}")
    for dv in depths:
        if np.unique(p[d == dv]).size < 3:
            raise FitError(f"depth {int(dv)} has fewer than 3 distinct p values")


def _fit_once(p: np.ndarray, d: np.ndarray, y: np.ndarray, pc_grid: np.ndarray,
              nu_grid: np.ndarray, start: Optional[Sequence[float]] = None) -> tuple[np.ndarray, float]:
    if start is None:
        best = (math.inf, None)
        for pc in pc_grid:
            for nu in nu_grid:
                coef, sse = _quadratic_lstsq(scaling_variable(p, d, pc, nu), y)
                if sse < best[0]:
                    best = (sse, (pc, nu, *coef))
        if best[1] is None:
            raise FitError("no finite residual on the starting grid")
        start = best[1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OptimizeWarning)
        try:
            popt, _ = curve_fit(
                scaling_model, np.stack([p, d]), y, p0=list(start),
                bounds=([1e-9, 1e-3, -np.inf, -np.inf, -np.inf], [0.75, 50.0, np.inf, np.inf, np.inf]),
                maxfev=20000,
            )
        except (RuntimeError, ValueError) as e:
            raise FitError(f"threshold fit did not converge: {e}") from e
    resid = y - scaling_model(np.stack([p, d]), *popt)
    return popt, float(resid @ resid)


def threshold_fit(points, resamples: Optional[int] = None, seed: int = 0,
                  pc_grid=None, nu_grid=None) -> ThresholdFit:
    """Fit (p_c, nu, A, B, C) to sweep points (objects or dicts with p, d, p_L_prime)."""
    from brickqec.core.config import get_config
    cfg = get_config()
    resamples = cfg.bootstrap_resamples if resamples is None else int(resamples)
    pc_grid = _grid(pc_grid or cfg.fit_pc_grid)
    nu_grid = _grid(nu_grid or cfg.fit_nu_grid)

    rows = [_point_tuple(pt) for pt in points]
    if not rows:
        raise FitError("no data points to fit")
    p, d, y = (np.array(col, dtype=np.float64) for col in zip(*rows))
    _check_design(p, d)

    popt, sse = _fit_once(p, d, y, pc_grid, nu_grid)
    verbo(f"[fit] p_c={popt[0]:.5f} nu={popt[1]:.4f} residual={sse:.3e} over {p.size} points")

    errs = np.full(5, np.nan)
    done = 0
    if resamples > 0:
        rng = rng_for(seed, STREAM_FIT)
        samples = []
        for _ in range(resamples):
            pick = rng.integers(0, p.size, p.size)
            try:
                _check_design(p[pick], d[pick])
                bp, _ = _fit_once(p[pick], d[pick], y[pick], pc_grid, nu_grid, start=popt)
            except FitError:
                continue
            samples.append(bp)
        done = len(samples)
        if done >= 2:
            errs = np.std(np.array(samples), axis=0, ddof=1)
        if done < resamples:
            vwarn(f"[fit] {resamples - done} of {resamples} bootstrap resamples were degenerate and skipped")

    return ThresholdFit(*(float(v) for v in popt), *(float(e) for e in errs),
                        residual=sse, n_points=int(p.size), bootstrap_resamples=done)


def _point_tuple(pt) -> tuple[float, float, float]:
    if isinstance(pt, dict):
        return float(pt["p"]), float(pt["d"]), float(pt["p_L_prime"])
    return float(pt.p), float(pt.d), float(pt.p_L_prime)


# --------------------------------------------------------------------------- #
# Crossings and decay
# --------------------------------------------------------------------------- #
def crossing_points(points) -> list[tuple[int, int, float]]:
    """(d1, d2, p) for every sign change of p_L'(d1) - p_L'(d2) between adjacent p values.

    Curves are linearly interpolated on the p values both depths share.
    """
    curves: dict[int, dict[float, float]] = {}
    for pt in points:
        p, d, y = _point_tuple(pt)
        curves.setdefault(int(d), {})[p] = y
    out = []
    depths = sorted(curves)
    for i, d1 in enumerate(depths):
        for d2 in depths[i + 1:]:
            shared = sorted(set(curves[d1]) & set(curves[d2]))
            diff = [curves[d1][p] - curves[d2][p] for p in shared]
            for a in range(len(shared) - 1):
                lo, hi = diff[a], diff[a + 1]
                if lo == 0.0:
                    out.append((d1, d2, shared[a]))
                elif lo * hi < 0:
                    t = lo / (lo - hi)
                    out.append((d1, d2, shared[a] + t * (shared[a + 1] - shared[a])))
            if diff and diff[-1] == 0.0:
                out.append((d1, d2, shared[-1]))
    return out


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    depths: tuple
    excluded: tuple = ()

    def to_json(self) -> dict:
        return asdict(self)


def decay_fit(depths: Sequence[int], rates: Sequence[float]) -> DecayFit:
    """Least-squares line through (d, ln p_L'); zero rates are excluded and reported."""
    d = np.asarray(depths, dtype=np.float64)
    y = np.asarray(rates, dtype=np.float64)
    keep = y > 0
    excluded = tuple(int(v) for v in d[~keep])
    if excluded:
        vwarn(f"[fit] no failures observed at d={list(excluded)}; excluded from the decay fit")
    d, ly = d[keep], np.log(y[keep])
    if np.unique(d).size < 2:
        raise FitError("decay fit needs at least two depths with non-zero failure rates")
    slope, intercept = np.polyfit(d, ly, 1)
    pred = slope * d + intercept
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(slope), float(intercept), r2, tuple(int(v) for v in d), excluded)
