"""
brickqec.core.noise - IID Pauli noise, syndromes, pure errors, hashing bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from brickqec.core.codes import StabilizerCode
from brickqec.core.pauli import PauliString
from brickqec.errors import DimensionError, NoiseModelError

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class NoiseModel:
    p_I: float
    p_X: float
    p_Y: float
    p_Z: float

    def __post_init__(self):
        probs = (self.p_I, self.p_X, self.p_Y, self.p_Z)
        if any(not (0.0 <= float(p) <= 1.0) for p in probs):
            raise NoiseModelError(f"probabilities must lie in [0, 1], got {probs}")
        if abs(sum(probs) - 1.0) > _SUM_TOL:
            raise NoiseModelError(f"probabilities must sum to 1, got {sum(probs)!r}")

    @classmethod
    def from_string(cls, text: str) -> "NoiseModel":
        """``"px,py,pz"`` -> biased IID channel with p_I = 1 - px - py - pz."""
        try:
            px, py, pz = (float(t) for t in text.split(","))
        except ValueError as e:
            raise NoiseModelError(f"expected 'px,py,pz', got {text!r}") from e
        return cls(1.0 - px - py - pz, px, py, pz)

    @property
    def p(self) -> float:
        """Total error probability 1 - p_I."""
        return 1.0 - self.p_I

    def probabilities(self) -> np.ndarray:
        """Per-site probabilities indexed I, X, Z, Y (Pauli index order)."""
        return np.array([self.p_I, self.p_X, self.p_Z, self.p_Y], dtype=np.float64)

    def site_probabilities(self, n: int) -> np.ndarray:
        return np.broadcast_to(self.probabilities(), (n, 4))


def depolarizing(p: float) -> NoiseModel:
    if not 0.0 <= p <= 1.0:
        raise NoiseModelError(f"depolarizing p must lie in [0, 1], got {p}")
    q = p / 3.0
    return NoiseModel(1.0 - p, q, q, q)


def sample_error(noise: NoiseModel, n: int, rng: np.random.Generator) -> PauliString:
    idx = rng.choice(4, size=n, p=noise.probabilities())
    return PauliString.from_indices(idx.astype(np.uint8))


@dataclass(frozen=True)
class Syndrome:
    bits: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.bits, dtype=np.uint8) & 1)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Syndrome):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def to_text(self) -> str:
        return "".join(str(int(b)) for b in self.bits)

    @classmethod
    def from_text(cls, text: str) -> "Syndrome":
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError(f"syndrome text must be a 0/1 string, got {text!r}")
        return cls(np.fromiter((int(c) for c in text), dtype=np.uint8, count=len(text)))


def _symplectic_against(xs: np.ndarray, zs: np.ndarray, e: PauliString) -> np.ndarray:
    xs = xs.astype(np.int64)
    zs = zs.astype(np.int64)
    return ((xs @ e.z.astype(np.int64) + zs @ e.x.astype(np.int64)) & 1).astype(np.uint8)


def syndrome(code: StabilizerCode, e: PauliString) -> Syndrome:
    if e.n != code.n_phys:
        raise DimensionError(f"error acts on {e.n} qubits, code has {code.n_phys}")
    return Syndrome(_symplectic_against(*code.check_bits, e))


def pure_error(code: StabilizerCode, s: Syndrome) -> PauliString:
    """Canonical f with syndrome(code, f) == s (free GF(2) variables set to 0)."""
    bits = s.bits if isinstance(s, Syndrome) else np.asarray(s, dtype=np.uint8)
    if bits.size != code.n_checks:
        raise DimensionError(f"syndrome has {bits.size} bits, code has {code.n_checks} checks")
    return PauliString.from_bits(code.pure_error_solver.solve(bits))


def logical_failures(code: StabilizerCode, residual: PauliString) -> np.ndarray:
    """Bit j is set iff *residual* acts non-trivially on logical qubit j.

    *residual* is the product of the physical error and the correction; it
    must commute with every check.
    """
    if residual.n != code.n_phys:
        raise DimensionError(f"residual acts on {residual.n} qubits, code has {code.n_phys}")
    lxx, lxz, lzx, lzz = code.logical_bits
    fx = _symplectic_against(lxx, lxz, residual)
    fz = _symplectic_against(lzx, lzz, residual)
    return (fx | fz).astype(bool)


def logical_class(code: StabilizerCode, residual: PauliString) -> np.ndarray:
    """Per-logical class index (I=0, X=1, Z=2, Y=3) of a check-commuting operator."""
    lxx, lxz, lzx, lzz = code.logical_bits
    # anticommuting with LZ means an X component
    x_part = _symplectic_against(lzx, lzz, residual)
    z_part = _symplectic_against(lxx, lxz, residual)
    return (x_part | (z_part << 1)).astype(np.uint8)


# --------------------------------------------------------------------------- #
# Hashing bound
# --------------------------------------------------------------------------- #
def shannon_entropy(probs) -> float:
    """Base-2 entropy with 0 log 0 = 0."""
    p = np.asarray(probs, dtype=np.float64)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def hashing_rate(noise: NoiseModel) -> float:
    return 1.0 - shannon_entropy(noise.probabilities())


def hashing_threshold(r: float, tol: float = 1e-8) -> float:
    """Depolarizing p at which the hashing rate equals *r* (bisection on [0, 3/4])."""
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"rate must lie in (0, 1), got {r}")

    def gap(p: float) -> float:
        return hashing_rate(depolarizing(p)) - r

    lo, hi = 0.0, 0.75
    if gap(lo) < 0 or gap(hi) > 0:
        raise ValueError(f"no depolarizing probability in [0, 3/4] reaches rate {r}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def site_table(noise, n: int) -> np.ndarray:
    """(n, 4) per-site probabilities from a NoiseModel or an explicit table."""
    if isinstance(noise, NoiseModel):
        return np.ascontiguousarray(noise.site_probabilities(n), dtype=np.float64)
    probs = np.asarray(noise, dtype=np.float64)
    if probs.shape != (n, 4):
        raise DimensionError(f"per-site probabilities must have shape ({n}, 4), got {probs.shape}")
    return probs
