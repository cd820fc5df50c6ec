"""
brickqec.core.oracle - exhaustive reference values for desk-scale codes.

Nothing here approximates: every cap is a hard ResourceLimitError.
"""

from __future__ import annotations

from itertools import product
from typing import Optional, Sequence

import numpy as np

from brickqec.core.codes import StabilizerCode
from brickqec.core.noise import Syndrome, pure_error, site_table
from brickqec.core.pauli import PauliString, stack
from brickqec.errors import DimensionError, ResourceLimitError
from brickqec.utils.libw import verbo

MAX_TOTAL_QUBITS = 10
_BLOCK_BITS = 12


def _cfg():
    from brickqec.core.config import get_config
    return get_config()


def _generator_indices(code: StabilizerCode, extra: Sequence[PauliString]) -> np.ndarray:
    gens = list(code.checks) + list(extra)
    if not gens:
        return np.zeros((0, code.n_phys), np.uint8)
    xs, zs = stack(gens, code.n_phys)
    return (xs | (zs << 1)).astype(np.uint8)


def _check_cap(m: int, cap: Optional[int]) -> None:
    cap = _cfg().brute_max_checks if cap is None else cap
    if m > cap:
        raise ResourceLimitError(f"coset enumeration over 2^{m} terms exceeds the cap of 2^{cap}")


def brute_coset_probability(code: StabilizerCode, f_L: PauliString, noise,
                            extra_generators: Sequence[PauliString] = (),
                            cap: Optional[int] = None) -> float:
    """Sum of p(f_L e) over every subset product e of the generators."""
    if f_L.n != code.n_phys:
        raise DimensionError(f"f_L acts on {f_L.n} qubits, code has {code.n_phys}")
    gens = _generator_indices(code, extra_generators)
    m, n = gens.shape
    _check_cap(m, cap)
    probs = site_table(noise, n)
    sites = np.arange(n)
    f_idx = f_L.indices

    # split generators into a low block enumerated as a table and a high part looped over
    lo = min(m, _BLOCK_BITS)
    sig = ((np.arange(2 ** lo)[:, None] >> np.arange(lo)) & 1).astype(np.uint8)
    low_table = np.zeros((2 ** lo, n), dtype=np.uint8)
    for b in range(lo):
        low_table ^= sig[:, b:b + 1] * gens[b]
    total = 0.0
    for hi in range(2 ** (m - lo)):
        shift = f_idx.copy()
        for b in range(m - lo):
            if (hi >> b) & 1:
                shift ^= gens[lo + b]
        terms = probs[sites, low_table ^ shift].prod(axis=1)
        total += float(terms.sum())
    return total


def gray_coset_probability(code: StabilizerCode, f_L: PauliString, noise,
                           extra_generators: Sequence[PauliString] = (),
                           cap: Optional[int] = None) -> float:
    """Same sum visited in Gray-code order, one generator flip per term."""
    if f_L.n != code.n_phys:
        raise DimensionError(f"f_L acts on {f_L.n} qubits, code has {code.n_phys}")
    gens = _generator_indices(code, extra_generators)
    m, n = gens.shape
    _check_cap(m, cap)
    probs = site_table(noise, n)
    sites = np.arange(n)
    cur = f_L.indices.copy()
    total = float(probs[sites, cur].prod())
    for t in range(1, 2 ** m):
        flip = (t & -t).bit_length() - 1
        cur ^= gens[flip]
        total += float(probs[sites, cur].prod())
    return total


def logical_representative(code: StabilizerCode, f: PauliString, classes: Sequence[int]) -> PauliString:
    out = f
    for j, c in enumerate(classes):
        if c & 1:
            out = out * code.logical_x[j]
        if c & 2:
            out = out * code.logical_z[j]
    return out


def brute_ml_decode(code: StabilizerCode, s: Syndrome, noise) -> tuple[tuple[int, ...], np.ndarray]:
    """Global ML class assignment and the full (4,)*k table of coset probabilities.

    Axis j of the table is the class of logical qubit j in I, X, Z, Y order.
    """
    cfg = _cfg()
    if code.k > cfg.brute_ml_max_logicals:
        raise ResourceLimitError(f"k={code.k} exceeds the global ML cap of {cfg.brute_ml_max_logicals}")
    if code.n_checks > cfg.brute_ml_max_checks:
        raise ResourceLimitError(
            f"{code.n_checks} checks exceed the global ML cap of {cfg.brute_ml_max_checks}")
    f = pure_error(code, s)
    table = np.zeros((4,) * code.k, dtype=np.float64)
    for classes in product(range(4), repeat=code.k):
        rep = logical_representative(code, f, classes)
        table[classes] = brute_coset_probability(code, rep, noise, cap=cfg.brute_ml_max_checks)
    best = tuple(int(i) for i in np.unravel_index(int(np.argmax(table)), table.shape))
    verbo(f"[oracle] global ML over {4 ** code.k} classes -> {best}")
    return best, table


def marginalize(table: np.ndarray, j: int) -> np.ndarray:
    """Sum a global class table over every logical qubit except j."""
    axes = tuple(a for a in range(table.ndim) if a != j)
    return table.sum(axis=axes) if axes else np.asarray(table, dtype=np.float64)


def brute_total_probability(code: StabilizerCode, s: Syndrome, noise) -> float:
    """Probability of observing syndrome *s*, summed over all 4^n Pauli errors."""
    n = code.n_phys
    if n > MAX_TOTAL_QUBITS:
        raise ResourceLimitError(f"full error enumeration is limited to {MAX_TOTAL_QUBITS} qubits, got {n}")
    bits = s.bits if isinstance(s, Syndrome) else np.asarray(s, dtype=np.uint8)
    if bits.size != code.n_checks:
        raise DimensionError(f"syndrome has {bits.size} bits, code has {code.n_checks} checks")
    probs = site_table(noise, n)
    idx = ((np.arange(4 ** n)[:, None] >> (2 * np.arange(n))) & 3).astype(np.uint8)
    ex, ez = (idx & 1).astype(np.int64), (idx >> 1).astype(np.int64)
    cx, cz = (a.astype(np.int64) for a in code.check_bits)
    synd = (ex @ cz.T + ez @ cx.T) & 1
    match = np.all(synd == bits[None, :].astype(np.int64), axis=1)
    return float(probs[np.arange(n), idx[match]].prod(axis=1).sum())
