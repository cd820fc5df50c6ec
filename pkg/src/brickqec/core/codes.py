"""
brickqec.core.codes - stabilizer codes from low-depth 1D brickwork circuits.

Pipeline for one random code:

    build_initial_code -> pad_boundary -> sample_circuit_{standard,greedy} -> encode

The initial code has k logical qubits evenly spaced on the chain and one
random single-site check on every other site.  Padding adds
``4d - 1/r + 1`` check-only sites so that every logical site sits at least 2d
sites from both ends before the circuit is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from brickqec.core import gf2
from brickqec.core.pauli import (
    CliffordCircuit,
    PauliString,
    SingleQubitLayer,
    TwoQubitLayer,
    apply_layer,
    commutation_matrix,
    iswap_table,
    single_action_table,
    stack,
    unstack,
)
from brickqec.errors import CodeParamsError, DimensionError
from brickqec.utils.libw import verbo

VARIANTS = ("standard", "greedy")
STANDARD_ALPHABET = "XYZ"
GREEDY_ALPHABET = "XY"


# --------------------------------------------------------------------------- #
# 1.  Types
# --------------------------------------------------------------------------- #
def as_rate(r: Union[str, float, Fraction]) -> Fraction:
    """Parse ``0.2``, ``"1/5"`` or a Fraction; rejects rates without integral 1/r."""
    try:
        if isinstance(r, Fraction):
            rate = r
        elif isinstance(r, float):
            # 1/3 as a float is not exactly a third
            rate = Fraction(r).limit_denominator(10_000)
        else:
            rate = Fraction(str(r))
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise CodeParamsError(f"cannot parse rate {r!r}") from e
    if not 0 < rate < 1:
        raise CodeParamsError(f"rate must lie in (0, 1), got {rate}")
    if rate.numerator != 1:
        raise CodeParamsError(f"1/r must be an integer, got r={rate}")
    return rate


@dataclass(frozen=True)
class CodeParams:
    n: int
    r: Fraction
    d: int
    variant: str = "standard"
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "r", as_rate(self.r))
        if self.variant not in VARIANTS:
            raise CodeParamsError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.d < 1:
            raise CodeParamsError(f"depth must be >= 1, got {self.d}")
        k = self.r * self.n
        if k.denominator != 1 or k < 1:
            raise CodeParamsError(f"k = r*n must be a positive integer (n={self.n}, r={self.r})")
        padding = padding_split(self.n, int(k), self.d, self.r)
        if min(padding) < 0:
            raise CodeParamsError(
                f"depth {self.d} too small for r={self.r}: need d >= {minimum_depth(self.r)}")

    @property
    def k(self) -> int:
        return int(self.r * self.n)

    @property
    def inv_rate(self) -> int:
        return self.r.denominator

    @property
    def n_phys(self) -> int:
        return self.n + 4 * self.d - self.inv_rate + 1

    def padded_positions(self) -> tuple[int, ...]:
        """Logical sites after boundary padding; the same for every sampled code."""
        left, _ = padding_split(self.n, self.k, self.d, self.r)
        return tuple(p + left for p in logical_sites(self.n, self.k))


@dataclass(frozen=True)
class StabilizerCode:
    n_phys: int
    k: int
    checks: tuple
    logical_x: tuple
    logical_z: tuple
    logical_positions: tuple
    d: int = 0
    r: Fraction = Fraction(0)
    variant: str = "initial"
    seed: Optional[int] = None

    def __post_init__(self):
        for name in ("checks", "logical_x", "logical_z", "logical_positions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.checks) != self.n_phys - self.k:
            raise DimensionError(f"expected {self.n_phys - self.k} checks, got {len(self.checks)}")
        if not (len(self.logical_x) == len(self.logical_z) == len(self.logical_positions) == self.k):
            raise DimensionError("logical_x, logical_z and logical_positions must all have length k")
        for p in self.checks + self.logical_x + self.logical_z:
            if p.n != self.n_phys:
                raise DimensionError(f"operator on {p.n} qubits in a code of {self.n_phys}")

    @property
    def n_checks(self) -> int:
        return len(self.checks)

    @cached_property
    def check_bits(self) -> tuple[np.ndarray, np.ndarray]:
        return stack(self.checks, self.n_phys)

    @cached_property
    def logical_bits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        lx = stack(self.logical_x, self.n_phys)
        lz = stack(self.logical_z, self.n_phys)
        return lx[0], lx[1], lz[0], lz[1]

    @cached_property
    def pure_error_solver(self) -> gf2.LinearSolver:
        # <g, f> = g_x.f_z + g_z.f_x, so solve [g_z | g_x] [f_x; f_z] = s
        cx, cz = self.check_bits
        return gf2.LinearSolver.for_matrix(np.concatenate([cz, cx], axis=1))

    def logical_pair(self, j: int) -> tuple[PauliString, PauliString]:
        return self.logical_x[j], self.logical_z[j]

    def logical_generators(self, exclude: Optional[int] = None) -> list[PauliString]:
        """Encoded logical generators of every qubit except *exclude*."""
        out = []
        for j in range(self.k):
            if j != exclude:
                out.extend((self.logical_x[j], self.logical_z[j]))
        return out

    def max_check_weight(self) -> int:
        return max((c.weight for c in self.checks), default=0)


# --------------------------------------------------------------------------- #
# 2.  Initial code and padding
# --------------------------------------------------------------------------- #
def logical_sites(n: int, k: int) -> list[int]:
    """floor((j + 1/2) n / k) for j = 0..k-1."""
    return [((2 * j + 1) * n) // (2 * k) for j in range(k)]


def _single_site_code(n: int, positions: Sequence[int], check_symbols: dict, **meta) -> StabilizerCode:
    checks = tuple(PauliString.single(n, i, check_symbols[i]) for i in sorted(check_symbols))
    lx = tuple(PauliString.single(n, p, "X") for p in positions)
    lz = tuple(PauliString.single(n, p, "Z") for p in positions)
    return StabilizerCode(n, len(positions), checks, lx, lz, tuple(positions), **meta)


def build_initial_code(n: int, k: int, rng: np.random.Generator, alphabet: str = STANDARD_ALPHABET) -> StabilizerCode:
    if not 1 <= k < n:
        raise CodeParamsError(f"need 1 <= k < n, got n={n}, k={k}")
    positions = logical_sites(n, k)
    taken = set(positions)
    symbols = {i: alphabet[rng.integers(len(alphabet))] for i in range(n) if i not in taken}
    return _single_site_code(n, positions, symbols, r=Fraction(k, n))


def minimum_depth(r: Union[Fraction, float, str]) -> int:
    """Smallest d whose padding split is non-negative on both ends."""
    m = as_rate(r).denominator
    d = 1
    while min(padding_split(m, 1, d, Fraction(1, m))) < 0:
        d += 1
    return d


def padding_split(n: int, k: int, d: int, r: Fraction) -> tuple[int, int]:
    """(left, right) extra sites for an evenly spaced initial code.

    Left margin is raised to exactly 2d; the remainder goes right.  For odd 1/r
    the split is even; for even 1/r the right end gets the extra site because
    evenly spaced logical sites sit left of centre.
    """
    extras = 4 * d - r.denominator + 1
    positions = logical_sites(n, k)
    left = 2 * d - positions[0]
    return left, extras - left


def pad_boundary(code: StabilizerCode, d: int, r: Union[Fraction, float, str], rng: np.random.Generator,
                 alphabet: str = STANDARD_ALPHABET) -> StabilizerCode:
    r = as_rate(r)
    extras = 4 * d - r.denominator + 1
    n_phys = code.n_phys + extras
    if n_phys <= 0:
        raise CodeParamsError(f"n_phys = n + 4d - 1/r + 1 = {n_phys} is not positive")
    pos = code.logical_positions
    left = max(0, 2 * d - min(pos))
    right = extras - left
    if right < 0 or right + (code.n_phys - 1 - max(pos)) < 2 * d:
        raise CodeParamsError(
            f"cannot keep every logical 2d={2 * d} sites from both ends with {extras} extra sites")

    def shift(p: PauliString) -> PauliString:
        zl, zr = np.zeros(left, np.uint8), np.zeros(right, np.uint8)
        return PauliString(np.concatenate([zl, p.x, zr]), np.concatenate([zl, p.z, zr]))

    new_sites = list(range(left)) + list(range(left + code.n_phys, n_phys))
    new_checks = [PauliString.single(n_phys, i, alphabet[rng.integers(len(alphabet))]) for i in new_sites]
    checks = [shift(c) for c in code.checks] + new_checks
    checks.sort(key=lambda c: c.support_interval())
    return StabilizerCode(
        n_phys, code.k, tuple(checks),
        tuple(shift(p) for p in code.logical_x), tuple(shift(p) for p in code.logical_z),
        tuple(p + left for p in pos), d=0, r=r, variant=code.variant, seed=code.seed,
    )


def resample_checks(code: StabilizerCode, rng: np.random.Generator, alphabet: str = GREEDY_ALPHABET) -> StabilizerCode:
    """Redraw every single-site check from *alphabet* (greedy variant uses X/Y)."""
    checks = []
    for c in code.checks:
        if c.weight != 1:
            raise ValueError("only single-site (pre-encoding) checks can be resampled")
        site = int(c.support()[0])
        checks.append(PauliString.single(code.n_phys, site, alphabet[rng.integers(len(alphabet))]))
    return replace(code, checks=tuple(checks))


# --------------------------------------------------------------------------- #
# 3.  Circuits
# --------------------------------------------------------------------------- #
def sample_circuit_standard(n_phys: int, d: int, rng: np.random.Generator) -> CliffordCircuit:
    if d < 1:
        raise CodeParamsError(f"depth must be >= 1, got {d}")
    layers = []
    for t in range(d):
        layers.append(TwoQubitLayer(t % 2))
        layers.append(SingleQubitLayer(tuple(int(g) for g in rng.integers(0, 24, n_phys))))
    return CliffordCircuit(n_phys, tuple(layers))


def _post_iswap_weight_table() -> np.ndarray:
    """(24, 24, 4, 4): weight on a pair after gates (u, v) then iSWAP, for input (a, b)."""
    table = iswap_table()
    pw = np.zeros((4, 4), dtype=np.int64)
    for (a, b), (a2, b2, _) in table.items():
        pw[a, b] = (a2 != 0) + (b2 != 0)
    act = single_action_table().astype(np.intp)
    return pw[act[:, None, :, None], act[None, :, None, :]]


def sample_circuit_greedy(code: StabilizerCode, d: int, rng: np.random.Generator) -> tuple[StabilizerCode, CliffordCircuit]:
    """Greedy brickwork circuit for an initial (pre-encoding) code.

    Returns the code with its checks redrawn from {X, Y} together with the
    circuit.  Before every iSWAP layer each pair of partner qubits gets the
    gate pair (out of 24 x 24) that maximises the summed weight of all checks
    and logical generators after that layer; ties are broken uniformly.
    Qubits left unpaired by the layer get a uniform gate.
    """
    if d < 1:
        raise CodeParamsError(f"depth must be >= 1, got {d}")
    code = resample_checks(code, rng)
    n = code.n_phys
    ops = list(code.checks) + code.logical_generators()
    xs, zs = stack(ops, n)
    xs, zs = xs.copy(), zs.copy()
    score_table = _post_iswap_weight_table().reshape(24 * 24, 16)

    layers = []
    for t in range(d):
        two = TwoQubitLayer(t % 2)
        a = two.pairs(n)
        gates = rng.integers(0, 24, n)
        if a.size:
            idx = (xs | (zs << 1)).astype(np.int64)
            pair_code = idx[:, a] * 4 + idx[:, a + 1]             # (ops, pairs)
            counts = np.zeros((a.size, 16), dtype=np.int64)
            for p in range(a.size):
                counts[p] = np.bincount(pair_code[:, p], minlength=16)
            scores = counts @ score_table.T                      # (pairs, 576)
            for p, q in enumerate(a):
                best = np.flatnonzero(scores[p] == scores[p].max())
                choice = int(best[rng.integers(best.size)])
                gates[q], gates[q + 1] = divmod(choice, 24)
        single = SingleQubitLayer(tuple(int(g) for g in gates))
        apply_layer(single, xs, zs)
        apply_layer(two, xs, zs)
        layers += [single, two]
    verbo(f"[codes] greedy circuit: n={n}, d={d}, total weight={int(np.count_nonzero(xs | zs))}")
    return code, CliffordCircuit(n, tuple(layers))


def encode(code: StabilizerCode, circuit: CliffordCircuit, variant: Optional[str] = None,
           seed: Optional[int] = None) -> StabilizerCode:
    if circuit.n != code.n_phys:
        raise DimensionError(f"circuit acts on {circuit.n} qubits, code has {code.n_phys}")
    ops = list(code.checks) + list(code.logical_x) + list(code.logical_z)
    xs, zs = circuit.conjugate_arrays(*stack(ops, code.n_phys))
    out = unstack(xs, zs)
    m, k = code.n_checks, code.k
    return replace(
        code,
        checks=out[:m], logical_x=out[m:m + k], logical_z=out[m + k:],
        d=code.d + circuit.depth,
        variant=variant if variant is not None else code.variant,
        seed=seed if seed is not None else code.seed,
    )


# --------------------------------------------------------------------------- #
# 4.  Whole pipeline
# --------------------------------------------------------------------------- #
def sample_encoding(params: CodeParams, rng: np.random.Generator) -> tuple[StabilizerCode, CliffordCircuit]:
    """Padded initial code plus the circuit that encodes it."""
    initial = build_initial_code(params.n, params.k, rng)
    padded = pad_boundary(initial, params.d, params.r, rng)
    if params.variant == "greedy":
        return sample_circuit_greedy(padded, params.d, rng)
    return padded, sample_circuit_standard(padded.n_phys, params.d, rng)


def sample_code(params: CodeParams, rng: np.random.Generator) -> tuple[StabilizerCode, CliffordCircuit]:
    """Encoded random code for *params* together with its encoding circuit."""
    padded, circuit = sample_encoding(params, rng)
    return encode(padded, circuit, variant=params.variant, seed=params.seed), circuit


def validate_code(code: StabilizerCode) -> None:
    """Raise ValueError if any StabilizerCode invariant is violated."""
    m, k = code.n_checks, code.k
    ops = list(code.checks) + list(code.logical_x) + list(code.logical_z)
    comm = commutation_matrix(ops)
    if comm[:m, :m].any():
        raise ValueError("checks do not pairwise commute")
    if comm[:m, m:].any():
        raise ValueError("a logical generator anticommutes with a check")
    logical = comm[m:, m:]
    expected = np.zeros((2 * k, 2 * k), dtype=np.uint8)
    expected[:k, k:] = np.eye(k, dtype=np.uint8)
    expected[k:, :k] = np.eye(k, dtype=np.uint8)
    if not np.array_equal(logical, expected):
        raise ValueError("logical generators do not form anticommuting X/Z pairs")
    cx, cz = code.check_bits
    if gf2.rank(np.concatenate([cx, cz], axis=1)) != m:
        raise ValueError("checks are linearly dependent over GF(2)")


# --------------------------------------------------------------------------- #
# 5.  Text format
# --------------------------------------------------------------------------- #
def dumps_code(code: StabilizerCode) -> str:
    seed = "-" if code.seed is None else str(code.seed)
    r = f"{code.r.numerator}/{code.r.denominator}"
    lines = [f"{code.n_phys} {code.k} {code.d} {r} {code.variant} {seed}",
             "P: " + " ".join(str(p) for p in code.logical_positions)]
    lines += [f"C: {c.to_text()}" for c in code.checks]
    lines += [f"LX: {p.to_text()}" for p in code.logical_x]
    lines += [f"LZ: {p.to_text()}" for p in code.logical_z]
    return "\n".join(lines) + "\n"


def loads_code(text: str) -> StabilizerCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty code file")
    try:
        n_phys, k, d, r, variant, seed = lines[0].split()
        header = dict(n_phys=int(n_phys), k=int(k), d=int(d), r=Fraction(r),
                      variant=variant, seed=None if seed == "-" else int(seed))
    except ValueError as e:
        raise ValueError(f"malformed header line: {lines[0]!r}") from e
    positions: tuple = ()
    checks, lx, lz = [], [], []
    for ln in lines[1:]:
        tag, _, body = ln.partition(":")
        body = body.strip()
        if tag == "P":
            positions = tuple(int(t) for t in body.split())
        elif tag == "C":
            checks.append(PauliString.from_text(body))
        elif tag == "LX":
            lx.append(PauliString.from_text(body))
        elif tag == "LZ":
            lz.append(PauliString.from_text(body))
        else:
            raise ValueError(f"unknown line prefix {tag!r}")
    return StabilizerCode(header.pop("n_phys"), header.pop("k"), tuple(checks), tuple(lx), tuple(lz),
                          positions, **header)


def write_code(code: StabilizerCode, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_code(code), encoding="utf-8")
    return path


def read_code(path: Union[str, Path]) -> StabilizerCode:
    return loads_code(Path(path).read_text(encoding="utf-8"))
