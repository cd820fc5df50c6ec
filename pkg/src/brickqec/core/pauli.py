"""
brickqec.core.pauli - binary symplectic Pauli operators and Clifford conjugation.

Single-qubit Paulis are indexed ``idx = x | (z << 1)``, i.e. I=0, X=1, Z=2,
Y=3.  Because the index is linear in (x, z), the product of two Paulis (up to
phase) is ``a ^ b`` and every Clifford acts on indices as a GF(2)-linear map.
The same I < X < Z < Y order is used for decoder classes and probability
vectors throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence, Union

import numpy as np

from brickqec.errors import DimensionError

SYMBOLS = "IXZY"                      # index -> symbol
SYMBOL_INDEX = {s: i for i, s in enumerate(SYMBOLS)}
I, X, Z, Y = 0, 1, 2, 3
PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}

# weight of each single-site index (I is free)
_SITE_WEIGHT = np.array([0, 1, 1, 1], dtype=np.int64)


# --------------------------------------------------------------------------- #
# 1.  Pauli strings
# --------------------------------------------------------------------------- #
def _frozen_bits(bits) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8) & 1)
    if arr.ndim != 1:
        raise DimensionError(f"Pauli bit vectors must be 1-D, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PauliString:
    """n-qubit Pauli operator up to phase, stored as bit vectors (x, z)."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_bits(self.x))
        object.__setattr__(self, "z", _frozen_bits(self.z))
        if self.x.shape != self.z.shape:
            raise DimensionError(f"x has {self.x.size} bits but z has {self.z.size}")

    # ---- constructors ----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def single(cls, n: int, site: int, symbol: str) -> "PauliString":
        if not 0 <= site < n:
            raise DimensionError(f"site {site} outside 0..{n - 1}")
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[site], z[site] = PAULI_BITS[symbol]
        return cls(x, z)

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        text = text.strip().upper()
        bad = set(text) - set(SYMBOLS)
        if bad:
            raise ValueError(f"Pauli text may only contain I, X, Y, Z (got {''.join(sorted(bad))!r})")
        idx = np.fromiter((SYMBOL_INDEX[c] for c in text), dtype=np.uint8, count=len(text))
        return cls.from_indices(idx)

    @classmethod
    def from_indices(cls, idx) -> "PauliString":
        idx = np.asarray(idx, dtype=np.uint8)
        return cls(idx & 1, idx >> 1)

    @classmethod
    def from_bits(cls, bits) -> "PauliString":
        """Build from a concatenated ``[x | z]`` vector of length 2n."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size % 2:
            raise DimensionError(f"symplectic vector must have even length, got {bits.size}")
        n = bits.size // 2
        return cls(bits[:n], bits[n:])

    # ---- views -----------------------------------------------------------
    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def indices(self) -> np.ndarray:
        return (self.x | (self.z << 1)).astype(np.uint8)

    @property
    def bits(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def to_text(self) -> str:
        return "".join(SYMBOLS[i] for i in self.indices)

    def site(self, j: int) -> str:
        return SYMBOLS[int(self.x[j]) | (int(self.z[j]) << 1)]

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x | self.z)

    def support_interval(self) -> tuple[int, int]:
        """[first, last] non-identity site; raises for the identity."""
        sup = self.support()
        if sup.size == 0:
            raise ValueError("identity operator has no support interval")
        return int(sup[0]), int(sup[-1])

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    # ---- algebra ---------------------------------------------------------
    def __mul__(self, other: "PauliString") -> "PauliString":
        _check_same_n(self, other)
        return PauliString(self.x ^ other.x, self.z ^ other.z)

    multiply = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.x, other.x)
                and np.array_equal(self.z, other.z))

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        return f"PauliString({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise DimensionError(f"Pauli strings act on {a.n} and {b.n} qubits")


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 if *a* and *b* commute, 1 if they anticommute."""
    _check_same_n(a, b)
    return int((np.count_nonzero(a.x & b.z) + np.count_nonzero(a.z & b.x)) & 1)


def stack(paulis: Sequence[PauliString], n: "int | None" = None) -> tuple[np.ndarray, np.ndarray]:
    """Stack Pauli strings into (m, n) x and z matrices."""
    if not paulis:
        if n is None:
            raise ValueError("cannot infer qubit count of an empty list")
        return np.zeros((0, n), np.uint8), np.zeros((0, n), np.uint8)
    n0 = paulis[0].n
    for p in paulis:
        if p.n != n0 or (n is not None and p.n != n):
            raise DimensionError("all Pauli strings must act on the same number of qubits")
    return np.stack([p.x for p in paulis]), np.stack([p.z for p in paulis])


def unstack(xs: np.ndarray, zs: np.ndarray) -> tuple[PauliString, ...]:
    return tuple(PauliString(x, z) for x, z in zip(xs, zs))


def commutation_matrix(paulis: Sequence[PauliString]) -> np.ndarray:
    """All pairwise symplectic products as an (m, m) 0/1 matrix."""
    xs, zs = stack(paulis)
    xs = xs.astype(np.int64)
    zs = zs.astype(np.int64)
    return ((xs @ zs.T + zs @ xs.T) & 1).astype(np.uint8)


def weights(xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Row weights of stacked Pauli strings."""
    return np.count_nonzero(xs | zs, axis=1)


# --------------------------------------------------------------------------- #
# 2.  Single-qubit Cliffords
# --------------------------------------------------------------------------- #
def _single_product(a: int, b: int) -> tuple[int, int]:
    """a·b = i^phase · c for single-qubit Pauli indices."""
    c = a ^ b
    if a == 0 or b == 0 or a == b:
        return 0, c
    cyc = {X: 0, Y: 1, Z: 2}
    return (1 if (cyc[b] - cyc[a]) % 3 == 1 else 3), c


@dataclass(frozen=True)
class SingleQubitClifford:
    """Single-qubit Clifford (mod global phase) given by the images of X and Z."""

    id: int
    image_of_X: str
    image_of_Z: str
    sign_x: int = 1
    sign_z: int = 1

    def image(self, idx: int) -> tuple[int, int]:
        """(sign, image index) of the Pauli with index *idx*."""
        ix, iz = SYMBOL_INDEX[self.image_of_X], SYMBOL_INDEX[self.image_of_Z]
        if idx == I:
            return 1, I
        if idx == X:
            return self.sign_x, ix
        if idx == Z:
            return self.sign_z, iz
        # Y = i X Z  ->  i g(X) g(Z)
        phase, c = _single_product(ix, iz)
        return self.sign_x * self.sign_z * (-1 if phase == 1 else 1), c


_PAIR_ORDER = (("X", "Z"), ("Z", "X"), ("X", "Y"), ("Y", "X"), ("Y", "Z"), ("Z", "Y"))
_SIGN_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))

IDENTITY_GATE = 0
HADAMARD_GATE = 4


@lru_cache(maxsize=1)
def enumerate_single_cliffords() -> tuple[SingleQubitClifford, ...]:
    """The 24 single-qubit Cliffords; id 0 is the identity, id 4 exchanges X and Z."""
    out = []
    for (img_x, img_z), (sx, sz) in product(_PAIR_ORDER, _SIGN_ORDER):
        out.append(SingleQubitClifford(len(out), img_x, img_z, sx, sz))
    return tuple(out)


@lru_cache(maxsize=1)
def _clifford_lookup() -> dict:
    return {(g.image_of_X, g.image_of_Z, g.sign_x, g.sign_z): g.id for g in enumerate_single_cliffords()}


def compose(first: int, then: int) -> int:
    """Id of the Clifford that applies *first* and afterwards *then*."""
    group = enumerate_single_cliffords()
    g, h = group[first], group[then]
    imgs = []
    for idx in (X, Z):
        s1, p = g.image(idx)
        s2, q = h.image(p)
        imgs.append((s1 * s2, SYMBOLS[q]))
    (sx, px), (sz, pz) = imgs
    return _clifford_lookup()[(px, pz, sx, sz)]


@lru_cache(maxsize=1)
def _inverse_table() -> tuple[int, ...]:
    return tuple(next(h for h in range(24) if compose(g, h) == IDENTITY_GATE) for g in range(24))


def inverse(gate: int) -> int:
    return _inverse_table()[gate]


@lru_cache(maxsize=1)
def single_action_table() -> np.ndarray:
    """(24, 4) table: row g maps a Pauli index to its image index under gate g."""
    table = np.zeros((24, 4), dtype=np.uint8)
    for g in enumerate_single_cliffords():
        for idx in range(4):
            table[g.id, idx] = g.image(idx)[1]
    table.setflags(write=False)
    return table


# --------------------------------------------------------------------------- #
# 3.  iSWAP
# --------------------------------------------------------------------------- #
# GF(2) action of iSWAP on the column (x_a, x_b, z_a, z_b); it agrees with
# iswap_table below and is an involution in binary form (iSWAP^2 = Z Z).
ISWAP_SYMPLECTIC = np.array(
    [[0, 1, 0, 0],
     [1, 0, 0, 0],
     [1, 1, 0, 1],
     [1, 1, 1, 0]],
    dtype=np.uint8,
)

_PAULI_MATS = {
    I: np.eye(2, dtype=complex),
    X: np.array([[0, 1], [1, 0]], dtype=complex),
    Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
}
ISWAP_MATRIX = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1j, 0],
     [0, 1j, 0, 0],
     [0, 0, 0, 1]],
    dtype=complex,
)


def _decompose_two_qubit(m: np.ndarray) -> tuple[int, int, int]:
    for a, b in product(range(4), repeat=2):
        basis = np.kron(_PAULI_MATS[a], _PAULI_MATS[b])
        coeff = np.trace(basis.conj().T @ m) / 4
        if abs(abs(coeff) - 1) < 1e-9:
            if abs(coeff.imag) > 1e-9:
                raise ArithmeticError("conjugated Pauli picked up an imaginary phase")
            return a, b, int(round(coeff.real))
    raise ArithmeticError("matrix is not a signed Pauli operator")


@lru_cache(maxsize=1)
def iswap_table() -> dict:
    """{(a, b): (a', b', sign)} with U (a⊗b) U† = sign · a'⊗b' for U = iSWAP."""
    u = ISWAP_MATRIX
    table = {}
    for a, b in product(range(4), repeat=2):
        conj = u @ np.kron(_PAULI_MATS[a], _PAULI_MATS[b]) @ u.conj().T
        table[(a, b)] = _decompose_two_qubit(conj)
    return table


def conjugate_by_iswap(a: Union[str, int], b: Union[str, int]) -> tuple[str, str, int]:
    ia = SYMBOL_INDEX[a] if isinstance(a, str) else int(a)
    ib = SYMBOL_INDEX[b] if isinstance(b, str) else int(b)
    a2, b2, sign = iswap_table()[(ia, ib)]
    return SYMBOLS[a2], SYMBOLS[b2], sign


# --------------------------------------------------------------------------- #
# 4.  Brickwork circuits
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class TwoQubitLayer:
    """iSWAPs on (p, p+1), (p+2, p+3), ... for parity p."""
    parity: int

    def pairs(self, n: int) -> np.ndarray:
        return np.arange(self.parity, n - 1, 2)


@dataclass(frozen=True)
class SingleQubitLayer:
    gates: tuple


Layer = Union[TwoQubitLayer, SingleQubitLayer]


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    layers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        parity = 0
        for layer in self.layers:
            if isinstance(layer, TwoQubitLayer):
                if layer.parity != parity:
                    raise ValueError("two-qubit layer parities must alternate starting at 0")
                parity ^= 1
            elif isinstance(layer, SingleQubitLayer):
                if len(layer.gates) != self.n:
                    raise DimensionError(f"single-qubit layer has {len(layer.gates)} gates for {self.n} qubits")
                if any(not 0 <= g < 24 for g in layer.gates):
                    raise ValueError("single-qubit gate ids must lie in [0, 24)")
            else:
                raise TypeError(f"unknown layer type {type(layer).__name__}")

    @property
    def depth(self) -> int:
        return sum(isinstance(layer, TwoQubitLayer) for layer in self.layers)

    def inverse_layers(self) -> tuple:
        out = []
        for layer in reversed(self.layers):
            if isinstance(layer, SingleQubitLayer):
                out.append(SingleQubitLayer(tuple(inverse(g) for g in layer.gates)))
            else:
                out.append(layer)
        return tuple(out)

    def conjugate_arrays(self, xs: np.ndarray, zs: np.ndarray, *, inverse: bool = False):
        """Conjugate stacked (m, n) Pauli bit matrices; returns new arrays."""
        layers = self.inverse_layers() if inverse else self.layers
        xs = np.array(xs, dtype=np.uint8, copy=True)
        zs = np.array(zs, dtype=np.uint8, copy=True)
        if xs.ndim != 2 or xs.shape[1] != self.n or xs.shape != zs.shape:
            raise DimensionError(f"expected (m, {self.n}) bit matrices, got {xs.shape} / {zs.shape}")
        for layer in layers:
            apply_layer(layer, xs, zs)
        return xs, zs

    def conjugate(self, p: PauliString, *, inverse: bool = False) -> PauliString:
        if p.n != self.n:
            raise DimensionError(f"circuit acts on {self.n} qubits, Pauli on {p.n}")
        xs, zs = self.conjugate_arrays(p.x[None, :], p.z[None, :], inverse=inverse)
        return PauliString(xs[0], zs[0])

    def conjugate_inverse(self, p: PauliString) -> PauliString:
        return self.conjugate(p, inverse=True)

    def inverse(self) -> "InverseCircuit":
        return InverseCircuit(self)


@dataclass(frozen=True)
class InverseCircuit:
    """Layer sequence of U† (the parity rule runs backwards, so it is kept apart)."""
    forward: CliffordCircuit

    @property
    def n(self) -> int:
        return self.forward.n

    def conjugate(self, p: PauliString) -> PauliString:
        return self.forward.conjugate(p, inverse=True)


def apply_layer(layer: Layer, xs: np.ndarray, zs: np.ndarray) -> None:
    """In-place conjugation of (m, n) bit matrices by one layer."""
    n = xs.shape[1]
    if isinstance(layer, TwoQubitLayer):
        a = layer.pairs(n)
        if a.size == 0:
            return
        b = a + 1
        bits = np.stack((xs[:, a], xs[:, b], zs[:, a], zs[:, b]))
        out = np.tensordot(ISWAP_SYMPLECTIC, bits, axes=1) & 1
        xs[:, a], xs[:, b], zs[:, a], zs[:, b] = out
    else:
        table = single_action_table()
        gates = np.asarray(layer.gates, dtype=np.intp)
        idx = xs | (zs << 1)
        img = table[gates[None, :], idx]
        xs[:] = img & 1
        zs[:] = img >> 1


def conjugate_string(circuit: CliffordCircuit, p: PauliString) -> PauliString:
    return circuit.conjugate(p)
