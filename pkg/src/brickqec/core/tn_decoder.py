"""
brickqec.core.tn_decoder - exact tensor-network coset probabilities and
marginal maximum-likelihood decoding.

The coset probability of a representative f_L is

    p(f_L G) = sum over sigma in {0,1}^m of  prod_j p_j[ f_L(j) ^ XOR_c sigma_c g_c(j) ]

with single-site Paulis as indices (I=0, X=1, Z=2, Y=3), so a product of
Paulis up to phase is a XOR of indices.  The network has one row per
physical qubit and one column per group of non-overlapping generators.
Every generator owns a vertical sigma wire; every row carries a horizontal
wire (i_X, i_Z) from a left terminator fixed to (0, 0) through the check
tensors of that row, in column order, into a probability tensor on the right.

Three contractions live here:

  GridContractor         row sweep: each row's horizontal wire is threaded
                         through its check tensors, the open sigma wires
                         form the boundary
  contract_explicit      the whole network handed to opt_einsum, with
                         optional one-hot terminators pinning sigma
  contract_tanner_chain  Tanner-graph chain of transfer matrices, built
                         from site probabilities without the grid tensors

All three return natural-log probabilities; ``-inf`` for an empty coset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import opt_einsum as oe

from brickqec.core.codes import StabilizerCode
from brickqec.core.noise import Syndrome, pure_error, site_table
from brickqec.core.oracle import brute_coset_probability
from brickqec.core.pauli import SYMBOLS, PauliString, stack
from brickqec.errors import DimensionError, ResourceLimitError
from brickqec.utils.libw import verbo

BACKENDS = ("grid", "explicit", "chain", "brute")

# labels a single numpy.einsum call accepts
_EINSUM_LABELS = 52


def _width_cap(max_width: Optional[int]) -> int:
    if max_width is not None:
        return int(max_width)
    from brickqec.core.config import get_config
    return int(get_config().max_contraction_width)


# --------------------------------------------------------------------------- #
# 1.  Elementary tensors
# --------------------------------------------------------------------------- #
def check_tensor(kind: str) -> np.ndarray:
    """T^P[i_X, i_Z, j_X, j_Z, sigma_u, sigma_d] for P in {X, Y, Z}.

    1 iff sigma_u == sigma_d and (i_X, i_Z) == (j_X, j_Z) XOR sigma * bits(P).
    """
    if kind not in ("X", "Y", "Z"):
        raise ValueError(f"check tensors exist for X, Y, Z only, got {kind!r}")
    px, pz = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}[kind]
    t = np.zeros((2,) * 6, dtype=np.float64)
    for jx in range(2):
        for jz in range(2):
            for s in range(2):
                t[jx ^ (s & px), jz ^ (s & pz), jx, jz, s, s] = 1.0
    return t


def probability_tensor(site_probs: np.ndarray, f_site: int = 0) -> np.ndarray:
    """p~[i_X, i_Z] = probability of the Pauli (i_X, i_Z) XOR f_L(j) on one site."""
    t = np.empty((2, 2), dtype=np.float64)
    for ix in range(2):
        for iz in range(2):
            t[ix, iz] = site_probs[(ix | (iz << 1)) ^ int(f_site)]
    return t


def left_terminator() -> np.ndarray:
    t = np.zeros((2, 2), dtype=np.float64)
    t[0, 0] = 1.0
    return t


# --------------------------------------------------------------------------- #
# 2.  Layout
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class TNLayout:
    n_rows: int
    generators: tuple
    indices: np.ndarray           # (G, n_rows) Pauli index of every generator on every row
    intervals: np.ndarray         # (G, 2) first / last support row
    columns: np.ndarray           # (G,) column of every generator
    n_columns: int
    row_generators: tuple         # per row: generator ids acting there, in column order
    starts: tuple                 # per row: generator ids whose wire opens there
    ends: tuple                   # per row: generator ids whose wire closes there

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    def cell(self, row: int, column: int) -> Optional[tuple[str, int]]:
        """(kind, generator id) of the check tensor at (row, column), if any."""
        for g in self.row_generators[row]:
            if self.columns[g] == column:
                return SYMBOLS[int(self.indices[g, row])], g
        return None

    @property
    def width(self) -> int:
        """Largest number of sigma wires crossing one row."""
        if not self.n_generators:
            return 0
        cover = np.zeros(self.n_rows + 1, dtype=np.int64)
        np.add.at(cover, self.intervals[:, 0], 1)
        np.add.at(cover, self.intervals[:, 1] + 1, -1)
        return int(np.cumsum(cover).max())

    def wire_span(self, g: int) -> tuple[int, int]:
        first, last = self.intervals[g]
        return int(first), int(last)


def build_layout(generators: Sequence[PauliString], n_phys: int) -> TNLayout:
    """First-fit interval scheduling of generators into columns."""
    gens = tuple(generators)
    if gens:
        xs, zs = stack(gens, n_phys)
    else:
        xs = zs = np.zeros((0, n_phys), np.uint8)
    idx = (xs | (zs << 1)).astype(np.uint8)
    intervals = np.zeros((len(gens), 2), dtype=np.int64)
    for g, p in enumerate(gens):
        if p.is_identity():
            raise ValueError(f"generator {g} is the identity and cannot be placed in the network")
        intervals[g] = p.support_interval()

    columns = np.zeros(len(gens), dtype=np.int64)
    column_end: list[int] = []     # last occupied row of every column so far
    for g in sorted(range(len(gens)), key=lambda g: (intervals[g, 0], intervals[g, 1], g)):
        first, last = intervals[g]
        for c, end in enumerate(column_end):
            if end < first:
                break
        else:
            c = len(column_end)
            column_end.append(-1)
        columns[g] = c
        column_end[c] = last

    row_gens, starts, ends = [], [], []
    for j in range(n_phys):
        acting = np.flatnonzero(idx[:, j])
        row_gens.append(tuple(int(g) for g in sorted(acting, key=lambda g: (columns[g], g))))
        starts.append(tuple(int(g) for g in np.flatnonzero(intervals[:, 0] == j)))
        ends.append(tuple(int(g) for g in np.flatnonzero(intervals[:, 1] == j)))

    idx.setflags(write=False)
    return TNLayout(n_phys, gens, idx, intervals, columns, len(column_end),
                    tuple(row_gens), tuple(starts), tuple(ends))


# --------------------------------------------------------------------------- #
# 3.  Grid row sweep
# --------------------------------------------------------------------------- #
@dataclass
class Boundary:
    """Sweep state after ``row`` rows: one axis per open sigma wire."""
    state: np.ndarray
    log_scale: float = 0.0
    open: list = field(default_factory=list)
    row: int = 0

    def copy(self) -> "Boundary":
        return Boundary(self.state.copy(), self.log_scale, list(self.open), self.row)

    @property
    def dead(self) -> bool:
        return self.log_scale == -math.inf


class GridContractor:
    """Row-sweep contraction of one layout under one set of site probabilities.

    Memory is 2^W for W open sigma wires; ``max_width`` records the largest W
    seen over every sweep run by this instance.
    """

    def __init__(self, layout: TNLayout, noise, max_width: Optional[int] = None):
        self.layout = layout
        self.probs = site_table(noise, layout.n_rows)
        self.width_cap = _width_cap(max_width)
        self.max_width = 0
        # sigma_up == sigma_down, so each check acts through its diagonal
        self.checks = {kind: np.einsum("abcdss->abcds", check_tensor(kind)) for kind in "XYZ"}

    def _thread_row(self, state: np.ndarray, open_wires: list, j: int, f_site: int) -> np.ndarray:
        """Run row j's horizontal wire through its check tensors and close it."""
        w = state.ndim
        sigma = list(range(w))
        row = np.multiply.outer(state, left_terminator())
        for g in self.layout.row_generators[j]:
            t = self.checks[SYMBOLS[int(self.layout.indices[g, j])]]
            row = np.einsum(row, sigma + [w, w + 1],
                            t, [w + 2, w + 3, w, w + 1, open_wires.index(g)],
                            sigma + [w + 2, w + 3])
        return np.tensordot(row, probability_tensor(self.probs[j], f_site), axes=([w, w + 1], [0, 1]))

    def initial(self) -> Boundary:
        return Boundary(np.ones((), dtype=np.float64))

    def advance(self, boundary: Boundary, f_idx: np.ndarray, stop_row: int) -> Boundary:
        """Absorb rows ``boundary.row .. stop_row - 1``; *boundary* is left untouched."""
        b = boundary.copy()
        lay = self.layout
        for j in range(b.row, stop_row):
            if b.dead:
                b.row = stop_row
                break
            state = b.state
            for g in lay.starts[j]:
                b.open.append(g)
                state = np.repeat(state[..., None], 2, axis=-1)
            width = len(b.open)
            if width > self.width_cap:
                raise ResourceLimitError(
                    f"contraction needs {width} open wires at row {j}, cap is {self.width_cap}")
            self.max_width = max(self.max_width, width)

            if width + 4 > _EINSUM_LABELS:
                raise ResourceLimitError(f"row {j} needs {width + 4} einsum labels")
            state = np.asarray(self._thread_row(state, b.open, j, int(f_idx[j])))

            for g in lay.ends[j]:
                ax = b.open.index(g)
                state = state.sum(axis=ax)
                b.open.pop(ax)

            m = float(state.max()) if state.size else 0.0
            if m == 0.0:
                b.state, b.log_scale = np.zeros_like(state), -math.inf
            else:
                b.state, b.log_scale = state / m, b.log_scale + math.log(m)
            b.row = j + 1
        return b

    def finish(self, boundary: Boundary) -> float:
        if boundary.dead:
            return -math.inf
        if boundary.row != self.layout.n_rows or boundary.open:
            raise ValueError("boundary has not consumed every row")
        return boundary.log_scale + math.log(float(boundary.state))

    def log_value(self, f_L: PauliString) -> float:
        if f_L.n != self.layout.n_rows:
            raise DimensionError(f"f_L acts on {f_L.n} qubits, layout has {self.layout.n_rows} rows")
        return self.finish(self.advance(self.initial(), f_L.indices, self.layout.n_rows))


def contract(layout: TNLayout, f_L: PauliString, noise, max_width: Optional[int] = None,
             approximate: bool = False) -> float:
    """log p(f_L G) for the generators in *layout*."""
    if approximate:
        raise NotImplementedError(
            "approximate boundary contraction is not available; only exact contraction is offered")
    return GridContractor(layout, noise, max_width).log_value(f_L)


def coset_probability(code: StabilizerCode, f_L: PauliString, noise,
                      extra_generators: Sequence[PauliString] = (), max_width: Optional[int] = None,
                      approximate: bool = False) -> float:
    """log p(f_L G') with G' generated by the checks and *extra_generators*."""
    if f_L.n != code.n_phys:
        raise DimensionError(f"f_L acts on {f_L.n} qubits, code has {code.n_phys}")
    layout = build_layout(list(code.checks) + list(extra_generators), code.n_phys)
    return contract(layout, f_L, noise, max_width, approximate)


# --------------------------------------------------------------------------- #
# 4.  Explicit network
# --------------------------------------------------------------------------- #
def contract_explicit(layout: TNLayout, f_L: PauliString, noise,
                      pinned: Optional[Mapping[int, int]] = None,
                      max_width: Optional[int] = None) -> float:
    """Contract the literal network of check, probability and terminator tensors.

    Every row becomes a tensor over the sigma wires of the generators acting
    there (left terminator, check tensors in column order, probability
    tensor).  The rows and the top terminators are then joined by opt_einsum,
    sigma being a shared label.  A generator listed in *pinned* gets a
    one-hot terminator instead of the all-ones one, fixing its sigma.
    """
    if f_L.n != layout.n_rows:
        raise DimensionError(f"f_L acts on {f_L.n} qubits, layout has {layout.n_rows} rows")
    cap = _width_cap(max_width)
    if layout.width > cap:
        raise ResourceLimitError(f"network is {layout.width} sigma wires wide, cap is {cap}")
    pinned = dict(pinned or {})
    probs = site_table(noise, layout.n_rows)
    f_idx = f_L.indices
    G = layout.n_generators
    sym = oe.get_symbol

    terms: list[str] = []
    operands: list[np.ndarray] = []
    log_scale = 0.0
    for j in range(layout.n_rows):
        acting = layout.row_generators[j]
        # horizontal wire segment s runs between check s-1 and check s
        h = [(sym(G + 2 * s), sym(G + 2 * s + 1)) for s in range(len(acting) + 1)]
        row_terms = ["".join(h[0])]
        row_ops = [left_terminator()]
        for s, g in enumerate(acting):
            diag = np.einsum("abcdss->abcds", check_tensor(SYMBOLS[int(layout.indices[g, j])]))
            row_terms.append("".join(h[s + 1]) + "".join(h[s]) + sym(g))
            row_ops.append(diag)
        row_terms.append("".join(h[-1]))
        row_ops.append(probability_tensor(probs[j], f_idx[j]))
        out = "".join(sym(g) for g in sorted(acting))
        row = np.asarray(oe.contract(",".join(row_terms) + "->" + out, *row_ops))
        m = float(row.max())
        if m == 0.0:
            return -math.inf
        log_scale += math.log(m)
        if out:
            terms.append(out)
            operands.append(row / m)
    for g in range(G):
        terms.append(sym(g))
        operands.append(np.ones(2) if g not in pinned else np.eye(2)[int(pinned[g])])
    if not operands:
        return log_scale
    value = float(oe.contract(",".join(terms) + "->", *operands, optimize="greedy"))
    return log_scale + math.log(value) if value > 0 else -math.inf


# --------------------------------------------------------------------------- #
# 5.  Tanner-graph chain
# --------------------------------------------------------------------------- #
def contract_tanner_chain(code: StabilizerCode, f_L: PauliString, noise,
                          extra_generators: Sequence[PauliString] = (),
                          max_width: Optional[int] = None) -> float:
    """log p(f_L G') from a chain of per-qubit transfer matrices.

    Every check is a delta tensor tying the sigma copies on the qubits it
    touches.  Splitting each delta along the chain leaves, between qubits j
    and j+1, a bond made of the checks whose support straddles that cut.
    Qubit j becomes a matrix from the bond on its left to the bond on its
    right: the site factor A^(j)[sigma] summed over checks living only on j
    and diagonal in the checks that cross j.  The bit width of the largest
    matrix (left plus right bond) is capped by *max_width*.
    """
    if f_L.n != code.n_phys:
        raise DimensionError(f"f_L acts on {f_L.n} qubits, code has {code.n_phys}")
    gens = list(code.checks) + list(extra_generators)
    n = code.n_phys
    probs = site_table(noise, n)
    cap = _width_cap(max_width)
    if gens:
        xs, zs = stack(gens, n)
    else:
        xs = zs = np.zeros((0, n), np.uint8)
    idx = (xs | (zs << 1)).astype(np.uint8)
    spans = []
    for g, p in enumerate(gens):
        if p.is_identity():
            raise ValueError(f"generator {g} is the identity")
        spans.append(p.support_interval())
    f_idx = f_L.indices

    vec = np.ones(1, dtype=np.float64)
    left: list[int] = []
    log_scale = 0.0
    for j in range(n):
        right = [g for g, (a, b) in enumerate(spans) if a <= j < b]
        local = [g for g, (a, b) in enumerate(spans) if a == b == j]
        if len(left) + len(right) > cap:
            raise ResourceLimitError(
                f"chain matrix at qubit {j} spans {len(left) + len(right)} bond bits, cap is {cap}")
        union = sorted(set(left) | set(right) | set(local))
        if 2 * len(union) > _EINSUM_LABELS:
            raise ResourceLimitError(f"chain site {j} touches too many checks ({len(union)})")

        # A^(j) over every sigma in the union
        ndim = len(union)
        h = np.uint8(f_idx[j])
        for ax, g in enumerate(union):
            if idx[g, j]:
                shape = [1] * ndim
                shape[ax] = 2
                h = h ^ (np.arange(2, dtype=np.uint8).reshape(shape) * idx[g, j])
        a_site = np.broadcast_to(probs[j][h], (2,) * ndim)

        # labels: g for the left copy, ndim + position for a right copy of a crossing check
        label = {g: ax for ax, g in enumerate(union)}
        right_label = {g: (ndim + ax if g in left else label[g]) for ax, g in enumerate(union)}
        ops = [a_site, [label[g] for g in union]]
        for g in right:
            if g in left:
                ops += [np.eye(2), [label[g], right_label[g]]]
        out = [label[g] for g in left] + [right_label[g] for g in right]
        mat = np.einsum(*ops, out).reshape(2 ** len(left), 2 ** len(right))

        vec = vec @ mat
        m = float(vec.max())
        if m == 0.0:
            return -math.inf
        vec = vec / m
        log_scale += math.log(m)
        left = right
    return log_scale + math.log(float(vec.sum()))


# --------------------------------------------------------------------------- #
# 6.  Marginal ML decoding
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class DecodeResult:
    pure_error: PauliString
    classes: np.ndarray           # (k,) class index per logical, I=0 X=1 Z=2 Y=3
    log_probs: np.ndarray         # (k, 4) natural-log coset probabilities
    correction: PauliString
    backend: str = "grid"
    max_width: int = 0

    def class_symbols(self) -> list[str]:
        return [SYMBOLS[int(c)] for c in self.classes]

    def marginals(self) -> np.ndarray:
        """Per-logical class probabilities normalised to sum to one."""
        lp = np.asarray(self.log_probs, dtype=np.float64)
        top = lp.max(axis=1, keepdims=True)
        safe = np.where(np.isfinite(top), top, 0.0)
        w = np.exp(lp - safe)
        tot = w.sum(axis=1, keepdims=True)
        return np.divide(w, tot, out=np.zeros_like(w), where=tot > 0)

    def to_json(self) -> dict:
        return {
            "correction": self.correction.to_text(),
            "classes": self.class_symbols(),
            "log_probs": [[float(v) for v in row] for row in self.log_probs],
        }


def logical_operator(code: StabilizerCode, j: int, cls: int) -> PauliString:
    """Encoded logical Pauli of class *cls* (I, X, Z, Y) on logical qubit j."""
    out = PauliString.identity(code.n_phys)
    if cls & 1:
        out = out * code.logical_x[j]
    if cls & 2:
        out = out * code.logical_z[j]
    return out


class Decoder:
    """Marginal per-logical ML decoder over a fixed code and noise model.

    ``backend`` is ``grid`` (row sweep, optional prefix cache), ``explicit``
    (whole network through opt_einsum), ``chain`` (Tanner transfer matrices)
    or ``brute`` (exhaustive enumeration).
    """

    def __init__(self, code: StabilizerCode, noise, backend: str = "grid", *,
                 use_cache: bool = True, approximate: bool = False, max_width: Optional[int] = None):
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
        if approximate:
            raise NotImplementedError(
                "approximate boundary contraction is not available; only exact contraction is offered")
        self.code = code
        self.noise = noise
        self.backend = backend
        self.use_cache = use_cache
        self.max_width = max_width
        self._layouts: dict[int, TNLayout] = {}

    def _layout(self, j: int) -> TNLayout:
        if j not in self._layouts:
            gens = list(self.code.checks) + self.code.logical_generators(exclude=j)
            self._layouts[j] = build_layout(gens, self.code.n_phys)
        return self._layouts[j]

    def _class_log_probs(self, j: int, f: PauliString) -> tuple[np.ndarray, int]:
        reps = [f * logical_operator(self.code, j, a) for a in range(4)]
        if self.backend == "brute":
            extra = self.code.logical_generators(exclude=j)
            vals = [brute_coset_probability(self.code, r, self.noise, extra) for r in reps]
            return np.array([math.log(v) if v > 0 else -math.inf for v in vals]), 0
        if self.backend == "chain":
            extra = self.code.logical_generators(exclude=j)
            cap = _width_cap(self.max_width)
            vals = [contract_tanner_chain(self.code, r, self.noise, extra, cap) for r in reps]
            return np.array(vals), 0
        if self.backend == "explicit":
            layout = self._layout(j)
            vals = [contract_explicit(layout, r, self.noise, max_width=self.max_width) for r in reps]
            return np.array(vals), layout.width

        contractor = GridContractor(self._layout(j), self.noise, self.max_width)
        n = self.code.n_phys
        if self.use_cache:
            lx, lz = self.code.logical_pair(j)
            first = int(np.flatnonzero(lx.x | lx.z | lz.x | lz.z)[0])
            prefix = contractor.advance(contractor.initial(), f.indices, first)
            vals = [contractor.finish(contractor.advance(prefix, r.indices, n)) for r in reps]
        else:
            vals = [contractor.log_value(r) for r in reps]
        return np.array(vals), contractor.max_width

    def decode(self, s: Syndrome) -> DecodeResult:
        f = pure_error(self.code, s)
        k = self.code.k
        log_probs = np.empty((k, 4), dtype=np.float64)
        width = 0
        for j in range(k):
            log_probs[j], w = self._class_log_probs(j, f)
            width = max(width, w)
        # argmax returns the first maximum, so ties resolve in I < X < Z < Y order
        classes = np.argmax(log_probs, axis=1).astype(np.uint8) if k else np.zeros(0, np.uint8)
        correction = f
        for j, c in enumerate(classes):
            correction = correction * logical_operator(self.code, j, int(c))
        verbo(f"[decoder] {self.backend}: k={k}, classes={''.join(SYMBOLS[c] for c in classes)}, width={width}")
        return DecodeResult(f, classes, log_probs, correction, self.backend, width)


def decode_marginal(code: StabilizerCode, s: Syndrome, noise, *, backend: str = "grid",
                    use_cache: bool = True, max_width: Optional[int] = None) -> DecodeResult:
    return Decoder(code, noise, backend, use_cache=use_cache, max_width=max_width).decode(s)
