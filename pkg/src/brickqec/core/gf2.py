"""GF(2) elimination used for pure errors and independence checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from brickqec.errors import InconsistentSyndromeError


def row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int], np.ndarray]:
    """Reduced row-echelon form over GF(2).

    Pivots are taken left to right over the columns.  Returns ``(rref,
    pivot_cols, transform)`` with ``transform @ mat == rref (mod 2)``.
    """
    a = np.array(mat, dtype=np.uint8, copy=True) & 1
    rows, cols = a.shape
    t = np.eye(rows, dtype=np.uint8)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(a[r:, c]) + r
        if hits.size == 0:
            continue
        p = hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
            t[[r, p]] = t[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
            t[others] ^= t[r]
        pivots.append(c)
        r += 1
    return a, pivots, t


def rank(mat: np.ndarray) -> int:
    return len(row_reduce(mat)[1])


@dataclass(frozen=True)
class LinearSolver:
    """Canonical solutions of ``A v = s`` over GF(2) for a fixed A.

    Free variables are set to zero, so the solution is a linear function of
    ``s`` and can be written as ``s @ basis``.
    """

    n_rows: int
    n_cols: int
    basis: np.ndarray          # (rows, cols): canonical solution for each unit vector
    consistent_rows: np.ndarray  # (rows - rank, rows): left null space, must annihilate s

    @classmethod
    def for_matrix(cls, mat: np.ndarray) -> "LinearSolver":
        mat = np.asarray(mat, dtype=np.uint8) & 1
        rows, cols = mat.shape
        rref, pivots, t = row_reduce(mat)
        rk = len(pivots)
        basis = np.zeros((rows, cols), dtype=np.uint8)
        # solution for s: v[pivots[i]] = (t @ s)[i] for i < rank
        for i, c in enumerate(pivots):
            basis[:, c] = t[i]
        basis.setflags(write=False)
        null = t[rk:].copy()
        null.setflags(write=False)
        return cls(rows, cols, basis, null)

    def solve(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.int64) & 1
        if self.consistent_rows.size and ((self.consistent_rows.astype(np.int64) @ s) & 1).any():
            raise InconsistentSyndromeError("syndrome is not in the column space of the check matrix")
        return ((s @ self.basis.astype(np.int64)) & 1).astype(np.uint8)
