"""Dense primal simplex for the cutting-plane master problem of the robustness solver.

The master problem over the diagonal witness D is

    min  sum_i D_i   s.t.  a_k . D >= b_k   for every cut k,

with a_k = |v_k|^2 (entrywise) and b_k = <v_k|rho|v_k>. We run the simplex on
its dual,

    max  b . y   s.t.  sum_k y_k a_k = 1,  y >= 0,

which is in standard form. The standard-basis cuts give the identity basis,
so y = 1 on them is feasible from the start, and new cuts are new columns:
the current basis stays feasible and the solve warm-starts.
"""

from __future__ import annotations

import numpy as np

from .core import ConvergenceError

_REDUCED_COST_TOL = 1e-13
_PIVOT_TOL = 1e-12


class CutPool:
    def __init__(self, diag: np.ndarray, max_nonbasic: int):
        d = diag.size
        self.d = d
        self.max_nonbasic = max_nonbasic
        self.A = np.eye(d)
        self.b = np.asarray(diag, dtype=float).copy()
        self.vecs = np.eye(d, dtype=complex)
        self.basis = list(range(d))
        self.pivots = 0

    def add(self, vecs: np.ndarray, rhs: np.ndarray) -> None:
        """Append cuts given as columns of ``vecs`` with right-hand sides ``rhs``."""
        self.A = np.hstack([self.A, np.abs(vecs) ** 2])
        self.b = np.concatenate([self.b, rhs])
        self.vecs = np.hstack([self.vecs, vecs])
        self._prune()

    def _prune(self) -> None:
        m = self.A.shape[1]
        if m - self.d <= self.max_nonbasic:
            return
        in_basis = np.zeros(m, dtype=bool)
        in_basis[self.basis] = True
        nonbasic = np.flatnonzero(~in_basis)
        keep = np.sort(np.concatenate([np.flatnonzero(in_basis), nonbasic[-self.max_nonbasic :]]))
        remap = -np.ones(m, dtype=int)
        remap[keep] = np.arange(keep.size)
        self.A, self.b, self.vecs = self.A[:, keep], self.b[keep], self.vecs[:, keep]
        self.basis = [int(remap[k]) for k in self.basis]

    def solve(self, max_pivots: int = 100000):
        """Optimize over the current cuts.

        Returns ``(D, y)``: the primal diagonal witness (simplex prices) and the
        basic dual weights, aligned with ``self.basis``.
        """
        ones = np.ones(self.d)
        stall = 0
        last = -np.inf
        for _ in range(max_pivots):
            B = self.A[:, self.basis]
            D = np.linalg.solve(B.T, self.b[self.basis])
            y = np.clip(np.linalg.solve(B, ones), 0.0, None)
            value = float(self.b[self.basis] @ y)
            stall = stall + 1 if value <= last + 1e-15 else 0
            last = max(last, value)
            reduced = self.b - D @ self.A
            reduced[self.basis] = 0.0
            bland = stall > 2 * self.d
            if bland:
                candidates = np.flatnonzero(reduced > _REDUCED_COST_TOL)
                if candidates.size == 0:
                    return D, y
                k = int(candidates[0])
            else:
                k = int(np.argmax(reduced))
                if reduced[k] <= _REDUCED_COST_TOL:
                    return D, y
            u = np.linalg.solve(B, self.A[:, k])
            pos = u > _PIVOT_TOL
            if not pos.any():
                # Cannot happen: every cut column is a probability vector.
                raise ConvergenceError("master problem reported unbounded")
            ratios = np.full(self.d, np.inf)
            ratios[pos] = y[pos] / u[pos]
            theta = ratios.min()
            ties = np.flatnonzero(ratios <= theta + 1e-15)
            r = int(min(ties, key=lambda t: self.basis[t])) if bland else int(ties[0])
            self.basis[r] = k
            self.pivots += 1
        raise ConvergenceError("simplex pivot cap exceeded")
