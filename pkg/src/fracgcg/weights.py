"""Nonnegative weight optimisation over a fixed set of atoms.

Minimises the convex quadratic

    Q(c) = 1/2 c^T G c - b^T c + p^T c + const,     c >= 0,

where ``G`` is the Gram matrix of the atom fields, ``b_i = <v_i, f>``,
``p_i = alpha J(v_i, s_i)`` and ``const = 1/2 <f, f>``, so that
``Q(c) = 1/2 ||sum c_i v_i - f||^2 + alpha sum c_i J(v_i, s_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NotConverged
from .spectral import Field, inner

__all__ = ["QuadProblem", "build_problem", "extend_problem", "solve_nnls", "kkt_violation"]


@dataclass(frozen=True, eq=False)
class QuadProblem:
    gram: np.ndarray
    lin: np.ndarray
    penalty: np.ndarray
    const: float = 0.0

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gram, dtype=float))
        n = g.shape[0]
        if g.shape != (n, n):
            raise ValueError(f"gram must be square, got {g.shape}")
        lin = np.asarray(self.lin, dtype=float).reshape(-1)
        pen = np.asarray(self.penalty, dtype=float).reshape(-1)
        if lin.shape != (n,) or pen.shape != (n,):
            raise ValueError("gram, lin and penalty sizes disagree")
        scale = max(np.abs(g).max(initial=0.0), 1.0)
        if np.abs(g - g.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("gram matrix is not symmetric")
        if np.any(np.diag(g) < -1e-12 * scale):
            raise ValueError("gram matrix has a negative diagonal entry")
        object.__setattr__(self, "gram", 0.5 * (g + g.T))
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "penalty", pen)

    @property
    def size(self) -> int:
        return self.lin.shape[0]

    def objective(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(0.5 * c @ self.gram @ c - self.lin @ c + self.penalty @ c + self.const)

    def gradient(self, c) -> np.ndarray:
        return self.gram @ np.asarray(c, dtype=float) - self.lin + self.penalty


def build_problem(atoms, f: Field, alpha: float) -> QuadProblem:
    """Assemble the quadratic weight problem for ``atoms`` and data ``f``."""
    if not atoms:
        raise ValueError("need at least one atom")
    fields = [a.as_field for a in atoms]
    for v in fields:
        if v.grid != f.grid:
            raise GridMismatch(f"atom grid {v.grid} differs from data grid {f.grid}")
    n = len(fields)
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = inner(fields[i], fields[j])
    lin = np.array([inner(v, f) for v in fields])
    pen = np.array([alpha * a.j_value for a in atoms])
    return QuadProblem(gram, lin, pen, 0.5 * inner(f, f))


def extend_problem(prob: QuadProblem, atoms, new_atom, f: Field, alpha: float) -> QuadProblem:
    """``prob`` for ``atoms`` grown by one row/column for ``new_atom``."""
    v = new_atom.as_field
    col = np.array([inner(a.as_field, v) for a in atoms])
    n = prob.size
    gram = np.empty((n + 1, n + 1))
    gram[:n, :n] = prob.gram
    gram[:n, n] = gram[n, :n] = col
    gram[n, n] = inner(v, v)
    return QuadProblem(
        gram,
        np.r_[prob.lin, inner(v, f)],
        np.r_[prob.penalty, alpha * new_atom.j_value],
        prob.const,
    )


def kkt_violation(prob: QuadProblem, c) -> float:
    """Largest violation of ``grad >= 0`` and ``c * grad = 0`` at ``c >= 0``."""
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return 0.0
    g = prob.gradient(c)
    return float(max(np.max(-g, initial=0.0), np.abs(c * g).max(initial=0.0), np.max(-c, initial=0.0)))


def _solve_sub(G, r):
    try:
        return np.linalg.solve(G, r)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-12 * max(np.trace(G) / len(r), 1.0)
    try:
        return np.linalg.solve(G + jitter * np.eye(len(r)), r)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(G, r, rcond=None)[0]


def _lawson_hanson(prob: QuadProblem, tol: float, max_iter: int):
    G = prob.gram
    r = prob.lin - prob.penalty
    n = prob.size
    c = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        grad = G @ c - r
        cand = np.where(~passive, grad, np.inf)
        j = int(np.argmin(cand))
        if cand[j] >= -tol:
            return c, True
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            z = np.zeros(n)
            z[idx] = _solve_sub(G[np.ix_(idx, idx)], r[idx])
            if np.all(z[idx] > 0):
                c = z
                break
            neg = idx[z[idx] <= 0]
            step = np.min(c[neg] / (c[neg] - z[neg]))
            c = c + step * (z - c)
            c[np.abs(c) < 1e-300] = 0.0
            passive &= c > 0
            if not passive.any():
                break
    return c, False


def _projected_gradient(prob: QuadProblem, c0, tol: float, max_iter: int):
    # projected gradient with Barzilai-Borwein steps
    G = prob.gram
    c = np.maximum(c0, 0.0)
    g = prob.gradient(c)
    lip = max(np.linalg.eigvalsh(G).max(), 1e-300)
    step = 1.0 / lip
    best, best_obj = c.copy(), prob.objective(c)
    for _ in range(max_iter):
        c_new = np.maximum(c - step * g, 0.0)
        g_new = prob.gradient(c_new)
        dc, dg = c_new - c, g_new - g
        denom = dc @ dg
        step = (dc @ dc) / denom if denom > 0 else 1.0 / lip
        c, g = c_new, g_new
        obj = prob.objective(c)
        if obj < best_obj:
            best, best_obj = c.copy(), obj
        if kkt_violation(prob, c) <= tol:
            return c, True
    return best, False


def solve_nnls(prob: QuadProblem, tol: float = 1e-10, max_iter: int | None = None) -> np.ndarray:
    """Minimise ``prob`` over the nonnegative orthant.

    Primal active-set (Lawson-Hanson) iterations on the normal equations; if
    those stall, projected gradient with Barzilai-Borwein steps takes over.
    The returned weights satisfy ``kkt_violation <= tol`` scaled by the
    problem's magnitude (roundoff floor).

    Raises
    ------
    NotConverged
        Neither method reached the KKT tolerance within ``max_iter``.
    """
    n = prob.size
    if n == 0:
        return np.zeros(0)
    if max_iter is None:
        max_iter = 3 * n + 10
    scale = max(np.abs(prob.gram).max(), np.abs(prob.lin).max(), np.abs(prob.penalty).max(), 1.0)
    eps_tol = max(tol, 1e3 * np.finfo(float).eps * scale)

    c, ok = _lawson_hanson(prob, eps_tol, max_iter)
    c = np.maximum(c, 0.0)
    if ok and kkt_violation(prob, c) <= eps_tol:
        return c
    c_pg, ok = _projected_gradient(prob, c, eps_tol, 50 * max_iter + 1000)
    if ok:
        return c_pg
    best = c if prob.objective(c) <= prob.objective(c_pg) else c_pg
    raise NotConverged(max_iter, best, kkt_violation(prob, best))
