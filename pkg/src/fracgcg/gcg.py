"""Generalized conditional gradient loop for denoising with an infinite
infimal convolution regularizer.

Each iteration:

1. residual ``p = f - v``;
2. insertion: best extremal atom over ``s`` (closed form in ``v``);
3. stop if ``k >= 1`` and the pairing ``<p, v_new> <= 1`` (up to
   ``stop_tol``) or the atom is already present or was just pruned;
4. nonnegative weight optimisation over old atoms plus the new one;
5. drop atoms whose weight is ``<= prune_tol``.

For the mean-free order family the data mean is split off first and carried
as ``GcgState.offset``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .atoms import Atom, AtomFamily, normalize_to_extremal
from .errors import ConfigInvalid, ZeroResidual
from .insertion import SearchConfig, search_parameter
from .measures import SparseMeasure
from .spectral import Field, forward, inner, project_zero_mean
from .weights import QuadProblem, build_problem, extend_problem, solve_nnls

__all__ = [
    "TerminationReason",
    "SolverConfig",
    "IterRecord",
    "GcgHistory",
    "GcgState",
    "initial_state",
    "step",
    "run",
    "final_dual",
    "approx_residual_series",
    "rate_constant",
    "loglog_slope",
    "energy",
]

log = logging.getLogger(__name__)


class TerminationReason(str, Enum):
    DUAL_BELOW_ONE = "DualBelowOne"
    DUPLICATE_ATOM = "DuplicateAtom"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class SolverConfig:
    alpha: float
    family: AtomFamily
    max_iter: int = 200
    dedup_s_tol: float = 1e-6
    dedup_v_tol: float = 1e-8
    prune_tol: float = 0.0
    search: SearchConfig = field(default_factory=SearchConfig)
    nnls_tol: float = 1e-10
    # roundoff allowance in the stopping test "dual <= 1"
    stop_tol: float = 1e-9
    # "empty", or "cosine" for the 1D cos(3x) start atom
    init: str = "empty"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigInvalid(f"alpha must be positive, got {self.alpha}")
        if self.max_iter < 1:
            raise ConfigInvalid("max_iter must be >= 1")
        if min(self.dedup_s_tol, self.dedup_v_tol, self.prune_tol, self.stop_tol) < 0:
            raise ConfigInvalid("tolerances must be nonnegative")
        if self.init not in ("empty", "cosine"):
            raise ConfigInvalid(f"unknown init {self.init!r}")
        if self.init == "cosine" and not self.family.zero_mean:
            raise ConfigInvalid("cosine init is defined for the 1D order family only")


@dataclass(frozen=True)
class IterRecord:
    k: int
    energy: float
    dual: float
    s_inserted: float | None
    n_atoms: int
    elapsed: float


@dataclass
class GcgHistory:
    records: list[IterRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    @property
    def duals(self) -> np.ndarray:
        return np.array([r.dual for r in self.records])


@dataclass
class GcgState:
    k: int
    atoms: list[Atom]
    weights: np.ndarray
    v: Field
    history: GcgHistory
    offset: float = 0.0
    terminated: TerminationReason | None = None
    problem: QuadProblem | None = field(default=None, repr=False)
    # atoms dropped by the last prune; re-inserting one of them means a stall
    pruned: list[Atom] = field(default_factory=list, repr=False)
    t0: float = field(default_factory=time.perf_counter, repr=False)

    @property
    def measure(self) -> SparseMeasure:
        return SparseMeasure(self.v.grid, tuple(self.weights), tuple(self.atoms))

    def reconstruction(self) -> Field:
        return Field(self.v.grid, self.v.values + self.offset)


def energy(v: Field, f: Field, weights, atoms) -> float:
    """Upper-bound energy ``1/2 ||v - f||^2 + sum c_i alpha J(v_i, s_i)``."""
    r = v - f
    return 0.5 * inner(r, r) + float(sum(c * a.penalty for c, a in zip(weights, atoms)))


def _combine(grid, weights, atoms) -> Field:
    vals = np.zeros(grid.shape)
    for c, a in zip(weights, atoms):
        vals += c * a.as_field.values
    return Field(grid, vals)


def _prepare_data(f: Field, cfg: SolverConfig) -> tuple[Field, float]:
    if f.grid.q != cfg.family.q:
        raise ConfigInvalid(f"{cfg.family.kind.value} needs {cfg.family.q}D data")
    if cfg.family.zero_mean:
        return project_zero_mean(f), f.mean()
    return f, 0.0


def initial_state(f: Field, cfg: SolverConfig, offset: float = 0.0) -> GcgState:
    """Starting iterate for mean-free (if applicable) data ``f``."""
    grid = f.grid
    atoms: list[Atom] = []
    weights = np.zeros(0)
    if cfg.init == "cosine":
        (x,) = grid.points()
        v0 = Field(grid, 3.0 * math.sqrt(2.0 / math.pi) * np.cos(3.0 * x))
        s0 = cfg.family.s_hi
        atoms = [normalize_to_extremal(cfg.family, forward(v0), s0, cfg.alpha)]
        weights = np.ones(1)
    v = _combine(grid, weights, atoms)
    problem = build_problem(atoms, f, cfg.alpha) if atoms else None
    return GcgState(0, atoms, weights, v, GcgHistory(), offset, None, problem)


def _is_duplicate(new: Atom, atoms, cfg: SolverConfig) -> bool:
    for a in atoms:
        if abs(a.s - new.s) > cfg.dedup_s_tol:
            continue
        ref = np.linalg.norm(a.spec.coeffs)
        if np.linalg.norm(new.spec.coeffs - a.spec.coeffs) <= cfg.dedup_v_tol * ref:
            return True
    return False


def _record(state: GcgState, f: Field, dual: float, s_new: float | None) -> None:
    rec = IterRecord(
        k=state.k,
        energy=energy(state.v, f, state.weights, state.atoms),
        dual=dual,
        s_inserted=s_new,
        n_atoms=len(state.atoms),
        elapsed=time.perf_counter() - state.t0,
    )
    state.history.records.append(rec)
    log.debug(
        "gcg iteration",
        extra={"iteration": rec.k, "energy": rec.energy, "dual": rec.dual,
               "s_inserted": rec.s_inserted, "n_atoms": rec.n_atoms},
    )


def step(state: GcgState, f: Field, cfg: SolverConfig) -> GcgState:
    """One insertion, stopping test, weight optimisation and prune cycle.

    ``f`` must already be mean-free for the order family. The returned state
    has ``terminated`` set when the stopping test fired; its iterate is then
    unchanged.
    """
    p = f - state.v
    try:
        s_new, atom, dual = search_parameter(cfg.family, forward(p), cfg.alpha, cfg.search)
    except ZeroResidual:
        _record(state, f, 0.0, None)
        if state.k >= 1:
            return replace(state, terminated=TerminationReason.DUAL_BELOW_ONE)
        return replace(state, k=state.k + 1)

    if state.k >= 1:
        if dual <= 1.0 + cfg.stop_tol:
            _record(state, f, dual, None)
            return replace(state, terminated=TerminationReason.DUAL_BELOW_ONE)
        if _is_duplicate(atom, state.atoms + state.pruned, cfg):
            _record(state, f, dual, None)
            return replace(state, terminated=TerminationReason.DUPLICATE_ATOM)
    _record(state, f, dual, s_new)

    atoms = state.atoms + [atom]
    if state.problem is None:
        prob = build_problem(atoms, f, cfg.alpha)
    else:
        prob = extend_problem(state.problem, state.atoms, atom, f, cfg.alpha)
    c = solve_nnls(prob, tol=cfg.nnls_tol)

    # weight step must not lose to the previous weights extended by zero
    c_prev = np.r_[state.weights, 0.0]
    if prob.objective(c_prev) < prob.objective(c):
        c = c_prev

    keep = np.flatnonzero(c > cfg.prune_tol)
    pruned = [atoms[i] for i in np.flatnonzero(c <= cfg.prune_tol)]
    atoms = [atoms[i] for i in keep]
    weights = c[keep]
    prob = QuadProblem(prob.gram[np.ix_(keep, keep)], prob.lin[keep], prob.penalty[keep], prob.const) if len(keep) else None
    v = _combine(f.grid, weights, atoms)
    return replace(state, k=state.k + 1, atoms=atoms, weights=weights, v=v, problem=prob, pruned=pruned)


def final_dual(state: GcgState, f: Field, cfg: SolverConfig) -> float:
    """Largest pairing of the current residual with an extremal atom."""
    try:
        return search_parameter(cfg.family, forward(f - state.v), cfg.alpha, cfg.search)[2]
    except ZeroResidual:
        return 0.0


def run(f: Field, cfg: SolverConfig, callback=None) -> tuple[GcgState, TerminationReason]:
    """Solve the denoising problem for data ``f``.

    ``callback(state)`` is invoked after every completed iteration.
    """
    data, offset = _prepare_data(f, cfg)
    state = initial_state(data, cfg, offset)
    while state.k < cfg.max_iter:
        state = step(state, data, cfg)
        if state.terminated is not None:
            return state, state.terminated
        if callback is not None:
            callback(state)
    _record(state, data, final_dual(state, data, cfg), None)
    state.terminated = TerminationReason.MAX_ITER
    return state, TerminationReason.MAX_ITER


def approx_residual_series(history: GcgHistory, e_final: float | None = None) -> np.ndarray:
    """``r_k = E_k - E_final`` with the last recorded energy as default surrogate minimum."""
    e = history.energies
    if e.size == 0:
        raise ValueError("empty history")
    if e_final is None:
        e_final = e[-1]
    return e - e_final


def rate_constant(rhat, k_min: int = 1) -> float:
    """Empirical ``C`` in ``r_k <= C / (k + 1)``: ``max_{k >= k_min} r_k (k + 1)``."""
    rhat = np.asarray(rhat, dtype=float)
    if rhat.size <= k_min:
        return 0.0
    k = np.arange(rhat.size, dtype=float)
    return float(np.max(rhat[k_min:] * (k[k_min:] + 1.0)))


def loglog_slope(rhat, floor: float = 1e-12) -> float:
    """Least-squares slope of ``log r_k`` against ``log(k + 1)`` over positive entries."""
    rhat = np.asarray(rhat, dtype=float)
    k = np.arange(rhat.size) + 1.0
    ok = rhat > floor
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(k[ok]), np.log(rhat[ok]), 1)[0])
