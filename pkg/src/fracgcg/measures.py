"""Finite atomic measures ``mu = sum_i c_i v_i delta_{s_i}`` and their collapse
to the pair ``(v, sigma)`` with ``v = sum c_i v_i`` and

    sigma = sum_s || sum_{j : s_j = s} c_j v_j || delta_s.

JSON layout (``schema: "fracgcg.measure/1"``)::

    {
      "schema": "fracgcg.measure/1",
      "grid": {"q": 1, "n": 256},
      "family": {"kind": "AdaptiveOrder1D", "s_lo": ..., "s_hi": ..., "eta": ...},
      "alpha": 0.0015,
      "entries": [
        {"s": 0.41, "weight": 0.73, "j_value": 666.6,
         "spectrum": [re_0, im_0, re_1, im_1, ...]},
        ...
      ]
    }

``spectrum`` holds the atom's Fourier coefficients in centred order
(frequencies ``-n/2+1 .. n/2``, row-major over axes for q=2), real and
imaginary parts interleaved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .atoms import Atom, AtomFamily
from .spectral import Field, Grid, Spectrum, inner, norm

__all__ = [
    "SparseMeasure",
    "SigmaSupport",
    "reconstruct",
    "collapse_sigma",
    "tv_norm_upper",
    "lifted_energy",
    "measure_to_json",
    "measure_from_json",
    "sigma_to_json",
]

SCHEMA = "fracgcg.measure/1"


@dataclass(frozen=True)
class SparseMeasure:
    grid: Grid
    weights: tuple[float, ...] = ()
    atoms: tuple[Atom, ...] = field(default=(), repr=False)

    def __post_init__(self):
        w = tuple(float(c) for c in self.weights)
        a = tuple(self.atoms)
        if len(w) != len(a):
            raise ValueError("weights and atoms must have equal length")
        if any(c <= 0 for c in w):
            raise ValueError("measure weights must be positive")
        if any(at.grid != self.grid for at in a):
            raise ValueError("atom grid differs from measure grid")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "atoms", a)

    def __len__(self) -> int:
        return len(self.weights)

    def entries(self):
        return list(zip(self.weights, self.atoms))


@dataclass(frozen=True)
class SigmaSupport:
    """Support points of sigma with their masses, sorted by ``s``."""

    s: tuple[float, ...]
    mass: tuple[float, ...]
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.s)

    def rows(self):
        return list(zip(self.s, self.mass))


def reconstruct(mu: SparseMeasure) -> Field:
    out = np.zeros(mu.grid.shape)
    for c, a in mu.entries():
        out += c * a.as_field.values
    return Field(mu.grid, out)


def collapse_sigma(mu: SparseMeasure, s_cluster_tol: float = 1e-6) -> SigmaSupport:
    """Group atoms whose parameters lie within ``s_cluster_tol`` (single linkage
    on the sorted values) and report each group's mass."""
    if s_cluster_tol < 0:
        raise ValueError("s_cluster_tol must be nonnegative")
    if not len(mu):
        return SigmaSupport((), (), ())
    # ties on s broken by position so grouping ignores entry order
    order = sorted(range(len(mu)), key=lambda i: mu.atoms[i].s)
    groups: list[list[int]] = [[order[0]]]
    for i in order[1:]:
        if mu.atoms[i].s - mu.atoms[groups[-1][-1]].s <= s_cluster_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    s_out, mass, counts = [], [], []
    for g in groups:
        acc = np.zeros(mu.grid.shape)
        for i in sorted(g):
            acc += mu.weights[i] * mu.atoms[i].as_field.values
        ss = np.array([mu.atoms[i].s for i in g])
        # offset from the smallest member so equal values come back exactly
        s_out.append(float(ss.min() + np.mean(ss - ss.min())))
        mass.append(norm(Field(mu.grid, acc)))
        counts.append(len(g))
    return SigmaSupport(tuple(s_out), tuple(mass), tuple(counts))


def tv_norm_upper(mu: SparseMeasure) -> float:
    """``sum c_i ||v_i||``, the total variation of ``mu`` on its atoms."""
    return float(sum(c * norm(a.as_field) for c, a in mu.entries()))


def lifted_energy(mu: SparseMeasure, f: Field) -> float:
    """``1/2 ||reconstruct(mu) - f||^2 + sum c_i alpha J(v_i, s_i)``."""
    r = reconstruct(mu) - f
    return 0.5 * inner(r, r) + float(sum(c * a.penalty for c, a in mu.entries()))


def _interleave(spec: Spectrum) -> list[float]:
    c = spec.centered().ravel()
    out = np.empty(2 * c.size)
    out[0::2] = c.real
    out[1::2] = c.imag
    return out.tolist()


def measure_to_json(mu: SparseMeasure, indent: int | None = None) -> str:
    fam = mu.atoms[0].family if len(mu) else None
    doc = {
        "schema": SCHEMA,
        "grid": {"q": mu.grid.q, "n": mu.grid.n},
        "family": fam.params() if fam else None,
        "alpha": mu.atoms[0].alpha if len(mu) else None,
        "entries": [
            {"s": a.s, "weight": c, "j_value": a.j_value, "spectrum": _interleave(a.spec)}
            for c, a in mu.entries()
        ],
    }
    return json.dumps(doc, indent=indent)


def measure_from_json(text: str) -> SparseMeasure:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported measure schema {doc.get('schema')!r}")
    grid = Grid(doc["grid"]["q"], doc["grid"]["n"])
    if not doc["entries"]:
        return SparseMeasure(grid)
    fam = AtomFamily.from_params(doc["family"])
    alpha = float(doc["alpha"])
    weights, atoms = [], []
    for e in doc["entries"]:
        flat = np.asarray(e["spectrum"], dtype=float)
        centered = (flat[0::2] + 1j * flat[1::2]).reshape(grid.shape)
        spec = Spectrum.from_centered(grid, centered)
        atoms.append(Atom(spec, float(e["s"]), fam, float(e["j_value"]), alpha))
        weights.append(float(e["weight"]))
    return SparseMeasure(grid, tuple(weights), tuple(atoms))


def sigma_to_json(sigma: SigmaSupport) -> str:
    return json.dumps(
        {"support": [{"s": s, "mass": m, "atoms": k} for s, m, k in zip(sigma.s, sigma.mass, sigma.counts)]}
    )
