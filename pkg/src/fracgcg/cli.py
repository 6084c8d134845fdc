"""Command-line interface.

    fracgcg phantom --experiment denoise2d --n 64 --seed 3 --out runs/grid
    fracgcg denoise --experiment denoise1d --out runs/order
    fracgcg metrics clean.f64 reconstruction.f64 --peak 1

Exit codes: 0 success, 2 usage, 3 solver failure, 4 IO.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .atoms import AtomFamily
from .errors import FracGcgError, NotConverged
from .gcg import SolverConfig, approx_residual_series, loglog_slope, rate_constant, run
from .insertion import SearchConfig
from .io import read_config, read_field, write_field_csv, write_json, write_pgm16, write_raw, write_table
from .measures import collapse_sigma, measure_to_json
from .spectral import Field, Grid, norm
from .testkit import RNG_ALGORITHM, add_gaussian_noise, diagonal_phantom, grid_phantom, psnr, two_mode_signal

log = logging.getLogger("fracgcg")

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    experiment: str = "denoise1d"
    n: int | None = None
    alpha: float | None = None
    eta: float = 2.0
    gamma: float = 0.25
    zeta: float = 1e-3
    omega: float = 1e-3
    noise_std: float | None = None
    seed: int = 0
    max_iter: int = 200
    s_min: float = 1e-3
    phantom: str | None = None
    period: int = 16
    thickness: int = 2
    angle: float = math.pi / 4
    frequency: float = 6.0
    init: str = "empty"
    n_starts: int = 16
    coarse_grid: int = 64
    local_tol: float = 1e-6
    peak: float | None = None
    input: str | None = None
    out: str | None = None

    def __post_init__(self):
        if self.experiment not in ("denoise1d", "denoise2d"):
            raise UsageError(f"unknown experiment {self.experiment!r}")
        one_d = self.experiment == "denoise1d"
        defaults = (
            {"n": 256, "alpha": 1.5e-3, "noise_std": 0.07, "phantom": "twomode"}
            if one_d
            else {"n": 64, "alpha": 5.5, "noise_std": 0.3, "phantom": "grid"}
        )
        for k, v in defaults.items():
            if getattr(self, k) is None:
                setattr(self, k, v)
        if self.phantom not in ("twomode", "grid", "diagonal"):
            raise UsageError(f"unknown phantom {self.phantom!r}")
        if one_d != (self.phantom == "twomode"):
            raise UsageError(f"phantom {self.phantom!r} does not fit {self.experiment}")
        if self.noise_std < 0:
            raise UsageError("noise-std must be nonnegative")

    def grid(self) -> Grid:
        return Grid(1 if self.experiment == "denoise1d" else 2, self.n)

    def family(self) -> AtomFamily:
        if self.experiment == "denoise1d":
            return AtomFamily.adaptive_order(self.eta, s_min=self.s_min)
        return AtomFamily.adaptive_aniso(self.gamma, self.zeta, self.omega)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            alpha=self.alpha,
            family=self.family(),
            max_iter=self.max_iter,
            search=SearchConfig(
                n_starts=self.n_starts,
                coarse_grid=self.coarse_grid,
                local_tol=self.local_tol,
                seed=self.seed,
            ),
            init=self.init,
        )

    def clean(self) -> Field:
        g = self.grid()
        if self.phantom == "twomode":
            return two_mode_signal(g)
        if self.phantom == "grid":
            return grid_phantom(g, self.period, self.thickness)
        return diagonal_phantom(g, self.angle, self.frequency)

    def peak_for(self, clean: Field) -> float:
        if self.peak is not None:
            return self.peak
        if self.experiment == "denoise2d":
            return 1.0
        return float(np.ptp(clean.values)) or 1.0


_TYPES = {f.name: f.type for f in fields(RunSpec)}


def _coerce(key: str, value: str):
    t = _TYPES[key]
    if "int" in t:
        return int(value)
    if "float" in t:
        return float(value)
    return value


def _runspec(args) -> RunSpec:
    merged: dict = {}
    if args.config:
        for k, v in read_config(args.config).items():
            if k not in _TYPES:
                raise UsageError(f"unknown config key {k!r}")
            try:
                merged[k] = _coerce(k, v)
            except ValueError as exc:
                raise UsageError(f"bad value for {k}: {v!r}") from exc
    for k in _TYPES:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    spec = RunSpec(**merged)
    if not spec.out:
        raise UsageError("--out DIR is required")
    return spec


def _write_field(out: Path, stem: str, v: Field) -> None:
    if v.grid.q == 1:
        write_field_csv(out / f"{stem}.csv", v)
    else:
        write_pgm16(out / f"{stem}.pgm", v)
        write_raw(out / f"{stem}.f64", v)


def _data(spec: RunSpec):
    clean = spec.clean()
    noisy = add_gaussian_noise(clean, spec.noise_std, spec.seed)
    return clean, noisy


def cmd_phantom(args) -> int:
    spec = _runspec(args)
    clean, noisy = _data(spec)
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_field(out, "clean", clean)
    _write_field(out, "noisy", noisy)
    write_json(out / "phantom.json", {"runspec": asdict(spec), "rng": RNG_ALGORITHM})
    print(json.dumps({"out": str(out), "psnr_noisy_db": psnr(clean, noisy, spec.peak_for(clean))}))
    return EXIT_OK


def cmd_denoise(args) -> int:
    spec = _runspec(args)
    out = Path(spec.out)
    if spec.input:
        try:
            noisy = read_field(spec.input)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if noisy.grid.q != spec.grid().q:
            raise UsageError(f"{spec.input} is {noisy.grid.q}D but {spec.experiment} needs {spec.grid().q}D")
        spec.n = noisy.grid.n
        clean = None
    else:
        clean, noisy = _data(spec)
    cfg = spec.solver_config()
    out.mkdir(parents=True, exist_ok=True)

    state, reason = run(noisy, cfg)
    recon = state.reconstruction()
    rhat = approx_residual_series(state.history)
    sigma = collapse_sigma(state.measure, cfg.dedup_s_tol)

    if clean is not None:
        _write_field(out, "clean", clean)
    _write_field(out, "noisy", noisy)
    _write_field(out, "reconstruction", recon)
    write_table(out / "sigma.csv", ["s", "mass"], sigma.rows())
    write_table(
        out / "residual.csv",
        ["k", "E_k", "rhat_k", "dual"],
        ((r.k, r.energy, float(rh), r.dual) for r, rh in zip(state.history.records, rhat)),
    )
    (out / "measure.json").write_text(measure_to_json(state.measure) + "\n")

    report = {
        "termination": reason.value,
        "iterations": state.k,
        "n_atoms": len(state.atoms),
        "support_size": len(sigma),
        "final_dual": float(state.history.records[-1].dual),
        "final_energy": float(state.history.records[-1].energy),
        "rate_constant": rate_constant(rhat),
        "rate_reference": float(2.0 * rhat[1]) if rhat.size > 1 else 0.0,
        "loglog_slope": loglog_slope(rhat[:-1]) if rhat.size > 2 else None,
        "data_mean": state.offset,
    }
    if clean is not None:
        peak = spec.peak_for(clean)
        report["peak"] = peak
        report["psnr_noisy_db"] = psnr(clean, noisy, peak)
        report["psnr_reconstruction_db"] = psnr(clean, recon, peak)
    write_json(
        out / "manifest.json",
        {
            "version": __version__,
            "kernel_backend": kernels.BACKEND,
            "rng": RNG_ALGORITHM,
            "runspec": asdict(spec),
            "solver": {
                "alpha": cfg.alpha,
                "family": cfg.family.params(),
                "max_iter": cfg.max_iter,
                "dedup_s_tol": cfg.dedup_s_tol,
                "dedup_v_tol": cfg.dedup_v_tol,
                "prune_tol": cfg.prune_tol,
                "nnls_tol": cfg.nnls_tol,
                "init": cfg.init,
                "search": asdict(cfg.search),
            },
            "result": report,
        },
    )
    print(json.dumps(report))
    return EXIT_OK


def cmd_metrics(args) -> int:
    try:
        ref = read_field(args.reference)
        test = read_field(args.test)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    diff = Field(ref.grid, ref.values - test.values) if ref.grid == test.grid else None
    if diff is None:
        raise UsageError(f"grid mismatch: {ref.grid} vs {test.grid}")
    peak = args.peak if args.peak is not None else 1.0
    print(json.dumps({"psnr_db": psnr(ref, test, peak), "l2_error": norm(diff), "peak": peak}, sort_keys=True))
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--experiment", choices=["denoise1d", "denoise2d"])
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--noise-std", dest="noise_std", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--s-min", dest="s_min", type=float)
    p.add_argument("--phantom", choices=["twomode", "grid", "diagonal"])
    p.add_argument("--period", type=int)
    p.add_argument("--thickness", type=int)
    p.add_argument("--angle", type=float)
    p.add_argument("--frequency", type=float)
    p.add_argument("--init", choices=["empty", "cosine"])
    p.add_argument("--peak", type=float)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--config", metavar="FILE", help="key=value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracgcg", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="write clean and noisy test data")
    _add_run_flags(p)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("denoise", help="run the solver")
    _add_run_flags(p)
    p.add_argument("--input", metavar="FILE", help="noisy data (.csv for 1D, .f64 for 2D)")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("metrics", help="PSNR and L2 error between two fields")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--peak", type=float)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        rc = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"fracgcg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fracgcg: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NotConverged, FracGcgError) as exc:
        print(f"fracgcg: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return rc


if __name__ == "__main__":
    sys.exit(main())
