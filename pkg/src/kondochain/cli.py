"""Command-line entry point, configuration handling and CSV persistence.

One subcommand per experiment; flags mirror the config keys and override
values read from a flat ``key = value`` config file.  Every run directory
receives a ``config.json`` sidecar sufficient to reproduce the run, and
identical config + seed reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, experiments
from .basis import ChainSpec, MAX_SITES
from .eigensolver import DEFAULT_SEED, EigensolverError, ground_state
from .evolution import PropagationError, run_quench
from .hamiltonian import sector_hamiltonian
from .measures import impurity_block_negativity

EXPERIMENTS = (
    "ground", "ehl", "scaling", "quench", "scan",
    "double-quench", "interference", "thermal", "ansatz",
)

OUTDIR_ENV = "KONDOCHAIN_OUTDIR"

NUMERIC_FAILURES = (EigensolverError, PropagationError, np.linalg.LinAlgError)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class RunConfig:
    experiment: str
    n: int
    j1: float = 1.0
    j2: float = 0.0
    jp: float = 0.5
    jp_grid: tuple = ()
    t_max: float | None = None
    dt: float | None = None
    beta_grid: tuple = ()
    epsilon: float = 0.1
    k: int = 20
    final_variant: str = "end_quenched"
    seed: int = DEFAULT_SEED
    threshold: float = experiments.EHL_THRESHOLD
    lanczos_tol: float = 1e-10
    krylov_tol: float = 1e-12
    outdir: str = "kondochain_out"
    format: str = "csv"


_DEFAULT_JP_GRID = tuple(round(0.10 + 0.05 * i, 10) for i in range(17))
_DEFAULT_BETA_GRID = tuple(float(b) for b in np.round(1.0 / np.logspace(-4, 0, 13), 12))


def parse_grid(text: str, key: str) -> tuple:
    """Comma list ('0.3,0.4') or inclusive range ('0.1:0.9:0.05')."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step))
            vals = [round(start + i * step, 12) for i in range(count + 1)]
            return tuple(v for v in vals if v <= stop + 1e-12)
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot parse grid {text!r}") from None


_CONVERTERS = {
    "experiment": str,
    "n": int,
    "j1": float,
    "j2": float,
    "jp": float,
    "jp_grid": lambda s: parse_grid(s, "jp_grid"),
    "t_max": float,
    "dt": float,
    "beta_grid": lambda s: parse_grid(s, "beta_grid"),
    "epsilon": float,
    "k": int,
    "final_variant": str,
    "seed": int,
    "threshold": float,
    "lanczos_tol": float,
    "krylov_tol": float,
    "outdir": str,
    "format": str,
}


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment line."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        values[key] = val.strip()
    return values


def parse_config(experiment: str, file: str | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Merge defaults, config file and flag overrides; validate everything."""
    raw: dict = {}
    if file is not None:
        raw.update(read_config_file(file))
    for key, val in (overrides or {}).items():
        if val is not None:
            raw[key] = val
    raw["experiment"] = experiment

    kwargs = {}
    for key, val in raw.items():
        conv = _CONVERTERS.get(key)
        if conv is None:
            raise ConfigError(f"unknown key {key!r}")
        if isinstance(val, str):
            try:
                val = conv(val)
            except ConfigError:
                raise
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: cannot convert {val!r}") from None
        kwargs[key] = val
    if "n" not in kwargs:
        raise ConfigError("n: required (chain length)")
    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment: unknown {cfg.experiment!r}")
    if cfg.n % 2 != 0:
        raise ConfigError(f"n: must be even, got {cfg.n}")
    if not 4 <= cfg.n <= MAX_SITES:
        raise ConfigError(f"n: must be in [4, {MAX_SITES}], got {cfg.n}")
    if cfg.j1 <= 0:
        raise ConfigError(f"j1: must be positive, got {cfg.j1}")
    if cfg.j2 < 0:
        raise ConfigError(f"j2: must be nonnegative, got {cfg.j2}")
    if not 0 < cfg.jp <= 1:
        raise ConfigError(f"jp: must be in (0, 1], got {cfg.jp}")
    for v in cfg.jp_grid:
        if not 0 < v <= 1:
            raise ConfigError(f"jp_grid: values must be in (0, 1], got {v}")
    if cfg.t_max is not None and cfg.t_max <= 0:
        raise ConfigError(f"t_max: must be positive, got {cfg.t_max}")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError(f"dt: must be positive, got {cfg.dt}")
    for b in cfg.beta_grid:
        if b < 0:
            raise ConfigError(f"beta_grid: values must be nonnegative, got {b}")
    if cfg.epsilon <= 0:
        raise ConfigError(f"epsilon: must be positive, got {cfg.epsilon}")
    if not 1 <= cfg.k <= 40:
        raise ConfigError(f"k: must be in [1, 40], got {cfg.k}")
    if cfg.final_variant not in ("end_quenched", "double_quenched"):
        raise ConfigError(f"final_variant: must be end_quenched or double_quenched")
    if not 0 < cfg.threshold < 1:
        raise ConfigError(f"threshold: must be in (0, 1), got {cfg.threshold}")
    if cfg.seed < 0:
        raise ConfigError(f"seed: must be nonnegative, got {cfg.seed}")
    if cfg.lanczos_tol <= 0 or cfg.krylov_tol <= 0:
        raise ConfigError("lanczos_tol/krylov_tol: must be positive")
    if cfg.format != "csv":
        raise ConfigError(f"format: only 'csv' is supported, got {cfg.format!r}")
    if cfg.experiment == "thermal":
        if cfg.n > 12:
            raise ConfigError(f"n: thermal runs need full spectra, capped at 12 (got {cfg.n})")
        if cfg.epsilon / math.sqrt(cfg.n) > 1:
            raise ConfigError("epsilon: static coupling epsilon/sqrt(n) exceeds 1")
    if cfg.experiment == "interference" and cfg.n > 16:
        raise ConfigError(f"n: interference analysis capped at 16 (got {cfg.n})")


# --------------------------------------------------------------------------
# persistence


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header: dict, columns: list, rows) -> Path:
    lines = [f"# {key} = {_fmt(val)}" for key, val in header.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> tuple[dict, list, list]:
    """Inverse of write_csv: (header, columns, rows-as-floats-or-strings)."""
    header: dict = {}
    columns: list = []
    rows: list = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            header[key.strip()] = val.strip()
        elif not columns:
            columns = line.split(",")
        elif line:
            rows.append([_maybe_float(v) for v in line.split(",")])
    return header, columns, rows


def _maybe_float(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def _provenance(cfg: RunConfig) -> dict:
    return {
        "version": __version__,
        "seed": cfg.seed,
        "lanczos_tol": cfg.lanczos_tol,
        "krylov_tol": cfg.krylov_tol,
    }


def write_config(cfg: RunConfig, outdir: Path) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    payload = asdict(cfg)
    payload["version"] = __version__
    path = outdir / "config.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


# --------------------------------------------------------------------------
# experiment runners


def _spec(cfg: RunConfig, variant: str = "initial", jp: float | None = None) -> ChainSpec:
    return ChainSpec(cfg.n, j1=cfg.j1, j2=cfg.j2,
                     j_prime=cfg.jp if jp is None else jp, variant=variant)


def _run_ground(cfg: RunConfig, outdir: Path) -> list:
    spec = _spec(cfg)
    h = sector_hamiltonian(spec)
    pair = ground_state(h, seed=cfg.seed)
    neg0 = impurity_block_negativity(pair.state(h.basis), spec, 0).value
    header = {"experiment": "ground", "n": cfg.n, "j1": cfg.j1, "j2": cfg.j2,
              "jp": cfg.jp, **_provenance(cfg)}
    return [write_csv(outdir / "ground.csv", header,
                      ["n", "j2", "jp", "energy", "negativity_l0"],
                      [[cfg.n, cfg.j2, cfg.jp, pair.value, neg0]])]


def _run_ehl(cfg: RunConfig, outdir: Path) -> list:
    result = experiments.ehl_curve(_spec(cfg), threshold=cfg.threshold, seed=cfg.seed)
    header = {"experiment": "ehl", "n": cfg.n, "j1": cfg.j1, "j2": cfg.j2,
              "jp": cfg.jp, "threshold": cfg.threshold, "l_star": result.l_star,
              "saturated": result.saturated, **_provenance(cfg)}
    rows = [[int(L), E] for L, E in zip(result.lengths, result.negativities)]
    return [write_csv(outdir / "ehl.csv", header, ["L", "negativity"], rows)]


def _run_scaling(cfg: RunConfig, outdir: Path) -> list:
    grid = cfg.jp_grid or _DEFAULT_JP_GRID
    results = [experiments.ehl_curve(_spec(cfg, jp=jp), threshold=cfg.threshold,
                                     seed=cfg.seed) for jp in grid]
    header = {"experiment": "scaling", "n": cfg.n, "j1": cfg.j1, "j2": cfg.j2,
              "threshold": cfg.threshold, **_provenance(cfg)}
    try:
        fit = experiments.ehl_scaling_fit(results)
        header.update(alpha=fit.alpha, intercept=fit.intercept, r_squared=fit.r_squared)
    except ValueError as exc:
        header.update(fit_error=str(exc))
    for r in results:
        header[f"l_star_{r.spec.j_prime:g}"] = r.l_star
    rows = []
    for r in results:
        for L, E in zip(r.lengths, r.negativities):
            rows.append([cfg.n, r.spec.j_prime, L / cfg.n, E])
    return [write_csv(outdir / "scaling.csv", header,
                      ["n", "jp", "l_over_n", "negativity"], rows)]


def _run_quench(cfg: RunConfig, outdir: Path) -> list:
    traj = run_quench(_spec(cfg), t_max=cfg.t_max, dt=cfg.dt,
                      final_variant=cfg.final_variant, seed=cfg.seed,
                      tol=cfg.krylov_tol)
    header = {"experiment": "quench", "n": cfg.n, "j1": cfg.j1, "j2": cfg.j2,
              "jp": cfg.jp, "variant": cfg.final_variant,
              "t_max": traj.times[-1], "dt": traj.times[1] - traj.times[0],
              "norm_drift": traj.diagnostics["norm_drift"],
              "energy_drift_rel": traj.diagnostics["energy_drift_rel"],
              **_provenance(cfg)}
    rows = list(zip(traj.times, traj.concurrences))
    return [write_csv(outdir / "trajectory.csv", header, ["t", "concurrence"], rows)]


def _run_scan(cfg: RunConfig, outdir: Path, final_variant: str) -> list:
    grid = cfg.jp_grid or _DEFAULT_JP_GRID
    scan = experiments.quench_scan(cfg.n, cfg.j2, grid, t_max=cfg.t_max, dt=cfg.dt,
                                   final_variant=final_variant, j1=cfg.j1,
                                   seed=cfg.seed, tol=cfg.krylov_tol)
    name = "scan" if final_variant == "end_quenched" else "double-quench"
    files = []
    for traj in scan.trajectories:
        jp = traj.spec_initial.j_prime
        header = {"experiment": name, "n": cfg.n, "j2": cfg.j2, "jp": jp,
                  "variant": final_variant, **_provenance(cfg)}
        files.append(write_csv(outdir / "trajectories" / f"jp_{jp:g}.csv", header,
                               ["t", "concurrence"],
                               list(zip(traj.times, traj.concurrences))))
    header = {"experiment": name, "n": cfg.n, "j2": cfg.j2,
              "variant": final_variant, "e_m": scan.e_m, "t_opt": scan.t_opt,
              "jp_opt": scan.j_prime_opt, **_provenance(cfg)}
    rows = [[cfg.n, cfg.j2, s.j_prime, s.e_m, s.t_opt] for s in scan.summaries]
    files.append(write_csv(outdir / "scan_summary.csv", header,
                           ["n", "j2", "jp", "e_m", "t_opt"], rows))
    return files


def _run_interference(cfg: RunConfig, outdir: Path) -> list:
    report = experiments.interference_analysis(_spec(cfg), k=cfg.k, seed=cfg.seed)
    header = {"experiment": "interference", "n": cfg.n, "j2": cfg.j2, "jp": cfg.jp,
              "delta_e": report.delta_e, "condition_ratio": report.condition_ratio,
              "t_predicted": report.t_predicted, "top2_mass": report.top2_mass,
              "dominant_low": report.dominant[0], "dominant_high": report.dominant[1],
              "residual": report.residual, "dominance_ok": report.dominance_ok,
              **_provenance(cfg)}
    rows = [[i, report.energies[i], report.overlaps[i],
             report.singlet_norms[i], report.triplet_rms[i]]
            for i in range(len(report.energies))]
    return [write_csv(outdir / "interference.csv", header,
                      ["k", "energy", "overlap", "alpha", "beta"], rows)]


def _run_thermal(cfg: RunConfig, outdir: Path) -> list:
    betas = cfg.beta_grid or _DEFAULT_BETA_GRID
    dynamic = _spec(cfg)
    static = experiments.static_weak_coupling_spec(cfg.n, cfg.j2, epsilon=cfg.epsilon,
                                                   j1=cfg.j1)
    table = experiments.thermal_comparison(dynamic, static, betas, seed=cfg.seed)
    header = {"experiment": "thermal", "n": cfg.n, "j2": cfg.j2, "jp": cfg.jp,
              "epsilon": cfg.epsilon, "jp_static": static.j_prime,
              "zero_t_dynamic": table.zero_t_dynamic,
              "zero_t_static": table.zero_t_static,
              "half_temperature_dynamic": table.half_temperature_dynamic,
              "half_temperature_static": table.half_temperature_static,
              "window_end": table.window_end, **_provenance(cfg)}
    rows = list(zip(table.betas, table.e_m_dynamic, table.c_static))
    return [write_csv(outdir / "thermal.csv", header,
                      ["beta", "e_m_dynamic", "c_static"], rows)]


def _run_ansatz(cfg: RunConfig, outdir: Path) -> list:
    spec = _spec(cfg)
    curve = experiments.ehl_curve(spec, threshold=cfg.threshold, seed=cfg.seed)
    h = sector_hamiltonian(spec)
    gs = ground_state(h, seed=cfg.seed).state(h.basis)
    report = experiments.ansatz_check(gs, spec, curve.l_star, threshold=cfg.threshold)
    header = {"experiment": "ansatz", "n": cfg.n, "j2": cfg.j2, "jp": cfg.jp,
              "threshold": cfg.threshold, **_provenance(cfg)}
    return [write_csv(outdir / "ansatz.csv", header,
                      ["impurity_purity", "block_entropy", "block_negativity",
                       "l_used", "l_star"],
                      [[report.impurity_purity, report.block_entropy,
                        report.block_negativity, report.l_used, report.l_star]])]


_RUNNERS = {
    "ground": _run_ground,
    "ehl": _run_ehl,
    "scaling": _run_scaling,
    "quench": _run_quench,
    "scan": lambda cfg, out: _run_scan(cfg, out, "end_quenched"),
    "double-quench": lambda cfg, out: _run_scan(cfg, out, "double_quenched"),
    "interference": _run_interference,
    "thermal": _run_thermal,
    "ansatz": _run_ansatz,
}


def emit(cfg: RunConfig) -> list:
    """Run the configured experiment and persist its outputs; returns paths."""
    outdir = Path(cfg.outdir)
    files = [write_config(cfg, outdir)]
    files += _RUNNERS[cfg.experiment](cfg, outdir)
    return files


# --------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kondochain",
        description="Entanglement experiments on Kondo spin chains (exact diagonalization).",
    )
    parser.add_argument("--version", action="version", version=f"kondochain {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--n", type=int, help="chain length (even)")
        p.add_argument("--j1", type=float, help="nearest-neighbor coupling")
        p.add_argument("--j2", type=float, help="next-nearest-neighbor coupling")
        p.add_argument("--jp", type=float, help="impurity coupling J'")
        p.add_argument("--jp-grid", dest="jp_grid", help="J' grid: '0.1:0.9:0.05' or comma list")
        p.add_argument("--t-max", dest="t_max", type=float, help="trajectory length (default 4N)")
        p.add_argument("--dt", type=float, help="sampling step (default t_max/400)")
        p.add_argument("--beta-grid", dest="beta_grid", help="inverse temperatures, comma list")
        p.add_argument("--epsilon", type=float, help="static weak-coupling scale")
        p.add_argument("--k", type=int, help="retained low eigenstates (interference)")
        p.add_argument("--final-variant", dest="final_variant",
                       choices=("end_quenched", "double_quenched"))
        p.add_argument("--seed", type=int, help="deterministic start-vector seed")
        p.add_argument("--threshold", type=float, help="healing-length detection threshold")
        p.add_argument("--lanczos-tol", dest="lanczos_tol", type=float)
        p.add_argument("--krylov-tol", dest="krylov_tol", type=float)
        p.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or ./kondochain_out)")
    return parser


_FLAG_KEYS = ("n", "j1", "j2", "jp", "jp_grid", "t_max", "dt", "beta_grid",
              "epsilon", "k", "final_variant", "seed", "threshold",
              "lanczos_tol", "krylov_tol", "outdir")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {key: getattr(args, key) for key in _FLAG_KEYS}
    if overrides.get("outdir") is None and os.environ.get(OUTDIR_ENV):
        overrides["outdir"] = os.environ[OUTDIR_ENV]
    try:
        cfg = parse_config(args.experiment, file=args.config, overrides=overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        files = emit(cfg)
    except NUMERIC_FAILURES as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


def entrypoint():  # console-script shim
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
