"""Command-line front end: run configs, emit CSV results, and execute
figure-reproduction recipes.

Config files are flat key = value text (# comments allowed); unknown
keys are rejected with their line number. All outputs are plain CSV
with a config-hash comment line for provenance; numbers carry 17
significant digits so reruns are bit-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from .bogoliubov import NEX_CUTOFF, evolve_coupled, init_modes
from .core import (KickKind, PhysicalParams, RingGrid,
                   predict_single_mode_resonances, predict_two_mode_resonances)
from .gpe import EvolutionConfig, init_homogeneous
from .scan import SweepSpec, extract_windows, run_sweep

_KNOWN_KEYS = {
    "command", "g", "kbar", "K", "T", "epsilon", "kick_kind",
    "n_kicks", "dt", "l_max", "n_points", "record_stride", "cutoff",
    "engine", "observable", "workers",
    "sweep.param", "sweep.lo", "sweep.hi", "sweep.samples", "sweep.values",
    "predict.mode", "predict.param", "predict.lo", "predict.hi",
    "predict.l_max", "predict.n_max", "predict.pairs", "predict.m_max",
}


class ConfigError(Exception):
    pass


def parse_config(text: str) -> dict:
    """Flat key = value parser; rejects unknown keys with diagnostics."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def _get_float(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}") from None


def _get_int(cfg, key, default=None):
    v = _get_float(cfg, key, default)
    if v != int(v):
        raise ConfigError(f"key {key!r}: expected an integer, got {cfg[key]!r}")
    return int(v)


def build_params(cfg: dict) -> PhysicalParams:
    kind = cfg.get("kick_kind", "single")
    try:
        kick_kind = KickKind(kind)
    except ValueError:
        raise ConfigError(
            f"kick_kind must be 'single' or 'double_pair', got {kind!r}") from None
    try:
        return PhysicalParams(
            g=_get_float(cfg, "g"),
            kick_strength=_get_float(cfg, "K"),
            period=_get_float(cfg, "T"),
            kbar=_get_float(cfg, "kbar", 1.0),
            epsilon=_get_float(cfg, "epsilon", 0.0),
            kick_kind=kick_kind,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: Path, header: str, rows, cfg_hash: str):
    with open(path, "w") as fh:
        fh.write(f"# config-hash: {cfg_hash}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def cmd_simulate(cfg: dict, out_dir: Path, cfg_hash: str) -> int:
    params = build_params(cfg)
    n_points = _get_int(cfg, "n_points", 256)
    l_max = _get_int(cfg, "l_max", 32)
    n_kicks = _get_int(cfg, "n_kicks")
    dt = _get_float(cfg, "dt", params.period / 1000.0)
    stride = _get_int(cfg, "record_stride", 1)
    cutoff = _get_float(cfg, "cutoff", NEX_CUTOFF)
    grid = RingGrid(n_points)
    field = init_homogeneous(grid)
    modes = init_modes(params, grid, l_max)
    config = EvolutionConfig(dt=dt, n_kicks=n_kicks, record_stride=stride)
    series, records = evolve_coupled(field, modes, params, config, cutoff)
    nex_by_kick = dict(zip(series.kicks.tolist(), series.nex.tolist()))
    rows = []
    for rec in records:
        nex = nex_by_kick.get(rec.kick, math.nan)
        flag = int(series.exceeded_cutoff and rec.kick == series.crossing_kick)
        rows.append((rec.kick, rec.time, rec.energy, nex,
                     nex - series.nex_initial, rec.a1_sq, rec.a2_sq, flag))
    _write_csv(out_dir / "timeseries.csv",
               "kick,time,energy,nex,nex_minus_initial,a1_sq,a2_sq,cutoff_flag",
               rows, cfg_hash)
    return 2 if series.exceeded_cutoff else 0


def cmd_scan(cfg: dict, out_dir: Path, cfg_hash: str,
             engine_override: str | None = None, workers: int = 1) -> int:
    params = build_params(cfg)
    engine = engine_override or cfg.get("engine", "full")
    values = None
    if "sweep.values" in cfg:
        values = tuple(float(s) for s in cfg["sweep.values"].split(","))
        lo, hi, n_samples = min(values), max(values), len(values)
    else:
        lo = _get_float(cfg, "sweep.lo")
        hi = _get_float(cfg, "sweep.hi")
        n_samples = _get_int(cfg, "sweep.samples")
    try:
        spec = SweepSpec(
            param=cfg.get("sweep.param", "T"),
            lo=lo, hi=hi, n_samples=n_samples,
            params=params,
            engine=engine,
            n_kicks=_get_int(cfg, "n_kicks", 200),
            observable=cfg.get("observable", "nex_final"),
            n_points=_get_int(cfg, "n_points", 256),
            l_max=_get_int(cfg, "l_max", 32),
            dt_per_period=_get_float(cfg, "dt", params.period / 1000.0) / params.period,
            values=values,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = run_sweep(spec, workers=workers)
    _write_csv(out_dir / "sweep.csv", "param,observable,classification,rate,cutoff_kick",
               [(r.value, r.observable, r.classification, r.rate,
                 r.cutoff_kick if r.cutoff_kick is not None else "")
                for r in rows], cfg_hash)
    windows = extract_windows(rows)
    _write_csv(out_dir / "windows.csv", "lo,hi", windows, cfg_hash)
    return 0


def cmd_predict(cfg: dict, out_dir: Path, cfg_hash: str) -> int:
    params = build_params(cfg)
    mode = cfg.get("predict.mode", "single")
    lo = _get_float(cfg, "predict.lo")
    hi = _get_float(cfg, "predict.hi")
    preds = []
    if mode in ("single", "both"):
        preds += predict_single_mode_resonances(
            params,
            l_max=_get_int(cfg, "predict.l_max", 4),
            n_max=_get_int(cfg, "predict.n_max", 3),
            sweep=cfg.get("predict.param", "T"),
            lo=lo, hi=hi)
    if mode in ("two_mode", "both"):
        pairs = []
        for tok in cfg.get("predict.pairs", "1-2").split(","):
            a, b = tok.strip().split("-")
            pairs.append((int(a), int(b)))
        if cfg.get("predict.param", "g") != "g":
            raise ConfigError("two-mode prediction sweeps only over g")
        preds += predict_two_mode_resonances(
            params, pairs, m_max=_get_int(cfg, "predict.m_max", 8),
            g_lo=lo, g_hi=hi)
    if mode not in ("single", "two_mode", "both"):
        raise ConfigError(f"predict.mode must be single|two_mode|both, got {mode!r}")
    preds.sort(key=lambda r: r.value)
    rows = [(p.kind.value, p.l, p.lprime if p.lprime is not None else "",
             p.order, p.value) for p in preds]
    _write_csv(out_dir / "resonances.csv", "kind,l,lprime,n_or_M,value",
               rows, cfg_hash)
    return 0


def _find_recipes_dir(explicit: str | None) -> Path:
    if explicit:
        p = Path(explicit)
        if not p.is_dir():
            raise ConfigError(f"recipes directory not found: {p}")
        return p
    for base in [Path.cwd(), *Path.cwd().parents]:
        cand = base / "docs" / "recipes"
        if cand.is_dir():
            return cand
    raise ConfigError("no docs/recipes directory found; pass --dir")


def run_config(path: Path, out_dir: Path, engine: str | None, workers: int) -> int:
    text = path.read_text()
    cfg = parse_config(text)
    cfg_hash = _config_hash(text)
    command = cfg.get("command")
    out_dir.mkdir(parents=True, exist_ok=True)
    if command == "simulate":
        return cmd_simulate(cfg, out_dir, cfg_hash)
    if command == "scan":
        return cmd_scan(cfg, out_dir, cfg_hash, engine, workers)
    if command == "predict":
        return cmd_predict(cfg, out_dir, cfg_hash)
    raise ConfigError(f"config must set command = simulate|scan|predict, got {command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kickedbec",
        description="Kicked ring-condensate stability laboratory")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel workers for sweeps")
    sub = parser.add_subparsers(dest="cmd", required=True)
    for name in ("simulate", "scan", "predict"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=".")
        sp.add_argument("--engine", choices=("full", "map", "closed"))
    rp = sub.add_parser("recipes")
    rp.add_argument("action", choices=("list", "run"))
    rp.add_argument("name", nargs="?")
    rp.add_argument("--dir", default=None)
    rp.add_argument("--out", default=".")
    args = parser.parse_args(argv)

    try:
        if args.cmd == "recipes":
            rdir = _find_recipes_dir(args.dir)
            recipes = sorted(p.stem for p in rdir.glob("*.cfg"))
            if args.action == "list":
                for name in recipes:
                    print(name)
                return 0
            if not args.name or args.name not in recipes:
                print(f"unknown recipe {args.name!r}; available: {', '.join(recipes)}",
                      file=sys.stderr)
                return 1
            return run_config(rdir / f"{args.name}.cfg", Path(args.out),
                              None, args.workers)
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            print(f"config file not found: {cfg_path}", file=sys.stderr)
            return 1
        engine = getattr(args, "engine", None)
        return run_config(cfg_path, Path(args.out), engine, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
