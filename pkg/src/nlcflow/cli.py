"""Command-line orchestration: simulate | linear-decay | check | fit | report."""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

import numpy as np

from .checks import inequality_suite
from .config import ConfigError, RunConfig, load_config
from .diagnostics import decay_fit
from .evolution import IntegrationError, simulate
from .persist import (
    CheckpointError,
    load_checkpoint,
    read_norms_csv,
    save_checkpoint,
    write_decay_csv,
    write_inequalities_json,
    write_norms_csv,
)
from .scenarios import build_initial_state, gaussian_profiles
from .wholespace import DecayStudyConfig, decay_study

__all__ = ["main", "run"]


def _workers() -> int:
    try:
        return max(int(os.environ.get("NLCFLOW_WORKERS", "1")), 1)
    except ValueError:
        return 1


def _mode_simulate(cfg: RunConfig, out: Path, resume: str | None) -> int:
    if resume:
        state = load_checkpoint(resume, params=cfg.params)
        start_step = int(round(state.time / cfg.integrator.dt))
    else:
        state = build_initial_state(cfg.scenario, cfg.grid, cfg.amplitude, cfg.seed)
        start_step = 0
    try:
        traj = simulate(state, cfg.params, cfg.integrator, norm_order=cfg.norm_order,
                        eta=cfg.eta, record_states=bool(cfg.checkpoint_every),
                        start_step=start_step)
    except IntegrationError as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 1
    write_norms_csv(out / "norms.csv", traj)
    if cfg.checkpoint_every:
        for t, st in zip(traj.times, traj.states):
            k = int(round(t / cfg.integrator.dt))
            if k and k % cfg.checkpoint_every == 0:
                save_checkpoint(st, out / f"checkpoint_step{k:06d}.bin", cfg.params)
    save_checkpoint(traj.final_state, out / "checkpoint_final.bin", cfg.params)
    print(f"wrote {out / 'norms.csv'} ({len(traj.records)} records)")
    return 0


def _mode_linear_decay(cfg: RunConfig, out: Path) -> int:
    study = DecayStudyConfig(
        params=cfg.params,
        profiles=gaussian_profiles(cfg.decay_profile_width),
        k_list=cfg.decay_k_list,
        t_min=cfg.decay_t_min,
        t_max=cfg.decay_t_max,
        points_per_decade=cfg.decay_points_per_decade,
        rel_tol=cfg.decay_rel_tol,
    )
    rows = decay_study(study, workers=_workers())
    write_decay_csv(out / "decay.csv", rows)
    status = 0
    for r in rows:
        flag = "ok" if abs(r.fit.exponent - r.expected) < 0.25 else "OFF"
        print(f"{r.component:14s} k={r.k}  exponent={r.fit.exponent:+.4f} "
              f"(expected {r.expected:+.1f})  r2={r.fit.r_squared:.5f}  {flag}")
        if flag == "OFF":
            status = 1
    print(f"wrote {out / 'decay.csv'}")
    return status


def _mode_check(cfg: RunConfig, out: Path) -> int:
    checks = inequality_suite(cfg.params, cfg.seed, n_fields=cfg.check_fields,
                              eta=cfg.eta)
    write_inequalities_json(out / "inequalities.json", checks)
    failed = [c["check"] for c in checks if not c["pass"]]
    for c in checks:
        value = c.get("min_slack", c.get("ratio"))
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['check']}: {value:.3e}")
    print(f"wrote {out / 'inequalities.json'}")
    return 0 if not failed else 1


def _mode_fit(cfg: RunConfig, out: Path) -> int:
    header, data = read_norms_csv(out / "norms.csv")
    times = data["time"]
    lo, hi = cfg.fit_window
    hi = min(hi, float(times.max()))
    rows = []
    for name in header:
        if name == "time":
            continue
        values = data[name]
        sel = (times >= lo) & (times <= hi)
        if sel.sum() < 8 or np.any(values[sel] <= 0.0):
            continue
        fit = decay_fit(times, values, window=(lo, hi), label=name)
        match = re.search(r"grad(\d+)", name)
        rows.append({"component": name, "k": int(match.group(1)) if match else -1,
                     "exponent": fit.exponent, "r2": fit.r_squared,
                     "window_lo": fit.window[0], "window_hi": fit.window[1]})
    if not rows:
        print("no fittable columns in norms.csv (need 8+ positive samples in window)",
              file=sys.stderr)
        return 1
    write_decay_csv(out / "decay.csv", rows)
    print(f"wrote {out / 'decay.csv'} ({len(rows)} fits)")
    return 0


def _mode_report(cfg: RunConfig, out: Path) -> int:
    lines = []
    norms = out / "norms.csv"
    if norms.exists():
        header, data = read_norms_csv(norms)
        t = data["time"]
        lines.append(f"norms.csv: {len(t)} records over t in "
                     f"[{float(t.min())!r}, {float(t.max())!r}]")
        for col in ("rho_grad0_HN", "u_grad0_HN", "n_grad0_L2", "mass_mode0",
                    "director_drift", "energy_F_N1"):
            if col in data:
                lines.append(f"  final {col} = {float(data[col][-1])!r}")
    decay = out / "decay.csv"
    if decay.exists():
        for line in decay.read_text().strip().splitlines()[1:]:
            comp, k, exp, r2, lo, hi = line.split(",")
            lines.append(f"decay: {comp} (k={k}) exponent {float(exp):+.4f} "
                         f"r2={float(r2):.5f} window [{lo}, {hi}]")
    ineq = out / "inequalities.json"
    if ineq.exists():
        import json

        checks = json.loads(ineq.read_text())
        npass = sum(1 for c in checks if c["pass"])
        lines.append(f"inequalities: {npass}/{len(checks)} passed")
        for c in checks:
            if not c["pass"]:
                lines.append(f"  FAILED {c['check']}")
    if not lines:
        print(f"no artifacts found under {out}", file=sys.stderr)
        return 1
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text)
    print(text, end="")
    return 0


def run(cfg: RunConfig, resume: str | None = None) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "simulate":
        return _mode_simulate(cfg, out, resume)
    if cfg.mode == "linear-decay":
        return _mode_linear_decay(cfg, out)
    if cfg.mode == "check":
        return _mode_check(cfg, out)
    if cfg.mode == "fit":
        return _mode_fit(cfg, out)
    return _mode_report(cfg, out)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nlcflow",
        description="Spectral laboratory for a compressible nematic liquid-crystal "
                    "flow model")
    sub = p.add_subparsers(dest="mode", required=True)
    for mode in ("simulate", "linear-decay", "check", "fit", "report"):
        sp = sub.add_parser(mode)
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--seed", type=int, default=None, help="overrides config seed")
        if mode == "simulate":
            sp.add_argument("--resume", default=None, help="checkpoint to resume from")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, mode=args.mode)
        overrides = {}
        if args.out is not None:
            overrides["out_dir"] = args.out
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
    except (ConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, resume=getattr(args, "resume", None))
    except (CheckpointError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
