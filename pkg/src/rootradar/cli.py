"""
Command-line pipeline.

Each subcommand reads its inputs from disk and writes its outputs into the
``--out`` folder, so any stage can be re-run on its own::

    synth       session targets          -> bscan.csv, bscan.pgm
    preprocess  bscan.csv (or bscan_csv) -> bscan_pre.csv, bscan_pre.pgm
    extract     bscan_pre.csv            -> pattern_000.csv ..., patterns_overlay.txt
    invert      pattern_*.csv            -> results.json
    eval        results.json + targets   -> eval.csv
    pipeline    all of the above

Exit status: 0 on success, 1 for bad input, 2 when processing fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import fileio
from .fileio import InputError, SessionConfig
from .forward import synthesize_bscan
from .inversion import invert_all
from .metrics import report
from .preprocess import bandpass, dc_remove, svd_background_removal, time_gain, time_zero_correct
from .radargram import Radargram
from .roi import extract_patterns

log = logging.getLogger("rootradar")

BSCAN = "bscan.csv"
BSCAN_PRE = "bscan_pre.csv"
RESULTS = "results.json"
EVAL = "eval.csv"
OVERLAY = "patterns_overlay.txt"
SEED_ENV = "ROOTRADAR_SEED"


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors, not argparse's default status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="session JSON file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output folder (default: ./out)")
    common.add_argument("--seed", type=int, default=None,
                        help=f"seed for synthetic noise and the swarm; ${SEED_ENV} takes precedence")
    common.add_argument("--verbose", "-v", action="count", default=0)

    p = _Parser(prog="rootradar", description="Locate buried roots in GPR B-scans.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("synth", parents=[common], help="synthesize a B-scan from the session targets")
    pp = sub.add_parser("preprocess", parents=[common], help="time-zero, band-pass, DC, gain, SVD")
    pp.add_argument("--input", type=Path, default=None,
                    help="raw B-scan CSV (default: session bscan_csv, else <out>/bscan.csv)")
    sub.add_parser("extract", parents=[common], help="cluster reflections and pick travel times")
    sub.add_parser("invert", parents=[common], help="fit center and radius to each pattern")
    sub.add_parser("eval", parents=[common], help="compare estimates with the session targets")
    sub.add_parser("pipeline", parents=[common], help="run every stage in order")
    return p


def resolve_seed(flag: Optional[int]) -> Optional[int]:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return flag


# -- stages ------------------------------------------------------------------

def run_synth(cfg: SessionConfig, out: Path, seed: Optional[int]) -> Path:
    if not cfg.targets:
        raise InputError("synth needs at least one entry in 'targets'")
    profile = cfg.surface()
    track = fileio.session_track(cfg, profile)
    r = synthesize_bscan(profile, cfg.target_params, track, cfg.medium, cfg.acquisition(),
                         0 if seed is None else seed)
    path = out / BSCAN
    fileio.save_bscan(r, path)
    fileio.render_heatmap(r, out / "bscan.pgm")
    print(f"synth: {r.n_samples} x {r.n_traces} B-scan -> {path}")
    return path


def preprocess_chain(r: Radargram, cfg: SessionConfig) -> Radargram:
    p = cfg.preprocess
    r = time_zero_correct(r, p.threshold_frac)
    r = bandpass(r, p.f_low_hz, p.f_high_hz, p.taper)
    r = dc_remove(r)
    r = time_gain(r, p.gain_alpha)
    return svd_background_removal(r, cfg.k_dominant(), p.k_noise)


def run_preprocess(cfg: SessionConfig, out: Path, source: Optional[Path] = None) -> Path:
    if source is None:
        source = cfg.resolve(cfg.bscan_csv) if cfg.bscan_csv else out / BSCAN
    r = fileio.load_bscan(source)
    try:
        r = preprocess_chain(r, cfg)
    except ValueError as exc:
        raise InputError(f"preprocessing settings: {exc}") from None
    path = out / BSCAN_PRE
    fileio.save_bscan(r, path)
    fileio.render_heatmap(r, out / "bscan_pre.pgm")
    print(f"preprocess: {source} -> {path}")
    return path


def run_extract(cfg: SessionConfig, out: Path) -> List[Path]:
    profile = cfg.surface()
    r = fileio.load_bscan(out / BSCAN_PRE)
    r = r.with_samples(r.samples, track=fileio.session_track(cfg, profile, r.n_traces))
    p = cfg.roi
    patterns = extract_patterns(r, None, p.amp_frac, p.min_segment, p.min_shared,
                                p.min_region_pixels, p.wavelet_delay_s, p.envelope)
    for stale in out.glob("pattern_*.csv"):
        stale.unlink()
    paths = []
    for k, pat in enumerate(patterns):
        path = out / f"pattern_{k:03d}.csv"
        fileio.save_pattern(pat, path)
        paths.append(path)
    fileio.write_overlay(patterns, r, out / OVERLAY)
    print(f"extract: {len(patterns)} region(s)")
    if not patterns:
        log.warning("no reflection regions found; check roi thresholds")
    return paths


def run_invert(cfg: SessionConfig, out: Path, seed: Optional[int]) -> Path:
    files = sorted(out.glob("pattern_*.csv"))
    if not files:
        raise InputError(f"no pattern files (pattern_*.csv) in {out}; run 'extract' first")
    patterns = [fileio.load_pattern(f) for f in files]
    profile = cfg.surface()
    track = fileio.session_track(cfg, profile)
    window = max(p.time_window for p in patterns)
    bounds = fileio.search_bounds(cfg, profile, track, window)
    estimates = invert_all(patterns, profile, cfg.medium, bounds, cfg.pso.config(seed), cfg.system)
    path = out / RESULTS
    fileio.save_results(estimates, path, cfg.system, [f.name for f in files])
    for f, e in zip(files, estimates):
        if e is None:
            print(f"invert: {f.name}: failed")
        else:
            print(f"invert: {f.name}: x_c={e.x_c:.4f} m  y_c={e.y_c:.4f} m  R={e.R:.4f} m  "
                  f"({e.iterations} it, {e.wall_time:.2f} s)")
    if all(e is None for e in estimates):
        raise RuntimeError("every inversion failed")
    return path


def run_eval(cfg: SessionConfig, out: Path) -> Path:
    from .forward import TargetParams

    if not cfg.targets:
        raise InputError("eval needs ground-truth 'targets' in the session")
    records = [e for e in fileio.load_results(out / RESULTS) if e["r_m"] is not None]
    est = [TargetParams(e["x_c_m"], e["y_c_m"], e["r_m"]) for e in records]
    rep = report(est, cfg.target_params, [e["wall_time_s"] for e in records])
    path = out / EVAL
    fileio.atomic_write(path, rep.to_csv())
    print(rep.to_table())
    return path


def run_pipeline(cfg: SessionConfig, out: Path, seed: Optional[int]) -> None:
    source = None
    if cfg.bscan_csv is None:
        source = run_synth(cfg, out, seed)
    run_preprocess(cfg, out, source)
    if not run_extract(cfg, out):
        raise RuntimeError("no reflection regions to invert")
    run_invert(cfg, out, seed)
    if cfg.targets:
        run_eval(cfg, out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        seed = resolve_seed(args.seed)
        cfg = fileio.load_session(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        cmd = args.command
        if cmd == "synth":
            run_synth(cfg, args.out, seed)
        elif cmd == "preprocess":
            run_preprocess(cfg, args.out, args.input)
        elif cmd == "extract":
            run_extract(cfg, args.out)
        elif cmd == "invert":
            run_invert(cfg, args.out, seed)
        elif cmd == "eval":
            run_eval(cfg, args.out)
        else:
            run_pipeline(cfg, args.out, seed)
    except InputError as exc:
        print(f"rootradar: input error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - mapped to the processing-failure status
        log.debug("failure", exc_info=True)
        print(f"rootradar: failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
