"""``comb-hom`` command line: run scans, list presets, check scale separation.

Exit codes: 0 success, 2 invalid configuration, 3 failed numerical
self-check (coincidence outside [0, 1] or oracle deviation too large).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import sampling
from .config import (
    PRESETS,
    ConfigParseError,
    ConfigValidationError,
    ScanConfig,
    parse_config,
    preset_config,
)
from .hom import (
    METHOD_ALIASES,
    DipCurve,
    DipSurface,
    Method,
    NumericalConsistencyError,
    Shift,
    StateKind,
    scan,
)
from .oracle import OracleRunner
from .states import ResolutionError, check_scales

log = logging.getLogger("comb_hom")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SELF_CHECK = 3

VERIFY_TOL = {StateKind.COMB_PAIR: 1e-4, StateKind.ENTANGLED_PAIR: 1e-3}
CSV_HEADER = "delta_t,delta_omega,coincidence,method,state_kind\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(result: DipCurve | DipSurface) -> str:
    rows = [CSV_HEADER]
    for dt, dw, c in result.shift_pairs():
        rows.append(f"{_fmt(dt)},{_fmt(dw)},{_fmt(c)},{result.method.value},{result.state_kind.value}\n")
    return "".join(rows)


def _summary(result: DipCurve | DipSurface) -> list[str]:
    lines = []
    if isinstance(result, DipCurve):
        i = int(np.argmin(result.coincidence))
        lines.append(f"  minimum C = {_fmt(result.coincidence[i])} at shift {_fmt(result.shifts[i])}")
        try:
            width = sampling.fwhm(result.shifts, result.coincidence)
            lines.append(f"  FWHM = {_fmt(width)}")
        except sampling.FWHMError as exc:
            lines.append(f"  FWHM unavailable ({exc})")
    else:
        i, j = np.unravel_index(int(np.argmin(result.coincidence)), result.coincidence.shape)
        lines.append(
            f"  minimum C = {_fmt(result.coincidence[i, j])} at (delta_t, delta_omega) = "
            f"({_fmt(result.t_shifts[i])}, {_fmt(result.w_shifts[j])})"
        )
    if result.valid is not None and not np.all(result.valid):
        lines.append(f"  {int(np.size(result.valid) - np.count_nonzero(result.valid))} points outside the small-shift region")
    return lines


def _verify(cfg: ScanConfig, exact: DipCurve | DipSurface) -> tuple[float, list[str]]:
    """Max |oracle - exact| over every scanned shift."""
    state = cfg.state()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        runner = OracleRunner.for_state(state, count=cfg.oracle_count, span_factor=cfg.oracle_span_factor)
        dev = 0.0
        for dt, dw, c in exact.shift_pairs():
            dev = max(dev, abs(runner.coincidence(Shift(float(dt), float(dw))) - c))
    notes = sorted({str(w.message) for w in caught})
    return dev, notes


def run(cfg: ScanConfig, out_dir: str | os.PathLike | None = None, verify: bool | None = None) -> int:
    out = Path(out_dir if out_dir is not None else cfg.output)
    verify = cfg.verify if verify is None else verify
    state = cfg.state()
    kind = StateKind(cfg.state_kind)

    report = [f"comb-hom report: {cfg.name}", f"state_kind = {kind.value}", f"scan = {cfg.scan}", ""]
    report.append("scale separation:")
    report += ["  " + line for line in check_scales(state).lines()]
    report.append("")

    methods = list(cfg.methods)
    requested = {METHOD_ALIASES[m] for m in methods}
    if verify and "exact" not in methods:
        methods.append("exact")
    oracle_opts = {"count": cfg.oracle_count, "span_factor": cfg.oracle_span_factor}
    status = EXIT_OK
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results = scan(
                state, cfg.t_shifts, cfg.w_shifts, methods,
                span_factor=cfg.span_factor, step_factor=cfg.step_factor, oracle_opts=oracle_opts,
            )
    except NumericalConsistencyError as exc:
        log.error("numerical self-check failed: %s", exc)
        report.append(f"SELF-CHECK FAILED: {exc}")
        write_atomic(out / "report.txt", "\n".join(report) + "\n")
        return EXIT_SELF_CHECK
    for note in sorted({str(w.message) for w in caught}):
        report.append(f"warning: {note}")

    for method, res in results.items():
        if method not in requested:
            continue
        fname = f"{cfg.name}_{cfg.scan}_{method.value}.csv"
        write_atomic(out / fname, csv_text(res))
        report.append(f"{method.value} -> {fname}")
        report += _summary(res)
        if kind is StateKind.COMB_PAIR and method is not Method.APPROX:
            vals = np.asarray(res.coincidence)
            if vals.max() > 0.5 + 1e-9 or vals.min() < -1e-9:
                report.append("  SELF-CHECK FAILED: product-state coincidence outside [0, 0.5]")
                status = EXIT_SELF_CHECK

    if verify:
        report.append("")
        try:
            dev, notes = _verify(cfg, results[Method.EXACT])
        except (ResolutionError, ValueError) as exc:
            report.append(f"verify: oracle not feasible ({exc})")
            status = EXIT_SELF_CHECK
        else:
            tol = VERIFY_TOL[kind]
            ok = dev <= tol
            report.append(f"verify: max |oracle - fast| = {_fmt(dev)} (threshold {tol:g}): {'PASS' if ok else 'FAIL'}")
            report += [f"  oracle warning: {n}" for n in notes]
            if not ok:
                status = EXIT_SELF_CHECK

    write_atomic(out / "report.txt", "\n".join(report) + "\n")
    return status


def _load(args) -> ScanConfig:
    base = None
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigValidationError("preset", f"unknown preset {args.preset!r}")
        base = PRESETS[args.preset]
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        return parse_config(text, base=base)
    if args.preset:
        return preset_config(args.preset)
    raise ConfigValidationError("config", "give --config or --preset")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="comb-hom", description="HOM dips of frequency-comb and entangled photons.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scan and write CSV + report.txt")
    r.add_argument("--config", help="JSON scan configuration")
    r.add_argument("--preset", help="built-in preset (config keys override it)")
    r.add_argument("--out", help="output directory (default: config 'output')")
    r.add_argument("--verify", action="store_true", help="cross-check against the brute-force oracle")
    sub.add_parser("presets", help="list built-in presets")
    c = sub.add_parser("check", help="only report scale separation")
    c.add_argument("--config")
    c.add_argument("--preset")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name, obj in PRESETS.items():
            print(f"{name}: {json.dumps(obj, sort_keys=True)}")
        return EXIT_OK
    try:
        cfg = _load(args)
    except (ConfigParseError, ConfigValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.command == "check":
        rep = check_scales(cfg.state())
        print("\n".join(rep.lines()))
        return EXIT_OK if rep.all_ok else EXIT_SELF_CHECK
    status = run(cfg, args.out, verify=True if args.verify else None)
    print(f"wrote results to {args.out or cfg.output} (exit {status})")
    return status


if __name__ == "__main__":
    sys.exit(main())
