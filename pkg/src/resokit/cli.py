"""Command-line front end.

Every report command writes a deterministic CSV (header row naming
columns and units), prints a human-readable summary, and renders a
companion figure next to the CSV unless --no-fig is given. Exit codes:
0 success, 2 parse/validation error, 3 numerical failure.

Set RESOKIT_OUT_DIR to redirect relative --out paths into a directory.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import plots
from .acoustic1d import (
    cell_matrix,
    find_stop_bands,
    geometry_to_segments,
    te_resonance,
    transmission,
)
from .config import load_config
from .errors import NumericsError, ResokitError, ValidationError
from .extraction import AdmittanceTrace, FitOptions, extract_mbvd, s11_to_admittance
from .ladder import REFERENCE_DIELECTRIC_LOSS_OHM, evaluate_design, kt2_sweep
from .mbvd import (
    MbvdParams,
    from_targets,
    kt2_from_freqs,
    metrics as resonator_metrics,
    resonance_freqs,
    synth_admittance,
)
from .touchstone import parse_touchstone, record_from_s11, record_from_two_port, write_touchstone

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICS = 3


def _out_path(raw: str | None) -> Path | None:
    if raw is None:
        return None
    path = Path(raw)
    base = os.environ.get("RESOKIT_OUT_DIR")
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def _fig_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _resonator_from_args(args, cfg) -> MbvdParams:
    """Element values from explicit flags, else from config targets."""
    explicit = [args.c0, args.cm, args.lm]
    if all(v is not None for v in explicit):
        return MbvdParams(c0=args.c0, cm=args.cm, lm=args.lm,
                          rm=args.rm or 0.0, rs=args.rs or 0.0, r0=args.r0 or 0.0)
    targets = cfg.resonator if cfg else None
    if targets is None:
        raise ValidationError(
            "resonator undefined: give --c0/--cm/--lm or a --config with [resonator]"
        )
    return from_targets(
        fres=args.fres if args.fres is not None else targets.fres,
        kt2=args.kt2 if args.kt2 is not None else targets.kt2,
        qm=args.qm if args.qm is not None else targets.qm,
        c0=args.c0 if args.c0 is not None else targets.c0,
        rs=args.rs if args.rs is not None else targets.rs,
        r0=args.r0 if args.r0 is not None else targets.r0,
    )


def _load_cfg(args):
    return load_config(args.config) if getattr(args, "config", None) else None


def _require_cell(cfg):
    if cfg is None or cfg.cell is None:
        raise ValidationError("this command needs --config with a [cell] section")
    return geometry_to_segments(cfg.cell)


def _grid(args, default_lo, default_hi, default_n=2001):
    lo = args.fmin if args.fmin is not None else default_lo
    hi = args.fmax if args.fmax is not None else default_hi
    if not (0 < lo < hi):
        raise ValidationError(f"require 0 < --fmin < --fmax, got ({lo}, {hi})")
    return np.linspace(lo, hi, args.n or default_n)


def cmd_synth(args) -> int:
    cfg = _load_cfg(args)
    p = _resonator_from_args(args, cfg)
    fs_hint = None
    if p.has_motional_branch:
        fs_hint = 1.0 / (2.0 * math.pi * math.sqrt(p.lm * p.cm))
    lo = 0.6 * fs_hint if fs_hint else 1e9
    hi = 1.5 * fs_hint if fs_hint else 1e10
    freqs = _grid(args, lo, hi)
    y = synth_admittance(p, freqs)
    print(f"synthesized {len(freqs)} admittance points "
          f"({freqs[0]:.6g} .. {freqs[-1]:.6g} Hz)")
    out = _out_path(args.out)
    if out:
        if out.suffix.lower() == ".s1p":
            s11 = (1.0 / args.z0 - y) / (1.0 / args.z0 + y)
            record = record_from_s11(freqs, s11, unit="ghz", fmt=args.ts_format,
                                     z_ref=args.z0)
            out.write_text(write_touchstone(record), encoding="utf-8")
        else:
            _write_csv(out, ["frequency_hz", "re", "im"],
                       [(float(f), float(v.real), float(v.imag)) for f, v in zip(freqs, y)])
        print(f"wrote {out}")
        if not args.no_fig:
            print(f"wrote {plots.save_admittance_figure(_fig_path(out), freqs, y)}")
    return EXIT_OK


def _trace_from_input(path: Path) -> AdmittanceTrace:
    text = Path(path).read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        rows = list(csv.reader(text.splitlines()))
        if not rows or [h.strip() for h in rows[0]] != ["frequency_hz", "re", "im"]:
            raise ValidationError(
                f"{path}: CSV trace must have header 'frequency_hz,re,im'"
            )
        data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float)
        return AdmittanceTrace(freqs=data[:, 0], values=data[:, 1] + 1j * data[:, 2])
    record = parse_touchstone(text)
    if record.n_ports != 1:
        raise ValidationError(f"{path}: expected a 1-port file for fitting")
    y = s11_to_admittance(record.values(), record.z_ref)
    return AdmittanceTrace(freqs=record.freqs_hz, values=y,
                           ref_impedance=record.z_ref)


def cmd_fit(args) -> int:
    if not args.input:
        raise ValidationError("fit requires --input (.s1p or .csv trace)")
    trace = _trace_from_input(Path(args.input))
    opts = FitOptions(max_iter=args.max_iter, rel_tol=args.tol)
    result = extract_mbvd(trace, opts)
    p = result.params
    fs, fp_lossless, fp_min = resonance_freqs(p)
    kt2_lossless = kt2_from_freqs(fs, fp_lossless)
    kt2_min = kt2_from_freqs(fs, fp_min)
    qm = math.inf if p.rm == 0 else 2.0 * math.pi * fs * p.lm / p.rm

    print(f"fit converged={result.converged} iterations={result.iterations} "
          f"residual={result.residual:.3e}")
    print(f"  c0={p.c0*1e15:.2f} fF  cm={p.cm*1e15:.2f} fF  lm={p.lm*1e9:.4f} nH")
    print(f"  rm={p.rm:.4f} ohm  rs={p.rs:.4f} ohm  r0={p.r0:.4f} ohm")
    print(f"  fs={fs/1e9:.5f} GHz  fp={fp_min/1e9:.5f} GHz")
    print(f"  kt2={kt2_lossless*100:.2f}% (lossless fp; quadratic definition), "
          f"{kt2_min*100:.2f}% (|Y|-min fp)  qm={qm:.1f}")

    out = _out_path(args.out)
    if out:
        _write_csv(
            out,
            ["c0_f", "cm_f", "lm_h", "rm_ohm", "rs_ohm", "r0_ohm",
             "fs_hz", "fp_hz", "fp_lossless_hz", "kt2_lossless", "kt2",
             "qm", "residual", "iterations", "converged"],
            [(p.c0, p.cm, p.lm, p.rm, p.rs, p.r0, fs, fp_min, fp_lossless,
              kt2_lossless, kt2_min, qm, result.residual,
              result.iterations, result.converged)],
        )
        print(f"wrote {out}")
        if not args.no_fig:
            model = synth_admittance(p, trace.freqs)
            print(f"wrote {plots.save_admittance_figure(_fig_path(out), trace.freqs, trace.values, model, title='Admittance fit')}")
    if not result.converged:
        print("fit did not converge", file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK


def cmd_metrics(args) -> int:
    cfg = _load_cfg(args)
    p = _resonator_from_args(args, cfg)
    m = resonator_metrics(p)
    print(f"fs={m.fs/1e9:.5f} GHz  fp={m.fp/1e9:.5f} GHz  "
          f"fp_lossless={m.fp_lossless/1e9:.5f} GHz")
    print(f"kt2={m.kt2*100:.2f}% ({m.definition.value} definition, |Y|-min fp)  "
          f"qm={m.qm:.1f}  fom_m={m.fom_m:.2f}  fom={m.fom:.2f}"
          + ("  [lossless]" if m.lossless else ""))
    out = _out_path(args.out)
    if out:
        _write_csv(
            out,
            ["fs_hz", "fp_hz", "fp_lossless_hz", "kt2", "qm", "fom_m", "fom",
             "lossless", "kt2_definition"],
            [(m.fs, m.fp, m.fp_lossless, m.kt2, m.qm, m.fom_m, m.fom,
              m.lossless, m.definition.value)],
        )
        print(f"wrote {out}")
        if not args.no_fig:
            freqs = np.linspace(0.9 * m.fs, 1.1 * m.fp, 2001)
            y = synth_admittance(p, freqs)
            print(f"wrote {plots.save_admittance_figure(_fig_path(out), freqs, y, title='Resonator admittance')}")
    return EXIT_OK


def cmd_te_res(args) -> int:
    cfg = _load_cfg(args)
    if cfg is None or args.stack not in cfg.stacks:
        known = sorted(cfg.stacks) if cfg else []
        raise ValidationError(
            f"--stack {args.stack!r} not found in config (stacks: {known})"
        )
    stack = cfg.stacks[args.stack]
    fres = te_resonance(stack, args.fmin, args.fmax)
    print(f"thickness-extensional resonance of stack '{args.stack}': {fres/1e9:.5f} GHz")
    out = _out_path(args.out)
    if out:
        _write_csv(out, ["stack", "fres_hz"], [(args.stack, float(fres))])
        print(f"wrote {out}")
        if not args.no_fig:
            from .acoustic1d import _te_condition
            span = np.linspace(0.5 * fres, 2.0 * fres, 2001)
            cond = _te_condition(stack, span)
            print(f"wrote {plots.save_te_figure(_fig_path(out), span, cond, fres)}")
    return EXIT_OK


def cmd_stopbands(args) -> int:
    cfg = _load_cfg(args)
    cell = _require_cell(cfg)
    lo = args.fmin if args.fmin is not None else 1e9
    hi = args.fmax if args.fmax is not None else 1e10
    n = args.n or 4001
    bands = find_stop_bands(cell, lo, hi, n)
    print(f"{len(bands)} stop-band(s) in ({lo:.4g}, {hi:.4g}) Hz")
    for band in bands:
        print(f"  {band.f_lo/1e9:.5f} - {band.f_hi/1e9:.5f} GHz")
    out = _out_path(args.out)
    if out:
        _write_csv(out, ["f_lo_hz", "f_hi_hz"],
                   [(b.f_lo, b.f_hi) for b in bands])
        print(f"wrote {out}")
        if not args.no_fig:
            grid = np.linspace(lo, hi, n)
            m = cell_matrix(cell, grid)
            half_tr = 0.5 * (m[:, 0, 0] + m[:, 1, 1]).real
            print(f"wrote {plots.save_stopband_figure(_fig_path(out), grid, half_tr, bands)}")
    return EXIT_OK


def cmd_transmission(args) -> int:
    cfg = _load_cfg(args)
    cell = _require_cell(cfg)
    lo = args.fmin if args.fmin is not None else 1e9
    hi = args.fmax if args.fmax is not None else 1e10
    freqs = _grid(args, lo, hi)
    z_src = args.zsrc if args.zsrc is not None else cell[0].impedance
    z_load = args.zload if args.zload is not None else cell[-1].impedance
    t = transmission(cell, args.cells, freqs, z_src, z_load, q=args.q)
    print(f"transmission through {args.cells} cell(s): min={t.min():.3e} max={t.max():.3e}")
    out = _out_path(args.out)
    if out:
        _write_csv(out, ["frequency_hz", "transmission"],
                   [(float(f), float(v)) for f, v in zip(freqs, t)])
        print(f"wrote {out}")
        if not args.no_fig:
            print(f"wrote {plots.save_transmission_figure(_fig_path(out), freqs, t)}")
    return EXIT_OK


def _filter_args(args, cfg):
    fp = cfg.filter_params if cfg else None
    res = cfg.resonator if cfg else None
    order = args.order if args.order is not None else (fp.order if fp else None)
    r = args.r if args.r is not None else (fp.cap_ratio if fp else None)
    z0 = args.z0 if args.z0 is not None else (fp.z0 if fp else 50.0)
    fres = args.fres if args.fres is not None else (res.fres if res else None)
    kt2 = args.kt2 if args.kt2 is not None else (res.kt2 if res else None)
    qm = args.qm if args.qm is not None else (res.qm if res else None)
    missing = [name for name, v in
               [("--order", order), ("--r", r), ("--fres", fres),
                ("--kt2", kt2), ("--qm", qm)] if v is None]
    if missing:
        raise ValidationError(f"filter parameters missing: {' '.join(missing)}")
    return int(order), fres, kt2, qm, r, z0


def cmd_filter(args) -> int:
    cfg = _load_cfg(args)
    order, fres, kt2, qm, r, z0 = _filter_args(args, cfg)
    fgrid = None
    if args.fmin is not None or args.fmax is not None or args.n is not None:
        fgrid = _grid(args, 0.8 * fres, 1.2 * fres, 6001)
    spec, resp, met = evaluate_design(order, fres, kt2, qm, r, z0,
                                      rs=args.rs, r0=args.r0, fgrid=fgrid)
    c0s = spec.elements[0][1].c0
    c0p = spec.elements[1][1].c0 if order > 1 else math.nan
    print(f"designed order-{order} ladder at {fres/1e9:.3f} GHz "
          f"(C0_series={c0s*1e15:.1f} fF, C0_shunt={c0p*1e15:.1f} fF, z0={z0:g} ohm)")
    print(f"IL={met.il_db:.2f} dB  BW={met.bw_frac*100:.2f}%  "
          f"rejection={met.rejection_db:.1f} dB  "
          f"band {met.f_lo/1e9:.4f}-{met.f_hi/1e9:.4f} GHz")
    out = _out_path(args.out)
    if out:
        if out.suffix.lower() == ".s2p":
            record = record_from_two_port(resp.freqs, resp.s11, resp.s21,
                                          resp.s12, resp.s22, unit="ghz",
                                          fmt=args.ts_format, z_ref=z0)
            out.write_text(write_touchstone(record), encoding="utf-8")
        else:
            _write_csv(
                out,
                ["frequency_hz", "s11_re", "s11_im", "s21_re", "s21_im",
                 "s12_re", "s12_im", "s22_re", "s22_im"],
                [(float(f), v11.real, v11.imag, v21.real, v21.imag,
                  v12.real, v12.imag, v22.real, v22.imag)
                 for f, v11, v21, v12, v22 in
                 zip(resp.freqs, resp.s11, resp.s21, resp.s12, resp.s22)],
            )
        print(f"wrote {out}")
        if not args.no_fig:
            print(f"wrote {plots.save_filter_figure(_fig_path(out), resp.freqs, resp.s21, resp.s11)}")
    return EXIT_OK


def cmd_sweep_kt2(args) -> int:
    cfg = _load_cfg(args)
    fp = cfg.filter_params if cfg else None
    res = cfg.resonator if cfg else None
    order = args.order if args.order is not None else (fp.order if fp else 5)
    r = args.r if args.r is not None else (fp.cap_ratio if fp else 3.0)
    z0 = args.z0 if args.z0 is not None else (fp.z0 if fp else 50.0)
    fres = args.fres if args.fres is not None else (res.fres if res else None)
    qm = args.qm if args.qm is not None else (res.qm if res else None)
    if fres is None or qm is None:
        raise ValidationError("sweep-kt2 requires --fres and --qm (or a config)")
    rows = kt2_sweep(args.kt2_lo, args.kt2_hi, args.steps, qm, r,
                     int(order), fres, z0, rs=args.rs, r0=args.r0)
    n_res = sum(r_.resolved for r_ in rows)
    print(f"swept kt2 {args.kt2_lo:.3f}..{args.kt2_hi:.3f} in {args.steps} steps "
          f"({n_res} resolved)")
    for row in rows:
        if row.resolved:
            print(f"  kt2={row.kt2*100:5.1f}%  IL={row.il_db:6.2f} dB  "
                  f"BW={row.bw_frac*100:6.2f}%  rej={row.rejection_db:5.1f} dB")
        else:
            print(f"  kt2={row.kt2*100:5.1f}%  passband unresolved")
    out = _out_path(args.out)
    if out:
        _write_csv(out, ["kt2", "il_db", "bw_frac", "rejection_db", "resolved"],
                   [(row.kt2, row.il_db, row.bw_frac, row.rejection_db, row.resolved)
                    for row in rows])
        print(f"wrote {out}")
        if not args.no_fig:
            print(f"wrote {plots.save_sweep_figure(_fig_path(out), rows)}")
    return EXIT_OK


def _add_common(sp, config=True, grid=False):
    if config:
        sp.add_argument("--config", help="design config file")
    sp.add_argument("--out", help="output file (CSV unless noted)")
    sp.add_argument("--no-fig", action="store_true",
                    help="skip the companion figure next to --out")
    if grid:
        sp.add_argument("--fmin", type=float, help="grid start (Hz)")
        sp.add_argument("--fmax", type=float, help="grid stop (Hz)")
        sp.add_argument("--n", type=int, help="grid points")


def _add_element_flags(sp):
    sp.add_argument("--c0", type=float, help="static capacitance (F)")
    sp.add_argument("--cm", type=float, help="motional capacitance (F)")
    sp.add_argument("--lm", type=float, help="motional inductance (H)")
    sp.add_argument("--rm", type=float, help="motional resistance (ohm)")
    sp.add_argument("--rs", type=float, help="series routing resistance (ohm)")
    sp.add_argument("--r0", type=float, help="dielectric-loss resistance (ohm)")
    sp.add_argument("--fres", type=float, help="target resonance (Hz)")
    sp.add_argument("--kt2", type=float, help="target coupling (fraction)")
    sp.add_argument("--qm", type=float, help="target mechanical Q")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="resokit",
        description="Microacoustic resonator and ladder-filter toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="synthesize an MBVD admittance sweep")
    _add_common(sp, grid=True)
    _add_element_flags(sp)
    sp.add_argument("--z0", type=float, default=50.0, help="s1p reference impedance")
    sp.add_argument("--ts-format", default="RI", choices=["RI", "MA", "DB"])
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("fit", help="fit MBVD elements to a measured trace")
    sp.add_argument("--input", required=True, help=".s1p or .csv admittance trace")
    _add_common(sp, config=False)
    sp.add_argument("--max-iter", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("metrics", help="resonance frequencies and figures of merit")
    _add_common(sp)
    _add_element_flags(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("te-res", help="thickness-extensional resonance of a stack")
    _add_common(sp)
    sp.add_argument("--stack", required=True, help="stack name from the config")
    sp.add_argument("--fmin", type=float, help="search bracket start (Hz)")
    sp.add_argument("--fmax", type=float, help="search bracket stop (Hz)")
    sp.set_defaults(func=cmd_te_res)

    sp = sub.add_parser("stopbands", help="stop-bands of the configured unit cell")
    _add_common(sp, grid=True)
    sp.set_defaults(func=cmd_stopbands)

    sp = sub.add_parser("transmission", help="transmission through n unit cells")
    _add_common(sp, grid=True)
    sp.add_argument("--cells", type=int, default=5, help="number of unit cells")
    sp.add_argument("--zsrc", type=float, help="source impedance (default: first segment)")
    sp.add_argument("--zload", type=float, help="load impedance (default: last segment)")
    sp.add_argument("--q", type=float, help="optional uniform quality factor")
    sp.set_defaults(func=cmd_transmission)

    sp = sub.add_parser("filter", help="design and evaluate a ladder filter")
    _add_common(sp, grid=True)
    sp.add_argument("--order", type=int, help="number of resonators")
    sp.add_argument("--r", type=float, help="shunt/series capacitance ratio")
    sp.add_argument("--z0", type=float, help="termination impedance (ohm)")
    sp.add_argument("--fres", type=float, help="series resonance (Hz)")
    sp.add_argument("--kt2", type=float, help="resonator coupling (fraction)")
    sp.add_argument("--qm", type=float, help="resonator mechanical Q")
    sp.add_argument("--rs", type=float, default=0.0, help="per-resonator rs (ohm)")
    sp.add_argument("--r0", type=float, default=REFERENCE_DIELECTRIC_LOSS_OHM,
                    help="per-resonator r0 (ohm)")
    sp.add_argument("--ts-format", default="RI", choices=["RI", "MA", "DB"])
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("sweep-kt2", help="filter metrics across a coupling range")
    _add_common(sp)
    sp.add_argument("--kt2-lo", type=float, required=True)
    sp.add_argument("--kt2-hi", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--order", type=int)
    sp.add_argument("--r", type=float)
    sp.add_argument("--z0", type=float)
    sp.add_argument("--fres", type=float)
    sp.add_argument("--qm", type=float)
    sp.add_argument("--rs", type=float, default=0.0)
    sp.add_argument("--r0", type=float, default=REFERENCE_DIELECTRIC_LOSS_OHM)
    sp.set_defaults(func=cmd_sweep_kt2)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ResokitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
