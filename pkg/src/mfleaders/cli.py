"""Command-line driver: generate, analyze, pointwise, verify.

Exit codes: 0 success, 1 validation error (bad config, bad file), 2
verification failure.  All outputs are pure functions of (config, seed):
re-running a command reproduces its data outputs bit-exactly (verify writes
its runtimes to a separate timing sidecar to keep the report deterministic).
The MF_THREADS environment variable caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, io, plots
from .config import (
    ExperimentConfig,
    apply_overrides,
    load_config_file,
    parse_law,
    parse_profile,
)
from .dyadic import rho_phi
from .errors import ConfigError, FormatError, MFLeadersError
from .formalism import (
    default_structure_window,
    legendre_spectrum,
    measure_legendre,
    measure_tau,
    scaling_function,
    structure_function,
)
from .generators import (
    davenport,
    prescribed_series,
    transference_series,
    two_exponent_series,
    weierstrass,
)
from .leaders import (
    compute_leaders,
    default_fit_window,
    estimate_exponent,
    irregularity_certificate,
    local_leaders,
    oscillation_exponents,
)
from .measures import cascade, multinomial
from .verify import SUITES, format_result_line, run_suites
from .wavelet import Signal, analyze, daubechies


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-J", "--levels", type=int, help="dyadic levels (signal length 2^J)")
    p.add_argument("--wavelet", help="analyzing wavelet, dbN with N in 2..10")
    p.add_argument("--fit", help="fit window j1:j2")
    p.add_argument("--pgrid", help="structure-function p grid lo:hi:n")
    p.add_argument("--qgrid", help="measure q grid lo:hi:n")
    p.add_argument("--hgrid", help="spectrum h grid lo:hi:n")
    p.add_argument("--points", help="comma-separated points in [0,1)")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("mfs1", "csv"), help="signal file format")
    p.add_argument("--config", help="key=value config file (flags override)")
    fig = p.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=None)
    fig.add_argument("--no-figures", dest="figures", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mfleaders",
        description="wavelet-leader multifractal analysis toolbox",
    )
    ap.add_argument("--version", action="version", version=f"mfleaders {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="materialize a reference construction")
    g.add_argument("construction", choices=(
        "davenport", "weierstrass", "prescribed", "two-exponent",
        "multinomial", "cascade", "transference"))
    g.add_argument("--beta", type=float, help="Davenport decay exponent (> 1)")
    g.add_argument("--lam", type=int, help="Weierstrass frequency base (integer >= 2)")
    g.add_argument("--profile", help="exponent profile, e.g. affine:0.3,0.4")
    g.add_argument("--hlo", help="low exponent profile (two-exponent)")
    g.add_argument("--hhi", help="high exponent profile (two-exponent)")
    g.add_argument("--b", type=int, default=2, help="measure base")
    g.add_argument("--weights", help="multinomial weights, comma-separated")
    g.add_argument("--law", help="cascade weight law, e.g. two-point:0.2,0.8")
    g.add_argument("--depth", type=int, help="measure depth")
    g.add_argument("--s0", type=float, default=1.0, help="transference smoothness offset")
    g.add_argument("--p0", type=float, default=2.0, help="transference integrability index")
    g.add_argument("--measure", help="measure JSON to build the transference series from")
    _add_common(g)

    a = sub.add_parser("analyze", help="leaders, scaling function, spectrum")
    a.add_argument("input", help="signal (.mfs1/.csv), pyramid (.json) or measure (.json)")
    a.add_argument("--tau", action="store_true", default=None,
                   help="treat input as a measure and estimate tau / tau*")
    a.add_argument("--sidecar", help="ground-truth sidecar JSON (default: <input>.truth.json)")
    a.add_argument("--offset", type=float, default=0.5,
                   help="sample grid offset of signal inputs (default 0.5)")
    _add_common(a)

    pw = sub.add_parser("pointwise", help="pointwise exponents and certificates")
    pw.add_argument("input", help="signal (.mfs1/.csv) or pyramid (.json)")
    pw.add_argument("--oscillation", action="store_true", default=None,
                    help="cross-check with the finite-difference oracle (signals only)")
    pw.add_argument("--alpha", type=float,
                    help="certificate exponent (default: the per-point limit estimate)")
    pw.add_argument("--offset", type=float, default=0.5,
                    help="sample grid offset of signal inputs (default 0.5)")
    _add_common(pw)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite", help=f"one of {', '.join(SUITES)} or 'all'")
    _add_common(v)
    return ap


def _config_from_args(args) -> ExperimentConfig:
    base = ExperimentConfig(
        construction=getattr(args, "construction", "davenport") or "davenport"
    )
    overrides: dict = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for key in ("levels", "wavelet", "fit", "pgrid", "qgrid", "hgrid", "points",
                "seed", "out", "format", "figures"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    for key in ("tau", "oscillation"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    cfg = apply_overrides(base, overrides)
    return cfg


def _truth_payload(gt, cfg: ExperimentConfig) -> dict:
    doc = {"description": gt.description, "spectrum_kind": gt.spectrum_kind}
    _, _, hgrid = cfg.grids()
    if gt.spectrum is not None:
        doc["spectrum_h"] = hgrid.tolist()
        doc["spectrum_D"] = [gt.spectrum(h) for h in hgrid]
        doc["spectrum_support"] = gt.spectrum_support
    pts = cfg.points or ()
    if gt.lower is not None and pts:
        doc["pointwise"] = {
            str(x): {"lower": gt.lower(x), "upper": gt.upper(x)} for x in pts
        }
    extra = {k: v for k, v in gt.extra.items() if not callable(v)}
    doc["extra"] = extra
    return doc


def cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    J = cfg.levels
    prov = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    name = args.construction
    stem = outdir / f"{name}_J{J}" if name not in ("multinomial", "cascade") else (
        outdir / f"{name}_d{args.depth or J}"
    )

    if name == "davenport":
        beta = args.beta if args.beta is not None else 2.0
        obj, gt = davenport(beta, J=J)
    elif name == "weierstrass":
        prof = parse_profile(args.profile or "constant:0.5")
        obj, gt = weierstrass(prof, lam=args.lam or 2, J=J)
    elif name == "prescribed":
        prof = parse_profile(args.profile or "constant:0.5")
        obj, gt = prescribed_series(prof, daubechies(int(cfg.wavelet[2:])), J=J)
    elif name == "two-exponent":
        lo = parse_profile(args.hlo or "constant:0.3")
        hi = parse_profile(args.hhi or "constant:0.7")
        obj, gt = two_exponent_series(lo, hi, daubechies(int(cfg.wavelet[2:])), J=J)
    elif name == "multinomial":
        weights = [float(v) for v in (args.weights or "0.25,0.75").split(",")]
        depth = args.depth or J
        obj, gt = multinomial(args.b, weights, depth), None
    elif name == "cascade":
        spec = parse_law(args.law or "two-point:0.2,0.8", args.b)
        depth = args.depth or J
        obj, gt = cascade(spec, depth, cfg.seed), None
    elif name == "transference":
        if args.measure:
            m = io.read_measure(args.measure)
        else:
            weights = [float(v) for v in (args.weights or "0.25,0.75").split(",")]
            m = multinomial(2, weights, max(args.depth or J, J))
        obj, gt = transference_series(m, args.s0, args.p0,
                                      daubechies(int(cfg.wavelet[2:])), J=J)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"construction: unknown {name!r}")

    written = []
    if isinstance(obj, Signal):
        obj.meta.update(prov)
        if cfg.format == "mfs1":
            path = stem.with_suffix(".mfs1")
            io.write_mfs1(path, obj.samples)
        else:
            path = stem.with_suffix(".csv")
            io.write_signal_csv(path, obj.samples, obj.meta)
        written.append(str(path))
    elif hasattr(obj, "levels") and hasattr(obj, "tag"):
        obj.meta.update(prov)
        path = stem.with_suffix(".json")
        io.write_pyramid(path, obj)
        written.append(str(path))
    else:
        obj.meta.update(prov)
        path = stem.with_suffix(".json")
        io.write_measure(path, obj)
        written.append(str(path))
        if cfg.format == "csv":
            csv_path = stem.with_suffix(".levels.csv")
            io.write_measure_csv(csv_path, obj, {**prov, "seed": cfg.seed})
            written.append(str(csv_path))

    if gt is not None:
        sidecar = Path(str(path) + ".truth.json") if not str(path).endswith(".json") \
            else path.with_suffix(".truth.json")
        io.write_json(sidecar, io.make_report("ground-truth",
                                              _truth_payload(gt, cfg), prov))
        written.append(str(sidecar))
    for w in written:
        print(w)
    return 0


def _load_input(path: str, offset: float):
    """Returns ('signal'|'pyramid'|'measure', object)."""
    p = Path(path)
    if not p.exists():
        raise FormatError(f"{path}: no such file")
    if p.suffix in (".mfs1", ".csv"):
        return "signal", io.read_signal(p, offset=offset)
    doc = json.loads(p.read_text())
    if "tag" in doc and "levels" in doc and "J" in doc:
        return "pyramid", io.pyramid_from_json(doc)
    if "b" in doc and "depth" in doc:
        return "measure", io.measure_from_json(doc)
    raise FormatError(f"{path}: JSON is neither a pyramid nor a measure document")


def _sidecar_for(args) -> dict | None:
    cand = args.sidecar if getattr(args, "sidecar", None) else None
    if cand is None:
        p = Path(args.input)
        guess = Path(str(p) + ".truth.json") if p.suffix != ".json" \
            else p.with_suffix(".truth.json")
        cand = str(guess) if guess.exists() else None
    if cand is None:
        return None
    return json.loads(Path(cand).read_text())


def _pyramid_for(kind, obj, cfg):
    if kind == "pyramid":
        return obj
    return analyze(obj, daubechies(int(cfg.wavelet[2:])))


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    prov = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    kind, obj = _load_input(args.input, args.offset)
    pgrid, qgrid, hgrid = cfg.grids()
    stem = outdir / Path(args.input).stem
    written = []
    payload: dict = {"input": str(args.input), "input_kind": kind}

    if kind == "measure" or cfg.tau:
        if kind != "measure":
            raise ConfigError("tau: input must be a measure JSON")
        depth_range = cfg.fit or (max(1, obj.depth // 2), obj.depth)
        tau = measure_tau(obj, qgrid, tuple(depth_range))
        tstar = measure_legendre(tau, np.linspace(hgrid[0], max(hgrid[-1], 3.0), hgrid.size))
        io.write_tau_csv(f"{stem}_tau.csv", tau, prov)
        io.write_spectrum_csv(f"{stem}_tau_spectrum.csv", tstar, prov)
        written += [f"{stem}_tau.csv", f"{stem}_tau_spectrum.csv"]
        payload["tau"] = {
            "depth_range": depth_range,
            "tau_at_0": tau.tau_at(0.0),
            "tau_at_1": tau.tau_at(1.0),
            "min_r2": float(np.min(tau.r2)),
        }
        if cfg.figures:
            written.append(plots.plot_tau(tau, f"{stem}_tau.png"))
            written.append(plots.plot_spectrum(tstar, f"{stem}_tau_spectrum.png",
                                               label="tau* estimate"))
    else:
        pyr = _pyramid_for(kind, obj, cfg)
        lp = compute_leaders(pyr)
        fit = tuple(cfg.fit) if cfg.fit else default_structure_window(pyr.J)
        sf = structure_function(lp, pgrid, j_range=(max(1, fit[0] - 4), min(pyr.J - 1, fit[1] + 1)))
        om = scaling_function(sf, fit)
        spec = legendre_spectrum(om, hgrid)
        io.write_scaling_csv(f"{stem}_scaling.csv", om, prov)
        io.write_spectrum_csv(f"{stem}_spectrum.csv", spec, prov)
        written += [f"{stem}_scaling.csv", f"{stem}_spectrum.csv"]
        apex_h, apex_d = spec.apex()
        payload["scaling"] = {
            "fit_range": fit,
            "min_r2": float(np.min(om.r2)),
            "concavity_defect": om.concavity_defect,
            "excluded_cells_per_level": sf.excluded_counts.tolist(),
        }
        payload["spectrum"] = {"apex_h": apex_h, "apex_D": apex_d}

        truth = _sidecar_for(args)
        if truth and "spectrum_h" in truth:
            hs = np.asarray(truth["spectrum_h"], dtype=float)
            Ds = np.asarray(
                [-np.inf if isinstance(v, str) else v for v in truth["spectrum_D"]],
                dtype=float,
            )
            finite = np.isfinite(Ds)
            margin = 0.1
            viol = float(np.max(Ds[finite] - np.asarray(
                [spec.at_raw(h) for h in hs[finite]]) - margin, initial=-np.inf))
            payload["upper_bound_check"] = {
                "margin": margin,
                "max_violation": viol,
                "result": "pass" if viol <= 0.0 else "fail",
            }
            if cfg.figures:
                written.append(plots.plot_spectrum(
                    spec, f"{stem}_spectrum.png", analytic=(hs[finite], Ds[finite])))
        elif cfg.figures:
            written.append(plots.plot_spectrum(spec, f"{stem}_spectrum.png"))
        if cfg.figures:
            written.append(plots.plot_scaling(om, f"{stem}_scaling.png"))
            written.append(plots.plot_structure(sf, f"{stem}_structure.png"))

    report = io.make_report("analyze", payload, prov)
    io.write_json(f"{stem}_report.json", report)
    written.append(f"{stem}_report.json")
    for w in written:
        print(w)
    return 0


def cmd_pointwise(args) -> int:
    cfg = _config_from_args(args)
    if not cfg.points:
        raise ConfigError("points: at least one point is required")
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    prov = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    kind, obj = _load_input(args.input, args.offset)
    if kind == "measure":
        raise ConfigError("points: pointwise estimates need a signal or pyramid input")
    pyr = _pyramid_for(kind, obj, cfg)
    lp = compute_leaders(pyr)
    fit = tuple(cfg.fit) if cfg.fit else default_fit_window(pyr.J)
    stem = outdir / Path(args.input).stem
    records = []
    series_list = []
    written = []
    for x in cfg.points:
        ser = local_leaders(lp, x)
        series_list.append(ser)
        est = estimate_exponent(ser, fit_range=fit, ignore_contamination=True)
        alpha = args.alpha if args.alpha is not None else (
            est.regression if np.isfinite(est.regression) else 1.0
        )
        cert = irregularity_certificate(ser, alpha=max(alpha, 1e-3))
        rec = {
            "x0": x,
            "liminf": est.liminf,
            "limsup": est.limsup,
            "limit": est.limit,
            "regression": est.regression,
            "r2": est.r2,
            "fit_range": est.fit_range,
            "contaminated_scales": ser.j_values[ser.contaminated].tolist(),
            "certificate": cert.to_dict(),
        }
        if cfg.oscillation:
            if kind != "signal":
                raise ConfigError("oscillation: cross-check needs a signal input")
            radii = [2.0 ** (-j) for j in range(3, min(11, pyr.J - 3))]
            osc = oscillation_exponents(obj, x, radii, M=1)
            rec["oscillation"] = {
                "liminf": osc.liminf, "limsup": osc.limsup,
                "regression": osc.regression, "r2": osc.r2,
            }
        phi = rho_phi(Fraction(x).limit_denominator(10**12), N=512)
        rec["phi_hat"] = phi.phi
        records.append(rec)
        tag = f"{x:.6f}".rstrip("0").rstrip(".").replace(".", "p")
        io.write_local_leader_csv(f"{stem}_leaders_x{tag}.csv", ser, prov)
        written.append(f"{stem}_leaders_x{tag}.csv")
    report = io.make_report("pointwise", {"input": str(args.input), "points": records}, prov)
    io.write_json(f"{stem}_pointwise.json", report)
    written.append(f"{stem}_pointwise.json")
    if cfg.figures:
        written.append(plots.plot_local_leaders(series_list, f"{stem}_pointwise.png", fit))
    for w in written:
        print(w)
    return 0


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        raise ConfigError(f"suite: unknown suite {args.suite!r}; have {', '.join(SUITES)}")
    results, ok = run_suites(names)
    for r in results:
        print(format_result_line(r))
    prov = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    # runtimes go to a separate sidecar so the report itself is deterministic
    report_entries = []
    timing_entries = []
    for r in results:
        d = r.to_dict()
        timing_entries.append({"suite": d["suite"], "name": d["name"],
                               "runtime_s": d.pop("runtime_s")})
        d["measured"] = {k: v for k, v in d["measured"].items() if k != "runtime_s"}
        report_entries.append(d)
    tag = args.suite.replace("/", "_")
    io.write_json(outdir / f"verify_{tag}.json",
                  io.make_report("verify", {"results": report_entries, "passed": ok}, prov))
    io.write_json(outdir / f"verify_{tag}.timings.json",
                  io.make_report("verify-timings", {"timings": timing_entries}, prov))
    return 0 if ok else 2


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "pointwise":
            return cmd_pointwise(args)
        if args.command == "verify":
            return cmd_verify(args)
    except (ConfigError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MFLeadersError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
