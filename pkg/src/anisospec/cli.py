"""Experiment runner: config ingestion, deterministic outputs, exit codes.

Subcommands: toy, resolution-check, quantize-probes, escape-sweep,
suspension, weyl-boxes, verify-all.  Configuration is a flat key=value file
plus command-line overrides; unknown keys are rejected.  Every run writes a
manifest echoing the resolved config and the library version.  Exit codes:
0 success, 1 assertion/certification failure, 2 config parse error,
3 resolution error.  RUELLE_THREADS caps the parallelism of verify-all.
"""

from __future__ import annotations

import argparse
import json
import os
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import CertificationError, ResolutionError


class ConfigError(ValueError):
    pass


def _parse_scalar(text):
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config(path, known_keys):
    """Flat key=value file; unknown keys are rejected."""
    cfg = {}
    for line_no, raw in enumerate(pathlib.Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known_keys:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        cfg[key] = _parse_scalar(value)
    return cfg


def resolve_config(args, defaults):
    """defaults <- config file <- explicit CLI flags.

    Values are coerced to the default's type so the manifest is identical
    whether a value arrived via file or flag.
    """
    cfg = dict(defaults)
    if args.config:
        cfg.update(load_config(args.config, set(defaults)))
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key, default in defaults.items():
        cast = _CASTS.get(key, type(default))
        try:
            cfg[key] = cast(cfg[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"key {key!r}: {exc}") from exc
    return cfg


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"unserializable {type(o)}")


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=1, sort_keys=True,
                               default=_json_default) + "\n")


def write_manifest(outdir, command, cfg):
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "manifest.json",
               {"command": command, "config": cfg, "version": __version__})


def thread_cap() -> int:
    raw = os.environ.get("RUELLE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return max(1, os.cpu_count() or 1)


# -- subcommands -------------------------------------------------------------


TOY_DEFAULTS = dict(w0=0.5 + 0.0j, w1=0.5 + 0.0j, r=1.0, window=50,
                    section_n=400, seed=0, output_dir="out/toy",
                    format="json")


def run_toy(cfg):
    from .shift_model import (ShiftModel, eigen_residual, eigvec_U, eigvec_V,
                              finite_section_report, hw_membership)

    half = int(cfg["window"])
    model = ShiftModel(w0=cfg["w0"], w1=cfg["w1"], r=float(cfg["r"]),
                       window=(-half, half))
    seq_u, seq_v = eigvec_U(model), eigvec_V(model)
    report = finite_section_report(model, int(cfg["section_n"]))
    out = {
        "memberships": {
            "U": hw_membership(seq_u, model.r),
            "V": hw_membership(seq_v, model.r),
        },
        "eigencheck_residuals": {
            "U": eigen_residual(model, seq_u, model.w0),
            "V": eigen_residual(model, seq_v, model.w1),
        },
        "section_eigs": [[z.real, z.imag]
                         for z in np.sort_complex(report["section_eigs"])],
        "essential_radius": report["essential_radius"],
        "w0_found_in_section": report["w0_found"],
    }
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "toy", cfg)
    write_json(outdir / "toy.json", out)
    ok = out["eigencheck_residuals"]["U"] <= 1e-12 \
        and out["eigencheck_residuals"]["V"] <= 1e-12
    return 0 if ok else 1


RESOLUTION_DEFAULTS = dict(points=128, length=float(np.pi), band=2,
                           windows="7,10,14", delta0=1.0, alpha_perp=0.5,
                           alpha_par=0.5, seed=5, output_dir="out/resolution",
                           format="json")


def run_resolution_check(cfg):
    from .bracket_metric import MetricParams
    from .wavepackets import BargmannTransform, TorusGrid

    p = MetricParams(float(cfg["delta0"]), float(cfg["alpha_perp"]),
                     float(cfg["alpha_par"]))
    g = TorusGrid(1, int(cfg["points"]), length=float(cfg["length"]))
    band = int(cfg["band"])
    rng = np.random.default_rng(int(cfg["seed"]))
    xg, zg = g.space_grids()
    u = np.zeros(g.shape, dtype=complex)
    for kx in range(-band, band + 1):
        for kz in range(-band, band + 1):
            u += (rng.normal() + 1j * rng.normal()) \
                * np.exp(1j * g.d_eta * (kx * xg + kz * zg))
    windows = [int(w) for w in str(cfg["windows"]).split(",")]
    levels = []
    for win in windows:
        tr = BargmannTransform(g, p, window=win)
        rec = tr.op_apply(u)
        levels.append({
            "window": win,
            "residual": float(np.linalg.norm(rec - u) / np.linalg.norm(u)),
        })
    decreasing = all(levels[i + 1]["residual"] < levels[i]["residual"]
                     for i in range(len(levels) - 1))
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "resolution-check", cfg)
    write_json(outdir / "resolution.json",
               {"levels": levels, "decreasing": decreasing,
                "pass": decreasing and levels[0]["residual"] <= 1e-3})
    return 0 if decreasing and levels[0]["residual"] <= 1e-3 else 1


QUANTIZE_DEFAULTS = dict(points=128, window=16, band=4, weight_order=1.0,
                         seed=0, output_dir="out/quantize", format="json")


def run_quantize_probes(cfg):
    from . import frozen
    from .bracket_metric import MetricParams, jbracket
    from .quantize import (BandSubspace, FlowModel, Symbol, WeightedSpace,
                           composition_residual, constant_symbol,
                           egorov_residual)
    from .wavepackets import BargmannTransform, TorusGrid

    p = MetricParams(1.0, 0.5, 0.5)
    g = TorusGrid(0, int(cfg["points"]))
    tr = BargmannTransform(g, p, window=int(cfg["window"]))
    band = BandSubspace(g, int(cfg["band"]))
    r_ord = float(cfg["weight_order"])
    space = WeightedSpace(
        weight=lambda sg, eta: jbracket(eta[-1]) ** r_ord
        * np.ones_like(sg[0]), transform=tr)

    def bump(z0, om0, wz, wom, hval):
        return Symbol(
            fn=lambda sg, eta: np.exp(-2.0 * (1.0 - np.cos(sg[0] - z0))
                                      / (2 * wz**2)
                                      - ((eta[-1] - om0) / wom) ** 2 / 2),
            h=lambda sg, eta: hval * np.ones_like(sg[0]), n0=1.0)

    base_params = {"points": int(cfg["points"]), "window": int(cfg["window"]),
                   "band": int(cfg["band"]),
                   "weight_order": float(cfg["weight_order"])}
    records = []
    sa, sb = bump(2.0, 4.0, 2.0, 8.0, 0.2), bump(3.5, -2.0, 2.5, 10.0, 0.2)
    est, bound = composition_residual(sa, constant_symbol(2.0), space, band,
                                      frozen.COMPOSITION_C)
    records.append({"probe": "composition_b_constant", "params": base_params,
                    "residual": est, "bound": frozen.COMPOSITION_FLOOR,
                    "pass": est <= frozen.COMPOSITION_FLOOR})
    est, bound = composition_residual(sa, sb, space, band,
                                      frozen.COMPOSITION_C)
    records.append({"probe": "composition_bumps", "params": base_params,
                    "residual": est, "bound": bound, "pass": est <= bound})
    flow = FlowModel.circle_rotation()
    for t in (0.5, 1.0, 2.0):
        est, bound = egorov_residual(sa, t, flow, space, band,
                                     frozen.EGOROV_CT[t])
        records.append({"probe": f"egorov_t{t}",
                        "params": {**base_params, "t": t},
                        "residual": est, "bound": bound,
                        "pass": est <= bound})
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "quantize-probes", cfg)
    write_json(outdir / "probes.json", {"records": records})
    return 0 if all(r["pass"] for r in records) else 1


ESCAPE_DEFAULTS = dict(r_u=8.0, r_s=8.0, gamma=0.0, gamma_prime=0.0, h0=1.0,
                       variant="W_lemma42", t_avg=4.0, delta0=1.0,
                       alpha_perp=0.5, alpha_par=0.0, grid_max=16.0,
                       grid_points=9, omega=1.0, seed=0,
                       output_dir="out/escape", format="csv")


def run_escape_sweep(cfg):
    from .bracket_metric import MetricParams
    from .escape import (EscapeConfig, decay_rate_fit, order_estimate,
                         theoretical_decay_rate, theoretical_orders,
                         weight_field_csv)
    from .suspension import MappingTorus

    p = MetricParams(float(cfg["delta0"]), float(cfg["alpha_perp"]),
                     float(cfg["alpha_par"]))
    ec = EscapeConfig(r_u=float(cfg["r_u"]), r_s=float(cfg["r_s"]),
                      gamma=float(cfg["gamma"]),
                      gamma_prime=float(cfg["gamma_prime"]),
                      h0=float(cfg["h0"]), variant=str(cfg["variant"]),
                      t_avg=float(cfg["t_avg"]))
    split = MappingTorus().dual_splitting()
    vals = np.linspace(-float(cfg["grid_max"]), float(cfg["grid_max"]),
                       int(cfg["grid_points"]))
    csv_text = weight_field_csv(split, ec, p, vals, vals,
                                [float(cfg["omega"])])
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "escape-sweep", cfg)
    (outdir / "weight_field.csv").write_text(csv_text)
    summary = {
        "decay_rate_fit": -decay_rate_fit(1.0e5, 0.0, 1.0,
                                          np.linspace(0, 3, 13),
                                          split, ec, p),
        "decay_rate_theory": theoretical_decay_rate(split, ec, p),
        "orders": {k: order_estimate(d, split, ec, p)
                   for k, d in (("unstable", (1.0, 0.0, 0.0)),
                                ("stable", (0.0, 1.0, 0.0)))},
        "orders_theory": theoretical_orders(ec, p),
    }
    write_json(outdir / "summary.json", summary)
    return 0


SUSPENSION_DEFAULTS = dict(k_max=5, nu_max=20, R=8.0, threshold=float(np.exp(-3.0)),
                           gamma=0.0, delta0=1.0, alpha_perp=0.5,
                           alpha_par=0.0, seed=0, output_dir="out/suspension",
                           format="json")


def run_suspension(cfg):
    from .bracket_metric import MetricParams
    from .escape import EscapeConfig
    from .suspension import MappingTorus, full_spectrum

    p = MetricParams(float(cfg["delta0"]), float(cfg["alpha_perp"]),
                     float(cfg["alpha_par"]))
    ec = EscapeConfig(r_u=float(cfg["R"]), r_s=float(cfg["R"]),
                      gamma=float(cfg["gamma"]))
    res = full_spectrum(int(cfg["k_max"]), int(cfg["nu_max"]), ec,
                        float(cfg["threshold"]), MappingTorus(), p)
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "suspension", cfg)
    write_json(outdir / "spectrum.json", res.to_json_records())
    lines = ["nu1,nu2,norm_bound,pass"]
    for c in res.certificates:
        lines.append(f"{c['nu'][0]},{c['nu'][1]},{c['norm_bound']!r},"
                     f"{str(c['pass']).lower()}")
    (outdir / "certificates.csv").write_text("\n".join(lines) + "\n")
    return 0 if all(c["pass"] for c in res.certificates) else 1


WEYL_DEFAULTS = dict(beta0=0.5, n=1, omega_min=64.0, omega_max=16384.0,
                     alpha_grid="0.5:0.95:0.025", seed=3,
                     output_dir="out/weyl", format="csv")


def run_weyl_boxes(cfg):
    from .fractal_count import box_count, optimal_alpha, synth_holder

    lo, hi, step = (float(v) for v in str(cfg["alpha_grid"]).split(":"))
    alphas = np.arange(lo, hi + 1e-9, step)
    omegas = []
    om = float(cfg["omega_min"])
    while om <= float(cfg["omega_max"]) * (1 + 1e-9):
        omegas.append(om)
        om *= 2.0
    form = synth_holder(float(cfg["beta0"]), seed=int(cfg["seed"]),
                        n=int(cfg["n"]))
    lines = ["omega,alpha,count"]
    for omv in omegas:
        for al in alphas:
            try:
                c = box_count(form, omv, float(al))
            except ResolutionError:
                continue
            lines.append(f"{omv!r},{float(al)!r},{c}")
    a_star, e_star = optimal_alpha(form, omegas, alphas)
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "weyl-boxes", cfg)
    (outdir / "counts.csv").write_text("\n".join(lines) + "\n")
    write_json(outdir / "summary.json",
               {"alpha_star": a_star, "exponent_star": e_star,
                "theory": 1.0 / (1.0 + float(cfg["beta0"]))})
    return 0


VERIFY_DEFAULTS = dict(criteria="all", seed=0, output_dir="out/verify",
                       format="json")


def run_verify_all(cfg):
    from .acceptance import ALL_CRITERIA

    wanted = str(cfg["criteria"])
    fns = ALL_CRITERIA if wanted == "all" else \
        [ALL_CRITERIA[int(i) - 1] for i in wanted.split(",")]
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        results = list(pool.map(lambda fn: fn(), fns))
    results.sort(key=lambda r: r.index)
    for r in results:
        print(r.line())
    outdir = pathlib.Path(cfg["output_dir"])
    write_manifest(outdir, "verify-all", cfg)
    write_json(outdir / "results.json",
               [{"index": r.index, "name": r.name, "passed": r.passed,
                 "detail": r.detail} for r in results])
    return 0 if all(r.passed for r in results) else 1


SUBCOMMANDS = {
    "toy": (TOY_DEFAULTS, run_toy),
    "resolution-check": (RESOLUTION_DEFAULTS, run_resolution_check),
    "quantize-probes": (QUANTIZE_DEFAULTS, run_quantize_probes),
    "escape-sweep": (ESCAPE_DEFAULTS, run_escape_sweep),
    "suspension": (SUSPENSION_DEFAULTS, run_suspension),
    "weyl-boxes": (WEYL_DEFAULTS, run_weyl_boxes),
    "verify-all": (VERIFY_DEFAULTS, run_verify_all),
}

_CASTS = {"w0": complex, "w1": complex}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anisospec",
        description="Desk-scale spectral experiments for hyperbolic "
                    "transfer operators")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (defaults, _) in SUBCOMMANDS.items():
        sp = subs.add_parser(name)
        sp.add_argument("--config", default=None,
                        help="flat key=value config file")
        for key, default in defaults.items():
            cast = _CASTS.get(key, type(default))
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key,
                            type=cast if cast is not bool else str,
                            default=None,
                            help=f"default: {default}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    defaults, runner = SUBCOMMANDS[args.command]
    try:
        cfg = resolve_config(args, defaults)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return runner(cfg)
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return 3
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
