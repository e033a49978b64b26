"""Command line front end.

Exit codes: 0 success, 1 a check or computation failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import core
from .checks import SUITES, run_checks
from .core import GrassmannElement, MultiIndex, conjugate, invert, multiply, p_norm
from .distributions import WeightSystem, growth_threshold, weighted_norm
from .errors import GrassfockError
from .fock import berezin_integral
from .process import (
    ProcessModel,
    SpectralDensity,
    covariance_matrix,
    covariance_oracle,
    fbm_closed_form,
    pettis_integral,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError(f"bad grid {text!r}")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(n)


def _load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _write(out, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _element(data) -> GrassmannElement:
    if isinstance(data, (int, float)):
        return GrassmannElement({0: data})
    if isinstance(data, list) and len(data) == 2 and all(isinstance(v, (int, float)) for v in data):
        return GrassmannElement({0: complex(*data)})
    return GrassmannElement.from_json_dict(data)


def _weights(args, cfg) -> WeightSystem:
    wc = dict(cfg.get("weights", {}))
    if getattr(args, "lam", None) is not None:
        wc["lambda"] = args.lam
    wc.setdefault("G_max", core.g_max())
    return WeightSystem.from_config(wc)


def _density(args, cfg) -> SpectralDensity:
    if getattr(args, "bm", False):
        return SpectralDensity.constant()
    if getattr(args, "H", None) is not None:
        return SpectralDensity.power_law(args.H)
    if "density" in cfg.get("model", cfg):
        return SpectralDensity.from_config(cfg.get("model", cfg)["density"])
    raise UsageError("one of --H or --bm is required")


def _model(args, cfg, density) -> ProcessModel:
    mc = dict(cfg.get("model", {}))
    mc.pop("density", None)
    if getattr(args, "n_max", None) is not None:
        mc["n_max"] = args.n_max
    for key in ("U", "M", "t_max"):
        val = getattr(args, key, None)
        if val is not None:
            mc[key] = val
    mc.setdefault("g_max", core.g_max())
    return ProcessModel(density=density, **mc)


# --------------------------------------------------------------------------


def cmd_check(args, cfg) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    weights = _weights(args, cfg)
    if any(s in ("vage", "norms", "operators") for s in suites):
        thr = growth_threshold(1)
        if weights.lambda_min <= thr:
            raise UsageError(
                "weight growth condition of the product inequality violated: "
                f"need lambda > ln(2)/2 = {thr:.6g}, got {weights.lambda_min:g}"
            )
    c = cfg.get("check", {})
    seed = args.seed if args.seed is not None else c.get("seed", 0)
    samples = args.samples if args.samples is not None else c.get("samples", 1000)
    if samples < 1:
        raise UsageError("--samples must be positive")
    report = run_checks(suites, seed=seed, samples=samples, weights=weights)
    _write(args.out, json.dumps(report.to_json_dict(), indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_covariance(args, cfg) -> int:
    density = _density(args, cfg)
    ts = _parse_grid(args.t_grid)
    ss = _parse_grid(args.s_grid) if args.s_grid else ts
    model = _model(args, cfg, density)
    if max(np.abs(ts).max(), np.abs(ss).max()) > model.t_max:
        raise UsageError(f"grid leaves the window |t| <= t_max = {model.t_max}")
    H = 0.5 if density.form == "constant" else density.H
    K = covariance_matrix(model, ts, ss)
    rows = []
    worst = 0.0
    scales = []
    for i, t in enumerate(ts):
        for j, s in enumerate(ss):
            ko = covariance_oracle(density, t, s)
            kc = fbm_closed_form(t, s, H) if H is not None else float("nan")
            d = abs(K[i, j] - ko)
            rel = d / abs(ko) if ko != 0 else (0.0 if d == 0 else math.inf)
            worst = max(worst, rel)
            if kc != 0 and np.isfinite(kc):
                scales.append(ko / kc)
            rows.append([t, s, K[i, j], ko, kc, rel])
    lines = []
    writer = csv.writer(_Lines(lines), lineterminator="\n")
    writer.writerow(["t", "s", "K_series", "K_oracle", "K_closed_form", "rel_err"])
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    writer.writerow(["max", "", "", "", "", _fmt(worst)])
    _write(args.out, "".join(lines))
    if scales:
        sc = np.array(scales)
        summary = {
            "max_rel_err": worst,
            "fitted_scale": float(sc.mean()),
            "scale_spread": float((sc.max() - sc.min()) / abs(sc.mean())),
        }
        print(json.dumps(summary), file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


class _Lines:
    def __init__(self, sink):
        self.sink = sink

    def write(self, s):
        self.sink.append(s)


def _y_function(data) -> Callable[[float], GrassmannElement]:
    if "constant" in data:
        val = _element(data["constant"])
        return lambda t: val
    if "pieces" in data:
        pieces = []
        for p in data["pieces"]:
            poly = [_element(c) for c in p["poly"]]
            pieces.append((float(p["start"]), float(p["end"]), poly))

        def y(t):
            for lo, hi, poly in pieces:
                if lo <= t <= hi:
                    acc = GrassmannElement()
                    for k, c in enumerate(poly):
                        acc = acc + c.scale(t**k)
                    return acc
            raise ValueError(f"Y is not defined at t={t}")

        return y
    raise UsageError("Y must have a 'constant' or 'pieces' entry")


def cmd_integrate(args, cfg) -> int:
    density = _density(args, cfg)
    try:
        y = _y_function(_load_json(args.Y))
        g = _element(_load_json(args.g))
    except (UsageError, KeyError, TypeError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.steps < 4:
        raise UsageError("--steps must be >= 4")
    model = _model(args, cfg, density)
    weights = _weights(args, cfg)
    ladder = [max(1, args.steps // 4), max(1, args.steps // 2), args.steps]
    results = [pettis_integral(model, y, g, args.a, args.b, n) for n in ladder]
    table = []
    for k, n in enumerate(ladder):
        inc = None if k == 0 else weighted_norm(results[k] - results[k - 1], args.p, weights)
        table.append({"steps": n, "increment": inc})
    inc = [r["increment"] for r in table[1:]]
    out = {
        "result": results[-1].to_json_dict(),
        "norm_order": args.p,
        "convergence": table,
        # midpoint sums are second order, so the last increment over-estimates the error by ~3x
        "tolerance": inc[-1],
        "increment_ratio": (inc[0] / inc[1]) if inc[1] else None,
    }
    _write(args.out, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def _run_program(prog, weights: WeightSystem):
    if isinstance(prog, dict):
        env = {k: _element(v) for k, v in prog.get("elements", {}).items()}
        ops = prog.get("ops", [])
    else:
        env, ops = {}, prog
    acc = GrassmannElement()
    scalar = None

    def get(name):
        if name == "_":
            return acc
        if name not in env:
            raise KeyError(f"unknown element {name!r}")
        return env[name]

    for op in ops:
        kind = op["op"]
        scalar = None
        if kind == "let":
            env[op["name"]] = _element(op["value"])
        elif kind == "load":
            acc = _element(op["value"]) if "value" in op else get(op["name"])
        elif kind == "store":
            env[op["name"]] = acc
        elif kind in ("multiply", "add"):
            x, y = (get(a) for a in op.get("args", ["_", op.get("name")]))
            acc = multiply(x, y) if kind == "multiply" else x + y
        elif kind == "conjugate":
            acc = conjugate(acc, op["k"])
        elif kind == "invert":
            acc = invert(acc)
        elif kind == "berezin":
            acc = berezin_integral(MultiIndex.from_gens(op["gens"]), acc)
        elif kind == "norm":
            scalar = p_norm(acc, op.get("p", 2))
            acc = GrassmannElement({0: scalar})
        elif kind == "weighted_norm":
            w = WeightSystem.linear(op["lambda"], weights.g_max) if "lambda" in op else weights
            scalar = weighted_norm(acc, op.get("p", 1), w)
            acc = GrassmannElement({0: scalar})
        else:
            raise ValueError(f"unknown op {kind!r}")
    return acc, scalar


def cmd_eval(args, cfg) -> int:
    prog = _load_json(args.program)
    weights = _weights(args, cfg)
    try:
        result, scalar = _run_program(prog, weights)
    except GrassfockError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (KeyError, TypeError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = {"result": result.to_json_dict()}
    if scalar is not None:
        out["value"] = scalar
    _write(args.out, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------


def _model_flags(p):
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--H", type=float, help="power-law spectral density |u|^(1-2H)")
    grp.add_argument("--bm", action="store_true", help="constant density (Brownian motion)")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--U", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grassfock", description=__doc__)
    ap.add_argument("--config", help="JSON config; flags override its values")
    ap.add_argument("--g-max", dest="g_max", type=int, help="generator budget")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="run randomized property suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--lambda", dest="lam", type=float, help="linear weight growth rate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("covariance", help="covariance table against the kernel oracle")
    _model_flags(p)
    p.add_argument("--t-grid", required=True)
    p.add_argument("--s-grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_covariance)

    p = sub.add_parser("integrate", help="Riemann-sum stochastic integral")
    _model_flags(p)
    p.add_argument("--g", required=True, help="JSON element")
    p.add_argument("--Y", required=True, help="JSON integrand: constant or piecewise polynomial")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--steps", type=int, default=256)
    p.add_argument("--p", type=int, default=1, help="order of the reporting norm")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("eval", help="evaluate a JSON algebra program")
    p.add_argument("--program", required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _load_json(args.config) if args.config else {}
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        g = args.g_max if args.g_max is not None else cfg.get("g_max", core.DEFAULT_G_MAX)
        if g < 1:
            raise UsageError("--g-max must be positive")
        core.configure(g)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GrassfockError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # precondition violations raised before any computation runs
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
