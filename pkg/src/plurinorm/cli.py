"""Command-line front end: configured runs with reproducible reports.

Four commands drive the library: ``norm`` (weighted norms via level
traces), ``counting`` (counting-function sweeps as CSV), ``verify``
(two-sided identity suites), and ``compop`` (composition-operator
diagnostics and the quadratic sharpness sweep).

Parameters come from an optional JSON config file (``--config``) merged
with flags; flags win.  Every output file embeds the artifact version,
the random seed, and a SHA-256 hash of the effective computational
parameters, and identical parameters produce byte-identical files
regardless of PLURINORM_THREADS (threads change wall time, not values).

Exit codes: 0 success, 1 input error, 2 unconverged result,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import re
import sys

import numpy as np

from . import __version__
from .compops import (
    boundedness_diagnostic,
    deficiency_profile,
    kernel_necessity,
    quadratic_sharpness_sweep,
)
from .counting import counting_1d, fiber_quadrature_2d
from .errors import InfiniteCountingError, ParameterError, PlurinormError
from .functions import HoloMap, identity_map, parse_function
from .geometry import UNIT_DISK, domain_by_name, green_pole, log_abs, smooth_square
from .identities import format_reports, run_verify_suite
from .spaces import bergman_norm

__all__ = ["main"]

_BUDGET_WORDS = {"low": 1, "default": 2, "high": 4}

_DEFAULTS = {
    "norm": {
        "domain": "disk", "exhaustion": "log", "f": None, "p": 2.0,
        "alpha": -1.0, "budget": 1, "resolution": None, "seed": 0,
        "output": None,
    },
    "counting": {
        "domain": "disk", "exhaustion": "log", "F": None, "alpha": -1.0,
        "w_grid": None, "w": None, "r_grid": None, "resolution": None,
        "seed": 0, "output": None,
    },
    "verify": {
        "name": "all", "budget": "default", "seed": 0, "output": None,
    },
    "compop-diagnose": {
        "domain": "disk", "exhaustion": "log", "F": None, "alpha": None,
        "beta": None, "radii": None, "rays": 8, "resolution": None,
        "eps": 0.1, "seed": 0, "output": None, "table": None,
    },
    "compop-deficiency": {
        "domain": "disk", "exhaustion": "log", "F": None, "alpha": None,
        "beta": None, "r_grid": None, "rays": 8, "samples": 24,
        "resolution": None, "eps": 0.1, "seed": 0, "output": None,
        "table": None,
    },
    "compop-necessity": {
        "domain": "disk", "exhaustion": "log", "F": None, "z0": None,
        "p": 2.0, "alpha": None, "beta": None, "a": 2.0,
        "window_level": -1.0, "resolution": None, "seed": 0, "output": None,
    },
    "compop-sweep-quadratic": {
        "beta": "-1,0", "radii": None, "fractions": None, "resolution": 512,
        "seed": 0, "output": None, "json": None,
    },
}


# -- small parsers ----------------------------------------------------


def _floats(text, field):
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ParameterError(f"{field}: expected comma-separated numbers, "
                             f"got {text!r}") from exc


def _parse_complex(text, field):
    vals = _floats(text, field)
    if len(vals) == 1:
        return complex(vals[0], 0.0)
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise ParameterError(f"{field}: expected 're' or 're,im', got {text!r}")


def _parse_w_grid(text):
    t = str(text).strip()
    if not t.startswith("radial"):
        raise ParameterError(f"w-grid: expected 'radial A..B[:N]', got {text!r}")
    body = t[len("radial"):].strip()
    n = 9
    if ":" in body:
        body, _, tail = body.rpartition(":")
        try:
            n = int(tail)
        except ValueError as exc:
            raise ParameterError(f"w-grid: bad point count {tail!r}") from exc
    lo, sep, hi = body.partition("..")
    if not sep:
        raise ParameterError(f"w-grid: expected 'radial A..B[:N]', got {text!r}")
    try:
        a, b = float(lo), float(hi)
    except ValueError as exc:
        raise ParameterError(f"w-grid: bad endpoints in {text!r}") from exc
    if n < 1 or a <= 0.0 or b < a:
        raise ParameterError("w-grid: radii must satisfy 0 < A <= B, N >= 1")
    return [complex(x, 0.0) for x in np.linspace(a, b, n)]


def _parse_exhaustion(text, domain):
    t = str(text).strip()
    if t == "log":
        return log_abs(domain)
    if t == "smooth":
        return smooth_square(domain)
    if t.startswith("green:"):
        vals = _floats(t[len("green:"):], "exhaustion")
        if domain.n == 1:
            if len(vals) not in (1, 2):
                raise ParameterError("exhaustion: green pole on the disk "
                                     "takes 're' or 're,im'")
            pole = complex(vals[0], vals[1] if len(vals) == 2 else 0.0)
        else:
            if len(vals) != 4:
                raise ParameterError("exhaustion: green pole in two "
                                     "variables takes 're1,im1,re2,im2'")
            pole = np.array([complex(vals[0], vals[1]),
                             complex(vals[2], vals[3])])
        return green_pole(domain, pole)
    raise ParameterError(
        f"exhaustion: unknown kind {text!r}; use log, smooth, or green:<pole>")


def _parse_map(text, domain, check=False):
    """A self-map description: 'identity' or an expression over z/z1,z2.

    With check=True an expression is additionally screened for
    containment of its image in the closed unit disk (sampled on the
    Shilov boundary); an escape raises with a witness point.
    """
    if text is None:
        raise ParameterError("F: a map expression is required")
    t = str(text).strip()
    if t == "identity":
        return identity_map(domain)
    poly = parse_function(t, domain.n)
    if check:
        return HoloMap([poly], domain, UNIT_DISK, check=True)
    return poly


# -- config plumbing --------------------------------------------------


def _effective(args, command):
    cfg = dict(_DEFAULTS[command])
    path = getattr(args, "config", None)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ParameterError("config: top level must be a JSON object")
        for key, val in data.items():
            norm_key = key.replace("-", "_")
            if norm_key not in cfg:
                raise ParameterError(
                    f"config: unknown field {key!r} for command {command!r}")
            cfg[norm_key] = val
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _meta(command, cfg):
    canon = {"command": command}
    for key in sorted(cfg):
        if key in ("output", "table", "json"):
            continue
        canon[key] = cfg[key]
    blob = json.dumps(canon, sort_keys=True, separators=(",", ":"),
                      default=repr)
    return {
        "config_sha256": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
        "seed": int(cfg.get("seed", 0)),
        "version": __version__,
    }


def _write_json(path, payload):
    text = json.dumps(payload, sort_keys=True, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _meta_line(meta):
    return (f"# version={meta['version']} seed={meta['seed']} "
            f"config={meta['config_sha256']}")


def _write_csv(path, header, rows, meta):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(_meta_line(meta) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return x


# -- commands ---------------------------------------------------------


def _cmd_norm(args):
    cfg = _effective(args, "norm")
    if cfg["f"] is None:
        raise ParameterError("f: a function expression is required")
    domain = domain_by_name(str(cfg["domain"]))
    u = _parse_exhaustion(cfg["exhaustion"], domain)
    f = parse_function(str(cfg["f"]), domain.n)
    resolution = cfg["resolution"]
    result = bergman_norm(f, u, float(cfg["p"]), float(cfg["alpha"]),
                          budget=int(cfg["budget"]),
                          resolution=None if resolution is None
                          else int(resolution))
    meta = _meta("norm", cfg)
    payload = {"meta": meta, "norm": result.to_json_dict()}
    if cfg["output"]:
        _write_json(cfg["output"], payload)
    print(f"norm value = {result.value!r} (p={cfg['p']}, "
          f"alpha={cfg['alpha']}, converged={result.converged})")
    return 0 if result.converged else 2


def _counting_rows(F, u, w, alpha, r_grid, resolution, two_dim):
    try:
        if two_dim:
            sample = fiber_quadrature_2d(
                F, u, w, alpha=alpha, r_grid=r_grid,
                resolution=256 if resolution is None else int(resolution))
        else:
            sample = counting_1d(F, u, w, alpha=alpha, r_grid=r_grid)
    except InfiniteCountingError:
        inf = float("inf")
        if r_grid is None:
            return [(w.real, w.imag, None, None, inf, "infinite")]
        return [(w.real, w.imag, float(r), inf, inf, "infinite")
                for r in r_grid]
    if r_grid is None:
        return [(w.real, w.imag, None, None, float(sample.N_alpha), "")]
    return [row + ("",) for row in sample.rows()]


def _cmd_counting(args):
    cfg = _effective(args, "counting")
    if isinstance(cfg["w_grid"], list):
        # The flag is greedy (nargs); normalize before the config hash so
        # quoted and unquoted spellings of a grid hash identically.
        cfg["w_grid"] = " ".join(str(t) for t in cfg["w_grid"])
    domain = domain_by_name(str(cfg["domain"]))
    u = _parse_exhaustion(cfg["exhaustion"], domain)
    F = _parse_map(cfg["F"], domain)
    if isinstance(F, HoloMap):
        if len(F.components) != 1:
            raise ParameterError("counting needs a scalar map")
        F = F.components[0]
    targets = []
    if cfg["w_grid"] is not None:
        targets.extend(_parse_w_grid(cfg["w_grid"]))
    if cfg["w"] is not None:
        entries = cfg["w"] if isinstance(cfg["w"], list) else [cfg["w"]]
        targets.extend(_parse_complex(e, "w") for e in entries)
    if not targets:
        raise ParameterError("counting: give --w-grid and/or --w targets")
    r_grid = None
    if cfg["r_grid"] is not None:
        r_grid = _floats(cfg["r_grid"], "r-grid")
    alpha = float(cfg["alpha"])
    rows = []
    for w in targets:
        rows.extend(_counting_rows(F, u, w, alpha, r_grid,
                                   cfg["resolution"], domain.n == 2))
    meta = _meta("counting", cfg)
    header = ("w_re", "w_im", "r", "n", "N", "flag")
    out_rows = [tuple(_cell(x) for x in row) for row in rows]
    if cfg["output"]:
        _write_csv(cfg["output"], header, out_rows, meta)
        print(f"counting: wrote {len(out_rows)} rows to {cfg['output']}")
    else:
        print(_meta_line(meta))
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(out_rows)
    return 0


def _cmd_verify(args):
    cfg = _effective(args, "verify")
    raw_budget = cfg["budget"]
    if isinstance(raw_budget, str) and not raw_budget.isdigit():
        if raw_budget not in _BUDGET_WORDS:
            raise ParameterError(
                f"budget: use low, default, high, or an integer, "
                f"got {raw_budget!r}")
        budget = _BUDGET_WORDS[raw_budget]
    else:
        budget = int(raw_budget)
    name = str(cfg["name"])
    names = "all" if name == "all" else [name]
    reports = run_verify_suite(names, budget=budget)
    print(format_reports(reports))
    meta = _meta("verify", cfg)
    if cfg["output"]:
        header = ("identity", "mode", "lhs", "rhs", "rel_err", "abs_err",
                  "tol", "budget", "passed")
        rows = [
            (r.name, r.mode, repr(r.lhs), repr(r.rhs), repr(r.rel_err),
             repr(r.abs_err), repr(r.tol), r.budget, str(r.passed))
            for r in reports
        ]
        _write_csv(cfg["output"], header, rows, meta)
    return 0 if all(r.passed for r in reports) else 3


def _report_outputs(report, cfg, meta, summary):
    payload = {"meta": meta, "report": report.to_json_dict()}
    if cfg["output"]:
        _write_json(cfg["output"], payload)
    if cfg.get("table"):
        header, rows = report.csv_rows()
        _write_csv(cfg["table"], header, rows, meta)
    print(summary)


def _cmd_compop_diagnose(args):
    cfg = _effective(args, "compop-diagnose")
    if cfg["alpha"] is None or cfg["beta"] is None:
        raise ParameterError("alpha and beta are required")
    domain = domain_by_name(str(cfg["domain"]))
    u = _parse_exhaustion(cfg["exhaustion"], domain)
    F = _parse_map(cfg["F"], domain, check=True)
    kwargs = {"rays": int(cfg["rays"]), "eps": float(cfg["eps"])}
    if cfg["radii"] is not None:
        kwargs["radii"] = tuple(_floats(cfg["radii"], "radii"))
    if cfg["resolution"] is not None:
        kwargs["resolution"] = int(cfg["resolution"])
    report = boundedness_diagnostic(F, u, float(cfg["alpha"]),
                                    float(cfg["beta"]), **kwargs)
    meta = _meta("compop-diagnose", cfg)
    _report_outputs(report, cfg, meta,
                    f"classification: {report.classification} "
                    f"(peak ratio {report.peak!r})")
    return 0


def _cmd_compop_deficiency(args):
    cfg = _effective(args, "compop-deficiency")
    if cfg["alpha"] is None or cfg["beta"] is None:
        raise ParameterError("alpha and beta are required")
    domain = domain_by_name(str(cfg["domain"]))
    u = _parse_exhaustion(cfg["exhaustion"], domain)
    F = _parse_map(cfg["F"], domain, check=True)
    kwargs = {"rays": int(cfg["rays"]), "samples": int(cfg["samples"]),
              "eps": float(cfg["eps"])}
    if cfg["r_grid"] is not None:
        kwargs["r_grid"] = tuple(_floats(cfg["r_grid"], "r-grid"))
    if cfg["resolution"] is not None:
        kwargs["resolution"] = int(cfg["resolution"])
    report = deficiency_profile(F, u, float(cfg["alpha"]),
                                float(cfg["beta"]), **kwargs)
    meta = _meta("compop-deficiency", cfg)
    _report_outputs(report, cfg, meta,
                    f"classification: {report.classification} "
                    f"(fitted limit {report.fitted_limit!r})")
    return 0


def _cmd_compop_necessity(args):
    cfg = _effective(args, "compop-necessity")
    for field in ("alpha", "beta", "z0"):
        if cfg[field] is None:
            raise ParameterError(f"{field} is required")
    domain = domain_by_name(str(cfg["domain"]))
    u1 = _parse_exhaustion(cfg["exhaustion"], domain)
    F = _parse_map(cfg["F"], domain, check=True)
    z0 = _parse_complex(cfg["z0"], "z0")
    res = kernel_necessity(
        F, u1, log_abs(UNIT_DISK), float(cfg["p"]), float(cfg["alpha"]),
        float(cfg["beta"]), z0, a=float(cfg["a"]),
        window_level=float(cfg["window_level"]),
        resolution=None if cfg["resolution"] is None
        else int(cfg["resolution"]))
    meta = _meta("compop-necessity", cfg)
    payload = {"meta": meta, "necessity": res.to_json_dict()}
    if cfg["output"]:
        _write_json(cfg["output"], payload)
    print(f"necessity ratio = {res.ratio!r} at |w| = {abs(res.w)!r}")
    return 0


def _cmd_compop_sweep(args):
    cfg = _effective(args, "compop-sweep-quadratic")
    kwargs = {"resolution": int(cfg["resolution"])}
    betas = _floats(cfg["beta"], "beta")
    if not betas:
        raise ParameterError("beta: at least one value is required")
    kwargs["betas"] = tuple(betas)
    if cfg["radii"] is not None:
        kwargs["radii"] = tuple(_floats(cfg["radii"], "radii"))
    if cfg["fractions"] is not None:
        kwargs["fractions"] = tuple(_floats(cfg["fractions"], "fractions"))
    table = quadratic_sharpness_sweep(**kwargs)
    meta = _meta("compop-sweep-quadratic", cfg)
    if cfg["output"]:
        header, rows = table.csv_rows()
        _write_csv(cfg["output"], header, rows, meta)
    if cfg["json"]:
        _write_json(cfg["json"], {"meta": meta, "sweep": table.to_json_dict()})
    print(f"n exponent = {table.n_exponent:.4f} "
          f"(half-width {table.n_half_width:.4f})")
    for beta in kwargs["betas"]:
        exp, half = table.N_exponents[beta]
        print(f"N exponent at beta={beta:g}: {exp:.4f} "
              f"(half-width {half:.4f})")
    return 0


# -- parser -----------------------------------------------------------


class _ArgumentParser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad flags; input errors are 1."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # Level grids are lists of negative numbers; widen the matcher so
        # '--r-grid -2,-1' parses without demanding the --flag=value form.
        self._negative_number_matcher = re.compile(r"^-\d|^-\.\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--seed", type=int, help="random seed recorded in outputs")
    sub.add_argument("--output", help="output file path")


def _build_parser():
    parser = _ArgumentParser(prog="plurinorm",
                             description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version=f"plurinorm {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("norm", help="weighted norm via level traces",
                        parents=[])
    _add_common(p)
    p.add_argument("--domain", choices=("disk", "ball", "bidisk"))
    p.add_argument("--exhaustion", help="log, smooth, or green:<pole>")
    p.add_argument("--f", help="function expression, e.g. 'z^2'")
    p.add_argument("--p", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=_cmd_norm)

    p = subs.add_parser("counting", help="counting-function sweep as CSV")
    _add_common(p)
    p.add_argument("--F", help="map expression or 'identity'")
    p.add_argument("--domain", choices=("disk", "ball"))
    p.add_argument("--exhaustion")
    p.add_argument("--alpha", type=float)
    p.add_argument("--w-grid", dest="w_grid", metavar="SPEC", nargs="+",
                   help="target grid, e.g. 'radial 0.1..0.9' or "
                        "'radial 0.1..0.9:17' (quoting optional)")
    p.add_argument("--w", action="append", metavar="RE[,IM]",
                   help="explicit target, repeatable")
    p.add_argument("--r-grid", dest="r_grid", metavar="R1,R2,...",
                   help="negative exhaustion levels for n(w,r), N(w,r)")
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=_cmd_counting)

    p = subs.add_parser("verify", help="run two-sided identity checks")
    _add_common(p)
    p.add_argument("name", nargs="?", help="identity name or 'all'")
    p.add_argument("--budget", help="low, default, high, or an integer")
    p.set_defaults(func=_cmd_verify)

    p = subs.add_parser("compop", help="composition-operator diagnostics")
    csubs = p.add_subparsers(dest="subcommand", required=True)

    d = csubs.add_parser("diagnose", help="boundedness ratio along radii")
    _add_common(d)
    d.add_argument("--F", help="map expression or 'identity'")
    d.add_argument("--domain", choices=("disk", "ball"))
    d.add_argument("--exhaustion")
    d.add_argument("--alpha", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--radii", metavar="R1,R2,...")
    d.add_argument("--rays", type=int)
    d.add_argument("--resolution", type=int)
    d.add_argument("--eps", type=float)
    d.add_argument("--table", help="CSV path for the raw sample table")
    d.set_defaults(func=_cmd_compop_diagnose)

    d = csubs.add_parser("deficiency", help="deficiency profile over cuts")
    _add_common(d)
    d.add_argument("--F", help="map expression or 'identity'")
    d.add_argument("--domain", choices=("disk", "ball"))
    d.add_argument("--exhaustion")
    d.add_argument("--alpha", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--r-grid", dest="r_grid", metavar="R1,R2,...")
    d.add_argument("--rays", type=int)
    d.add_argument("--samples", type=int)
    d.add_argument("--resolution", type=int)
    d.add_argument("--eps", type=float)
    d.add_argument("--table", help="CSV path for the raw sample table")
    d.set_defaults(func=_cmd_compop_deficiency)

    d = csubs.add_parser("necessity", help="kernel-family necessity ratio")
    _add_common(d)
    d.add_argument("--F", help="map expression or 'identity'")
    d.add_argument("--domain", choices=("disk", "ball"))
    d.add_argument("--exhaustion")
    d.add_argument("--z0", metavar="RE[,IM]", help="kernel peak point")
    d.add_argument("--p", type=float)
    d.add_argument("--alpha", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--a", type=float)
    d.add_argument("--window-level", dest="window_level", type=float)
    d.add_argument("--resolution", type=int)
    d.set_defaults(func=_cmd_compop_necessity)

    d = csubs.add_parser("sweep-quadratic",
                         help="fiber scaling of the quadratic model map")
    _add_common(d)
    d.add_argument("--beta", metavar="B1,B2,...")
    d.add_argument("--radii", metavar="R1,R2,...")
    d.add_argument("--fractions", metavar="F1,F2,...")
    d.add_argument("--resolution", type=int)
    d.add_argument("--json", help="JSON path for the full sweep table")
    d.set_defaults(func=_cmd_compop_sweep)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PlurinormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
