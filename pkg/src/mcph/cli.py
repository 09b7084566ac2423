"""Command-line entry point: ``mcph <command> [options]``.

Options may also come from a flat ``key=value`` file passed with
``--config``; flags given on the command line win. Exit codes: 0 success,
1 usage or invalid input, 2 numerical failure, 3 a requested check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import acceptance
from .distributions import distance_cdf, distance_pdf
from .errors import ConvergenceError, DomainError, UnsupportedInputError
from .functionals import contact_cdf, exp_power_profile, indicator_profile, pgf_count, pgfl
from .params import ProcessParams
from .quadrature import QuadratureSpec
from .sampling import make_rng, sample_realization
from .validation import compare, mc_contact_distances

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3

# not echoed into metadata: they change where output goes or how fast it is made, not what it is
_NOT_ECHOED = {"command", "config", "output", "workers", "out_dir", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v):
    return repr(float(v))


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, values):
    """Convert config strings with the matching action's type and install them as defaults."""
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, raw in values.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for this command")
        conv = act.type or str
        if act.nargs in ("+", "*") or (isinstance(act.nargs, int) and act.nargs > 1):
            defaults[key] = [conv(t) for t in re.split(r"[,\s]+", raw) if t]
        elif isinstance(act, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                defaults[key] = conv(raw)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"config key {key}: {exc}") from None
    parser.set_defaults(**defaults)


def _add_params(p, multi_lambda=False):
    g = p.add_argument_group("process parameters")
    g.add_argument("--lambda-p", dest="lambda_p", type=float, nargs="+" if multi_lambda else None,
                   default=[1e-5] if multi_lambda else 1e-5,
                   help="parent intensity per m^3" + (" (several values give one output each)" if multi_lambda else ""))
    g.add_argument("--R", dest="R", type=float, default=50.0, help="cluster radius in m")
    g.add_argument("--r0", dest="r0", type=float, default=0.0, help="hole radius in m (0 <= r0 < R)")
    g.add_argument("--M2", dest="M2", type=float, default=20.0, help="mean retained points per cluster")
    g.add_argument("--M1", dest="M1", type=float, default=None,
                   help="mean offspring before thinning; derived from M2 and --linkage when omitted")
    g.add_argument("--linkage", choices=["self_hole", "exact_mean"], default="self_hole",
                   help="how M1 is derived from M2 when --M1 is omitted")


def _add_quad(p):
    g = p.add_argument_group("quadrature")
    g.add_argument("--abs-tol", dest="abs_tol", type=float, default=1e-10, help="absolute tolerance")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-8, help="relative tolerance")
    g.add_argument("--max-subdivisions", dest="max_subdivisions", type=int, default=2000,
                   help="subinterval budget per integral")


def _add_grid(p, start, stop, step, name="r"):
    g = p.add_argument_group("grid")
    g.add_argument("--grid-min", dest="grid_min", type=float, default=start, help=f"first {name} value")
    g.add_argument("--grid-max", dest="grid_max", type=float, default=stop, help=f"last {name} value")
    g.add_argument("--grid-step", dest="grid_step", type=float, default=step, help=f"{name} spacing")


def _add_common(p):
    p.add_argument("--config", help="key=value file; command-line flags override its values")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")


def build_parser():
    parser = _Parser(prog="mcph", description="Matérn cluster processes with and without holes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw one realization and write it as CSV")
    _add_common(p)
    _add_params(p)
    p.add_argument("--mode", choices=["mcp", "mcph_exact", "mcph_selfhole"], default="mcph_exact",
                   help="sampler variant")
    p.add_argument("--W", dest="W", type=float, default=200.0, help="observation window radius in m")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--trial", type=int, default=0, help="substream index under the master seed")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("distance", help="tabulate the distance PDF and CDF from one parent")
    _add_common(p)
    _add_params(p)
    p.add_argument("--process", choices=["mcp", "mcph"], default="mcph", help="which model")
    p.add_argument("--x-norm", dest="x_norm", type=float, required=False, default=None,
                   help="distance from the origin to the parent, m")
    _add_grid(p, 0.0, 100.0, 1.0)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("contact", help="tabulate the contact distance CDF, optionally against simulation")
    _add_common(p)
    _add_params(p, multi_lambda=True)
    p.add_argument("--process", choices=["mcp", "mcph"], default="mcph", help="which model")
    _add_grid(p, 0.0, 100.0, 1.0)
    _add_quad(p)
    p.add_argument("--mc", type=int, default=0, metavar="N", help="add an empirical column from N realizations")
    p.add_argument("--mode", choices=["mcp", "mcph_exact", "mcph_selfhole"], default=None,
                   help="sampler for --mc (default: mcp for --process mcp, mcph_exact otherwise)")
    p.add_argument("--W", dest="W", type=float, default=200.0, help="simulation window radius in m")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--workers", type=int, default=1, help="processes for --mc; results do not depend on it")
    p.add_argument("--check", type=float, nargs=2, metavar=("K_SIGMA", "THRESHOLD"), default=None,
                   help="exit 3 unless no point is outside K_SIGMA standard errors and sup distance <= THRESHOLD")
    p.add_argument("--strict", action="store_true", help="treat a censoring warning as a failed check")
    p.set_defaults(func=cmd_contact)

    p = sub.add_parser("pgf", help="tabulate the generating function of the count in b(o, r)")
    _add_common(p)
    _add_params(p)
    p.add_argument("--process", choices=["mcp", "mcph"], default="mcph", help="which model")
    p.add_argument("--r", dest="r", type=float, default=30.0, help="ball radius in m")
    _add_grid(p, 0.0, 1.0, 0.1, name="theta")
    _add_quad(p)
    p.set_defaults(func=cmd_pgf)

    p = sub.add_parser("pgfl", help="evaluate the generating functional for a named radial profile")
    _add_common(p)
    _add_params(p)
    p.add_argument("--process", choices=["mcp", "mcph"], default="mcph", help="which model")
    p.add_argument("--profile", required=False, default=None,
                   help="'indicator(theta,r)' or 'exp-power(s,alpha)'")
    _add_quad(p)
    p.set_defaults(func=cmd_pgfl)

    p = sub.add_parser("validate", help="run the acceptance checks")
    p.add_argument("--config", help="key=value file; command-line flags override its values")
    p.add_argument("--out-dir", dest="out_dir", default=None, help="directory for comparison reports")
    p.add_argument("--n-trials", dest="n_trials", type=int, default=10_000, help="realizations per comparison")
    p.add_argument("--determinism-trials", dest="determinism_trials", type=int, default=200,
                   help="realizations per run in the worker-count check")
    p.add_argument("--seed", type=int, default=20240611, help="master seed")
    p.add_argument("--W", dest="W", type=float, default=200.0, help="simulation window radius in m")
    p.add_argument("--workers", type=int, default=1, help="processes for simulation")
    p.add_argument("--only", nargs="+", choices=list(acceptance.CRITERIA), default=None,
                   help="run a subset of the checks")
    p.set_defaults(func=cmd_validate)
    return parser


# ---------------------------------------------------------------- helpers

def _params(a, lambda_p=None):
    lam = a.lambda_p if lambda_p is None else lambda_p
    if a.M1 is None:
        return ProcessParams.from_m2(lam, a.R, a.r0, a.M2, a.linkage)
    return ProcessParams(lam, a.R, a.r0, a.M1, a.M2)


def _spec(a):
    return QuadratureSpec(abs_tol=a.abs_tol, rel_tol=a.rel_tol, max_subdivisions=a.max_subdivisions)


def _grid(a):
    if a.grid_step <= 0 or a.grid_max < a.grid_min:
        raise DomainError("grid needs grid_step > 0 and grid_max >= grid_min")
    n = int(math.floor((a.grid_max - a.grid_min) / a.grid_step + 1e-9))
    return a.grid_min + a.grid_step * np.arange(n + 1)


def effective_config(a):
    return {k: v for k, v in sorted(vars(a).items()) if k not in _NOT_ECHOED}


def _emit(text, path, meta=None):
    """Write ``text`` to ``path`` (stdout for '-') and metadata to ``<path>.json``."""
    if path == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    if meta is not None:
        Path(f"{path}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _rows(header, rows):
    fh = io.StringIO()
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return fh.getvalue()


def _info(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- commands

def cmd_sample(a):
    params = _params(a)
    rz = sample_realization(params, a.W, a.mode, make_rng(a.seed, a.trial))
    meta = {"config": effective_config(a), "params": params.as_dict()}
    _emit(rz.to_csv(), a.output, meta)
    kept = rz.retained
    _info(f"parents={len(rz.parents)} offspring={len(rz.offspring)} thinned={int(rz.thinned.sum())} "
          f"retained_in_window={int(rz.in_window(kept).sum())}")
    return EXIT_OK


def cmd_distance(a):
    if a.x_norm is None:
        raise UsageError("distance needs --x-norm")
    params = _params(a)
    rows = []
    for r in _grid(a):
        pdf = distance_pdf(r, a.x_norm, params, a.process)
        cdf = distance_cdf(r, a.x_norm, params, a.process)
        branch = "" if pdf.case.branch_no is None else pdf.case.branch_no
        rows.append([_fmt(r), _fmt(pdf.value), _fmt(cdf), pdf.case.case_no, branch])
    meta = {"config": effective_config(a), "params": params.as_dict()}
    _emit(_rows(["r", "pdf", "cdf", "case_no", "branch_no"], rows), a.output, meta)
    return EXIT_OK


def _suffixed(path, lam, many):
    if not many or path == "-":
        return path
    p = Path(path)
    return str(p.with_name(f"{p.stem}_lambda_{lam:g}{p.suffix}"))


def cmd_contact(a):
    spec, grid = _spec(a), _grid(a)
    mode = a.mode or ("mcp" if a.process == "mcp" else "mcph_exact")
    status = EXIT_OK
    many = len(a.lambda_p) > 1
    for lam in a.lambda_p:
        params = _params(a, lam)
        curve = {r: contact_cdf(r, params, a.process, spec) for r in grid}
        meta = {"config": effective_config(a), "params": params.as_dict(), "quadrature": spec.as_dict(),
                "truncation_radius": "r + R", "exact": a.process == "mcp"}
        out = _suffixed(a.output, lam, many)
        if not a.mc:
            _emit(_rows(["r", "F_CD"], [[_fmt(r), _fmt(curve[r])] for r in grid]), out, meta)
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            emp = mc_contact_distances(params, a.W, mode, a.mc, a.seed, a.workers, grid_max=grid[-1])
        k = a.check[0] if a.check else 3.0
        meta.update(mode=mode, n_trials=a.mc, seed=a.seed, n_censored=emp.n_censored,
                    censoring_warning=emp.censoring_warning)
        rep = compare(curve.__getitem__, emp, grid, k, meta)
        if a.output == "-":
            sys.stdout.write(rep.csv_text())
        else:
            Path(out).write_text(rep.csv_text())
            Path(f"{out}.json").write_text(rep.json_text())
        verdict = ""
        if a.check:
            ok = rep.passed(a.check[1])
            if a.strict and emp.censoring_warning:
                ok = False
                _info("censoring: grid exceeds W - R and some trial's nearest point lies beyond it")
            verdict = " PASS" if ok else " FAIL"
            if not ok:
                status = EXIT_CHECK
        elif emp.censoring_warning:
            _info("warning: censoring, grid exceeds W - R")
        _info(f"lambda_p={lam:g} sup={rep.sup_distance:.5f} violations={rep.violations}{verdict}")
    return status


def cmd_pgf(a):
    params, spec = _params(a), _spec(a)
    thetas = _grid(a)
    rows = [[_fmt(t), _fmt(pgf_count(t, a.r, params, a.process, spec))] for t in thetas]
    meta = {"config": effective_config(a), "params": params.as_dict(), "quadrature": spec.as_dict(),
            "truncation_radius": a.r + params.R, "exact": a.process == "mcp"}
    _emit(_rows(["theta", "G_N"], rows), a.output, meta)
    return EXIT_OK


_PROFILES = {"indicator": indicator_profile, "exp-power": exp_power_profile}


def parse_profile(text):
    m = re.fullmatch(r"\s*([A-Za-z][\w-]*)\s*\(([^)]*)\)\s*", text or "")
    if not m or m.group(1) not in _PROFILES:
        raise UsageError(f"unsupported profile {text!r}; use indicator(theta,r) or exp-power(s,alpha)")
    try:
        args = [float(t) for t in m.group(2).split(",")]
    except ValueError:
        raise UsageError(f"profile arguments must be numbers: {text!r}") from None
    if len(args) != 2:
        raise UsageError(f"{m.group(1)} takes two arguments")
    return _PROFILES[m.group(1)](*args)


def cmd_pgfl(a):
    profile = parse_profile(a.profile)
    params, spec = _params(a), _spec(a)
    res = pgfl(profile, params, a.process, spec)
    out = {"config": effective_config(a), "params": params.as_dict(), "quadrature": spec.as_dict(),
           **res.as_dict()}
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", a.output)
    return EXIT_OK


def cmd_validate(a):
    cfg = acceptance.AcceptanceConfig(n_trials=a.n_trials, seed=a.seed, W=a.W, workers=a.workers,
                                      determinism_trials=a.determinism_trials)
    if a.out_dir:
        Path(a.out_dir).mkdir(parents=True, exist_ok=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        results = acceptance.run_acceptance(cfg, a.only, a.out_dir, log=print)
    if a.out_dir:
        summary = {"config": cfg.as_dict(),
                   "results": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]}
        Path(a.out_dir, "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


# ---------------------------------------------------------------- entry

def main(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        try:
            first = parser.parse_args(argv)
            if first.config:
                sub = parser._subparsers._group_actions[0].choices[first.command]
                _apply_config(sub, read_config(first.config))
                first = parser.parse_args(argv)
        except SystemExit as exc:  # --help or a parse error
            return exc.code
        return first.func(first)
    except (UsageError, UnsupportedInputError) as exc:
        print(f"mcph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"mcph: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"mcph: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"mcph: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
