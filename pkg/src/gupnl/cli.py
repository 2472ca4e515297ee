"""Command-line front end.

Subcommands: roots, scan, entangle, sample, uncertainty, limit.

Global flags (accepted before or after the subcommand): --beta, --hbar,
--seed, --format {json,csv,text}, --precision, --out, --config.  Each global
flag can also come from a ``GUPNL_<NAME>`` environment variable or from a
``key=value`` config file; flags win over the environment, which wins over the
file.

Exit status: 0 success, 2 usage error, 3 domain error, 4 numeric error,
5 degenerate state.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import core, entanglement, measurement
from .core import GupParams
from .errors import DegenerateInputError, DomainError, GupError, NumericError
from .representations import CoefficientVector, validate_coefficients

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4
EXIT_DEGENERATE = 5

ENV_PREFIX = "GUPNL_"
FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    beta: float = 1.0
    hbar: float = 1.0
    seed: int = 0
    output_format: str = "json"
    precision: int = 12
    out_path: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise UsageError(f"--beta must be > 0, got {self.beta}")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise UsageError(f"--hbar must be > 0, got {self.hbar}")
        if not 6 <= self.precision <= 17:
            raise UsageError(f"--precision must be in [6, 17], got {self.precision}")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}, got {self.output_format!r}")

    @property
    def params(self) -> GupParams:
        return GupParams(self.beta, self.hbar)


# flag name -> (RunConfig field, converter)
_GLOBALS = {
    "beta": ("beta", float),
    "hbar": ("hbar", float),
    "seed": ("seed", int),
    "format": ("output_format", str),
    "precision": ("precision", int),
    "out": ("out_path", str),
}


def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lower()] = value
    return values


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    cfg_path = getattr(args, "config", None) or environ.get(ENV_PREFIX + "CONFIG")
    file_values = read_config_file(cfg_path) if cfg_path else {}
    kwargs = {}
    for flag, (name, conv) in _GLOBALS.items():
        raw = getattr(args, flag, None)
        if raw is None:
            raw = environ.get(ENV_PREFIX + flag.upper())
        if raw is None:
            raw = file_values.get(flag)
        if raw is None:
            continue
        try:
            kwargs[name] = conv(raw)
        except ValueError:
            raise UsageError(f"invalid value for {flag}: {raw!r}") from None
    return RunConfig(**kwargs)


# --- serialization ----------------------------------------------------------


def _round(x: float, precision: int) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{precision}g}")


def to_jsonable(obj, precision: int):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj), precision)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(obj.real, precision), "im": _round(obj.imag, precision)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v, precision) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def flatten_row(row: dict, precision: int) -> dict:
    """Split complex values into ``_re``/``_im`` columns and round floats."""
    out = {}
    for k, v in row.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[f"{k}_re"] = _round(v.real, precision)
            out[f"{k}_im"] = _round(v.imag, precision)
        elif isinstance(v, (float, np.floating)):
            out[k] = _round(float(v), precision)
        else:
            out[k] = v
    return out


def to_csv(rows: list[dict], precision: int) -> str:
    flat = [flatten_row(r, precision) for r in rows]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def to_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _is_complex_dict(v):
                lines.append(f"{pad}{k}:")
                lines.append(to_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _is_complex_dict(v):
                lines.append(f"{pad}-")
                lines.append(to_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(f"{pad}{_scalar_text(obj)}")
    return "\n".join(lines)


def _is_complex_dict(v) -> bool:
    return isinstance(v, dict) and set(v) == {"re", "im"}


def _scalar_text(v) -> str:
    if _is_complex_dict(v):
        sign = "-" if math.copysign(1.0, v["im"]) < 0 else "+"
        return f"{v['re']!r} {sign} {abs(v['im'])!r}i"
    return repr(v) if isinstance(v, float) else str(v)


class Output:
    def __init__(self, config: RunConfig, stdout=None, stderr=None):
        self.config = config
        self._stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        self.chunks: list[str] = []

    def write(self, text: str):
        self.chunks.append(text)

    def emit_report(self, report: dict, rows: list[dict] | None = None):
        """A report with an optional table; CSV carries the table, summary goes to stderr."""
        p = self.config.precision
        fmt = self.config.output_format
        if fmt == "json":
            obj = dict(report)
            if rows is not None:
                obj["rows"] = [to_jsonable(r, p) for r in rows]
            self.write(dumps(to_jsonable(obj, p)))
        elif fmt == "csv":
            if rows is None:
                self.write(to_csv([report_row(report)], p))
            else:
                self.write(to_csv(rows, p))
                if report:
                    self.stderr.write(dumps(to_jsonable(report, p)))
        else:
            self.write(to_text(to_jsonable(report, p)) + "\n")
            if rows is not None:
                self.write(to_csv(rows, p))

    def close(self):
        text = "".join(self.chunks)
        if self.config.out_path:
            Path(self.config.out_path).write_text(text, encoding="utf-8", newline="\n")
        else:
            self._stdout.write(text)


def report_row(report: dict, prefix: str = "") -> dict:
    """Flatten a nested report into a single CSV row."""
    row = {}
    for k, v in report.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            row.update(report_row(v, key + "."))
        elif isinstance(v, (list, tuple)):
            for i, item in enumerate(v, 1):
                if isinstance(item, dict):
                    row.update(report_row(item, f"{key}{i}."))
                else:
                    row[f"{key}{i}"] = item
        else:
            row[key] = v
    return row


# --- subcommands ------------------------------------------------------------


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_triple(text: str) -> tuple[complex, complex, complex]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(parse_complex(p) for p in parts)


def roots_report(P: float, params: GupParams) -> dict:
    cf = core.cardano_roots(P, params)
    orc = core.oracle_roots(P, params)
    perm, diffs, ok = core.match_roots(cf, orc)
    printed, corrected = core.printed_pair_imaginary(P, params)
    return {
        "P": P,
        "beta": params.beta,
        "hbar": params.hbar,
        "method": cf.method.value,
        "closed_form": list(cf.roots),
        "oracle": list(orc.roots),
        "matched_differences": list(diffs),
        "max_relative_difference": max(d / max(abs(r), 1e-300) for d, r in zip(diffs, cf.roots)),
        "solvers_agree": ok,
        "vieta_residuals": core.vieta_residuals(cf),
        "root_sum_identity": core.root_sum_identity(cf),
        "forward_map_residuals": [abs(core.forward_map(r, params) - P) for r in cf.roots],
        "printed_pair_imag": {"printed": printed, "vieta": corrected},
    }


def cmd_roots(args, config: RunConfig, out: Output):
    out.emit_report(roots_report(args.P, config.params))


def scan_rows(P_min: float, P_max: float, steps: int, params: GupParams) -> list[dict]:
    rows = []
    for P in np.linspace(P_min, P_max, steps):
        P = float(P)
        r = core.cardano_roots(P, params)
        res = core.vieta_residuals(r)
        rows.append(
            {
                "P": P,
                "p1": complex(r.p1),
                "p2": r.p2,
                "p3": r.p3,
                "method": r.method.value,
                "vieta_sum": res["sum"],
                "vieta_pairwise": res["pairwise"],
                "vieta_product": res["product"],
                "forward_residual": max(abs(core.forward_map(p, params) - P) for p in r.roots),
            }
        )
    return rows


def cmd_scan(args, config: RunConfig, out: Output):
    if not args.P_min < args.P_max:
        raise UsageError("--P-min must be < --P-max")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    rows = scan_rows(args.P_min, args.P_max, args.steps, config.params)
    out.emit_report({"beta": config.beta, "hbar": config.hbar}, rows)


def entangle_report(P, alpha, gamma, params) -> dict:
    a, g = validate_coefficients(alpha), validate_coefficients(gamma)
    state = entanglement.build_entangled_state(P, a.coeffs, g.coeffs, params)
    sd = entanglement.schmidt(state)
    svd = entanglement.schmidt_svd(state.coefficient_matrix())
    bell = entanglement.bell_benchmark()
    corr = entanglement.correlation_structure(state)
    contrast = measurement.p_basis_vs_P_basis(state)
    return {
        "P": P,
        "beta": params.beta,
        "roots": list(state.roots.roots),
        "partner_roots": [-r for r in state.roots.roots],
        "alpha": list(a.coeffs),
        "alpha_scale": a.scale,
        "gamma": list(g.coeffs),
        "gamma_scale": g.scale,
        "c": list(state.c),
        "norm_constant": state.norm_constant,
        "schmidt": {
            "lambdas": list(sd.lambdas),
            "entropy_nats": sd.entropy_nats,
            "entropy_bits": sd.entropy_bits,
            "svd_lambdas": list(svd.lambdas),
        },
        "bell_benchmark": {
            "lambdas": list(bell.lambdas),
            "entropy_nats": bell.entropy_nats,
            "entropy_bits": bell.entropy_bits,
            "gup_exceeds_bell": sd.entropy_nats > bell.entropy_nats,
        },
        "correlation": {
            "partner_is_negated": corr.partner_is_negated,
            "conditional_entropy": corr.conditional_entropy,
            "mutual_information": corr.mutual_information,
            "branch_conservation": list(corr.branch_conservation),
            "partner_forward_residual": corr.partner_forward_residual,
        },
        "measurement_basis": {
            "P_basis_entropy": contrast.P_basis_entropy,
            "p_basis_probs": list(contrast.p_basis_probs),
            "p_basis_entropy": contrast.p_basis_entropy,
        },
    }


def cmd_entangle(args, config: RunConfig, out: Output):
    alpha = args.alpha if args.alpha is not None else tuple(CoefficientVector.uniform())
    gamma = args.gamma if args.gamma is not None else alpha
    out.emit_report(entangle_report(args.P, alpha, gamma, config.params))


def _record_dict(rec: measurement.MeasurementRecord, real_only: bool) -> dict:
    o1, o2 = rec.outcome_1, rec.outcome_2
    if real_only:
        o1, o2 = o1.real, o2.real
    return {"draw": rec.draw_ordinal, "branch": rec.branch_index, "outcome_1": o1, "outcome_2": o2}


def cmd_sample(args, config: RunConfig, out: Output):
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.parts < 1:
        raise UsageError("--parts must be >= 1")
    alpha = args.alpha if args.alpha is not None else tuple(CoefficientVector.uniform())
    gamma = args.gamma if args.gamma is not None else alpha
    a, g = validate_coefficients(alpha), validate_coefficients(gamma)
    state = entanglement.build_entangled_state(args.P, a.coeffs, g.coeffs, config.params)
    if args.parts == 1:
        s = measurement.sample(state, args.n, config.seed)
    else:
        s = measurement.sample_partitioned(state, args.n, config.seed, args.parts)
    ok, bad = measurement.verify_correlation(s.records())
    summary = s.summary.as_dict()
    summary.update({"P": args.P, "beta": config.beta, "correlation_verified": ok})
    p = config.precision
    fmt = config.output_format
    if fmt == "json":
        for rec in s.records():
            d = {"type": "record", **_record_dict(rec, args.real_part_only)}
            out.write(json.dumps(to_jsonable(d, p)) + "\n")
        out.write(json.dumps(to_jsonable({"type": "summary", **summary}, p)) + "\n")
    elif fmt == "csv":
        out.write(to_csv([_record_dict(r, args.real_part_only) for r in s.records()], p))
        out.stderr.write(dumps(to_jsonable(summary, p)))
    else:
        out.write(to_text(to_jsonable(summary, p)) + "\n")


def cmd_uncertainty(args, config: RunConfig, out: Output):
    if not (args.dp_min > 0 and args.dp_max > 0):
        raise UsageError("delta-P grid must be positive")
    if not args.dp_min < args.dp_max or args.steps < 2:
        raise UsageError("need --dp-min < --dp-max and --steps >= 2")
    params = config.params
    grid = np.geomspace(args.dp_min, args.dp_max, args.steps) if args.log else np.linspace(args.dp_min, args.dp_max, args.steps)
    rows = [{"deltaP": float(d), "deltax": core.uncertainty_product(float(d), params)} for d in grid]
    analytic = core.minimal_length(params)
    argmin, numeric = core.numerical_minimal_length(params)
    report = {
        "beta": params.beta,
        "hbar": params.hbar,
        "beta0": params.beta0,
        "minimal_length_analytic": analytic,
        "minimal_length_numeric": numeric,
        "argmin_deltaP": argmin,
        "relative_difference": abs(numeric - analytic) / analytic,
    }
    out.emit_report(report, rows)


def limit_rows(P: float, beta_start: float, decades: int, per_decade: int, hbar: float = 1.0) -> list[dict]:
    rows = []
    for k in range(decades * per_decade + 1):
        beta = beta_start * 10.0 ** (-k / per_decade)
        r = core.cardano_roots(P, GupParams(beta, hbar))
        rows.append(
            {
                "beta": beta,
                "p1": r.p1,
                "p1_minus_P": r.p1 - P,
                "im_p2": r.p2.imag,
                "im_p2_sqrt_beta": r.p2.imag * math.sqrt(beta),
                "method": r.method.value,
            }
        )
    return rows


def cmd_limit(args, config: RunConfig, out: Output):
    if not args.beta_start > 0:
        raise UsageError("--beta-start must be > 0")
    if args.decades < 1 or args.per_decade < 1:
        raise UsageError("--decades and --per-decade must be >= 1")
    rows = limit_rows(args.P, args.beta_start, args.decades, args.per_decade, config.hbar)
    out.emit_report({"P": args.P}, rows)


# --- parser -----------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--beta", default=default, help="GUP parameter beta > 0 (default 1)")
    g.add_argument("--hbar", default=default, help="reduced Planck constant (default 1)")
    g.add_argument("--seed", default=default, help="sampler seed (default 0)")
    g.add_argument("--format", default=default, help="json, csv or text (default json)")
    g.add_argument("--precision", default=default, help="significant digits, 6..17 (default 12)")
    g.add_argument("--out", default=default, help="write output to this file")
    g.add_argument("--config", default=default, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gupnl", description="Minimal-length momentum roots, entanglement and sampling.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("roots", cmd_roots, "roots of beta p^3 + p - P from both solvers")
    p.add_argument("--P", type=float, required=True)

    p = add("scan", cmd_scan, "root table over a range of P")
    p.add_argument("--P-min", dest="P_min", type=float, required=True)
    p.add_argument("--P-max", dest="P_max", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)

    for name, func, help in (
        ("entangle", cmd_entangle, "two-particle state, Schmidt data, correlations"),
        ("sample", cmd_sample, "Born-rule samples of correlated outcome pairs"),
    ):
        p = add(name, func, help)
        p.add_argument("--P", type=float, required=True)
        p.add_argument("--alpha", type=parse_triple, default=None, help="three complex values, e.g. '1,0.5j,0'")
        p.add_argument("--gamma", type=parse_triple, default=None, help="defaults to --alpha")
        if name == "sample":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--parts", type=int, default=1, help="number of independent substreams")
            p.add_argument("--real-part-only", action="store_true")

    p = add("uncertainty", cmd_uncertainty, "position uncertainty over a delta-P grid")
    p.add_argument("--dp-min", type=float, default=0.01)
    p.add_argument("--dp-max", type=float, default=100.0)
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--log", action="store_true", help="log-spaced grid")

    p = add("limit", cmd_limit, "small-beta ladder for the roots of P")
    p.add_argument("--P", type=float, required=True)
    p.add_argument("--beta-start", type=float, default=1e-2)
    p.add_argument("--decades", type=int, default=10)
    p.add_argument("--per-decade", type=int, default=1)
    return parser


def main(argv=None, stdout=None, stderr=None, environ=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        config = resolve_config(args, environ)
        out = Output(config, stdout, stderr)
        args.func(args, config, out)
        out.close()
    except UsageError as e:
        stderr.write(f"gupnl {args.command}: usage error: {e}\n")
        return EXIT_USAGE
    except DegenerateInputError as e:
        stderr.write(f"gupnl {args.command}: degenerate input: {e}\n")
        return EXIT_DEGENERATE
    except DomainError as e:
        stderr.write(f"gupnl {args.command}: domain error: {e}\n")
        return EXIT_DOMAIN
    except NumericError as e:
        stderr.write(f"gupnl {args.command}: numeric error: {e}\n")
        return EXIT_NUMERIC
    except GupError as e:
        stderr.write(f"gupnl {args.command}: error: {e}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
