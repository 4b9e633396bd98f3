"""eulercells command line.

Usage:
  eulercells [--porcelain] index CONFIG --xi EXPR (--alpha A | --minimize)
  eulercells [--porcelain] criteria CONFIG --which {isochronal|interior R0|origin}
  eulercells [--porcelain] kolmogorov --m M --n N {mbar|profile|verify-flow}
  eulercells [--porcelain] torus --m M --n N (--zeta FILE | --builtin NAME)
  eulercells [--porcelain] surface CONFIG [--csv FILE]

Exit status: 0 certified or pass, 1 inconclusive, 2 error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .criteria import CriterionError, interior_extremum, isochronal, origin_extremum
from .expr import ParseError, evaluate, parse
from .index import (
    IndexError_,
    TestFunctionXi,
    Verdict,
    constant_vorticity_rule,
    index_value,
    minimize_over_alpha,
)
from .jet import DomainError
from .kolmogorov import cell_profile, flow_residual, mbar
from .profiles import CriticalVelocity, ProfileError, make_general, make_rotational
from .quadrature import NonConvergence
from .surface import SurfaceError, build_metric, profile_from_metric, verify_steady
from .torus import (
    ZetaParseError,
    dmsy_check,
    dmsy_zeta,
    misiolek_index,
    parse_zeta,
    zeta_22,
    zeta_32,
    zeta_33,
    zeta_m1,
)

__all__ = ["main", "load_config", "ConfigError", "EXIT_OK", "EXIT_INCONCLUSIVE", "EXIT_ERROR"]

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2

SECTIONS = {
    "profile": {"kind", "name", "phi", "u", "e", "g", "r", "pole"},
    "xi": {"expr", "a", "b"},
    "surface": {"phi", "g", "u", "f", "r"},
    "zeta": None,  # keys are modes such as cos2, validated by the surface module
}


class ConfigError(ValueError):
    pass


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def load_config(text: str) -> dict:
    """Parse INI text into {section: {key: value}}; unknown names are errors."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    out = {}
    for name in cp.sections():
        sect = name.lower()
        if sect not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        allowed = SECTIONS[sect]
        items = {}
        for key, value in cp.items(name):
            if allowed is not None and key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            items[key] = _unquote(value)
        out[sect] = items
    return out


def _read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return load_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _float(text: str, what: str) -> float:
    try:
        v = float(eval_number(text))
    except (ValueError, ParseError, DomainError):
        raise ConfigError(f"{what} must be a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{what} must be finite")
    return v


def eval_number(text: str) -> float:
    """A constant expression such as pi/4 or ln(2)."""
    return float(evaluate(parse(text), 0.0))


def profile_from_config(cfg: dict):
    if "profile" not in cfg:
        raise ConfigError("config has no [profile] section")
    p = cfg["profile"]
    kind = p.get("kind", "rotational").lower()
    for need in ("phi", "u", "r"):
        if need not in p:
            raise ConfigError(f"[profile] needs {need!r}")
    R = _float(p["r"], "R")
    pole = _bool(p.get("pole", "true"))
    name = p.get("name", "")
    if kind == "rotational":
        extra = {"e", "g"} & set(p)
        if extra:
            raise ConfigError(f"rotational profile takes no {sorted(extra)}")
        return make_rotational(p["phi"], p["u"], R, pole, name)
    if kind == "general":
        for need in ("e", "g"):
            if need not in p:
                raise ConfigError(f"general profile needs {need!r}")
        return make_general(p["phi"], p["u"], p["e"], p["g"], R, pole, name)
    raise ConfigError(f"profile kind must be rotational or general, got {kind!r}")


# output ---------------------------------------------------------------------


@dataclass
class Out:
    porcelain: bool
    stream: object

    def report(self, title: str, fields: list[tuple[str, object]]):
        if self.porcelain:
            for k, v in fields:
                self.stream.write(f"{k} = {_fmt(v)}\n")
            return
        self.stream.write(f"{title}\n")
        width = max((len(k) for k, _ in fields), default=0)
        for k, v in fields:
            self.stream.write(f"  {k.ljust(width)}  {_fmt(v)}\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(stream, columns: list[str], rows, comments=()):
    stream.write(f"# eulercells {__version__}\n")
    for c in comments:
        stream.write(f"# {c}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _verdict_code(v) -> int:
    return EXIT_OK if v is Verdict.CERTIFIED else EXIT_INCONCLUSIVE


# commands -------------------------------------------------------------------


def cmd_index(args, out: Out) -> int:
    cfg = _read_config(args.config)
    p = profile_from_config(cfg)
    xi_cfg = cfg.get("xi", {})
    expr = args.xi or xi_cfg.get("expr")
    if not expr:
        raise ConfigError("no test function: pass --xi or set [xi] expr")
    a = _float(xi_cfg["a"], "xi a") if "a" in xi_cfg else 0.0
    b = _float(xi_cfg["b"], "xi b") if "b" in xi_cfg else None
    xi = TestFunctionXi.of(expr, a, b)
    if args.alpha is not None:
        res = index_value(p, xi, args.alpha, args.form)
        out.report(
            f"index of {p.name or 'profile'} at alpha = {args.alpha!r}",
            [("alpha", args.alpha), ("I", res.value), ("error", res.error), ("converged", res.converged)],
        )
        return EXIT_OK if res.value < -10 * res.error else EXIT_INCONCLUSIVE
    q = minimize_over_alpha(p, xi, form=args.form)
    fields = [(k, v) for k, v in q.as_dict().items()]
    if q.verdict is not Verdict.CERTIFIED:
        fields.append(("constant_vorticity", str(constant_vorticity_rule(p))))
    out.report(f"index of {p.name or 'profile'} minimized over alpha", fields)
    return _verdict_code(q.verdict)


def cmd_criteria(args, out: Out) -> int:
    cfg = _read_config(args.config)
    p = profile_from_config(cfg)
    which = args.which[0]
    if which == "isochronal":
        if len(args.which) != 1:
            raise ConfigError("isochronal takes no argument")
        rep = isochronal(p)
    elif which == "interior":
        if len(args.which) != 2:
            raise ConfigError("interior needs the critical radius r0")
        rep = interior_extremum(p, _float(args.which[1], "r0"))
    elif which == "origin":
        if len(args.which) != 1:
            raise ConfigError("origin takes no argument")
        rep = origin_extremum(p)
    else:
        raise ConfigError(f"--which must be isochronal, interior or origin, got {which!r}")
    fields = [
        ("criterion", rep.name),
        ("lhs", rep.lhs),
        ("rhs", rep.rhs),
        ("relation", rep.relation),
        ("verdict", str(rep.verdict)),
    ]
    fields += [(f"witness.{k}", v) for k, v in rep.witness.items()]
    out.report(f"{rep.name}: {rep.lhs!r} {rep.relation} {rep.rhs!r}", fields)
    return _verdict_code(rep.verdict)


def cmd_kolmogorov(args, out: Out) -> int:
    m, n = args.m, args.n
    cell = cell_profile(m, n)
    grid = np.round(np.arange(1, 100) * 0.01, 2)
    if args.action == "mbar":
        vals = np.array([mbar(float(r)) for r in grid])
        write_csv(out.stream, ["r", "mbar"], zip(grid, vals), [f"cell ({m},{n}); bound computed on the (1,1) cell"])
        return EXIT_OK if np.all(vals < 0) else EXIT_INCONCLUSIVE
    if args.action == "profile":
        p = cell.profile
        rows = [(r, p.u(r), p.phi(r), p.G(r), p.E(r)) for r in grid]
        write_csv(out.stream, ["r", "u", "phi", "G", "E"], rows, [f"cell ({m},{n})"])
        return EXIT_OK
    ts = np.linspace(0.0, 2.0, 41)
    worst = max(flow_residual(m, n, s, ts) for s in (0.1, 0.4, 0.7, 0.95))
    ok = worst <= 1e-7
    out.report(f"flow check for ({m},{n})", [("max_residual", worst), ("tolerance", 1e-7), ("status", "PASS" if ok else "FAIL")])
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


_BUILTINS = {"m1": zeta_m1, "22": zeta_22, "32": zeta_32, "33": zeta_33}


def cmd_torus(args, out: Out) -> int:
    m, n = args.m, args.n
    if args.builtin == "dmsy":
        if m < n:
            raise ConfigError("dmsy needs m >= n")
        member, _ = dmsy_check(m, n)
        zeta = dmsy_zeta(m, n)
    elif args.builtin:
        zeta = _BUILTINS[args.builtin]()
        member = None
    else:
        try:
            with open(args.zeta, encoding="utf-8") as fh:
                zeta = parse_zeta(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.zeta}: {exc.strerror}") from None
        member = None
    iota = misiolek_index(m, n, zeta)
    negative = iota.q < 0
    fields = [
        ("m", m),
        ("n", n),
        ("q", str(iota.q)),
        ("iota", f"{iota}"),
        ("iota_float", float(iota)),
        ("conjugate_point", "YES" if negative else "inconclusive"),
    ]
    if member is not None:
        fields.append(("dmsy_region", member))
    if out.porcelain:
        out.report("", fields)
    else:
        verdict = "conjugate point: YES" if negative else "inconclusive"
        out.stream.write(f"ι = {_pretty_pi(iota.q)}; {verdict}\n")
    return EXIT_OK if negative else EXIT_INCONCLUSIVE


def _pretty_pi(q) -> str:
    if q == 0:
        return "0"
    return f"{q} π²"


def cmd_surface(args, out: Out) -> int:
    cfg = _read_config(args.config)
    if "surface" not in cfg:
        raise ConfigError("config has no [surface] section")
    s = cfg["surface"]
    for need in ("phi", "g", "r"):
        if need not in s:
            raise ConfigError(f"[surface] needs {need!r}")
    mf = build_metric(s["phi"], s["g"], cfg.get("zeta"), _float(s["r"], "R"), F=s.get("f"), u=s.get("u"))
    rep = verify_steady(mf)
    p = profile_from_metric(mf)
    fields = list(rep.as_dict().items())
    origin = None
    try:
        origin = origin_extremum(p)
        fields += [("origin.lhs", origin.lhs), ("origin.rhs", origin.rhs), ("origin.verdict", str(origin.verdict))]
    except CriterionError as exc:
        fields.append(("origin", f"not applicable ({exc})"))
    if args.csv:
        rs = np.linspace(0.0, mf.R, 33)[1:]
        ts = np.linspace(0.0, 2 * math.pi, 33)[:-1]
        R, T = np.meshgrid(rs, ts, indexing="ij")
        g11, g12, g22 = mf.components(R, T)
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(
                fh,
                ["r", "theta", "g11", "g12", "g22"],
                zip(R.ravel(), T.ravel(), g11.ravel(), g12.ravel(), g22.ravel()),
                [f"zeta = {mf.zeta}"],
            )
    if out.porcelain:
        out.report("", fields)
    else:
        parts = [
            f"det check {'PASS' if rep.det_ok else 'FAIL'}",
            f"curl radial {'PASS' if rep.curl_ok else 'FAIL'}",
        ]
        if origin is not None:
            parts.append(f"origin criterion: {'certified' if origin.verdict is Verdict.CERTIFIED else 'inconclusive'}")
        out.stream.write("; ".join(parts) + "\n")
        out.report("details", fields)
    if not rep.ok:
        return EXIT_INCONCLUSIVE
    if origin is not None and origin.verdict is not Verdict.CERTIFIED:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# parser -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_ERROR)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eulercells", description="Conjugate-point criteria for steady 2D Euler cells.")
    ap.add_argument("--version", action="version", version=f"eulercells {__version__}")
    ap.add_argument("--porcelain", action="store_true", help="machine-readable key = value output")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("index", help="index form for one test function")
    s.add_argument("config")
    s.add_argument("--xi", help="test function expression in r")
    s.add_argument("--form", type=int, choices=(1, 2, 3), default=1)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float)
    g.add_argument("--minimize", action="store_true")
    s.set_defaults(func=cmd_index)

    s = sub.add_parser("criteria", help="closed-form criteria")
    s.add_argument("config")
    s.add_argument("--which", nargs="+", required=True, metavar="ARG")
    s.set_defaults(func=cmd_criteria)

    s = sub.add_parser("kolmogorov", help="Kolmogorov cell geometry")
    s.add_argument("--m", type=_positive, required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("action", choices=("mbar", "profile", "verify-flow"))
    s.set_defaults(func=cmd_kolmogorov)

    s = sub.add_parser("torus", help="exact index on the flat torus")
    s.add_argument("--m", type=_positive, required=True)
    s.add_argument("--n", type=_positive, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--zeta", metavar="FILE")
    g.add_argument("--builtin", choices=("m1", "22", "32", "33", "dmsy"))
    s.set_defaults(func=cmd_torus)

    s = sub.add_parser("surface", help="build and check a surface metric")
    s.add_argument("config")
    s.add_argument("--csv", metavar="FILE")
    s.set_defaults(func=cmd_surface)
    return ap


_ERRORS = (
    ConfigError,
    ParseError,
    DomainError,
    ProfileError,
    CriterionError,
    CriticalVelocity,
    IndexError_,
    NonConvergence,
    SurfaceError,
    ZetaParseError,
    ValueError,
)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    out = Out(args.porcelain, stdout)
    try:
        return args.func(args, out)
    except _ERRORS as exc:
        sys.stderr.write(f"eulercells: error: {exc}\n")
        return EXIT_ERROR


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout (used by the tests)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    raise SystemExit(main())
