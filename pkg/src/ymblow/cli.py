"""
Command-line front end.

Every command writes a table (CSV) or report (JSON) whose first line, or
``schema`` field, is ``ymblow-schema v1``.  Exit codes: 0 on success, 1 on
validation errors (including unknown commands), 2 when an evolution
diverges or a shooting bracket has no sign change.

An optional ``--config FILE`` holds a JSON object of option values for the
chosen command; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import shlex
import sys
from typing import Optional, Sequence

import numpy as np

SCHEMA = "ymblow-schema v1"


class UsageError(Exception):
    """Invalid command line or configuration."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers

def parse_range(text: str) -> np.ndarray:
    """``"a:b:step"`` (inclusive of b), ``"a:b"`` (step 1) or a single number."""
    parts = [float(s) for s in str(text).split(":")]
    if len(parts) == 1:
        return np.array(parts)
    if len(parts) == 2:
        parts.append(1.0)
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise UsageError(f"bad range {text!r}; expected lo:hi:step with lo <= hi, step > 0")
    lo, hi, st = parts
    n = int(math.floor((hi - lo) / st + 1e-9)) + 1
    return lo + st * np.arange(n)


def parse_pair(text: str) -> tuple[float, float]:
    parts = [float(s) for s in str(text).split(":")]
    if len(parts) != 2:
        raise UsageError(f"bad bracket {text!r}; expected lo:hi")
    return parts[0], parts[1]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


_OUT_FLAGS = ("--out", "--report")


def _command_line(argv: Sequence[str]) -> str:
    """The invocation without its output destination, so reruns are byte-identical."""
    kept, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in _OUT_FLAGS:
            skip = True
            continue
        if a.split("=", 1)[0] in _OUT_FLAGS:
            continue
        kept.append(a)
    return "ymblow " + " ".join(shlex.quote(a) for a in kept)


def _header(argv: Sequence[str], seed) -> list[str]:
    return [f"# {SCHEMA}", f"# command: {_command_line(argv)}", f"# seed: {seed}"]


def write_csv(path: Optional[str], argv, seed, columns: Sequence[str], rows) -> None:
    buf = io.StringIO()
    for line in _header(argv, seed):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _emit(path, buf.getvalue())


def write_json(path: Optional[str], argv, seed, payload: dict) -> None:
    out = {"schema": SCHEMA, "command": _command_line(argv), "seed": seed}
    out.update(payload)
    _emit(path, json.dumps(out, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def _emit(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _params(d, odd: bool = False):
    from .profiles import DomainError, make_params

    _need(d is not None, "--d is required")
    _need(float(d) == int(d), f"d must be an integer, got {d}")
    _need(int(d) >= 5, f"d >= 5 required, got d={d:g}")
    if odd:
        _need(int(d) % 2 == 1, f"odd d required for this command, got d={d:g}")
    try:
        return make_params(int(d))
    except DomainError as e:
        raise UsageError(str(e)) from e


# ---------------------------------------------------------------------------
# commands

def cmd_profile(a, argv):
    from .profiles import gauge_values, potential_values, u_T

    p = _params(a.d)
    _need(a.T > 0, "--T > 0 required")
    rho = parse_range(a.rho_grid)
    _need(bool(np.all((rho >= 0) & (rho <= 1))), "--rho-grid must lie in [0, 1]")
    x = rho * rho
    uT = u_T(0.0, rho * a.T, a.T, p)
    psi1 = p.alpha / (x + p.beta)
    psi2 = 2 * p.alpha * p.beta / (x + p.beta) ** 2
    V = potential_values(x, p)
    g1, g2 = gauge_values(x, p)
    write_csv(a.out, argv, a.seed, ["rho", "uT", "psi1", "psi2", "V", "g1", "g2"],
              zip(rho, uT, psi1, psi2, V, g1, g2))
    return 0


def cmd_rate(a, argv):
    from .simvars import blowup_field, blowup_rate

    p = _params(a.d, odd=True)
    _need(a.k is not None and 1 <= a.k <= p.k_d, f"--k must be in 1..{p.k_d} for d={p.d}")
    _need(a.T > 0, "--T > 0 required")
    lo, hi = parse_pair(a.tmt_range)
    _need(0 < lo < hi <= a.T, "--tmt-range must satisfy 0 < lo < hi <= T")
    fit = blowup_rate(blowup_field(p, a.T), a.T, a.k, p, (lo, hi), a.npts, a.degree)
    write_csv(a.out, argv, a.seed, ["t", "Tmt", "norm", "local_slope"],
              zip(fit.t, fit.Tmt, fit.norm, fit.local_slope))
    print(f"fitted slope {fit.slope:.10f} (expected d/2-1-k = {fit.expected})", file=sys.stderr)
    return 0


def cmd_spectrum(a, argv):
    from .spectral import scan

    _params(a.d)
    _need(a.N >= 2, "--N >= 2 required")
    re, im = parse_range(a.re), parse_range(a.im)
    _need(np.all(re >= 0), "classification needs Re(lambda) >= 0")
    grid = [(x, y) for x in re for y in im]
    lams = np.array([complex(x, y) for x, y in grid])
    res = scan(int(a.d), lams, a.N, a.which, a.tol)
    rows = [(x, y, d1, d2, v.value)
            for (x, y), d1, d2, v in zip(grid, res.dist_one, res.dist_neg, res.verdicts)]
    write_csv(a.out, argv, a.seed,
              ["reL", "imL", "ratio_dist_1", "ratio_dist_neg1overbeta", "class"], rows)
    return 0


def cmd_recurrence(a, argv):
    from .spectral import verify_bounds

    _params(a.d)
    _need(int(a.d) >= 6, f"bound verification needs d >= 6, got d={a.d}")
    _need(a.imax >= 2, "--imax >= 2 required")
    if a.precision == "exact":
        _need(a.imax <= 400, "exact precision is limited to --imax <= 400")
    t = parse_range(a.lambda_im)
    rep = verify_bounds(int(a.d), [complex(0.0, v) for v in t], a.imax, precision=a.precision)
    payload = rep.to_dict()
    payload.pop("schema", None)
    write_json(a.report, argv, a.seed, payload)
    return 0


def cmd_norms(a, argv):
    from .sobolev import norm_D, norm_calH, random_field_suite

    p = _params(a.d, odd=True)
    k = p.k_d if a.k is None else a.k
    _need(k == p.k_d, f"the D-norm is equivalent to the k = {p.k_d} energy norm for d={p.d}")
    kind, _, count = str(a.suite).partition(":")
    _need(kind == "random" and count.isdigit() and int(count) > 0,
          "--suite must look like random:N")
    suite = random_field_suite(int(count), a.seed, a.max_degree)
    rows = []
    for i, u in enumerate(suite):
        nd = norm_D(u, p, a.quad_factor)
        nh = norm_calH(u, p, a.quad_factor)
        rows.append((i, nd, nh, nd / nh if nh else math.nan))
    write_csv(a.out, argv, a.seed, ["fn_id", "norm_D", "norm_H", "ratio"], rows)
    r = np.array([row[3] for row in rows])
    print(f"ratio range [{r.min():.6g}, {r.max():.6g}], max/min {r.max() / r.min():.6g}",
          file=sys.stderr)
    return 0


def _random_perturbation(op, seed: int, max_degree: int = 20):
    from .profiles import Field
    from .sobolev import random_even_polynomial, suite_rng

    rng = suite_rng(seed)
    h = Field(random_even_polynomial(rng, max_degree), random_even_polynomial(rng, max_degree))
    v = op.vec(h)
    v = v - op.P @ v
    return v / np.max(np.abs(v))


def cmd_evolve(a, argv):
    from .evolve import assemble_operators, evolve, remove_gauge_mode

    p = _params(a.d, odd=True)
    _need(a.degree >= 16, "--degree >= 16 required")
    _need(a.tau_end > 0, "--tau-end > 0 required")
    op = assemble_operators(p, a.degree)
    dtau = a.dtau if a.dtau is not None else 4.0 / a.degree ** 2
    _need(0 < dtau <= 20.0 / a.degree ** 2,
          f"--dtau must lie in (0, {20.0 / a.degree ** 2:.3g}] (explicit stability bound)")
    phi0 = a.eps * _random_perturbation(op, a.seed)
    if a.mode == "linear":
        traj = evolve(phi0, a.tau_end, op, "linear", dtau, a.sample_every)
    else:
        if a.remove_gauge_mode:
            phi0, _ = remove_gauge_mode(phi0, op, a.tau_end, dtau)
        traj = evolve(phi0 + op.static_vec(), a.tau_end, op, "nonlinear", dtau, a.sample_every)
    write_csv(a.out, argv, a.seed, ["tau", "norm_H_proxy", "norm_D", "proj_coeff"],
              zip(traj.tau, traj.norm_H, traj.norm_D, np.real(traj.proj)))
    return 0


def cmd_fit_T(a, argv):
    from .evolve import assemble_operators, fit_blowup_time
    from .profiles import gauge_mode

    p = _params(a.d, odd=True)
    lo, hi = parse_pair(a.bracket)
    _need(0 < lo < hi, "--bracket must satisfy 0 < lo < hi")
    _need(abs(a.eps) <= 1e-2, "|eps| <= 1e-2 required (small data)")
    op = assemble_operators(p, a.degree)
    g = gauge_mode(p)
    from .profiles import Field
    v = Field(g.psi * a.eps, g.phi * a.eps)
    T = fit_blowup_time(v, (lo, hi), p, op=op, tau_star=a.tau_star, xtol=a.xtol,
                        functional=a.functional)
    write_json(a.out, argv, a.seed, {
        "kind": "fit-T", "d": p.d, "eps": a.eps, "T": T, "T_minus_1": T - 1.0,
        "first_order_prediction": 1.0 - a.eps / (2 * p.alpha * p.beta),
        "bracket": [lo, hi], "tau_star": a.tau_star, "xtol": a.xtol,
        "functional": a.functional, "degree": a.degree,
    })
    return 0


COMMANDS = {
    "profile": cmd_profile, "rate": cmd_rate, "spectrum": cmd_spectrum,
    "recurrence": cmd_recurrence, "norms": cmd_norms, "evolve": cmd_evolve, "fit-T": cmd_fit_T,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="ymblow", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    def common(sp, out_flag="--out"):
        sp.add_argument("--config", help="JSON file with option values")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument(out_flag, default=None, help="output path (default: stdout)")
        sp.add_argument("--precision", choices=["auto", "double", "extended", "exact"],
                        default="auto")

    sp = sub.add_parser("profile", help="static profile, potential and gauge mode")
    sp.add_argument("--d", type=float)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--rho-grid", default="0:1:0.01")
    common(sp)

    sp = sub.add_parser("rate", help="blowup-rate exponent of the lightcone norm")
    sp.add_argument("--d", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--npts", type=int, default=20)
    sp.add_argument("--tmt-range", default="1e-3:1e-1")
    sp.add_argument("--degree", type=int, default=64)
    common(sp)

    sp = sub.add_parser("spectrum", help="classify a lambda grid by series ratios")
    sp.add_argument("--d", type=float)
    sp.add_argument("--re", default="0:5:0.25")
    sp.add_argument("--im", default="-5:5:0.25")
    sp.add_argument("--N", type=int, default=10_000)
    sp.add_argument("--which", choices=["susy", "original"], default="susy")
    sp.add_argument("--tol", type=float, default=1e-3)
    common(sp)

    sp = sub.add_parser("recurrence", help="verify the quasi-solution bounds")
    sp.add_argument("--d", type=float)
    sp.add_argument("--imax", type=int, default=10_000)
    sp.add_argument("--lambda-im", default="0:10:1")
    common(sp, out_flag="--report")

    sp = sub.add_parser("norms", help="D-norm versus energy norm on a random suite")
    sp.add_argument("--d", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--suite", default="random:100")
    sp.add_argument("--max-degree", type=int, default=20)
    sp.add_argument("--quad-factor", type=int, default=1)
    common(sp)

    sp = sub.add_parser("evolve", help="evolve a perturbed static state")
    sp.add_argument("--d", type=float)
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--remove-gauge-mode", action="store_true")
    sp.add_argument("--tau-end", type=float, default=15.0)
    sp.add_argument("--degree", type=int, default=64)
    sp.add_argument("--dtau", type=float)
    sp.add_argument("--sample-every", type=float, default=0.25)
    sp.add_argument("--mode", choices=["nonlinear", "linear"], default="nonlinear")
    common(sp)

    sp = sub.add_parser("fit-T", help="fit the blowup time of perturbed data")
    sp.add_argument("--d", type=float)
    sp.add_argument("--eps", type=float, default=1e-4)
    sp.add_argument("--bracket", default="0.9:1.1")
    sp.add_argument("--tau-star", type=float, default=10.0)
    sp.add_argument("--degree", type=int, default=48)
    sp.add_argument("--xtol", type=float, default=1e-8)
    sp.add_argument("--functional", choices=["projection", "correction"], default="projection")
    common(sp)
    return parser


def _apply_config(parser: _Parser, argv: list) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError("a command is required")
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        bad = sorted(set(cfg) - known - {"command"})
        if bad:
            raise UsageError(f"unknown config keys for {args.command}: {', '.join(bad)}")
        cfg.pop("command", None)
        cfg.pop("config", None)
        sp.set_defaults(**cfg)
        args = parser.parse_args(argv)  # flags override config defaults
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, dispatch, and return the exit code."""
    from .evolve import BracketError, DivergenceError
    from .profiles import DomainError

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args, argv)
    except UsageError as e:
        print(f"ymblow: error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (DivergenceError, BracketError) as e:
        print(f"ymblow: numerical failure: {e}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as e:
        print(f"ymblow: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
