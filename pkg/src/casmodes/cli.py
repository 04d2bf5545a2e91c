"""Command-line front end.

Commands: ``modes``, ``dispersion``, ``eta``, ``sweep``, ``crossover``, ``fit``.
Distances given with ``--L``, ``--l-min``, ``--l-max`` and ``--window`` are in
units of the plasma wavelength; ``--k`` is in units of omega_p/c.  A plain
``key = value`` file passed with ``--config`` supplies defaults that command
line flags override.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 strict
acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from contextlib import contextmanager

import numpy as np

from .energy import (
    ALPHA_REF,
    BETA_REF,
    energy_breakdown,
    find_plasmonic_crossover,
    fit_asymptotic_constants,
    sweep_breakdown,
)
from .errors import CasmodesError
from .modes import (
    PLASMON_MINUS,
    PLASMON_PLUS,
    ModeBranch,
    dispersion_sweep,
    solve_photonic,
    solve_plasmonic,
)
from .numerics import QuadratureConfig
from .optics import MirrorModel, Polarization

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_STRICT = 0, 1, 2, 3

CROSSOVER_WINDOW = (0.04, 0.16)
ALPHA_TOL = 0.02
BETA_TOL = 0.03

MODE_COLUMNS = ["kL_over_pi", "pol", "branch", "m", "omega_over_omegap", "kz_over_kp", "sector"]
SWEEP_COLUMNS = [
    "L_over_lambdap", "eta", "eta_pl", "eta_pl_plus", "eta_pl_minus", "eta_ph", "err_total", "err_pl", "status",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".12g")


def _window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'lo,hi', got {text!r}") from None
    return lo, hi


def _pol(text: str) -> Polarization:
    try:
        return Polarization(text.upper())
    except ValueError:
        raise argparse.ArgumentTypeError(f"polarization must be TE or TM, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega-p", type=float, default=1.0, help="plasma frequency (default 1)")
    common.add_argument("--rel-tol", type=float, default=1e-9)
    common.add_argument("--abs-tol", type=float, default=1e-14)
    common.add_argument("--threads", type=int, default=1, help="worker processes, 0 = one per CPU")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--split-at-light-line", action="store_true",
                        help="count only the evanescent part of the upper plasmon as plasmonic")
    common.add_argument("--strict", action="store_true", help="exit 3 if acceptance tolerances fail")
    common.add_argument("--config", help="key = value defaults file")

    geometry = argparse.ArgumentParser(add_help=False)
    geometry.add_argument("--k", type=float, default=0.5, help="transverse wavevector")
    geometry.add_argument("--pol", type=_pol, default=Polarization.TE)
    geometry.add_argument("--L", type=float, help="single distance in units of lambda_p")
    geometry.add_argument("--l-min", type=float, help="smallest distance (units of lambda_p)")
    geometry.add_argument("--l-max", type=float, help="largest distance (units of lambda_p)")
    geometry.add_argument("--kl-pi-min", type=float, default=0.05)
    geometry.add_argument("--kl-pi-max", type=float, default=8.0)
    geometry.add_argument("--points", type=int, default=161)
    geometry.add_argument("--m-max", type=int, default=8)

    p = _Parser(prog="casmodes", description="Casimir energy of plasma mirrors by mode decomposition")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("modes", parents=[common, geometry], help="photonic and plasmonic modes vs kL/pi")
    sp.add_argument("--perfect", action="store_true", help="perfect-mirror reference kz = m pi / L")

    sp = sub.add_parser("dispersion", parents=[common, geometry], help="one branch tracked by continuation")
    sp.add_argument("--branch", choices=["plus", "minus", "photonic"], default="plus")
    sp.add_argument("--m", type=int, default=1, help="photonic order")

    sp = sub.add_parser("eta", parents=[common], help="reduction factors at one distance")
    sp.add_argument("--L", type=float, required=True, help="distance in units of lambda_p")

    sp = sub.add_parser("sweep", parents=[common], help="reduction factors over a log grid")
    sp.add_argument("--l-min", type=float, default=1e-3)
    sp.add_argument("--l-max", type=float, default=3e2)
    sp.add_argument("--points", type=int, default=60)

    sub.add_parser("crossover", parents=[common], help="sign change of the plasmonic share")

    sp = sub.add_parser("fit", parents=[common], help="short- and long-distance constants")
    sp.add_argument("--window", type=_window, default=(30.0, 300.0), help="long-distance window 'lo,hi'")
    sp.add_argument("--short-window", type=_window, default=(1e-3, 1e-2), help="short-distance window 'lo,hi'")
    sp.add_argument("--points", type=int, default=8)
    return p


# ---------------------------------------------------------------------------
# config file


def read_config(path: str) -> list[str]:
    """Translate ``key = value`` lines into flags.  ``true``/``false`` toggle switches."""
    args = []
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            key, value = (t.strip() for t in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes", "on"):
                args.append(flag)
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                args.extend([flag, value])
    return args


def _merge_config(argv: list[str]) -> list[str]:
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None or not argv:
        return argv
    # config flags go right after the command so later user flags win
    return [argv[0], *read_config(path), *argv[1:]]


# ---------------------------------------------------------------------------
# output


@contextmanager
def _sink(path):
    if path:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh
    else:
        yield sys.stdout


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    with _sink(path) as fh:
        fh.write(buf.getvalue())


def _qcfg(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _say(args, text):
    # keep stdout clean for CSV when no output file is given
    stream = sys.stdout if args.out else sys.stderr
    print(text, file=stream)


def _kl_grid(args, model) -> np.ndarray:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.L is not None:
        return np.array([args.k * args.L * model.lambda_p / math.pi])
    if args.l_min is not None or args.l_max is not None:
        if args.l_min is None or args.l_max is None:
            raise UsageError("--l-min and --l-max go together")
        lo = args.k * args.l_min * model.lambda_p / math.pi
        hi = args.k * args.l_max * model.lambda_p / math.pi
    else:
        lo, hi = args.kl_pi_min, args.kl_pi_max
    if not (0 < lo < hi):
        raise UsageError(f"invalid distance range ({lo}, {hi})")
    if args.k <= 0:
        raise UsageError("--k must be positive")
    return np.linspace(lo, hi, args.points)


def _mode_row(x, mp, model):
    kz = mp.kz
    m = mp.branch.m if mp.branch.m is not None else ""
    return [x, mp.pol.value, mp.branch.kind.value, m, mp.omega / model.omega_p,
            "" if kz is None else kz / model.omega_p, mp.sector.value]


# ---------------------------------------------------------------------------
# commands


def cmd_modes(args) -> int:
    model = MirrorModel(args.omega_p)
    if args.m_max < 1:
        raise UsageError("--m-max must be >= 1")
    rows = []
    for x in _kl_grid(args, model):
        L = x * math.pi / args.k
        for mp in solve_photonic(model, args.pol, args.k, L, args.m_max, perfect=args.perfect):
            rows.append(_mode_row(x, mp, model))
        if args.pol is Polarization.TM and not args.perfect:
            pair = solve_plasmonic(model, args.k, L)
            rows.append(_mode_row(x, pair.minus, model))
            rows.append(_mode_row(x, pair.plus, model))
    write_csv(args.out, MODE_COLUMNS, rows)
    return EXIT_OK


def cmd_dispersion(args) -> int:
    model = MirrorModel(args.omega_p)
    if args.branch == "photonic":
        branch = ModeBranch.photonic(args.m)
        pol = args.pol
    else:
        branch = PLASMON_PLUS if args.branch == "plus" else PLASMON_MINUS
        pol = Polarization.TM
    xs = _kl_grid(args, model)[::-1]  # from large distances, where the seed is cleanest
    curve = dispersion_sweep(model, branch, pol, args.k, xs * math.pi / args.k)
    rows = []
    for x, w in sorted(curve.points):
        q2 = (w - args.k) * (w + args.k)
        sector = "propagating" if q2 >= 0 else "evanescent"
        kz = math.sqrt(q2) / model.omega_p if q2 >= 0 else ""
        rows.append([x, pol.value, branch.kind.value, branch.m or "", w / model.omega_p, kz, sector])
    write_csv(args.out, MODE_COLUMNS, rows)
    _say(args, f"termination: {curve.termination.value}"
         + (f" at kL/pi = {args.k * curve.lost_at / math.pi:.6g}" if curve.lost_at is not None else ""))
    return EXIT_OK


def _sweep_row(b):
    status = "ok" if b.ok else "error: " + b.failure.replace("\n", " ")
    return [b.L_over_lambda_p, b.eta_total, b.eta_pl, b.eta_pl_plus, b.eta_pl_minus, b.eta_ph,
            b.err_total, b.err_pl, status]


def cmd_eta(args) -> int:
    if not args.L > 0:
        raise UsageError("--L must be positive")
    b = energy_breakdown(MirrorModel(args.omega_p), args.L, _qcfg(args),
                         split_at_light_line=args.split_at_light_line)
    write_csv(args.out, SWEEP_COLUMNS, [_sweep_row(b)])
    _say(args, f"L/lambda_p = {fmt(b.L_over_lambda_p)}: eta = {fmt(b.eta_total)}, "
               f"eta_pl = {fmt(b.eta_pl)}, eta_ph = {fmt(b.eta_ph)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if not (0 < args.l_min < args.l_max):
        raise UsageError(f"invalid range [{args.l_min}, {args.l_max}]")
    xs = np.geomspace(args.l_min, args.l_max, args.points)
    rows = sweep_breakdown(MirrorModel(args.omega_p), xs, _qcfg(args),
                           split_at_light_line=args.split_at_light_line, threads=args.threads)
    rows.sort(key=lambda b: b.L_over_lambda_p)
    write_csv(args.out, SWEEP_COLUMNS, [_sweep_row(b) for b in rows])
    failed = sum(not b.ok for b in rows)
    if failed:
        print(f"{failed} of {len(rows)} points failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_crossover(args) -> int:
    c = find_plasmonic_crossover(MirrorModel(args.omega_p), _qcfg(args),
                                 split_at_light_line=args.split_at_light_line)
    print(f"L_cross/lambda_p = {fmt(c.L_over_lambda_p)} +- {c.uncertainty:.2g}")
    lo, hi = CROSSOVER_WINDOW
    ok = lo <= c.L_over_lambda_p <= hi
    print(f"window [{lo}, {hi}]: {'PASS' if ok else 'FAIL'}")
    if args.out:
        write_csv(args.out, ["L_cross_over_lambdap", "uncertainty"], [[c.L_over_lambda_p, c.uncertainty]])
    return EXIT_STRICT if args.strict and not ok else EXIT_OK


def cmd_fit(args) -> int:
    for name, (lo, hi) in (("--window", args.window), ("--short-window", args.short_window)):
        if not (0 < lo < hi):
            raise UsageError(f"{name} must satisfy 0 < lo < hi, got {lo},{hi}")
    if args.points < 4:
        raise UsageError("--points must be at least 4 for a fit")
    f = fit_asymptotic_constants(MirrorModel(args.omega_p), _qcfg(args), short_window=args.short_window,
                                 long_window=args.window, points=args.points, threads=args.threads)
    a_ok = abs(f.alpha / ALPHA_REF - 1) <= ALPHA_TOL
    b_ok = abs(f.beta_ph / BETA_REF - 1) <= BETA_TOL
    agree = abs(f.beta_pl - f.beta_ph) <= math.hypot(BETA_TOL, BETA_TOL) * BETA_REF
    lines = [
        f"alpha = {fmt(f.alpha)} (residual {f.alpha_fit.residual:.3g}) vs {ALPHA_REF}: {'PASS' if a_ok else 'FAIL'}",
        f"beta (eta_ph - 1) = {fmt(f.beta_ph)} (residual {f.beta_ph_fit.residual:.3g}) "
        f"vs {BETA_REF}: {'PASS' if b_ok else 'FAIL'}",
        f"beta (-eta_pl) = {fmt(f.beta_pl)} (residual {f.beta_pl_fit.residual:.3g}): "
        f"{'PASS' if agree else 'FAIL'} agreement",
        f"with constant term: beta = {fmt(f.beta_ph_offset.prefactor)} offset {fmt(f.beta_ph_offset.offset)} "
        f"(eta_ph - 1), {fmt(f.beta_pl_offset.prefactor)} offset {fmt(f.beta_pl_offset.offset)} (-eta_pl)",
    ]
    print("\n".join(lines))
    if args.out:
        rows = [
            ["alpha", f.alpha, f.alpha_fit.residual, "", *args.short_window],
            ["beta_ph", f.beta_ph, f.beta_ph_fit.residual, 0.0, *args.window],
            ["beta_pl", f.beta_pl, f.beta_pl_fit.residual, 0.0, *args.window],
            ["beta_ph_offset", f.beta_ph_offset.prefactor, f.beta_ph_offset.residual, f.beta_ph_offset.offset,
             *args.window],
            ["beta_pl_offset", f.beta_pl_offset.prefactor, f.beta_pl_offset.residual, f.beta_pl_offset.offset,
             *args.window],
        ]
        write_csv(args.out, ["quantity", "value", "residual", "offset", "window_lo", "window_hi"], rows)
    return EXIT_STRICT if args.strict and not (a_ok and b_ok and agree) else EXIT_OK


COMMANDS = {
    "modes": cmd_modes,
    "dispersion": cmd_dispersion,
    "eta": cmd_eta,
    "sweep": cmd_sweep,
    "crossover": cmd_crossover,
    "fit": cmd_fit,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
    except (OSError, UsageError) as exc:
        print(f"casmodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.rel_tol <= 0 or args.abs_tol <= 0:
        print("casmodes: error: tolerances must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"casmodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CasmodesError, ArithmeticError) as exc:
        print(f"casmodes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"casmodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
