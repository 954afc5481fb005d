"""Command-line entry point: ``cascadenet <subcommand> ...``.

Exit status: 0 success, 2 validation error, 3 physicality error,
4 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import amplitudes, dynamics, gksl, regular
from .errors import CascadeError, ValidationError
from .network import RegularSpec, as_network
from .specfile import dump_spec, load_spec

COMMANDS = ("couplings", "gksl", "xi", "design", "sweep", "threshold", "simulate")


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    format: str = "csv"
    quiet: bool = False
    degrees: bool = False
    options: dict = field(default_factory=dict)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _pairs(mat):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


class _Ctx:
    def __init__(self, cfg: RunConfig, stderr):
        self.cfg = cfg
        self.stderr = stderr

    def report(self, text):
        if not self.cfg.quiet:
            print(text, file=self.stderr)

    def spec(self):
        _require(self.cfg.input is not None, f"{self.cfg.command}: a spec file is required")
        return load_spec(self.cfg.input, self.cfg.degrees)

    def angle(self, x):
        return math.radians(x) if self.cfg.degrees else float(x)


def _cmd_couplings(ctx):
    opt = ctx.cfg.options
    net = as_network(ctx.spec())
    if opt.get("oracle"):
        cm = amplitudes.coupling_matrix_oracle(net)
    else:
        cm = amplitudes.coupling_matrix(net)
    extra = {}
    if opt.get("check"):
        other = amplitudes.coupling_matrix_oracle(net)
        dev = float(np.max(np.abs(cm.zeta - other.zeta), initial=0.0))
        extra["max_discrepancy"] = dev
        ctx.report(f"max |zeta - zeta_oracle| = {dev:.3e}")
    if ctx.cfg.format == "json":
        return _json({"M": cm.M, "zeta": _pairs(cm.zeta), **extra})
    header = ["m"] + [f"{p}_{mp}" for mp in range(1, cm.M + 1) for p in ("re", "im")]
    rows = []
    for m in range(cm.M):
        row = [m + 1]
        for mp in range(cm.M):
            row += [cm.zeta[m, mp].real, cm.zeta[m, mp].imag]
        rows.append(row)
    return _csv(header, rows)


def _cmd_gksl(ctx):
    spec = ctx.spec()
    net = as_network(spec)
    zeta = amplitudes.coupling_matrix(net)
    theta = gksl.build_theta(zeta, net.gamma)
    form = gksl.gksl_decompose(theta, zeta)
    out = {
        "rates": [float(r) for r in form.rates],
        "lindblad": _pairs(form.lindblad_coeffs),
        "heff": _pairs(form.heff_coeffs),
    }
    if ctx.cfg.options.get("closed_form") == "evenodd":
        _require(isinstance(spec, RegularSpec) and spec.M >= 3,
                 "--closed-form evenodd needs a regular spec with M >= 3")
        tau1, phi1 = spec.taus[0], spec.phis[0]
        dphi = (spec.phis[1] - phi1 - math.pi / 2) % (2 * math.pi)
        _require(spec.taus[1] == 0.0 and min(dphi, 2 * math.pi - dphi) < 1e-12,
                 "even/odd network requires tau_2 = 0 and phi_2 = phi_1 + pi/2")
        closed = gksl.lindblad_closed_form_evenodd(spec.M, tau1, net.gamma, phi1)
        dev = gksl.compare_forms(form, closed)
        out["closed_form_deviation"] = dev
        ctx.report("closed-form deviations: " + ", ".join(f"{k}={v:.3e}" for k, v in dev.items()))
    return _json(out)


def _cmd_xi(ctx):
    spec = ctx.spec()
    _require(isinstance(spec, RegularSpec), "xi needs a spec with a 'regular' block")
    kmax = ctx.cfg.options.get("kmax") or spec.M - 1
    prof = regular.xi_profile(spec, kmax)
    rows = [(k, x.real, x.imag, abs(x)) for k, x in enumerate(prof.xi, start=1)]
    if ctx.cfg.format == "json":
        return _json({"k": [r[0] for r in rows], "xi": _pairs([prof.xi])[0],
                      "abs_xi": [float(r[3]) for r in rows]})
    return _csv(["k", "re_xi", "im_xi", "abs_xi"], rows)


def _cmd_design(ctx):
    opt = ctx.cfg.options
    sched = regular.design_pruned(opt["order"], opt["tau"], ctx.angle(opt["phi"]), opt["count"])
    spec = sched.to_regular_spec(opt["gamma"], opt["loss"])
    rep = regular.verify_design(sched)
    ctx.report(
        f"design n={sched.n}: |xi_n| = {rep['retained']:.17g} "
        f"(target {sched.xi1_modulus:.17g}), max pruned |xi_k| = {rep['max_pruned']:.3e}"
    )
    buf = io.StringIO()
    dump_spec(spec, buf)
    return buf.getvalue()


def _cmd_sweep(ctx):
    opt = ctx.cfg.options
    _require(opt["tau_steps"] >= 2 and opt["phi2_steps"] >= 2, "sweep needs >= 2 grid steps")
    tau1s = np.linspace(0.0, 1.0, opt["tau_steps"])
    phi2s = np.linspace(0.0, 2 * math.pi, opt["phi2_steps"])
    rows = regular.sweep(tau1s, phi2s, ctx.angle(opt["phi1"]), opt["kmax"], opt["workers"])
    if ctx.cfg.format == "json":
        return _json([dict(zip(("tau1", "phi2", "k", "abs_xi"), r)) for r in rows])
    return _csv(["tau1", "phi2", "k", "abs_xi"], rows)


def _cmd_threshold(ctx):
    opt = ctx.cfg.options
    _require(2 <= opt["kmin"] <= opt["kmax"], "need 2 <= kmin <= kmax")
    rows = [(k, regular.threshold_scan(k, opt["grid"], opt["refine"]))
            for k in range(opt["kmin"], opt["kmax"] + 1)]
    if ctx.cfg.format == "json":
        return _json([{"k": k, "threshold": t} for k, t in rows])
    return _csv(["k", "threshold"], rows)


def _cmd_simulate(ctx):
    opt = ctx.cfg.options
    net = as_network(ctx.spec())
    d = opt["d"]
    _require(d >= 2, "--d must be >= 2")
    excited = [int(s) for s in opt["init"].split(",") if s.strip()] if opt["init"] else []
    gen = dynamics.cascade_generator(net, d, opt["max_dim"])
    rho0 = dynamics.fock_state(net.M, d, excited, opt["superposed"])
    traj = dynamics.evolve(gen, rho0, opt["t_final"], opt["dt"], every=opt["every"])
    if traj.step_error is not None:
        ctx.report(f"step-halving error estimate at t_final: {traj.step_error:.3e}")
    header = ["t"] + [f"n_{m}" for m in range(1, net.M + 1)]
    with_moments = opt["observables"] == "moments"
    if with_moments:
        header += [f"{p}_a_{m}" for m in range(1, net.M + 1) for p in ("re", "im")]
    rows = []
    for t, st in zip(traj.times, traj.states):
        row = [t, *dynamics.populations(st)]
        if with_moments:
            for a in dynamics.moments(st):
                row += [a.real, a.imag]
        rows.append(row)
    if ctx.cfg.format == "json":
        return _json({"columns": header, "rows": [[float(v) for v in r] for r in rows]})
    return _csv(header, rows)


_HANDLERS = {
    "couplings": _cmd_couplings,
    "gksl": _cmd_gksl,
    "xi": _cmd_xi,
    "design": _cmd_design,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "simulate": _cmd_simulate,
}


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if config.command not in _HANDLERS:
        print(f"cascadenet: unknown subcommand {config.command!r}", file=stderr)
        return 2
    try:
        text = _HANDLERS[config.command](_Ctx(config, stderr))
    except CascadeError as exc:
        print(f"cascadenet {config.command}: {exc}", file=stderr)
        return exc.exit_code
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--quiet", "-q", action="store_true")
    common.add_argument("--degrees", action="store_true",
                        help="read every input angle in degrees")

    p = argparse.ArgumentParser(prog="cascadenet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("couplings", parents=[common], help="coupling matrix zeta")
    s.add_argument("spec")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--oracle", action="store_true", help="use path enumeration")
    g.add_argument("--check", action="store_true", help="compare both routes")

    s = sub.add_parser("gksl", parents=[common], help="rates, jump operators, H_eff")
    s.add_argument("spec")
    s.add_argument("--closed-form", choices=("evenodd",), default=None)

    s = sub.add_parser("xi", parents=[common], help="k-th neighbour couplings")
    s.add_argument("spec")
    s.add_argument("--kmax", type=int, default=None)

    s = sub.add_parser("design", parents=[common], help="pruned regular network")
    s.add_argument("--order", type=int, default=1)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--loss", type=float, default=0.0)

    s = sub.add_parser("sweep", parents=[common], help="|xi_k| over (tau_1, phi_2), tau_2 = 0")
    s.add_argument("--phi1", type=float, default=0.0)
    s.add_argument("--tau-steps", type=int, default=21)
    s.add_argument("--phi2-steps", type=int, default=21)
    s.add_argument("--kmax", type=int, default=4)
    s.add_argument("--workers", type=int, default=None)

    s = sub.add_parser("threshold", parents=[common], help="pruning threshold vs order")
    s.add_argument("--kmin", type=int, default=2)
    s.add_argument("--kmax", type=int, default=10)
    s.add_argument("--grid", type=float, default=1e-4)
    s.add_argument("--refine", action="store_true")

    s = sub.add_parser("simulate", parents=[common], help="integrate the master equation")
    s.add_argument("spec")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--t-final", type=float, required=True)
    s.add_argument("--dt", type=float, required=True)
    s.add_argument("--init", default="", help="comma-separated excited sites, e.g. 1,3")
    s.add_argument("--superposed", action="store_true",
                   help="prepare excited sites in (|0>+|1>)/sqrt2")
    s.add_argument("--observables", choices=("populations", "moments"), default="populations")
    s.add_argument("--every", type=int, default=1, help="emit every n-th step")
    s.add_argument("--max-dim", type=int, default=dynamics.MAX_SUPEROP_DIM)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items()
            if k not in ("command", "spec", "output", "format", "quiet", "degrees")}
    return RunConfig(ns.command, getattr(ns, "spec", None), ns.output, ns.format,
                     ns.quiet, ns.degrees, opts)


def _validate_options(cfg: RunConfig):
    o = cfg.options
    if o.get("kmax") is not None and o["kmax"] < 1:
        raise ValidationError("--kmax must be >= 1")
    if cfg.command == "simulate":
        if o["dt"] <= 0 or o["t_final"] < 0 or o["every"] < 1:
            raise ValidationError("need --dt > 0, --t-final >= 0, --every >= 1")
    if cfg.command == "threshold" and not (0 < o["grid"] < 1):
        raise ValidationError("--grid must lie in (0, 1)")


def main(argv=None, stdout=None, stderr=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        _validate_options(cfg)
    except ValidationError as exc:
        print(f"cascadenet {cfg.command}: {exc}", file=stderr or sys.stderr)
        return exc.exit_code
    return run(cfg, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
