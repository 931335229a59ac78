"""Command-line front end.

Exit status: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import closedform as cf
from .dynamics import DEFAULT_DT
from .model import FockAtomBasis, ModelParams
from .observables import COLUMNS, METHODS, evolve_observables, evolve_states, state_observables
from .verify import flipped_coherence, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
DEFAULT_GAMMA = 0.1  # verify / evolve / steady when --gamma is absent

# Caption defaults; a flag given on the command line overrides them.
FIGURE_DEFAULTS = {
    1: dict(gammas=[1.0, 0.0, 0.01, 0.05], delta=0.0, points=1001),
    2: dict(delta=5.0, points=101),
    3: dict(time=10.0, points=101),
    4: dict(gamma=0.1, points=1001),
    5: dict(delta=0.0, points=101),
    6: dict(time=2.0, deltas=[0.0, 1.0, 2.0], points=101),
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    figure_id: int | None = None
    g_a: float = 1.0
    g_b: float = 1.0
    delta: float | None = None
    gamma: float | None = None
    omega: float = 1.0
    delta_mix: float = 0.0
    t_max: float = 10.0
    time: float | None = None
    n_points: int | None = None
    gamma_max: float = 1.0
    delta_min: float = 0.0
    delta_max: float = 10.0
    dt: float = DEFAULT_DT
    method: str = "closed"
    out_path: str | None = None
    inject_sign_flip: bool = False

    def __post_init__(self):
        if self.n_points is not None and self.n_points < 2:
            raise UsageError("--points must be at least 2")
        if self.t_max <= 0:
            raise UsageError("--tmax must be positive")
        if self.dt <= 0:
            raise UsageError("--dt must be positive")
        if self.method not in METHODS:
            raise UsageError(f"--method must be one of {METHODS}")

    def params(self, delta=None, gamma=None) -> ModelParams:
        delta = delta if delta is not None else (self.delta if self.delta is not None else 0.0)
        gamma = gamma if gamma is not None else (self.gamma if self.gamma is not None else DEFAULT_GAMMA)
        try:
            return ModelParams.from_detuning(self.g_a, self.g_b, delta, gamma, self.omega)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


def fmt(x) -> str:
    return format(float(x), ".12g")


def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def _header(cfg: RunConfig, extra: str = "") -> list:
    lines = [
        f"# command={cfg.command} method={cfg.method}"
        + (f" figure={cfg.figure_id}" if cfg.figure_id else ""),
        f"# g_a={fmt(cfg.g_a)} g_b={fmt(cfg.g_b)} omega={fmt(cfg.omega)} "
        f"delta_mix={fmt(cfg.delta_mix)} dt={fmt(cfg.dt)}",
    ]
    if extra:
        lines.append(f"# {extra}")
    return lines


def _csv(header_lines, columns, rows) -> str:
    out = io.StringIO()
    for line in header_lines:
        out.write(line + "\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def _series(cfg: RunConfig, p: ModelParams, times, name: str):
    return evolve_observables(p, times, cfg.method, cfg.delta_mix, cfg.dt)[name]


def _value_at(cfg: RunConfig, p: ModelParams, t: float, name: str) -> float:
    return float(_series(cfg, p, [t], name)[0])


def _steady(cfg: RunConfig, p: ModelParams):
    """(C_AB, C_B, P_g) in the long-time limit with the selected engine."""
    if cfg.method == "closed":
        return cf.stationary_values(p, cfg.delta_mix)
    t_inf = cf.steady_time(p)
    basis = FockAtomBasis(2)
    rho = evolve_states(p, [t_inf], cfg.method, cfg.delta_mix, cfg.dt, basis)[0]
    obs = state_observables(rho, p, basis)
    return obs["C_AB"], obs["C_B"], obs["P_g"]


def figure_table(cfg: RunConfig):
    """Return ``(extra_header, columns, rows)`` for the requested figure."""
    fid = cfg.figure_id
    if fid not in FIGURE_DEFAULTS:
        raise UsageError(f"unknown figure id {fid}; choose 1..6")
    d = FIGURE_DEFAULTS[fid]
    n = cfg.n_points or d["points"]

    if fid == 1:
        gammas = [cfg.gamma] if cfg.gamma is not None else d["gammas"]
        delta = cfg.delta if cfg.delta is not None else d["delta"]
        times = _grid(0.0, cfg.t_max, n)
        cols = [_series(cfg, cfg.params(delta, g), times, "P_g") for g in gammas]
        return (f"P_g vs t; delta={fmt(delta)}", ["t"] + [f"Pg_gamma{fmt(g)}" for g in gammas],
                list(zip(times, *cols)))

    if fid in (2, 5):
        delta = cfg.delta if cfg.delta is not None else d["delta"]
        name = "C_AB" if fid == 2 else "C_B"
        times = _grid(0.0, cfg.t_max, n)
        gammas = _grid(0.0, cfg.gamma_max, n)
        per_gamma = [_series(cfg, cfg.params(delta, g), times, name) for g in gammas]
        rows = [(t, g, per_gamma[j][i]) for i, t in enumerate(times) for j, g in enumerate(gammas)]
        return f"{name} vs (t, gamma); delta={fmt(delta)}", ["t", "gamma", name], rows

    if fid == 3:
        t_fix = cfg.time if cfg.time is not None else d["time"]
        deltas = _grid(cfg.delta_min, cfg.delta_max, n)
        gammas = _grid(0.0, cfg.gamma_max, n)
        rows = [(dl, g, _value_at(cfg, cfg.params(dl, g), t_fix, "C_AB"))
                for dl in deltas for g in gammas]
        return f"C_AB vs (delta, gamma); t={fmt(t_fix)}", ["delta", "gamma", "C_AB"], rows

    if fid == 4:
        gamma = cfg.gamma if cfg.gamma is not None else d["gamma"]
        deltas = _grid(cfg.delta_min, cfg.delta_max, n)
        try:
            values = [_steady(cfg, cfg.params(dl, gamma))[0] for dl in deltas]
        except cf.NoStationaryStateError as exc:
            raise UsageError(str(exc)) from exc
        return f"stationary C_AB vs delta; gamma={fmt(gamma)}", ["delta", "C_AB"], list(zip(deltas, values))

    t_fix = cfg.time if cfg.time is not None else d["time"]
    deltas = [cfg.delta] if cfg.delta is not None else d["deltas"]
    gammas = _grid(0.0, cfg.gamma_max, n)
    cols = [[_value_at(cfg, cfg.params(dl, g), t_fix, "C_B") for g in gammas] for dl in deltas]
    return (f"C_B vs gamma; t={fmt(t_fix)}", ["gamma"] + [f"CB_delta{fmt(dl)}" for dl in deltas],
            list(zip(gammas, *cols)))


def cmd_figure(cfg: RunConfig) -> str:
    extra, columns, rows = figure_table(cfg)
    return _csv(_header(cfg, extra), columns, rows)


def cmd_evolve(cfg: RunConfig) -> str:
    p = cfg.params()
    times = _grid(0.0, cfg.t_max, cfg.n_points or 101)
    obs = evolve_observables(p, times, cfg.method, cfg.delta_mix, cfg.dt)
    extra = f"delta={fmt(p.delta)} gamma={fmt(p.gamma)}"
    rows = zip(times, *(obs[c] for c in COLUMNS))
    return _csv(_header(cfg, extra), ["t", *COLUMNS], rows)


def cmd_steady(cfg: RunConfig) -> str:
    p = cfg.params()
    try:
        values = _steady(cfg, p)
    except cf.NoStationaryStateError as exc:
        raise UsageError(str(exc)) from exc
    extra = f"delta={fmt(p.delta)} gamma={fmt(p.gamma)}"
    return _csv(_header(cfg, extra), ["C_AB_inf", "C_B_inf", "P_g_inf"], [values])


def cmd_verify(cfg: RunConfig):
    """Return ``(report, all_passed)``."""
    p = cfg.params()
    closed = flipped_coherence() if cfg.inject_sign_flip else cf.rho_closed
    checks = run_verification(p, cfg.delta_mix, cfg.t_max, cfg.n_points or 101, cfg.dt,
                              closed_form=closed)
    lines = [
        f"# verify: g_a={fmt(p.g_a)} g_b={fmt(p.g_b)} delta={fmt(p.delta)} "
        f"gamma={fmt(p.gamma)} omega={fmt(p.omega)} delta_mix={fmt(cfg.delta_mix)}"
    ]
    lines += [c.line() for c in checks]
    failed = [c.name for c in checks if not c.passed]
    lines.append("all checks passed" if not failed else "FAILED: " + "; ".join(failed))
    return "\n".join(lines) + "\n", not failed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ga", dest="g_a", type=float, default=1.0, help="coupling to mode a")
    common.add_argument("--gb", dest="g_b", type=float, default=1.0, help="coupling to mode b")
    common.add_argument("--delta", type=float, default=None, help="detuning omega0 - omega")
    common.add_argument("--gamma", type=float, default=None, help="phase decoherence rate")
    common.add_argument("--omega", type=float, default=1.0, help="cavity frequency")
    common.add_argument("--delta-mix", type=float, default=0.0,
                        help="initial ground-state weight of the atom")
    common.add_argument("--tmax", dest="t_max", type=float, default=10.0)
    common.add_argument("--points", dest="n_points", type=int, default=None)
    common.add_argument("--dt", type=float, default=DEFAULT_DT, help="RK4 step")
    common.add_argument("--method", choices=METHODS, default="closed")
    common.add_argument("--out", dest="out_path", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="cavity-dephasing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", parents=[common], help="write figure data as CSV")
    fig.add_argument("figure_id", type=int, choices=range(1, 7), metavar="N")
    fig.add_argument("--time", type=float, default=None, help="fixed time (figures 3 and 6)")
    fig.add_argument("--gamma-max", type=float, default=1.0)
    fig.add_argument("--delta-min", type=float, default=0.0)
    fig.add_argument("--delta-max", type=float, default=10.0)

    ver = sub.add_parser("verify", parents=[common], help="run the cross-verification suite")
    ver.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)

    sub.add_parser("evolve", parents=[common], help="observables along a trajectory as CSV")
    sub.add_parser("steady", parents=[common], help="long-time limits")
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = RunConfig(**vars(args))
        if cfg.command == "verify":
            report, ok = cmd_verify(cfg)
            _write(report, cfg.out_path)
            return EXIT_OK if ok else EXIT_VERIFY
        text = {"figure": cmd_figure, "evolve": cmd_evolve, "steady": cmd_steady}[cfg.command](cfg)
        _write(text, cfg.out_path)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
