"""Command-line entry point.

Every command writes ``<output_dir>/<command>-<timestamp>.json`` (plus CSV
files where a table is produced) and prints the JSON result to stdout.
Exit status is 0 on success, 1 on numerical failure and 2 on usage errors.
"""

from __future__ import annotations

import datetime as _dt
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .bve import PerturbationSpec, TrajectoryLog, integrate, mixed_modes, stability_probe
from .config import RunConfig, UsageError, parse_config
from .errors import InvalidArgument
from .extremal import (
    BIFURCATION,
    COUNTER,
    PRO,
    classify_regime,
    el_residual,
    extremal_states,
    figure_curves,
    multipliers,
    solve_euler_lagrange,
)
from .functionals import ModelParams, functional_report
from .io import to_json, write_csv, write_json
from .oracle import extremize_on_sphere, projected_hessian, random_state, verify_against_analytic
from .spharm import SpectralField

log = logging.getLogger("sphere_extremal")

TRACE_COLUMNS = ("iteration", "energy", "gradient_norm")
CURVE_COLUMNS = ("x", "y", "branch")


class _Run:
    """Output bookkeeping for a single command invocation."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        self.stem = f"{cfg.command}-{stamp}"
        self.files: list[str] = []

    def path(self, suffix: str) -> Path:
        p = self.out / f"{self.stem}{suffix}"
        self.files.append(str(p))
        return p

    def finish(self, result: dict, status: int = 0) -> int:
        doc = {
            "command": self.cfg.command,
            "version": __version__,
            "params": self.cfg.to_dict(),
            "status": status,
            "result": result,
        }
        json_path = self.path(".json")
        doc["files"] = list(self.files)
        write_json(json_path, doc)
        print(to_json(result))
        return status


def _params(cfg: RunConfig) -> ModelParams:
    return ModelParams(cfg.omega, cfg.q_rel)


def cmd_classify(cfg: RunConfig) -> int:
    run = _Run(cfg)
    return run.finish(classify_regime(_params(cfg)).to_dict())


def cmd_extremals(cfg: RunConfig) -> int:
    p = _params(cfg)
    mx, mn = extremal_states(p, cfg.L)
    lam_plus, lam_minus = multipliers(p)
    result = {
        "H_Max": mx.energy_original,
        "H_min": mn.energy_original,
        "lambda_plus": lam_plus,
        "lambda_minus": lam_minus,
        "max": mx.to_dict(),
        "min": mn.to_dict(),
        "max_functionals": functional_report(mx.state, p).to_dict(),
        "min_functionals": functional_report(mn.state, p).to_dict(),
    }
    return _Run(cfg).finish(result)


def cmd_solve_el(cfg: RunConfig) -> int:
    sol = solve_euler_lagrange(cfg.lambda_rel, cfg.omega)
    result = sol.to_dict()
    if sol.kind == "none":
        result["branch"] = None
        result["residual"] = None
    else:
        p = ModelParams(cfg.omega, 1.0)
        w = sol.particular(cfg.L)
        result["residual"] = el_residual(w, cfg.lambda_rel, p)
        result["enstrophy"] = w.norm2()
        if sol.kind == "family":
            result["branch"] = f"{BIFURCATION}({sol.kernel_degree})"
        elif sol.coefficient > 0:
            result["branch"] = PRO
        elif sol.coefficient < 0:
            result["branch"] = COUNTER
        else:
            result["branch"] = None
    return _Run(cfg).finish(result)


def cmd_oracle(cfg: RunConfig) -> int:
    p = _params(cfg)
    run = _Run(cfg)
    init = random_state(cfg.L, p.q_rel, cfg.seed)
    res = extremize_on_sphere(
        p, cfg.direction, init, step=cfg.step, tol=cfg.tol, max_iter=cfg.max_iter, record_trace=True
    )
    mx, mn = extremal_states(p, cfg.L)
    verdict = verify_against_analytic(res, mx if cfg.direction == "ascend" else mn, p)
    result = res.to_dict()
    result["verification"] = verdict.to_dict()
    if res.converged:
        try:
            result["hessian"] = projected_hessian(res.final_state, p, residual_tol=1e-6).to_dict()
        except ValueError:
            result["hessian"] = None
    write_csv(
        run.path(".csv"),
        TRACE_COLUMNS,
        res.trace,
        comments=[f"oracle trace: direction={cfg.direction} omega={p.omega!r} q_rel={p.q_rel!r}",
                  "energy: pseudo-energy H [1/time^2]; gradient_norm: tangent gradient norm"],
    )
    return run.finish(result, 0 if res.converged else 1)


def _write_trajectory(run: _Run, traj, title: str):
    h = traj.header()
    comments = [
        title,
        f"omega={h['params']['omega']!r} q_rel={h['params']['q_rel']!r} L={h['truncation']} "
        f"dt={h['dt']!r} filter={h['filter']}",
        "t [time]; H pseudo-energy, total_enstrophy, q1, q2 [1/time^2]; ang_mom <w,cos theta> [1/time]",
    ]
    write_csv(run.path(".csv"), TrajectoryLog.COLUMNS, traj.rows(), comments)
    if run.cfg.plot:
        from .plotting import render_trajectory

        render_trajectory(traj, run.path(".png"))


def cmd_evolve(cfg: RunConfig) -> int:
    p = _params(cfg)
    run = _Run(cfg)
    sq = math.sqrt(p.q_rel)
    if cfg.init == "random":
        w0 = random_state(cfg.L, p.q_rel, cfg.seed)
        base = None
    else:
        base = SpectralField.basis(cfg.L, 1, 0, sq if cfg.init == "wmax" else -sq)
        w0 = base + SpectralField.from_modes(cfg.L, cfg.modes)
    traj = integrate(
        w0, p, cfg.dt, cfg.t_end, cfg.sample_every, base=base, spectral_filter=cfg.spectral_filter
    )
    _write_trajectory(run, traj, f"evolve: init={cfg.init}")
    result = traj.header()
    result["drift"] = {k: traj.relative_drift(k) for k in ("H", "total_enstrophy", "ang_mom")}
    return run.finish(result, 1 if traj.blew_up else 0)


def cmd_probe(cfg: RunConfig) -> int:
    p = _params(cfg)
    run = _Run(cfg)
    modes = cfg.modes or mixed_modes(cfg.L, 1e-3 * math.sqrt(p.q_rel), cfg.seed)
    spec = PerturbationSpec(cfg.base, tuple(modes))
    sample_every = max(1, min(cfg.sample_every, int(round(cfg.t_end / cfg.dt)) or 1))
    res = stability_probe(spec, p, dt=cfg.dt, t_end=cfg.t_end, L=cfg.L, sample_every=sample_every)
    _write_trajectory(run, res.log, f"probe: base={cfg.base}")
    result = res.to_dict()
    result["regime"] = classify_regime(p).to_dict()
    result.update(res.log.header())
    return run.finish(result, 1 if res.log.blew_up else 0)


def _gnuplot_script(curve, csv_name: str) -> str:
    branches = " ".join(dict.fromkeys(r[2] for r in curve.rows))
    return "\n".join(
        [
            "set datafile separator ','",
            f"set xlabel '{curve.x_label}'",
            f"set ylabel '{curve.y_label}'",
            f"branches = \"{branches}\"",
            f"plot for [b in branches] '{csv_name}' skip 0 using 1:(strcol(3) eq b ? $2 : NaN) "
            "with lines title b",
            "",
        ]
    )


def cmd_figures(cfg: RunConfig) -> int:
    run = _Run(cfg)
    figs = [1, 2, 3, 4] if cfg.fig == "all" else [int(cfg.fig)]
    sweeps = {
        1: dict(k_min=cfg.k_min, k_max=cfg.k_max, n=cfg.n_points),
        2: dict(h_max=cfg.h_max, n=cfg.n_points),
        3: dict(q_max=cfg.q_max, n=cfg.n_points),
        4: dict(lambda_min=cfg.lambda_min, lambda_max=cfg.lambda_max, n=cfg.n_points),
    }
    written = {}
    for f in figs:
        curve = figure_curves(f, cfg.omega, **sweeps[f])
        comments = [f"figure {f}", f"x: {curve.x_label}", f"y: {curve.y_label}", *curve.notes]
        csv_path = write_csv(run.path(f"-fig{f}.csv"), CURVE_COLUMNS, curve.rows, comments)
        written[f"fig{f}"] = {"csv": str(csv_path), "rows": len(curve.rows)}
        if cfg.gnuplot:
            gp = run.path(f"-fig{f}.gp")
            gp.write_text(_gnuplot_script(curve, csv_path.name), encoding="utf-8")
        if cfg.plot:
            from .plotting import render_curve

            render_curve(curve, run.path(f"-fig{f}.png"))
    return run.finish({"figures": written})


DISPATCH = {
    "classify": cmd_classify,
    "extremals": cmd_extremals,
    "solve-el": cmd_solve_el,
    "oracle": cmd_oracle,
    "evolve": cmd_evolve,
    "probe": cmd_probe,
    "figures": cmd_figures,
}


def run(cfg: RunConfig) -> int:
    try:
        return DISPATCH[cfg.command](cfg)
    except (InvalidArgument, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, OverflowError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
