"""Run configuration: command-line flags, ``key = value`` files and defaults.

Precedence is flag > SPHERE_EXTREMAL_OUT (output_dir only) > config file
> built-in default.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
from pathlib import Path

COMMANDS = ("classify", "extremals", "solve-el", "oracle", "evolve", "probe", "figures")
OUT_ENV = "SPHERE_EXTREMAL_OUT"


class UsageError(Exception):
    """Invalid command line or configuration (exit status 2)."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    omega: float | None = None
    q_rel: float | None = None
    L: int = 21
    dt: float = 1e-3
    t_end: float = 10.0
    seed: int = 42
    output_dir: str = "results"
    lambda_rel: float | None = None
    # oracle
    direction: str = "ascend"
    step: float = 1.0
    tol: float = 1e-9
    max_iter: int = 20000
    # evolve / probe
    init: str = "random"
    base: str = "wmax"
    modes: tuple = ()
    sample_every: int = 100
    spectral_filter: bool = False
    # figures
    fig: str = "all"
    q_max: float = 10.0
    h_max: float = 4.0
    k_min: float = -4.0
    k_max: float = 4.0
    lambda_min: float = -1.5
    lambda_max: float = 1.0
    n_points: int = 201
    gnuplot: bool = False
    plot: bool = False

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["modes"] = [list(m) for m in self.modes]
        return d


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig) if f.name != "command"}
_BOOL = {"gnuplot", "plot", "spectral_filter"}
_INT = {"L", "seed", "max_iter", "sample_every", "n_points"}
_STR = {"output_dir", "direction", "init", "base", "fig"}
_REQUIRED = {
    "classify": ("omega", "q_rel"),
    "extremals": ("omega", "q_rel"),
    "solve-el": ("omega", "lambda_rel"),
    "oracle": ("omega", "q_rel"),
    "evolve": ("omega", "q_rel"),
    "probe": ("omega", "q_rel"),
    "figures": ("omega",),
}


def parse_modes(text: str) -> tuple:
    """Parse ``"l,m:amp; l,m:amp"`` into ((l, m, amp), ...)."""
    out = []
    for item in text.replace(";", " ").split():
        try:
            lm, amp = item.split(":")
            l, m = (int(v) for v in lm.split(","))
            out.append((l, m, float(amp)))
        except ValueError as exc:
            raise UsageError(f"cannot parse mode {item!r}; expected l,m:amplitude") from exc
        if l < 1 or abs(m) > l:
            raise UsageError(f"invalid mode l={l}, m={m}")
    return tuple(out)


def _coerce(key: str, value):
    if key == "modes":
        return parse_modes(value) if isinstance(value, str) else tuple(value)
    try:
        if key in _BOOL:
            if isinstance(value, bool):
                return value
            v = str(value).strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key in _INT:
            return int(value)
        if key in _STR:
            return str(value)
        return float(value)
    except ValueError as exc:
        raise UsageError(f"cannot parse {key} = {value!r}") from exc


def read_config_file(path: str | Path) -> dict:
    """Read flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--config", help="key = value configuration file")
    for name in _FIELDS:
        flag = "--" + name.replace("_", "-")
        if name in _BOOL:
            g.add_argument(flag, dest=name, action="store_const", const=True, default=None)
        elif name == "modes":
            g.add_argument(flag, dest=name, nargs="+", default=None, metavar="L,M:AMP")
        else:
            g.add_argument(flag, dest=name, default=None)
    parser = argparse.ArgumentParser(
        prog="sphere-extremal",
        description="Energy extremals on the enstrophy sphere and BVE stability probes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classify": "stability regime of the counter-rotating extremal",
        "extremals": "closed-form extremal states, multipliers and energies",
        "solve-el": "solve the Euler-Lagrange equation for one multiplier",
        "oracle": "projected-gradient extremisation on the enstrophy sphere",
        "evolve": "integrate the barotropic vorticity equation",
        "probe": "nonlinear stability probe of a perturbed extremal",
        "figures": "tabulate the curves of figures 1-4",
    }
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common], help=helps[cmd])
    return parser


def validate(cfg: RunConfig) -> RunConfig:
    for key in _REQUIRED[cfg.command]:
        if getattr(cfg, key) is None:
            raise UsageError(f"{cfg.command} requires {key}")
    for f in _FIELDS:
        v = getattr(cfg, f)
        if isinstance(v, float) and not math.isfinite(v):
            raise UsageError(f"{f} must be finite")
    if cfg.omega is not None and cfg.omega < 0:
        raise UsageError("omega must be >= 0")
    if cfg.q_rel is not None and cfg.q_rel <= 0:
        raise UsageError("q_rel must be > 0")
    if cfg.L < 1:
        raise UsageError("L must be >= 1")
    if cfg.dt <= 0 or cfg.t_end < 0:
        raise UsageError("dt must be > 0 and t_end >= 0")
    if cfg.step <= 0 or cfg.tol <= 0 or cfg.max_iter < 0:
        raise UsageError("step and tol must be > 0, max_iter >= 0")
    if cfg.sample_every < 1 or cfg.n_points < 2:
        raise UsageError("sample_every must be >= 1 and n_points >= 2")
    if cfg.direction not in ("ascend", "descend"):
        raise UsageError("direction must be ascend or descend")
    if cfg.init not in ("random", "wmax", "wmin"):
        raise UsageError("init must be random, wmax or wmin")
    if cfg.base not in ("wmax", "wmin"):
        raise UsageError("base must be wmax or wmin")
    if cfg.fig not in ("1", "2", "3", "4", "all"):
        raise UsageError("fig must be 1, 2, 3, 4 or all")
    if cfg.q_max <= 0 or cfg.h_max < 0:
        raise UsageError("q_max must be > 0 and h_max >= 0")
    if cfg.k_min >= cfg.k_max or cfg.lambda_min >= cfg.lambda_max:
        raise UsageError("sweep ranges must be increasing")
    return cfg


def parse_config(argv=None, environ=None) -> RunConfig:
    """Resolve a RunConfig from ``argv``; raises UsageError on bad input."""
    environ = os.environ if environ is None else environ
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("invalid command line") from exc
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    if environ.get(OUT_ENV):
        values["output_dir"] = environ[OUT_ENV]
    for name in _FIELDS:
        v = getattr(ns, name)
        if v is not None:
            values[name] = _coerce(name, " ".join(v) if name == "modes" else v)
    return validate(RunConfig(command=ns.command, **values))
