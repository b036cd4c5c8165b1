"""Pseudospectral barotropic vorticity equation on the rotating unit sphere.

    dw/dt = -J(psi, w + 2 Omega mu),   psi = G w,
    J(a, b) = a_lon b_mu - a_mu b_lon

The planetary vorticity 2 Omega mu equals 2 Omega C Y_10, so the total
vorticity stays in the spectral representation. Products are formed on a
grid that projects quadratic terms exactly, which makes energy,
enstrophy and angular momentum invariants of the semi-discrete system;
time stepping is classical RK4 with a fixed step.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from .errors import InvalidArgument
from .extremal import check_extremal
from .functionals import (
    C_CONST,
    I10,
    ModelParams,
    enstrophies,
    kinetic_energy,
    physical_angular_momentum,
    pseudo_energy,
)
from .spharm import (
    BasisTables,
    SpectralField,
    analyze_array,
    build_basis,
    degree_arrays,
    eigen_ll1,
    index,
    synth_array,
)

log = logging.getLogger(__name__)

STABLE = "Stable"
UNSTABLE = "Unstable"
INCONCLUSIVE = "Inconclusive"

# Q1 + Q2 may grow by this fraction and still count as bounded
STABILITY_DELTA = 0.05
GROWTH_FACTOR = 10.0


def _jacobian_grid(psi: np.ndarray, q: np.ndarray, tables: BasisTables) -> np.ndarray:
    both = np.stack([psi, q])
    d_lon = synth_array(both, tables, "lon")
    d_mu = synth_array(both, tables, "mu")  # (1 - mu^2) d/dmu
    inv = 1.0 / (1.0 - tables.gauss_nodes**2)
    return (d_lon[0] * d_mu[1] - d_mu[0] * d_lon[1]) * inv[:, None]


def _jacobian_array(psi: np.ndarray, q: np.ndarray, tables: BasisTables) -> np.ndarray:
    return analyze_array(_jacobian_grid(psi, q, tables), tables)


def jacobian_grid(psi: SpectralField, q: SpectralField, tables: BasisTables) -> np.ndarray:
    """J(psi, q) evaluated pointwise on the quadrature grid."""
    if psi.L != q.L or psi.L != tables.L:
        raise InvalidArgument(
            f"truncation mismatch: psi L={psi.L}, q L={q.L}, tables L={tables.L}"
        )
    return _jacobian_grid(psi.coeffs, q.coeffs, tables)


def jacobian(psi: SpectralField, q: SpectralField, tables: BasisTables) -> SpectralField:
    """Spectral coefficients of J(psi, q), dealiased."""
    if psi.L != q.L or psi.L != tables.L:
        raise InvalidArgument(
            f"truncation mismatch: psi L={psi.L}, q L={q.L}, tables L={tables.L}"
        )
    return SpectralField(tables.L, _jacobian_array(psi.coeffs, q.coeffs, tables))


def planetary_vorticity(omega: float, L: int) -> SpectralField:
    """2 Omega cos(theta) as a spectral field."""
    return SpectralField.basis(L, 1, 0, 2.0 * omega * C_CONST)


def tendency(c: np.ndarray, omega: float, tables: BasisTables) -> np.ndarray:
    psi = -c / eigen_ll1(tables.L)
    q = c.copy()
    q[I10] += 2.0 * omega * C_CONST
    return -_jacobian_array(psi, q, tables)


def rk4_step(c: np.ndarray, dt: float, omega: float, tables: BasisTables) -> np.ndarray:
    k1 = tendency(c, omega, tables)
    k2 = tendency(c + 0.5 * dt * k1, omega, tables)
    k3 = tendency(c + 0.5 * dt * k2, omega, tables)
    k4 = tendency(c + dt * k3, omega, tables)
    return c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_steps(c: np.ndarray, dt: float, n: int, omega: float, tables: BasisTables) -> np.ndarray:
    """Advance ``n`` RK4 steps; ``dt`` may be negative."""
    for _ in range(n):
        c = rk4_step(c, dt, omega, tables)
    return c


def max_speed(w: SpectralField, tables: BasisTables) -> float:
    psi = -w.resized(tables.L).coeffs / eigen_ll1(tables.L)
    d_lon = synth_array(psi, tables, "lon")
    d_mu = synth_array(psi, tables, "mu")
    s2 = 1.0 - tables.gauss_nodes**2
    # |u|^2 = (1 - mu^2) psi_mu^2 + psi_lon^2 / (1 - mu^2)
    speed2 = (d_mu**2 + d_lon**2) / s2[:, None]
    return float(np.sqrt(speed2.max()))


def cfl_limit(w: SpectralField, tables: BasisTables) -> float:
    """Advisory step bound 0.5 / (L max|u|)."""
    u = max_speed(w, tables)
    return math.inf if u == 0 else 0.5 / (tables.L * u)


def _filter_factors(L: int) -> np.ndarray:
    ls, _ = degree_arrays(L)
    lc = 0.9 * L
    x = np.clip((ls - lc) / max(L - lc, 1e-12), 0.0, None)
    return np.exp(-36.0 * x**4)


# -- quadratic forms of a deviation ------------------------------------------


def q1_form(dw: SpectralField) -> float:
    """Energy part of the Arnold norm: a_10^2/4 + 1/2 sum_{lm != 10} a_lm^2 / (l(l+1))."""
    return kinetic_energy(dw)


def q2_form(dw: SpectralField) -> float:
    return dw.norm2()


def tilt_deviation(dw: SpectralField) -> float:
    c = dw.coeffs
    return math.sqrt(c[index(1, 1)] ** 2 + c[index(1, -1)] ** 2)


@dataclasses.dataclass
class TrajectoryLog:
    """Sampled monitors of one integration.

    ``ang_mom`` is <w, cos(theta)>; ``q1``/``q2`` are measured from ``base``.
    """

    params: ModelParams
    L: int
    dt: float
    spectral_filter: bool
    times: list[float] = dataclasses.field(default_factory=list)
    states: list[SpectralField] = dataclasses.field(default_factory=list)
    H: list[float] = dataclasses.field(default_factory=list)
    total_enstrophy: list[float] = dataclasses.field(default_factory=list)
    ang_mom: list[float] = dataclasses.field(default_factory=list)
    q1: list[float] = dataclasses.field(default_factory=list)
    q2: list[float] = dataclasses.field(default_factory=list)
    tilt: list[float] = dataclasses.field(default_factory=list)
    blew_up: bool = False

    COLUMNS = ("t", "H", "total_enstrophy", "ang_mom", "q1", "q2", "q1_plus_q2")

    def record(self, t: float, w: SpectralField, base: SpectralField, keep_state: bool):
        dw = w - base
        self.times.append(t)
        if keep_state:
            self.states.append(w)
        self.H.append(pseudo_energy(w, self.params))
        self.total_enstrophy.append(enstrophies(w, self.params)[1])
        self.ang_mom.append(physical_angular_momentum(w, self.params))
        self.q1.append(q1_form(dw))
        self.q2.append(q2_form(dw))
        self.tilt.append(tilt_deviation(dw))

    @property
    def q1_plus_q2(self) -> np.ndarray:
        return np.asarray(self.q1) + np.asarray(self.q2)

    def rows(self):
        qq = self.q1_plus_q2
        for i, t in enumerate(self.times):
            yield (t, self.H[i], self.total_enstrophy[i], self.ang_mom[i], self.q1[i], self.q2[i], qq[i])

    def header(self) -> dict:
        return {
            "params": {"omega": self.params.omega, "q_rel": self.params.q_rel},
            "truncation": self.L,
            "dt": self.dt,
            "filter": self.spectral_filter,
            "samples": len(self.times),
            "blew_up": self.blew_up,
        }

    def relative_drift(self, name: str) -> float:
        v = np.asarray(getattr(self, name))
        scale = abs(v[0]) if v[0] != 0 else 1.0
        return float(np.max(np.abs(v - v[0])) / scale)


def integrate(
    w0: SpectralField,
    p: ModelParams,
    dt: float = 1e-3,
    t_end: float = 10.0,
    sample_every: int = 100,
    base: SpectralField | None = None,
    spectral_filter: bool = False,
    keep_states: bool = False,
) -> TrajectoryLog:
    """Integrate from ``w0`` with RK4, sampling monitors every ``sample_every`` steps.

    Stops early with ``blew_up`` set if the state becomes non-finite.
    """
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidArgument(f"dt must be positive and finite, got {dt}")
    if not (math.isfinite(t_end) and t_end >= 0):
        raise InvalidArgument(f"t_end must be finite and >= 0, got {t_end}")
    if sample_every < 1:
        raise InvalidArgument("sample_every must be >= 1")
    tables = build_basis(w0.L)
    if base is None:
        base = SpectralField.zeros(w0.L)
    limit = cfl_limit(w0, tables)
    if dt > limit:
        log.warning("dt=%g exceeds the advisory CFL bound %g", dt, limit)
    if spectral_filter:
        log.warning("spectral filter enabled: conservation monitors are not invariants")
        damp = _filter_factors(w0.L)

    n_steps = int(round(t_end / dt))
    out = TrajectoryLog(p, w0.L, dt, spectral_filter)
    c = w0.coeffs.copy()
    out.record(0.0, w0, base, keep_states)
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            c = rk4_step(c, dt, p.omega, tables)
            if spectral_filter:
                c = c * damp
            if not np.all(np.isfinite(c)):
                out.blew_up = True
                log.error("non-finite state at step %d (t=%g)", step, step * dt)
                break
            if step % sample_every == 0 or step == n_steps:
                out.record(step * dt, SpectralField(w0.L, c.copy()), base, keep_states)
    return out


# -- stability probes ----------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PerturbationSpec:
    """Base state ('wmax', 'wmin' or a SpectralField) plus (l, m, amplitude) modes.

    With a seed, each m != 0 amplitude is spread over the cos/sin pair with
    a random longitude phase.
    """

    base: str | SpectralField
    modes: tuple[tuple[int, int, float], ...]
    seed: int | None = None

    def perturbation(self, L: int) -> SpectralField:
        rng = np.random.default_rng(self.seed) if self.seed is not None else None
        c = np.zeros_like(SpectralField.zeros(L).coeffs)
        for l, m, a in self.modes:
            if l < 1:
                raise InvalidArgument("perturbation modes need l >= 1")
            if rng is not None and m != 0:
                phi = rng.uniform(0.0, 2.0 * math.pi)
                c[index(l, abs(m))] += a * math.cos(phi)
                c[index(l, -abs(m))] += a * math.sin(phi)
            else:
                c[index(l, m)] += a
        return SpectralField(L, c)

    def base_state(self, p: ModelParams, L: int) -> SpectralField:
        sq = math.sqrt(p.q_rel)
        if isinstance(self.base, SpectralField):
            w = self.base.resized(L)
            if check_extremal(w, p) is None:
                raise InvalidArgument("custom base is not one of the analytic extremals")
            return w
        if self.base == "wmax":
            return SpectralField.basis(L, 1, 0, sq)
        if self.base == "wmin":
            return SpectralField.basis(L, 1, 0, -sq)
        raise InvalidArgument(f"unknown base {self.base!r}")


def mixed_modes(L: int, norm: float, seed: int, l_min: int = 1, l_max: int | None = None):
    """Random (l, m, amplitude) list with l in [l_min, l_max] and total norm ``norm``."""
    l_max = L if l_max is None else l_max
    rng = np.random.default_rng(seed)
    ls, ms = degree_arrays(L)
    pick = (ls >= l_min) & (ls <= l_max)
    amp = rng.standard_normal(int(pick.sum()))
    amp *= norm / np.linalg.norm(amp)
    return tuple((int(l), int(m), float(a)) for l, m, a in zip(ls[pick], ms[pick], amp))


@dataclasses.dataclass
class ProbeResult:
    log: TrajectoryLog
    verdict: str
    sup_ratio: float
    tilt_growth: float
    total_growth: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "sup_ratio": self.sup_ratio,
            "tilt_growth": self.tilt_growth,
            "total_growth": self.total_growth,
        }


def stability_probe(
    spec: PerturbationSpec,
    p: ModelParams,
    dt: float = 5e-3,
    t_end: float = 20.0,
    L: int = 21,
    sample_every: int = 10,
) -> ProbeResult:
    """Evolve a perturbed extremal and track the energy-enstrophy norm of the deviation."""
    base = spec.base_state(p, L)
    dw = spec.perturbation(L)
    if dw.norm2() == 0:
        raise InvalidArgument("perturbation is zero")
    traj = integrate(base + dw, p, dt, t_end, sample_every, base=base)
    qq = traj.q1_plus_q2
    sup_ratio = float(qq.max() / qq[0])
    d0 = math.sqrt(traj.q2[0])
    total_growth = float(np.sqrt(np.max(traj.q2)) / d0)
    tilt_growth = float(np.max(traj.tilt) / d0)
    if traj.blew_up or tilt_growth >= GROWTH_FACTOR or total_growth >= GROWTH_FACTOR:
        verdict = UNSTABLE
    elif sup_ratio <= 1.0 + STABILITY_DELTA:
        verdict = STABLE
    else:
        verdict = INCONCLUSIVE
    return ProbeResult(traj, verdict, sup_ratio, tilt_growth, total_growth)
