"""Numerical extremisation of the pseudo-energy on the enstrophy sphere.

Independent check of the closed-form extremals: a projected-gradient
iteration with radial retraction, and tangent-space curvatures of
``H + lambda* ||w||^2`` at stationary points (closed form and finite
differences).
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from .errors import InvalidArgument, PreconditionError
from .extremal import ExtremalReport
from .functionals import I10, ModelParams, energy_gradient, pseudo_energy
from .spharm import SpectralField, degree_arrays, eigen_ll1, n_coeffs

log = logging.getLogger(__name__)

ZERO_CURVATURE = 1e-10


@dataclasses.dataclass(frozen=True)
class OracleResult:
    converged: bool
    iterations: int
    final_state: SpectralField
    final_energy: float
    gradient_norm: float
    distance_to_analytic: float
    params: ModelParams
    direction: str
    trace: list[tuple[int, float, float]] = dataclasses.field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_energy": self.final_energy,
            "gradient_norm": self.gradient_norm,
            "distance_to_analytic": self.distance_to_analytic,
            "alpha_10": self.final_state.get(1, 0),
            "direction": self.direction,
            "truncation": self.final_state.L,
        }


@dataclasses.dataclass(frozen=True)
class HessianSpectrum:
    base_state: SpectralField
    lambda_star: float
    curvatures: list[tuple[int, int, float]]

    def _count(self, pred) -> int:
        return sum(1 for _, _, c in self.curvatures if pred(c))

    @property
    def positive_count(self) -> int:
        return self._count(lambda c: c >= ZERO_CURVATURE)

    @property
    def negative_count(self) -> int:
        return self._count(lambda c: c <= -ZERO_CURVATURE)

    @property
    def zero_count(self) -> int:
        return self._count(lambda c: abs(c) < ZERO_CURVATURE)

    def to_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "positive_count": self.positive_count,
            "negative_count": self.negative_count,
            "zero_count": self.zero_count,
            "curvatures": [{"l": l, "m": m, "c": c} for l, m, c in self.curvatures],
        }


@dataclasses.dataclass(frozen=True)
class Verdict:
    ok: bool
    distance: float
    energy_difference: float
    reason: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def project_to_sphere(w: SpectralField, q_rel: float) -> SpectralField:
    """Radial projection onto ||w||^2 = q_rel."""
    n2 = w.norm2()
    if n2 == 0.0:
        raise InvalidArgument("cannot project the zero field onto the enstrophy sphere")
    if q_rel <= 0:
        raise InvalidArgument("q_rel must be > 0")
    return SpectralField(w.L, w.coeffs * math.sqrt(q_rel / n2))


def _project(c: np.ndarray, q_rel: float) -> np.ndarray:
    return c * math.sqrt(q_rel / (c @ c))


def tangent_gradient(c: np.ndarray, p: ModelParams, L: int) -> np.ndarray:
    g = energy_gradient(c, p, L)
    return g - (g @ c) / (c @ c) * c


def distance_to_analytic(w: SpectralField, q_rel: float) -> float:
    sq = math.sqrt(q_rel)
    base = w.norm2() - w.coeffs[I10] ** 2
    d_plus = (w.coeffs[I10] - sq) ** 2 + base
    d_minus = (w.coeffs[I10] + sq) ** 2 + base
    return math.sqrt(max(min(d_plus, d_minus), 0.0))


def random_state(L: int, q_rel: float, seed: int, sign: float | None = None) -> SpectralField:
    """Random point on the enstrophy sphere; ``sign`` forces the sign of a_10."""
    rng = np.random.default_rng(seed)
    ls, _ = degree_arrays(L)
    c = rng.standard_normal(n_coeffs(L)) / ls
    if sign is not None:
        c[I10] = math.copysign(abs(c[I10]), sign)
    return project_to_sphere(SpectralField(L, c), q_rel)


def _energy(c: np.ndarray, p: ModelParams, L: int) -> float:
    return 0.5 * float(c @ (c / eigen_ll1(L))) + 0.5 * p.omega_c * c[I10]


def extremize_on_sphere(
    p: ModelParams,
    direction: str,
    init: SpectralField,
    step: float = 1.0,
    tol: float = 1e-9,
    max_iter: int = 20000,
    record_trace: bool = False,
) -> OracleResult:
    """Projected-gradient ascent or descent of H on ||w||^2 = q_rel.

    Each iteration moves along the tangent gradient and retracts radially.
    A step that fails to improve the energy is halved (up to 30 times)
    before being taken anyway.
    """
    if direction not in ("ascend", "descend"):
        raise InvalidArgument(f"direction must be 'ascend' or 'descend', got {direction!r}")
    if not step > 0:
        raise InvalidArgument("step must be > 0")
    if not tol > 0:
        raise InvalidArgument("tol must be > 0")
    sgn = 1.0 if direction == "ascend" else -1.0
    L = init.L
    c = _project(init.coeffs.copy(), p.q_rel)
    h = _energy(c, p, L)
    trace = []
    it = 0
    g = tangent_gradient(c, p, L)
    gnorm = float(np.linalg.norm(g))
    while True:
        if record_trace:
            trace.append((it, h, gnorm))
        if gnorm < tol or it >= max_iter:
            break
        s = step
        for _ in range(30):
            trial = _project(c + sgn * s * g, p.q_rel)
            h_trial = _energy(trial, p, L)
            # roundoff allowance so that converged iterates are not rejected
            if sgn * (h_trial - h) >= -1e-14 * max(1.0, abs(h)):
                break
            s *= 0.5
        c, h = trial, h_trial
        it += 1
        g = tangent_gradient(c, p, L)
        gnorm = float(np.linalg.norm(g))
    state = SpectralField(L, c)
    converged = gnorm < tol and abs(state.norm2() - p.q_rel) < 1e-10 * max(1.0, p.q_rel)
    if not converged:
        log.info("oracle stopped after %d iterations, gradient norm %.3e", it, gnorm)
    return OracleResult(
        converged=converged,
        iterations=it,
        final_state=state,
        final_energy=pseudo_energy(state, p),
        gradient_norm=gnorm,
        distance_to_analytic=distance_to_analytic(state, p.q_rel),
        params=p,
        direction=direction,
        trace=trace,
    )


def stationary_multiplier(base: SpectralField, p: ModelParams) -> tuple[float, float]:
    """Multiplier from the first-order condition and the residual it leaves."""
    c = base.coeffs
    g = energy_gradient(c, p, base.L)
    lam = -float(g @ c) / (2.0 * float(c @ c))
    return lam, float(np.linalg.norm(g + 2.0 * lam * c))


def _tangent_directions(base: SpectralField):
    """Normalised tangent projections of the coordinate directions, skipping the radial one."""
    ls, ms = degree_arrays(base.L)
    c = base.coeffs
    u = c / math.sqrt(c @ c)
    for i in range(c.size):
        d = -u[i] * u
        d[i] += 1.0
        nd = float(np.linalg.norm(d))
        if nd < 1e-8:
            continue
        yield int(ls[i]), int(ms[i]), d / nd


def projected_hessian(base: SpectralField, p: ModelParams, residual_tol: float = 1e-8) -> HessianSpectrum:
    """Tangent curvatures of H + lambda* ||w||^2 at a stationary point."""
    lam, res = stationary_multiplier(base, p)
    if res > residual_tol:
        raise PreconditionError(f"base state is not stationary (residual {res:.3e})", residual=res)
    hdiag = 1.0 / eigen_ll1(base.L)
    curv = []
    for l, m, d in _tangent_directions(base):
        curv.append((l, m, float(d @ (hdiag * d)) + 2.0 * lam))
    return HessianSpectrum(base, lam, curv)


def fd_curvatures(base: SpectralField, p: ModelParams, h: float = 1e-4) -> HessianSpectrum:
    """Second differences of H along retracted tangent curves.

    At a stationary point these equal the tangent curvatures of the
    augmented functional; no multiplier is used in the computation.
    """
    lam, _ = stationary_multiplier(base, p)
    c = base.coeffs
    h0 = pseudo_energy(base, p)
    curv = []
    for l, m, d in _tangent_directions(base):
        hp = pseudo_energy(SpectralField(base.L, _project(c + h * d, p.q_rel)), p)
        hm = pseudo_energy(SpectralField(base.L, _project(c - h * d, p.q_rel)), p)
        curv.append((l, m, (hp - 2.0 * h0 + hm) / (h * h)))
    return HessianSpectrum(base, lam, curv)


def verify_against_analytic(
    oracle: OracleResult, report: ExtremalReport, params: ModelParams | None = None
) -> Verdict:
    """Compare an oracle run with an analytic extremal."""
    if params is not None and params != oracle.params:
        raise InvalidArgument("oracle and report were computed for different parameters")
    if abs(report.state.norm2() - oracle.params.q_rel) > 1e-10 * max(1.0, oracle.params.q_rel):
        raise InvalidArgument("report state does not lie on the oracle's enstrophy sphere")
    L = max(oracle.final_state.L, report.state.L)
    a = oracle.final_state.resized(L).coeffs
    b = report.state.resized(L).coeffs
    dist = float(np.linalg.norm(a - b))
    de = abs(oracle.final_energy - report.energy_original)
    if not oracle.converged:
        return Verdict(False, dist, de, "not converged")
    if dist >= 1e-5:
        return Verdict(False, dist, de, "state distance too large")
    if de >= 1e-6:
        return Verdict(False, dist, de, "energy mismatch")
    return Verdict(True, dist, de, "ok")
