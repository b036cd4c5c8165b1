"""Closed-form constrained extremals of the pseudo-energy.

Stationary points of ``H + lambda_rel * ||w||^2`` satisfy, mode by mode,

    (-1/(l(l+1)) - 2 lambda_rel) a_lm = 1/2 Omega C delta_{lm,10}

so solid-body states ``k Y_10`` are the generic solutions and the higher
modes of degree l enter only at ``lambda_rel = -1/(2 l(l+1))``.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import InvalidArgument
from .functionals import C_CONST, I10, ModelParams
from .spharm import SpectralField, eigen_ll1, index

PRO = "ProRotating"
COUNTER = "CounterRotating"
BIFURCATION = "Bifurcation"

GLOBAL_MAX = "GlobalMax"
CONSTRAINED_MIN = "ConstrainedMin"
SADDLE = "Saddle"
SPECIAL_SADDLE = "SpecialSaddle"
DEGENERATE = "DegenerateBoundary"

# relative tolerance for recognising a multiplier as a bifurcation value
_BIF_RTOL = 1e-12
# relative tolerance for recognising an enstrophy threshold
_THRESH_RTOL = 1e-14


@dataclasses.dataclass(frozen=True)
class ELSolution:
    """Solution set of the Euler-Lagrange equation for one multiplier.

    ``kind`` is ``"unique"``, ``"family"`` (particular solution plus the
    degree-``kernel_degree`` harmonics) or ``"none"`` (pole).
    """

    kind: str
    lambda_rel: float
    omega: float
    coefficient: float | None
    kernel_degree: int | None = None

    @property
    def kernel_dim(self) -> int:
        return 0 if self.kernel_degree is None else 2 * self.kernel_degree + 1

    def particular(self, L: int) -> SpectralField:
        if self.kind == "none":
            raise InvalidArgument("no solution at the pole lambda_rel = -1/4")
        return SpectralField.basis(L, 1, 0, self.coefficient)

    def kernel_basis(self, L: int) -> list[SpectralField]:
        if self.kernel_degree is None or self.kernel_degree > L:
            return []
        l = self.kernel_degree
        return [SpectralField.basis(L, l, m) for m in range(-l, l + 1)]

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["kernel_dim"] = self.kernel_dim
        return d


@dataclasses.dataclass(frozen=True)
class RegimeClass:
    kind: str
    l_crit: int | None
    thresholds: tuple[float, float]
    omega_o: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "l_crit": self.l_crit,
            "thresholds": list(self.thresholds),
            "omega_o": self.omega_o,
        }


@dataclasses.dataclass(frozen=True)
class ExtremalReport:
    branch: str
    lambda_rel: float
    state: SpectralField
    energy_original: float
    energy_shifted: float
    regime: RegimeClass

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "lambda_rel": self.lambda_rel,
            "alpha_10": self.state.get(1, 0),
            "truncation": self.state.L,
            "energy_original": self.energy_original,
            "energy_shifted": self.energy_shifted,
            "regime": self.regime.to_dict(),
        }


def _bifurcation_degree(lambda_rel: float) -> int | None:
    if not -0.25 <= lambda_rel < 0:
        return None
    # l(l+1) = -1/(2 lambda)
    target = -0.5 / lambda_rel
    if not target < 1e30:
        return None
    l = int(round((-1.0 + math.sqrt(1.0 + 4.0 * target)) / 2.0))
    if l >= 1 and math.isclose(lambda_rel, -0.5 / (l * (l + 1)), rel_tol=_BIF_RTOL):
        return l
    return None


def solve_euler_lagrange(lambda_rel: float, p: ModelParams | float) -> ELSolution:
    """Solve the Euler-Lagrange equation for a given multiplier.

    ``p`` may be a ModelParams or a bare spin rate.
    """
    omega = p.omega if isinstance(p, ModelParams) else float(p)
    if math.isnan(lambda_rel) or math.isnan(omega):
        raise InvalidArgument("NaN input")
    if omega < 0:
        raise InvalidArgument(f"omega must be >= 0, got {omega}")
    omega_c = omega * (p.c_const if isinstance(p, ModelParams) else C_CONST)

    l_bif = _bifurcation_degree(lambda_rel)
    if l_bif == 1:
        if omega > 0:
            return ELSolution("none", lambda_rel, omega, None)
        # Omega = 0: homogeneous equation, the whole l = 1 shell solves it
        return ELSolution("family", lambda_rel, omega, 0.0, kernel_degree=1)
    if l_bif is not None:
        k = -omega_c / (2.0 * (0.5 - 1.0 / (l_bif * (l_bif + 1))))
        return ELSolution("family", lambda_rel, omega, k, kernel_degree=l_bif)
    k = -omega_c / (2.0 * (0.5 + 2.0 * lambda_rel))
    return ELSolution("unique", lambda_rel, omega, k)


def el_residual(w: SpectralField, lambda_rel: float, p: ModelParams) -> float:
    """Coefficient-space norm of [G - 2 lambda] w - 1/2 Omega C Y_10."""
    r = (-1.0 / eigen_ll1(w.L) - 2.0 * lambda_rel) * w.coeffs
    r[I10] -= 0.5 * p.omega_c
    return float(np.linalg.norm(r))


def multipliers(p: ModelParams) -> tuple[float, float]:
    """Multipliers (lambda_plus, lambda_minus) of the two solid-body branches."""
    if not p.q_rel > 0:
        raise InvalidArgument("q_rel must be > 0")
    r = p.omega_c / math.sqrt(p.q_rel)
    return -0.25 * (1.0 + r), -0.25 * (1.0 - r)


def _l_crit(r: float) -> int:
    bound = 2.0 / (1.0 - r)
    l = 1
    while (l + 1) * (l + 2) < bound:
        l += 1
    return l


def classify_regime(p: ModelParams) -> RegimeClass:
    """Stability character of the counter-rotating extremal."""
    t1 = p.omega_c**2
    t2 = 4.0 * t1
    omega_o = math.sqrt(p.q_rel) / p.c_const
    q = p.q_rel

    def near(a, b):
        return math.isclose(a, b, rel_tol=_THRESH_RTOL, abs_tol=0.0)

    if p.omega == 0 or near(q, t1) or near(q, t2):
        return RegimeClass(DEGENERATE, None, (t1, t2), omega_o)
    if q < t1:
        return RegimeClass(CONSTRAINED_MIN, None, (t1, t2), omega_o)
    if q < t2:
        r = p.omega_c / math.sqrt(q)
        return RegimeClass(SADDLE, _l_crit(r), (t1, t2), omega_o)
    return RegimeClass(SPECIAL_SADDLE, None, (t1, t2), omega_o)


def branch_energy_formula(p: ModelParams, lambda_rel: float) -> float:
    """Energy of a solid-body extremal written through its multiplier."""
    d = 0.5 + 2.0 * lambda_rel
    return -(p.omega_c**2) * (1.0 + 8.0 * lambda_rel) / (16.0 * d * d)


def extremal_states(p: ModelParams, L: int = 21) -> tuple[ExtremalReport, ExtremalReport]:
    """Reports for the pro-rotating maximiser and the counter-rotating extremal."""
    lam_plus, lam_minus = multipliers(p)
    sq = math.sqrt(p.q_rel)
    regime = classify_regime(p)
    t = regime.thresholds
    w_max = SpectralField.basis(L, 1, 0, sq)
    w_min = SpectralField.basis(L, 1, 0, -sq)
    h_max = 0.25 * p.q_rel + 0.5 * p.omega_c * sq
    h_min = 0.25 * p.q_rel - 0.5 * p.omega_c * sq
    max_report = ExtremalReport(
        PRO, lam_plus, w_max, h_max, h_max - p.h0, RegimeClass(GLOBAL_MAX, None, t, regime.omega_o)
    )
    min_report = ExtremalReport(COUNTER, lam_minus, w_min, h_min, h_min - p.h0, regime)
    return max_report, min_report


# -- tabulated curves --------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Curve:
    """Rows (x, y, branch) with axis descriptions for the CSV header."""

    name: str
    x_label: str
    y_label: str
    rows: list[tuple[float, float, str]]
    notes: tuple[str, ...] = ()

    def branch(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        xs = np.array([r[0] for r in self.rows if r[2] == name])
        ys = np.array([r[1] for r in self.rows if r[2] == name])
        return xs, ys


def fig1_curve(omega: float, k_min: float, k_max: float, n: int = 201) -> Curve:
    """Shifted energy of solid-body states k Y_10 against k."""
    c = C_CONST
    ks = np.linspace(k_min, k_max, n)
    rows = [(float(k), 0.25 * (float(k) + omega * c) ** 2, "solid_body") for k in ks]
    return Curve(
        "fig1",
        "k = alpha_10 [1/time]",
        "H shifted energy [1/time^2]",
        rows,
        (f"omega = {omega!r}", "vertex at k = -omega*C"),
    )


def fig2_curve(omega: float, h_max: float, n: int = 201) -> Curve:
    """Relative enstrophy of extremals against shifted energy.

    Branch ``plus`` is Q = (omega C + sqrt(4H))^2, branch ``minus`` is
    Q = (-omega C + sqrt(4H))^2. Points below the lower curve at fixed H
    cannot be reached by any zero-circulation state.
    """
    c = C_CONST
    oc = omega * c
    hs = np.linspace(0.0, h_max, n)
    rows = []
    for h in hs:
        s = math.sqrt(4.0 * h)
        rows.append((float(h), (oc + s) ** 2, "plus"))
    for h in hs:
        s = math.sqrt(4.0 * h)
        rows.append((float(h), (-oc + s) ** 2, "minus"))
    return Curve(
        "fig2",
        "H shifted energy [1/time^2]",
        "Q_rel relative enstrophy [1/time^2]",
        rows,
        (f"omega = {omega!r}", "plus: Q = (2 sqrt(H) + omega C)^2", "minus: Q = (2 sqrt(H) - omega C)^2"),
    )


def fig3_curve(omega: float, q_max: float, n: int = 200) -> Curve:
    """Multipliers of both branches against sqrt(Q_rel) on (0, sqrt(q_max)]."""
    c = C_CONST
    top = math.sqrt(q_max)
    xs = top * np.arange(1, n + 1) / n
    rows = []
    for name, sign in (("lambda_plus", 1.0), ("lambda_minus", -1.0)):
        for x in xs:
            rows.append((float(x), -0.25 * (1.0 + sign * omega * c / float(x)), name))
    return Curve(
        "fig3",
        "sqrt(Q_rel) [1/time]",
        "lambda_rel [dimensionless]",
        rows,
        (f"omega = {omega!r}",),
    )


def fig4_curve(
    omega: float, lambda_min: float, lambda_max: float, n: int = 400, gap: float = 1e-3
) -> Curve:
    """Extremal coordinate k against the multiplier, split at the pole -1/4."""
    c = C_CONST
    lams = np.linspace(lambda_min, lambda_max, n)
    rows = []
    for lam in lams:
        lam = float(lam)
        if abs(lam + 0.25) < gap:
            continue
        k = -omega * c / (2.0 * (0.5 + 2.0 * lam))
        rows.append((lam, k, "pro" if lam < -0.25 else "counter"))
    return Curve(
        "fig4",
        "lambda_rel [dimensionless]",
        "k = alpha_10 [1/time]",
        rows,
        (f"omega = {omega!r}", "vertical asymptote at lambda_rel = -1/4"),
    )


def figure_curves(fig: int, omega: float, **sweep) -> Curve:
    """Dispatch to the tabulation for figure ``fig`` (1 to 4)."""
    makers = {1: fig1_curve, 2: fig2_curve, 3: fig3_curve, 4: fig4_curve}
    if fig not in makers:
        raise InvalidArgument(f"unknown figure {fig}")
    for k, v in sweep.items():
        if isinstance(v, float) and not math.isfinite(v):
            raise InvalidArgument(f"sweep bound {k} must be finite")
    return makers[fig](omega, **sweep)


def check_extremal(w: SpectralField, p: ModelParams) -> str | None:
    """Name of the analytic branch ``w`` coincides with, or None."""
    sq = math.sqrt(p.q_rel)
    target = np.zeros_like(w.coeffs)
    for name, sign in ((PRO, 1.0), (COUNTER, -1.0)):
        target[:] = 0.0
        target[index(1, 0)] = sign * sq
        if np.linalg.norm(w.coeffs - target) <= 1e-10 * max(1.0, sq):
            return name
    return None
