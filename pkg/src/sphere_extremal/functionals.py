"""Scalar functionals of the relative vorticity in spectral space.

With ``w = sum a_lm Y_lm`` on the unit sphere and C = ||cos(theta)||_2:

  kinetic energy      E = 1/2 sum a_lm^2 / (l(l+1))
  angular momentum    Lambda = a_10 C / 2     (<w, cos theta> = a_10 C)
  pseudo-energy       H = E + Omega Lambda
  shifted energy      H - H0,  H0 = -Omega^2 C^2 / 4
  relative enstrophy  sum a_lm^2
  total enstrophy     ||w + 2 Omega cos(theta)||^2
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import ConstraintViolation, InvalidArgument
from .spharm import SpectralField, eigen_ll1, index

# ||cos(theta)||_2 on the unit sphere
C_CONST = math.sqrt(4.0 * math.pi / 3.0)

I10 = index(1, 0)


@dataclasses.dataclass(frozen=True)
class ModelParams:
    omega: float
    q_rel: float
    c_const: float = C_CONST

    def __post_init__(self):
        for name in ("omega", "q_rel", "c_const"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidArgument(f"{name} must be finite, got {v}")
        if self.omega < 0:
            raise InvalidArgument(f"omega must be >= 0, got {self.omega}")
        if self.q_rel <= 0:
            raise InvalidArgument(f"q_rel must be > 0, got {self.q_rel}")

    @property
    def omega_c(self) -> float:
        return self.omega * self.c_const

    @property
    def h0(self) -> float:
        """Constant separating the pseudo-energy from its shifted form."""
        return -0.25 * self.omega_c**2


@dataclasses.dataclass(frozen=True)
class FunctionalReport:
    energy_E: float
    angular_momentum_Lambda: float
    pseudo_energy_H: float
    shifted_H: float
    rel_enstrophy: float
    total_enstrophy: float
    circulation: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class MomentumBound:
    moment: float
    bound: float
    gap: float
    tight: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def kinetic_energy(w: SpectralField) -> float:
    c = w.coeffs
    return 0.5 * float(c @ (c / eigen_ll1(w.L)))


def angular_momentum(w: SpectralField, p: ModelParams) -> float:
    return 0.5 * float(w.coeffs[I10]) * p.c_const


def physical_angular_momentum(w: SpectralField, p: ModelParams) -> float:
    """<w, cos(theta)> at unit density."""
    return float(w.coeffs[I10] * p.c_const)


def pseudo_energy(w: SpectralField, p: ModelParams) -> float:
    return kinetic_energy(w) + p.omega * angular_momentum(w, p)


def shifted_energy(w: SpectralField, p: ModelParams) -> float:
    """Positive-definite form obtained by completing the square in a_10."""
    c = w.coeffs
    a10 = float(c[I10])
    rest = 0.5 * float(c @ (c / eigen_ll1(w.L))) - 0.25 * a10 * a10
    return 0.25 * (a10 + p.omega_c) ** 2 + rest


def enstrophies(w: SpectralField, p: ModelParams) -> tuple[float, float]:
    """Relative and total enstrophy."""
    rel = w.norm2()
    total = rel + 4.0 * p.omega * physical_angular_momentum(w, p) + 4.0 * p.omega_c**2
    return rel, total


def functional_report(w: SpectralField, p: ModelParams) -> FunctionalReport:
    rel, total = enstrophies(w, p)
    return FunctionalReport(
        energy_E=kinetic_energy(w),
        angular_momentum_Lambda=angular_momentum(w, p),
        pseudo_energy_H=pseudo_energy(w, p),
        shifted_H=shifted_energy(w, p),
        rel_enstrophy=rel,
        total_enstrophy=total,
        # l = 0 is absent from the representation
        circulation=0.0,
    )


def check_momentum_bound(w: SpectralField, p: ModelParams, tol: float = 1e-8) -> MomentumBound:
    """Compare |<w, cos theta>| with C sqrt(Q_rel) for a state on the enstrophy sphere."""
    rel = w.norm2()
    if abs(rel - p.q_rel) > tol * max(1.0, p.q_rel):
        raise ConstraintViolation(f"relative enstrophy {rel!r} differs from q_rel={p.q_rel!r}")
    moment = abs(physical_angular_momentum(w, p))
    bound = p.c_const * math.sqrt(p.q_rel)
    if moment > bound * (1.0 + 1e-12) + 1e-12:
        raise ConstraintViolation(f"moment {moment!r} exceeds bound {bound!r}")
    gap = max(bound - moment, 0.0)
    return MomentumBound(moment=moment, bound=bound, gap=gap, tight=gap <= 1e-10 * max(1.0, bound))


def energy_gradient(c: np.ndarray, p: ModelParams, L: int) -> np.ndarray:
    """Gradient of the pseudo-energy with respect to the flat coefficients."""
    g = c / eigen_ll1(L)
    g[I10] += 0.5 * p.omega_c
    return g
