"""Real spherical harmonics on the unit sphere.

Coefficients are stored in a flat vector ordered by (l, m) with
1 <= l <= L and -l <= m <= l; ``index(l, m) = l*l + l + m - 1``. The
l = 0 mode is structurally absent, so every field has zero mean.

Basis functions are orthonormal under the surface measure of the unit
sphere::

    Y_l0  = P_l^0(mu)
    Y_lm  = sqrt(2) P_l^m(mu) cos(m lon)     m > 0
    Y_l-m = sqrt(2) P_l^m(mu) sin(m lon)     m > 0

with ``P_l^m`` the associated Legendre functions normalised so that
``2 pi * int P_l^m(mu)^2 dmu = 1`` (no Condon-Shortley phase). In
particular ``Y_10 = sqrt(3 / 4 pi) cos(theta)``.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np

from .errors import CirculationError, InvalidArgument

__all__ = [
    "BasisTables",
    "SpectralField",
    "analyze",
    "apply_green",
    "apply_laplacian",
    "build_basis",
    "degree_arrays",
    "index",
    "inner_product",
    "n_coeffs",
    "synthesize",
]

# absolute tolerance on the l = 0 projection accepted by ``analyze``
MEAN_TOL = 1e-10


def n_coeffs(L: int) -> int:
    return (L + 1) ** 2 - 1


def index(l: int, m: int) -> int:
    if l < 1 or abs(m) > l:
        raise InvalidArgument(f"no real harmonic with l={l}, m={m}")
    return l * l + l + m - 1


@functools.lru_cache(maxsize=None)
def degree_arrays(L: int) -> tuple[np.ndarray, np.ndarray]:
    """Return read-only arrays (l, m) aligned with the flat coefficient layout."""
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(1, L + 1)])
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(1, L + 1)])
    ls.flags.writeable = False
    ms.flags.writeable = False
    return ls, ms


@functools.lru_cache(maxsize=None)
def eigen_ll1(L: int) -> np.ndarray:
    """l(l+1) for every flat coefficient slot."""
    ls, _ = degree_arrays(L)
    out = (ls * (ls + 1)).astype(float)
    out.flags.writeable = False
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralField:
    """Triangularly truncated real spherical-harmonic expansion."""

    L: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.L < 1:
            raise InvalidArgument(f"truncation must be >= 1, got {self.L}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (n_coeffs(self.L),):
            raise InvalidArgument(
                f"expected {n_coeffs(self.L)} coefficients for L={self.L}, "
                f"got shape {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, L: int) -> SpectralField:
        return cls(L, np.zeros(n_coeffs(L)))

    @classmethod
    def basis(cls, L: int, l: int, m: int, amplitude: float = 1.0) -> SpectralField:
        c = np.zeros(n_coeffs(L))
        c[index(l, m)] = amplitude
        return cls(L, c)

    @classmethod
    def from_modes(cls, L: int, modes) -> SpectralField:
        """Build a field from an iterable of (l, m, amplitude)."""
        c = np.zeros(n_coeffs(L))
        for l, m, a in modes:
            c[index(l, m)] += a
        return cls(L, c)

    def get(self, l: int, m: int) -> float:
        return float(self.coeffs[index(l, m)])

    def norm2(self) -> float:
        """Squared L2 norm, i.e. the sum of squared coefficients."""
        return float(self.coeffs @ self.coeffs)

    def resized(self, L: int) -> SpectralField:
        """Zero-pad or truncate to truncation ``L``."""
        n = min(n_coeffs(L), n_coeffs(self.L))
        c = np.zeros(n_coeffs(L))
        c[:n] = self.coeffs[:n]
        return SpectralField(L, c)

    def _other(self, other) -> np.ndarray:
        if not isinstance(other, SpectralField) or other.L != self.L:
            raise InvalidArgument("fields must share the same truncation")
        return other.coeffs

    def __add__(self, other):
        return SpectralField(self.L, self.coeffs + self._other(other))

    def __sub__(self, other):
        return SpectralField(self.L, self.coeffs - self._other(other))

    def __mul__(self, scalar):
        return SpectralField(self.L, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.L, -self.coeffs)

    def __repr__(self):
        return f"SpectralField(L={self.L}, norm2={self.norm2():.6g})"


def _legendre(L: int, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalised P_l^m(mu) and (1 - mu^2) dP_l^m/dmu, both indexed [m, node, l]."""
    nlat = mu.size
    sin_t = np.sqrt(1.0 - mu * mu)
    p = np.zeros((L + 1, nlat, L + 1))
    pmm = np.full(nlat, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2 * m + 1) / (2 * m)) * sin_t
        p[m, :, m] = pmm
        if m + 1 <= L:
            p[m, :, m + 1] = math.sqrt(2 * m + 3) * mu * pmm
        for l in range(m + 2, L + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            p[m, :, l] = a * (mu * p[m, :, l - 1] - b * p[m, :, l - 2])

    h = np.zeros_like(p)
    for m in range(L + 1):
        for l in range(max(m, 1), L + 1):
            h[m, :, l] = -l * mu * p[m, :, l]
            if l > m:
                f = math.sqrt((2 * l + 1) / (2 * l - 1) * (l * l - m * m))
                h[m, :, l] += f * p[m, :, l - 1]
    return p, h


@dataclasses.dataclass(frozen=True, eq=False)
class BasisTables:
    """Quadrature grid and Legendre tables for one truncation.

    Attributes:
      L: triangular truncation.
      gauss_nodes: mu = cos(theta) at the Gauss-Legendre nodes (ascending).
      gauss_weights: matching weights, summing to 2.
      n_lon: number of equispaced longitudes in [0, 2 pi).
      plm: normalised P_l^m(mu_j) indexed [m, j, l], zero for l < m.
      hlm: (1 - mu_j^2) dP_l^m/dmu indexed like ``plm``.
    """

    L: int
    gauss_nodes: np.ndarray
    gauss_weights: np.ndarray
    n_lon: int
    plm: np.ndarray
    hlm: np.ndarray
    lons: np.ndarray
    # flat-layout gather indices, n_coeffs(L) marks an empty slot
    _cos_idx: np.ndarray = dataclasses.field(repr=False)
    _sin_idx: np.ndarray = dataclasses.field(repr=False)
    _trig: np.ndarray = dataclasses.field(repr=False)
    _dtrig: np.ndarray = dataclasses.field(repr=False)
    _plm_w: np.ndarray = dataclasses.field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gauss_nodes.size, self.n_lon)

    @property
    def n_lat(self) -> int:
        return self.gauss_nodes.size

    def mu_grid(self) -> np.ndarray:
        return np.broadcast_to(self.gauss_nodes[:, None], self.shape).copy()

    def lon_grid(self) -> np.ndarray:
        return np.broadcast_to(self.lons[None, :], self.shape).copy()


@functools.lru_cache(maxsize=16)
def build_basis(L: int) -> BasisTables:
    """Build quadrature and Legendre tables for truncation ``L``.

    The grid has ceil((3L+1)/2) Gauss nodes and an even number >= 3L+2 of
    longitudes, so products of two degree-L fields project exactly.
    """
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise InvalidArgument(f"truncation must be an integer >= 1, got {L!r}")
    L = int(L)
    n_lat = -(-(3 * L + 1) // 2)
    n_lon = 3 * L + 2
    n_lon += n_lon % 2
    mu, wts = np.polynomial.legendre.leggauss(n_lat)
    p, h = _legendre(L, mu)
    lons = 2.0 * np.pi * np.arange(n_lon) / n_lon

    n = n_coeffs(L)
    cos_idx = np.full((L + 1, L + 1), n)
    sin_idx = np.full((L + 1, L + 1), n)
    for m in range(L + 1):
        for l in range(max(m, 1), L + 1):
            cos_idx[m, l] = index(l, m)
            if m > 0:
                sin_idx[m, l] = index(l, -m)

    ms = np.arange(L + 1)[:, None]
    scale = np.where(ms == 0, 1.0, math.sqrt(2.0))
    cos_m = scale * np.cos(ms * lons[None, :])
    sin_m = scale * np.sin(ms * lons[None, :])
    sin_m[0] = 0.0
    trig = np.concatenate([cos_m, sin_m])  # (2(L+1), n_lon)
    dtrig = np.concatenate([-ms * sin_m, ms * cos_m])
    plm_w = np.ascontiguousarray((p * wts[None, :, None]).transpose(0, 2, 1))

    arrays = [mu, wts, p, h, lons, cos_idx, sin_idx, trig, dtrig, plm_w]
    for a in arrays:
        a.flags.writeable = False
    return BasisTables(
        L=L,
        gauss_nodes=mu,
        gauss_weights=wts,
        n_lon=n_lon,
        plm=p,
        hlm=h,
        lons=lons,
        _cos_idx=cos_idx,
        _sin_idx=sin_idx,
        _trig=trig,
        _dtrig=dtrig,
        _plm_w=plm_w,
    )


# -- array-level transforms (batched over leading axes) ---------------------


def _split(c: np.ndarray, tables: BasisTables) -> tuple[np.ndarray, np.ndarray]:
    pad = np.zeros(c.shape[:-1] + (1,))
    ce = np.concatenate([c, pad], axis=-1)
    return ce[..., tables._cos_idx], ce[..., tables._sin_idx]


def synth_array(c: np.ndarray, tables: BasisTables, deriv: str | None = None) -> np.ndarray:
    """Grid values of coefficient arrays ``c`` with shape (..., n_coeffs).

    ``deriv`` selects the quantity: None for the field, ``"lon"`` for the
    longitude derivative, ``"mu"`` for (1 - mu^2) times the mu derivative.
    """
    C, S = _split(c, tables)
    leg = tables.hlm if deriv == "mu" else tables.plm
    trig = tables._dtrig if deriv == "lon" else tables._trig
    # (M, nlat, Lp) @ (..., M, Lp, 1) -> (..., M, nlat)
    fc = (leg @ C[..., None])[..., 0]
    fs = (leg @ S[..., None])[..., 0]
    f = np.concatenate([fc, fs], axis=-2)  # (..., 2M, nlat)
    return np.swapaxes(f, -1, -2) @ trig


def analyze_array(g: np.ndarray, tables: BasisTables) -> np.ndarray:
    """Quadrature projection of grid arrays (..., nlat, nlon) onto l >= 1."""
    M = tables.L + 1
    four = g @ tables._trig.T * (2.0 * np.pi / tables.n_lon)  # (..., nlat, 2M)
    four = np.swapaxes(four, -1, -2)
    C = (tables._plm_w @ four[..., :M, :, None])[..., 0]  # (..., M, Lp)
    S = (tables._plm_w @ four[..., M:, :, None])[..., 0]
    n = n_coeffs(tables.L)
    out = np.zeros(g.shape[:-2] + (n + 1,))
    out[..., tables._cos_idx] = C
    out[..., tables._sin_idx] = S
    return out[..., :n]


def _mean_projection(g: np.ndarray, tables: BasisTables) -> float:
    # <g, Y_00> with Y_00 = 1/sqrt(4 pi)
    integral = tables.gauss_weights @ g.sum(axis=-1) * (2.0 * np.pi / tables.n_lon)
    return float(integral / math.sqrt(4.0 * math.pi))


# -- public operations -------------------------------------------------------


def _check_grid(f: np.ndarray, tables: BasisTables) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != tables.shape:
        raise InvalidArgument(f"grid shape {f.shape} does not match tables {tables.shape}")
    if not np.all(np.isfinite(f)):
        raise InvalidArgument("grid field has non-finite entries")
    return f


def analyze(f: np.ndarray, tables: BasisTables) -> SpectralField:
    """Project a zero-mean grid field onto the harmonics with 1 <= l <= L."""
    f = _check_grid(f, tables)
    mean = _mean_projection(f, tables)
    if abs(mean) > MEAN_TOL:
        raise CirculationError(f"field has l=0 projection {mean:.3e}; circulation must vanish")
    return SpectralField(tables.L, analyze_array(f, tables))


def synthesize(w: SpectralField, tables: BasisTables) -> np.ndarray:
    """Evaluate ``w`` on the tables' grid."""
    if w.L > tables.L:
        raise InvalidArgument(f"field truncation {w.L} exceeds tables truncation {tables.L}")
    return synth_array(w.resized(tables.L).coeffs, tables)


def apply_laplacian(w: SpectralField) -> SpectralField:
    return SpectralField(w.L, -eigen_ll1(w.L) * w.coeffs)


def apply_green(w: SpectralField) -> SpectralField:
    """Stream function of vorticity ``w``: inverse of the Laplacian on l >= 1."""
    return SpectralField(w.L, -w.coeffs / eigen_ll1(w.L))


def inner_product(f: np.ndarray, g: np.ndarray, tables: BasisTables) -> float:
    f = _check_grid(f, tables)
    g = _check_grid(g, tables)
    return float(tables.gauss_weights @ (f * g).sum(axis=1) * (2.0 * np.pi / tables.n_lon))
