import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Annotated, Any

import numpy as np
from numpy.polynomial import legendre
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from .errors import CollocationError
from .types import (
    DEFAULT_MAP_LENGTH,
    DEFAULT_N_R,
    FREE_LIMIT_RADIUS,
    FREE_LIMIT_TOKENS,
    MAX_COLLOCATION_ORDER,
    NEWTON_TOLERANCE,
)

logger = logging.getLogger(__name__)


def _free_limit(value: Any) -> Any:
    if isinstance(value, str) and value.strip().lower() in FREE_LIMIT_TOKENS:
        return FREE_LIMIT_RADIUS
    if isinstance(value, (int, float)) and math.isinf(value):
        return FREE_LIMIT_RADIUS
    return value


# cavity radius in bohr; "inf" and friends select the free-limit box
CavityRadius = Annotated[float, BeforeValidator(_free_limit), Field(gt=0)]


class GridSpec(BaseModel):
    """Radial grid request: interior point count, map length and cavity radius (bohr)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_r: int = Field(DEFAULT_N_R, ge=8)
    L: float = Field(DEFAULT_MAP_LENGTH, gt=0)
    r_c: CavityRadius

    @property
    def order(self) -> int:
        return self.n_r + 1

    def with_radius(self, r_c: float | str) -> "GridSpec":
        return GridSpec(n_r=self.n_r, L=self.L, r_c=r_c)


# ===== LEGENDRE HELPERS =====

def _legendre_pair(N: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P_N(x) and P_{N-1}(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    p = x.copy()
    for n in range(2, N + 1):
        p_prev, p = p, ((2 * n - 1) * x * p - (n - 1) * p_prev) / n
    return p, p_prev


def collocation_points(N: int) -> np.ndarray:
    """Gauss-Lobatto-Legendre abscissae: -1, the N-1 roots of P_N', +1."""
    if N < 2:
        raise ValueError(f"Collocation order must be >= 2, got {N}")
    if N > MAX_COLLOCATION_ORDER:
        raise ValueError(f"Collocation order {N} exceeds {MAX_COLLOCATION_ORDER}")

    x = -np.cos(np.pi * np.arange(1, N) / N)
    for _ in range(100):
        p, p_prev = _legendre_pair(N, x)
        # Newton on (1 - x^2) P_N'(x) = N (P_{N-1} - x P_N), whose derivative is -N(N+1) P_N
        step = (p_prev - x * p) / ((N + 1) * p)
        x = x + step
        if np.max(np.abs(step), initial=0.0) < NEWTON_TOLERANCE:
            break
    else:
        raise CollocationError(f"Newton search for roots of P_{N}' did not converge")

    x = 0.5 * (x - x[::-1])
    return np.concatenate(([-1.0], x, [1.0]))


def map_to_radial(x: Any, L: float, r_c: float) -> tuple[np.ndarray, np.ndarray]:
    """Algebraic map r = L (1 + x) / (1 - x + alpha), alpha = 2L / r_c. Returns (r, dr/dx)."""
    x = np.asarray(x, dtype=float)
    alpha = 2.0 * L / r_c
    denom = 1.0 - x + alpha
    r = L * (1.0 + x) / denom
    jac = L * (2.0 + alpha) / denom ** 2
    return r, jac


def radial_to_x(r: Any, L: float, r_c: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    alpha = 2.0 * L / r_c
    return (r * (1.0 + alpha) - L) / (r + L)


def _differentiation_matrix(x: np.ndarray, p_n: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (p_n[:, None] / p_n[None, :]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _cumulative_matrix(x: np.ndarray) -> np.ndarray:
    """C[i, j] such that sum_j C[i, j] f(x_j) = integral of the interpolant from -1 to x_i."""
    N = len(x) - 1
    V = legendre.legvander(x, N + 1)
    A = np.empty((N + 1, N + 1))
    A[:, 0] = x + 1.0
    for j in range(1, N + 1):
        A[:, j] = (V[:, j + 1] - V[:, j - 1]) / (2 * j + 1)
    return np.linalg.solve(V[:, : N + 1].T, A.T).T


# ===== GRID =====

@dataclass(frozen=True, eq=False)
class RadialGrid:
    spec: GridSpec
    x: np.ndarray
    r: np.ndarray
    jac: np.ndarray
    w_x: np.ndarray
    w: np.ndarray
    p_n: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    laplacian: np.ndarray
    cumulative: np.ndarray
    t_kin: np.ndarray

    @property
    def N(self) -> int:
        return len(self.x) - 1

    @property
    def r_c(self) -> float:
        return float(self.r[-1])

    @property
    def interior(self) -> slice:
        return slice(1, -1)

    @property
    def r_inner(self) -> np.ndarray:
        return self.r[1:-1]

    @property
    def volume_weights(self) -> np.ndarray:
        """Weights for integrals over the ball: sum(volume_weights * f) = int f d^3r."""
        return 4.0 * np.pi * self.r ** 2 * self.w

    @property
    def norm_weights(self) -> np.ndarray:
        """Quadrature weights restricted to the interior points."""
        return self.w[1:-1]

    def integrate(self, f: np.ndarray) -> float:
        return float(self.w @ f)

    def inner_integral(self, f: np.ndarray) -> np.ndarray:
        """int_0^{r_i} f dr at every grid point."""
        return self.cumulative @ f

    def tail_integral(self, f: np.ndarray) -> np.ndarray:
        """int_{r_i}^{r_c} f dr at every grid point."""
        running = self.cumulative @ f
        return running[-1] - running

    def full(self, interior_values: np.ndarray) -> np.ndarray:
        """Pad interior values with the Dirichlet zeros at r = 0 and r = r_c."""
        out = np.zeros(self.N + 1)
        out[1:-1] = interior_values
        return out

    def interpolate(self, values: np.ndarray, r_new: Any) -> np.ndarray:
        """Evaluate the collocation interpolant of full-grid values at arbitrary radii."""
        N = self.N
        xs = radial_to_x(r_new, self.spec.L, self.r_c)
        xs = np.clip(np.atleast_1d(xs), -1.0, 1.0)
        p, p_prev = _legendre_pair(N, xs)
        diff = xs[:, None] - self.x[None, :]
        exact = diff == 0.0
        diff[exact] = 1.0
        card = -(p_prev - xs * p)[:, None] / ((N + 1) * self.p_n[None, :] * diff)
        hit = exact.any(axis=1)
        card[hit] = exact[hit]
        return (card @ values) / card.sum(axis=1)

    def uniform_radii(self, points: int = 1000) -> np.ndarray:
        return np.linspace(0.0, self.r_c, points)


def _kinetic_matrix(D_x: np.ndarray, w_x: np.ndarray, jac: np.ndarray) -> np.ndarray:
    # weak form: T = 1/2 int (du/dr)^2 dr, M = int u^2 dr, then T <- M^-1/2 T M^-1/2
    D_in = D_x[:, 1:-1]
    stiffness = 0.5 * D_in.T @ ((w_x / jac)[:, None] * D_in)
    scale = 1.0 / np.sqrt(w_x[1:-1] * jac[1:-1])
    t_kin = scale[:, None] * stiffness * scale[None, :]
    return 0.5 * (t_kin + t_kin.T)


@lru_cache(maxsize=32)
def build_operators(spec: GridSpec) -> RadialGrid:
    N = spec.order
    x = collocation_points(N)
    r, jac = map_to_radial(x, spec.L, spec.r_c)
    r[0], r[-1] = 0.0, spec.r_c

    p_n, _ = _legendre_pair(N, x)
    w_x = 2.0 / (N * (N + 1) * p_n ** 2)

    D_x = _differentiation_matrix(x, p_n)
    D1 = D_x / jac[:, None]
    D2 = D1 @ D1
    laplacian = D2.copy()
    laplacian[1:] += (2.0 / r[1:])[:, None] * D1[1:]
    laplacian[0] = 3.0 * D2[0]

    w = w_x * jac
    cumulative = _cumulative_matrix(x) * jac[None, :]
    t_kin = _kinetic_matrix(D_x, w_x, jac)

    logger.debug("built GPS grid N=%d L=%g r_c=%g", N, spec.L, spec.r_c)
    for arr in (x, r, jac, w_x, w, p_n, D1, D2, laplacian, cumulative, t_kin):
        arr.setflags(write=False)

    return RadialGrid(
        spec=spec,
        x=x,
        r=r,
        jac=jac,
        w_x=w_x,
        w=w,
        p_n=p_n,
        D1=D1,
        D2=D2,
        laplacian=laplacian,
        cumulative=cumulative,
        t_kin=t_kin,
    )
