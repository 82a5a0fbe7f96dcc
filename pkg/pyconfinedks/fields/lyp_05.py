import logging
from typing import Literal

import numpy as np

from ..grid import RadialGrid
from ..state import DensityField
from ..types import DENSITY_FLOOR, LYP_A, LYP_B, LYP_C, LYP_CF, LYP_D, Spin

logger = logging.getLogger(__name__)

LypSpin = Literal["resolved", "total"]

_C_SPIN = 2.0 ** (2.0 / 3.0) * LYP_CF


def _lyp_partials(
    ra: np.ndarray, rb: np.ndarray,
    ga: np.ndarray, gb: np.ndarray,
    la: np.ndarray, lb: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Energy density f and its partials with respect to (rho_a, grad rho_a, lap rho_a).

    Laplacian form of the functional:
        f = -a gamma h (rho + B S),  h = 1 / (1 + d rho^(-1/3)),
        B = 2b rho^(-5/3) exp(-c rho^(-1/3)),
        gamma = 2 [1 - (rho_a^2 + rho_b^2) / rho^2],
        S = C (rho_a^(8/3) + rho_b^(8/3)) - |grad rho|^2 / 8 + (|grad rho_a|^2 + |grad rho_b|^2) / 72
            + rho lap rho / 8 + (rho_a lap rho_a + rho_b lap rho_b) / 24
    The beta partials follow by swapping the a and b arguments.
    """
    rho = ra + rb
    g = ga + gb
    lap = la + lb
    s = rho ** (-1.0 / 3.0)

    h = 1.0 / (1.0 + LYP_D * s)
    gamma = 2.0 * (1.0 - (ra ** 2 + rb ** 2) / rho ** 2)
    A = -LYP_A * gamma * h
    # exp of the log keeps rho^(-5/3) from overflowing where the exponential vanishes
    B = 2.0 * LYP_B * np.exp(-5.0 / 3.0 * np.log(rho) - LYP_C * s)

    S = (
        _C_SPIN * (ra ** (8.0 / 3.0) + rb ** (8.0 / 3.0))
        - g ** 2 / 8.0
        + (ga ** 2 + gb ** 2) / 72.0
        + rho * lap / 8.0
        + (ra * la + rb * lb) / 24.0
    )
    f = A * (rho + B * S)

    dS_dra = 8.0 / 3.0 * _C_SPIN * ra ** (5.0 / 3.0) + lap / 8.0 + la / 24.0
    dS_dga = -g / 4.0 + ga / 36.0
    dS_dla = rho / 8.0 + ra / 24.0

    dB = B * (-5.0 / (3.0 * rho) + LYP_C / 3.0 * s / rho)
    dh = h ** 2 * LYP_D / 3.0 * s / rho
    dgamma = -4.0 * rb * (ra - rb) / rho ** 3
    dA = -LYP_A * (dgamma * h + gamma * dh)

    f_ra = dA * (rho + B * S) + A * (1.0 + dB * S + B * dS_dra)
    f_ga = A * B * dS_dga
    f_la = A * B * dS_dla
    return f, f_ra, f_ga, f_la


def _functional_derivative(
    f_r: np.ndarray, f_g: np.ndarray, f_l: np.ndarray, grid: RadialGrid
) -> np.ndarray:
    """v = f_rho - (1/r^2) d/dr (r^2 f_grad) + lap f_lap for a spherical density.

    Surface terms vanish: r^2 = 0 at the origin and the LYP factor
    exp(-c rho^(-1/3)) kills f_grad and f_lap at the wall.
    """
    r = grid.r
    v = f_r + grid.laplacian @ f_l - grid.D1 @ f_g
    v[1:] -= 2.0 * f_g[1:] / r[1:]
    v[0] = v[1]
    return v


def lyp_correlation(
    rho: DensityField, grid: RadialGrid, spin_mode: LypSpin = "resolved"
) -> tuple[float, dict]:
    """LYP correlation energy and per-spin potentials.

    spin_mode="resolved" uses the configuration's own spin densities;
    "total" evaluates the closed-shell reduction rho_a = rho_b = rho / 2
    and hands both channels the same potential.
    """
    W = grid.volume_weights

    if spin_mode == "total":
        half = np.maximum(0.5 * rho.rho, DENSITY_FLOOR)
        g, lap = 0.5 * rho.grad, 0.5 * rho.lap
        f, f_r, f_g, f_l = _lyp_partials(half, half, g, g, lap, lap)
        # d/drho of f(rho/2, rho/2) = (f_ra + f_rb) / 2 with f_ra = f_rb
        v = _functional_derivative(f_r, f_g, f_l, grid)
        e_c = float(W @ f)
        return e_c, {Spin.UP: v, Spin.DOWN: v}

    if spin_mode != "resolved":
        raise ValueError(f"Unknown LYP spin mode '{spin_mode}', expected 'resolved' or 'total'")

    ra, rb = rho.floored()
    ga, gb = rho.grad_up, rho.grad_down
    la, lb = rho.lap_up, rho.lap_down

    f, fa_r, fa_g, fa_l = _lyp_partials(ra, rb, ga, gb, la, lb)
    _, fb_r, fb_g, fb_l = _lyp_partials(rb, ra, gb, ga, lb, la)

    e_c = float(W @ f)
    logger.debug("LYP correlation energy %.10f", e_c)
    return e_c, {
        Spin.UP: _functional_derivative(fa_r, fa_g, fa_l, grid),
        Spin.DOWN: _functional_derivative(fb_r, fb_g, fb_l, grid),
    }
