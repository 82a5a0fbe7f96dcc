import logging

import numpy as np
from scipy import linalg

from .errors import EigensolverError
from .grid import RadialGrid

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12


def _interior(v: np.ndarray, grid: RadialGrid) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape == (grid.N + 1,):
        return v[1:-1]
    if v.shape == (grid.N - 1,):
        return v
    raise ValueError(
        f"Potential has {v.shape[0] if v.ndim else 0} points, expected {grid.N + 1} or {grid.N - 1}"
    )


def _fix_sign(u: np.ndarray) -> np.ndarray:
    # first lobe positive, i.e. u'(0) > 0
    lead = np.flatnonzero(np.abs(u) > 1e-6 * np.max(np.abs(u)))[0]
    return u if u[lead] > 0 else -u


def solve_channel(
    v_eff: np.ndarray, grid: RadialGrid, l: int, k_states: int
) -> list[tuple[float, np.ndarray]]:
    """Lowest k_states eigenpairs of -1/2 d^2/dr^2 + l(l+1)/(2r^2) + v_eff under u(0) = u(r_c) = 0.

    v_eff is given on the full grid or at the interior points and must not
    include the centrifugal term. Returned u are interior values with
    sum(w u^2) = 1.
    """
    if l < 0:
        raise ValueError(f"Angular momentum must be >= 0, got {l}")
    if not 1 <= k_states <= grid.N - 1:
        raise ValueError(f"k_states must lie in [1, {grid.N - 1}], got {k_states}")

    v = _interior(v_eff, grid)
    if not np.all(np.isfinite(v)):
        raise ValueError("Potential must be finite at interior collocation points")

    r = grid.r_inner
    H = grid.t_kin + np.diag(v + l * (l + 1) / (2.0 * r ** 2))

    scale = np.max(np.abs(H))
    if np.max(np.abs(H - H.T)) > SYMMETRY_TOLERANCE * scale:
        raise EigensolverError("Channel Hamiltonian is not symmetric")

    try:
        # full spectrum, sliced below
        eps, vecs = linalg.eigh(H, driver="evd")
    except linalg.LinAlgError as e:
        raise EigensolverError(f"Symmetric eigensolver failed for l={l}: {e}") from e

    eps, vecs = eps[:k_states], vecs[:, :k_states]
    sqrt_w = np.sqrt(grid.norm_weights)
    states = []
    for i in range(k_states):
        u = _fix_sign(vecs[:, i] / sqrt_w)
        states.append((float(eps[i]), u))

    logger.debug("l=%d: eps = %s", l, ", ".join(f"{e:.8f}" for e in eps))
    return states
