from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np
from scipy.special import gammaln

from .types import L_MAX, LOG_FACTORIAL_SIZE


_LOG_FACTORIAL = gammaln(np.arange(LOG_FACTORIAL_SIZE) + 1.0)


def _check_angular(l: int, m: int) -> None:
    if not isinstance(l, (int, np.integer)) or not isinstance(m, (int, np.integer)):
        raise TypeError(f"Angular momenta must be integers, got l={l!r}, m={m!r}")
    if l < 0:
        raise ValueError(f"Angular momentum must be >= 0, got {l}")
    if abs(m) > l:
        raise ValueError(f"|m| must not exceed l, got l={l}, m={m}")


def _triangle(a: int, b: int, c: int) -> bool:
    return abs(a - b) <= c <= a + b


def clebsch_gordan(l1: int, m1: int, l2: int, m2: int, L: int, M: int) -> float:
    """<l1 m1; l2 m2 | L M> from the Racah closed-form sum.

    Returns exactly 0.0 when M != m1 + m2 or the triangle rule fails.
    """
    _check_angular(l1, m1)
    _check_angular(l2, m2)
    _check_angular(L, M)

    if M != m1 + m2 or not _triangle(l1, l2, L):
        return 0.0

    lf = _LOG_FACTORIAL
    log_pref = 0.5 * (
        np.log(2 * L + 1)
        + lf[L + l1 - l2] + lf[L - l1 + l2] + lf[l1 + l2 - L] - lf[l1 + l2 + L + 1]
        + lf[L + M] + lf[L - M]
        + lf[l1 - m1] + lf[l1 + m1] + lf[l2 - m2] + lf[l2 + m2]
    )

    k_min = max(0, l2 - L - m1, l1 - L + m2)
    k_max = min(l1 + l2 - L, l1 - m1, l2 + m2)

    total = 0.0
    for k in range(k_min, k_max + 1):
        log_den = (
            lf[k] + lf[l1 + l2 - L - k] + lf[l1 - m1 - k] + lf[l2 + m2 - k]
            + lf[L - l2 + m1 + k] + lf[L - l1 - m2 + k]
        )
        total += (-1.0) ** k * np.exp(log_pref - log_den)
    return float(total)


def slater_condon(l: int, m: int, l2: int, m2: int, k: int) -> float:
    """Angular factor c^k(l m, l2 m2) of the Slater-Condon two-electron integrals."""
    if not _triangle(l, l2, k) or (l + l2 + k) % 2:
        return 0.0
    q = m - m2
    if abs(q) > k:
        return 0.0
    scale = np.sqrt((2 * l2 + 1) / (2 * l + 1))
    return float(scale * clebsch_gordan(l2, m2, k, q, l, m) * clebsch_gordan(l2, 0, k, 0, l, 0))


def multipole_kernel_derivative(r: Any, r2: Any, k: int) -> Any:
    """d/dr of r_<^k / r_>^(k+1).

    The inner branch (r < r2) is k r^(k-1) / r2^(k+1), the outer branch (r > r2)
    is -(k+1) r2^k / r^(k+2); at r == r2 the two limits are averaged.
    """
    if k < 0:
        raise ValueError(f"Multipole order must be >= 0, got {k}")
    r = np.asarray(r, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    inner = k * r ** (k - 1) / r2 ** (k + 1) if k else np.zeros(np.broadcast(r, r2).shape)
    outer = -(k + 1) * r2 ** k / r ** (k + 2)
    value = np.where(r < r2, inner, np.where(r > r2, outer, 0.5 * (inner + outer)))
    return value if value.ndim else float(value)


# ===== COUPLING TABLE =====

@dataclass(frozen=True)
class CouplingTable:
    """m-summed exchange weights keyed by (l, l2, k).

    weights[(l, l2, k)] = sum over m, m2 of c^k(l2 m2, l m)^2, i.e. the
    (2l+1)/(2l2+1) C^2(l k l2; m, m2-m, m2) C^2(l k l2; 000) sum of the
    spherically averaged exchange field.
    """

    weights: dict = field(default_factory=dict)

    def weight(self, l: int, l2: int, k: int) -> float:
        return self.weights.get((l, l2, k), 0.0)

    def multipoles(self, l: int, l2: int) -> tuple[int, ...]:
        return tuple(
            k for k in range(abs(l - l2), l + l2 + 1)
            if self.weights.get((l, l2, k), 0.0) > 0.0
        )

    def exchange_weight(
        self, l: int, q: float, l2: int, q2: float, k: int, same_shell: bool
    ) -> float:
        """Pair weight for shells holding q and q2 same-spin electrons.

        Occupancy is spread uniformly over m. Within one shell the monopole
        carries q and higher multipoles carry q(q-1)/((2l+1) 2l) of the full
        m-sum, so a lone electron in an open shell sees no self-exchange
        beyond the spherical Hartree term it cancels.
        """
        if same_shell:
            if k == 0:
                return q
            return q * (q - 1.0) / ((2 * l + 1) * 2 * l) * self.weight(l, l, k)
        return q * q2 / ((2 * l + 1) * (2 * l2 + 1)) * self.weight(l, l2, k)


def build_coupling_table(l_values: Iterable[int]) -> CouplingTable:
    ls = sorted(set(int(l) for l in l_values))
    if ls and ls[-1] > L_MAX:
        raise ValueError(f"Angular momentum {ls[-1]} exceeds supported l <= {L_MAX}")

    weights = {}
    for l in ls:
        for l2 in ls:
            for k in range(abs(l - l2), l + l2 + 1):
                total = 0.0
                for m in range(-l, l + 1):
                    for m2 in range(-l2, l2 + 1):
                        total += slater_condon(l2, m2, l, m, k) ** 2
                weights[(l, l2, k)] = total
    return CouplingTable(weights=weights)
