import itertools

import numpy as np
import pytest

from pyconfinedks.angular import (
    build_coupling_table,
    clebsch_gordan,
    multipole_kernel_derivative,
    slater_condon,
)


KNOWN_COEFFICIENTS = [
    ((1, 0, 1, 0, 0, 0), -1.0 / np.sqrt(3.0)),
    ((1, 1, 1, -1, 0, 0), 1.0 / np.sqrt(3.0)),
    ((1, 0, 1, 0, 2, 0), np.sqrt(2.0 / 3.0)),
    ((1, 0, 1, 0, 1, 0), 0.0),
    ((1, 1, 1, 0, 2, 1), 1.0 / np.sqrt(2.0)),
    ((1, 1, 1, 0, 1, 1), 1.0 / np.sqrt(2.0)),
    ((2, 0, 2, 0, 0, 0), 1.0 / np.sqrt(5.0)),
    ((0, 0, 3, 2, 3, 2), 1.0),
    ((2, 2, 2, 2, 4, 4), 1.0),
]

SELECTION_ZEROS = [
    (1, 0, 1, 0, 3, 0),     # triangle
    (2, 1, 1, 1, 3, 1),     # M != m1 + m2
    (0, 0, 0, 0, 2, 0),
]

BAD_ARGUMENTS = [
    ((1, 2, 1, 0, 1, 0), ValueError, "must not exceed"),
    ((-1, 0, 1, 0, 1, 0), ValueError, ">= 0"),
    ((1.0, 0, 1, 0, 1, 0), TypeError, "integers"),
    (("1", 0, 1, 0, 1, 0), TypeError, "integers"),
]


def _cg_matrix(l1, l2):
    pairs = [(m1, m2) for m1 in range(-l1, l1 + 1) for m2 in range(-l2, l2 + 1)]
    coupled = [(L, M) for L in range(abs(l1 - l2), l1 + l2 + 1) for M in range(-L, L + 1)]
    return np.array([[clebsch_gordan(l1, m1, l2, m2, L, M) for L, M in coupled] for m1, m2 in pairs])


# ===== CLEBSCH-GORDAN =====

@pytest.mark.parametrize("args,expected", KNOWN_COEFFICIENTS)
def test_known_coefficients(args, expected):
    assert clebsch_gordan(*args) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("args", SELECTION_ZEROS)
def test_selection_rules_give_exact_zero(args):
    assert clebsch_gordan(*args) == 0.0


@pytest.mark.parametrize("args,exc,match", BAD_ARGUMENTS)
def test_bad_arguments(args, exc, match):
    with pytest.raises(exc, match=match):
        clebsch_gordan(*args)


@pytest.mark.parametrize("l1,l2", list(itertools.product(range(5), repeat=2)))
def test_orthogonality(l1, l2):
    C = _cg_matrix(l1, l2)
    assert C.shape[0] == C.shape[1]
    np.testing.assert_allclose(C @ C.T, np.eye(C.shape[0]), atol=1e-10)
    np.testing.assert_allclose(C.T @ C, np.eye(C.shape[0]), atol=1e-10)


@pytest.mark.parametrize("l1,l2", [(1, 1), (1, 2), (2, 3), (3, 3)])
def test_exchange_symmetry(l1, l2):
    for m1, m2 in itertools.product(range(-l1, l1 + 1), range(-l2, l2 + 1)):
        for L in range(abs(l1 - l2), l1 + l2 + 1):
            M = m1 + m2
            if abs(M) > L:
                continue
            sign = (-1) ** (l1 + l2 - L)
            assert clebsch_gordan(l1, m1, l2, m2, L, M) == pytest.approx(
                sign * clebsch_gordan(l2, m2, l1, m1, L, M), abs=1e-12
            )


def test_parity_zeros():
    for l1, l2, L in itertools.product(range(7), repeat=3):
        if (l1 + l2 + L) % 2 and abs(l1 - l2) <= L <= l1 + l2:
            assert abs(clebsch_gordan(l1, 0, l2, 0, L, 0)) < 1e-14


# ===== SLATER-CONDON FACTORS =====

def test_monopole_factor_is_kronecker():
    for l in range(4):
        for m, m2 in itertools.product(range(-l, l + 1), repeat=2):
            assert slater_condon(l, m, l, m2, 0) == pytest.approx(float(m == m2), abs=1e-12)


def test_odd_multipole_vanishes():
    assert slater_condon(1, 0, 1, 0, 1) == 0.0
    assert slater_condon(0, 0, 1, 0, 0) == 0.0


def test_s_p_dipole_factor():
    assert slater_condon(1, 0, 0, 0, 1) ** 2 == pytest.approx(1.0 / 3.0, rel=1e-12)


# ===== MULTIPOLE KERNEL =====

def test_kernel_branches():
    assert multipole_kernel_derivative(2.0, 4.0, 1) == pytest.approx(1.0 / 16.0)
    assert multipole_kernel_derivative(4.0, 2.0, 1) == pytest.approx(-2.0 * 2.0 / 64.0)
    assert multipole_kernel_derivative(1.0, 3.0, 0) == 0.0
    assert multipole_kernel_derivative(3.0, 1.0, 0) == pytest.approx(-1.0 / 9.0)


def test_kernel_averages_at_coincidence():
    assert multipole_kernel_derivative(2.0, 2.0, 0) == pytest.approx(-0.125)
    # k = 2 at r = 1: (2 - 3) / 2
    assert multipole_kernel_derivative(1.0, 1.0, 2) == pytest.approx(-0.5)


def test_kernel_broadcasts():
    out = multipole_kernel_derivative(np.array([1.0, 2.0, 3.0]), 2.0, 0)
    np.testing.assert_allclose(out, [0.0, -0.125, -1.0 / 9.0])


def test_kernel_negative_order():
    with pytest.raises(ValueError, match=">= 0"):
        multipole_kernel_derivative(1.0, 2.0, -1)


# ===== COUPLING TABLE =====

def test_monopole_weight_counts_magnetic_states():
    table = build_coupling_table([0, 1, 2])
    for l in range(3):
        assert table.weight(l, l, 0) == pytest.approx(2 * l + 1)


def test_s_p_weights():
    table = build_coupling_table([0, 1])
    assert table.multipoles(0, 1) == (1,)
    assert table.multipoles(1, 1) == (0, 2)
    assert table.weight(0, 1, 1) == pytest.approx(1.0)
    assert table.weight(1, 0, 1) == pytest.approx(1.0)
    assert table.weight(0, 1, 0) == 0.0


def test_weights_non_negative():
    table = build_coupling_table(range(4))
    assert all(w >= 0.0 for w in table.weights.values())


def test_lone_electron_has_no_self_multipoles():
    table = build_coupling_table([1, 2])
    assert table.exchange_weight(1, 1.0, 1, 1.0, 0, same_shell=True) == 1.0
    assert table.exchange_weight(1, 1.0, 1, 1.0, 2, same_shell=True) == 0.0
    assert table.exchange_weight(2, 1.0, 2, 1.0, 4, same_shell=True) == 0.0


def test_pair_weight_scales_with_occupancy():
    table = build_coupling_table([0, 1])
    full = table.exchange_weight(0, 1.0, 1, 3.0, 1, same_shell=False)
    assert full == pytest.approx(3.0 / 3.0 * table.weight(0, 1, 1))


def test_unsupported_angular_momentum():
    with pytest.raises(ValueError, match="exceeds"):
        build_coupling_table([7])
