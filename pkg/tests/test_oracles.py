import math

import mpmath as mp
import numpy as np
import pytest
import scipy.linalg as sla

from sqcavity.oracles import (
    DenominatorVanishes,
    squeezed_vacuum_pn,
    thermal_pn,
    thermal_rate_rhs,
    weak_drive_solution,
)

N02 = 0.040536185919227404  # sinh(0.2)**2


def test_thermal_pn_limits():
    assert thermal_pn(0.0, 0) == 1.0
    assert all(thermal_pn(0.0, n) == 0.0 for n in range(1, 5))
    for n in range(6):
        assert thermal_pn(1.0, n) == pytest.approx(2.0 ** -(n + 1), rel=1e-15)
    # 1 / (1 + sinh^2 0.2), evaluated with mpmath at 30 digits
    assert thermal_pn(N02, 0) == pytest.approx(0.961042982966116601719, rel=1e-14)


def _squeezed_ket(r, levels=160):
    # brute force: S(r)|0> = exp(r (a^2 - a+^2) / 2)|0> in a large space
    a = np.diag(np.sqrt(np.arange(1, levels)), 1)
    return sla.expm(0.5 * r * (a @ a - a.T @ a.T))[:, 0]


def test_squeezed_pn_matches_brute_force():
    for r in (0.1, 0.2, 0.5):
        probs = np.abs(_squeezed_ket(r)) ** 2
        ours = np.array([squeezed_vacuum_pn(r, n) for n in range(40)])
        np.testing.assert_allclose(ours, probs[:40], rtol=1e-9, atol=1e-15)


def test_squeezed_pn_values():
    assert squeezed_vacuum_pn(0.2, 0) == pytest.approx(0.980327997644725334874, rel=1e-14)
    assert squeezed_vacuum_pn(0.2, 2) == pytest.approx(0.0190953272515191844104, rel=1e-12)
    assert all(squeezed_vacuum_pn(r, n) == 0.0 for r in (0.1, 0.7) for n in (1, 3, 5, 11))
    assert squeezed_vacuum_pn(0.0, 0) == 1.0 and squeezed_vacuum_pn(0.0, 2) == 0.0


@pytest.mark.parametrize("r", [0.1, 0.5])
def test_squeezed_pn_normalized(r):
    assert abs(sum(squeezed_vacuum_pn(r, n) for n in range(81)) - 1.0) < 1e-12


def test_squeezed_pn_normalization_tail_at_large_r():
    # at r = 1 the terms beyond n = 80 still carry 2.67e-11 of probability
    tail = mp.nsum(
        lambda k: mp.factorial(2 * k) * mp.tanh(1) ** (2 * k) / (4**k * mp.factorial(k) ** 2 * mp.cosh(1)),
        [41, mp.inf],
    )
    partial = sum(squeezed_vacuum_pn(1.0, n) for n in range(81))
    assert partial == pytest.approx(1.0 - float(tail), abs=1e-14)
    assert abs(sum(squeezed_vacuum_pn(1.0, n) for n in range(161)) - 1.0) < 1e-12


def test_printed_variant_is_not_normalized():
    printed = sum(squeezed_vacuum_pn(0.5, n, as_printed=True) for n in range(81))
    assert printed > 10.0
    # the two forms agree only on the first two even terms
    assert squeezed_vacuum_pn(0.5, 2, as_printed=True) == pytest.approx(squeezed_vacuum_pn(0.5, 2))


def test_weak_drive_resonant_limit():
    N = 0.0025
    sol = weak_drive_solution(N, math.sqrt(N * (1 + N)), 0.0, 1.0)
    assert abs(sol.p11) < 0.05 * N
    assert sol.p22 == pytest.approx(N / 2, rel=0.05)
    assert sol.w == pytest.approx(-2 * N * (1 + N) / (1 + 3 * N), rel=1e-12)


def test_weak_drive_far_detuned_limit():
    N = 0.0025
    M = math.sqrt(N * (1 + N))
    sol = weak_drive_solution(N, M, 1e6, 1.0)
    assert sol.p11 == pytest.approx(N, rel=0.05)
    assert sol.p22 == pytest.approx(N**2, rel=0.1)
    assert abs(sol.p20) < M / 1e6


def test_weak_drive_thermal_first_order():
    for N in (1e-4, 1e-3):
        sol = weak_drive_solution(N, 0.0, 0.3, 1.0)
        assert sol.w == 0.0 and sol.p20 == 0
        # first order in N: thermal p11 = N/(1+N)^2 = N + O(N^2)
        assert abs(sol.p11 - thermal_pn(N, 1)) < 5 * N**2


def test_weak_drive_p20_solves_coherence_equation():
    N, M, dc, kappa = 0.01, 0.1005, 0.7, 1.3
    s = weak_drive_solution(N, M, dc, kappa)
    lhs = kappa * M * (1 - 2 * s.p11 + s.p22) + math.sqrt(2) * (kappa * (3 * N + 1) + 1j * dc) * s.p20
    assert abs(lhs) < 1e-14


def test_weak_drive_denominator_guard():
    import scipy.optimize as so

    def den(w, N=0.0):
        return (4 * N + 2 * w) * (2 + 2 * N + w) - (1 + 3 * N + 2 * w) * (4 + 10 * N + w)

    w0 = so.brentq(den, -10, 0)
    # pick kappa M^2 so W lands on the root at N = 0, delta_c = 0: W = -2 M^2
    M = math.sqrt(-w0 / 2)
    with pytest.raises(DenominatorVanishes):
        weak_drive_solution(0.0, M, 0.0, 1.0)


def test_thermal_rate_rhs():
    N, kappa = 0.3, 0.7
    p = np.array([thermal_pn(N, n) for n in range(200)])
    assert np.abs(thermal_rate_rhs(p, N, kappa)).max() < 1e-12
    vac = np.zeros(10)
    vac[0] = 1.0
    rhs = thermal_rate_rhs(vac, N, kappa)
    assert rhs[0] == pytest.approx(-2 * kappa * N)
    np.testing.assert_array_equal(thermal_rate_rhs(vac, 0.0, kappa), 0)
    # population is conserved when the top level is empty
    assert abs(thermal_rate_rhs(vac, N, kappa).sum()) < 1e-15
