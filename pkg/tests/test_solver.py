from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from conftest import random_density_matrix
from sqcavity.fock import SpaceConfig, annihilation, number
from sqcavity.model import BathSpec, Liouvillian, SystemParams, build_liouvillian
from sqcavity.oracles import thermal_pn, thermal_rate_rhs
from sqcavity.solver import (
    DensityMatrix,
    InvalidState,
    NoConvergence,
    SingularSystem,
    StepTooLarge,
    converged_steady_state,
    evolve,
    steady_state,
)

EMPTY = SpaceConfig(15, include_atom=False)


def _mean(rho):
    return np.trace(number(rho.cfg) @ rho.data).real


@pytest.mark.parametrize("cfg", [SpaceConfig(6), SpaceConfig(6, include_atom=False)])
def test_vacuum_decay_endpoint(cfg):
    rho, report = steady_state(build_liouvillian(SystemParams(delta_c=1.0), cfg))
    expected = np.zeros((cfg.dim, cfg.dim))
    expected[0, 0] = 1.0
    np.testing.assert_allclose(rho.data, expected, atol=1e-14)
    assert report.residual < 1e-9 * report.norm
    assert report.truncation_shift is None and report.n_max_used == 6


@pytest.mark.parametrize("N", [0.01, 0.3, 1.2])
def test_thermal_populations(N):
    cfg = SpaceConfig(40, include_atom=False)
    rho, _ = steady_state(build_liouvillian(SystemParams(delta_c=2.0, bath=BathSpec.thermal(N)), cfg))
    expected = [thermal_pn(N, n) for n in range(36)]
    # the truncated chain obeys detailed balance, so only the normalization shifts
    np.testing.assert_allclose(np.diag(rho.data).real[:36], expected, atol=2e-8)


def test_squeezed_vacuum_is_pure():
    rho, _ = steady_state(build_liouvillian(SystemParams(bath=BathSpec.squeezed(0.2)), EMPTY))
    assert abs(rho.purity - 1.0) < 1e-8
    assert _mean(rho) == pytest.approx(np.sinh(0.2) ** 2, abs=1e-9)


def test_squeezed_vacuum_annihilates_generator():
    # brute-force pure state exp(r (a^2 - a+^2) / 2)|0> in a wide space
    cfg = SpaceConfig(60, include_atom=False)
    a = annihilation(cfg)
    psi = sla.expm(0.1 * (a @ a - a.T @ a.T))[:, 0]
    L = build_liouvillian(SystemParams(bath=BathSpec.squeezed(0.2)), cfg)
    assert np.abs(L.apply(np.outer(psi, psi.conj()))).max() < 1e-12
    rho, _ = steady_state(L)
    np.testing.assert_allclose(rho.data, np.outer(psi, psi.conj()), atol=1e-12)


def test_steady_state_g_coupled():
    p = SystemParams(delta_c=10.0, g=15.0, eta=0.2, bath=BathSpec.squeezed(0.2))
    rho, report = steady_state(build_liouvillian(p, SpaceConfig(15)))
    assert report.relative_residual < 1e-9
    assert rho.params == p
    rho.validate()


def test_block_reduction_matches_full_dense_solve():
    p = SystemParams(delta_c=7.0, g=15.0, bath=BathSpec.squeezed(0.3))
    L = build_liouvillian(p, SpaceConfig(8))
    rho, _ = steady_state(L)
    # dense null vector of the full generator as an independent route
    _, _, vh = np.linalg.svd(L.toarray())
    null = vh[-1].conj()
    d = L.hilbert_dim
    ref = null.reshape(d, d, order="F")
    ref = ref / np.trace(ref)
    np.testing.assert_allclose(rho.data, ref, atol=1e-10)


def test_singular_system_reported():
    cfg = SpaceConfig(3, include_atom=False)
    with pytest.raises(SingularSystem):
        steady_state(Liouvillian(sp.csr_matrix((16, 16), dtype=complex), cfg))
    # Hamiltonian-only generator: populations couple but the null space is degenerate
    L = build_liouvillian(SystemParams(eta=0.5), cfg).matrix - build_liouvillian(SystemParams(), cfg).matrix
    L.eliminate_zeros()
    with pytest.raises(SingularSystem):
        steady_state(Liouvillian(L.tocsr(), cfg))


def test_density_matrix_validation():
    cfg = SpaceConfig(1, include_atom=False)
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.2, -0.2]).astype(complex), cfg).validate()
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex), cfg).validate()
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([0.5, 0.6]).astype(complex), cfg).validate()
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(3, dtype=complex), cfg)


def test_evolve_zero_time(rng):
    L = build_liouvillian(SystemParams(bath=BathSpec.squeezed(0.2)), EMPTY)
    rho0 = DensityMatrix(random_density_matrix(EMPTY.dim, rng), EMPTY)
    assert evolve(rho0, L, 0.0, 1e-3) is rho0


def test_evolve_step_guard(rng):
    L = build_liouvillian(SystemParams(bath=BathSpec.squeezed(0.2)), EMPTY)
    rho0 = DensityMatrix(random_density_matrix(EMPTY.dim, rng), EMPTY)
    with pytest.raises(StepTooLarge):
        evolve(rho0, L, 1.0, 1.0)
    with pytest.raises(ValueError):
        evolve(rho0, L, 1.0, 0.0)


def test_evolve_reaches_vacuum(rng):
    cfg = SpaceConfig(10, include_atom=False)
    L = build_liouvillian(SystemParams(), cfg)
    rho0 = DensityMatrix(random_density_matrix(cfg.dim, rng), cfg)
    dt = 0.1 / L.norm()
    # slowest mode relaxes at kappa, so t = 25 leaves e^-25 of the start
    rho = evolve(rho0, L, 25.0, dt)
    ss, _ = steady_state(L)
    assert np.abs(rho.data - ss.data).max() < 1e-6
    assert abs(rho.trace - 1) < 1e-9


def test_evolve_matches_rate_equation():
    N, kappa = 0.3, 1.0
    cfg = SpaceConfig(20, include_atom=False)
    L = build_liouvillian(SystemParams(delta_c=1.5, kappa=kappa, bath=BathSpec.thermal(N)), cfg)
    vac = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    vac[0, 0] = 1.0
    rho = DensityMatrix(vac, cfg)
    dt = 0.1 / L.norm()
    times = np.linspace(0, 3, 31)
    oracle = solve_ivp(
        lambda t, p: thermal_rate_rhs(p, N, kappa),
        (0, 3),
        np.eye(cfg.n_levels)[0],
        t_eval=times,
        rtol=1e-11,
        atol=1e-13,
    )
    means = [0.0]
    for i in range(1, len(times)):
        rho = evolve(rho, L, times[i] - times[i - 1], dt)
        np.testing.assert_allclose(np.diag(rho.data).real, oracle.y[:, i], atol=1e-8)
        means.append(_mean(rho))
    assert np.all(np.diff(means) >= 0)
    assert means[-1] < N and means[-1] == pytest.approx(N, abs=1e-3)


def test_evolve_idempotent_on_steady_state():
    p = SystemParams(delta_c=5.0, g=15.0, bath=BathSpec.squeezed(0.2))
    cfg = SpaceConfig(8)
    L = build_liouvillian(p, cfg)
    ss, _ = steady_state(L)
    out = evolve(ss, L, 0.5, 0.1 / L.norm())
    assert np.abs(out.data - ss.data).max() < 1e-8


def test_converged_small_squeezing():
    p = SystemParams(bath=BathSpec.squeezed(0.2))
    rho, rep = converged_steady_state(p, 15, 1e-8, include_atom=False)
    assert rep.n_max_used == 15 and rep.truncation_shift < 1e-8


def test_converged_vacuum_trivial():
    rho, rep = converged_steady_state(SystemParams(g=15.0, delta_c=3.0), 15, 1e-10)
    assert rep.n_max_used == 15 and rep.truncation_shift == 0.0


def test_stronger_squeezing_needs_more_levels():
    weak = converged_steady_state(SystemParams(bath=BathSpec.squeezed(0.2)), 15, 1e-8, include_atom=False)[1]
    strong = converged_steady_state(SystemParams(bath=BathSpec.squeezed(0.9)), 15, 1e-8, include_atom=False)[1]
    assert strong.n_max_used > weak.n_max_used


def test_no_convergence():
    with pytest.raises(NoConvergence):
        converged_steady_state(SystemParams(bath=BathSpec.squeezed(2.5)), 15, 1e-10, include_atom=False)
    with pytest.raises(ValueError):
        converged_steady_state(SystemParams(), 15, 0.0)


@pytest.mark.parametrize("dc", [0.0, 4.0, 10.6, 15.0])
def test_mean_photon_even_in_detuning(dc):
    p = SystemParams(delta_c=dc, g=15.0, bath=BathSpec.squeezed(0.2))
    a = _mean(steady_state(build_liouvillian(p, SpaceConfig(12)))[0])
    b = _mean(steady_state(build_liouvillian(replace(p, delta_c=-dc), SpaceConfig(12)))[0])
    assert abs(a - b) < 1e-9
