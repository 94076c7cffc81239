import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdtransition.dynamics import (
    dynamical_kd_exact,
    dynamical_kd_interp,
    general_value_AT,
    transition_sweep,
)
from kdtransition.errors import GridPointError, ImpossiblePostselectionError, InvalidPointerError
from kdtransition.kd import full_dephase, kd_table, wigner_table
from kdtransition.linalg import (
    bloch_state,
    fourier_basis,
    observable,
    pure_state,
    random_density,
    rotated_qubit_basis,
    sigma_z,
    validate_density,
)
from kdtransition.nonclassicality import nonclassicality
from kdtransition.pointer import (
    PointerConfig,
    decoherence_factors,
    decoherence_time,
    pointer_overlap,
    reduced_state,
    time_for_overlap,
)
from kdtransition.values import conditional_value, weak_value

from conftest import random_instance
from oracles import gaussian_overlap_quadrature

S2 = 1 / np.sqrt(2)
E_HALF = math.exp(-0.5)  # 0.6065306597126334


def strong_time(cfg, gap):
    # Gaussian exponent of 40 for this gap
    return math.sqrt(40 * 8 * cfg.sigma**2) / (cfg.g * gap)


def test_pointer_config_validation():
    with pytest.raises(InvalidPointerError):
        PointerConfig(0.0, 1.0)
    with pytest.raises(InvalidPointerError):
        PointerConfig(1.0, -1.0)
    with pytest.raises(InvalidPointerError):
        PointerConfig(1.0, 1.0, -0.1)


def test_pointer_overlap_examples():
    assert pointer_overlap(PointerConfig(1, 1, 0), 1, -1) == 1.0
    assert pointer_overlap(PointerConfig(1, 1, 1), 1, -1) == pytest.approx(E_HALF, abs=1e-15)
    assert pointer_overlap(PointerConfig(1, 1, 3), 0.5, 0.5) == 1.0


@pytest.mark.parametrize("sigma,g,t,a_i,a_k", [(1, 1, 1, 1, -1), (0.7, 2.3, 0.4, 0.3, -1.1), (2.0, 0.5, 3.0, 2, 0)])
def test_pointer_overlap_against_quadrature(sigma, g, t, a_i, a_k):
    cfg = PointerConfig(sigma, g, t)
    ref = gaussian_overlap_quadrature(sigma, g * a_i * t, g * a_k * t)
    assert abs(pointer_overlap(cfg, a_i, a_k) - ref) < 1e-9


def test_pointer_overlap_decays_to_zero():
    vals = [pointer_overlap(PointerConfig(1, 1, t), 1, -1) for t in np.linspace(0, 10, 101)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-20


def test_overlap_monotone_in_parameters():
    base = PointerConfig(1.0, 1.0, 1.0)
    f0 = pointer_overlap(base, 1, -1)
    assert pointer_overlap(PointerConfig(1.0, 1.0, 1.2), 1, -1) < f0
    assert pointer_overlap(PointerConfig(1.0, 1.3, 1.0), 1, -1) < f0
    assert pointer_overlap(PointerConfig(1.4, 1.0, 1.0), 1, -1) > f0


def test_decoherence_time_gives_one_over_e():
    cfg = PointerConfig(0.8, 1.7)
    tau = decoherence_time(cfg, 1.0, -0.5)
    assert pointer_overlap(cfg.at(tau), 1.0, -0.5) == pytest.approx(math.exp(-1), abs=1e-14)
    t = time_for_overlap(cfg, 1.0, -0.5, 0.5)
    assert pointer_overlap(cfg.at(t), 1.0, -0.5) == pytest.approx(0.5, abs=1e-14)


def test_decoherence_factors_examples():
    cfg = PointerConfig(1.0, 1.0, 1.0)
    Fm = decoherence_factors(cfg, sigma_z())
    np.testing.assert_allclose(Fm, [[1, E_HALF], [E_HALF, 1]], atol=1e-15)
    F3 = decoherence_factors(PointerConfig(1.3, 0.7, 2.1), observable([-1.0, 0.0, 1.0]))
    assert F3[0, 2] == pytest.approx(F3[0, 1] ** 4, rel=1e-12)
    assert np.all(np.diag(F3) == 1)
    np.testing.assert_allclose(F3, F3.T)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 5))
def test_reduced_state_contracts_coherences(seed, sigma, g, t):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    rho, A, _ = random_instance(d, rng)
    cfg = PointerConfig(sigma, g, t)
    r0 = A.basis.vectors.conj().T @ rho.matrix @ A.basis.vectors
    rt_state = reduced_state(rho, A, cfg)
    rt = A.basis.vectors.conj().T @ rt_state.matrix @ A.basis.vectors
    Fm = decoherence_factors(cfg, A)
    np.testing.assert_allclose(np.diag(rt), np.diag(r0), atol=1e-12)
    np.testing.assert_allclose(np.abs(rt), np.abs(r0) * Fm, atol=1e-12)
    assert validate_density(rt_state).passed


def test_reduced_state_examples():
    plus = pure_state([1, 1])
    A = sigma_z()
    np.testing.assert_allclose(reduced_state(plus, A, PointerConfig(1, 1, 0)).matrix, plus.matrix)
    r = reduced_state(plus, A, PointerConfig(1, 1, 1)).matrix
    assert r[0, 1] == pytest.approx(0.5 * E_HALF, abs=1e-15)
    assert abs(r[0, 1] - 0.30327) < 1e-5


@pytest.mark.parametrize("d", [2, 3, 4])
def test_strong_limit_is_full_dephasing(d, rng):
    rho, A, F = random_instance(d, rng)
    cfg = PointerConfig(1.0, 1.0)
    gaps = np.abs(A.eigenvalues[:, None] - A.eigenvalues[None, :])
    t = strong_time(cfg, gaps[gaps > 0].min())
    np.testing.assert_allclose(reduced_state(rho, A, cfg.at(t)).matrix, full_dephase(rho, A).matrix, atol=1e-12)
    np.testing.assert_allclose(dynamical_kd_exact(rho, A, F, cfg.at(t)).entries, wigner_table(rho, A, F), atol=1e-10)


def test_exact_at_t0_is_static_table(rng):
    rho, A, F = random_instance(3, rng)
    np.testing.assert_allclose(
        dynamical_kd_exact(rho, A, F, PointerConfig(1, 1, 0)).entries, kd_table(rho, A, F).entries, atol=0
    )


def test_interp_endpoints_and_bounds(rng):
    rho, A, F = random_instance(3, rng)
    Q0 = kd_table(rho, A, F)
    W = wigner_table(rho, A, F)
    np.testing.assert_array_equal(dynamical_kd_interp(Q0, W, 1.0).entries, Q0.entries)
    np.testing.assert_array_equal(dynamical_kd_interp(Q0, W, 0.0).entries, W.astype(complex))
    with pytest.raises(ValueError):
        dynamical_kd_interp(Q0, W, 1.5)
    mid = dynamical_kd_interp(Q0, W, 0.3)
    np.testing.assert_allclose(mid.entries.sum(axis=1), Q0.entries.sum(axis=1), atol=1e-14)


def test_interp_half_matches_exact_for_bloch_example():
    rho = bloch_state(-S2, 0, -S2)
    A, F = sigma_z(), fourier_basis(2)
    Q0 = kd_table(rho, A, F)
    W = wigner_table(rho, A, F)
    cfg = PointerConfig(1.0, 1.0)
    t = time_for_overlap(cfg, 1.0, -1.0, 0.5)
    exact = dynamical_kd_exact(rho, A, F, cfg.at(t))
    interp = dynamical_kd_interp(Q0, W, 0.5)
    assert interp.entries[0, 0] == pytest.approx(0.5 * Q0.entries[0, 0] + 0.5 * W[0, 0], abs=1e-15)
    np.testing.assert_allclose(exact.entries, interp.entries, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0, 4))
def test_qubit_exactness(seed, sigma, g, t):
    rng = np.random.default_rng(seed)
    rho, A, F = random_instance(2, rng)
    cfg = PointerConfig(sigma, g, t)
    f01 = decoherence_factors(cfg, A)[0, 1]
    exact = dynamical_kd_exact(rho, A, F, cfg)
    interp = dynamical_kd_interp(kd_table(rho, A, F), wigner_table(rho, A, F), f01)
    assert np.max(np.abs(exact.entries - interp.entries)) <= 1e-12


def test_qutrit_interp_residual_is_visible():
    rho = pure_state([1, 1j, -1])
    A = observable([-1.0, 0.0, 1.0])
    F = fourier_basis(3)
    pts = transition_sweep(rho, A, F, 0, t_grid=np.linspace(0, 3, 7), pointer=PointerConfig(1, 1))
    resid = [p.max_interp_residual for p in pts]
    assert resid[0] == 0
    assert max(resid) > 1e-3


def test_general_value_limits():
    rho = pure_state([1, 1])
    A, F = sigma_z(), rotated_qubit_basis(0.7 * np.pi)
    Q0 = kd_table(rho, A, F)
    W = wigner_table(rho, A, F)
    assert general_value_AT(dynamical_kd_interp(Q0, W, 1.0), A, 0) == pytest.approx(weak_value(rho, A, F, 0).value, abs=1e-10)
    a0 = general_value_AT(dynamical_kd_interp(Q0, W, 0.0), A, 0)
    assert abs(a0.imag) <= 1e-10
    assert a0.real == pytest.approx(conditional_value(rho, A, F, 0), abs=1e-10)


def test_general_value_monotone_along_grid():
    rho = pure_state([1, 1])
    A, F = sigma_z(), rotated_qubit_basis(0.7 * np.pi)
    pts = transition_sweep(rho, A, F, 0, f_grid=np.linspace(1, 0, 101))
    mags = [abs(p.A_T) for p in pts]
    assert mags[0] == pytest.approx(6.3137515146750385, abs=1e-10)
    assert all(b < a for a, b in zip(mags, mags[1:]))
    assert mags[-1] == pytest.approx(abs(conditional_value(rho, A, F, 0)), abs=1e-10)


def test_general_value_vanishing_denominator():
    A, F = sigma_z(), fourier_basis(2)
    Q = kd_table(pure_state([1, 1]), A, F)
    with pytest.raises(ImpossiblePostselectionError):
        general_value_AT(Q, A, 1)


def test_sweep_single_point_grids():
    rho = bloch_state(-S2, 0.2, -0.5)
    A, F = sigma_z(), fourier_basis(2)
    (p1,) = transition_sweep(rho, A, F, 0, f_grid=[1.0])
    assert p1.A_T == pytest.approx(weak_value(rho, A, F, 0).value, abs=1e-12)
    (p0,) = transition_sweep(rho, A, F, 0, f_grid=[0.0])
    assert p0.A_T.real == pytest.approx(conditional_value(rho, A, F, 0), abs=1e-12)


def test_sweep_n_t_linear_in_f():
    rho = bloch_state(-S2, 0, -S2)
    A, F = sigma_z(), fourier_basis(2)
    n0 = nonclassicality(rho, A, F).total
    for p in transition_sweep(rho, A, F, 0, f_grid=np.linspace(0, 1, 11)):
        assert abs(p.N_t - p.F * n0) <= 1e-10
        assert p.max_interp_residual <= 1e-12


def test_sweep_modes_agree_for_qubit(rng):
    rho, A, F = random_instance(2, rng)
    cfg = PointerConfig(0.9, 1.4)
    ts = np.linspace(0, 3, 13)
    tpts = transition_sweep(rho, A, F, 1, t_grid=ts, pointer=cfg)
    fpts = transition_sweep(rho, A, F, 1, f_grid=[p.F for p in tpts])
    for a, b in zip(tpts, fpts):
        assert abs(a.A_T - b.A_T) <= 1e-10
        assert abs(a.N_t - b.N_t) <= 1e-10


def test_sweep_f_mode_matches_t_mode_for_qutrit():
    """F-mode's implied pairwise factors reproduce the Gaussian pointer when the scalar F is the widest-gap overlap."""
    rho = pure_state([0.3, 1j, -1])
    A = observable([-1.0, 0.5, 2.0])
    F = fourier_basis(3)
    tpts = transition_sweep(rho, A, F, 2, t_grid=[0.0, 0.4, 1.1], pointer=PointerConfig(1.0, 1.0))
    fpts = transition_sweep(rho, A, F, 2, f_grid=[p.F for p in tpts])
    for a, b in zip(tpts, fpts):
        assert abs(a.max_interp_residual - b.max_interp_residual) <= 1e-12


def test_sweep_error_handling():
    rho = pure_state([1, 1])
    A, F = sigma_z(), fourier_basis(2)
    # p(f_1|rho(t)) = (1 - F) / 2 vanishes at F = 1
    with pytest.raises(GridPointError) as err:
        transition_sweep(rho, A, F, 1, f_grid=[0.0, 1.0])
    assert err.value.index == 1
    pts = transition_sweep(rho, A, F, 1, f_grid=[0.0, 1.0, 0.5], on_error="record")
    assert [p.error is None for p in pts] == [True, False, True]
    assert "probability" in pts[1].error


def test_sweep_requires_one_grid():
    rho = pure_state([1, 1])
    with pytest.raises(ValueError):
        transition_sweep(rho, sigma_z(), fourier_basis(2), 0)
    with pytest.raises(ValueError):
        transition_sweep(rho, sigma_z(), fourier_basis(2), 0, t_grid=[0.0])


def test_limits_on_random_instances(rng):
    for _ in range(50):
        rho, A, F = random_instance(2, rng)
        Q0, W = kd_table(rho, A, F), wigner_table(rho, A, F)
        for j in range(2):
            assert abs(general_value_AT(dynamical_kd_interp(Q0, W, 1.0), A, j) - weak_value(rho, A, F, j).value) <= 1e-10
            assert abs(general_value_AT(dynamical_kd_interp(Q0, W, 0.0), A, j) - conditional_value(rho, A, F, j)) <= 1e-10
