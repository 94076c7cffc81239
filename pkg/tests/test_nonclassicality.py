import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdtransition.kd import coherence_terms, full_dephase, johansen_decompose, kd_table, wigner_table
from kdtransition.linalg import Basis, bloch_state, fourier_basis, observable, pure_state, sigma_z
from kdtransition.nonclassicality import (
    decay_check,
    delta_q,
    nonclassicality,
    nonclassicality_traces,
    table_nonclassicality,
)
from kdtransition.pointer import PointerConfig, decoherence_factors, reduced_state

from conftest import random_instance
from oracles import coherence_sum, nonclassicality_bruteforce

S2 = 1 / np.sqrt(2)


def test_zero_for_coherence_free_states():
    A, F = sigma_z(), fourier_basis(2)
    assert nonclassicality(bloch_state(0, 0, 0.4), A, F).total == 0.0
    assert nonclassicality(pure_state([0, 1]), A, F).total == 0.0


def test_bloch_example_against_bruteforce():
    rho = bloch_state(-S2, 0, -S2)
    A, F = sigma_z(), fourier_basis(2)
    rep = nonclassicality(rho, A, F)
    ref = nonclassicality_bruteforce(rho.matrix, A.basis.vectors, F.vectors)
    assert rep.total > 0
    assert abs(rep.total - ref) <= 1e-12
    assert abs(rep.real_part_sum + rep.imag_part_sum - rep.total) <= 1e-15
    assert rep.per_pair.shape == (2, 2)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_routes_agree(d, rng):
    for _ in range(200):
        rho, A, F = random_instance(d, rng)
        a = nonclassicality(rho, A, F)
        b = nonclassicality_traces(rho, A, F)
        parts = johansen_decompose(rho, A, F)
        c = np.abs(parts.real_corr).sum() + np.abs(parts.imag_corr).sum()
        assert abs(a.total - b.total) <= 1e-10
        assert abs(a.total - c) <= 1e-10
        np.testing.assert_allclose(a.per_pair, b.per_pair, atol=1e-10)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_matches_bruteforce(seed, d):
    rng = np.random.default_rng(seed)
    rho, A, F = random_instance(d, rng)
    rep = nonclassicality(rho, A, F)
    assert abs(rep.total - nonclassicality_bruteforce(rho.matrix, A.basis.vectors, F.vectors)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_faithful_to_coherence(seed, d):
    rng = np.random.default_rng(seed)
    rho, A, F = random_instance(d, rng)
    assert nonclassicality(full_dephase(rho, A), A, F).total <= 1e-12
    assert nonclassicality(rho, A, F).total >= 0


def test_invariant_under_basis_phase(rng):
    rho, A, F = random_instance(3, rng)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    F2 = Basis(F.vectors * phases[None, :])
    assert abs(nonclassicality(rho, A, F).total - nonclassicality(rho, A, F2).total) <= 1e-12


def test_full_dephasing_variant(rng):
    for _ in range(20):
        rho, A, F = random_instance(2, rng)
        assert abs(nonclassicality(rho, A, F, "full").total - nonclassicality(rho, A, F).total) <= 1e-12
    rho, A, F = random_instance(3, rng)
    assert nonclassicality(rho, A, F, "full").total >= 0
    with pytest.raises(ValueError):
        nonclassicality(rho, A, F, "partial")


def test_delta_q_properties(rng):
    rho, A, F = random_instance(4, rng)
    Q0, W = kd_table(rho, A, F), wigner_table(rho, A, F)
    dq = delta_q(Q0, W)
    np.testing.assert_allclose(dq.sum(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(dq, coherence_sum(rho.matrix, A.basis.vectors, F.vectors), atol=1e-12)
    assert abs(table_nonclassicality(Q0, W).total - nonclassicality(rho, A, F).total) <= 1e-12
    with pytest.raises(ValueError):
        delta_q(Q0, W[:2])


def test_decay_law_qubit(rng):
    rho, A, F = random_instance(2, rng)
    grid = [PointerConfig(1.0, 1.0, t) for t in np.linspace(0, 5, 21)]
    pts = decay_check(rho, A, F, grid)
    assert pts[0].F == 1.0
    assert max(p.residual for p in pts) <= 1e-10
    assert all(b.N_t <= a.N_t + 1e-15 for a, b in zip(pts, pts[1:]))


def test_pairwise_scaling_qutrit():
    rho = pure_state([1, 1j, -1])
    A = observable([-1.0, 0.0, 1.0])
    F = fourier_basis(3)
    c0 = coherence_terms(rho, A, F)
    for t in (0.3, 1.0, 2.5):
        cfg = PointerConfig(1.0, 1.0, t)
        Fm = decoherence_factors(cfg, A)
        ct = coherence_terms(reduced_state(rho, A, cfg), A, F)
        np.testing.assert_allclose(np.abs(ct), Fm[:, :, None] * np.abs(c0), atol=1e-12)
    pts = decay_check(rho, A, F, [PointerConfig(1.0, 1.0, t) for t in (0.0, 1.0, 2.0)])
    assert pts[0].residual <= 1e-12
    assert pts[1].residual > 1e-6
