import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from openqfi.dynamics import LindbladGenerator, pure_state, superoperator, vectorize
from openqfi.errors import (
    NonpositiveInformationError,
    NotHermitianError,
    NotTracelessError,
    SingularStateError,
    ZeroLogDerivativeError,
)
from openqfi.fisher import (
    ParameterizedEvolution,
    chain_rule,
    kappa,
    qcrb,
    qfi_closed_pure,
    qfi_exact,
    qfi_report,
    qfi_tilde_cov,
    qfi_tilde_exact,
    qfi_tilde_fd,
    qfi_tilde_from_sld,
    sandwich_bounds,
    sld,
)
from openqfi.linalg import expm_frechet
from openqfi.randomness import random_density_matrix, random_generator, random_hermitian, random_ket
from openqfi.verify import fd_density_derivative

SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
ZERO2 = np.zeros((2, 2))

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def unitary_evolution(h, x, tau):
    return ParameterizedEvolution.constant(superoperator(LindbladGenerator(h)), x, tau)


def dephasing_phase_family(gamma, tau):
    """Qubit phase ``x`` under sigma_z rotation with integrated dephasing ``gamma``."""
    l_gap = superoperator(LindbladGenerator(SZ / 2))
    l_rate = superoperator(LindbladGenerator(ZERO2, [(SZ, 0.5)]))
    return ParameterizedEvolution.constant(l_gap, 1.0, tau, offset=gamma * l_rate)


# ----------------------------------------------------------------------- sld


def test_sld_diagonal():
    p = 0.3
    ell = sld(np.diag([p, 1 - p]), np.diag([1.0, -1.0]))
    np.testing.assert_allclose(ell, np.diag([1 / p, -1 / (1 - p)]), atol=1e-14)


def test_sld_zero_derivative():
    rho = random_density_matrix(3, np.random.default_rng(0))
    np.testing.assert_array_equal(sld(rho, np.zeros((3, 3))), 0)
    assert qfi_exact(rho, np.zeros((3, 3))) == 0


def test_sld_pure_unitary_expectation_vanishes():
    rho = pure_state(PLUS)
    drho = -1j * (SZ @ rho - rho @ SZ)
    ell = sld(rho, drho)
    assert abs(np.trace(rho @ ell)) < 1e-14
    np.testing.assert_allclose(0.5 * (ell @ rho + rho @ ell), drho, atol=1e-14)


def test_sld_input_errors():
    rho = np.eye(2) / 2
    with pytest.raises(NotHermitianError):
        sld(rho, np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotTracelessError):
        sld(rho, np.eye(2))


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from([2, 3, 4]))
def test_sld_solves_lyapunov(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(d, rng, floor=0.1)
    h = random_hermitian(d, rng)
    drho = -1j * (h @ rho - rho @ h)
    ell = sld(rho, drho)
    np.testing.assert_allclose(0.5 * (ell @ rho + rho @ ell), drho, atol=1e-10)
    assert qfi_exact(rho, drho) >= 0


# ----------------------------------------------------------------- pure QFI


def test_qfi_closed_pure_examples():
    assert qfi_closed_pure(PLUS, SZ, 1.0) == pytest.approx(4.0)
    assert qfi_closed_pure([1, 0], SZ, 2.0) == pytest.approx(0.0)


def test_qfi_exact_dephased_phase():
    gamma, tau = 0.4, 1.3
    evo = dephasing_phase_family(gamma, tau)
    rho, drho = evo.density_and_derivative(pure_state(PLUS))
    assert qfi_exact(rho, drho) == pytest.approx(tau**2 * np.exp(-2 * gamma), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from([2, 4, 8]))
def test_pure_unitary_equality(seed, d):
    rng = np.random.default_rng(seed)
    psi = random_ket(d, rng)
    h = random_hermitian(d, rng)
    tau = rng.uniform(0.2, 2.0)
    evo = unitary_evolution(h, 0.0, tau)
    rho0 = pure_state(psi)
    f_tilde = qfi_tilde_cov(evo.state(rho0), evo)
    f = qfi_closed_pure(psi, h, tau)
    assert f_tilde == pytest.approx(2 * f, rel=1e-8)
    rho, drho = evo.density_and_derivative(rho0)
    assert qfi_exact(rho, drho) == pytest.approx(f, rel=1e-8)


# ----------------------------------------------------------- vectorized QFI


def test_qfi_tilde_fd_constant_family():
    state = vectorize(np.eye(2) / 2)
    assert qfi_tilde_fd(lambda x: state, 0.3) == 0


def test_qfi_tilde_fd_unitary():
    tau = 0.7
    evo = unitary_evolution(SZ, 0.0, tau)
    # the family is written in x, so the tau^2 factor is already inside
    f_tilde = qfi_tilde_fd(lambda x: evo.state(pure_state(PLUS), x * tau), 0.0)
    assert f_tilde == pytest.approx(2 * qfi_closed_pure(PLUS, SZ, tau), rel=1e-5)


def test_qfi_tilde_eigenvector_is_zero():
    # |0><0| is stationary and fixed by the dephasing shape
    evo = ParameterizedEvolution.constant(superoperator(LindbladGenerator(ZERO2, [(SZ, 1.0)])), 1.0, 1.0)
    assert qfi_tilde_cov(evo.state(pure_state([1, 0])), evo) == pytest.approx(0.0, abs=1e-15)


def test_qfi_tilde_from_sld_examples():
    rho = pure_state(PLUS)
    drho = -1j * (SZ @ rho - rho @ SZ)
    ell = sld(rho, drho)
    assert qfi_tilde_from_sld(rho, ell) == pytest.approx(2 * qfi_exact(rho, drho), rel=1e-12)
    assert qfi_tilde_from_sld(np.eye(2) / 2, np.zeros((2, 2))) == 0


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_vectorized_qfi_oracles_agree(seed, d):
    rng = np.random.default_rng(seed)
    shape = superoperator(random_generator(d, rng))
    offset = 0.5 * superoperator(random_generator(d, rng))
    tau = rng.uniform(0.3, 1.5)
    x0 = rng.uniform(0.1, 1.0)
    rho0 = random_density_matrix(d, rng, floor=0.3)
    evo = ParameterizedEvolution.constant(shape, x0, tau, offset)
    exact = qfi_tilde_exact(evo, rho0)
    fd = qfi_tilde_fd(lambda x: evo.state(rho0, x * tau), x0)
    assert fd == pytest.approx(exact, rel=1e-5, abs=1e-9)
    rho, drho = evo.density_and_derivative(rho0)
    via_sld = qfi_tilde_from_sld(rho, sld(rho, drho))
    assert via_sld == pytest.approx(exact, rel=1e-7, abs=1e-10)
    # without an offset the covariance formula is exact as well
    plain = ParameterizedEvolution.constant(shape, x0, tau)
    assert qfi_tilde_cov(plain.state(rho0), plain) == pytest.approx(
        qfi_tilde_exact(plain, rho0), rel=1e-9, abs=1e-12)


def test_profile_prefactor():
    shape = np.zeros((4, 4))
    evo = ParameterizedEvolution.profile(shape, 0.5, 2.0, tau=1.0)
    assert evo.prefactor() == pytest.approx(0.25)
    assert ParameterizedEvolution.constant(shape, 1.0, 3.0).prefactor() == 9.0
    with pytest.raises(ZeroLogDerivativeError):
        ParameterizedEvolution.profile(shape, 0.5, 0.0, tau=1.0)


# -------------------------------------------------------------------- kappa


def test_kappa_examples():
    assert kappa(pure_state(PLUS)) == 2.0
    assert kappa(np.eye(2) / 2) == pytest.approx(4.0)
    assert kappa(np.diag([0.75, 0.25])) == pytest.approx(4.8)
    assert kappa(pure_state(PLUS), branch="mixed") == pytest.approx(4.0)
    with pytest.raises(ValueError):
        kappa(np.eye(2) / 2, branch="other")


def test_kappa_purity_tolerance():
    rho = np.diag([1 - 1e-12, 1e-12])
    assert kappa(rho) == 2.0
    assert kappa(rho, purity_tol=0.0) == pytest.approx(4.0)


# ------------------------------------------------------------------- bounds


def test_sandwich_pure_state_is_singular():
    rho = pure_state(PLUS)
    drho = -1j * (SZ @ rho - rho @ SZ)
    ell = sld(rho, drho)
    f_tilde = qfi_tilde_from_sld(rho, ell)
    with pytest.raises(SingularStateError) as info:
        sandwich_bounds(rho, ell, f_tilde)
    assert info.value.lower == pytest.approx(f_tilde / 4)
    assert info.value.lower <= qfi_exact(rho, drho)


def test_sandwich_stationary_family():
    lower, upper, correction = sandwich_bounds(np.eye(2) / 2, np.zeros((2, 2)), 0.0)
    assert (lower, upper, correction) == (0.0, 0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_sandwich_and_ordering(seed, d):
    rng = np.random.default_rng(seed)
    evo = ParameterizedEvolution.constant(
        superoperator(random_generator(d, rng)), rng.uniform(0.1, 1), rng.uniform(0.3, 1.5))
    rho0 = random_density_matrix(d, rng, floor=0.3)
    rho = evo.state(rho0).density_matrix()
    drho = fd_density_derivative(evo, rho0)
    ell = sld(rho, drho)
    f = qfi_exact(rho, drho)
    f_tilde = qfi_tilde_exact(evo, rho0)
    lower, upper, _ = sandwich_bounds(rho, ell, f_tilde)
    slack = 1e-8 * max(f, 1e-300)
    assert lower <= f + slack
    assert f <= upper + slack
    assert 1 / f <= kappa(rho) / f_tilde * (1 + 1e-8)


# -------------------------------------------------------------------- qcrb


def test_qcrb_examples():
    assert qcrb(4.0) == 0.5
    n, tau = 6, 0.5
    assert qcrb(n**2 * tau**2) == pytest.approx(1 / (n * tau))
    assert qcrb(n * tau**2, 100) == pytest.approx(1 / (10 * tau * np.sqrt(n)))
    with pytest.raises(NonpositiveInformationError):
        qcrb(0.0)
    with pytest.raises(ValueError):
        qcrb(1.0, 0)


def test_chain_rule():
    assert chain_rule(3.5, 1.0) == 3.5
    assert chain_rule(3.5, 0.0) == 0.0
    assert chain_rule(2.0, -3.0) == 18.0


def test_qfi_report_fields():
    evo = dephasing_phase_family(0.3, 1.0)
    rho0 = pure_state(PLUS)
    rho, drho = evo.density_and_derivative(rho0)
    f_tilde = qfi_tilde_exact(evo, rho0)
    rep = qfi_report(rho, drho, f_tilde, repetitions=4)
    assert rep.qfi_exact == pytest.approx(np.exp(-0.6))
    assert rep.bound_lower <= rep.qfi_exact <= rep.bound_upper
    assert rep.precision_bound == pytest.approx(np.sqrt(rep.kappa / (4 * f_tilde)))
    assert rep.precision_bound >= qcrb(rep.qfi_exact, 4)
    assert set(rep.as_dict()) >= {"F_exact", "F_tilde", "kappa", "delta_x_min"}


def test_qfi_report_singular_and_missing():
    rho = pure_state(PLUS)
    drho = -1j * (SZ @ rho - rho @ SZ)
    rep = qfi_report(rho, drho, 8.0)
    assert rep.bound_upper is None and "singular_state" in rep.note
    rep = qfi_report(rho, None, 0.0)
    assert rep.qfi_exact is None and rep.precision_bound is None
    assert rep.note == "exact_unavailable;zero_information"


def test_commuting_derivative_matches_frechet():
    rng = np.random.default_rng(9)
    l_gap = superoperator(LindbladGenerator(SZ / 2))
    l_rate = superoperator(LindbladGenerator(ZERO2, [(SZ, 0.5)]))
    evo = ParameterizedEvolution.constant(l_gap, 0.7, 1.1, offset=0.4 * l_rate)
    assert evo.commutes()
    v0 = random_density_matrix(2, rng).ravel()
    _, dw = evo.propagate_with_derivative(v0)
    np.testing.assert_allclose(dw, expm_frechet(evo.exponent(), l_gap) @ v0, atol=1e-12)
    generic = ParameterizedEvolution.constant(
        superoperator(random_generator(2, rng)), 0.7, 1.1,
        offset=superoperator(random_generator(2, rng)))
    assert not generic.commutes()
