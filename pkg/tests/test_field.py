import numpy as np
import pytest

from vlasov_riesz.field import (SpectralDensity, solve_field_limit,
                                solve_field_regularized, wavenumber_mesh)
from vlasov_riesz.kernels import KernelSpec


def _x(Nx):
    return 2 * np.pi * np.arange(Nx) / Nx


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 2.0])
def test_single_mode_field_closed_form(alpha):
    # rho = 1 + delta cos x with U(1) = 1 gives E = delta sin x for every alpha
    Nx = 64
    delta = 0.37
    rho = SpectralDensity.from_real(1.0 + delta * np.cos(_x(Nx)))
    spec = KernelSpec(terms=((1.0, alpha),))
    E = solve_field_limit(rho, 1.0, spec)
    assert E.shape == (1, Nx)
    np.testing.assert_allclose(E[0], delta * np.sin(_x(Nx)), rtol=0, atol=1e-12 * delta)


def test_screened_single_mode_halves_amplitude():
    Nx = 64
    delta = 0.2
    rho = SpectralDensity.from_real(1.0 + delta * np.cos(_x(Nx)))
    spec = KernelSpec(terms=((1.0, 1.0),))
    E = solve_field_regularized(rho, spec, eps=1.0)
    np.testing.assert_allclose(E[0], 0.5 * delta * np.sin(_x(Nx)), rtol=0, atol=1e-13)


def test_second_mode_with_inverse_square_kernel():
    Nx = 64
    delta = 0.1
    rho = SpectralDensity.from_real(1.0 + delta * np.cos(2 * _x(Nx)))
    spec = KernelSpec(terms=((1.0, 2.0),))
    E = solve_field_limit(rho, 1.0, spec)
    # U(2) = 1/4, gradient brings k = 2: amplitude delta * 2 * (1/4) = delta / 2
    np.testing.assert_allclose(E[0], 0.5 * delta * np.sin(2 * _x(Nx)), rtol=0, atol=1e-13)


def test_attractive_convention_flips_field():
    Nx = 32
    rho = SpectralDensity.from_real(1.0 + 0.1 * np.cos(_x(Nx)))
    rep = KernelSpec(terms=((2.0, 1.0),), sign_convention="repulsive")
    att = KernelSpec(terms=((2.0, 1.0),), sign_convention="attractive")
    Er = solve_field_limit(rho, 1.0, rep)
    Ea = solve_field_limit(rho, 1.0, att)
    np.testing.assert_array_equal(Er, -Ea)


def test_mean_density_produces_no_field():
    Nx = 32
    rho = SpectralDensity.from_real(np.full(Nx, 7.3))
    E = solve_field_limit(rho, 7.3, KernelSpec(terms=((1.0, 1.0),)))
    np.testing.assert_array_equal(E, np.zeros((1, Nx)))


def test_nyquist_mode_is_dropped():
    Nx = 16
    # pure Nyquist oscillation: rho_hat has content only at k = Nx/2
    rho_real = 1.0 + 0.05 * np.cos((Nx // 2) * _x(Nx))
    rho = SpectralDensity.from_real(rho_real)
    E = solve_field_limit(rho, 1.0, KernelSpec(terms=((1.0, 0.5),)))
    np.testing.assert_allclose(E, 0.0, atol=1e-15)


def test_eps_zero_bitwise_identical_to_limit():
    Nx = 64
    rng = np.random.default_rng(11)
    rho_real = 1.0 + 0.1 * rng.standard_normal(Nx)
    rho = SpectralDensity.from_real(rho_real)
    spec = KernelSpec(terms=((1.0, 0.5), (0.3, 2.0)))
    E_lim = solve_field_limit(rho, float(np.mean(rho_real)), spec)
    E_reg = solve_field_regularized(rho, spec, eps=0.0)
    assert np.array_equal(E_lim, E_reg)


def test_negative_eps_rejected():
    rho = SpectralDensity.from_real(np.ones(16))
    with pytest.raises(ValueError, match="eps"):
        solve_field_regularized(rho, KernelSpec(terms=((1.0, 1.0),)), eps=-0.5)


def test_screening_damps_high_modes_more():
    Nx = 128
    x = _x(Nx)
    rho = SpectralDensity.from_real(1.0 + 0.1 * np.cos(x) + 0.1 * np.cos(8 * x))
    spec = KernelSpec(terms=((1.0, 1.0),))
    E0 = solve_field_regularized(rho, spec, eps=0.0)
    E1 = solve_field_regularized(rho, spec, eps=0.5)
    c0 = np.fft.fft(E0[0]) / Nx
    c1 = np.fft.fft(E1[0]) / Nx
    r1 = abs(c1[1]) / abs(c0[1])
    r8 = abs(c1[8]) / abs(c0[8])
    assert r1 == pytest.approx(1 / 1.25, rel=1e-12)
    assert r8 == pytest.approx(1 / 17.0, rel=1e-12)
    assert r8 < r1


def test_spectral_density_round_trip_and_validation():
    rng = np.random.default_rng(0)
    rho_real = rng.standard_normal(32)
    sd = SpectralDensity.from_real(rho_real)
    sd.validate()
    np.testing.assert_allclose(sd.to_real(), rho_real, atol=1e-13)

    broken = sd.coeffs.copy()
    broken[3] += 0.1  # only +3 bin touched: Hermitian pairing broken
    with pytest.raises(ValueError, match="Hermitian"):
        SpectralDensity(broken, d=1, Nx=32).validate()


def test_spectral_density_shape_check():
    with pytest.raises(ValueError, match="shape"):
        SpectralDensity(np.zeros(8, complex), d=2, Nx=8)


def test_wavenumber_mesh_layout():
    comps, mod = wavenumber_mesh(1, 8)
    np.testing.assert_array_equal(comps[0], [0, 1, 2, 3, -4, -3, -2, -1])
    np.testing.assert_array_equal(mod, np.abs(comps[0]))
    comps2, mod2 = wavenumber_mesh(2, 4)
    assert comps2[0].shape == (4, 4)
    assert mod2[1, 1] == pytest.approx(np.sqrt(2))


def test_two_dimensional_single_mode():
    Nx = 32
    x = _x(Nx)
    rho_real = 1.0 + 0.2 * np.cos(x)[:, None] * np.ones(Nx)[None, :]
    rho = SpectralDensity.from_real(rho_real)
    E = solve_field_limit(rho, 1.0, KernelSpec(terms=((1.0, 1.5),)))
    assert E.shape == (2, Nx, Nx)
    np.testing.assert_allclose(E[0], 0.2 * np.sin(x)[:, None] * np.ones(Nx)[None, :],
                               atol=1e-13)
    np.testing.assert_allclose(E[1], 0.0, atol=1e-15)


def test_two_dimensional_diagonal_mode_modulus():
    Nx = 16
    x = _x(Nx)
    # rho built from the (1, 1) lattice mode: |k| = sqrt(2) enters the kernel
    rho_real = 1.0 + 0.1 * np.cos(x[:, None] + x[None, :])
    rho = SpectralDensity.from_real(rho_real)
    alpha = 1.0
    E = solve_field_limit(rho, 1.0, KernelSpec(terms=((1.0, alpha),)))
    amp = 0.1 * 2 ** (-alpha / 2)  # k_j = 1 times |k|^(-1) at |k| = sqrt 2
    expected = amp * np.sin(x[:, None] + x[None, :])
    np.testing.assert_allclose(E[0], expected, atol=1e-13)
    np.testing.assert_allclose(E[1], expected, atol=1e-13)
