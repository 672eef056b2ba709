"""Force-field solves in Fourier space.

The density enters as Fourier coefficients ``rho_hat(k)`` in the convention
``rho(x) = sum_k rho_hat(k) exp(i k.x)`` (so ``rho_hat`` = FFT / N^d).  The
field is diagonal in k:

    E_hat_j(k) = -i k_j * U_hat(k) * rho_hat(k) / (1 + eps^2 |k|^2)

with ``eps = 0`` giving the unregularized limit bitwise (the multiplier is
then exactly 1).  ``U_hat(0) = 0`` removes the mean automatically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, multiplier_on_moduli

__all__ = ["SpectralDensity", "solve_field_limit", "solve_field_regularized", "wavenumber_mesh"]


@dataclass
class SpectralDensity:
    """Fourier coefficients of a real density on the torus, FFT layout.

    ``coeffs[k]`` is ``rho_hat(k)`` with wavenumbers in numpy FFT order; for
    ``d = 2`` the array is the full 2-d coefficient table.  Real input makes
    the table Hermitian, which :meth:`validate` checks.
    """

    coeffs: np.ndarray
    d: int
    Nx: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (self.Nx,) * self.d:
            raise ValueError(
                f"coefficient table shape {self.coeffs.shape} does not match Nx={self.Nx}, d={self.d}"
            )

    @classmethod
    def from_real(cls, rho: np.ndarray) -> "SpectralDensity":
        rho = np.asarray(rho, dtype=np.float64)
        d = rho.ndim
        return cls(np.fft.fftn(rho) / rho.size, d=d, Nx=rho.shape[0])

    def to_real(self) -> np.ndarray:
        return np.fft.ifftn(self.coeffs * self.coeffs.size).real

    def validate(self, rtol: float = 1e-12) -> None:
        """Assert Hermitian symmetry: coeff(-k) == conj(coeff(k))."""
        flipped = self.coeffs.copy()
        for ax in range(self.d):
            flipped = np.flip(np.roll(flipped, -1, axis=ax), axis=ax)
        scale = np.abs(self.coeffs).max() or 1.0
        if not np.allclose(flipped, np.conj(self.coeffs), rtol=0, atol=rtol * scale):
            raise ValueError("spectral density is not Hermitian (real-field) symmetric")


def wavenumber_mesh(d: int, Nx: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-axis wavenumber arrays (broadcast shape) and |k| moduli mesh."""
    k1 = np.fft.fftfreq(Nx, d=1.0 / Nx)
    if d == 1:
        return [k1], np.abs(k1)
    ka = k1[:, None] * np.ones_like(k1)[None, :]
    kb = np.ones_like(k1)[:, None] * k1[None, :]
    return [ka, kb], np.sqrt(ka**2 + kb**2)


def solve_field_regularized(
    rho: SpectralDensity, spec: KernelSpec, eps: float
) -> np.ndarray:
    """Real-space field components, shape (d,) + x-grid shape.

    The screening factor ``1/(1 + eps^2 |k|^2)`` multiplies the kernel;
    ``eps = 0`` reproduces :func:`solve_field_limit` exactly (bitwise: the
    factor is then the constant 1.0).  The Nyquist row of the gradient
    multiplier is zeroed.
    """
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    d, Nx = rho.d, rho.Nx
    kcomps, moduli = wavenumber_mesh(d, Nx)
    u_hat = multiplier_on_moduli(spec, moduli)
    if eps != 0.0:
        u_hat = u_hat / (1.0 + eps**2 * moduli**2)
    out = np.empty((d,) + rho.coeffs.shape, dtype=np.float64)
    size = rho.coeffs.size
    for j in range(d):
        kj = kcomps[j].copy()
        # drop the unpaired Nyquist mode from the odd (gradient) multiplier
        kj[np.abs(kj) == Nx // 2] = 0.0
        e_hat = -1j * kj * u_hat * rho.coeffs
        out[j] = np.fft.ifftn(e_hat * size).real
    return out


def solve_field_limit(
    rho: SpectralDensity, rho0: float, spec: KernelSpec
) -> np.ndarray:
    """Unregularized field: E_hat_j(k) = -i k_j U_hat(k) (rho_hat(k) - rho0 delta_k0).

    Since ``U_hat(0) = 0`` the mean subtraction is automatic; ``rho0`` is
    accepted for interface symmetry and only used to sanity-check the mean.
    """
    del rho0  # k = 0 is annihilated by U_hat(0) = 0
    return solve_field_regularized(rho, spec, eps=0.0)
