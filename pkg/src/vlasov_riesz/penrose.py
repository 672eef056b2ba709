"""Penrose stability function for velocity profiles and its infimum search.

For a profile f(v) the stability function is

    P(gamma, tau, eta) = 1 - integral_0^inf e^{-(gamma + i tau) s}
                             [i eta / (1 + |eta|^2)] . (F_v grad_v f)(eta s) ds,

with gamma > 0, tau real, eta a nonzero lattice direction.  A profile is
linearly stable (for the alpha = 0 theory) when |P| stays bounded away from
zero over the whole parameter range; the search here scans a finite box and
therefore reports an upper bound of the true infimum.

The eta/(1+|eta|^2) kernel is hard-coded as the reference form; pass
``kernel_weight`` to explore other multipliers (exploratory only — nothing
is claimed or tested for substituted kernels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad_vec

from .phase_space import _v_derivative_matrix

__all__ = ["VelocityProfile", "penrose_value", "stability_infimum"]

#: truncate the s-integral where the exponential envelope is below this
_TAIL = 1e-12


@dataclass(frozen=True)
class VelocityProfile:
    """x-independent velocity profile sampled on the standard v-grid.

    ``values`` has shape (Nv,)*d on the grid v_j = -v_max + j * (2 v_max/Nv).
    The profile must decay inside the box: edge samples are required to be
    below 1e-8 of the peak so the discrete Fourier transform of the gradient
    is trustworthy.
    """

    values: np.ndarray
    v_max: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.v_max <= 0:
            raise ValueError("v_max must be positive")
        if vals.ndim < 1 or len(set(vals.shape)) != 1:
            raise ValueError("profile values must be a d-cube of samples")
        if vals.shape[0] < 8:
            raise ValueError("need at least 8 velocity samples per axis")
        if not np.all(np.isfinite(vals)):
            raise ValueError("profile contains non-finite samples")
        peak = np.abs(vals).max()
        if peak > 0:
            edge = max(
                np.abs(np.take(vals, 0, axis=ax)).max()
                for ax in range(vals.ndim)
            )
            if edge >= 1e-8 * peak:
                raise ValueError(
                    f"profile does not decay at the box edge "
                    f"(edge/peak = {edge / peak:.3e} >= 1e-8); enlarge v_max"
                )

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def Nv(self) -> int:
        return self.values.shape[0]

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.Nv

    @property
    def v(self) -> np.ndarray:
        return -self.v_max + self.dv * np.arange(self.Nv)


def maxwellian_profile(Nv: int = 256, v_max: float = 8.0, thermal_v: float = 1.0,
                       d: int = 1) -> VelocityProfile:
    """Unit-mass Gaussian profile, the standard stable fixture."""
    dv = 2.0 * v_max / Nv
    v = -v_max + dv * np.arange(Nv)
    one_d = np.exp(-0.5 * (v / thermal_v) ** 2) / np.sqrt(2.0 * np.pi * thermal_v**2)
    vals = one_d
    for _ in range(d - 1):
        vals = np.multiply.outer(vals, one_d)
    return VelocityProfile(vals, v_max)


def _gradient_transform(profile: VelocityProfile) -> Callable[[np.ndarray], np.ndarray]:
    """Return xi -> (F_v grad_v f)(xi), a d-vector, by direct oscillatory sum.

    The gradient is taken with sixth-order finite differences on the grid and
    transformed with the plain quadrature rule dv^d * sum e^{-i xi . v}; xi is
    a continuous argument (eta scaled by time), so no FFT applies.  The
    discrete sum is exactly (2 pi / dv)-periodic in each xi component, so
    outside the alias-free band |xi_j| < pi/dv it reports alias copies, not
    the transform; a grid-resolved profile has negligible true transform out
    there, and the evaluator returns 0 instead of the alias garbage.
    """
    d = profile.d
    D = _v_derivative_matrix(profile.Nv, profile.dv)
    grads = []
    for ax in range(d):
        g = np.moveaxis(np.einsum("ij,j...->i...", D, np.moveaxis(profile.values, ax, 0)), 0, ax)
        grads.append(g.ravel())
    grads = np.array(grads)  # (d, Nv^d)
    mesh = np.stack([c.ravel() for c in np.meshgrid(*([profile.v] * d), indexing="ij")])
    cell = profile.dv**d
    band = np.pi / profile.dv

    def transform(xi: np.ndarray) -> np.ndarray:
        if np.max(np.abs(xi)) >= band:
            return np.zeros(d, dtype=complex)
        phase = np.exp(-1j * (xi @ mesh))
        return cell * (grads @ phase)

    return transform


def penrose_value(profile: VelocityProfile, gamma: float, tau: float, eta,
                  kernel_weight: Callable[[np.ndarray], np.ndarray] | None = None,
                  quad_tol: float = 1e-10) -> complex:
    """Evaluate the stability function at one (gamma, tau, eta).

    The s-integral is truncated where e^{-gamma s} drops below 1e-12 and
    computed with adaptive quadrature; the velocity transform of the profile
    gradient is a direct non-uniform discrete sum over the v-grid.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (profile.d,):
        raise ValueError(f"eta must be a {profile.d}-vector, got shape {eta.shape}")
    if np.all(eta == 0.0):
        raise ValueError("eta must be nonzero")
    transform = _gradient_transform(profile)
    if kernel_weight is None:
        weight = eta / (1.0 + float(eta @ eta))
    else:
        weight = np.atleast_1d(np.asarray(kernel_weight(eta)))
    a = gamma + 1j * tau
    s_max = -np.log(_TAIL) / gamma

    def integrand(s: float) -> np.ndarray:
        return np.exp(-a * s) * (1j * weight @ transform(eta * s))

    integral, _err = quad_vec(integrand, 0.0, s_max, epsabs=quad_tol, epsrel=quad_tol)
    return complex(1.0 - integral)


def _axis_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if hi < lo:
        raise ValueError(f"empty search range [{lo}, {hi}]")
    return np.linspace(lo, hi, n)


def stability_infimum(profile: VelocityProfile, gamma_range: tuple[float, float],
                      tau_range: tuple[float, float], eta_range: tuple[float, float],
                      n_coarse: int = 9, n_refine: int = 7, rounds: int = 3,
                      kernel_weight: Callable[[np.ndarray], np.ndarray] | None = None
                      ) -> tuple[float, tuple[float, float, float]]:
    """Scan |P| over a (gamma, tau, eta) box; return (min, argmin).

    Coarse grid search followed by ``rounds`` of local refinement around the
    running minimizer (each round shrinks to the two neighboring coarse cells).
    The result is an upper bound of the true infimum — a scan cannot certify
    the value below the grid scale.  Evaluations are independent, so the scan
    is embarrassingly parallel; this implementation runs them in sequence.

    Only d = 1 profiles are searched (eta is a scalar range excluding 0).
    """
    if profile.d != 1:
        raise NotImplementedError("stability search is implemented for d = 1 profiles")
    if gamma_range[0] <= 0:
        raise ValueError("gamma range must be bounded away from 0")
    axes = (_axis_grid(*gamma_range, n_coarse), _axis_grid(*tau_range, n_coarse),
            _axis_grid(*eta_range, n_coarse))

    def scan(gs, ts, es):
        best, arg = np.inf, None
        for g in gs:
            for t in ts:
                for e in es:
                    if abs(e) < 1e-12:
                        continue
                    val = abs(penrose_value(profile, g, t, e, kernel_weight=kernel_weight))
                    if val < best:
                        best, arg = val, (float(g), float(t), float(e))
        return best, arg

    best, arg = scan(*axes)
    if arg is None:
        raise ValueError("search box contains no admissible (gamma, tau, eta) points")
    widths = [(ax[1] - ax[0]) if len(ax) > 1 else 0.0 for ax in axes]
    bounds = [(gamma_range[0], gamma_range[1]), tau_range, eta_range]
    for _ in range(rounds):
        if all(w == 0.0 for w in widths):
            break
        new_axes = []
        for i, w in enumerate(widths):
            lo = max(bounds[i][0], arg[i] - w)
            hi = min(bounds[i][1], arg[i] + w)
            new_axes.append(_axis_grid(lo, hi, n_refine))
        cand, cand_arg = scan(*new_axes)
        if cand < best:
            best, arg = cand, cand_arg
        widths = [2.0 * w / (n_refine - 1) if n_refine > 1 else 0.0 for w in widths]
    return float(best), arg
