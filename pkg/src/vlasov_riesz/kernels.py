"""Interaction kernels on the torus, described by their Fourier multipliers.

A kernel is a finite sum of inverse-power terms: ``U_hat(k) = sum_i c_i |k|^(-a_i)``
for lattice wavenumbers ``k != 0`` and ``U_hat(0) = 0``.  The sign convention
(repulsive / attractive) flips the sign of every coefficient, so the rest of
the code only ever sees the folded multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["KernelSpec", "multiplier", "multiplier_on_moduli", "verify_decay_bound"]


@dataclass(frozen=True)
class KernelSpec:
    """Finite-sum inverse-power interaction kernel.

    ``terms`` is a tuple of ``(coefficient, exponent)`` pairs; every exponent
    must be strictly positive so the multiplier decays for large ``|k|``.
    ``sign_convention`` is ``"repulsive"`` (multiplier used as given) or
    ``"attractive"`` (every coefficient negated).
    """

    terms: tuple[tuple[float, float], ...]
    sign_convention: str = "repulsive"

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("kernel needs at least one (coefficient, exponent) term")
        if self.sign_convention not in ("repulsive", "attractive"):
            raise ValueError(
                f"sign_convention must be 'repulsive' or 'attractive', got {self.sign_convention!r}"
            )
        terms = tuple((float(c), float(a)) for c, a in self.terms)
        for c, a in terms:
            if not np.isfinite(c) or not np.isfinite(a):
                raise ValueError(f"non-finite kernel term ({c}, {a})")
            if a <= 0.0:
                raise ValueError(
                    f"kernel exponent {a} <= 0: the multiplier must decay "
                    "(every inverse-power exponent has to be positive)"
                )
        object.__setattr__(self, "terms", terms)

    @property
    def sign(self) -> float:
        return 1.0 if self.sign_convention == "repulsive" else -1.0

    @property
    def folded_terms(self) -> tuple[tuple[float, float], ...]:
        """Terms with the sign convention folded into the coefficients."""
        s = self.sign
        return tuple((s * c, a) for c, a in self.terms)


def multiplier(spec: KernelSpec, k) -> float:
    """Fourier multiplier of the kernel at a single lattice wavenumber.

    ``k`` may be an integer (d = 1) or a tuple of integers.  Returns 0 at
    ``k = 0``; the value is real and even in ``k`` by construction.
    """
    kv = np.atleast_1d(np.asarray(k, dtype=float))
    absk = float(np.sqrt(np.sum(kv * kv)))
    if absk == 0.0:
        return 0.0
    return float(sum(c * absk ** (-a) for c, a in spec.folded_terms))


def multiplier_on_moduli(spec: KernelSpec, absk: np.ndarray) -> np.ndarray:
    """Vectorized multiplier on an array of wavenumber moduli ``|k|``.

    Entries with ``|k| == 0`` map to 0.  Used by the field solver, which
    evaluates the kernel on a full FFT grid at once.
    """
    absk = np.asarray(absk, dtype=float)
    out = np.zeros_like(absk)
    nz = absk > 0.0
    for c, a in spec.folded_terms:
        out[nz] += c * absk[nz] ** (-a)
    return out


def verify_decay_bound(spec: KernelSpec, k_radius: int = 256) -> tuple[float, float]:
    """Check ``|U_hat(k)| <= C * |k|^(-alpha_eff)`` on a lattice ball.

    ``alpha_eff`` is the smallest exponent among the terms and
    ``C = sum(|coefficients|)``; the bound is verified numerically for every
    nonzero ``k`` with ``|k_i| <= k_radius`` (d = 1 ray suffices: the
    multiplier depends on ``|k|`` only, so moduli of higher-d lattice points
    are covered by sampling all radii that occur).  Returns
    ``(alpha_eff, C)``.
    """
    if k_radius < 1:
        raise ValueError("k_radius must be >= 1")
    folded = spec.folded_terms
    alpha_eff = min(a for _, a in folded)
    c_bound = float(sum(abs(c) for c, _ in folded))
    # All moduli on a d<=2 lattice ball of the given radius.
    ii = np.arange(0, k_radius + 1)
    r2 = (ii[:, None] ** 2 + ii[None, :] ** 2).ravel()
    moduli = np.sqrt(np.unique(r2[r2 > 0]).astype(float))
    vals = np.abs(multiplier_on_moduli(spec, moduli))
    bound = c_bound * moduli ** (-alpha_eff)
    bad = vals > bound * (1.0 + 1e-12)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise AssertionError(
            f"decay bound violated at |k|={moduli[i]}: {vals[i]} > {bound[i]}"
        )
    return float(alpha_eff), c_bound
