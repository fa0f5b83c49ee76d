"""Closed-form kernels: Helmholtz fundamental solution, its gradient, the
biquaternion fundamental solutions of the perturbed Dirac operators D +/- alpha,
split wavenumbers for chiral media, and the magnetic-dipole reference field.

Conventions.  theta_alpha(x) = -exp(1j*alpha*|x|) / (4*pi*|x|) solves
(Lap + alpha^2) theta = delta; admissibility requires Im(alpha) >= 0 so the
kernel decays (or stays bounded) at infinity.  The Dirac-operator kernels are

    K(+alpha) = ( alpha + x/|x|^2 - 1j*alpha*x/|x|) * theta_alpha(x)
    K(-alpha) = (-alpha + x/|x|^2 - 1j*alpha*x/|x|) * theta_alpha(x)

with scalar part +/- alpha*theta and common vector part -grad(theta); both
signs share the same theta_alpha, so one routine takes (alpha, sign).

All evaluators are pure and broadcast over a trailing-(3,) position array,
which is what the scattering matrix assembly relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Biquaternion
from .errors import ChiralResonance, InadmissibleAlpha, OriginSingularity

FOUR_PI = 4.0 * np.pi

# Guards: |x| below this is treated as "at the singularity"; |1 +/- alpha*beta|
# below RESONANCE_TOL means the split wavenumbers are undefined.
ORIGIN_TOL = 1e-13
RESONANCE_TOL = 1e-12


def _radii(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValueError("positions must have trailing length 3")
    r = np.sqrt(np.sum(x * x, axis=-1))
    if np.any(r <= ORIGIN_TOL):
        raise OriginSingularity("kernel evaluated at |x| = 0")
    return x, r


def _require_admissible(alpha: complex) -> complex:
    alpha = complex(alpha)
    if alpha.imag < 0.0:
        raise InadmissibleAlpha(f"Im(alpha) = {alpha.imag} < 0")
    return alpha


def helmholtz_kernel(alpha: complex, x) -> np.ndarray:
    """theta_alpha(x) = -exp(1j*alpha*|x|) / (4*pi*|x|)."""
    alpha = _require_admissible(alpha)
    _, r = _radii(x)
    return -np.exp(1j * alpha * r) / (FOUR_PI * r)


def helmholtz_kernel_grad(alpha: complex, x) -> Biquaternion:
    """grad theta_alpha(x) = -(x/|x|^2 - 1j*alpha*x/|x|) * theta_alpha(x).

    Returned as a purely vectorial biquaternion with the batch shape of x.
    """
    x, r = _radii(x)
    theta = -np.exp(1j * complex(alpha) * r) / (FOUR_PI * r)
    coef = theta * (1j * complex(alpha) * r - 1.0) / (r * r)
    return Biquaternion.from_vector(coef[..., None] * x)


def fundamental_solution(alpha: complex, x, sign: int = 1) -> Biquaternion:
    """Kernel of D + sign*alpha: scalar part sign*alpha*theta, vector -grad theta."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    alpha = _require_admissible(alpha)
    x, r = _radii(x)
    theta = -np.exp(1j * alpha * r) / (FOUR_PI * r)
    grad_coef = theta * (1j * alpha * r - 1.0) / (r * r)
    return Biquaternion.from_parts(
        scalar=sign * alpha * theta,
        vector=-grad_coef[..., None] * x,
    )


def chiral_wavenumbers(alpha: complex, beta: float) -> tuple[complex, complex]:
    """Split wavenumbers alpha/(1 + alpha*beta), alpha/(1 - alpha*beta).

    The two branches carry the opposing circular polarizations; they merge
    back into alpha when beta = 0.
    """
    alpha = complex(alpha)
    d1 = 1.0 + alpha * beta
    d2 = 1.0 - alpha * beta
    if abs(d1) < RESONANCE_TOL or abs(d2) < RESONANCE_TOL:
        raise ChiralResonance(f"1 +/- alpha*beta vanishes for alpha={alpha}, beta={beta}")
    return alpha / d1, alpha / d2


@dataclass(frozen=True)
class ChiralMedium:
    """Homogeneous chiral medium: permittivity, permeability, chirality, frequency.

    The wavenumber is omega*sqrt(eps*mu) unless an explicit ``alpha`` is
    supplied (the benchmark configurations prescribe a complex alpha
    directly).  ``alpha1``/``alpha2`` are the split chiral wavenumbers.
    """

    eps: float = 1.0
    mu: float = 1.0
    beta: float = 0.0
    omega: float = 1.0
    alpha: complex | None = None

    def __post_init__(self):
        if self.eps <= 0.0 or self.mu <= 0.0:
            raise ValueError("eps and mu must be positive")
        if self.alpha is None:
            object.__setattr__(self, "alpha", complex(self.omega * np.sqrt(self.eps * self.mu)))
        else:
            object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def alpha1(self) -> complex:
        return chiral_wavenumbers(self.alpha, self.beta)[0]

    @property
    def alpha2(self) -> complex:
        return chiral_wavenumbers(self.alpha, self.beta)[1]


def _theta_and_radial(alpha: complex, x):
    x, r = _radii(x)
    theta = -np.exp(1j * alpha * r) / (FOUR_PI * r)
    # grad theta = G(r) * x and d/dr G = Gp(r); both closed forms
    G = theta * (1j * alpha * r - 1.0) / (r * r)
    Gp = theta * (-(alpha * alpha) / r - 3j * alpha / (r * r) + 3.0 / (r * r * r))
    return x, r, theta, G, Gp


def vector_potential_curl(alpha: complex, x, moment) -> np.ndarray:
    """curl(c * theta_alpha) = grad theta_alpha x c, for constant c."""
    x, r, theta, G, _ = _theta_and_radial(complex(alpha), x)
    c = np.asarray(moment, dtype=complex)
    return np.cross(G[..., None] * x, np.broadcast_to(c, x.shape))


def vector_potential_curl_curl(alpha: complex, x, moment) -> np.ndarray:
    """curl curl (c * theta_alpha) = grad <c, grad theta> + alpha^2 c theta.

    Valid away from the origin where (Lap + alpha^2) theta = 0; the Hessian
    of theta acts on c in closed form, no nested differencing.
    """
    alpha = complex(alpha)
    x, r, theta, G, Gp = _theta_and_radial(alpha, x)
    c = np.asarray(moment, dtype=complex)
    xc = np.sum(x * c, axis=-1)
    hess_c = (Gp / r * xc)[..., None] * x + G[..., None] * np.broadcast_to(c, x.shape)
    return hess_c + (alpha * alpha * theta)[..., None] * np.broadcast_to(c, x.shape)


def dipole_field(moment, alpha: complex, x) -> tuple[np.ndarray, np.ndarray]:
    """Magnetic-dipole field with the singularity at the origin.

    E = curl(c * theta_alpha) and H = -(1/(1j*alpha)) curl E, the standard
    achiral reference solution; it satisfies the Silver-Mueller condition at
    infinity.  Returns (E, H) as complex (..., 3) arrays.
    """
    alpha = complex(alpha)
    if alpha == 0.0:
        raise ValueError("dipole field needs alpha != 0")
    E = vector_potential_curl(alpha, x, moment)
    H = -vector_potential_curl_curl(alpha, x, moment) / (1j * alpha)
    return E, H
