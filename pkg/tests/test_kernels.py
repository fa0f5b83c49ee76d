import numpy as np
import pytest

from bqem.diffops import apply_D_shifted, embed_scalar
from bqem.errors import ChiralResonance, InadmissibleAlpha, OriginSingularity
from bqem.grids import Lattice, QuaternionGrid, ScalarGrid, max_abs_interior
from bqem.kernels import (
    ChiralMedium,
    chiral_wavenumbers,
    dipole_field,
    fundamental_solution,
    helmholtz_kernel,
    helmholtz_kernel_grad,
)

ALPHA = 1 + 0.3j


def fd_laplacian(fn, x, h):
    x = np.asarray(x, dtype=float)
    total = -6.0 * fn(x)
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        total = total + fn(x + e) + fn(x - e)
    return total / (h * h)


def fd_grad(fn, x, h):
    return np.array(
        [(fn(x + np.eye(3)[k] * h) - fn(x - np.eye(3)[k] * h)) / (2 * h) for k in range(3)]
    )


def fd_rot(fn, x, h):
    def partial(i, j):
        e = np.zeros(3)
        e[i] = h
        return (fn(x + e)[j] - fn(x - e)[j]) / (2 * h)

    return np.array(
        [partial(1, 2) - partial(2, 1), partial(2, 0) - partial(0, 2), partial(0, 1) - partial(1, 0)]
    )


def fd_div(fn, x, h):
    return sum(
        (fn(x + np.eye(3)[k] * h)[k] - fn(x - np.eye(3)[k] * h)[k]) / (2 * h) for k in range(3)
    )


def test_helmholtz_point_values():
    assert helmholtz_kernel(0.0, [1.0, 0, 0]) == pytest.approx(-1 / (4 * np.pi))
    assert helmholtz_kernel(1.0, [1.0, 0, 0]) == pytest.approx(-np.exp(1j) / (4 * np.pi))


def test_helmholtz_guards():
    with pytest.raises(OriginSingularity):
        helmholtz_kernel(1.0, [0.0, 0.0, 0.0])
    with pytest.raises(InadmissibleAlpha):
        helmholtz_kernel(1 - 0.1j, [1.0, 0, 0])


def test_helmholtz_solves_pde():
    x0 = np.array([1.0, 1.0, 1.0])
    fn = lambda p: helmholtz_kernel(ALPHA, p)
    res = [abs(fd_laplacian(fn, x0, h) + ALPHA**2 * fn(x0)) for h in (1e-2, 5e-3)]
    assert res[1] < 1e-4
    assert 3.0 < res[0] / res[1] < 5.0


def test_gradient_closed_form():
    g = helmholtz_kernel_grad(0.0, [1.0, 0, 0])
    assert np.allclose(g.vector, [1 / (4 * np.pi), 0, 0])
    assert g.is_pure_vector()

    x0 = np.array([0.7, -0.4, 1.1])
    fd = fd_grad(lambda p: helmholtz_kernel(ALPHA, p), x0, 1e-5)
    assert np.max(np.abs(helmholtz_kernel_grad(ALPHA, x0).vector - fd)) < 1e-9


def test_fundamental_solution_parts():
    x0 = np.array([0.5, 0.2, -0.9])
    theta = helmholtz_kernel(ALPHA, x0)
    grad = helmholtz_kernel_grad(ALPHA, x0)
    for sign in (1, -1):
        K = fundamental_solution(ALPHA, x0, sign=sign)
        assert K.scalar == pytest.approx(sign * ALPHA * theta)
        assert np.allclose(K.vector, -grad.vector)


def test_fundamental_solution_alpha_zero():
    # vector part -grad theta_0 = -x/(4 pi |x|^3), the Coulomb-type field
    x0 = np.array([1.0, 0, 0])
    K = fundamental_solution(0.0, x0)
    assert abs(K.scalar) == 0.0
    assert np.allclose(K.vector, -x0 / (4 * np.pi))


def test_kernel_annihilated_by_shifted_dirac():
    # (D + alpha) K_alpha = 0 away from the origin, via the grid Dirac oracle
    def residual(n, margin):
        lat = Lattice.cube((2.0, 1.0, 0.0), 0.4, n)
        K = QuaternionGrid.from_function(
            lat, lambda p: fundamental_solution(ALPHA, p).components
        )
        out = apply_D_shifted(K, ALPHA)
        return max_abs_interior(out.values, max(margin, out.margin))

    r1, r2 = residual(11, 1), residual(21, 2)
    assert 3.2 <= r1 / r2 <= 4.8


def test_conjugate_kernel_identity():
    # K_{-alpha} = -(D + alpha) theta_alpha, finite differences as the oracle
    def residual(n, margin):
        lat = Lattice.cube((1.5, -0.5, 1.0), 0.4, n)
        theta = ScalarGrid.from_function(lat, lambda p: helmholtz_kernel(ALPHA, p))
        lhs = -apply_D_shifted(embed_scalar(theta), ALPHA).values
        K = QuaternionGrid.from_function(
            lat, lambda p: fundamental_solution(ALPHA, p, sign=-1).components
        )
        return max_abs_interior(lhs - K.values, margin)

    r1, r2 = residual(11, 1), residual(21, 2)
    assert 3.2 <= r1 / r2 <= 4.8


def test_radial_symmetry():
    vals = [helmholtz_kernel(ALPHA, p) for p in ([1.0, 2.0, -3.0], [2.0, -3.0, 1.0], [-3.0, 1.0, 2.0])]
    assert vals[0] == vals[1] == vals[2]


def test_chiral_wavenumbers():
    a1, a2 = chiral_wavenumbers(ALPHA, 0.0)
    assert a1 == a2 == ALPHA
    a1, a2 = chiral_wavenumbers(1.0, 0.1)
    assert a1 == pytest.approx(1 / 1.1)
    assert a2 == pytest.approx(1 / 0.9)
    with pytest.raises(ChiralResonance):
        chiral_wavenumbers(2.0, 0.5)


def test_chiral_medium():
    med = ChiralMedium(eps=2.0, mu=0.5, beta=0.0, omega=3.0)
    assert med.alpha == pytest.approx(3.0)
    assert med.alpha1 == med.alpha2 == med.alpha
    override = ChiralMedium(beta=0.1, alpha=ALPHA)
    assert override.alpha == ALPHA
    assert override.alpha1 == pytest.approx(ALPHA / (1 + ALPHA * 0.1))
    assert override.alpha2 == pytest.approx(ALPHA / (1 - ALPHA * 0.1))
    with pytest.raises(ValueError):
        ChiralMedium(eps=-1.0)


def test_dipole_zero_moment():
    E, H = dipole_field((0, 0, 0), ALPHA, [1.0, 2.0, 0.5])
    assert np.all(E == 0) and np.all(H == 0)


def test_dipole_solves_maxwell():
    moment = np.array([0.3, -1.0, 0.7])
    x0 = np.array([0.9, -0.4, 1.2])
    E0, H0 = dipole_field(moment, ALPHA, x0)
    rotE = fd_rot(lambda p: dipole_field(moment, ALPHA, p)[0], x0, 1e-4)
    rotH = fd_rot(lambda p: dipole_field(moment, ALPHA, p)[1], x0, 1e-4)
    scale = max(np.max(np.abs(E0)), np.max(np.abs(H0)))
    # rot E = -1j alpha H and rot H = 1j alpha E (achiral system)
    assert np.max(np.abs(rotE + 1j * ALPHA * H0)) < 1e-6 * scale
    assert np.max(np.abs(rotH - 1j * ALPHA * E0)) < 1e-6 * scale
    divE = fd_div(lambda p: dipole_field(moment, ALPHA, p)[0], x0, 1e-4)
    assert abs(divE) < 1e-6 * scale


def test_dipole_silver_mueller_decay():
    moment = np.array([0.3, -1.0, 0.7])
    xhat = np.array([0.6, 0.64, 0.48])
    vals = []
    for r in (10.0, 100.0, 1000.0):
        E, H = dipole_field(moment, 1.0, r * xhat)
        vals.append(r * np.max(np.abs(E - np.cross(xhat, H))))
    assert vals[0] > vals[1] > vals[2]


def test_batched_positions():
    pts = np.array([[1.0, 0, 0], [0, 2.0, 0], [0, 0, 3.0]])
    th = helmholtz_kernel(ALPHA, pts)
    assert th.shape == (3,)
    K = fundamental_solution(ALPHA, pts)
    assert K.shape == (3,)
    assert K.scalar[0] == pytest.approx(ALPHA * th[0])
