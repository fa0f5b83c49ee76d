"""End-to-end acceptance criteria.

Each test prints one pass line with the measured numbers, so a verbose run
doubles as the acceptance report.  Tolerances are fixed here, not tuned at
run time.
"""

import time

import numpy as np
import scipy.special
import sympy as sp

from bqem import diffops, inhomog
from bqem.algebra import Biquaternion, cross, dot, quat_conj
from bqem.chiral_time import bessel_j, green_function, green_residual
from bqem.grids import Lattice, QuaternionGrid, ScalarGrid, SpaceTimeLattice, laplacian, max_abs_interior
from bqem.kernels import ChiralMedium
from bqem.scattering import Ellipsoid, MfsProblem, chiral_selftest, run_benchmark

RATIO_WINDOW = (3.2, 4.8)


def report(criterion, detail):
    print(f"[criterion {criterion}] PASS {detail}")


# ---------------------------------------------------------------------------
# 1. scattering benchmark table: trend and magnitude
# ---------------------------------------------------------------------------


def test_criterion_1_benchmark_table():
    t0 = time.perf_counter()
    problem = MfsProblem(
        surface=Ellipsoid(5.0, 3.0, 2.0),
        medium=ChiralMedium(beta=0.0, alpha=1 + 0.3j),
        n_sources=10,
        source_scale=0.15,
        side="exterior",
    )
    rep = run_benchmark(problem, [10, 15, 20, 25, 30, 35], eval_scale=5.0)
    wall = time.perf_counter() - t0

    err_e = rep.column("errE")
    err_h = rep.column("errH")
    assert err_e[0] <= 1e-3 and err_h[0] <= 1e-3
    assert err_e[-1] <= 1e-4 and err_h[-1] <= 1e-4
    assert err_e[-1] / err_e[0] <= 1e-2
    assert err_h[-1] / err_h[0] <= 1e-2
    assert wall < 60.0
    report(
        1,
        f"errE(10)={err_e[0]:.3e} errH(10)={err_h[0]:.3e} "
        f"errE(35)={err_e[-1]:.3e} errH(35)={err_h[-1]:.3e} wall={wall:.1f}s",
    )


# ---------------------------------------------------------------------------
# 2. algebra laws on 10^4 random triples
# ---------------------------------------------------------------------------


def test_criterion_2_algebra_laws():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)

    def rand():
        return Biquaternion(rng.uniform(-1, 1, (10_000, 4)) + 1j * rng.uniform(-1, 1, (10_000, 4)))

    a, b, c = rand(), rand(), rand()
    assoc = ((a * b) * c - a * (b * c)).max_abs()
    conj = (quat_conj(a * b) - quat_conj(b) * quat_conj(a)).max_abs()
    rebuilt = Biquaternion.from_parts(
        a.scalar * b.scalar - dot(a, b),
        a.scalar[..., None] * b.vector + b.scalar[..., None] * a.vector + cross(a, b).vector,
    )
    recon = (rebuilt - a * b).max_abs()
    wall = time.perf_counter() - t0

    assert assoc <= 1e-12 and conj <= 1e-12 and recon <= 1e-12
    assert wall < 1.0
    report(2, f"assoc={assoc:.2e} conj={conj:.2e} recon={recon:.2e} wall={wall:.2f}s")


# ---------------------------------------------------------------------------
# 3. Helmholtz factorization refinement
# ---------------------------------------------------------------------------


def test_criterion_3_helmholtz_factorization():
    t0 = time.perf_counter()
    alpha = 1 + 0.3j

    def res(n, margin):
        # side 0.5 cube around (1,1,1); n=11 -> h=0.05, n=21 -> h=0.025
        lat = Lattice.cube((1.0, 1.0, 1.0), 0.5, n)
        g = ScalarGrid.from_function(lat, lambda p: np.exp(1j * alpha * p[..., 0]))
        return diffops.helmholtz_factorization_residual(alpha, g, margin=margin)

    r_coarse, r_fine = res(11, 2), res(21, 4)
    ratio = r_coarse / r_fine
    wall = time.perf_counter() - t0
    assert RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]
    assert wall < 5.0
    report(3, f"residuals=({r_coarse:.3e}, {r_fine:.3e}) ratio={ratio:.3f} wall={wall:.1f}s")


# ---------------------------------------------------------------------------
# 4. Schrodinger and conductivity factorizations
# ---------------------------------------------------------------------------


def test_criterion_4_schrodinger_and_conductivity():
    t0 = time.perf_counter()
    k = np.array([0.36, 0.48, 0.8])  # |k| = 1

    def schro(n, margin):
        lat = Lattice.cube((0.4, 0.5, 0.6), 0.5, n)
        f = ScalarGrid.from_function(lat, lambda p: np.exp(p @ k))
        slot = diffops.PotentialSlot.from_particular_solution(f)
        g = ScalarGrid.from_function(lat, lambda p: p[..., 0] ** 2 * p[..., 1])
        return diffops.schrodinger_factorization_residual(slot, g, margin=margin)

    def conduct(n, margin):
        # manufactured u0 = exp(-x1) solves (div p grad + q) u = 0 for
        # p = 1 + x1^2, q = -(1 - x1)^2
        lat = Lattice.cube((0.4, 0.5, 0.6), 0.5, n)
        p = ScalarGrid.from_function(lat, lambda q: 1.0 + q[..., 0] ** 2)
        qg = ScalarGrid.from_function(lat, lambda q: -((1.0 - q[..., 0]) ** 2))
        u0 = ScalarGrid.from_function(lat, lambda q: np.exp(-q[..., 0]))
        slot = diffops.PotentialSlot.from_conductivity(p, qg, u0)
        phi = ScalarGrid.from_function(lat, lambda q: np.sin(q[..., 0]) * q[..., 2])
        return diffops.conductivity_factorization_residual(slot, phi, margin=margin)

    rs = schro(11, 2) / schro(21, 4)
    rc = conduct(11, 2) / conduct(21, 4)
    wall = time.perf_counter() - t0
    assert RATIO_WINDOW[0] <= rs <= RATIO_WINDOW[1]
    assert RATIO_WINDOW[0] <= rc <= RATIO_WINDOW[1]
    assert wall < 10.0
    report(4, f"schrodinger_ratio={rs:.3f} conductivity_ratio={rc:.3f} wall={wall:.1f}s")


# ---------------------------------------------------------------------------
# 5. round trip g -> F -> g'
# ---------------------------------------------------------------------------


def test_criterion_5_round_trip():
    k = np.array([0.36, 0.48, 0.8])

    def roundtrip(n):
        lat = Lattice.cube((0.4, 0.5, 0.6), 0.5, n)
        f = ScalarGrid.from_function(lat, lambda p: np.exp(p @ k))
        slot = diffops.PotentialSlot.from_particular_solution(f)
        g = ScalarGrid.from_function(lat, lambda p: np.exp(-(p @ k)))
        F = diffops.darboux_transform(slot, g)
        ratio = QuaternionGrid(lat, F.values / slot.f.values[..., None], F.margin)
        base = (n // 2, n // 2, n // 2)
        g_prime = diffops.antiderivative(ratio, base).values * slot.f.values

        box = tuple(slice(F.margin, d - F.margin) for d in lat.dims)
        diffs = (g_prime - g.values)[box]
        fs = slot.f.values[box]
        lam = np.vdot(fs, diffs) / np.vdot(fs, fs)
        prop = float(np.max(np.abs(diffs - lam * fs)))

        gp = np.where(np.isfinite(g_prime), g_prime, 0.0)
        schro = -laplacian(gp, lat.spacing) + slot.nu.values * gp
        return prop, max_abs_interior(schro, F.margin + 1), float(np.max(np.abs(fs)))

    p1, s1, _ = roundtrip(11)
    p2, s2, fscale = roundtrip(21)
    assert p2 <= 1e-3 * fscale
    assert 2.5 <= p1 / p2 <= 6.0  # O(h^2) with quadrature contamination
    assert 2.5 <= s1 / s2 <= 6.0
    report(5, f"proportionality=({p1:.3e}, {p2:.3e}) schrodinger=({s1:.3e}, {s2:.3e})")


# ---------------------------------------------------------------------------
# 6. chiral Green function
# ---------------------------------------------------------------------------


def test_criterion_6_green_function():
    t0 = time.perf_counter()
    med = ChiralMedium(eps=1.0, mu=1.0, beta=1.0)

    # (i) causality, exactly zero
    ts = np.linspace(-3.0, -1e-12, 7)
    vals = green_function(ts, np.array([1.0, 0.4, -0.2]), med)
    causal = float(np.max(np.abs(vals.components)))
    assert causal == 0.0

    # (ii) M annihilates the Green function at second order; the sample
    # box keeps t in [0.5, 2] and |x| in [0.5, 2]
    def res(n, m):
        st = SpaceTimeLattice(Lattice.cube((0.8, 0.8, 0.8), 0.4, n), 0.5, 1.5 / (n - 1), n)
        return green_residual(st, med, margin_t=m, margin_s=m)

    r_coarse, r_fine = res(9, 1), res(17, 2)
    ratio = r_coarse / r_fine
    assert RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]

    # (iii) first root of J0 against an independent implementation
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if bessel_j(0, lo) * bessel_j(0, mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    root_err = abs(0.5 * (lo + hi) - float(scipy.special.jn_zeros(0, 1)[0]))
    assert root_err <= 1e-9

    wall = time.perf_counter() - t0
    assert wall < 30.0
    report(6, f"causality=0 exact, residual_ratio={ratio:.3f}, j0_root_err={root_err:.1e} wall={wall:.1f}s")


# ---------------------------------------------------------------------------
# 7. inhomogeneous equivalence
# ---------------------------------------------------------------------------


def test_criterion_7_inhomogeneous_equivalence():
    t0 = time.perf_counter()
    X1, X2, X3, T = inhomog.X1, inhomog.X2, inhomog.X3, inhomog.T

    def setup(n, nt):
        lat = Lattice.cube((0, 0, 0), 1.0, n)
        med = inhomog.medium_from_expressions(
            lat,
            1 + sp.Rational(3, 10) * sp.exp(-(X1**2 + X2**2 + X3**2)),
            1 + sp.Rational(1, 10) * X1**2,
        )
        st = SpaceTimeLattice(lat, 0.0, 0.8 / (nt - 1), nt)
        state = inhomog.manufactured_solution((0, 0, sp.sin(X1) * sp.cos(T)), 0, med, st)
        return med, state

    med9, st9 = setup(9, 9)
    med17, st17 = setup(17, 17)
    r9 = inhomog.quaternionic_residual(st9, med9, margin_t=1, margin_s=1)
    r17 = inhomog.quaternionic_residual(st17, med17, margin_t=2, margin_s=2)
    ratio = r9 / r17
    assert RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]

    # single-equation violations all push the residual over 10x
    pts = st9.st.space.points()
    bump = np.exp(-np.sum(pts * pts, axis=-1))
    gradbump = -2.0 * pts * bump[..., None]
    curlbump = np.cross(np.array([1.0, 0.5, -0.3]), gradbump)
    se = np.sqrt(np.real(med9.eps.values))[None, ..., None]
    sm = np.sqrt(np.real(med9.mu.values))[None, ..., None]

    def rebuilt(E=None, H=None, rho=None, j=None):
        E = st9.E if E is None else E
        H = st9.H if H is None else H
        rho = st9.rho if rho is None else rho
        j = st9.j if j is None else j
        calE, calH = se * E, sm * H
        V = np.zeros(E.shape[:-1] + (4,), complex)
        V[..., 1:] = calE + 1j * calH
        return inhomog.EMState(
            st=st9.st, E=E, H=H, rho=rho, j=j, calE=calE, calH=calH, V=V
        )

    worst = np.inf
    for bad in (
        rebuilt(E=st9.E + 0.3 * gradbump[None]),
        rebuilt(H=st9.H + 0.3 * gradbump[None]),
        rebuilt(j=st9.j + 0.3 * curlbump[None]),
        rebuilt(rho=st9.rho + 0.3 * bump[None]),
    ):
        r = inhomog.quaternionic_residual(bad, med9, margin_t=1, margin_s=1)
        worst = min(worst, r / r9)
    assert worst >= 10.0

    wall = time.perf_counter() - t0
    assert wall < 30.0
    report(7, f"quaternionic_ratio={ratio:.3f} min_violation_amplification={worst:.1f}x wall={wall:.1f}s")


# ---------------------------------------------------------------------------
# 8. Vekua quartet
# ---------------------------------------------------------------------------


def test_criterion_8_vekua_quartet():
    def slot_at(n):
        lat = Lattice.cube((0.4, 0.5, 0.6), 0.5, n)
        f = ScalarGrid.from_function(
            lat, lambda p: 2.0 + np.sin(p[..., 0]) * np.cos(p[..., 1]) + 0.2 * p[..., 2] ** 2
        )
        return diffops.PotentialSlot.from_particular_solution(f)

    slot_c, slot_f = slot_at(11), slot_at(21)
    quartet_c = diffops.generating_quartet(slot_c)
    quartet_f = diffops.generating_quartet(slot_f)

    # F0 = f satisfies the discrete equation exactly; i_k/f at second order
    assert diffops.vekua_residual(slot_f, quartet_f[0]) <= 1e-12
    ratios = []
    for Wc, Wf in zip(quartet_c[1:], quartet_f[1:]):
        rc = diffops.vekua_residual(slot_c, Wc, margin=2)
        rf = diffops.vekua_residual(slot_f, Wf, margin=4)
        ratios.append(rc / rf)
        assert RATIO_WINDOW[0] <= rc / rf <= RATIO_WINDOW[1]

    # consequence residuals: exact solutions keep all three at the
    # discrete-zero level, i.e. bounded by the same order
    scale = 1.0 / float(np.min(np.abs(slot_f.f.values)))
    worst = 0.0
    for W in quartet_f:
        worst = max(worst, *diffops.vekua_consequences(slot_f, W))
    assert worst <= 1e-11 * scale
    report(8, f"member_ratios={[f'{r:.2f}' for r in ratios]} consequence_max={worst:.2e}")


# ---------------------------------------------------------------------------
# 9. chiral MFS self-test
# ---------------------------------------------------------------------------


def test_criterion_9_chiral_selftest():
    med = ChiralMedium(beta=0.1, alpha=1 + 0.3j)
    small = chiral_selftest(med, 10)
    big = chiral_selftest(med, 35)
    b_gain = small.boundary_error / big.boundary_error
    f_gain = small.far_error / big.far_error
    assert b_gain >= 100.0
    assert f_gain >= 100.0
    report(
        9,
        f"boundary {small.boundary_error:.3e}->{big.boundary_error:.3e} ({b_gain:.0f}x), "
        f"far {small.far_error:.3e}->{big.far_error:.3e} ({f_gain:.0f}x)",
    )
