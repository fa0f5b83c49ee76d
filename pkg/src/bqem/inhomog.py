"""Maxwell's equations in a medium with variable eps(x), mu(x), rewritten as
one quaternionic equation, and numerical verification of the equivalence.

For real fields E, H the purely vectorial biquaternion V = sqrt(eps) E +
1j sqrt(mu) H satisfies

    (1/c) dt V + 1j D V - M^{1j cvec} V - M^{1j Wvec} V* = -(sqrt(mu) j + 1j rho/sqrt(eps))

exactly when (E, H) solve the Maxwell system with sources (rho, j); here
c = 1/sqrt(eps mu), W = sqrt(mu/eps) is the intrinsic wave impedance, and
cvec = grad(sqrt(c))/sqrt(c), Wvec = grad(sqrt(W))/sqrt(W) are the
logarithmic-derivative fields (M^p is pointwise right multiplication, p is
never differentiated).  The derived fields obey

    epsvec + muvec = -grad(c)/c        epsvec - muvec = -grad(W)/W ,

which build_medium checks on every constructed medium.  In the static case
the system splits into (D + M^epsvec) calE = -rho/sqrt(eps) and
(D + M^muvec) calH = sqrt(mu) j with calE = sqrt(eps) E, calH = sqrt(mu) H.

Verification uses manufactured solutions: H = rot(A)/mu and
E = -dt(A) + grad(phi) satisfy the two curl-free/divergence-free halves
identically, and rho := div(eps E), j := rot(H) - eps dt(E) make the other
two hold by definition.  When the potentials and the medium are given as
sympy expressions all sources are differentiated symbolically, so the
state is exact and every finite-difference residual is pure stencil error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .algebra import _mul_components
from .errors import LatticeMismatch, NonPositiveMedium
from .grids import (
    Lattice,
    QuaternionGrid,
    ScalarGrid,
    SpaceTimeLattice,
    diff,
    dirac,
    div,
    grad,
    max_abs_interior,
    rot,
)

T, X1, X2, X3 = sp.symbols("t x1 x2 x3", real=True)
SPACE_SYMBOLS = (X1, X2, X3)


def _lambdify(expr):
    fn = sp.lambdify((T, X1, X2, X3), expr, modules="numpy")

    def call(t, pts):
        out = fn(t, pts[..., 0], pts[..., 1], pts[..., 2])
        return np.broadcast_to(np.asarray(out), pts.shape[:-1]).astype(complex)

    return call


def _sample_scalar(expr, times, pts) -> np.ndarray:
    call = _lambdify(expr)
    return np.stack([call(t, pts) for t in np.atleast_1d(times)], axis=0)


def _sample_vector(exprs, times, pts) -> np.ndarray:
    calls = [_lambdify(e) for e in exprs]
    slices = [
        np.stack([c(t, pts) for c in calls], axis=-1) for t in np.atleast_1d(times)
    ]
    return np.stack(slices, axis=0)


@dataclass(frozen=True)
class MediumFields:
    """Sampled eps, mu and every derived field the quaternionic form needs.

    The log-derivative grids (margin one) are purely vectorial quaternion
    fields; closed forms of eps and mu are kept when known so manufactured
    sources can be differentiated analytically.
    """

    eps: ScalarGrid
    mu: ScalarGrid
    c: ScalarGrid
    W: ScalarGrid
    epsvec: QuaternionGrid
    muvec: QuaternionGrid
    cvec: QuaternionGrid
    Wvec: QuaternionGrid
    eps_form: sp.Expr | None = None
    mu_form: sp.Expr | None = None
    identity_residuals: tuple[float, float] = (np.nan, np.nan)

    @property
    def lattice(self) -> Lattice:
        return self.eps.lattice


def _log_derivative(values: np.ndarray, lattice: Lattice) -> QuaternionGrid:
    """grad(sqrt(s))/sqrt(s) = grad(s)/(2 s) as a pure-vector quaternion grid."""
    g = grad(values, lattice.spacing) / (2.0 * values[..., None])
    return QuaternionGrid.from_vector_values(lattice, g, 1)


def build_medium(
    eps: ScalarGrid,
    mu: ScalarGrid,
    eps_form: sp.Expr | None = None,
    mu_form: sp.Expr | None = None,
) -> MediumFields:
    """Derive c, W and the four log-derivative fields from eps(x), mu(x)."""
    if eps.lattice != mu.lattice:
        raise LatticeMismatch("eps and mu must share one lattice")
    ev = np.real(eps.values)
    mv = np.real(mu.values)
    if np.min(ev) <= 0.0 or np.min(mv) <= 0.0:
        raise NonPositiveMedium("eps and mu must be strictly positive")
    lat = eps.lattice
    h = lat.spacing
    cv = 1.0 / np.sqrt(ev * mv)
    Wv = np.sqrt(mv / ev)

    epsvec = _log_derivative(ev, lat)
    muvec = _log_derivative(mv, lat)
    cvec = _log_derivative(cv, lat)
    Wvec = _log_derivative(Wv, lat)

    # the two gradient identities tying the derived fields together
    id1 = epsvec.values[..., 1:] + muvec.values[..., 1:] + grad(cv, h) / cv[..., None]
    id2 = epsvec.values[..., 1:] - muvec.values[..., 1:] + grad(Wv, h) / Wv[..., None]
    residuals = (max_abs_interior(id1, 1), max_abs_interior(id2, 1))

    return MediumFields(
        eps=eps,
        mu=mu,
        c=ScalarGrid(lat, cv.astype(complex)),
        W=ScalarGrid(lat, Wv.astype(complex)),
        epsvec=epsvec,
        muvec=muvec,
        cvec=cvec,
        Wvec=Wvec,
        eps_form=eps_form,
        mu_form=mu_form,
        identity_residuals=residuals,
    )


def medium_from_expressions(lattice: Lattice, eps_expr, mu_expr) -> MediumFields:
    """Sample closed-form eps(x), mu(x) and remember the expressions."""
    eps_expr = sp.sympify(eps_expr)
    mu_expr = sp.sympify(mu_expr)
    pts = lattice.points()
    eps = ScalarGrid(lattice, _sample_scalar(eps_expr, 0.0, pts)[0])
    mu = ScalarGrid(lattice, _sample_scalar(mu_expr, 0.0, pts)[0])
    return build_medium(eps, mu, eps_form=eps_expr, mu_form=mu_expr)


@dataclass(frozen=True)
class EMState:
    """Electromagnetic state sampled on a space-time lattice.

    E, H, j have shape (nt,) + dims + (3,); rho has shape (nt,) + dims.
    calE = sqrt(eps) E, calH = sqrt(mu) H and V = calE + 1j calH are stored
    alongside.  ``provenance`` records whether the sources were derived
    analytically or by grid differentiation (grid margins then apply).
    """

    st: SpaceTimeLattice
    E: np.ndarray
    H: np.ndarray
    rho: np.ndarray
    j: np.ndarray
    calE: np.ndarray
    calH: np.ndarray
    V: np.ndarray
    provenance: str = "analytic"
    real_valued: bool = True
    margin_t: int = 0
    margin_s: int = 0


def _assemble_state(st, medium, E, H, rho, j, provenance, margin_t=0, margin_s=0) -> EMState:
    se = np.sqrt(np.real(medium.eps.values))[None, ..., None]
    sm = np.sqrt(np.real(medium.mu.values))[None, ..., None]
    calE = se * E
    calH = sm * H
    V = np.zeros(E.shape[:-1] + (4,), dtype=complex)
    V[..., 1:] = calE + 1j * calH
    real_valued = bool(
        np.allclose(np.imag(E), 0.0, atol=1e-14) and np.allclose(np.imag(H), 0.0, atol=1e-14)
    )
    return EMState(
        st=st, E=E, H=H, rho=rho, j=j, calE=calE, calH=calH, V=V,
        provenance=provenance, real_valued=real_valued,
        margin_t=margin_t, margin_s=margin_s,
    )


def manufactured_solution(A, phi, medium: MediumFields, st: SpaceTimeLattice) -> EMState:
    """Exact Maxwell state from a vector potential A(t,x) and scalar phi(t,x).

    H = rot(A)/mu and E = -dt(A) + grad(phi) satisfy the curl equation and
    div(mu H) = 0 identically; the sources are then defined as
    rho = div(eps E) and j = rot(H) - eps dt(E), so all four equations hold.
    A and phi are sympy expressions in (t, x1, x2, x3); the medium must
    carry closed forms for the analytic route, otherwise everything is
    differentiated on the grid and the state carries stencil margins.
    """
    if st.space != medium.lattice:
        raise LatticeMismatch("state lattice differs from the medium's")
    A = tuple(sp.sympify(a) for a in A)
    phi = sp.sympify(phi)
    pts = st.space.points()
    times = st.times()

    if medium.eps_form is None or medium.mu_form is None:
        return _manufactured_on_grid(A, phi, medium, st)

    eps_e, mu_e = medium.eps_form, medium.mu_form
    rotA = (
        sp.diff(A[2], X2) - sp.diff(A[1], X3),
        sp.diff(A[0], X3) - sp.diff(A[2], X1),
        sp.diff(A[1], X1) - sp.diff(A[0], X2),
    )
    H_e = tuple(r / mu_e for r in rotA)
    E_e = tuple(-sp.diff(A[k], T) + sp.diff(phi, SPACE_SYMBOLS[k]) for k in range(3))
    rho_e = sum(sp.diff(eps_e * E_e[k], SPACE_SYMBOLS[k]) for k in range(3))
    rotH = (
        sp.diff(H_e[2], X2) - sp.diff(H_e[1], X3),
        sp.diff(H_e[0], X3) - sp.diff(H_e[2], X1),
        sp.diff(H_e[1], X1) - sp.diff(H_e[0], X2),
    )
    j_e = tuple(rotH[k] - eps_e * sp.diff(E_e[k], T) for k in range(3))

    E = _sample_vector(E_e, times, pts)
    H = _sample_vector(H_e, times, pts)
    rho = _sample_scalar(rho_e, times, pts)
    j = _sample_vector(j_e, times, pts)
    return _assemble_state(st, medium, E, H, rho, j, "analytic")


def _manufactured_on_grid(A, phi, medium: MediumFields, st: SpaceTimeLattice) -> EMState:
    h = st.space.spacing
    ht = st.dt
    pts = st.space.points()
    times = st.times()
    Av = _sample_vector(A, times, pts)
    phiv = _sample_scalar(phi, times, pts)
    ev = np.real(medium.eps.values)[None, ..., None]
    mv = np.real(medium.mu.values)[None, ..., None]

    H = rot(Av, h, axes=(1, 2, 3)) / mv
    E = -diff(Av, 0, ht) + np.stack([diff(phiv, ax, h) for ax in (1, 2, 3)], axis=-1)
    rho = div(ev * E, h, axes=(1, 2, 3))
    j = rot(H, h, axes=(1, 2, 3)) - ev * diff(E, 0, ht)
    return _assemble_state(st, medium, E, H, rho, j, "grid", margin_t=2, margin_s=2)


def maxwell_residuals(
    state: EMState,
    medium: MediumFields,
    margin_t: int | None = None,
    margin_s: int | None = None,
) -> tuple[float, float, float, float]:
    """Max interior residuals of the four Maxwell equations, in order:
    rot H - eps dt E - j,  rot E + mu dt H,  div(eps E) - rho,  div(mu H)."""
    st = state.st
    h = st.space.spacing
    ht = st.dt
    ev = np.real(medium.eps.values)[None, ..., None]
    mv = np.real(medium.mu.values)[None, ..., None]
    mt = max(state.margin_t + 1, margin_t or 0)
    ms = max(state.margin_s + 1, margin_s or 0)

    def _max(arr):
        return max_abs_interior(arr, ms, spatial_axes=(1, 2, 3), extra={0: mt})

    r1 = _max(rot(state.H, h, axes=(1, 2, 3)) - ev * diff(state.E, 0, ht) - state.j)
    r2 = _max(rot(state.E, h, axes=(1, 2, 3)) + mv * diff(state.H, 0, ht))
    r3 = _max(div(ev * state.E, h, axes=(1, 2, 3)) - state.rho)
    r4 = _max(div(mv * state.H, h, axes=(1, 2, 3)))
    return r1, r2, r3, r4


def quaternionic_residual(
    state: EMState,
    medium: MediumFields,
    margin_t: int | None = None,
    margin_s: int | None = None,
) -> float:
    """Max interior residual of the single quaternionic Maxwell equation."""
    if not state.real_valued:
        warnings.warn(
            "state has complex E or H; the equivalence only covers real fields",
            stacklevel=2,
        )
    st = state.st
    h = st.space.spacing
    ht = st.dt
    ev = np.real(medium.eps.values)[None, ...]
    mv = np.real(medium.mu.values)[None, ...]
    cv = np.real(medium.c.values)[None, ...]

    V = state.V
    DV = dirac(V, h, axes=(1, 2, 3))
    dtV = diff(V, 0, ht)
    icvec = 1j * np.broadcast_to(medium.cvec.values[None], V.shape)
    iWvec = 1j * np.broadcast_to(medium.Wvec.values[None], V.shape)
    lhs = (
        dtV / cv[..., None]
        + 1j * DV
        - _mul_components(V, icvec)
        - _mul_components(np.conj(V), iWvec)
    )
    rhs = np.zeros_like(V)
    rhs[..., 0] = -1j * state.rho / np.sqrt(ev)
    rhs[..., 1:] = -np.sqrt(mv)[..., None] * state.j

    mt = max(state.margin_t + 1, margin_t or 0)
    ms = max(state.margin_s + 1, medium.cvec.margin, margin_s or 0)
    return max_abs_interior(lhs - rhs, ms, spatial_axes=(1, 2, 3), extra={0: mt})


def split_residuals(
    state: EMState,
    medium: MediumFields,
    margin_t: int | None = None,
    margin_s: int | None = None,
) -> tuple[float, float]:
    """Residuals of the two intermediate equations on calE and calH:
    (D + M^epsvec) calE + (1/c) dt calH + rho/sqrt(eps) and
    (D + M^muvec) calH - (1/c) dt calE - sqrt(mu) j."""
    st = state.st
    h = st.space.spacing
    ht = st.dt
    ev = np.real(medium.eps.values)[None, ...]
    mv = np.real(medium.mu.values)[None, ...]
    cv = np.real(medium.c.values)[None, ...]

    qE = np.zeros(state.calE.shape[:-1] + (4,), dtype=complex)
    qE[..., 1:] = state.calE
    qH = np.zeros_like(qE)
    qH[..., 1:] = state.calH

    r1 = dirac(qE, h, axes=(1, 2, 3)) + _mul_components(
        qE, np.broadcast_to(medium.epsvec.values[None], qE.shape)
    )
    r1[..., 1:] += diff(state.calH, 0, ht) / cv[..., None]
    r1[..., 0] += state.rho / np.sqrt(ev)

    r2 = dirac(qH, h, axes=(1, 2, 3)) + _mul_components(
        qH, np.broadcast_to(medium.muvec.values[None], qH.shape)
    )
    r2[..., 1:] -= diff(state.calE, 0, ht) / cv[..., None]
    r2[..., 1:] -= np.sqrt(mv)[..., None] * state.j

    mt = max(state.margin_t + 1, margin_t or 0)
    ms = max(state.margin_s + 1, medium.epsvec.margin, margin_s or 0)
    return (
        max_abs_interior(r1, ms, spatial_axes=(1, 2, 3), extra={0: mt}),
        max_abs_interior(r2, ms, spatial_axes=(1, 2, 3), extra={0: mt}),
    )


def static_residuals(
    state: EMState,
    medium: MediumFields,
    margin_s: int | None = None,
) -> tuple[float, float]:
    """Residuals of the two decoupled static equations (time slice 0):
    (D + M^epsvec) calE + rho/sqrt(eps) and (D + M^muvec) calH - sqrt(mu) j."""
    if state.st.nt > 1:
        spread = float(np.max(np.abs(state.E - state.E[:1]))) + float(
            np.max(np.abs(state.H - state.H[:1]))
        )
        if spread > 1e-12:
            warnings.warn("state is not time-independent; using slice 0", stacklevel=2)
    h = state.st.space.spacing
    ev = np.real(medium.eps.values)
    mv = np.real(medium.mu.values)

    qE = np.zeros(medium.lattice.dims + (4,), dtype=complex)
    qE[..., 1:] = state.calE[0]
    qH = np.zeros_like(qE)
    qH[..., 1:] = state.calH[0]

    r1 = dirac(qE, h) + _mul_components(qE, medium.epsvec.values)
    r1[..., 0] += state.rho[0] / np.sqrt(ev)
    r2 = dirac(qH, h) + _mul_components(qH, medium.muvec.values)
    r2[..., 1:] -= np.sqrt(mv)[..., None] * state.j[0]

    ms = max(state.margin_s + 1, medium.epsvec.margin, margin_s or 0)
    return max_abs_interior(r1, ms), max_abs_interior(r2, ms)
