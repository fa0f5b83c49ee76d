"""Grid realizations of the Dirac operator D and the identities built on it.

D acts on quaternion fields as Df = -div(fv) + grad(f0) + rot(fv); here it
is discretized with second-order central differences only, so every
application widens the invalid boundary margin by one node.  On top of D
this module verifies, on manufactured grids, the operator identities

    Lap + alpha^2            = -(D + alpha)(D - alpha)
    -Lap + nu                = (D + M^w)(D - M^w)         w = Df/f, nu = Lap f/f
    div p grad + q           = -sqrt(p) (D + M^w)(D - M^w) sqrt(p) .
                               with f = sqrt(p) u0

plus the first-order reduction F = f D(f^-1 g), its quadrature inverse, and
the quaternionic Vekua equation (D - (Df/f) C_H) W = 0 with its scalar- and
vector-part consequences.  Every residual routine returns the maximum
componentwise modulus over the valid interior, which is the quantity the
refinement-ratio checks watch.

M^p denotes right multiplication by p (pointwise, p is never differentiated)
and ^pM left multiplication; for purely vectorial p, q the exact identity
<p, q> = -(^pM + M^p) q / 2 holds nodewise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import Biquaternion, _mul_components
from .errors import BaseOutOfGrid, LatticeMismatch, VanishingF
from .grids import (
    Lattice,
    QuaternionGrid,
    ScalarGrid,
    dirac,
    div,
    grad,
    laplacian,
    max_abs_interior,
    rot,
)

# Division by f appears throughout; below this the slot is rejected.
VANISHING_F_TOL = 1e-8


def embed_scalar(g: ScalarGrid) -> QuaternionGrid:
    """Scalar grid as a quaternion field with zero vector part."""
    return QuaternionGrid.from_scalar_grid(g)


def apply_D(field: QuaternionGrid) -> QuaternionGrid:
    """Central-difference Dirac operator; margin grows by one."""
    out = dirac(field.values, field.lattice.spacing)
    return field.with_values(out, field.margin + 1)


def apply_D_shifted(field: QuaternionGrid, alpha: complex) -> QuaternionGrid:
    """(D + alpha) f for a complex constant alpha."""
    shifted = apply_D(field)
    return shifted.with_values(shifted.values + alpha * field.values)


def _multiplier(p) -> tuple[np.ndarray, int, Lattice | None]:
    if isinstance(p, QuaternionGrid):
        return p.values, p.margin, p.lattice
    if isinstance(p, Biquaternion):
        return p.components, 0, None
    raise TypeError("multiplier must be a QuaternionGrid or a Biquaternion")


def right_mult(p) -> Callable[[QuaternionGrid], QuaternionGrid]:
    """The operator M^p: f -> f*p, pointwise right multiplication."""
    pv, pm, plat = _multiplier(p)

    def apply(field: QuaternionGrid) -> QuaternionGrid:
        if plat is not None and plat != field.lattice:
            raise LatticeMismatch("multiplier grid lives on a different lattice")
        return field.with_values(_mul_components(field.values, pv), max(field.margin, pm))

    return apply


def left_mult(p) -> Callable[[QuaternionGrid], QuaternionGrid]:
    """The operator ^pM: f -> p*f, pointwise left multiplication."""
    pv, pm, plat = _multiplier(p)

    def apply(field: QuaternionGrid) -> QuaternionGrid:
        if plat is not None and plat != field.lattice:
            raise LatticeMismatch("multiplier grid lives on a different lattice")
        return field.with_values(_mul_components(pv, field.values), max(field.margin, pm))

    return apply


@dataclass(frozen=True)
class PotentialSlot:
    """A nonvanishing particular solution f with its derived potential nu = Lap f / f.

    nu is computed on the grid, not analytically, so both sides of the
    factorization identities share the same discretization error.  For the
    conductivity form, p, q and u0 are kept and f = sqrt(p) * u0.
    """

    f: ScalarGrid
    nu: ScalarGrid
    p: ScalarGrid | None = None
    q: ScalarGrid | None = None
    u0: ScalarGrid | None = None

    @classmethod
    def from_particular_solution(cls, f: ScalarGrid) -> "PotentialSlot":
        _check_nonvanishing(f.values, "f")
        nu_vals = laplacian(f.values, f.lattice.spacing) / f.values
        return cls(f=f, nu=f.with_values(nu_vals, f.margin + 1))

    @classmethod
    def from_conductivity(cls, p: ScalarGrid, q: ScalarGrid, u0: ScalarGrid) -> "PotentialSlot":
        if p.lattice != q.lattice or p.lattice != u0.lattice:
            raise LatticeMismatch("p, q, u0 must share one lattice")
        _check_nonvanishing(p.values, "p")
        _check_nonvanishing(u0.values, "u0")
        f_vals = np.sqrt(p.values.astype(complex)) * u0.values
        f = ScalarGrid(p.lattice, f_vals, max(p.margin, u0.margin))
        _check_nonvanishing(f.values, "f = sqrt(p)*u0")
        nu_vals = laplacian(f.values, f.lattice.spacing) / f.values
        return cls(f=f, nu=f.with_values(nu_vals, f.margin + 1), p=p, q=q, u0=u0)

    def df_over_f(self) -> QuaternionGrid:
        """Df/f as a purely vectorial quaternion grid (margin one)."""
        g = grad(self.f.values, self.f.lattice.spacing) / self.f.values[..., None]
        return QuaternionGrid.from_vector_values(self.f.lattice, g, self.f.margin + 1)


def _check_nonvanishing(values: np.ndarray, name: str) -> None:
    m = float(np.min(np.abs(values)))
    if m < VANISHING_F_TOL:
        raise VanishingF(f"min |{name}| = {m:.3e} below {VANISHING_F_TOL}")


def helmholtz_factorization_residual(alpha: complex, g: ScalarGrid, margin: int | None = None) -> float:
    """Max interior norm of (Lap + alpha^2) g + (D + alpha)(D - alpha) g.

    ``margin`` may widen the excluded boundary band beyond the required
    minimum so refinement levels can be compared over one physical region.
    """
    h = g.lattice.spacing
    qg = embed_scalar(g)
    composed = apply_D_shifted(apply_D_shifted(qg, -alpha), alpha)
    res = composed.values.copy()
    res[..., 0] += laplacian(g.values, h) + alpha * alpha * g.values
    need = max(composed.margin, g.margin + 1)
    return max_abs_interior(res, need if margin is None else max(margin, need))


def schrodinger_factorization_residual(slot: PotentialSlot, g: ScalarGrid, margin: int | None = None) -> float:
    """Max interior norm of (D + M^w)(D - M^w) g - (-Lap + nu) g, w = Df/f."""
    if g.lattice != slot.f.lattice:
        raise LatticeMismatch("g must live on the slot's lattice")
    h = g.lattice.spacing
    w = slot.df_over_f()
    mw = right_mult(w)
    inner = apply_D(embed_scalar(g)) - mw(embed_scalar(g))
    outer = apply_D(inner) + mw(inner)
    res = outer.values.copy()
    res[..., 0] -= -laplacian(g.values, h) + slot.nu.values * g.values
    need = max(outer.margin, slot.nu.margin, g.margin + 1)
    return max_abs_interior(res, need if margin is None else max(margin, need))


def conductivity_factorization_residual(slot: PotentialSlot, phi: ScalarGrid, margin: int | None = None) -> float:
    """Max interior norm of (div p grad + q) phi + sqrt(p) (D + M^w)(D - M^w) sqrt(p) phi."""
    if slot.p is None or slot.q is None or slot.u0 is None:
        raise ValueError("slot was not built from conductivity data (p, q, u0)")
    if phi.lattice != slot.f.lattice:
        raise LatticeMismatch("phi must live on the slot's lattice")
    h = phi.lattice.spacing
    sp = np.sqrt(slot.p.values.astype(complex))
    lhs = div(slot.p.values[..., None] * grad(phi.values, h), h) + slot.q.values * phi.values

    w = slot.df_over_f()
    mw = right_mult(w)
    scaled = ScalarGrid(phi.lattice, sp * phi.values, phi.margin)
    inner = apply_D(embed_scalar(scaled)) - mw(embed_scalar(scaled))
    outer = apply_D(inner) + mw(inner)
    rhs = -sp[..., None] * outer.values

    res = -rhs
    res[..., 0] += lhs
    need = max(outer.margin, phi.margin + 2)
    return max_abs_interior(res, need if margin is None else max(margin, need))


def darboux_transform(slot: PotentialSlot, g: ScalarGrid) -> QuaternionGrid:
    """F = f D(f^-1 g); purely vectorial, solves (D + M^{Df/f}) F = 0 when g does."""
    if g.lattice != slot.f.lattice:
        raise LatticeMismatch("g must live on the slot's lattice")
    ratio = ScalarGrid(g.lattice, g.values / slot.f.values, max(g.margin, slot.f.margin))
    return apply_D(embed_scalar(ratio)).scale(slot.f.values)


def dirac_residual(slot: PotentialSlot, F: QuaternionGrid, margin: int | None = None) -> float:
    """Max interior norm of (D + M^{Df/f}) F."""
    out = apply_D(F) + right_mult(slot.df_over_f())(F)
    return max_abs_interior(out.values, out.margin if margin is None else max(margin, out.margin))


def _cumulative_simpson_from(f: np.ndarray, base: int, h: float, axis: int = 0) -> np.ndarray:
    """Cumulative integral from node ``base`` along ``axis``.

    Composite Simpson for even offsets; odd offsets add one subinterval
    integrated with the local three-point parabola, keeping fourth-order
    accuracy everywhere (exact through quadratics).
    """
    f = np.moveaxis(np.asarray(f, dtype=complex), axis, 0)
    n = f.shape[0]
    out = np.empty_like(f)
    out[base] = 0.0
    for i in range(base + 1, n):
        if (i - base) % 2 == 0:
            out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i])
        elif i + 1 < n:
            out[i] = out[i - 1] + (h / 12.0) * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
        else:
            out[i] = out[i - 1] + (h / 12.0) * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i])
    for i in range(base - 1, -1, -1):
        if (base - i) % 2 == 0:
            out[i] = out[i + 2] - (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2])
        elif i + 2 < n:
            out[i] = out[i + 1] - (h / 12.0) * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2])
        else:
            out[i] = out[i + 1] - (h / 12.0) * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1])
    return np.moveaxis(out, 0, axis)


def antiderivative(G: QuaternionGrid, base: tuple[int, int, int]) -> ScalarGrid:
    """Path antiderivative of a purely vectorial field.

    Integrates G1 along the x-leg from the base node, then G2 along y, then
    G3 along z (this leg order is fixed; the free constant is taken as 0):

        A[G](x,y,z) = int G1(xi,y0,z0) dxi + int G2(x,zeta,z0) dzeta
                      + int G3(x,y,eta) deta .

    On gradient fields this inverts grad up to the value at the base node.
    Composite-Simpson quadrature; output is defined on the valid interior
    of G and NaN on its margin.
    """
    m = G.margin
    dims = G.lattice.dims
    bi, bj, bk = base
    if not all(m <= b < n - m for b, n in zip(base, dims)):
        raise BaseOutOfGrid(f"base {base} outside valid interior (margin {m}, dims {dims})")

    box = tuple(slice(m, n - m) for n in dims)
    vals = G.values[box]
    scale = max(1.0, float(np.max(np.abs(vals[..., 1:]))))
    if float(np.max(np.abs(vals[..., 0]))) > 1e-12 * scale:
        raise ValueError("antiderivative needs a purely vectorial field")
    h = G.lattice.spacing
    b = (bi - m, bj - m, bk - m)

    leg_x = _cumulative_simpson_from(vals[:, b[1], b[2], 1], b[0], h)
    leg_y = _cumulative_simpson_from(vals[:, :, b[2], 2], b[1], h, axis=1)
    leg_z = _cumulative_simpson_from(vals[..., 3], b[2], h, axis=2)
    acc = leg_x[:, None, None] + leg_y[:, :, None] + leg_z

    out = np.full(dims, np.nan, dtype=complex)
    out[box] = acc
    return ScalarGrid(G.lattice, out, m)


def vekua_residual(slot: PotentialSlot, W: QuaternionGrid, margin: int | None = None) -> float:
    """Max interior norm of D W - (Df/f) C_H(W)."""
    if W.lattice != slot.f.lattice:
        raise LatticeMismatch("W must live on the slot's lattice")
    dw = apply_D(W)
    w = slot.df_over_f()
    chw = W.values.copy()
    chw[..., 1:] = -chw[..., 1:]
    res = dw.values - _mul_components(w.values, chw)
    need = max(dw.margin, w.margin)
    return max_abs_interior(res, need if margin is None else max(margin, need))


def vekua_consequences(slot: PotentialSlot, W: QuaternionGrid, margin: int | None = None) -> tuple[float, float, float]:
    """Residuals implied for a solution W = W0 + Wv of the Vekua equation.

    Returns the max interior norms of (-Lap + nu) W0,
    div(f^2 grad(W0/f)), and rot(f^-2 rot(f Wv)).
    """
    if W.lattice != slot.f.lattice:
        raise LatticeMismatch("W must live on the slot's lattice")
    h = W.lattice.spacing
    f = slot.f.values
    w0 = W.values[..., 0]
    wv = W.values[..., 1:]

    def _m(need: int) -> int:
        return need if margin is None else max(margin, need)

    r_schr = max_abs_interior(
        -laplacian(w0, h) + slot.nu.values * w0,
        _m(max(W.margin + 1, slot.nu.margin)),
    )
    r_sc = max_abs_interior(
        div((f * f)[..., None] * grad(w0 / f, h), h),
        _m(W.margin + 2),
    )
    r_vec = max_abs_interior(
        rot((f ** -2.0)[..., None] * rot(f[..., None] * wv, h), h),
        _m(W.margin + 2),
    )
    return r_schr, r_sc, r_vec


def generating_quartet(slot: PotentialSlot) -> list[QuaternionGrid]:
    """The four exact solutions f, i1/f, i2/f, i3/f of the Vekua equation."""
    lat = slot.f.lattice
    f = slot.f.values
    quartet = [embed_scalar(slot.f)]
    for k in (1, 2, 3):
        vals = np.zeros(lat.dims + (4,), dtype=complex)
        vals[..., k] = 1.0 / f
        quartet.append(QuaternionGrid(lat, vals, slot.f.margin))
    return quartet


def coefficients_to_vekua(slot: PotentialSlot, w: QuaternionGrid) -> QuaternionGrid:
    """Expand a coefficient field w = phi0 + sum phi_k i_k over the quartet:
    W = phi0 f + sum phi_k i_k / f."""
    if w.lattice != slot.f.lattice:
        raise LatticeMismatch("w must live on the slot's lattice")
    f = slot.f.values
    vals = np.empty_like(w.values)
    vals[..., 0] = w.values[..., 0] * f
    vals[..., 1:] = w.values[..., 1:] / f[..., None]
    return QuaternionGrid(w.lattice, vals, max(w.margin, slot.f.margin))


def vekua_coefficient_identity_residual(
    slot: PotentialSlot, w: QuaternionGrid, margin: int | None = None
) -> float:
    """Residual of the coefficient form of the Vekua equation.

    Writing W = phi0 f + sum phi_k i_k / f with w = phi0 + sum phi_k i_k,
    the Vekua residual of W equals, nodewise,

        ((1 + f^2)/(2 f)) ( D w - ((1 - f^2)/(1 + f^2)) D C_H(w) ) ,

    so w solves D w = ((1 - f^2)/(1 + f^2)) D C_H(w) exactly when W solves
    the Vekua equation.  Established for real positive f only: a complex f
    can make 1 + f^2 vanish, which the transformation does not cover.
    Returns the max interior mismatch between the two sides.
    """
    if w.lattice != slot.f.lattice:
        raise LatticeMismatch("w must live on the slot's lattice")
    f = slot.f.values
    if np.max(np.abs(np.imag(f))) > 0.0 or np.min(np.real(f)) <= 0.0:
        raise ValueError("coefficient identity requires real positive f")
    fr = np.real(f)

    wbar = w.values.copy()
    wbar[..., 1:] = -wbar[..., 1:]
    Dw = apply_D(w)
    Dwbar = apply_D(w.with_values(wbar))
    ratio = ((1.0 - fr * fr) / (1.0 + fr * fr))[..., None]
    lhs = ((1.0 + fr * fr) / (2.0 * fr))[..., None] * (Dw.values - ratio * Dwbar.values)

    W = coefficients_to_vekua(slot, w)
    dfw = slot.df_over_f()
    chW = W.values.copy()
    chW[..., 1:] = -chW[..., 1:]
    rhs = apply_D(W).values - _mul_components(dfw.values, chW)

    need = max(Dw.margin, W.margin + 1, dfw.margin)
    return max_abs_interior(lhs - rhs, need if margin is None else max(margin, need))
