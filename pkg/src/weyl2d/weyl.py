"""Weyl structures on a conformal chart and their Einstein-Weyl residuals.

A Weyl derivative is stored by its flat-chart form ``D = D^flat + omega`` with
``omega = f dzeta + conj(f) dzetabar`` together with an optional gauge
``lambda``: the gauge metric is ``exp(2 lambda) |dzeta|^2`` and the connection
form relative to it is ``omega - d lambda``.  Densities of weight -2 (scalar
curvature, Faraday form divided by area) are reported in the gauge, i.e.
multiplied by ``exp(-2 lambda)``.

Conventions: ``s = -8 Re(df/dzetabar)`` and ``F = -4 Im(df/dzetabar) dx^dy``
in the flat gauge, with ``dx^dy`` positively oriented.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .cplx import (
    DEFAULT_SCHEME,
    ComplexField,
    FDScheme,
    HoloFn,
    Rational,
    as_point,
    d_zeta,
    partials_fd,
    wirtinger_fd,
)
from .errors import PoleError, SingularPointError
from .mobius import MobiusMap, gauge_transform_h

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class WeylStructure:
    connection: ComplexField
    lam: ComplexField | None = None
    h: HoloFn | None = None

    @property
    def flat(self) -> bool:
        return self.lam is None

    def lam_at(self, z) -> float:
        return 0.0 if self.lam is None else self.lam(z).real

    def f(self, scheme: FDScheme = DEFAULT_SCHEME) -> ComplexField:
        """Connection coefficient relative to the gauge metric."""
        if self.lam is None:
            return self.connection
        conn, lam = self.connection, self.lam
        return ComplexField(
            lambda z: conn(z) - d_zeta(lam, z, scheme),
            domain=lambda z: conn.contains(z) and lam.contains(z),
            feature_length=conn.feature_length,
        )

    def omega(self, z, scheme: FDScheme = DEFAULT_SCHEME) -> tuple[float, float]:
        """Real components (omega_x, omega_y) of the gauge connection form."""
        fz = self.f(scheme)(z)
        return 2 * fz.real, -2 * fz.imag


@dataclass(frozen=True)
class CurvatureSample:
    K: complex
    s: float
    faraday: float
    faraday_gauge: float


@dataclass(frozen=True)
class EWResidualSample:
    linear: complex
    full: complex


@dataclass(frozen=True)
class MobiusStructureField:
    """A trace-free symmetric tensor field T = 2 Re(tau dzeta^2), stored as tau."""

    r0: ComplexField

    @staticmethod
    def to_tensor(tau: complex) -> tuple[float, float, float]:
        return 2 * tau.real, -2 * tau.imag, -2 * tau.real

    @staticmethod
    def from_tensor(txx: float, txy: float, tyy: float) -> complex:
        return complex(0.25 * (txx - tyy), -txy / 2)


def _require_flat(W: WeylStructure):
    if not W.flat:
        raise ValueError("operation requires the flat gauge (lambda = 0)")


# --------------------------------------------------------------------------
# Construction


def theorem1_structure(h: HoloFn, scheme: FDScheme = DEFAULT_SCHEME) -> WeylStructure:
    """Flat-gauge Weyl structure with f = 1 / (conj(h) - zeta)."""
    hp = h.derivative()
    delta = scheme.exclusion
    poles = list(h.poles()) if isinstance(h, Rational) else []

    def feature(z):
        try:
            return abs(h(z).conjugate() - z) / (1 + abs(hp(z)))
        except PoleError:
            return 0.0

    def domain(z):
        if not h.contains(z) or any(abs(z - p) < delta for p in poles):
            return False
        return feature(z) >= delta

    def fn(z):
        return 1 / (h(z).conjugate() - z)

    field = ComplexField(fn, domain, feature_length=feature, error=SingularPointError)
    return WeylStructure(field, None, h)


def nonsolution_structure(name: str) -> WeylStructure:
    """Named test connections that are not Einstein-Weyl (flat gauge)."""
    fields = {
        "conj": lambda z: z.conjugate(),
        "zeta": lambda z: complex(z),
    }
    if name not in fields:
        raise ValueError(f"unknown f-override {name!r}; choose from {sorted(fields)}")
    return WeylStructure(ComplexField(fields[name]))


def from_gauge(lam: ComplexField, f_gauge: ComplexField, scheme: FDScheme = DEFAULT_SCHEME) -> WeylStructure:
    """Weyl structure given by a gauge ``lam`` and connection coefficient relative to it."""
    conn = ComplexField(
        lambda z: f_gauge(z) + d_zeta(lam, z, scheme),
        domain=lambda z: f_gauge.contains(z) and lam.contains(z),
    )
    return WeylStructure(conn, lam)


def conformal_rescale(W: WeylStructure, lam_new: ComplexField) -> WeylStructure:
    """Change gauge metric to exp(2 lam_new) times the current one; D is unchanged.

    Supplying ``lam_new.dz`` avoids one level of nested finite differences in
    the gauge-side curvature.
    """
    if W.lam is None:
        return WeylStructure(W.connection, lam_new, W.h)
    old = W.lam

    def dz(z):
        return old.dz(z) + lam_new.dz(z)

    lam = ComplexField(
        lambda z: old(z).real + lam_new(z).real,
        domain=lambda z: old.contains(z) and lam_new.contains(z),
        dz=dz if old.dz is not None and lam_new.dz is not None else None,
    )
    return WeylStructure(W.connection, lam, W.h)


# --------------------------------------------------------------------------
# Curvature


def curvature_K(h: HoloFn, z) -> complex:
    """h'(z) / (h(z) - conj(z))^2."""
    z = as_point(z)
    gap = h(z) - z.conjugate()
    if abs(gap) < SINGULAR_TOL:
        raise SingularPointError(f"h(z) = conj(z) at {z!r}")
    return h.derivative()(z) / gap**2


def _dbar(W: WeylStructure, z, scheme: FDScheme) -> complex:
    """d f / d zetabar of the flat-chart connection coefficient."""
    if W.h is not None:
        if not W.connection.contains(z):
            raise SingularPointError(f"point {z!r} excluded from the domain")
        return -curvature_K(W.h, z).conjugate()
    return wirtinger_fd(W.connection, z, scheme)[1]


def _curvature_field(W: WeylStructure, scheme: FDScheme) -> ComplexField:
    """Flat-gauge s + i F0 packed in one field (both parts are real)."""

    def fn(z):
        d = _dbar(W, z, scheme)
        return complex(-8 * d.real, -4 * d.imag)

    return ComplexField(fn, W.connection.domain, feature_length=W.connection.feature_length)


def _outer(W: WeylStructure, scheme: FDScheme) -> FDScheme:
    # Curvature fields of structures without provenance are FD estimates already.
    return scheme if W.h is not None else scheme.coarsened()


def curvature_flat_gauge(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> CurvatureSample:
    _require_flat(W)
    z = as_point(z)
    d = _dbar(W, z, scheme)
    K = curvature_K(W.h, z) if W.h is not None else -d.conjugate()
    s, far = -8 * d.real, -4 * d.imag
    return CurvatureSample(K, s, far, far)


def gauge_curvature(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> CurvatureSample:
    """Curvature computed directly from the gauge data (lambda, f relative to the gauge).

    Uses s = exp(-2 lambda) (-2 Laplacian(lambda) - 8 Re(df'/dzetabar)), independent
    of the flat-chart route taken by :func:`ew_residual_full`.
    """
    z = as_point(z)
    outer = scheme.coarsened()
    fg = W.f(scheme)
    dprime = wirtinger_fd(fg, z, outer)[1]
    lap = 0.0
    if W.lam is not None:
        lam = W.lam
        grad = ComplexField(lambda w: d_zeta(lam, w, scheme), lam.domain)
        lap = 4 * wirtinger_fd(grad, z, outer)[1].real
    scale = math.exp(-2 * W.lam_at(z))
    far = -4 * dprime.imag
    s = scale * (-2 * lap - 8 * dprime.real)
    if W.h is not None:
        K = curvature_K(W.h, z)
    else:
        K = -wirtinger_fd(W.connection, z, scheme)[1].conjugate()
    return CurvatureSample(K, s, far, scale * far)


# --------------------------------------------------------------------------
# Einstein-Weyl residuals


def ew_residual_linear(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """df/dzeta - f^2, with the derivative taken by finite differences."""
    _require_flat(W)
    z = as_point(z)
    dz, _ = wirtinger_fd(W.connection, z, scheme)
    return dz - W.connection(z) ** 2


def ew_residual_full(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """dzeta-component of D scal - 2 div F, reported in W's gauge."""
    z = as_point(z)
    field = _curvature_field(W, scheme)
    px, py = partials_fd(field, z, _outer(W, scheme))
    v = field(z)
    s, far = v.real, v.imag
    f = W.connection(z)
    ds_dz = 0.5 * (px.real - 1j * py.real)
    dF_dz = 0.5 * (px.imag - 1j * py.imag)
    E = ds_dz - 2 * s * f + 2j * dF_dz - 4j * far * f
    return math.exp(-2 * W.lam_at(z)) * E


def ew_residual_gauge(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """Same residual as :func:`ew_residual_full`, assembled from gauge quantities only."""
    z = as_point(z)
    outer = scheme.coarsened().coarsened()

    def fn(w):
        c = gauge_curvature(W, w, scheme)
        return complex(c.s, c.faraday_gauge)

    field = ComplexField(fn, W.connection.domain, feature_length=W.connection.feature_length)
    px, py = partials_fd(field, z, outer)
    v = field(z)
    s, far = v.real, v.imag
    f = W.f(scheme)(z)
    ds_dz = 0.5 * (px.real - 1j * py.real)
    dF_dz = 0.5 * (px.imag - 1j * py.imag)
    return ds_dz - 2 * s * f + 2j * dF_dz - 4j * far * f


def ew_sample(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> EWResidualSample:
    return EWResidualSample(ew_residual_linear(W, z, scheme), ew_residual_full(W, z, scheme))


def full_residual_closed_form(h: HoloFn, z) -> complex:
    """8 d(conj K)/dzeta - 16 f conj K for the structure built from h, using df/dzeta = f^2."""
    z = as_point(z)
    f = 1 / (h(z).conjugate() - z)
    hp = h.derivative()(z)
    Kbar = hp.conjugate() * f * f
    dKbar = hp.conjugate() * 2 * f * f**2
    return 8 * dKbar - 16 * f * Kbar


# --------------------------------------------------------------------------
# Chart changes


def chart_change_covariance(h: HoloFn, phi: MobiusMap, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """f~(z) - [f(phi(z)) phi'(z) + phi''(z) / (2 phi'(z))], zero for every Mobius phi.

    ``f~`` belongs to conj(phi)^-1 o h o phi; the correction term is
    d log|phi'| / dz, coming from the rescaling |phi'|^2 |dz|^2 -> |dz|^2.
    """
    z = as_point(z)
    ht = gauge_transform_h(h, phi)
    ft = theorem1_structure(ht, scheme).connection(z)
    w = phi(z)
    f = theorem1_structure(h, scheme).connection(w)
    return ft - (f * phi.derivative(z) + 0.5 * phi.second_derivative(z) / phi.derivative(z))


# --------------------------------------------------------------------------
# Mobius structures and Cotton-York


def mobius_structure_r0(W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """dzeta^2 component of H - sym0 D^2 for H the flat trace-free Hessian."""
    return -ew_residual_linear(W, z, scheme)


def r0_field(W: WeylStructure, scheme: FDScheme = DEFAULT_SCHEME, tau_H=None) -> MobiusStructureField:
    """r0 of W relative to the Mobius structure H = flat Hessian + 2 Re(tau_H dzeta^2).

    ``tau_H`` defaults to zero, the flat Mobius structure.
    """
    conn = W.connection

    def fn(z):
        base = 0j if tau_H is None else complex(tau_H(z))
        return base + mobius_structure_r0(W, z, scheme)

    return MobiusStructureField(ComplexField(fn, conn.domain, feature_length=conn.feature_length))


def weyl_christoffel(omega: tuple[float, float]):
    """Gamma[k][i][j] for D = D^flat + omega in an orthonormal flat chart."""
    delta = ((1.0, 0.0), (0.0, 1.0))
    return [
        [
            [delta[k][i] * omega[j] + delta[k][j] * omega[i] - delta[i][j] * omega[k] for j in range(2)]
            for i in range(2)
        ]
        for k in range(2)
    ]


def cotton_york(r0: MobiusStructureField, W: WeylStructure, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """dzeta-component of div^D(r0 - s/4 id + F/2), index by index with Weyl Christoffels."""
    _require_flat(W)
    z = as_point(z)
    curv = _curvature_field(W, scheme)

    def tensor(w):
        tau = r0.r0(w)
        c = curv(w)
        s, far = c.real, c.imag
        txx, txy, tyy = MobiusStructureField.to_tensor(tau)
        return ((txx - 0.25 * s, txy + 0.5 * far), (txy - 0.5 * far, tyy - 0.25 * s))

    rows = [
        ComplexField(lambda w, j=j: complex(*tensor(w)[j]), W.connection.domain,
                     feature_length=W.connection.feature_length)
        for j in range(2)
    ]
    outer = scheme.coarsened()
    # dT[i][j][k] = d_i T_jk
    dT = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
    for j in range(2):
        px, py = partials_fd(rows[j], z, outer)
        for i, p in enumerate((px, py)):
            dT[i][j][0], dT[i][j][1] = p.real, p.imag
    T = tensor(z)
    fz = W.connection(z)
    omega = (2 * fz.real, -2 * fz.imag)
    G = weyl_christoffel(omega)
    C = [0.0, 0.0]
    for k in range(2):
        acc = 0.0
        for j in range(2):
            acc += dT[j][j][k]
            for m in range(2):
                acc -= G[m][j][j] * T[m][k]
                acc -= G[m][j][k] * T[j][m]
        C[k] = acc
    return 0.5 * (C[0] - 1j * C[1])
