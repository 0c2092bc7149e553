"""The compact S^2 and T^2 families with parameters (A, B, C).

In the (v, t) chart the structure is ``g = dv^2/P(v) + v^2 dt^2`` and
``omega = A v^2 dt`` with ``P(v) = -A^2 v^4 + B v^2 + C``.  The substitution
``v^2 = 1/u`` gives the (u, t) chart with ``Q(u) = -A^2 + B u + C u^2``; the
sphere case (C > 0) is further parametrised by a radius r and the torus case
(C < 0) by an angle theta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cplx import DEFAULT_SCHEME, STEP_PER_FEATURE, ComplexField, FDScheme, HoloFn, polynomial, rational, richardson_central
from .errors import BorderlineError, ChartBoundaryError, DegenerateError
from .weyl import WeylStructure, curvature_flat_gauge, ew_residual_full, from_gauge, theorem1_structure

THETA_ODE_TOL = 1e-12
R_ODE_TOL = 1e-10
CROSS_CHART_TOL = 1e-4
THETA_CHART_TOL = 1e-5


@dataclass(frozen=True)
class CompactFamily:
    A: float
    B: float
    C: float

    def __post_init__(self):
        for name in "ABC":
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def radicand(self) -> float:
        return self.B**2 + 4 * self.A**2 * self.C

    @property
    def S(self) -> float | None:
        return math.sqrt(self.radicand) if self.radicand > 0 else None

    def positivity_interval(self) -> tuple[float, float | None] | None:
        """Range of |v| on which P(v) > 0 (upper end ``None`` when unbounded)."""
        A2, B, C = self.A**2, self.B, self.C
        if A2 == 0:
            if B == 0:
                return (0.0, None) if C > 0 else None
            w0 = -C / B
            if B > 0:
                return (math.sqrt(max(w0, 0.0)), None)
            return (0.0, math.sqrt(w0)) if w0 > 0 else None
        if self.radicand <= 0:
            return None
        r = math.sqrt(self.radicand)
        w_lo, w_hi = (B - r) / (2 * A2), (B + r) / (2 * A2)
        if w_hi <= 0:
            return None
        return (math.sqrt(max(w_lo, 0.0)), math.sqrt(w_hi))

    @property
    def case(self) -> str:
        if self.positivity_interval() is None:
            return "borderline"
        if self.C > 0:
            return "sphere"
        if self.C < 0 and self.radicand > 0:
            return "torus"
        return "borderline"

    def require(self, *cases: str) -> str:
        case = self.case
        if case == "borderline":
            raise BorderlineError(
                f"(A, B, C) = ({self.A:g}, {self.B:g}, {self.C:g}) is borderline: sphere needs C > 0, "
                "torus needs C < 0 and B^2 + 4A^2C > 0, and P(v) must be positive somewhere"
            )
        if cases and case not in cases:
            raise ValueError(f"operation needs a {' or '.join(cases)} family, got {case}")
        return case

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C}

    @classmethod
    def from_json(cls, obj: dict) -> "CompactFamily":
        return cls(obj["A"], obj["B"], obj["C"])


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    a: float
    b: float

    def __post_init__(self):
        if self.chart not in ("vt", "ut", "rt", "thetat"):
            raise ValueError(f"unknown chart {self.chart!r}")

    def validate(self, fam: CompactFamily) -> "ChartPoint":
        if self.chart == "ut" and not (self.a > 0 and Q_eval(fam, self.a) > 0):
            raise ChartBoundaryError(f"u = {self.a} outside the (u, t) chart")
        if self.chart == "rt" and not self.a > 0:
            raise ChartBoundaryError("r must be positive")
        if self.chart == "vt" and not P_eval(fam, self.a) > 0:
            raise ChartBoundaryError(f"P(v) <= 0 at v = {self.a}")
        if self.chart == "thetat" and not _theta_W(fam, self.a) > 0:
            raise ChartBoundaryError(f"theta = {self.a} outside the (t, theta) chart")
        return self


def P_eval(fam: CompactFamily, v: float) -> float:
    return -fam.A**2 * v**4 + fam.B * v**2 + fam.C


def Q_eval(fam: CompactFamily, u: float) -> float:
    return -fam.A**2 + fam.B * u + fam.C * u**2


def ut_structure(fam: CompactFamily, u: float, t: float = 0.0) -> tuple[float, float, float]:
    """(g_uu, g_tt, omega_t) of g = (du^2/Q(u) + dt^2)/u, omega = A dt / (2u)."""
    q = Q_eval(fam, u)
    if not (u > 0 and q > 0):
        raise ChartBoundaryError(f"(u, t) chart requires u > 0 and Q(u) > 0; u = {u}, Q = {q}")
    return 1 / (u * q), 1 / u, fam.A / (2 * u)


# --------------------------------------------------------------------------
# Sphere: u(r)


def sphere_u_of_r(fam: CompactFamily, r: float) -> float:
    fam.require("sphere")
    if not r > 0:
        raise ChartBoundaryError("r must be positive")
    return (fam.radicand - 2 * fam.B * r**2 + r**4) / (4 * fam.C * r**2)


def sphere_du_dr(fam: CompactFamily, r: float) -> float:
    fam.require("sphere")
    return (2 * r - 2 * fam.radicand / r**3) / (4 * fam.C)


def r_ode_residual(fam: CompactFamily, r: float) -> float:
    """u'(r)^2 - 4 Q(u) / (C r^2), relative to max(1, u'(r)^2)."""
    du = sphere_du_dr(fam, r)
    rhs = 4 * Q_eval(fam, sphere_u_of_r(fam, r)) / (fam.C * r**2)
    return abs(du**2 - rhs) / max(1.0, du**2)


# --------------------------------------------------------------------------
# Torus: u(theta)


def _theta_W(fam: CompactFamily, theta: float) -> float:
    return fam.B + fam.S * math.sin(theta)


def torus_u_of_theta(fam: CompactFamily, theta: float) -> float:
    fam.require("torus")
    return _theta_W(fam, theta) / (-2 * fam.C)


def torus_du_dtheta(fam: CompactFamily, theta: float) -> float:
    fam.require("torus")
    return fam.S * math.cos(theta) / (-2 * fam.C)


def theta_ode_residual(fam: CompactFamily, theta: float) -> float:
    u = torus_u_of_theta(fam, theta)
    return abs(torus_du_dtheta(fam, theta) ** 2 - Q_eval(fam, u) / (-fam.C))


def theta_chart(fam: CompactFamily, theta: float) -> tuple[float, float]:
    """(conformal factor 1/W, omega_t) of g = (dt^2 + dtheta^2)/W, omega = A sqrt(-C) dt / W."""
    fam.require("torus")
    W = _theta_W(fam, theta)
    if not W > 0:
        raise ChartBoundaryError(f"W = {W} <= 0 at theta = {theta}")
    return 1 / W, fam.A * math.sqrt(-fam.C) / W


def theta_chart_structure(fam: CompactFamily, min_W: float = 0.0) -> WeylStructure:
    """The (t, theta) chart as a Weyl structure with zeta = t + i theta."""
    fam.require("torus")
    k = fam.A * math.sqrt(-fam.C)
    S = fam.S

    def W(z):
        return fam.B + S * math.sin(z.imag)

    def domain(z):
        return W(z) > min_W

    def lam_dz(z):
        # lambda = -log(W)/2 depends on theta only
        return 1j * S * math.cos(z.imag) / (4 * W(z))

    lam = ComplexField(lambda z: -0.5 * math.log(W(z)), domain, dz=lam_dz, error=ChartBoundaryError)
    f_gauge = ComplexField(lambda z: 0.5 * k / W(z), domain, error=ChartBoundaryError)
    return from_gauge(lam, f_gauge)


# --------------------------------------------------------------------------
# The function h of a family


def family_to_h(fam: CompactFamily) -> HoloFn:
    case = fam.require()
    if case == "sphere":
        return rational([complex(fam.B, -2 * fam.A * math.sqrt(fam.C))], [0, 1])
    return polynomial([0, 1j * (fam.B + 2 * fam.A * math.sqrt(-fam.C)) / fam.S])


# --------------------------------------------------------------------------
# Cross-chart consistency


def _d(fn, x, h, levels):
    return richardson_central(lambda t: fn(x + t), h, levels).real


def orthogonal_chart_curvature(
    E, G, om_u, om_t, u, t, scheme: FDScheme = DEFAULT_SCHEME, feature: float = math.inf
) -> tuple[float, float]:
    """(scal^D, F/area) of g = E du^2 + G dt^2 with omega = om_u du + om_t dt, by finite differences.

    Gauss curvature by the orthogonal-metric formula; the Weyl scalar is
    scal^g - 2 div^g omega; the Faraday 2-form is d omega divided by the area form.
    ``feature`` is the distance from u to the chart boundary and caps the steps.
    """
    cap = STEP_PER_FEATURE * feature
    inner = min(scheme.step * max(1.0, abs(u)), cap)
    outer = min(scheme.coarsened().step * max(1.0, abs(u)), cap)
    lv = scheme.levels

    def rt(uu, tt):
        return math.sqrt(E(uu, tt) * G(uu, tt))

    def a_u(uu):
        return _d(lambda x: G(x, t), uu, inner, lv) / rt(uu, t)

    def a_t(tt):
        return _d(lambda y: E(u, y), tt, inner, lv) / rt(u, tt)

    gauss = -(_d(a_u, u, outer, lv) + _d(a_t, t, outer, lv)) / (2 * rt(u, t))
    div = (
        _d(lambda x: rt(x, t) * om_u(x, t) / E(x, t), u, inner, lv)
        + _d(lambda y: rt(u, y) * om_t(u, y) / G(u, y), t, inner, lv)
    ) / rt(u, t)
    curl = _d(lambda x: om_t(x, t), u, inner, lv) - _d(lambda y: om_u(u, y), t, inner, lv)
    return 2 * gauss - 2 * div, curl / rt(u, t)


def cross_chart_invariant(fam: CompactFamily, r: float, scheme: FDScheme = DEFAULT_SCHEME) -> tuple[float, float]:
    """(F/s from the structure of h at zeta = r, F/s from the (u, t) chart at u(r)).

    The chart value is oriented like zeta: dx^dy has the sign of u'(r) du^dt.
    """
    fam.require("sphere")
    W = theorem1_structure(family_to_h(fam), scheme)
    c = curvature_flat_gauge(W, complex(r, 0.0), scheme)
    if abs(c.s) < 1e-10:
        raise DegenerateError(f"scalar curvature vanishes at r = {r}")
    rho_h = c.faraday / c.s

    u = sphere_u_of_r(fam, r)
    ut_structure(fam, u)

    def E(uu, tt):
        return ut_structure(fam, uu, tt)[0]

    def G(uu, tt):
        return ut_structure(fam, uu, tt)[1]

    def om_t(uu, tt):
        return ut_structure(fam, uu, tt)[2]

    dq = abs(fam.B + 2 * fam.C * u)
    boundary = min(u, Q_eval(fam, u) / dq if dq > 0 else math.inf)
    s, far = orthogonal_chart_curvature(E, G, lambda uu, tt: 0.0, om_t, u, 0.0, scheme, boundary)
    if abs(s) < 1e-10:
        raise DegenerateError(f"chart scalar curvature vanishes at u = {u}")
    orient = math.copysign(1.0, sphere_du_dr(fam, r))
    return rho_h, orient * far / s


def sphere_radii(fam: CompactFamily, n: int = 24) -> list[float]:
    """Radii on both sides of the turning point r = S^(1/2), away from it."""
    r0 = math.sqrt(fam.S)
    logs = np.concatenate([np.linspace(-1.2, -0.2, n // 2), np.linspace(0.2, 1.2, n - n // 2)])
    return [float(r0 * math.exp(x)) for x in logs]


def family_report(fam: CompactFamily, scheme: FDScheme = DEFAULT_SCHEME) -> dict:
    """Case, S, h and numerical checks of the closed forms for one family."""
    case = fam.require()
    lo, hi = fam.positivity_interval()
    checks: dict = {"theta_ode": None, "r_ode_corrected": None, "cross_chart_max_dev": None}
    passed = True
    if case == "torus":
        thetas = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        dev = max(theta_ode_residual(fam, th) for th in thetas)
        checks["theta_ode"] = dev
        passed &= dev <= THETA_ODE_TOL
        W = theta_chart_structure(fam)
        worst = 0.0
        for th in thetas[::4]:
            if _theta_W(fam, th) > 0.1:
                worst = max(worst, abs(ew_residual_full(W, complex(0.3, th), scheme)))
        checks["theta_chart_full_residual"] = worst
        passed &= worst <= THETA_CHART_TOL
    else:
        radii = sphere_radii(fam, 64)
        dev = max(r_ode_residual(fam, r) for r in radii)
        checks["r_ode_corrected"] = dev
        passed &= dev <= R_ODE_TOL
        worst = 0.0
        for r in sphere_radii(fam, 24):
            try:
                rho_h, rho_c = cross_chart_invariant(fam, r, scheme)
            except DegenerateError:
                continue
            worst = max(worst, abs(rho_h - rho_c))
        checks["cross_chart_max_dev"] = worst
        passed &= worst <= CROSS_CHART_TOL
    return {
        "case": case,
        "S": fam.S,
        "h": family_to_h(fam).to_json(),
        "positivity_interval": [lo, hi],
        "checks": checks,
        "pass": bool(passed),
    }
