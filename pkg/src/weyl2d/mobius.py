"""Mobius and antiholomorphic Mobius maps.

A Mobius map is stored by its matrix ``[[a, b], [c, d]]`` acting by
``z -> (a z + b) / (c z + d)``.  For a Mobius (or constant) ``h`` the
antiholomorphic map ``sigma(z) = conj(h(z))`` is classified through its
holomorphic square ``sigma o sigma``, whose matrix is ``conj(H) @ H``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cplx import (
    POLE_TOL,
    Composed,
    Constant,
    HoloFn,
    Identity,
    Rational,
    as_point,
    rational,
    to_pair,
)
from .errors import DegenerateError, PoleError

DET_TOL = 1e-12
PARABOLIC_TOL = 1e-9
INVOLUTION_TOL = 1e-9
FIXED_TOL = 1e-9


@dataclass(frozen=True)
class MobiusMap:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, as_point(getattr(self, name)))
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if not abs(self.det) > DET_TOL * scale**2:
            raise DegenerateError("Mobius matrix is singular (ad - bc = 0)")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z) -> complex:
        den = self.c * z + self.d
        if abs(den) <= POLE_TOL * (abs(self.c) * abs(z) + abs(self.d)):
            raise PoleError(f"Mobius map has a pole at {z!r}")
        return (self.a * z + self.b) / den

    def derivative(self, z) -> complex:
        return self.det / (self.c * z + self.d) ** 2

    def second_derivative(self, z) -> complex:
        return -2 * self.c * self.det / (self.c * z + self.d) ** 3

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def conjugate(self) -> "MobiusMap":
        """The map with conjugated coefficients, z -> conj(M(conj z))."""
        return MobiusMap(self.a.conjugate(), self.b.conjugate(), self.c.conjugate(), self.d.conjugate())

    def normalized(self) -> "MobiusMap":
        s = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        return MobiusMap(self.a / s, self.b / s, self.c / s, self.d / s)

    def as_holo(self) -> HoloFn:
        return rational((self.b, self.a), (self.d, self.c))

    def to_json(self) -> dict:
        return {k: to_pair(getattr(self, k)) for k in "abcd"}

    @classmethod
    def from_json(cls, obj: dict) -> "MobiusMap":
        return cls(*(complex(float(obj[k][0]), float(obj[k][1])) for k in "abcd"))


def mobius_apply(M: MobiusMap, z) -> complex:
    return M(as_point(z))


def mobius_compose(M: MobiusMap, N: MobiusMap) -> MobiusMap:
    """The map z -> M(N(z))."""
    return MobiusMap.from_matrix(M.matrix @ N.matrix)


def is_identity_mod_scale(M, tol: float = INVOLUTION_TOL) -> bool:
    m = M.matrix if isinstance(M, MobiusMap) else np.asarray(M, dtype=complex)
    s = np.abs(m).max()
    return abs(m[0, 1]) <= tol * s and abs(m[1, 0]) <= tol * s and abs(m[0, 0] - m[1, 1]) <= tol * s


def mobius_of(h: HoloFn) -> MobiusMap | None:
    """Matrix of a Mobius-representable ``h``; ``None`` when ``h`` is constant."""
    if h.is_constant():
        return None
    if isinstance(h, Identity):
        return MobiusMap.identity()
    if isinstance(h, Rational) and h.degree[0] <= 1 and h.degree[1] <= 1:
        num = h.num + (0j,) * (2 - len(h.num))
        den = h.den + (0j,) * (2 - len(h.den))
        return MobiusMap(num[1], num[0], den[1], den[0])
    raise ValueError("classification requires a Mobius h")


# --------------------------------------------------------------------------
# Gauge action on h


def _pad(p, n):
    return np.concatenate([np.asarray(p, dtype=complex), np.zeros(n - len(p), dtype=complex)])


def _rational_after_mobius(h: Rational, phi: MobiusMap):
    """Numerator and denominator coefficients of h(phi(z))."""
    num, den = np.array(h.num), np.array(h.den)
    m = max(len(num), len(den)) - 1
    lin_top = np.array([phi.b, phi.a])
    lin_bot = np.array([phi.d, phi.c])

    def lift(coeffs):
        acc = np.zeros(m + 1, dtype=complex)
        for k, ck in enumerate(coeffs):
            term = np.polynomial.polynomial.polymul(
                np.polynomial.polynomial.polypow(lin_top, k),
                np.polynomial.polynomial.polypow(lin_bot, m - k),
            )
            acc = acc + ck * _pad(term, m + 1)
        return acc

    return lift(num), lift(den)


def gauge_transform_h(h: HoloFn, phi: MobiusMap) -> HoloFn:
    """The function conj(phi)^-1 o h o phi describing the same structure in the z chart."""
    outer = phi.conjugate().inverse()
    if isinstance(h, Constant):
        return Constant(outer(h.value))
    if isinstance(h, Identity):
        h = Rational((0, 1), (1,))
    if isinstance(h, Rational):
        p, q = _rational_after_mobius(h, phi)
        return rational(outer.a * p + outer.b * q, outer.c * p + outer.d * q)
    return Composed(outer.as_holo(), Composed(h, phi.as_holo()))


# --------------------------------------------------------------------------
# Classification of sigma(z) = conj(h(z))


@dataclass(frozen=True)
class AntiMobiusClass:
    label: str
    kind: str
    points: tuple = ()
    infinity: bool = False
    center: complex | None = None
    radius: float | None = None
    direction: complex | None = None
    tau: complex | None = None

    def __post_init__(self):
        allowed = {
            "inversion": {"circle", "line"},
            "identity-like": {"empty"},
            "elliptic": {"empty"},
            "parabolic": {"one point"},
            "hyperbolic": {"two points", "one point", "empty"},
            "loxodromic": {"two points", "one point", "empty"},
            "degenerate": {"one point"},
        }
        if self.kind not in allowed.get(self.label, ()):
            raise ValueError(f"inconsistent classification {self.label!r} / {self.kind!r}")

    def to_json(self) -> dict:
        fixed: dict = {"kind": self.kind}
        if self.kind in ("one point", "two points"):
            pts: list = [to_pair(p) for p in self.points]
            if self.infinity:
                pts.append("infinity")
            fixed["points"] = pts
        elif self.kind == "circle":
            fixed["center"] = to_pair(self.center)
            fixed["radius"] = float(self.radius)
        elif self.kind == "line":
            fixed["point"] = to_pair(self.center)
            fixed["direction"] = to_pair(self.direction)
        tau = None if self.tau is None else to_pair(self.tau)
        return {"label": self.label, "fixed_set": fixed, "tau": tau}


def _sigma_ext(H: MobiusMap, p):
    """conj(h(p)) on the Riemann sphere; ``None`` stands for infinity."""
    if p is None:
        if abs(H.c) <= FIXED_TOL * max(abs(H.a), abs(H.d)):
            return None
        return (H.a / H.c).conjugate()
    den = H.c * p + H.d
    if abs(den) <= FIXED_TOL * (abs(H.c) * abs(p) + abs(H.d)):
        return None
    return ((H.a * p + H.b) / den).conjugate()


def _mobius_fixed_points(N: np.ndarray) -> list:
    a, b, c, d = N[0, 0], N[0, 1], N[1, 0], N[1, 1]
    s = np.abs(N).max()
    if abs(c) <= FIXED_TOL * s:
        pts: list = [None]
        if abs(d - a) > FIXED_TOL * s:
            pts.append(b / (d - a))
        return pts
    disc = cmath.sqrt((d - a) ** 2 + 4 * b * c)
    r1 = ((a - d) + disc) / (2 * c)
    r2 = ((a - d) - disc) / (2 * c)
    if abs(disc) <= math.sqrt(PARABOLIC_TOL) * s:
        return [0.5 * (r1 + r2)]
    return [r1, r2]


def _involution_fixed_set(H: MobiusMap, tau: complex) -> AntiMobiusClass:
    a, b, c, d = H.a, H.b, H.c, H.d
    if abs(c) > INVOLUTION_TOL:
        kappa = c
    else:
        kappa = cmath.exp(0.5j * cmath.phase(-a / d.conjugate()))
    alpha = (kappa * c.conjugate()).real
    beta = kappa * d.conjugate()
    gamma = (-kappa * b.conjugate()).real
    if abs(alpha) > INVOLUTION_TOL * max(abs(beta), abs(gamma), 1e-300):
        center = -beta.conjugate() / alpha
        r2 = abs(beta) ** 2 / alpha**2 - gamma / alpha
        if r2 > INVOLUTION_TOL * max(1.0, abs(center) ** 2):
            return AntiMobiusClass("inversion", "circle", center=center, radius=math.sqrt(r2), tau=tau)
        return AntiMobiusClass("identity-like", "empty", tau=tau)
    point = -0.5 * gamma * beta.conjugate() / abs(beta) ** 2
    direction = 1j * beta.conjugate() / abs(beta)
    return AntiMobiusClass("inversion", "line", center=point, direction=direction, infinity=True, tau=tau)


def anti_mobius_classify(h: HoloFn) -> AntiMobiusClass:
    """Classify sigma(z) = conj(h(z)) and compute its fixed set."""
    if h.is_constant():
        c = h(0j)
        return AntiMobiusClass("degenerate", "one point", points=(c.conjugate(),))
    H = mobius_of(h).normalized()
    N = H.conjugate().matrix @ H.matrix
    tr = N[0, 0] + N[1, 1]
    tau = complex(tr * tr / np.linalg.det(N))
    if is_identity_mod_scale(N):
        return _involution_fixed_set(H, tau)
    if abs(tau - 4) < PARABOLIC_TOL:
        label = "parabolic"
    elif abs(tau.imag) <= PARABOLIC_TOL * max(1.0, abs(tau)) and 0 <= tau.real < 4:
        label = "elliptic"
    elif abs(tau.imag) <= PARABOLIC_TOL * max(1.0, abs(tau)) and tau.real > 4:
        label = "hyperbolic"
    else:
        label = "loxodromic"
    fixed = []
    for p in _mobius_fixed_points(N):
        q = _sigma_ext(H, p)
        if p is None or q is None:
            if p is None and q is None:
                fixed.append(None)
        elif abs(q - p) <= FIXED_TOL * max(1.0, abs(p)):
            fixed.append(p)
    finite = tuple(sorted((p for p in fixed if p is not None), key=lambda w: (w.real, w.imag)))
    infinity = None in fixed
    kind = {0: "empty", 1: "one point", 2: "two points"}[len(fixed)]
    return AntiMobiusClass(label, kind, points=finite, infinity=infinity, tau=tau)


def global_verdict(cls: AntiMobiusClass) -> str:
    return {
        "empty": "sphere",
        "two points": "torus/cylinder",
        "circle": "complement-of-circle",
        "line": "complement-of-circle",
        "one point": "complement-of-point",
    }[cls.kind]


# --------------------------------------------------------------------------
# Singular locus conj(h(z)) = z


def _g(h, z):
    return h(z).conjugate() - z


def _newton(h, hp, z, span, iters=60):
    for _ in range(iters):
        try:
            g = _g(h, z)
        except PoleError:
            return None
        if abs(g) <= 1e-14 * max(1.0, abs(z)):
            return z
        w = hp(z).conjugate()
        gx = w - 1
        gy = -1j * w - 1j
        J = np.array([[gx.real, gy.real], [gx.imag, gy.imag]])
        step, *_ = np.linalg.lstsq(J, -np.array([g.real, g.imag]), rcond=None)
        z = z + complex(step[0], step[1])
        if abs(step[0]) + abs(step[1]) > span:
            return None
    return z


def singular_locus(h: HoloFn, region, grid: int) -> list[complex]:
    """Points of {conj(h(z)) = z} inside ``region = (x0, x1, y0, y1)``."""
    if grid < 8:
        raise ValueError("grid must be at least 8")
    x0, x1, y0, y1 = region
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    cell = max((x1 - x0), (y1 - y0)) / (grid - 1)
    hp = h.derivative()
    found: list[complex] = []
    for y in ys:
        for x in xs:
            z = complex(x, y)
            if not h.contains(z):
                continue
            try:
                g = _g(h, z)
                lip = 1 + abs(hp(z))
            except PoleError:
                continue
            if abs(g) > 2 * cell * lip:
                continue
            root = _newton(h, hp, z, span=4 * cell)
            if root is None:
                continue
            if not (x0 <= root.real <= x1 and y0 <= root.imag <= y1):
                continue
            try:
                if abs(_g(h, root)) <= 1e-10:
                    found.append(root)
            except PoleError:
                continue
    found.sort(key=lambda w: (w.real, w.imag))
    unique: list[complex] = []
    for p in found:
        if all(abs(p - q) > 1e-8 for q in unique):
            unique.append(p)
    return sorted(unique, key=lambda w: (w.real, w.imag))
