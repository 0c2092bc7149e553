"""Complex scalars, holomorphic functions and Wirtinger calculus.

Points of the chart are plain Python ``complex`` numbers ``x + iy``.  Holomorphic
functions are small immutable objects that can be evaluated, differentiated
exactly and serialised to JSON.  Fields are point-evaluable maps with a domain
predicate; their Wirtinger derivatives are estimated by central differences
with Richardson extrapolation.
"""
from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, PoleError

POLE_TOL = 1e-14
# FD step is capped at this fraction of a field's local feature length.
STEP_PER_FEATURE = 1e-3


def as_point(z) -> complex:
    """Coerce ``z`` to a finite complex number, rejecting NaN/inf."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite point {z!r}")
    return z


def to_pair(z) -> list[float]:
    """JSON encoding ``[re, im]`` of a complex number (no negative zeros)."""
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def horner(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _coeff_scale(coeffs: Sequence[complex], z: complex) -> float:
    r = abs(z)
    return sum(abs(c) * r**k for k, c in enumerate(coeffs))


def _flush(x: float) -> float:
    return 0.0 if abs(x) < sys.float_info.min else x


def _strip(coeffs) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    for c in cs:
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError("coefficients must be finite")
    # subnormals underflow to zero under products; treat them as zero
    cs = [complex(_flush(c.real), _flush(c.imag)) for c in cs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    return tuple(cs) if cs else (0j,)


# --------------------------------------------------------------------------
# Holomorphic functions


class HoloFn:
    """A holomorphic function of one complex variable with exact derivative."""

    def __call__(self, z: complex) -> complex:
        raise NotImplementedError

    def derivative(self) -> "HoloFn":
        raise NotImplementedError

    def contains(self, z: complex) -> bool:
        return True

    def is_constant(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise ValueError(f"{type(self).__name__} has no JSON encoding")


@dataclass(frozen=True)
class Constant(HoloFn):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", as_point(self.value))

    def __call__(self, z):
        return self.value

    def derivative(self):
        return Constant(0j)

    def is_constant(self):
        return True

    def to_json(self):
        return {"type": "constant", "value": to_pair(self.value)}


@dataclass(frozen=True)
class Identity(HoloFn):
    def __call__(self, z):
        return complex(z)

    def derivative(self):
        return Constant(1.0)

    def to_json(self):
        return {"type": "identity"}


@dataclass(frozen=True)
class Exp(HoloFn):
    def __call__(self, z):
        return cmath.exp(z)

    def derivative(self):
        return self

    def to_json(self):
        return {"type": "exp"}


@dataclass(frozen=True)
class Rational(HoloFn):
    """``num(z) / den(z)`` with coefficient tuples in ascending degree."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num, den = _strip(self.num), _strip(self.den)
        if den == (0j,):
            raise ValueError("denominator is the zero polynomial")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def degree(self) -> tuple[int, int]:
        m = 0 if self.num == (0j,) else len(self.num) - 1
        return m, len(self.den) - 1

    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.empty(0, dtype=complex)
        return npoly.polyroots(np.array(self.den))

    def _den_ok(self, z, d):
        return abs(d) > POLE_TOL * _coeff_scale(self.den, z)

    def __call__(self, z):
        d = horner(self.den, z)
        if not self._den_ok(z, d):
            raise PoleError(f"pole of rational function at {z!r}")
        return horner(self.num, z) / d

    def contains(self, z):
        return self._den_ok(z, horner(self.den, z))

    def is_constant(self):
        return self.degree == (0, 0) or self.num == (0j,)

    def derivative(self):
        n, d = np.array(self.num), np.array(self.den)
        top = npoly.polysub(npoly.polymul(npoly.polyder(n), d), npoly.polymul(n, npoly.polyder(d)))
        return rational(top, npoly.polymul(d, d))

    def to_json(self):
        return {
            "type": "rational",
            "num": [to_pair(c) for c in self.num],
            "den": [to_pair(c) for c in self.den],
        }


def rational(num, den) -> HoloFn:
    """Build a rational function, collapsing constants to :class:`Constant`."""
    r = Rational(tuple(num), tuple(den))
    if r.num == (0j,):
        return Constant(0j)
    if r.degree == (0, 0):
        return Constant(r.num[0] / r.den[0])
    return r


def polynomial(coeffs) -> HoloFn:
    return rational(coeffs, (1.0,))


@dataclass(frozen=True)
class Composed(HoloFn):
    """``outer(inner(z))``; the derivative follows from the chain rule."""

    outer: HoloFn
    inner: HoloFn

    def __call__(self, z):
        return self.outer(self.inner(z))

    def contains(self, z):
        return self.inner.contains(z) and self.outer.contains(self.inner(z))

    def is_constant(self):
        return self.outer.is_constant() or self.inner.is_constant()

    def derivative(self):
        return Product((Composed(self.outer.derivative(), self.inner), self.inner.derivative()))


@dataclass(frozen=True)
class Product(HoloFn):
    factors: tuple

    def __call__(self, z):
        acc = 1 + 0j
        for fac in self.factors:
            acc *= fac(z)
        return acc

    def contains(self, z):
        return all(fac.contains(z) for fac in self.factors)

    def derivative(self):
        terms = []
        for i, fac in enumerate(self.factors):
            rest = self.factors[:i] + (fac.derivative(),) + self.factors[i + 1:]
            terms.append(Product(rest))
        return Sum(tuple(terms))


@dataclass(frozen=True)
class Sum(HoloFn):
    terms: tuple

    def __call__(self, z):
        return sum((t(z) for t in self.terms), 0j)

    def contains(self, z):
        return all(t.contains(z) for t in self.terms)

    def derivative(self):
        return Sum(tuple(t.derivative() for t in self.terms))


def eval_holo(h: HoloFn, z) -> complex:
    return h(as_point(z))


def holo_derivative(h: HoloFn) -> HoloFn:
    return h.derivative()


def _pair(v) -> complex:
    re, im = v
    return as_point(complex(float(re), float(im)))


def holo_from_json(obj: dict) -> HoloFn:
    """Decode the HoloFn JSON encoding used by the CLI."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("HoloFn JSON must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "constant":
        return Constant(_pair(obj["value"]))
    if kind == "rational":
        return rational([_pair(c) for c in obj["num"]], [_pair(c) for c in obj["den"]])
    if kind == "exp":
        return Exp()
    if kind == "identity":
        return Identity()
    raise ValueError(f"unknown HoloFn type {kind!r}")


# --------------------------------------------------------------------------
# Fields and finite differences


@dataclass(frozen=True)
class ComplexField:
    """A point-evaluable complex-valued map on (part of) the chart.

    ``feature_length`` optionally reports the distance to the nearest
    singularity; finite-difference steps shrink accordingly.  ``dz`` optionally
    gives the exact derivative with respect to zeta.
    """

    fn: Callable[[complex], complex]
    domain: Callable[[complex], bool] | None = None
    feature_length: Callable[[complex], float] | None = None
    dz: Callable[[complex], complex] | None = None
    error: type = DomainError

    def contains(self, z) -> bool:
        return self.domain is None or bool(self.domain(z))

    def __call__(self, z) -> complex:
        if self.domain is not None and not self.domain(z):
            raise self.error(f"point {z!r} outside field domain")
        v = complex(self.fn(z))
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError(f"non-finite field value at {z!r}")
        return v


def holo_field(h: HoloFn) -> ComplexField:
    hp = h.derivative()
    return ComplexField(h, h.contains, dz=hp)


@dataclass(frozen=True)
class FDScheme:
    step: float = 1e-4
    levels: int = 2
    exclusion: float = 1e-2

    def __post_init__(self):
        if not 0 < self.step < 1:
            raise ValueError("FD base step must lie in (0, 1)")
        if not 1 <= int(self.levels) <= 4:
            raise ValueError("Richardson levels must be between 1 and 4")
        if not self.exclusion > 0:
            raise ValueError("exclusion radius must be positive")

    def step_at(self, field: ComplexField, z: complex) -> float:
        h = self.step * max(1.0, abs(z))
        if field.feature_length is not None:
            h = min(h, STEP_PER_FEATURE * field.feature_length(z))
        if not h > 0:
            raise DomainError(f"no admissible FD step at {z!r}")
        return h

    def coarsened(self, factor: float = 10.0) -> "FDScheme":
        """Scheme for differentiating a field that is itself an FD estimate."""
        return FDScheme(min(self.step * factor, 0.05), self.levels, self.exclusion)


DEFAULT_SCHEME = FDScheme()


def richardson_central(g: Callable[[float], complex], h: float, levels: int) -> complex:
    """Derivative at 0 of ``g`` by central differences, extrapolated over ``levels`` halvings."""
    table: list[list[complex]] = []
    for k in range(levels):
        hk = h / 2**k
        row = [(g(hk) - g(-hk)) / (2 * hk)]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (4**j - 1))
        table.append(row)
    return table[-1][-1]


def partials_fd(F: ComplexField, z, scheme: FDScheme = DEFAULT_SCHEME) -> tuple[complex, complex]:
    """(dF/dx, dF/dy) at ``z``; raises DomainError if the stencil leaves F's domain."""
    z = as_point(z)
    h = scheme.step_at(F, z)
    fx = richardson_central(lambda t: F(z + t), h, scheme.levels)
    fy = richardson_central(lambda t: F(z + 1j * t), h, scheme.levels)
    return fx, fy


def wirtinger_fd(F: ComplexField, z, scheme: FDScheme = DEFAULT_SCHEME) -> tuple[complex, complex]:
    """(dF/dzeta, dF/dzetabar) estimated by finite differences."""
    fx, fy = partials_fd(F, z, scheme)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def d_zeta(F: ComplexField, z, scheme: FDScheme = DEFAULT_SCHEME) -> complex:
    """dF/dzeta, exact when the field carries it."""
    if F.dz is not None:
        return complex(F.dz(z))
    return wirtinger_fd(F, z, scheme)[0]
