"""Shared fixtures data: the h test set, grids and random Mobius maps."""
from __future__ import annotations

import math

import numpy as np

from weyl2d.cplx import Exp, polynomial, rational
from weyl2d.mobius import MobiusMap

SEED = 20240611


def random_mobius(rng, min_det=0.1) -> MobiusMap:
    """Coefficients in the unit disk with |ad - bc| > min_det."""
    while True:
        r = np.sqrt(rng.uniform(0, 1, 4))
        th = rng.uniform(0, 2 * math.pi, 4)
        a, b, c, d = (complex(x) for x in r * np.exp(1j * th))
        if abs(a * d - b * c) > min_det:
            return MobiusMap(a, b, c, d)


def h_test_set():
    """(name, h) pairs: constant, linear, 1/z, -2i/z, i sqrt3 z, 10 Mobius, 10 polynomials, exp."""
    rng = np.random.default_rng(SEED)
    hs = [
        ("constant", polynomial([0.4 - 0.3j])),
        ("linear", polynomial([0.2 + 0.1j, 0.5 - 0.25j])),
        ("inverse", rational([1], [0, 1])),
        ("sphere101", rational([-2j], [0, 1])),
        ("torus14m1", polynomial([0, 1j * math.sqrt(3)])),
    ]
    for k in range(10):
        M = random_mobius(rng)
        hs.append((f"mobius{k}", rational([M.b, M.a], [M.d, M.c])))
    for k in range(10):
        deg = 2 + k % 2
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        hs.append((f"poly{k}", polynomial(0.5 * coeffs)))
    hs.append(("exp", Exp()))
    return hs


def grid(n=21, lo=-2.0, hi=2.0):
    xs = np.linspace(lo, hi, n)
    return [complex(float(x), float(y)) for y in xs for x in xs]
