import cmath
import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from helpers import h_test_set
from weyl2d.cplx import (
    ComplexField,
    Constant,
    Exp,
    FDScheme,
    Identity,
    Rational,
    eval_holo,
    holo_derivative,
    holo_field,
    holo_from_json,
    polynomial,
    rational,
    wirtinger_fd,
)
from weyl2d.errors import DomainError, PoleError

SQRT3 = math.sqrt(3)


def test_eval_examples():
    assert eval_holo(Constant(0), 1) == 0
    assert eval_holo(rational([1], [0, 1]), 0.5) == 2
    assert eval_holo(rational([-2j], [0, 1]), 1) == -2j


def test_eval_pole_raises():
    with pytest.raises(PoleError):
        eval_holo(rational([1], [0, 1]), 0)
    with pytest.raises(PoleError):
        eval_holo(rational([1], [-1, 1]), 1.0)


@pytest.mark.parametrize("bad", [complex("nan"), complex("inf"), complex(0, float("inf"))])
def test_nonfinite_points_rejected(bad):
    with pytest.raises(ValueError):
        eval_holo(Identity(), bad)


def test_derivative_examples():
    assert holo_derivative(Constant(3 - 1j))(0.7) == 0
    d = holo_derivative(rational([1], [0, 1]))
    for z in (0.5, 1 + 1j, -2j):
        assert d(z) == pytest.approx(-1 / z**2, rel=1e-14)
    assert holo_derivative(polynomial([0, 1j * SQRT3]))(5 - 2j) == pytest.approx(1j * SQRT3)
    assert holo_derivative(Exp())(0.3 + 0.2j) == cmath.exp(0.3 + 0.2j)


def test_rational_normalisation():
    r = Rational((1, 2, 0, 0), (1, 0))
    assert r.num == (1, 2) and r.den == (1,)
    assert isinstance(rational([2, 0], [4]), Constant)
    with pytest.raises(ValueError):
        Rational((1,), (0, 0))
    with pytest.raises(ValueError):
        Rational((float("nan"),), (1,))


def test_wirtinger_examples():
    sq = wirtinger_fd(ComplexField(lambda z: z * z), 1)
    assert abs(sq[0] - 2) < 1e-8 and abs(sq[1]) < 1e-8
    for z in (0.3, 1 - 2j, -4 + 1j):
        dz, dzb = wirtinger_fd(ComplexField(lambda w: w.conjugate()), z)
        assert abs(dz) < 1e-8 and abs(dzb - 1) < 1e-8
    dz, dzb = wirtinger_fd(ComplexField(lambda w: abs(w) ** 2), 1 + 1j)
    assert abs(dz - (1 - 1j)) < 1e-8 and abs(dzb - (1 + 1j)) < 1e-8


def test_wirtinger_stencil_leaving_domain():
    F = ComplexField(lambda z: z, domain=lambda z: z.real > 0)
    with pytest.raises(DomainError):
        wirtinger_fd(F, 1e-6)


def test_fdscheme_validation():
    for kw in ({"step": 0}, {"step": 1.0}, {"levels": 0}, {"levels": 5}, {"exclusion": 0}):
        with pytest.raises(ValueError):
            FDScheme(**kw)
    assert FDScheme().coarsened().step == pytest.approx(1e-3)


def test_cauchy_riemann_over_test_set():
    rng = np.random.default_rng(7)
    for _, h in h_test_set():
        F = holo_field(h)
        hp = h.derivative()
        done = 0
        while done < 50:
            z = complex(*rng.uniform(-2, 2, 2))
            try:
                dz, dzb = wirtinger_fd(F, z)
            except DomainError:
                continue
            scale = max(1.0, abs(hp(z)))
            assert abs(dzb) <= 1e-7 * scale
            assert abs(dz - hp(z)) <= 1e-7 * scale
            done += 1


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=4), st.lists(coef, min_size=1, max_size=3), coef)
@example(num=[1], den=[0, 2.225073858507e-311], z=0j)
def test_derivative_degree_and_fd_agreement(num, den, z):
    try:
        h = rational(num, den)
    except ValueError:
        return
    if not isinstance(h, Rational):
        assert isinstance(h.derivative(), Constant)
        return
    m, n = h.degree
    d = h.derivative()
    if isinstance(d, Rational):
        dm, dn = d.degree
        assert dm <= m + n and dn <= 2 * n
    # keep away from poles so the FD step is meaningful
    if any(abs(z - p) < 0.2 for p in h.poles()):
        return
    F = ComplexField(h, h.contains)
    dz, dzb = wirtinger_fd(F, z)
    scale = max(1.0, abs(d(z)), abs(h(z)))
    assert abs(dz - d(z)) <= 1e-6 * scale
    assert abs(dzb) <= 1e-6 * scale


@settings(max_examples=30, deadline=None)
@given(coef)
def test_evaluation_bit_identical(z):
    h = rational([1 + 2j, -0.5, 0.25j], [1, 0.3 - 0.1j])
    if not h.contains(z):
        return
    assert eval_holo(h, z) == eval_holo(h, z)


@pytest.mark.parametrize(
    "h",
    [Constant(1 - 2j), Identity(), Exp(), rational([1, 2j], [0.5, 0, 1]), polynomial([0, 1j * SQRT3])],
)
def test_json_roundtrip(h):
    assert holo_from_json(h.to_json()) == h


@pytest.mark.parametrize("obj", [{}, {"type": "sin"}, {"type": "rational", "num": [[1, 0]], "den": [[0, 0]]}, []])
def test_json_rejects_bad_input(obj):
    with pytest.raises(ValueError):
        holo_from_json(obj)
