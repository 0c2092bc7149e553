import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_mobius
from weyl2d.cplx import Constant, Exp, polynomial, rational
from weyl2d.errors import DegenerateError, PoleError
from weyl2d.mobius import (
    AntiMobiusClass,
    MobiusMap,
    anti_mobius_classify,
    gauge_transform_h,
    global_verdict,
    is_identity_mod_scale,
    mobius_apply,
    mobius_compose,
    mobius_of,
    singular_locus,
)

SQRT3 = math.sqrt(3)
INV = rational([1], [0, 1])
SPHERE = rational([-2j], [0, 1])
TORUS = polynomial([0, 1j * SQRT3])


def random_points(rng, n, radius=2.0):
    return [complex(*rng.uniform(-radius, radius, 2)) for _ in range(n)]


def test_apply_examples():
    assert mobius_apply(MobiusMap.identity(), 3 + 1j) == 3 + 1j
    assert mobius_apply(MobiusMap(2, 0, 0, 1), 0.25) == 0.5
    assert mobius_apply(MobiusMap(0, 1, 1, 0), 2j) == pytest.approx(-0.5j)
    with pytest.raises(PoleError):
        mobius_apply(MobiusMap(0, 1, 1, 0), 0)


def test_singular_matrix_rejected():
    with pytest.raises(DegenerateError):
        MobiusMap(1, 2, 2, 4)


def test_compose_examples():
    rng = np.random.default_rng(1)
    M = random_mobius(rng)
    assert is_identity_mod_scale(mobius_compose(M, M.inverse()))
    C = mobius_compose(MobiusMap(2, 0, 0, 1), MobiusMap(1, 1, 0, 1))
    for z in (0, 1j, -3 + 2j):
        assert C(z) == pytest.approx(2 * z + 2)
    S = MobiusMap(0, 1, 1, 0)
    assert is_identity_mod_scale(mobius_compose(S, S))


def test_compose_and_associativity_pointwise():
    rng = np.random.default_rng(2)
    M, N, P = (random_mobius(rng) for _ in range(3))
    MN = mobius_compose(M, N)
    left, right = mobius_compose(MN, P), mobius_compose(M, mobius_compose(N, P))
    for z in random_points(rng, 20):
        try:
            expect = M(N(z))
            nested = M(N(P(z)))
        except PoleError:
            continue
        assert abs(MN(z) - expect) <= 1e-10 * max(1.0, abs(expect))
        assert abs(left(z) - right(z)) <= 1e-10 * max(1.0, abs(nested))


def test_json_roundtrip():
    M = MobiusMap(1 + 1j, -0.5, 0.25j, 2)
    assert MobiusMap.from_json(M.to_json()) == M


def test_gauge_transform_examples():
    assert gauge_transform_h(SPHERE, MobiusMap.identity()) == SPHERE
    assert gauge_transform_h(Constant(0), MobiusMap(1, 1, 0, 1)) == Constant(-1)
    ht = gauge_transform_h(INV, MobiusMap(2, 0, 0, 1))
    for z in (0.25, 1 + 1j, -0.3j):
        assert ht(z) == pytest.approx(1 / (4 * z))


def test_gauge_transform_mobius_matrix():
    rng = np.random.default_rng(3)
    H, P = random_mobius(rng), random_mobius(rng)
    ht = gauge_transform_h(H.as_holo(), P)
    expect = MobiusMap.from_matrix(np.linalg.inv(P.conjugate().matrix) @ H.matrix @ P.matrix)
    for z in random_points(rng, 10):
        try:
            assert ht(z) == pytest.approx(expect(z), rel=1e-9, abs=1e-9)
        except PoleError:
            pass


@pytest.mark.parametrize("h", [INV, SPHERE, polynomial([0.3, 1j, -0.5]), Exp()])
def test_gauge_transform_is_right_action(h):
    rng = np.random.default_rng(4)
    phi, psi = random_mobius(rng), random_mobius(rng)
    two_step = gauge_transform_h(gauge_transform_h(h, phi), psi)
    one_step = gauge_transform_h(h, mobius_compose(phi, psi))
    checked = 0
    for z in random_points(rng, 40):
        try:
            a, b = two_step(z), one_step(z)
        except PoleError:
            continue
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
        checked += 1
    assert checked >= 20


def test_classify_table():
    c = anti_mobius_classify(SPHERE)
    assert (c.label, c.kind, global_verdict(c)) == ("elliptic", "empty", "sphere")
    c = anti_mobius_classify(INV)
    assert (c.label, c.kind) == ("inversion", "circle")
    assert c.center == pytest.approx(0) and c.radius == pytest.approx(1)
    c = anti_mobius_classify(TORUS)
    assert (c.label, c.kind, global_verdict(c)) == ("hyperbolic", "two points", "torus/cylinder")
    assert c.points == (0j,) and c.infinity


def test_classify_other_labels():
    c = anti_mobius_classify(polynomial([1, 1]))
    assert (c.label, c.kind, c.infinity) == ("parabolic", "one point", True)
    c = anti_mobius_classify(polynomial([0, 1]))
    assert (c.label, c.kind) == ("inversion", "line")
    c = anti_mobius_classify(rational([-1], [0, 1]))
    assert (c.label, c.kind) == ("identity-like", "empty")
    c = anti_mobius_classify(Constant(1 + 2j))
    assert (c.label, c.kind, c.points) == ("degenerate", "one point", (1 - 2j,))
    assert global_verdict(c) == "complement-of-point"


def test_classify_json_shape():
    out = anti_mobius_classify(INV).to_json()
    assert out == {"label": "inversion", "fixed_set": {"kind": "circle", "center": [0.0, 0.0], "radius": 1.0},
                   "tau": [4.0, 0.0]}
    pts = anti_mobius_classify(TORUS).to_json()["fixed_set"]["points"]
    assert pts == [[0.0, 0.0], "infinity"]


def test_classify_rejects_non_mobius():
    with pytest.raises(ValueError, match="requires a Mobius h"):
        mobius_of(polynomial([0, 0, 1]))
    with pytest.raises(ValueError):
        anti_mobius_classify(Exp())


def test_label_fixed_set_consistency_enforced():
    with pytest.raises(ValueError):
        AntiMobiusClass("inversion", "two points")


unit = st.floats(-1, 1)


@settings(max_examples=80, deadline=None)
@given(st.lists(unit, min_size=8, max_size=8), unit, unit)
def test_tau_real_and_scale_invariant(v, sr, si):
    try:
        H = MobiusMap(complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5]), complex(v[6], v[7]))
    except DegenerateError:
        return
    if abs(H.det) < 1e-3:
        return
    lam = complex(sr, si)
    if abs(lam) < 1e-2:
        return
    a = anti_mobius_classify(H.as_holo())
    scaled = MobiusMap(lam * H.a, lam * H.b, lam * H.c, lam * H.d)
    b = anti_mobius_classify(scaled.as_holo())
    assert abs(a.tau.imag) <= 1e-9 * max(1.0, abs(a.tau))
    if abs(a.tau.real - 4) < 1e-6:
        return  # parabolic tie-break is tolerance-sensitive
    assert (a.label, a.kind, a.infinity) == (b.label, b.kind, b.infinity)
    assert len(a.points) == len(b.points)
    for p, q in zip(a.points, b.points):
        assert abs(p - q) <= 1e-9 * max(1.0, abs(p))
    for p in a.points:
        w = H(p)
        assert abs(w.conjugate() - p) <= 1e-8 * max(1.0, abs(p))


def test_singular_locus_examples():
    region = (-2, 2, -2, 2)
    assert singular_locus(Constant(0), region, 16) == [pytest.approx(0j, abs=1e-12)]
    pts = singular_locus(INV, region, 32)
    assert len(pts) >= 8
    for p in pts:
        assert abs(abs(p) - 1) <= 1e-8
        assert abs(INV(p).conjugate() - p) <= 1e-10
    assert singular_locus(SPHERE, region, 32) == []
    with pytest.raises(ValueError):
        singular_locus(INV, region, 4)


def test_singular_locus_sorted_and_consistent_with_classifier():
    h = rational([0.5], [0, 1])
    pts = singular_locus(h, (-2, 2, -2, 2), 24)
    assert pts == sorted(pts, key=lambda w: (w.real, w.imag))
    c = anti_mobius_classify(h)
    assert c.kind == "circle"
    for p in pts:
        assert abs(abs(p - c.center) - c.radius) <= 1e-8
