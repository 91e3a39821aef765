import math

import numpy as np
import pytest
import sympy as sp

from heiscone.cone import (
    ConePoint,
    CoordVecC,
    DomainError,
    FrameLabelC,
    FrameVecC,
    cone_frame_at,
    cone_metric,
    connection_c,
    frame_compose_cone,
    frame_decompose_cone,
    fundamental_form,
    j_apply,
    j_apply_coord,
    lie_bracket_cone,
)

X, Y, T, R = FrameLabelC.X, FrameLabelC.Y, FrameLabelC.T, FrameLabelC.R


def close(a, b, tol=1e-12):
    return np.allclose(list(a), list(b), atol=tol, rtol=0)


def test_cone_point_requires_positive_radius():
    with pytest.raises(DomainError):
        ConePoint(0, 0, 0, 0.0)
    with pytest.raises(DomainError):
        ConePoint(0, 0, 0, -1.0)


def test_cone_metric_examples():
    q = ConePoint(0.4, -2, 1, 1.7)
    radial = CoordVecC(0, 0, 0, 1)
    assert cone_metric(q, radial, radial) == 1.0
    q2 = ConePoint(0, 0, 0, 2)
    assert cone_metric(q2, CoordVecC(0.5, 0, 0, 0), CoordVecC(0.5, 0, 0, 0)) == pytest.approx(1.0, abs=1e-15)
    assert cone_metric(q, cone_frame_at(q, X), cone_frame_at(q, R)) == 0.0


def test_cone_frame_examples():
    assert close(cone_frame_at(ConePoint(0, 0, 0, 1), X), (1, 0, 0, 0))
    assert close(cone_frame_at(ConePoint(1, 0, 0, 2), Y), (0, 0.5, -1, 0))
    assert close(cone_frame_at(ConePoint(3, 4, 5, 7), R), (0, 0, 0, 1))


def test_frame_decompose_cone_examples():
    assert close(frame_decompose_cone(ConePoint(0, 0, 0, 1), CoordVecC(0, 0, 0, 1)), (0, 0, 0, 1))
    assert close(frame_decompose_cone(ConePoint(0, 0, 0, 2), CoordVecC(1, 0, 0, 0)), (2, 0, 0, 0))
    r = 3.7
    assert close(frame_decompose_cone(ConePoint(0, 0, 0, r), CoordVecC(0, 0, 2 / r, 0)), (0, 0, 1, 0))


def test_frame_orthonormal_and_roundtrip(rng):
    for _ in range(50):
        q = ConePoint(*rng.uniform(-3, 3, 3), rng.uniform(0.1, 5))
        frame = [cone_frame_at(q, lab) for lab in FrameLabelC]
        gram = [[cone_metric(q, u, v) for v in frame] for u in frame]
        assert np.allclose(gram, np.eye(4), atol=1e-12)
        w = FrameVecC(*rng.normal(size=4))
        assert close(frame_decompose_cone(q, frame_compose_cone(q, w)), w, 1e-12)


def test_j_examples():
    assert close(j_apply(FrameVecC(1, 0, 0, 0)), (0, 1, 0, 0))
    assert close(j_apply(FrameVecC(0, 0, 1, 0)), (0, 0, 0, -1))
    v = FrameVecC(0.1, -2, 3, 0.7)
    assert close(j_apply(j_apply(v)), (-0.1, 2, -3, -0.7))


def test_j_is_isometry(rng):
    q = ConePoint(1, -1, 2, 0.8)
    for _ in range(20):
        u = CoordVecC(*rng.normal(size=4))
        v = CoordVecC(*rng.normal(size=4))
        assert cone_metric(q, j_apply_coord(q, u), j_apply_coord(q, v)) == pytest.approx(
            cone_metric(q, u, v), abs=1e-12)


def test_fundamental_form_examples():
    q = ConePoint(0.3, 1.1, -0.4, 2.5)
    assert fundamental_form(q, cone_frame_at(q, X), cone_frame_at(q, Y)) == pytest.approx(1.0, abs=1e-14)
    assert fundamental_form(q, cone_frame_at(q, R), cone_frame_at(q, T)) == pytest.approx(1.0, abs=1e-14)
    u = CoordVecC(0.2, -0.5, 1.0, 0.3)
    assert fundamental_form(q, u, u) == 0.0


def test_fundamental_form_is_d_of_potential_symbolically():
    # independent oracle: exterior derivative of (r^2/4) omega computed by sympy
    x, y, t, r = sp.symbols("x y t r")
    coords = (x, y, t, r)
    alpha = [-2 * y * r**2 / 4, 2 * x * r**2 / 4, r**2 / 4, 0]  # (r^2/4)(dt + 2x dy - 2y dx)
    d_alpha = sp.Matrix(4, 4, lambda i, j: sp.diff(alpha[j], coords[i]) - sp.diff(alpha[i], coords[j]))
    rng = np.random.default_rng(7)
    for _ in range(20):
        vals = dict(zip(coords, [*rng.uniform(-2, 2, 3), rng.uniform(0.2, 4)]))
        m = np.array(d_alpha.subs(vals), dtype=float)
        u, v = rng.normal(size=4), rng.normal(size=4)
        q = ConePoint(*(vals[c] for c in coords))
        assert fundamental_form(q, CoordVecC(*u), CoordVecC(*v)) == pytest.approx(u @ m @ v, abs=1e-12)


def test_fundamental_form_equals_g_of_j(rng):
    q = ConePoint(-0.7, 0.2, 3.0, 1.3)
    for _ in range(20):
        u = CoordVecC(*rng.normal(size=4))
        v = CoordVecC(*rng.normal(size=4))
        assert fundamental_form(q, u, v) == pytest.approx(cone_metric(q, j_apply_coord(q, u), v), abs=1e-12)


def test_connection_examples():
    assert close(connection_c(X, Y, 2.0), (0, 0, -0.5, 0))
    assert close(connection_c(T, T, 1.0), (0, 0, 0, -1))
    assert close(connection_c(R, X, 5.0), (0, 0, 0, 0))
    with pytest.raises(DomainError):
        connection_c(X, X, 0.0)


def test_bracket_examples():
    assert close(lie_bracket_cone(X, Y, 1.0), (0, 0, -2, 0))
    assert close(lie_bracket_cone(X, R, 4.0), (0.25, 0, 0, 0))
    assert close(lie_bracket_cone(X, T, 3.0), (0, 0, 0, 0))
    assert close(lie_bracket_cone(R, X, 4.0), (-0.25, 0, 0, 0))


@pytest.mark.parametrize("r", [0.3, 1.0, 7.5])
def test_connection_torsion_free(r):
    for a in FrameLabelC:
        for b in FrameLabelC:
            tor = np.subtract(list(connection_c(a, b, r)), list(connection_c(b, a, r)))
            assert close(tor, lie_bracket_cone(a, b, r), 1e-14 / min(r, 1))


def test_connection_metric_compatible():
    # frame is orthonormal, so <nabla_a b, c> + <b, nabla_a c> = 0
    r = 1.9
    labels = list(FrameLabelC)
    for a in labels:
        for i, b in enumerate(labels):
            for j, c in enumerate(labels):
                val = connection_c(a, b, r)[j] + connection_c(a, c, r)[i]
                assert abs(val) <= 1e-14
    assert math.isclose(connection_c(X, X, r).k, -1 / r)
