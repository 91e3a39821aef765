import cmath
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from heiscone import closed_form as cf
from heiscone.analysis import CONE_CASES, HEIS_CASES, random_cone_ic, random_heis_ic
from heiscone.cone import ConePoint, DomainError, FrameVecC, frame_compose_cone
from heiscone.heisenberg import FrameVecH, HeisPoint, frame_compose
from heiscone.numeric import cone_rhs, heis_rhs

S3 = math.sqrt(3.0)


def close(a, b, tol=1e-12):
    return np.allclose(list(a), list(b), atol=tol, rtol=0)


def general_example():
    return cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 1), FrameVecC(S3 / 2, 0, 0.5, 0))


def cone_coord_ode(s, y):
    # plain transcription of the cone geodesic system, used as an independent oracle
    x, yy, t, r, f, g, h, k = y
    return [f / r, g / r, (2 * h - 2 * x * g + 2 * yy * f) / r, k,
            (2 * g * h - k * f) / r, (-2 * f * h - k * g) / r, -k * h / r, (1 - k * k) / r]


# -- Heisenberg -----------------------------------------------------------------


def test_heis_classification_examples():
    line = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(1, 0, 0))
    assert line.case is cf.HeisCase.LINE and (line.a, line.b) == (1.0, 0.0)
    vert = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(0, 0, 1))
    assert vert.case is cf.HeisCase.VERTICAL and vert.c == 1.0
    helix = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(S3 / 2, 0, 0.5))
    assert helix.case is cf.HeisCase.HELIX
    assert helix.c == 0.5 and helix.kappa == pytest.approx(S3 / 2)


def test_heis_eval_examples():
    line = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(1, 0, 0))
    assert close(cf.heis_geodesic_eval(line, 2.0), (2, 0, 0))
    vert = cf.heis_geodesic_from_ic(HeisPoint(1, 2, 3), FrameVecH(0, 0, 1))
    assert close(cf.heis_geodesic_eval(vert, 0.5), (1, 2, 4))
    helix = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(S3 / 2, 0, 0.5))
    assert close(cf.heis_geodesic_eval(helix, math.pi), (0, -S3, 2.5 * math.pi))


def test_heis_velocity_examples():
    line = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(1, 0, 0))
    assert close(cf.heis_geodesic_velocity(line, 17.0), (1, 0, 0))
    helix = cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(S3 / 2, 0, 0.5))
    assert close(cf.heis_geodesic_velocity(helix, 0.0), (S3 / 2, 0, 0.5))
    assert close(cf.heis_geodesic_velocity(helix, math.pi), (-S3 / 2, 0, 0.5))


def test_heis_line_off_origin_formula():
    p = HeisPoint(1.5, -0.5, 2.0)
    a, b = 0.6, 0.8
    geo = cf.heis_geodesic_from_ic(p, FrameVecH(a, b, 0))
    s = 1.3
    expect = (a * s + p.x, b * s + p.y, 2 * (a * p.y - b * p.x) * s + p.t)
    assert close(cf.heis_geodesic_eval(geo, s), expect)


@pytest.mark.parametrize("case", HEIS_CASES)
def test_heis_initial_conditions_unit_speed_and_ode(case):
    rng = np.random.default_rng(3)
    s = np.linspace(-3, 3, 41)
    d = 1e-5
    for _ in range(20):
        p, v = random_heis_ic(case, rng)
        geo = cf.heis_geodesic_from_ic(p, v)
        assert geo.case is case
        assert close(cf.heis_geodesic_eval(geo, 0.0), p, 0.0)
        assert close(cf.heis_geodesic_velocity(geo, 0.0), v, 1e-15)
        vel = cf.heis_geodesic_velocity_array(geo, s)
        assert np.max(np.abs(np.sum(vel**2, axis=1) - 1)) <= 1e-12
        state = np.concatenate([cf.heis_geodesic_eval_array(geo, s), vel], axis=1)
        fd = (np.concatenate([cf.heis_geodesic_eval_array(geo, s + d), cf.heis_geodesic_velocity_array(geo, s + d)], 1)
              - np.concatenate([cf.heis_geodesic_eval_array(geo, s - d), cf.heis_geodesic_velocity_array(geo, s - d)], 1)) / (2 * d)
        assert np.max(np.abs(fd - heis_rhs(state))) <= 1e-6


def test_heis_helix_projects_to_circle():
    p = HeisPoint(0.4, -1.1, 0.3)
    v = FrameVecH(0.6 * math.cos(1.0), 0.6 * math.sin(1.0), -0.8)
    geo = cf.heis_geodesic_from_ic(p, v)
    centre = p.z - 1j * geo.kappa / (2 * geo.c)
    radius = abs(geo.kappa) / (2 * abs(geo.c))
    pts = cf.heis_geodesic_eval_array(geo, np.linspace(-10, 10, 201))
    assert np.max(np.abs(np.abs(pts[:, 0] + 1j * pts[:, 1] - centre) - radius)) <= 1e-12


def test_heis_helix_continuous_as_c_vanishes():
    p = HeisPoint(0.3, 0.7, -1.0)
    line = cf.heis_geodesic_from_ic(p, FrameVecH(1, 0, 0))
    m = math.sqrt(1 - 1e-24)
    near = cf.heis_geodesic_from_ic(p, FrameVecH(m, 0, 1e-12))
    for s in (0.5, 2.0, -3.0):
        assert close(cf.heis_geodesic_eval(near, s), cf.heis_geodesic_eval(line, s), 1e-9)


def test_heis_helix_matches_unexpanded_formula():
    p = HeisPoint(0.8, -0.3, 1.2)
    c = 0.35
    k = math.sqrt(1 - c * c) * cmath.exp(0.4j)
    geo = cf.heis_geodesic_from_ic(p, FrameVecH(k.real, k.imag, c))
    for s in (0.7, 2.9, -1.6):
        e = cmath.exp(-2j * c * s) - 1
        z = 1j * k * e / (2 * c) + p.z
        t = ((1 + c * c) * s - (1 - c * c) * math.sin(2 * c * s) / (2 * c)
             - (p.z.conjugate() * k * e).real) / c + p.t
        assert close(cf.heis_geodesic_eval(geo, s), (z.real, z.imag, t))


def test_heis_rejects_non_unit():
    with pytest.raises(ValueError):
        cf.heis_geodesic_from_ic(HeisPoint(0, 0, 0), FrameVecH(1, 1, 0))


# -- cone -------------------------------------------------------------------------


def test_cone_classification_examples():
    q = ConePoint(0, 0, 0, 1)
    rad = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 0, 1))
    assert rad.case is cf.ConeCase.RADIAL_LINE and (rad.c1, rad.c3, rad.C) == (1, 0, 0) and rad.sign == 1
    arc = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 1, 0))
    assert arc.case is cf.ConeCase.ARC and (arc.c1, arc.c3, arc.C) == (0, 1, 0)
    gen = general_example()
    assert gen.case is cf.ConeCase.GENERAL
    assert gen.c1 == 0 and gen.c3 == 0.5 and gen.C == pytest.approx(S3 / 2, abs=1e-15) and gen.phi0 == 0
    hl = cf.cone_geodesic_from_ic(q, FrameVecC(0.6, 0, 0, 0.8))
    assert hl.case is cf.ConeCase.HORIZONTAL_LIMIT


def test_cone_eval_examples():
    q = ConePoint(0, 0, 0, 1)
    rad_in = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 0, -1))
    assert close(cf.cone_geodesic_eval(rad_in, 0.5), (0, 0, 0, 0.5))
    arc = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 1, 0))
    assert close(cf.cone_geodesic_eval(arc, 1.0), (0, 0, math.pi / 2, math.sqrt(2)))
    z = 1j * (S3 / 2) * (cmath.exp(-1j * math.pi / 4) - 1)
    t = 5 * math.pi / 8 - 3 * math.sqrt(2) / 4
    assert close(cf.cone_geodesic_eval(general_example(), 1.0), (z.real, z.imag, t, math.sqrt(2)))


def test_cone_velocity_examples():
    q = ConePoint(0, 0, 0, 1)
    rad = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 0, 1))
    assert close(cf.cone_geodesic_velocity(rad, 0.0), (0, 0, 0, 1))
    arc = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 1, 0))
    h = 1 / math.sqrt(2)
    assert close(cf.cone_geodesic_velocity(arc, 1.0), (0, 0, h, h))
    assert close(cf.cone_geodesic_velocity(general_example(), 0.0), (S3 / 2, 0, 0.5, 0))


def test_cone_domain_examples():
    q = ConePoint(0, 0, 0, 1)
    arc = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 1, 0))
    assert cf.geodesic_domain(arc) == cf.GeodesicDomain(-math.inf, math.inf)
    rad_in = cf.cone_geodesic_from_ic(q, FrameVecC(0, 0, 0, -1))
    assert cf.geodesic_domain(rad_in) == cf.GeodesicDomain(-math.inf, 1.0)
    assert cf.geodesic_domain(general_example()) == cf.GeodesicDomain(-math.inf, math.inf)
    rad_out = cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 2.5), FrameVecC(0, 0, 0, 1))
    assert cf.geodesic_domain(rad_out) == cf.GeodesicDomain(-2.5, math.inf)


def test_cone_eval_outside_domain_raises():
    rad_in = cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 1), FrameVecC(0, 0, 0, -1))
    with pytest.raises(DomainError):
        cf.cone_geodesic_eval(rad_in, 1.0)
    with pytest.raises(DomainError):
        cf.cone_geodesic_eval(rad_in, 2.0)


@pytest.mark.parametrize("case", CONE_CASES)
def test_cone_ic_recovery_invariants_and_ode(case):
    rng = np.random.default_rng(11)
    d = 1e-5
    for _ in range(20):
        q, v = random_cone_ic(case, rng)
        geo = cf.cone_geodesic_from_ic(q, v)
        assert geo.case is case
        assert close(cf.cone_geodesic_eval(geo, 0.0), q, 1e-15)
        assert close(cf.cone_geodesic_velocity(geo, 0.0), v, 1e-12)
        dom = geo.domain
        s = np.linspace(max(-3, dom.s_min + 0.05 * q.r), min(3, dom.s_max - 0.05 * q.r), 41)
        pts = cf.cone_geodesic_eval_array(geo, s)
        vel = cf.cone_geodesic_velocity_array(geo, s)
        assert np.max(np.abs(np.sum(vel**2, axis=1) - 1)) <= 1e-12
        r, h, k = pts[:, 3], vel[:, 2], vel[:, 3]
        assert np.max(np.abs(h * r - geo.c3)) <= 1e-12
        assert np.max(np.abs(k * r - s - geo.c1)) <= 1e-12
        state = np.concatenate([pts, vel], axis=1)
        plus = np.concatenate([cf.cone_geodesic_eval_array(geo, s + d), cf.cone_geodesic_velocity_array(geo, s + d)], 1)
        minus = np.concatenate([cf.cone_geodesic_eval_array(geo, s - d), cf.cone_geodesic_velocity_array(geo, s - d)], 1)
        assert np.max(np.abs((plus - minus) / (2 * d) - cone_rhs(state))) <= 1e-6


def test_cone_velocity_is_derivative_of_position():
    q = ConePoint(0.5, -0.2, 0.1, 1.3)
    v = FrameVecC(0.5, -0.5, 0.5, 0.5)
    geo = cf.cone_geodesic_from_ic(q, v)
    d = 1e-6
    for s in (-2.0, 0.3, 2.5):
        p = cf.cone_geodesic_eval(geo, s)
        fd = (np.array(list(cf.cone_geodesic_eval(geo, s + d))) - np.array(list(cf.cone_geodesic_eval(geo, s - d)))) / (2 * d)
        assert close(frame_compose_cone(p, cf.cone_geodesic_velocity(geo, s)), fd, 1e-8)


def test_arc_t_range_tail():
    arc = cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 1), FrameVecC(0, 0, 1, 0))
    for s in (1e6, -1e6):
        t = cf.cone_geodesic_eval(arc, s).t
        # t - t0 = 2 arctan(s): the gap to +-pi at |s| = 1e6 is 2 arctan(1e-6), just over 1e-6
        assert t == pytest.approx(math.copysign(math.pi, s) - 2 * math.atan(1 / s), abs=1e-12)
    assert abs(cf.cone_geodesic_eval(arc, 1e7).t - math.pi) <= 1e-6
    assert abs(cf.cone_geodesic_eval(arc, -1e7).t + math.pi) <= 1e-6


def test_arc_t_is_continuous_past_the_principal_branch():
    arc = cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 1), FrameVecC(0, 0, 0.6, -0.8))
    s = np.linspace(-5, 5, 2001)
    t = cf.cone_geodesic_eval_array(arc, s)[:, 2]
    # max slope 2 c3 / a^2 = 10/3 gives steps of 0.017; a branch jump would be ~2 pi
    assert np.max(np.abs(np.diff(t))) < 0.05


def test_horizontal_limit_is_continuous_in_c3():
    q = ConePoint(0.7, -0.4, 0.2, 1.5)
    f, g, k = 0.48, 0.36, 0.8
    hl = cf.cone_geodesic_from_ic(q, FrameVecC(f, g, 0, k))
    eps = 1e-9 / q.r
    m = math.sqrt(1 - eps * eps)
    near = cf.cone_geodesic_from_ic(q, FrameVecC(f * m, g * m, eps, k))
    assert near.case is cf.ConeCase.GENERAL
    for s in (-1.0, 0.5, 3.0):
        assert close(cf.cone_geodesic_eval(near, s), cf.cone_geodesic_eval(hl, s), 1e-6)


def test_horizontal_limit_matches_arctan_formula():
    q = ConePoint(0.7, -0.4, 0.2, 1.5)
    hl = cf.cone_geodesic_from_ic(q, FrameVecC(0.48, 0.36, 0, 0.8))
    c1, C = hl.c1, hl.C * cmath.exp(1j * hl.phi0)
    a = math.sqrt(q.r**2 - c1**2)
    for s in (-2.0, 0.9, 3.0):
        ang = (math.atan((s + c1) / a) - math.atan(c1 / a)) / a
        z = q.z + C * ang
        t = q.t - 2 * (q.z.conjugate() * C).imag * ang
        assert close(cf.cone_geodesic_eval(hl, s), (z.real, z.imag, t, math.hypot(s + c1, a)))


def test_general_z0_coupling_carries_inverse_c3():
    # t depends on z0 only through -(1/c3) Re(conj(z0) C (e^{i Phi(s)} - e^{i Phi(0)}))
    v = (0.3, -0.5, 0.4, math.sqrt(1 - 0.09 - 0.25 - 0.16))
    q0 = ConePoint(0, 0, 0.3, 1.2)
    q1 = ConePoint(0.8, -0.6, 0.3, 1.2)
    s_end = 1.7
    t_num = []
    for q in (q0, q1):
        sol = solve_ivp(cone_coord_ode, (0, s_end), [*q, *v], method="DOP853", rtol=1e-12, atol=1e-13)
        t_num.append(sol.y[2, -1])
    geo = cf.cone_geodesic_from_ic(q1, FrameVecC(*v))
    a = math.sqrt(geo.a2)

    def phi(s):
        return -(2 * geo.c3 / a) * math.atan((s + geo.c1) / a)

    bracket = (q1.z.conjugate() * geo.C * (cmath.exp(1j * phi(s_end)) - cmath.exp(1j * phi(0)))).real
    assert t_num[1] - t_num[0] == pytest.approx(-bracket / geo.c3, abs=1e-9)
    assert abs(t_num[1] - t_num[0] + bracket) > 1e-2  # without the 1/c3 factor the term is wrong
    assert cf.cone_geodesic_eval(geo, s_end).t == pytest.approx(t_num[1], abs=1e-9)


def test_general_example_matches_independent_integration():
    geo = general_example()
    sol = solve_ivp(cone_coord_ode, (0, 1), [0, 0, 0, 1, S3 / 2, 0, 0.5, 0], method="DOP853", rtol=1e-12, atol=1e-13)
    assert close(cf.cone_geodesic_eval(geo, 1.0), sol.y[:4, -1], 1e-9)
    assert close(cf.cone_geodesic_velocity(geo, 1.0), sol.y[4:, -1], 1e-9)


def test_cone_geodesic_validates_invariants():
    with pytest.raises(ValueError):
        cf.ConeGeodesic(ConePoint(0, 0, 0, 1), cf.ConeCase.ARC, 0.0, 0.5, 0j, 0.0)
    with pytest.raises(ValueError):
        cf.cone_geodesic_from_ic(ConePoint(0, 0, 0, 1), FrameVecC(1, 1, 0, 0))
