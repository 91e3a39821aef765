"""Cross-checks between representations, and the non-completeness witness.

Everything here returns a :class:`ValidationReport`: a list of named checks,
each carrying the measured residual and the tolerance it was held to.
Random inputs are drawn from ``numpy.random.default_rng(seed)`` so every
report is reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from . import numeric as nm
from .cone import (
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
from .heisenberg import (
    IDENTITY,
    SASAKIAN_L,
    CoordVecH,
    FrameLabelH,
    FrameVecH,
    HeisPoint,
    connection_h,
    contact_form,
    contact_form_d,
    contact_form_tilde,
    frame_at,
    frame_compose,
    frame_decompose,
    group_inv,
    group_mul,
    lie_bracket,
    metric_g,
    phi_apply,
)

FD_STEP = 1e-5
STRUCTURE_TOL = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        res = self.residual if math.isfinite(self.residual) else None
        return {"name": self.name, "residual": res, "tolerance": self.tolerance, "passed": self.passed}


@dataclass
class ValidationReport:
    title: str
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    statements: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float) -> Check:
        check = Check(name, float(residual), float(tolerance))
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tolerance))
        self.statements.extend(other.statements)
        if other.data:
            self.data[prefix.rstrip(".") or other.title] = other.data

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "summary": "pass" if self.passed else "fail",
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "provenance": self.provenance,
            "statements": list(self.statements),
            "data": self.data,
        }


def _max(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


def _diff(u, v) -> float:
    return max(abs(a - b) for a, b in zip(u, v))


# -- forward-mode derivatives for the bracket check -------------------------------


class _Dual:
    """``a + b eps`` with ``eps^2 = 0``; enough arithmetic for the frame fields."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0.0):
        self.a, self.b = float(a), float(b)

    @staticmethod
    def _lift(o):
        return o if isinstance(o, _Dual) else _Dual(o)

    def __add__(self, o):
        o = self._lift(o)
        return _Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        return _Dual(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return self._lift(o) - self

    def __neg__(self):
        return _Dual(-self.a, -self.b)

    def __mul__(self, o):
        o = self._lift(o)
        return _Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        return _Dual(self.a / o.a, (self.b * o.a - self.a * o.b) / (o.a * o.a))

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, n):
        return _Dual(self.a**n, n * self.a ** (n - 1) * self.b)

    def __float__(self):
        return self.a

    def __gt__(self, o):
        return self.a > float(o)


def _directional(field_fn, point, direction):
    """Derivative of the coordinate field ``field_fn`` at ``point`` along ``direction``."""
    moved = type(point)(*(_Dual(c, d) for c, d in zip(point, direction)))
    return [c.b if isinstance(c, _Dual) else 0.0 for c in field_fn(moved)]


def _coordinate_bracket(field_a, field_b, point):
    va, vb = field_a(point), field_b(point)
    db_along_a = _directional(field_b, point, va)
    da_along_b = _directional(field_a, point, vb)
    return [x - y for x, y in zip(db_along_a, da_along_b)]


# -- structure suite -------------------------------------------------------------


def _koszul(bracket, inner, labels, a, b):
    """Frame components of ``nabla_a b`` for an orthonormal frame with constant inner products."""
    out = []
    for c in labels:
        val = inner(bracket(a, b), c) - inner(bracket(a, c), b) - inner(bracket(b, c), a)
        out.append(0.5 * val)
    return out


def structure_validate(n_points: int = 1000, seed: int = 0, L: float = SASAKIAN_L) -> ValidationReport:
    """Check the algebraic identities of both structures at seeded random points.

    ``L`` perturbs only the contact-metric checks; the structure is a
    contact metric manifold exactly when ``L = 1/4``.
    """
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    rng = np.random.default_rng(seed)
    rep = ValidationReport("structures", provenance={"seed": seed, "n_points": n_points, "L": L})
    tol = STRUCTURE_TOL
    H = list(FrameLabelH)
    Cl = list(FrameLabelC)

    P = rng.uniform(-10, 10, size=(n_points, 3, 3))
    Vs = rng.normal(size=(n_points, 2, 3))
    R = rng.uniform(0.1, 10, size=n_points)
    Q = rng.uniform(-10, 10, size=(n_points, 3))
    Wc = rng.normal(size=(n_points, 2, 4))
    if n_points == 1:
        P[0, 0] = 0.0
        Q[0] = 0.0
        R[0] = 1.0

    assoc, ident, inv = [], [], []
    ortho, kernel, reeb, rt_h = [], [], [], []
    eta_res, deta_res, phi2_res, domega = [], [], [], []
    brk_h = []
    ortho_c, rt_c, j2, jiso, omega_g, omega_d, brk_c = [], [], [], [], [], [], []

    sqrtL = math.sqrt(L)
    for i in range(n_points):
        p, q2, q3 = (HeisPoint(*row) for row in P[i])
        assoc.append(_diff(group_mul(group_mul(p, q2), q3), group_mul(p, group_mul(q2, q3))))
        ident.append(max(_diff(group_mul(IDENTITY, p), p), _diff(group_mul(p, IDENTITY), p)))
        inv.append(max(_diff(group_mul(p, group_inv(p)), IDENTITY), _diff(group_mul(group_inv(p), p), IDENTITY)))

        frames = [frame_at(p, lab) for lab in H]
        for a, ea in enumerate(frames):
            for b, eb in enumerate(frames):
                ortho.append(abs(metric_g(p, ea, eb) - (a == b)))
        kernel.append(max(abs(contact_form(p, frames[0])), abs(contact_form(p, frames[1]))))
        reeb.append(abs(contact_form_tilde(p, frames[2]) - 1.0))

        u, v = (CoordVecH(*row) for row in Vs[i])
        w = FrameVecH(*Vs[i, 1])
        rt_h.append(max(_diff(frame_compose(p, frame_decompose(p, u)), u), _diff(frame_decompose(p, frame_compose(p, w)), w)))

        # contact metric structure (sqrt(L) omega, T / sqrt(L), phi, g_L)
        xi = CoordVecH(0.0, 0.0, 1.0 / sqrtL)

        def phi(vec):
            return frame_compose(p, phi_apply(frame_decompose(p, vec)))

        eta_u = sqrtL * contact_form(p, u)
        eta_res.append(abs(eta_u - metric_g(p, u, xi, L)))
        deta_res.append(abs(0.5 * sqrtL * contact_form_d(p, u, v) - metric_g(p, phi(u), v, L)))
        phi2 = phi(phi(u))
        phi2_res.append(_diff(phi2, [-c + eta_u * x for c, x in zip(u, xi)]))
        # d omega(u, v) = u(omega(v)) - v(omega(u)) for constant coordinate fields
        d_u = _directional(lambda pt: [contact_form(pt, v)], p, u)[0]
        d_v = _directional(lambda pt: [contact_form(pt, u)], p, v)[0]
        domega.append(abs(d_u - d_v - contact_form_d(p, u, v)))

        for a, b in itertools.product(H, H):
            coord = _coordinate_bracket(lambda pt, a=a: frame_at(pt, a), lambda pt, b=b: frame_at(pt, b), p)
            got = frame_decompose(p, CoordVecH(*coord))
            brk_h.append(_diff(got, lie_bracket(a, b)))

        # cone
        qc = ConePoint(*Q[i], R[i])
        cframes = [cone_frame_at(qc, lab) for lab in Cl]
        for a, ea in enumerate(cframes):
            for b, eb in enumerate(cframes):
                ortho_c.append(abs(cone_metric(qc, ea, eb) - (a == b)))
        uc, vc = (CoordVecC(*row) for row in Wc[i])
        wc = FrameVecC(*Wc[i, 1])
        rt_c.append(max(_diff(frame_compose_cone(qc, frame_decompose_cone(qc, uc)), uc),
                        _diff(frame_decompose_cone(qc, frame_compose_cone(qc, wc)), wc)))
        j2.append(_diff(j_apply(j_apply(wc)), [-c for c in wc]))
        ju, jv = j_apply_coord(qc, uc), j_apply_coord(qc, vc)
        scale = 1.0 + abs(cone_metric(qc, uc, vc))
        jiso.append(abs(cone_metric(qc, ju, jv) - cone_metric(qc, uc, vc)) / scale)
        omega_g.append(abs(fundamental_form(qc, uc, vc) - cone_metric(qc, ju, vc)) / scale)

        def potential(pt, vec):
            return pt.r * pt.r / 2.0 * contact_form_tilde(pt.heis(), vec.heis())

        du = _directional(lambda pt: [potential(pt, vc)], qc, uc)[0]
        dv = _directional(lambda pt: [potential(pt, uc)], qc, vc)[0]
        omega_d.append(abs(du - dv - fundamental_form(qc, uc, vc)) / scale)

        for a, b in itertools.product(Cl, Cl):
            coord = _coordinate_bracket(
                lambda pt, a=a: cone_frame_at(pt, a), lambda pt, b=b: cone_frame_at(pt, b), qc
            )
            got = frame_decompose_cone(qc, CoordVecC(*coord))
            brk_c.append(_diff(got, lie_bracket_cone(a, b, qc.r)))

    rep.add("heis.group_associativity", _max(assoc), tol)
    rep.add("heis.group_identity", _max(ident), tol)
    rep.add("heis.group_inverse", _max(inv), tol)
    rep.add("heis.frame_orthonormality", _max(ortho), tol)
    rep.add("heis.contact_form_kernel", _max(kernel), tol)
    rep.add("heis.reeb_normalization", _max(reeb), tol)
    rep.add("heis.frame_roundtrip", _max(rt_h), 1e-14 * 100)
    rep.add("heis.bracket_table", _max(brk_h), tol)
    rep.add("heis.d_omega_expansion", _max(domega), tol)
    rep.add("contact_metric.eta_equals_g_xi", _max(eta_res), tol)
    rep.add("contact_metric.half_d_eta_equals_g_phi", _max(deta_res), tol)
    rep.add("contact_metric.phi_squared", _max(phi2_res), tol)

    inner_h = lambda x, lab: list(x)[H.index(lab)]  # noqa: E731
    rep.add("heis.connection_torsion_free", _max(
        _diff([x - y for x, y in zip(connection_h(a, b), connection_h(b, a))], lie_bracket(a, b))
        for a, b in itertools.product(H, H)), 0.0)
    rep.add("heis.connection_metric_compatible", _max(
        abs(inner_h(connection_h(a, b), c) + inner_h(connection_h(a, c), b))
        for a, b, c in itertools.product(H, H, H)), 0.0)
    rep.add("heis.connection_koszul", _max(
        _diff(connection_h(a, b), _koszul(lie_bracket, inner_h, H, a, b))
        for a, b in itertools.product(H, H)), 0.0)

    rep.add("cone.frame_orthonormality", _max(ortho_c), tol)
    rep.add("cone.frame_roundtrip", _max(rt_c), 1e-14 * 100)
    rep.add("cone.bracket_table", _max(brk_c), tol)
    rep.add("cone.J_squared_minus_identity", _max(j2), 0.0)
    rep.add("cone.J_isometry", _max(jiso), tol)
    rep.add("cone.omega_equals_g_J", _max(omega_g), tol)
    rep.add("cone.omega_is_d_of_potential", _max(omega_d), tol)

    inner_c = lambda x, lab: list(x)[Cl.index(lab)]  # noqa: E731
    tors, compat, kosz = [], [], []
    for r in np.unique(np.concatenate([R[:16], [1.0]])):
        r = float(r)
        for a, b in itertools.product(Cl, Cl):
            nab = [x - y for x, y in zip(connection_c(a, b, r), connection_c(b, a, r))]
            tors.append(_diff(nab, lie_bracket_cone(a, b, r)))
            kosz.append(_diff(connection_c(a, b, r),
                              _koszul(lambda x, y: lie_bracket_cone(x, y, r), inner_c, Cl, a, b)))
            for c in Cl:
                compat.append(abs(inner_c(connection_c(a, b, r), c) + inner_c(connection_c(a, c, r), b)))
    rep.add("cone.connection_torsion_free", _max(tors), tol)
    rep.add("cone.connection_metric_compatible", _max(compat), tol)
    rep.add("cone.connection_koszul", _max(kosz), tol)
    return rep


# -- closed form versus integration ------------------------------------------------

HEIS_CASES = tuple(cf.HeisCase)
# Fixed-step RK4 loses accuracy like (step / r)^4 near the tip; random ICs stay clear of it.
MIN_TRANSVERSE = 0.1
CONE_CASES = tuple(cf.ConeCase)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def random_heis_ic(case: cf.HeisCase, rng) -> tuple:
    """Random base point and unit frame velocity whose geodesic falls in ``case``."""
    p = HeisPoint(*rng.uniform(-2, 2, size=3))
    ang = rng.uniform(0, 2 * np.pi)
    if case is cf.HeisCase.LINE:
        v = (math.cos(ang), math.sin(ang), 0.0)
    elif case is cf.HeisCase.VERTICAL:
        v = (0.0, 0.0, float(rng.choice([-1.0, 1.0])))
    else:
        c = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 0.95))
        m = math.sqrt(1.0 - c * c)
        v = (m * math.cos(ang), m * math.sin(ang), c)
    return p, FrameVecH(*v)


def random_cone_ic(case: cf.ConeCase, rng) -> tuple:
    """Random cone IC in ``case``.

    Non-radial geodesics pass no closer to the tip than ``MIN_TRANSVERSE * r0``;
    the radial ones are truncated separately by :func:`_span_bounds`.
    """
    q = ConePoint(*rng.uniform(-2, 2, size=3), float(rng.uniform(0.5, 3.0)))
    if case is cf.ConeCase.RADIAL_LINE:
        v = (0.0, 0.0, 0.0, float(rng.choice([-1.0, 1.0])))
    elif case is cf.ConeCase.ARC:
        h = float(rng.choice([-1.0, 1.0]) * rng.uniform(MIN_TRANSVERSE, 1.0))
        v = (0.0, 0.0, h, float(rng.choice([-1.0, 1.0])) * math.sqrt(1.0 - h * h))
    elif case is cf.ConeCase.HORIZONTAL_LIMIT:
        u = _unit(rng.normal(size=3))
        while math.hypot(u[0], u[1]) < MIN_TRANSVERSE:
            u = _unit(rng.normal(size=3))
        v = (u[0], u[1], 0.0, u[2])
    else:
        while True:
            u = _unit(rng.normal(size=4))
            if abs(u[2]) > 0.05 and math.hypot(u[0], u[1]) > 0.05 and math.hypot(*u[:3]) > MIN_TRANSVERSE:
                break
        v = tuple(u)
    return q, FrameVecC(*(float(c) for c in v))


def _span_bounds(geo, span: float, margin: float):
    """Parameter interval ``[lo, hi]`` inside both ``|s| <= span`` and the domain.

    ``margin`` keeps the endpoints a fraction of ``r0`` away from the tip.
    """
    dom = cf.geodesic_domain(geo) if isinstance(geo, cf.ConeGeodesic) else None
    lo, hi = -span, span
    if dom is not None:
        r0 = geo.base.r
        lo = max(lo, dom.s_min + margin * r0)
        hi = min(hi, dom.s_max - margin * r0)
    return lo, hi


def _closed_arrays(geo, s):
    if isinstance(geo, cf.HeisGeodesic):
        return cf.heis_geodesic_eval_array(geo, s), cf.heis_geodesic_velocity_array(geo, s)
    return cf.cone_geodesic_eval_array(geo, s), cf.cone_geodesic_velocity_array(geo, s)


def compare_closed_numeric(point, frame, s_span: float, policy: nm.StepPolicy | None = None,
                           tol: float = 1e-6) -> ValidationReport:
    """Integrate one geodesic to ``s_span`` and compare it row by row with the closed form."""
    policy = policy or nm.StepPolicy.fixed()
    if isinstance(point, ConePoint):
        geo = cf.cone_geodesic_from_ic(point, frame)
        system, state0 = nm.CONE, nm.cone_state(point, frame)
    else:
        geo = cf.heis_geodesic_from_ic(point, frame)
        system, state0 = nm.HEIS, nm.heis_state(point, frame)
    rep = ValidationReport("compare_closed_numeric",
                           provenance={"case": geo.case.value, "s_span": s_span,
                                       "integrator": "rk4" if policy.kind == "fixed" else "rk45"})
    trace = nm.integrate(system, state0, s_span, policy)
    ncoord = len(system.coord_names)
    pts, vel = _closed_arrays(geo, trace.s)
    rep.add("coordinate_sup_error", np.max(np.linalg.norm(trace.states[:, :ncoord] - pts, axis=1)), tol)
    rep.add("velocity_sup_error", np.max(np.linalg.norm(trace.states[:, ncoord:] - vel, axis=1)), tol)
    rep.add("speed_drift", np.max(np.abs(system.speed2(trace.states) - 1.0)), 1e-9)
    if trace.breach is not None:
        rep.data["breach"] = trace.breach
        rep.statements.append(f"integration reached r_min at s = {trace.breach!r}")
    return rep


def oracle_suite(space: str, case, n: int = 100, seed: int = 0, span: float = 3.0,
                 step: float = 1e-3, tol: float = 1e-6) -> ValidationReport:
    """Batch comparison of closed forms and RK4 for ``n`` random ICs of one case.

    Also measures speed drift and, on the cone, the first integrals
    ``h r = c3`` and ``k r - s = c1`` along every integrated trace.
    """
    rng = np.random.default_rng(seed)
    if space == "heisenberg":
        ics = [random_heis_ic(case, rng) for _ in range(n)]
        geos = [cf.heis_geodesic_from_ic(p, v) for p, v in ics]
        system = nm.HEIS
    else:
        ics = [random_cone_ic(case, rng) for _ in range(n)]
        geos = [cf.cone_geodesic_from_ic(p, v) for p, v in ics]
        system = nm.CONE
    states0 = np.array([[*p, *v] for p, v in ics])
    bounds = [_span_bounds(g, span, 0.02) for g in geos]
    ncoord = len(system.coord_names)

    coord_err = vel_err = drift = hr = kr = 0.0
    for col, end in ((1, "hi"), (0, "lo")):
        s_ends = np.array([b[col] for b in bounds])
        S, Y = nm.integrate_batch(system, states0, s_ends, step)
        drift = max(drift, float(np.max(np.abs(system.speed2(Y) - 1.0))))
        for i, geo in enumerate(geos):
            s = S[:, i]
            pts, vel = _closed_arrays(geo, s)
            coord_err = max(coord_err, float(np.max(np.linalg.norm(Y[:, i, :ncoord] - pts, axis=1))))
            vel_err = max(vel_err, float(np.max(np.linalg.norm(Y[:, i, ncoord:] - vel, axis=1))))
            if system is nm.CONE:
                r, h, k = Y[:, i, 3], Y[:, i, 6], Y[:, i, 7]
                hr = max(hr, float(np.max(np.abs(h * r - geo.c3))))
                kr = max(kr, float(np.max(np.abs(k * r - s - geo.c1))))
    label = case.value
    rep = ValidationReport(f"oracle.{space}.{label}",
                           provenance={"seed": seed, "n": n, "span": span, "step": step})
    rep.add(f"{space}.{label}.coordinate_sup_error", coord_err, tol)
    rep.add(f"{space}.{label}.velocity_sup_error", vel_err, tol)
    rep.add(f"{space}.{label}.speed_drift", drift, 1e-9)
    if system is nm.CONE:
        rep.add(f"{space}.{label}.first_integral_hr", hr, 1e-8)
        rep.add(f"{space}.{label}.first_integral_kr", kr, 1e-8)
    return rep


def geodesic_suite(seed: int = 0, n: int = 100, span: float = 3.0, step: float = 1e-3) -> ValidationReport:
    rep = ValidationReport("geodesics", provenance={"seed": seed, "n_per_case": n, "span": span, "step": step})
    for k, case in enumerate(HEIS_CASES):
        rep.extend(oracle_suite("heisenberg", case, n, seed + k, span, step))
    for k, case in enumerate(CONE_CASES):
        rep.extend(oracle_suite("cone", case, n, seed + 10 + k, span, step))
    return rep


# -- half-plane and the totally geodesic embedding ---------------------------------


@dataclass(frozen=True)
class HalfPlanePoint:
    t: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.r)) or not self.r > 0:
            raise ValueError(f"half-plane point needs finite t and r > 0, got ({self.t}, {self.r})")


@dataclass(frozen=True)
class HalfPlaneGeodesic:
    """Unit-speed geodesic of ``dr^2 + r^2 dt^2`` through ``base``.

    ``theta`` is measured in the orthonormal frame ``(d/dr, (1/r) d/dt)``:
    ``theta = 0`` points radially outward, ``theta = pi/2`` along increasing t.
    Under ``(t, r) -> (r cos t, r sin t)`` the curve is a Euclidean straight
    line, which is how it is evaluated.
    """

    base: HalfPlanePoint
    theta: float

    @property
    def through_origin(self) -> bool:
        # sin(pi) evaluates to ~1e-16, so compare against a rounding-level threshold
        return abs(math.sin(self.theta)) <= 1e-12

    @property
    def domain(self) -> cf.GeodesicDomain:
        if not self.through_origin:
            return cf.GeodesicDomain(-math.inf, math.inf)
        if math.cos(self.theta) > 0:
            return cf.GeodesicDomain(-self.base.r, math.inf)
        return cf.GeodesicDomain(-math.inf, self.base.r)

    def _line(self, s):
        s = np.asarray(s, dtype=float)
        u = self.base.r + s * math.cos(self.theta)
        w = s * math.sin(self.theta)
        return s, u, w

    def eval(self, s):
        """``(t(s), r(s))`` arrays."""
        s, u, w = self._line(s)
        r = np.hypot(u, w)
        if not np.all(r > 0):
            raise DomainError("half-plane geodesic evaluated at the origin")
        return self.base.t + np.arctan2(w, u), r

    def velocity(self, s):
        """``(t'(s), r'(s))`` arrays."""
        s, u, w = self._line(s)
        r2 = u * u + w * w
        ct, st = math.cos(self.theta), math.sin(self.theta)
        return (u * st - w * ct) / r2, (u * ct + w * st) / np.sqrt(r2)


def halfplane_geodesic(p0: HalfPlanePoint, theta: float) -> HalfPlaneGeodesic:
    return HalfPlaneGeodesic(p0, float(theta))


def embed_halfplane(t, r) -> ConePoint:
    """``iota(t, r) = (0, 2t, r)`` in ``(z, t, r)`` coordinates."""
    return ConePoint(0.0, 0.0, 2.0 * t, r)


def embed_halfplane_vector(dt, dr) -> CoordVecC:
    return CoordVecC(0.0, 0.0, 2.0 * dt, dr)


def halfplane_metric(p: HalfPlanePoint, u, v) -> float:
    return u[1] * v[1] + p.r * p.r * u[0] * v[0]


def totally_geodesic_check(p0: HalfPlanePoint, theta: float, s_span: float = 3.0,
                           n_samples: int = 61, n_pullback: int = 100, seed: int = 0) -> ValidationReport:
    """Push a half-plane geodesic into the cone and test the cone geodesic equations on it.

    Frame components of the image come from the half-plane velocity alone;
    their central differences must match the cone right-hand side.
    """
    geo = halfplane_geodesic(p0, theta)
    dom = geo.domain
    lo = max(-s_span, dom.s_min + 0.05 * p0.r)
    hi = min(s_span, dom.s_max - 0.05 * p0.r)
    ss = np.linspace(lo, hi, n_samples)
    rep = ValidationReport("totally_geodesic",
                           provenance={"t0": p0.t, "r0": p0.r, "theta": theta, "s_span": s_span, "seed": seed})

    def image_state(s):
        t, r = geo.eval(s)
        dt, dr = geo.velocity(s)
        q = embed_halfplane(float(t), float(r))
        w = frame_decompose_cone(q, embed_halfplane_vector(float(dt), float(dr)))
        return np.array([*q, *w])

    ode_res = coord_res = speed = 0.0
    d = FD_STEP
    for s in ss:
        mid, plus, minus = image_state(s), image_state(s + d), image_state(s - d)
        fd = (plus - minus) / (2 * d)
        rhs = nm.cone_rhs(mid)
        ode_res = max(ode_res, float(np.max(np.abs(fd[4:] - rhs[4:]))))
        coord_res = max(coord_res, float(np.max(np.abs(fd[:4] - rhs[:4]))))
        speed = max(speed, abs(float(np.sum(mid[4:] ** 2)) - 1.0))
    rep.add("cone_ode_residual", ode_res, 1e-6)
    rep.add("coordinate_velocity_consistency", coord_res, 1e-6)
    rep.add("image_unit_speed", speed, 1e-12)

    rng = np.random.default_rng(seed)
    pull = 0.0
    for _ in range(n_pullback):
        hp = HalfPlanePoint(float(rng.uniform(-5, 5)), float(rng.uniform(0.1, 10)))
        u, v = rng.normal(size=2), rng.normal(size=2)
        q = embed_halfplane(hp.t, hp.r)
        lhs = halfplane_metric(hp, u, v)
        rhs = cone_metric(q, embed_halfplane_vector(*u), embed_halfplane_vector(*v))
        pull = max(pull, abs(lhs - rhs) / (1.0 + abs(lhs)))
    rep.add("pullback_metric_identity", pull, 1e-12)
    return rep


def embedding_suite(seed: int = 0, n: int = 50) -> ValidationReport:
    """Totally geodesic check on ``n`` seeded half-plane geodesics, every fifth one a radial ray."""
    rng = np.random.default_rng(seed)
    rep = ValidationReport("totally_geodesic_suite", provenance={"seed": seed, "n": n})
    ode = coord = speed = pull = 0.0
    for i in range(n):
        p0 = HalfPlanePoint(float(rng.uniform(-3, 3)), float(rng.uniform(0.5, 3)))
        if i % 5 == 0:
            theta = float(rng.choice([0.0, np.pi]))
        else:
            # lines missing the origin by at least 0.1, where central differences stay accurate
            while True:
                theta = float(rng.uniform(0, 2 * np.pi))
                if p0.r * abs(math.sin(theta)) >= 0.1:
                    break
        sub = totally_geodesic_check(p0, theta, 3.0, seed=seed + i, n_pullback=2 if i else 100)
        ode = max(ode, sub["cone_ode_residual"].residual)
        coord = max(coord, sub["coordinate_velocity_consistency"].residual)
        speed = max(speed, sub["image_unit_speed"].residual)
        pull = max(pull, sub["pullback_metric_identity"].residual)
    rep.add("embedding.cone_ode_residual", ode, 1e-6)
    rep.add("embedding.coordinate_velocity_consistency", coord, 1e-6)
    rep.add("embedding.image_unit_speed", speed, 1e-12)
    rep.add("embedding.pullback_metric_identity", pull, 1e-12)
    return rep


# -- non-completeness ----------------------------------------------------------------

COROLLARY = (
    "The half-plane U = {(t, r): r > 0} with metric dr^2 + r^2 dt^2 embeds in the cone by "
    "iota(t, r) = (0, 2t, r) as a totally geodesic submanifold (checked numerically above). "
    "The inward radial geodesic of U, which is also a cone geodesic, leaves every compact set "
    "after finite arc length and cannot be extended, so U is not geodesically complete; "
    "hence the cone (C(H), g_r) is not geodesically complete either. The implication from "
    "the submanifold to the ambient manifold is a mathematical argument, not a computation."
)


def incompleteness_witness(r0: float, direction: FrameVecC | None = None,
                           policy: nm.StepPolicy | None = None) -> ValidationReport:
    """Exhibit a finite-length inextendible geodesic from ``(0, 0, 0, r0)``.

    The default direction is the inward radial one; a direction whose
    geodesic has unbounded domain is reported as not being a witness.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    direction = direction or FrameVecC(0.0, 0.0, 0.0, -1.0)
    q0 = ConePoint(0.0, 0.0, 0.0, float(r0))
    geo = cf.cone_geodesic_from_ic(q0, direction)
    dom = cf.geodesic_domain(geo)
    rep = ValidationReport("incompleteness_witness", provenance={"r0": r0, "direction": list(direction)})
    witness = math.isfinite(dom.s_max)
    rep.data.update({
        "r0": float(r0),
        "case": geo.case.value,
        "domain": [None if math.isinf(dom.s_min) else dom.s_min, None if math.isinf(dom.s_max) else dom.s_max],
        "witness": witness,
    })
    if not witness:
        r_min_closed = math.sqrt(geo.a2)
        rep.data["min_radius"] = r_min_closed
        rep.add(f"r0={r0!r}.min_radius_positive", 0.0 if r_min_closed > 0 else 1.0, 0.0)
        rep.statements.append(
            f"r0={r0!r}: {geo.case.value} geodesic stays at r >= {r_min_closed!r}; domain is all of R, not a witness."
        )
        return rep

    length = dom.s_max
    policy = policy or nm.StepPolicy.adaptive()
    trace = nm.integrate(nm.CONE, nm.cone_state(q0, direction), 2.0 * length, policy)
    breach = trace.breach
    expected_breach = length - nm.R_MIN_INTEGRATION
    rep.data.update({"length": length, "breach": breach})
    rep.add(f"r0={r0!r}.domain_bound_equals_r0", abs(dom.s_max - r0), 0.0)
    rep.add(f"r0={r0!r}.finite_length_equals_r0", abs(length - r0), 0.0)
    rep.add(f"r0={r0!r}.integration_breach", math.inf if breach is None else abs(breach - expected_breach), 1e-8)
    rep.statements.append(
        f"r0={r0!r}: the inward radial geodesic from (0, 0, 0, {r0!r}) has maximal domain "
        f"(-inf, {dom.s_max!r}) and reaches the tip r = 0 after finite length {length!r}; "
        f"adaptive RK45 hits r_min = {nm.R_MIN_INTEGRATION:g} at s = {breach!r}."
    )
    return rep


def completeness_suite(radii=(0.1, 1.0, 10.0)) -> ValidationReport:
    rep = ValidationReport("completeness", provenance={"radii": list(radii)})
    witnesses = []
    for r0 in radii:
        sub = incompleteness_witness(r0)
        rep.extend(sub)
        witnesses.append(sub.data)
    arc = incompleteness_witness(1.0, FrameVecC(0.0, 0.0, 1.0, 0.0))
    rep.extend(arc)
    # the radial witness scales linearly with r0
    base = incompleteness_witness(1.0).data
    for r0, w in zip(radii, witnesses):
        rep.add(f"r0={r0!r}.scaling_length", abs(w["length"] - r0 * base["length"]), 0.0)
    rep.data["witnesses"] = witnesses
    rep.data["non_witness_example"] = arc.data
    rep.statements.append(COROLLARY)
    return rep


# -- two-point shooting -------------------------------------------------------------


@dataclass
class ShootingResult:
    geodesic: cf.ConeGeodesic | None
    s_star: float
    residual: float
    iterations: int
    converged: bool
    direction: FrameVecC | None = None

    def to_dict(self) -> dict:
        geo = self.geodesic
        out = {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual if math.isfinite(self.residual) else None,
            "s_star": self.s_star if math.isfinite(self.s_star) else None,
        }
        if geo is not None:
            out.update(geodesic_to_dict(geo))
            out["direction"] = list(self.direction)
        return out


def geodesic_to_dict(geo) -> dict:
    if isinstance(geo, cf.HeisGeodesic):
        return {"space": "heisenberg", "case": geo.case.value, "base": list(geo.base),
                "c": geo.c, "kappa": [geo.kappa.real, geo.kappa.imag]}
    return {"space": "cone", "case": geo.case.value, "base": list(geo.base), "c1": geo.c1,
            "c3": geo.c3, "C": [geo.C.real, geo.C.imag], "phi0": geo.phi0}


def _shoot(p: ConePoint, w, s):
    v = FrameVecC(*(float(c) for c in w / np.linalg.norm(w)))
    geo = cf.cone_geodesic_from_ic(p, v)
    return geo, v, cf.cone_geodesic_eval_array(geo, s)


def _residual(p, q_arr, u):
    try:
        _, _, pt = _shoot(p, u[:4], u[4])
    except DomainError:
        return None
    return pt - q_arr


def _initial_guesses(p: ConePoint, q: ConePoint):
    diff = CoordVecC(q.x - p.x, q.y - p.y, q.t - p.t, q.r - p.r)
    mid = ConePoint(0.5 * (p.x + q.x), 0.5 * (p.y + q.y), 0.5 * (p.t + q.t), 0.5 * (p.r + q.r))
    for base in (p, mid):
        w = np.array(list(frame_decompose_cone(base, diff)))
        n = float(np.linalg.norm(w))
        if n > 0:
            yield np.concatenate([w / n, [n]])


def connect_shooting(p: ConePoint, q: ConePoint, max_iter: int = 50, tol: float = 1e-10) -> ShootingResult:
    """Find a cone geodesic from ``p`` through ``q`` by damped Gauss-Newton shooting.

    Unknowns are an unnormalised direction ``w`` in R^4 and the arrival
    parameter ``s*``; the direction is re-projected to the unit sphere after
    every update, and the minimum-norm step keeps updates tangent to it.
    Never raises on non-convergence: ``converged`` is False and the best
    iterate is returned.
    """
    q_arr = np.array(list(q))
    best = None
    total_iter = 0
    for u in _initial_guesses(p, q):
        res = _residual(p, q_arr, u)
        if res is None:
            continue
        norm = float(np.linalg.norm(res))
        stall = 0
        for _ in range(max_iter):
            if norm <= tol:
                break
            total_iter += 1
            J = np.empty((4, 5))
            ok = True
            for j in range(5):
                step = 1e-7 * max(1.0, abs(u[j]))
                up, um = u.copy(), u.copy()
                up[j] += step
                um[j] -= step
                rp, rm = _residual(p, q_arr, up), _residual(p, q_arr, um)
                if rp is None or rm is None:
                    ok = False
                    break
                J[:, j] = (rp - rm) / (2 * step)
            if not ok:
                break
            delta = np.linalg.lstsq(J, -res, rcond=None)[0]
            lam = 1.0
            improved = False
            while lam > 1e-4:
                cand = u + lam * delta
                cand[:4] /= np.linalg.norm(cand[:4])
                if cand[4] <= 0:
                    lam *= 0.5
                    continue
                r_c = _residual(p, q_arr, cand)
                if r_c is not None and np.linalg.norm(r_c) < norm:
                    u, res, norm = cand, r_c, float(np.linalg.norm(r_c))
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                stall += 1
                if stall >= 3:
                    break
        if best is None or norm < best[1]:
            best = (u, norm)
        if norm <= tol:
            break
    if best is None:
        return ShootingResult(None, math.nan, math.inf, total_iter, False)
    u, norm = best
    geo, v, _ = _shoot(p, u[:4], u[4])
    return ShootingResult(geo, float(u[4]), norm, total_iter, norm <= tol, v)


def shooting_suite(seed: int = 0, n: int = 50) -> ValidationReport:
    """Forward-generate ``(p, q)`` pairs and reconnect them by shooting."""
    rng = np.random.default_rng(seed)
    rep = ValidationReport("shooting", provenance={"seed": seed, "n": n})
    end_err = ic_err = s_err = 0.0
    for _ in range(n):
        p, v, s_star, q = random_shooting_pair(rng)
        res = connect_shooting(p, q, tol=1e-12)
        end_err = max(end_err, res.residual)
        if res.direction is None:
            ic_err = s_err = math.inf
            continue
        ic_err = max(ic_err, float(np.max(np.abs(np.array(list(res.direction)) - np.array(list(v))))))
        s_err = max(s_err, abs(res.s_star - s_star))
    rep.add("shooting.endpoint_error", end_err, 1e-8)
    rep.add("shooting.ic_recovery", ic_err, 1e-6)
    rep.add("shooting.s_star_recovery", s_err, 1e-6)
    return rep


def random_shooting_pair(rng):
    case = cf.ConeCase.GENERAL
    p, v = random_cone_ic(case, rng)
    s_star = float(rng.uniform(0.2, 1.0)) * p.r
    q = cf.cone_geodesic_eval(cf.cone_geodesic_from_ic(p, v), s_star)
    return p, v, s_star, q
