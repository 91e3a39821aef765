"""Closed-form unit-speed geodesics of the Heisenberg group and of its cone.

Heisenberg group
----------------
Frame velocity ``F = f + ig`` obeys ``F' = -2ic F`` with ``h = c`` constant, so
``F(s) = kappa exp(-2ics)`` and ``|kappa|^2 + c^2 = 1``.  Three cases:

* ``LINE``      (c = 0):  horizontal straight lines,
* ``VERTICAL``  (|c| = 1): ``(x0, y0, 2cs + t0)``,
* ``HELIX``     (0 < |c| < 1): circles in the z-plane lifted to helices.

Cone
----
With ``c1 = r0 k0`` and ``c3 = r0 h0`` one has ``r(s)^2 = (s + c1)^2 + a^2``
where ``a^2 = r0^2 - c1^2``, ``h = c3 / r`` and ``F = C exp(i Phi(s)) / r`` with
``Phi(s) = -(2 c3 / a) arctan((s + c1) / a)``.  All non-radial cases are driven by

    A(s) = integral_0^s du / r(u)^2 = atan2(s a, r0^2 + c1 s) / a

which is continuous in ``s`` (no arctan branch jump) and has the finite limit
``s / (r0^2 + c1 s)`` as ``a -> 0``.  Writing ``D = Phi(s) - Phi(0) = -2 c3 A``:

    z(s) = z0 - i C e^{i Phi(0)} A E(D)
    t(s) = t0 + 2 c3 A - 2 |C|^2 A^2 Q(D) + 2 A Re(conj(z0) C e^{i Phi(0)} E(D))

with ``E(D) = (e^{iD} - 1) / D`` and ``Q(D) = (D - sin D) / D^2``.  This is the
closed form in terms of ``Phi`` rewritten so that ``c3 -> 0`` (the horizontal
limit) and ``C -> 0`` (the arc case) are removable rather than 0/0.  Note the
``conj(z0)`` coupling term of ``t`` carries an overall factor ``1 / c3`` in the
unexpanded form ``-(1/c3) Re(conj(z0) C (e^{i Phi(s)} - e^{i Phi(0)}))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .cone import R_MIN, ConePoint, DomainError, FrameVecC
from .heisenberg import EPS_UNIT, FrameVecH, HeisPoint, require_unit

# |h0| below this is a horizontal start; 1 - |c| below this is vertical.
CLASSIFY_TOL = 1e-10


class HeisCase(enum.Enum):
    LINE = "line"
    VERTICAL = "vertical"
    HELIX = "helix"


class ConeCase(enum.Enum):
    RADIAL_LINE = "radial_line"
    ARC = "arc"
    GENERAL = "general"
    HORIZONTAL_LIMIT = "horizontal_limit"


@dataclass(frozen=True)
class HeisGeodesic:
    """Unit-speed geodesic of ``(H, g)``.

    ``kappa`` is the complex constant of ``F(s) = kappa exp(-2ics)``: for a
    line ``kappa = a + ib`` and ``c = 0``; for a vertical geodesic
    ``kappa = 0`` and ``c = +-1``.
    """

    base: HeisPoint
    case: HeisCase
    c: float
    kappa: complex

    def __post_init__(self):
        n2 = abs(self.kappa) ** 2 + self.c**2
        if abs(n2 - 1.0) > EPS_UNIT:
            raise ValueError(f"|kappa|^2 + c^2 must equal 1, got {n2!r}")
        if self.case is HeisCase.LINE and self.c != 0.0:
            raise ValueError("a line geodesic has c = 0")
        if self.case is HeisCase.VERTICAL and self.kappa != 0:
            raise ValueError("a vertical geodesic has kappa = 0")
        if self.case is HeisCase.HELIX and not 0 < abs(self.c) < 1:
            raise ValueError("a helix needs 0 < |c| < 1")

    @property
    def a(self) -> float:
        return self.kappa.real

    @property
    def b(self) -> float:
        return self.kappa.imag


@dataclass(frozen=True)
class GeodesicDomain:
    """Open interval ``(s_min, s_max)`` of admissible arc-length parameters."""

    s_min: float
    s_max: float

    def __post_init__(self):
        if not self.s_min < 0 < self.s_max:
            raise ValueError("a geodesic domain must contain s = 0 in its interior")

    def __contains__(self, s) -> bool:
        return self.s_min < s < self.s_max

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.s_min) or math.isfinite(self.s_max)


@dataclass(frozen=True)
class ConeGeodesic:
    base: ConePoint
    case: ConeCase
    c1: float
    c3: float
    C: complex
    phi0: float

    def __post_init__(self):
        r0 = self.base.r
        a2 = r0 * r0 - self.c1 * self.c1
        if a2 < -EPS_UNIT * r0 * r0:
            raise ValueError("need r0^2 - c1^2 >= 0")
        resid = a2 - self.c3**2 - abs(self.C) ** 2
        if abs(resid) > EPS_UNIT * max(1.0, r0 * r0):
            raise ValueError(f"need |C|^2 = r0^2 - c1^2 - c3^2, residual {resid!r}")
        radial_c = self.C == 0 and self.c3 == 0
        if (self.case is ConeCase.RADIAL_LINE) != radial_c:
            raise ValueError("RADIAL_LINE is exactly the case C = 0, c3 = 0")
        if self.case is ConeCase.ARC and not (self.C == 0 and self.c3 != 0):
            raise ValueError("ARC needs C = 0 and c3 != 0")
        if self.case is ConeCase.GENERAL and not (self.C != 0 and self.c3 != 0):
            raise ValueError("GENERAL needs C != 0 and c3 != 0")
        if self.case is ConeCase.HORIZONTAL_LIMIT and not (self.C != 0 and self.c3 == 0):
            raise ValueError("HORIZONTAL_LIMIT needs C != 0 and c3 = 0")

    @property
    def a2(self) -> float:
        """``r0^2 - c1^2``, the squared minimum radius along the geodesic."""
        return self.c3 * self.c3 + abs(self.C) ** 2

    @property
    def sign(self) -> int:
        """Direction of a radial line: +1 outward, -1 inward."""
        return 1 if self.c1 > 0 else -1

    @property
    def domain(self) -> GeodesicDomain:
        return geodesic_domain(self)


# -- numerically stable kernels ---------------------------------------------------


def _expm1i_over(d):
    """``(exp(i d) - 1) / d`` with value ``i`` at ``d = 0``."""
    d = np.asarray(d, dtype=float)
    safe = np.where(d == 0.0, 1.0, d)
    half = np.sin(0.5 * safe)
    out = (-2.0 * half * half + 1j * np.sin(safe)) / safe
    return np.where(d == 0.0, 1j, out)


def _q(d):
    """``(d - sin d) / d^2``; series below |d| = 1e-2 avoids cancellation."""
    d = np.asarray(d, dtype=float)
    d2 = d * d
    series = d / 6.0 * (1.0 - d2 / 20.0 * (1.0 - d2 / 42.0 * (1.0 - d2 / 72.0)))
    safe = np.where(d2 == 0.0, 1.0, d2)
    direct = (d - np.sin(d)) / safe
    return np.where(np.abs(d) < 1e-2, series, direct)


# -- Heisenberg group --------------------------------------------------------------


def heis_geodesic_from_ic(p0: HeisPoint, v0: FrameVecH) -> HeisGeodesic:
    require_unit(v0)
    f, g, h = v0
    if abs(h) < CLASSIFY_TOL:
        n = math.hypot(f, g)
        return HeisGeodesic(p0, HeisCase.LINE, 0.0, complex(f / n, g / n))
    if 1.0 - abs(h) < CLASSIFY_TOL:
        return HeisGeodesic(p0, HeisCase.VERTICAL, math.copysign(1.0, h), 0j)
    return HeisGeodesic(p0, HeisCase.HELIX, h, complex(f, g))


def heis_geodesic_eval_array(geo: HeisGeodesic, s) -> np.ndarray:
    """Points ``(x, y, t)`` at each parameter in ``s``; shape ``s.shape + (3,)``."""
    s = np.asarray(s, dtype=float)
    x0, y0, t0 = geo.base
    z0 = geo.base.z
    c, kappa = geo.c, geo.kappa
    if geo.case is HeisCase.LINE:
        z = z0 + kappa * s
        t = 2.0 * (geo.a * y0 - geo.b * x0) * s + t0
    elif geo.case is HeisCase.VERTICAL:
        z = np.full(s.shape, z0, dtype=complex)
        t = 2.0 * c * s + t0
    else:
        # u = 2cs; z - z0 = i kappa (e^{-iu} - 1) / (2c) = -i kappa s E(-u)
        u = 2.0 * c * s
        e = _expm1i_over(-u)
        z = z0 - 1j * kappa * s * e
        t = t0 + 2.0 * s * s * _q(u) + 0.5 * (u + np.sin(u)) + 2.0 * s * np.real(np.conj(z0) * kappa * e)
    return np.stack([np.real(z), np.imag(z), np.broadcast_to(t, s.shape)], axis=-1)


def heis_geodesic_velocity_array(geo: HeisGeodesic, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    F = geo.kappa * np.exp(-2j * geo.c * s)
    h = np.full(s.shape, geo.c)
    return np.stack([np.real(F), np.imag(F), h], axis=-1)


def heis_geodesic_eval(geo: HeisGeodesic, s: float) -> HeisPoint:
    return HeisPoint(*(float(v) for v in heis_geodesic_eval_array(geo, s)))


def heis_geodesic_velocity(geo: HeisGeodesic, s: float) -> FrameVecH:
    return FrameVecH(*(float(v) for v in heis_geodesic_velocity_array(geo, s)))


# -- cone ------------------------------------------------------------------------


def cone_geodesic_from_ic(q0: ConePoint, v0: FrameVecC) -> ConeGeodesic:
    require_unit(v0)
    r0 = q0.r
    f, g, h, k = v0
    F0 = complex(f, g)
    if abs(h) < CLASSIFY_TOL:
        h = 0.0
    if abs(F0) < CLASSIFY_TOL:
        F0 = 0j
    if h == 0.0 and F0 == 0:
        c1 = math.copysign(r0, k)
        return ConeGeodesic(q0, ConeCase.RADIAL_LINE, c1, 0.0, 0j, 0.0)
    c1 = r0 * k
    c3 = r0 * h
    C0 = r0 * F0  # = C e^{i Phi(0)}
    a = math.sqrt(c3 * c3 + abs(C0) ** 2)
    phi0 = -2.0 * c3 * math.atan2(c1, a) / a
    C = C0 * complex(math.cos(phi0), -math.sin(phi0))
    if F0 == 0:
        case = ConeCase.ARC
    elif c3 == 0.0:
        case = ConeCase.HORIZONTAL_LIMIT
    else:
        case = ConeCase.GENERAL
    return ConeGeodesic(q0, case, c1, c3, C, phi0)


def geodesic_domain(geo: ConeGeodesic) -> GeodesicDomain:
    if geo.case is not ConeCase.RADIAL_LINE:
        return GeodesicDomain(-math.inf, math.inf)
    # r(s) = r0 + sign * s
    if geo.sign > 0:
        return GeodesicDomain(-geo.base.r, math.inf)
    return GeodesicDomain(-math.inf, geo.base.r)


def _radius(geo: ConeGeodesic, s: np.ndarray) -> np.ndarray:
    if geo.case is ConeCase.RADIAL_LINE:
        r = geo.base.r + geo.sign * s
    else:
        w = s + geo.c1
        r = np.sqrt(w * w + geo.a2)
    r = np.where(s == 0.0, geo.base.r, r)
    bad = ~(r > R_MIN)
    if np.any(bad):
        s_bad = np.asarray(s)[bad].flat[0]
        raise DomainError(f"s={s_bad!r} is outside the geodesic domain {geo.domain}")
    return r


def _arc_integral(geo: ConeGeodesic, s: np.ndarray) -> np.ndarray:
    """``A(s) = integral_0^s du / r(u)^2`` on the continuous branch."""
    r0, c1 = geo.base.r, geo.c1
    a = math.sqrt(geo.a2)
    den = r0 * r0 + c1 * s
    if a == 0.0:
        return s / den
    return np.arctan2(s * a, den) / a


def cone_geodesic_eval_array(geo: ConeGeodesic, s) -> np.ndarray:
    """Points ``(x, y, t, r)`` at each parameter in ``s``; shape ``s.shape + (4,)``."""
    s = np.asarray(s, dtype=float)
    r = _radius(geo, s)
    x0, y0, t0, _ = geo.base
    if geo.case is ConeCase.RADIAL_LINE:
        x = np.full(s.shape, x0)
        y = np.full(s.shape, y0)
        t = np.full(s.shape, t0)
        return np.stack([x, y, t, r], axis=-1)
    z0 = geo.base.z
    A = _arc_integral(geo, s)
    D = -2.0 * geo.c3 * A
    C0 = geo.C * complex(math.cos(geo.phi0), math.sin(geo.phi0))
    E = _expm1i_over(D)
    z = z0 - 1j * C0 * A * E
    t = (
        t0
        + 2.0 * geo.c3 * A
        - 2.0 * abs(C0) ** 2 * A * A * _q(D)
        + 2.0 * A * np.real(np.conj(z0) * C0 * E)
    )
    return np.stack([np.real(z), np.imag(z), t, r], axis=-1)


def cone_geodesic_velocity_array(geo: ConeGeodesic, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    r = _radius(geo, s)
    if geo.case is ConeCase.RADIAL_LINE:
        zero = np.zeros(s.shape)
        return np.stack([zero, zero, zero, np.full(s.shape, float(geo.sign))], axis=-1)
    D = -2.0 * geo.c3 * _arc_integral(geo, s)
    F = geo.C * np.exp(1j * (geo.phi0 + D)) / r
    return np.stack([np.real(F), np.imag(F), geo.c3 / r, (s + geo.c1) / r], axis=-1)


def cone_geodesic_eval(geo: ConeGeodesic, s: float) -> ConePoint:
    return ConePoint(*(float(v) for v in cone_geodesic_eval_array(geo, s)))


def cone_geodesic_velocity(geo: ConeGeodesic, s: float) -> FrameVecC:
    return FrameVecC(*(float(v) for v in cone_geodesic_velocity_array(geo, s)))
