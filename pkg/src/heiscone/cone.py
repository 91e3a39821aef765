"""Kähler cone over the Heisenberg group.

The cone is ``H x (0, inf)`` with coordinates ``(x, y, t, r)`` and metric
``g_r = dr^2 + r^2 g`` where ``g`` is the Sasakian metric ``g_{1/4}``.  Its
orthonormal frame is

    X_r = X / r,  Y_r = Y / r,  T_r = T~ / r,  R_r = d/dr

and frame components of a velocity are written ``(f, g, h, k)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .heisenberg import (
    CoordVecH,
    HeisPoint,
    _check_finite,
    _Tuple,
    contact_form,
    metric_g,
)

R_MIN = 1e-12


class DomainError(ValueError):
    """Evaluation requested at (or beyond) the tip ``r = 0`` of the cone."""


def _check_radius(r: float) -> None:
    if not r > R_MIN:
        raise DomainError(f"cone radius must exceed r_min={R_MIN:g}, got r={r!r}")


@dataclass(frozen=True)
class ConePoint(_Tuple):
    x: float
    y: float
    t: float
    r: float

    def __post_init__(self):
        _check_finite(self)
        if not self.r > 0:
            raise DomainError(f"cone radius must be positive, got r={self.r!r}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def heis(self) -> HeisPoint:
        return HeisPoint(self.x, self.y, self.t)


@dataclass(frozen=True)
class CoordVecC(_Tuple):
    dx: float
    dy: float
    dt: float
    dr: float

    def __post_init__(self):
        _check_finite(self)

    def heis(self) -> CoordVecH:
        return CoordVecH(self.dx, self.dy, self.dt)


@dataclass(frozen=True)
class FrameVecC(_Tuple):
    f: float
    g: float
    h: float
    k: float

    def __post_init__(self):
        _check_finite(self)

    def norm(self) -> float:
        return math.sqrt(self.f**2 + self.g**2 + self.h**2 + self.k**2)


class FrameLabelC(enum.Enum):
    X = "X_r"
    Y = "Y_r"
    T = "T_r"
    R = "R_r"


def cone_metric(q: ConePoint, u: CoordVecC, v: CoordVecC) -> float:
    _check_radius(q.r)
    return u.dr * v.dr + q.r**2 * metric_g(q.heis(), u.heis(), v.heis())


def cone_frame_at(q: ConePoint, label: FrameLabelC) -> CoordVecC:
    _check_radius(q.r)
    r = q.r
    if label is FrameLabelC.X:
        return CoordVecC(1.0 / r, 0.0, 2.0 * q.y / r, 0.0)
    if label is FrameLabelC.Y:
        return CoordVecC(0.0, 1.0 / r, -2.0 * q.x / r, 0.0)
    if label is FrameLabelC.T:
        return CoordVecC(0.0, 0.0, 2.0 / r, 0.0)
    return CoordVecC(0.0, 0.0, 0.0, 1.0)


def frame_decompose_cone(q: ConePoint, v: CoordVecC) -> FrameVecC:
    _check_radius(q.r)
    r = q.r
    h = 0.5 * r * contact_form(q.heis(), v.heis())
    return FrameVecC(r * v.dx, r * v.dy, h, v.dr)


def frame_compose_cone(q: ConePoint, w: FrameVecC) -> CoordVecC:
    _check_radius(q.r)
    r = q.r
    dt = (2.0 * w.h - 2.0 * q.x * w.g + 2.0 * q.y * w.f) / r
    return CoordVecC(w.f / r, w.g / r, dt, w.k)


def j_apply(v: FrameVecC) -> FrameVecC:
    """Complex structure: ``J X_r = Y_r, J Y_r = -X_r, J T_r = -R_r, J R_r = T_r``."""
    return FrameVecC(-v.g, v.f, v.k, -v.h)


def j_apply_coord(q: ConePoint, v: CoordVecC) -> CoordVecC:
    return frame_compose_cone(q, j_apply(frame_decompose_cone(q, v)))


def fundamental_form(q: ConePoint, u: CoordVecC, v: CoordVecC) -> float:
    """Kähler form ``d((r^2/4) omega) = (r/2) dr ^ omega + r^2 dx ^ dy`` on ``(u, v)``.

    With this orientation ``Omega(u, v) = g_r(J u, v)``.
    """
    _check_radius(q.r)
    p = q.heis()
    dr_wedge_omega = u.dr * contact_form(p, v.heis()) - v.dr * contact_form(p, u.heis())
    dx_wedge_dy = u.dx * v.dy - u.dy * v.dx
    return 0.5 * q.r * dr_wedge_omega + q.r**2 * dx_wedge_dy


_X, _Y, _T, _R = FrameLabelC.X, FrameLabelC.Y, FrameLabelC.T, FrameLabelC.R

# Coefficients of r * nabla_a b in the frame (X_r, Y_r, T_r, R_r).
_CONNECTION = {
    (_X, _X): (0, 0, 0, -1), (_Y, _X): (0, 0, 1, 0), (_T, _X): (0, 1, 0, 0), (_R, _X): (0, 0, 0, 0),
    (_X, _Y): (0, 0, -1, 0), (_Y, _Y): (0, 0, 0, -1), (_T, _Y): (-1, 0, 0, 0), (_R, _Y): (0, 0, 0, 0),
    (_X, _T): (0, 1, 0, 0), (_Y, _T): (-1, 0, 0, 0), (_T, _T): (0, 0, 0, -1), (_R, _T): (0, 0, 0, 0),
    (_X, _R): (1, 0, 0, 0), (_Y, _R): (0, 1, 0, 0), (_T, _R): (0, 0, 1, 0), (_R, _R): (0, 0, 0, 0),
}  # fmt: skip

# Coefficients of r * [a, b]; pairs absent here (and their reverses) vanish.
_BRACKETS = {
    (_X, _Y): (0, 0, -2, 0),
    (_X, _R): (1, 0, 0, 0),
    (_Y, _R): (0, 1, 0, 0),
    (_T, _R): (0, 0, 1, 0),
}


def connection_c(a: FrameLabelC, b: FrameLabelC, r: float) -> FrameVecC:
    """Levi-Civita ``nabla^r_a b`` of cone frame fields at radius ``r``."""
    _check_radius(r)
    return FrameVecC(*(c / r for c in _CONNECTION[(a, b)]))


def lie_bracket_cone(a: FrameLabelC, b: FrameLabelC, r: float) -> FrameVecC:
    _check_radius(r)
    if (a, b) in _BRACKETS:
        return FrameVecC(*(c / r for c in _BRACKETS[(a, b)]))
    if (b, a) in _BRACKETS:
        return FrameVecC(*(-c / r for c in _BRACKETS[(b, a)]))
    return FrameVecC(0.0, 0.0, 0.0, 0.0)
