"""Heisenberg group with its contact metric (Sasakian) structure.

Points are ``(x, y, t)`` with ``z = x + iy``.  Tangent vectors come in two
flavours: coordinate components ``(dx, dy, dt)`` and components ``(f, g, h)``
in the orthonormal frame ``{X, Y, T~}`` where

    X  = d/dx + 2y d/dt
    Y  = d/dy - 2x d/dt
    T~ = 2 d/dt

Everything downstream of ingestion works in frame components.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

SASAKIAN_L = 0.25
EPS_UNIT = 1e-9


class NonUnitVectorError(ValueError):
    """Raised when a velocity that must have unit length does not."""


def _check_finite(obj) -> None:
    for name, value in zip(obj.__dataclass_fields__, obj):
        if not math.isfinite(value):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite, got {value!r}")


class _Tuple:
    """Mixin giving frozen dataclasses tuple-like iteration."""

    def __iter__(self):
        return iter(getattr(self, name) for name in self.__dataclass_fields__)

    def __len__(self):
        return len(self.__dataclass_fields__)

    def __getitem__(self, i):
        return tuple(self)[i]


@dataclass(frozen=True)
class HeisPoint(_Tuple):
    x: float
    y: float
    t: float

    def __post_init__(self):
        _check_finite(self)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class CoordVecH(_Tuple):
    dx: float
    dy: float
    dt: float

    def __post_init__(self):
        _check_finite(self)


@dataclass(frozen=True)
class FrameVecH(_Tuple):
    f: float
    g: float
    h: float

    def __post_init__(self):
        _check_finite(self)

    def norm(self) -> float:
        return math.sqrt(self.f**2 + self.g**2 + self.h**2)


class FrameLabelH(enum.Enum):
    X = "X"
    Y = "Y"
    T = "T~"


IDENTITY = HeisPoint(0.0, 0.0, 0.0)


def group_mul(p: HeisPoint, q: HeisPoint) -> HeisPoint:
    """Group product ``(z, t) * (w, s) = (z + w, t + s + 2 Im(z conj(w)))``."""
    im = q.x * p.y - p.x * q.y
    return HeisPoint(p.x + q.x, p.y + q.y, p.t + q.t + 2.0 * im)


def group_inv(p: HeisPoint) -> HeisPoint:
    return HeisPoint(-p.x, -p.y, -p.t)


def frame_at(p: HeisPoint, label: FrameLabelH) -> CoordVecH:
    if label is FrameLabelH.X:
        return CoordVecH(1.0, 0.0, 2.0 * p.y)
    if label is FrameLabelH.Y:
        return CoordVecH(0.0, 1.0, -2.0 * p.x)
    return CoordVecH(0.0, 0.0, 2.0)


def contact_form(p: HeisPoint, v: CoordVecH) -> float:
    """``omega = dt + 2x dy - 2y dx`` evaluated on ``v`` at ``p``."""
    return v.dt + 2.0 * p.x * v.dy - 2.0 * p.y * v.dx


def contact_form_tilde(p: HeisPoint, v: CoordVecH) -> float:
    """The rescaled form ``omega / 2``, dual to ``T~``."""
    return 0.5 * contact_form(p, v)


def contact_form_d(p: HeisPoint, u: CoordVecH, v: CoordVecH) -> float:
    """``d omega = 4 dx ^ dy`` evaluated on ``(u, v)``; ``p`` is unused (constant form)."""
    return 4.0 * (u.dx * v.dy - u.dy * v.dx)


def metric_g(p: HeisPoint, u: CoordVecH, v: CoordVecH, L: float = SASAKIAN_L) -> float:
    """Riemannian metric ``g_L = dx^2 + dy^2 + L omega^2``.

    The default ``L = 1/4`` is the contact metric; it makes ``{X, Y, T~}``
    orthonormal.
    """
    if not L > 0:
        raise ValueError(f"metric parameter L must be positive, got {L!r}")
    return u.dx * v.dx + u.dy * v.dy + L * contact_form(p, u) * contact_form(p, v)


def frame_decompose(p: HeisPoint, v: CoordVecH) -> FrameVecH:
    return FrameVecH(v.dx, v.dy, contact_form_tilde(p, v))


def frame_compose(p: HeisPoint, w: FrameVecH) -> CoordVecH:
    return CoordVecH(w.f, w.g, 2.0 * w.h - 2.0 * p.x * w.g + 2.0 * p.y * w.f)


def phi_apply(w: FrameVecH) -> FrameVecH:
    """Extension of the CR structure ``J`` by ``phi(T~) = 0``."""
    return FrameVecH(-w.g, w.f, 0.0)


def require_unit(w, tol: float = EPS_UNIT):
    """Return ``w`` unchanged if it has unit norm within ``tol``."""
    n2 = sum(c * c for c in w)
    if not abs(n2 - 1.0) <= tol:
        raise NonUnitVectorError(
            f"velocity must be unit length (|v|^2 = 1 within {tol:g}), got |v|^2 = {n2!r}"
        )
    return w


def normalize(w):
    """Opt-in rescaling of a nonzero frame vector to unit length."""
    n = math.sqrt(sum(c * c for c in w))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return type(w)(*(c / n for c in w))


_X, _Y, _T = FrameLabelH.X, FrameLabelH.Y, FrameLabelH.T
_ZERO = (0.0, 0.0, 0.0)

# [X, Y] = -4T = -2T~; every other frame bracket vanishes.
_BRACKETS = {(_X, _Y): (0.0, 0.0, -2.0), (_Y, _X): (0.0, 0.0, 2.0)}

_CONNECTION = {
    (_X, _X): (0.0, 0.0, 0.0),
    (_X, _Y): (0.0, 0.0, -1.0),
    (_X, _T): (0.0, 1.0, 0.0),
    (_Y, _X): (0.0, 0.0, 1.0),
    (_Y, _Y): (0.0, 0.0, 0.0),
    (_Y, _T): (-1.0, 0.0, 0.0),
    (_T, _X): (0.0, 1.0, 0.0),
    (_T, _Y): (-1.0, 0.0, 0.0),
    (_T, _T): (0.0, 0.0, 0.0),
}


def lie_bracket(a: FrameLabelH, b: FrameLabelH) -> FrameVecH:
    return FrameVecH(*_BRACKETS.get((a, b), _ZERO))


def connection_h(a: FrameLabelH, b: FrameLabelH) -> FrameVecH:
    """Levi-Civita covariant derivative ``nabla_a b`` of frame fields, in frame components."""
    return FrameVecH(*_CONNECTION[(a, b)])
