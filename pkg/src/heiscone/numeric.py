"""Numerical geodesic integration, kept independent of the closed forms.

States are flat arrays of coordinates followed by frame components:

    Heisenberg: (x, y, t, f, g, h)
    cone:       (x, y, t, r, f, g, h, k)

The coordinate part is recovered by inverting the frame definitions
``f = r x'``, ``g = r y'``, ``h = (r/2)(t' + 2x y' - 2y x')``, ``k = r'``:

    x' = f / r,   y' = g / r,   t' = (2h - 2x g + 2y f) / r,   r' = k

(with ``r = 1`` and no ``k`` for the Heisenberg group).  Every right-hand
side accepts arrays of shape ``(..., dim)`` so a batch of initial
conditions can be stepped together.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .cone import DomainError

R_MIN_INTEGRATION = 1e-9


class IntegrationError(RuntimeError):
    pass


def heis_rhs(state):
    state = np.asarray(state, dtype=float)
    x, y, t, f, g, h = np.moveaxis(state, -1, 0)
    return np.stack(
        [f, g, 2.0 * h - 2.0 * x * g + 2.0 * y * f, 2.0 * g * h, -2.0 * f * h, np.zeros_like(h)],
        axis=-1,
    )


def _cone_rhs_unchecked(state):
    x, y, t, r, f, g, h, k = np.moveaxis(state, -1, 0)
    inv = 1.0 / r
    return np.stack(
        [
            f * inv,
            g * inv,
            (2.0 * h - 2.0 * x * g + 2.0 * y * f) * inv,
            k,
            (2.0 * g * h - k * f) * inv,
            (-2.0 * f * h - k * g) * inv,
            -k * h * inv,
            (1.0 - k * k) * inv,
        ],
        axis=-1,
    )


def cone_rhs(state):
    state = np.asarray(state, dtype=float)
    r = state[..., 3]
    if not np.all(r > R_MIN_INTEGRATION):
        raise DomainError(f"radius fell to r_min={R_MIN_INTEGRATION:g} or below")
    return _cone_rhs_unchecked(state)


@dataclass(frozen=True)
class GeodesicSystem:
    name: str
    dim: int
    rhs: object
    coord_names: tuple
    frame_names: tuple
    radius_index: int | None = None

    def valid(self, state) -> bool:
        if not np.all(np.isfinite(state)):
            return False
        if self.radius_index is None:
            return True
        return bool(np.all(np.asarray(state)[..., self.radius_index] > R_MIN_INTEGRATION))

    def speed2(self, states) -> np.ndarray:
        frame = np.asarray(states)[..., len(self.coord_names):]
        return np.sum(frame * frame, axis=-1)


HEIS = GeodesicSystem("heisenberg", 6, heis_rhs, ("x", "y", "t"), ("f", "g", "h"))
CONE = GeodesicSystem(
    "cone", 8, cone_rhs, ("x", "y", "t", "r"), ("f", "g", "h", "k"), radius_index=3
)


def heis_state(point, frame) -> np.ndarray:
    return np.array([*point, *frame], dtype=float)


def cone_state(point, frame) -> np.ndarray:
    return np.array([*point, *frame], dtype=float)


@dataclass(frozen=True)
class StepPolicy:
    kind: str = "fixed"
    step: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 1e-1

    def __post_init__(self):
        if self.kind not in ("fixed", "adaptive"):
            raise ValueError(f"unknown step policy kind {self.kind!r}")
        if not (self.step > 0 and self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ValueError("step sizes and tolerances must be positive")

    @classmethod
    def fixed(cls, step: float = 1e-3) -> "StepPolicy":
        return cls("fixed", step=step)

    @classmethod
    def adaptive(cls, rel_tol=1e-10, abs_tol=1e-12, max_step=1e-1) -> "StepPolicy":
        return cls("adaptive", rel_tol=rel_tol, abs_tol=abs_tol, max_step=max_step)


@dataclass
class Trace:
    """Sampled trajectory: ``s`` is strictly monotone away from 0 and starts at 0.

    ``breach`` holds the parameter at which the radius reached the
    integration floor, or ``None`` if the requested span was covered.
    """

    system: GeodesicSystem
    s: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    metadata: dict = field(default_factory=dict)
    breach: float | None = None

    def __len__(self):
        return len(self.s)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def coords(self) -> np.ndarray:
        return self.states[:, : len(self.system.coord_names)]

    def frames(self) -> np.ndarray:
        return self.states[:, len(self.system.coord_names):]


def rk4_step(rhs, y, h):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_trial(system, y, h):
    """One RK4 step, or ``None`` if any stage leaves the valid region."""
    rhs = _cone_rhs_unchecked if system is CONE else system.rhs
    stages = []
    yi = y
    for coef in (0.0, 0.5, 0.5, 1.0):
        if coef:
            yi = y + coef * h * stages[-1]
        if not system.valid(yi):
            return None
        stages.append(rhs(yi))
    k1, k2, k3, k4 = stages
    y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y_new if system.valid(y_new) else None


def _integrate_fixed(system, y0, s_end, step):
    direction = 1.0 if s_end >= 0 else -1.0
    n_full = int(np.floor(abs(s_end) / step + 1e-9))
    ss = [0.0]
    ys = [y0]
    s, y = 0.0, y0
    breach = None
    i = 0
    while direction * (s_end - s) > 1e-15 * max(1.0, abs(s_end)):
        i += 1
        target = s_end if i > n_full else direction * i * step
        h = target - s
        y_new = _rk4_trial(system, y, h)
        if y_new is None:
            # Halve towards the boundary until the step is negligible.
            while y_new is None and abs(h) > 1e-14 * max(1.0, abs(s)):
                h *= 0.5
                y_new = _rk4_trial(system, y, h)
            if y_new is None:
                breach = _extrapolate_breach(system, s, y)
                break
            s = s + h
            y = y_new
            ss.append(s)
            ys.append(y)
            i -= 1  # retry the same grid target
            continue
        s, y = target, y_new
        ss.append(s)
        ys.append(y)
    return np.array(ss), np.array(ys), breach


def _extrapolate_breach(system, s, y):
    ri = system.radius_index
    if ri is None:
        return s
    rdot = _cone_rhs_unchecked(y)[ri]
    if rdot >= 0:
        return s
    return s + (R_MIN_INTEGRATION - y[ri]) / rdot


def _integrate_adaptive(system, y0, s_end, policy):
    events = None
    rhs = system.rhs
    if system.radius_index is not None:
        ri = system.radius_index

        def hit_floor(s, y):
            return y[ri] - R_MIN_INTEGRATION

        hit_floor.terminal = True
        hit_floor.direction = -1
        events = [hit_floor]

        def rhs(y):
            return _cone_rhs_unchecked(y)

    sol = solve_ivp(
        lambda s, y: rhs(y),
        (0.0, s_end),
        y0,
        method="RK45",
        rtol=policy.rel_tol,
        atol=policy.abs_tol,
        max_step=policy.max_step,
        events=events,
    )
    if sol.status == -1:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    ss = sol.t
    ys = sol.y.T
    breach = None
    if sol.status == 1:
        breach = float(sol.t_events[0][0])
        # The event row sits on the floor itself; keep only rows strictly inside.
        keep = ys[:, system.radius_index] > R_MIN_INTEGRATION
        ss, ys = ss[keep], ys[keep]
    return ss, ys, breach


def integrate(system: GeodesicSystem, state0, s_end: float, policy: StepPolicy | None = None) -> Trace:
    """Integrate a geodesic from ``s = 0`` to ``s_end`` (which may be negative).

    Reaching the radius floor is not an error: the trace stops at the last
    valid row and ``Trace.breach`` records where the floor was hit.
    """
    policy = policy or StepPolicy.fixed()
    y0 = np.asarray(state0, dtype=float)
    if y0.shape != (system.dim,):
        raise ValueError(f"expected a state of length {system.dim}, got shape {y0.shape}")
    if not system.valid(y0):
        raise DomainError("initial state is outside the integration domain")
    started = time.perf_counter()
    if policy.kind == "fixed":
        ss, ys, breach = _integrate_fixed(system, y0, float(s_end), policy.step)
    else:
        ss, ys, breach = _integrate_adaptive(system, y0, float(s_end), policy)
    rhs = _cone_rhs_unchecked if system is CONE else system.rhs
    meta = {
        "integrator": "rk4" if policy.kind == "fixed" else "rk45",
        "policy": policy,
        "initial_state": y0.tolist(),
        "s_end": float(s_end),
        "wall_time": time.perf_counter() - started,
    }
    return Trace(system, ss, ys, rhs(ys), meta, None if breach is None else float(breach))


def integrate_batch(system: GeodesicSystem, states0, s_ends, step: float = 1e-3):
    """Fixed-step RK4 for many initial conditions at once.

    Each row ``i`` runs from 0 to ``s_ends[i]`` on the grid ``0, +-step, ...``
    with a shortened final step.  Returns ``(s, states)`` with shapes
    ``(m, n)`` and ``(m, n, dim)``; rows that finished early are repeated.
    Raises :class:`DomainError` if any trajectory leaves the valid region.
    """
    y = np.array(states0, dtype=float)
    s_ends = np.asarray(s_ends, dtype=float)
    n_steps = int(np.ceil(np.max(np.abs(s_ends)) / step - 1e-9))
    s = np.zeros(len(y))
    s_out = [s.copy()]
    y_out = [y.copy()]
    for i in range(1, n_steps + 1):
        target = np.sign(s_ends) * np.minimum(i * step, np.abs(s_ends))
        h = (target - s)[:, None]
        y = rk4_step(system.rhs, y, h)
        s = target
        s_out.append(s.copy())
        y_out.append(y.copy())
    return np.array(s_out), np.array(y_out)


def resample(trace: Trace, s_values) -> Trace:
    """Cubic Hermite dense output at ``s_values`` (within the trace range)."""
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    lo, hi = min(trace.s[0], trace.s[-1]), max(trace.s[0], trace.s[-1])
    span = max(1.0, hi - lo)
    if np.any(s_values < lo - 1e-12 * span) or np.any(s_values > hi + 1e-12 * span):
        raise ValueError(f"resample points must lie in [{lo}, {hi}]")
    order = np.argsort(trace.s)
    spline = CubicHermiteSpline(trace.s[order], trace.states[order], trace.derivs[order], axis=0)
    states = spline(np.clip(s_values, lo, hi))
    exact = np.searchsorted(trace.s[order], s_values)
    for j, (idx, sv) in enumerate(zip(exact, s_values)):
        if idx < len(order) and trace.s[order][idx] == sv:
            states[j] = trace.states[order][idx]
    rhs = _cone_rhs_unchecked if trace.system is CONE else trace.system.rhs
    meta = dict(trace.metadata, resampled=True)
    return Trace(trace.system, s_values, states, rhs(states), meta, trace.breach)
