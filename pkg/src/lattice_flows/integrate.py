"""Trajectory integration and invariant-drift reporting.

Two step policies: classic fixed-step fourth-order Runge-Kutta, and the
embedded Fehlberg 4(5) pair with absolute/relative error control.  States
may be complex.  Charts whose coordinates must stay positive are watched at
every accepted step; a crossing halts integration with DomainExit carrying
the partial trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainExit, StepFailure
from .states import State


@dataclass(frozen=True)
class FixedStep:
    """Classic RK4 with constant dt (the final step is clipped to t_end)."""

    dt: float


@dataclass(frozen=True)
class AdaptiveStep:
    """Embedded Fehlberg 4(5) pair with mixed absolute/relative control."""

    rtol: float = 1e-9
    atol: float = 1e-12
    dt_initial: float = 1e-2
    dt_min: float = 1e-12


@dataclass(frozen=True)
class FieldSystem:
    """Minimal system wrapper: a vector field on states plus a positivity flag."""

    key: str
    field_fn: Callable[[State], np.ndarray]
    positive: bool = False

    def field(self, state: State) -> np.ndarray:
        return self.field_fn(state)


@dataclass
class Trajectory:
    system: str
    times: np.ndarray
    states: list[State]
    policy: FixedStep | AdaptiveStep

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) != len(self.states):
            raise ValueError("one state per sample time required")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if len({s.dim for s in self.states}) > 1:
            raise ValueError("state dimension must stay constant along a trajectory")
        self.times = t

    @property
    def final(self) -> State:
        return self.states[-1]


# Fehlberg 4(5) tableau: 4th-order propagation, 5th-order error estimate.
_FEHLBERG_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8, 3680 / 513, -845 / 4104),
    (-8 / 27, 2, -3554 / 2565, 1859 / 4104, -11 / 40),
)
_FEHLBERG_B4 = (25 / 216, 0, 1408 / 2565, 2197 / 4104, -1 / 5, 0)
_FEHLBERG_ERR = (1 / 360, 0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55)


def integrate(system, s0: State, t_end: float, policy) -> Trajectory:
    """Integrate the system's field from s0 to t_end, sampling every accepted step."""
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    times = [0.0]
    states = [s0]
    if t_end == 0.0:
        return Trajectory(getattr(system, "key", "system"), np.array([0.0]), states, policy)

    def f(y):
        return np.asarray(system.field(s0.replace_coords(y)), dtype=complex)

    positive = bool(getattr(system, "positive", False))

    def check_domain(y, t):
        if positive and np.min(y.real) <= 0.0:
            partial = Trajectory(getattr(system, "key", "system"), np.array(times), states, policy)
            raise DomainExit(
                f"positivity-constrained coordinate crossed zero at t = {t:.6g}", partial
            )

    y = s0.array
    t = 0.0
    if isinstance(policy, FixedStep):
        if policy.dt <= 0:
            raise ValueError("dt must be positive")
        while t < t_end - 1e-15 * max(1.0, t_end):
            dt = min(policy.dt, t_end - t)
            y = _rk4_step(f, y, dt)
            t += dt
            check_domain(y, t)
            times.append(t)
            states.append(s0.replace_coords(y))
        return Trajectory(getattr(system, "key", "system"), np.array(times), states, policy)

    if not isinstance(policy, AdaptiveStep):
        raise ValueError(f"unknown step policy {policy!r}")
    dt = min(policy.dt_initial, t_end)
    while t < t_end - 1e-15 * max(1.0, t_end):
        dt = min(dt, t_end - t)
        y_new, err = _fehlberg_step(f, y, dt)
        scale = policy.atol + policy.rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = float(np.max(np.abs(err) / scale)) if err.size else 0.0
        if ratio <= 1.0:
            t += dt
            y = y_new
            check_domain(y, t)
            times.append(t)
            states.append(s0.replace_coords(y))
            grow = 0.9 * ratio ** -0.2 if ratio > 0 else 5.0
            dt *= min(5.0, max(0.2, grow))
        else:
            dt *= max(0.2, 0.9 * ratio**-0.2)
        if dt < policy.dt_min:
            raise StepFailure(f"adaptive step underflow (dt = {dt:.3g}) at t = {t:.6g}")
    return Trajectory(getattr(system, "key", "system"), np.array(times), states, policy)


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _fehlberg_step(f, y, dt):
    ks = []
    for row in _FEHLBERG_A:
        yi = y if not row else y + dt * sum(c * k for c, k in zip(row, ks))
        ks.append(f(yi))
    y_new = y + dt * sum(b * k for b, k in zip(_FEHLBERG_B4, ks))
    err = dt * sum(c * k for c, k in zip(_FEHLBERG_ERR, ks))
    return y_new, np.asarray(err)


# ---------------------------------------------------------------------------
# drift reporting and CSV export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftRecord:
    name: str
    initial: complex
    max_abs_drift: float
    max_rel_drift: float


def drift_report(traj: Trajectory, invariants) -> list[DriftRecord]:
    """Drift of each named invariant against its value at t = 0.

    ``invariants`` maps names to callables State -> complex.  Relative drift
    divides by max(|initial|, 1e-12).
    """
    out = []
    for name, fn in invariants.items():
        values = np.array([fn(s) for s in traj.states], dtype=complex)
        drift = np.max(np.abs(values - values[0]))
        rel = drift / max(abs(values[0]), 1e-12)
        out.append(DriftRecord(name, complex(values[0]), float(drift), float(rel)))
    return out


_COORD_PREFIXES = {
    "qp": ("q", "p"),
    "flaschka_ab": ("a", "b"),
    "volterra_u": ("u", None),
    "volterra_v": ("v", None),
    "c_vars": ("c", None),
}


def coordinate_names(state: State) -> list[str]:
    first, second = _COORD_PREFIXES[state.chart]
    if second is None:
        return [f"{first}{i+1}" for i in range(state.dim)]
    nf = state.split
    return [f"{first}{i+1}" for i in range(nf)] + [f"{second}{i+1}" for i in range(state.dim - nf)]


def _fmt(z: complex) -> str:
    if z.imag == 0.0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}j"


def trajectory_csv(traj: Trajectory, invariants=None) -> str:
    """Render a trajectory as CSV: t, coordinates, then invariant columns."""
    invariants = invariants or {}
    header = ["t"] + coordinate_names(traj.states[0]) + list(invariants)
    lines = [",".join(header)]
    for t, s in zip(traj.times, traj.states):
        cells = [f"{t:.17g}"] + [_fmt(z) for z in s.coords]
        cells += [_fmt(complex(fn(s))) for fn in invariants.values()]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
