"""Integration of the controlled, damped Euler-Frahm equation and steering.

The state is propagated in Theta-coordinates with classical fixed-step RK4::

    x' = B(x, x)/2 - nu x + sum_i u_i(t) g_i

where ``B`` is the body's beta tensor and ``u`` is piecewise constant on a
uniform segment grid. The step is shrunk so every segment holds a whole
number of steps. Increments are accumulated with compensated summation so
roundoff does not mask the O(dt^4) truncation error on long runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import DimensionError, DivergenceError, InvalidInputError
from .lie_so_n import SkewMatrix, coords_to_matrices
from .rigid_body import RigidBody

ERROR_TARGET = 1e-3
FD_STEP = 1e-6
# residual substituted for diverged shooting candidates
_DIVERGED = 1e3


@dataclass(frozen=True, eq=False)
class ControlledSystem:
    body: RigidBody
    nu: float = 0.0
    directions: tuple[SkewMatrix, ...] = ()
    schedule: np.ndarray | None = None  # (r, segments)

    def __post_init__(self):
        if not self.nu >= 0:
            raise InvalidInputError(f"damping must be >= 0, got {self.nu}")
        object.__setattr__(self, "directions", tuple(self.directions))
        self.body.check(*self.directions)
        if self.schedule is not None:
            sched = np.atleast_2d(np.asarray(self.schedule, dtype=float))
            if sched.shape[0] != len(self.directions) or sched.shape[1] < 1:
                raise DimensionError(
                    f"schedule must have shape (r={len(self.directions)}, segments>=1), got {sched.shape}"
                )
            if not np.all(np.isfinite(sched)):
                raise InvalidInputError("schedule has non-finite values")
            sched.flags.writeable = False
            object.__setattr__(self, "schedule", sched)

    @property
    def r(self) -> int:
        return len(self.directions)

    def with_schedule(self, schedule: np.ndarray | None) -> ControlledSystem:
        return ControlledSystem(self.body, self.nu, self.directions, schedule)

    @property
    def direction_coords(self) -> np.ndarray:
        if not self.directions:
            return np.zeros((0, self.body.dim))
        return np.array([g.to_coordinates() for g in self.directions])


@dataclass
class Trajectory:
    n: int
    times: np.ndarray
    coords: np.ndarray  # (N + 1, d)
    dt: float
    order: int = 4

    @property
    def states(self) -> list[SkewMatrix]:
        return [SkewMatrix.from_coordinates(c, self.n) for c in self.coords]

    @property
    def final(self) -> SkewMatrix:
        return SkewMatrix.from_coordinates(self.coords[-1], self.n)

    def matrices(self) -> np.ndarray:
        return coords_to_matrices(self.coords, self.n)


def step_grid(T: float, dt: float, segments: int) -> tuple[int, float]:
    """Steps per segment and the adjusted step size."""
    if not T > 0:
        raise InvalidInputError(f"T must be positive, got {T}")
    if not 0 < dt <= T:
        raise InvalidInputError(f"need 0 < dt <= T, got dt={dt}")
    seg = T / segments
    m = max(1, math.ceil(seg / dt - 1e-9))
    return m, seg / m


def _rhs(bt2: np.ndarray, nu: float, x: np.ndarray, forcing: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    quad = (x[:, :, None] * x[:, None, :]).reshape(len(x), d * d) @ bt2
    return 0.5 * quad - nu * x + forcing


def _propagate(
    body: RigidBody,
    nu: float,
    gcoords: np.ndarray,
    x0: np.ndarray,
    schedules: np.ndarray | None,
    T: float,
    dt: float,
    keep: bool = False,
):
    """Batched RK4. ``x0`` is (B, d); ``schedules`` is (B, r, K) or None.

    Returns final states (B, d), or the full history (N + 1, B, d) if ``keep``.
    Non-finite states are carried as NaN; callers decide how to report them.
    """
    d = body.dim
    bt2 = body.beta_tensor.reshape(d, d * d).T.copy()
    segments = 1 if schedules is None else schedules.shape[2]
    m, h = step_grid(T, dt, segments)
    x = np.array(x0, dtype=float)
    comp = np.zeros_like(x)  # Kahan compensation for the step increments
    hist = [x.copy()] if keep else None
    for k in range(segments):
        if schedules is None:
            forcing = np.zeros_like(x)
        else:
            forcing = schedules[:, :, k] @ gcoords
        for _ in range(m):
            k1 = _rhs(bt2, nu, x, forcing)
            k2 = _rhs(bt2, nu, x + 0.5 * h * k1, forcing)
            k3 = _rhs(bt2, nu, x + 0.5 * h * k2, forcing)
            k4 = _rhs(bt2, nu, x + h * k3, forcing)
            inc = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - comp
            xn = x + inc
            comp = (xn - x) - inc
            x = xn
            if keep:
                hist.append(x)
    return np.array(hist) if keep else x


def integrate(system: ControlledSystem, omega0: SkewMatrix, T: float, dt: float) -> Trajectory:
    """RK4 trajectory of ``system`` from ``omega0`` over ``[0, T]``.

    The schedule, if any, is spread over ``[0, T]`` in equal segments.

    Raises:
        DivergenceError: a state became non-finite; ``.time`` is the first
            grid time at which that was observed.
    """
    body = system.body
    body.check(omega0)
    sched = None if system.schedule is None else system.schedule[None]
    segments = 1 if sched is None else sched.shape[2]
    m, h = step_grid(T, dt, segments)
    with np.errstate(over="ignore", invalid="ignore"):
        hist = _propagate(
            body, system.nu, system.direction_coords, omega0.to_coordinates()[None],
            sched, T, dt, keep=True,
        )[:, 0, :]
    times = np.arange(hist.shape[0]) * h
    bad = ~np.all(np.isfinite(hist), axis=1)
    if np.any(bad):
        t_bad = float(times[np.argmax(bad)])
        raise DivergenceError(f"state became non-finite at t = {t_bad:.6g}", t_bad)
    return Trajectory(n=body.n, times=times, coords=hist, dt=h)


@dataclass
class ConservationReport:
    energy: float
    trace_m2: float
    trace_m4: float

    def max_drift(self) -> float:
        return max(self.energy, self.trace_m2, self.trace_m4)


def _relative_drift(q: np.ndarray) -> float:
    dev = float(np.max(np.abs(q - q[0])))
    return dev / abs(q[0]) if q[0] != 0 else dev


def invariants(body: RigidBody, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Energy, ``tr M^2`` and ``tr M^4`` for a stack of states ``w`` (..., n, n)."""
    m = body.apply_array(w)
    energy = 0.5 * np.sum(m * w, axis=(-2, -1))
    m2 = m @ m
    tr2 = np.trace(m2, axis1=-2, axis2=-1)
    tr4 = np.sum(m2 * m2, axis=(-2, -1))  # m2 is symmetric
    return energy, tr2, tr4


def conservation_report(body: RigidBody, traj: Trajectory) -> ConservationReport:
    """Maximum relative drift of the free-body invariants along ``traj``."""
    e, t2, t4 = invariants(body, traj.matrices())
    return ConservationReport(_relative_drift(e), _relative_drift(t2), _relative_drift(t4))


@dataclass
class SteerResult:
    schedule: np.ndarray  # (r, segments)
    terminal_error: float
    iterations: int
    success: bool
    attempts: int
    errors: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schedule": self.schedule.tolist(),
            "terminal_error": self.terminal_error,
            "iterations": self.iterations,
            "success": self.success,
            "attempts": self.attempts,
        }


def steer(
    system: ControlledSystem,
    start: SkewMatrix,
    goal: SkewMatrix,
    T: float,
    segments: int,
    max_iter: int = 100,
    seed: int = 0,
    *,
    n_starts: int = 5,
    error_target: float = ERROR_TARGET,
    dt: float = 1e-2,
    init_scale: float = 0.5,
    fd_step: float = FD_STEP,
) -> SteerResult:
    """Find a piecewise-constant control taking ``start`` to ``goal`` in time ``T``.

    Direct shooting: the ``r * segments`` control values are fitted by
    Levenberg-Marquardt on the terminal residual ``Omega(T) - goal`` with a
    forward-difference Jacobian. The zero schedule is accepted outright if it
    already meets ``error_target``; otherwise up to ``n_starts`` seeded random
    initializations are tried, stopping at the first that meets the target.
    Failure is reported through ``success=False``, never raised.
    """
    if segments < 2:
        raise InvalidInputError("segments must be >= 2")
    if system.r < 1:
        raise InvalidInputError("steering needs at least one controlled direction")
    body = system.body
    body.check(start, goal)
    r, nvar = system.r, system.r * segments
    gc = system.direction_coords
    x0 = start.to_coordinates()[None]
    target = goal.to_coordinates()
    scale = math.sqrt(2.0)  # coordinate norm -> Frobenius norm

    def shoot(us: np.ndarray) -> np.ndarray:
        """Residuals for a batch of flat schedules (B, nvar) -> (B, d)."""
        with np.errstate(over="ignore", invalid="ignore"):
            xt = _propagate(
                body, system.nu, gc, np.repeat(x0, len(us), axis=0),
                us.reshape(len(us), r, segments), T, dt,
            )
        res = scale * (xt - target)
        res[~np.all(np.isfinite(res), axis=1)] = _DIVERGED
        return res

    # MINPACK's LM needs at least as many residuals as unknowns; zero rows
    # leave the normal equations unchanged
    pad = max(0, nvar - body.dim)

    def fun(u):
        return np.concatenate([shoot(u[None])[0], np.zeros(pad)])

    def jac(u):
        batch = np.vstack([u, u + fd_step * np.eye(nvar)])
        res = shoot(batch)
        return np.vstack([((res[1:] - res[0]) / fd_step).T, np.zeros((pad, nvar))])

    zero = np.zeros(nvar)
    err0 = float(np.linalg.norm(fun(zero)))
    if err0 < error_target:
        return SteerResult(zero.reshape(r, segments), err0, 0, True, 0, [err0])

    rng = np.random.default_rng(seed)
    best_u, best_err, total_iter, errors = zero, err0, 0, []
    for attempt in range(n_starts):
        u0 = init_scale * rng.standard_normal(nvar)
        sol = least_squares(fun, u0, jac=jac, method="lm", max_nfev=max_iter)
        total_iter += int(sol.njev)
        err = float(np.linalg.norm(fun(sol.x)))
        errors.append(err)
        if err < best_err:
            best_u, best_err = sol.x, err
        if best_err < error_target:
            break
    return SteerResult(
        best_u.reshape(r, segments), best_err, total_iter,
        best_err < error_target, len(errors), errors,
    )
