"""Exact time evolution: matrix exponentials and adaptive integration.

Constant generators are propagated with ``scipy.linalg.expm`` (scaling and
squaring).  Time-dependent generators are integrated with an embedded 4(5)
adaptive Runge-Kutta pair (scipy's RK45) at a caller-chosen local tolerance,
default 1e-10: the perturbative error bounds checked elsewhere in the
package are meaningless if this oracle layer is loose.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .operators import OperatorSum
from .spaces import DimensionMismatchError, HilbertSpace
from .states import DensityMatrix, PureState

DEFAULT_TOL = 1e-10


class ToleranceError(RuntimeError):
    """The adaptive integrator failed to meet the requested tolerance."""


class SchedulePiece:
    __slots__ = ("t_start", "t_end", "builder")

    def __init__(self, t_start: float, t_end: float, builder: Callable[[float], np.ndarray]):
        if not t_end > t_start:
            raise ValueError("schedule piece must have t_end > t_start")
        self.t_start = float(t_start)
        self.t_end = float(t_end)
        self.builder = builder


class Schedule:
    """Hamiltonian over time: a constant operator or contiguous pieces.

    Pieces hold a callable ``t -> dense Hamiltonian matrix``.  Pieces must
    be contiguous and non-overlapping; the last piece is extended to any
    later time the caller asks for.
    """

    def __init__(self, space: HilbertSpace, constant: OperatorSum | np.ndarray | None = None,
                 pieces: Sequence[SchedulePiece] | None = None):
        if (constant is None) == (pieces is None):
            raise ValueError("give either a constant operator or a list of pieces")
        self.space = space
        if constant is not None:
            # any object exposing .matrix() (OperatorSum or a dense wrapper) works
            mat = constant.matrix() if hasattr(constant, "matrix") else \
                np.asarray(constant, dtype=complex)
            if mat.shape != (space.dim, space.dim):
                raise DimensionMismatchError("constant Hamiltonian does not match the space")
            self.constant_matrix = mat
            self.pieces = None
        else:
            pieces = list(pieces)
            for prev, nxt in zip(pieces, pieces[1:]):
                if abs(prev.t_end - nxt.t_start) > 1e-15:
                    raise ValueError("schedule pieces must be contiguous and non-overlapping")
            self.constant_matrix = None
            self.pieces = pieces

    @staticmethod
    def constant(op, space: HilbertSpace | None = None) -> "Schedule":
        if space is None:
            space = getattr(op, "space", None)
            if space is None:
                raise ValueError("space required when passing a raw matrix")
        return Schedule(space, constant=op)

    @staticmethod
    def time_dependent(space: HilbertSpace, builder: Callable[[float], np.ndarray],
                       t_start: float = 0.0, t_end: float = np.inf) -> "Schedule":
        return Schedule(space, pieces=[SchedulePiece(t_start, t_end, builder)])

    @property
    def is_constant(self) -> bool:
        return self.constant_matrix is not None

    def matrix_at(self, t: float) -> np.ndarray:
        if self.is_constant:
            return self.constant_matrix
        for piece in self.pieces:
            if piece.t_start <= t <= piece.t_end:
                return piece.builder(t)
        # extend the last piece beyond its nominal end
        return self.pieces[-1].builder(t)

    def _segments(self, t0: float, t1: float):
        """Yield (a, b, builder|None) sub-intervals covering [t0, t1]."""
        if self.is_constant:
            yield t0, t1, None
            return
        t = t0
        for piece in self.pieces:
            if piece.t_end <= t or piece.t_start >= t1:
                continue
            a, b = max(t, piece.t_start), min(t1, piece.t_end)
            if b > a:
                yield a, b, piece.builder
                t = b
        if t < t1:  # beyond the last piece
            yield t, t1, self.pieces[-1].builder


def _integrate(rhs, y0: np.ndarray, t0: float, t1: float, tol: float,
               t_eval=None) -> np.ndarray:
    sol = solve_ivp(rhs, (t0, t1), y0, method="RK45", rtol=tol,
                    atol=tol * 1e-2, t_eval=t_eval, dense_output=False)
    if not sol.success:
        raise ToleranceError(f"adaptive integration failed: {sol.message}")
    return sol.y


def evolve(state: PureState | DensityMatrix, h: Schedule, t0: float, t1: float,
           tol: float = DEFAULT_TOL):
    """Propagate ``state`` under ``h`` from ``t0`` to ``t1``.

    Returns the same kind of state.  Norm/trace drift is monitored through
    the returned object's ``norm_error`` / ``trace_error``.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if state.space != h.space:
        raise DimensionMismatchError("state and schedule live on different spaces")
    if t1 == t0:
        return state

    if isinstance(state, PureState):
        psi = state.amplitudes
        if h.is_constant:
            psi = expm(-1j * h.constant_matrix * (t1 - t0)) @ psi
        else:
            for a, b, builder in h._segments(t0, t1):
                rhs = lambda t, y: -1j * (builder(t) @ y)
                psi = _integrate(rhs, psi, a, b, tol)[:, -1]
        return PureState(state.space, psi)

    rho = state.matrix
    if h.is_constant:
        u = expm(-1j * h.constant_matrix * (t1 - t0))
        rho = u @ rho @ u.conj().T
    else:
        d = state.space.dim

        def make_rhs(builder):
            def rhs(t, y):
                m = y.reshape(d, d)
                ht = builder(t)
                return (-1j * (ht @ m - m @ ht)).reshape(-1)
            return rhs

        y = rho.reshape(-1)
        for a, b, builder in h._segments(t0, t1):
            y = _integrate(make_rhs(builder), y, a, b, tol)[:, -1]
        rho = y.reshape(d, d)
        rho = 0.5 * (rho + rho.conj().T)  # remove integrator's Hermiticity dust
    return DensityMatrix(state.space, rho)


def evolve_trace(state: PureState, h: Schedule, times: Sequence[float],
                 tol: float = DEFAULT_TOL) -> list:
    """States at each checkpoint of a nondecreasing ``times`` grid (pure only)."""
    times = list(times)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be nondecreasing")
    out = []
    current = state
    t_prev = times[0]
    current = evolve(state, h, 0.0, t_prev, tol) if t_prev > 0 else state
    out.append(current)
    for t in times[1:]:
        current = evolve(current, h, t_prev, t, tol)
        out.append(current)
        t_prev = t
    return out


def propagator(h: Schedule, t0: float, t1: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Dense unitary U(t1; t0) of the schedule.

    Constant schedules get a single matrix exponential; time-dependent ones
    integrate the full matrix column block through the adaptive stepper.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    d = h.space.dim
    if t1 == t0:
        return np.eye(d, dtype=complex)
    if h.is_constant:
        return expm(-1j * h.constant_matrix * (t1 - t0))
    u = np.eye(d, dtype=complex)
    for a, b, builder in h._segments(t0, t1):
        def rhs(t, y):
            m = y.reshape(d, d)
            return (-1j * (builder(t) @ m)).reshape(-1)
        u = _integrate(rhs, u.reshape(-1), a, b, tol)[:, -1].reshape(d, d)
    return u
