"""Ancilla-based n-time correlation functions and linear-response quantities.

The protocol measures ``<O_{n-1}(t_{n-1}) ... O_0(t_0)>`` by entangling the
system with one probe qubit: the ancilla starts in ``(|e> + |g>)/sqrt(2)``,
controlled gates ``exp(-i |g><g| (x) (pi/2) O_k)`` interleave with segments
of the system evolution, and the correlator is read off the final ancilla
coherence as ``i^n (<sigma_x> + i <sigma_y>)``.

Conventions fixed here (see :class:`AncillaLayout`):

* the ancilla is subsystem 0 (leftmost) of the enlarged space;
* controlled gates act on the ``|g> = |1>`` branch;
* operator times are nondecreasing, the LEFTMOST operator in the
  correlator carries the LATEST time, and Heisenberg operators are taken
  relative to the first time in the list (the state is prepared at
  ``t = times[0]``).

Shot sampling derives the j-th outcome of a run from a counter-based
generator keyed by the plan's master seed, so outcome streams are a pure
function of ``(master_seed, shot_index)`` and results are bit-identical
under any parallel evaluation order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .qcore import (
    DensityMatrix,
    HilbertSpace,
    OperatorSum,
    PureState,
    Qubit,
    Schedule,
    expectation,
    pauli_decompose,
    propagator,
)
from .qcore.operators import PAULI_LABELS, PROJ_E, PROJ_G, SIGMA_X, SIGMA_Y, dense_pauli
from .qcore.spaces import DimensionMismatchError


@dataclass(frozen=True)
class AncillaLayout:
    """Fixed wiring of the probe qubit (documentation of the convention)."""

    ancilla_index: int = 0
    control_level: str = "g"   # controlled gates act on the |g> = |1> branch


LAYOUT = AncillaLayout()


@dataclass(frozen=True)
class ShotPlan:
    """Sampling plan: total shots, split evenly between sigma_x and sigma_y."""

    shots: int
    master_seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass(frozen=True)
class CorrelationSpec:
    """What to correlate: evolution, ordered times, operators, initial state."""

    evolution: Schedule
    times: tuple
    operators: tuple
    initial: PureState | DensityMatrix
    tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "operators", tuple(self.operators))
        n = len(self.times)
        if n < 1 or len(self.operators) != n:
            raise ValueError("need n >= 1 operators with one time each")
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be nondecreasing")
        for op in self.operators:
            if op.space != self.system:
                raise DimensionMismatchError("operator does not live on the system space")
        if self.initial.space != self.system:
            raise DimensionMismatchError("initial state does not live on the system space")

    @property
    def system(self) -> HilbertSpace:
        return self.evolution.space

    @property
    def order(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# exact oracle
# ---------------------------------------------------------------------------

class _PropagatorCache:
    """U(t; t_ref) for the unique times of a chain, reused on both sides."""

    def __init__(self, evolution: Schedule, t_ref: float, tol: float):
        self.evolution = evolution
        self.t_ref = t_ref
        self.tol = tol
        self._cache: dict = {}

    def u(self, t: float) -> np.ndarray:
        if t not in self._cache:
            if t >= self.t_ref:
                self._cache[t] = propagator(self.evolution, self.t_ref, t, self.tol)
            else:
                self._cache[t] = propagator(self.evolution, t, self.t_ref, self.tol).conj().T
        return self._cache[t]

    def heisenberg(self, mat: np.ndarray, t: float) -> np.ndarray:
        u = self.u(t)
        return u.conj().T @ mat @ u


def heisenberg_chain_expectation(evolution: Schedule, chain: Sequence,
                                 initial: PureState | DensityMatrix,
                                 t_ref: float = 0.0, tol: float = 1e-10) -> complex:
    """<M_1(tau_1) M_2(tau_2) ... M_m(tau_m)> for an arbitrary left-to-right chain.

    ``chain`` is a sequence of ``(matrix, time)``; times may be in any
    order (backward propagators are the adjoints of forward ones).  This is
    the package's general-purpose matrix oracle for multi-time products.
    """
    cache = _PropagatorCache(evolution, t_ref, tol)
    mats = [cache.heisenberg(np.asarray(m, dtype=complex), t) for m, t in chain]
    if isinstance(initial, PureState):
        vec = initial.amplitudes
        acc = vec
        for m in reversed(mats):
            acc = m @ acc
        return complex(np.vdot(vec, acc))
    acc = initial.matrix
    for m in reversed(mats):
        acc = m @ acc
    return complex(np.trace(acc))


def correlation_exact(spec: CorrelationSpec) -> complex:
    """Direct matrix evaluation of ``<O_{n-1}(t_{n-1}) ... O_0(t_0)>``."""
    chain = [(op.matrix(), t) for op, t in
             zip(reversed(spec.operators), reversed(spec.times))]
    return heisenberg_chain_expectation(spec.evolution, chain, spec.initial,
                                        t_ref=spec.times[0], tol=spec.tol)


# ---------------------------------------------------------------------------
# ancilla protocol
# ---------------------------------------------------------------------------

def _protocol_terms(op: OperatorSum) -> list:
    """Expand an operator into ``(coeff, unitary-Hermitian matrix)`` terms.

    A scalar multiple of a Pauli string (identity on any bosonic factors)
    passes through as a single term; anything else on a qubit-only space is
    expanded over orthogonal Pauli strings.
    """
    space = op.space
    if len(op.terms) == 1:
        coeff, factors = op.terms[0]
        plain = all(
            (code in PAULI_LABELS) if isinstance(f, Qubit) else (code == "I")
            for f, code in zip(space.factors, factors)
        )
        if plain:
            gen = op.matrix() / coeff if coeff != 1.0 else op.matrix()
            return [(complex(coeff), np.asarray(gen))]
    if not space.is_qubit_only:
        raise ValueError(
            "operator is not a scalar multiple of a Pauli string and the "
            "space has bosonic factors; cannot expand for the ancilla protocol"
        )
    return [(q, dense_pauli(lbl)) for q, lbl in pauli_decompose(op)]


def _controlled(generator_unitary: np.ndarray, system_dim: int) -> np.ndarray:
    """|e><e| (x) 1 + |g><g| (x) V on the ancilla-system space."""
    return np.kron(PROJ_E, np.eye(system_dim, dtype=complex)) + \
        np.kron(PROJ_G, generator_unitary)


def _run_protocol(spec: CorrelationSpec, gate_unitaries: Sequence[np.ndarray]):
    """Final enlarged-space state after gates interleaved with evolution."""
    d = spec.system.dim
    vs = [propagator(spec.evolution, a, b, spec.tol)
          for a, b in zip(spec.times, spec.times[1:])]

    if isinstance(spec.initial, PureState):
        anc = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
        state = np.kron(anc, spec.initial.amplitudes)
        state = _controlled(gate_unitaries[0], d) @ state
        for v, gate in zip(vs, gate_unitaries[1:]):
            state = np.kron(np.eye(2, dtype=complex), v) @ state
            state = _controlled(gate, d) @ state
        return state

    anc = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    rho = np.kron(anc, spec.initial.matrix)
    g0 = _controlled(gate_unitaries[0], d)
    rho = g0 @ rho @ g0.conj().T
    for v, gate in zip(vs, gate_unitaries[1:]):
        big_v = np.kron(np.eye(2, dtype=complex), v)
        rho = big_v @ rho @ big_v.conj().T
        g = _controlled(gate, d)
        rho = g @ rho @ g.conj().T
    return rho


def _ancilla_xy(state, d: int) -> tuple:
    sx = np.kron(SIGMA_X, np.eye(d, dtype=complex))
    sy = np.kron(SIGMA_Y, np.eye(d, dtype=complex))
    if state.ndim == 1:
        return (float(np.real(np.vdot(state, sx @ state))),
                float(np.real(np.vdot(state, sy @ state))))
    return (float(np.real(np.trace(sx @ state))),
            float(np.real(np.trace(sy @ state))))


def _shot_uniforms(master_seed, count: int) -> np.ndarray:
    key = np.asarray(master_seed, dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(count)


def _sample_coherence(x_mean: float, y_mean: float, plan: ShotPlan, stream_key) -> complex:
    half = -(-plan.shots // 2)  # ceil
    u = _shot_uniforms(stream_key, 2 * half)
    px, py = 0.5 * (1.0 + x_mean), 0.5 * (1.0 + y_mean)
    x_shots = np.where(u[:half] < px, 1.0, -1.0)
    y_shots = np.where(u[half:] < py, 1.0, -1.0)
    return complex(np.mean(x_shots), np.mean(y_shots))


def correlation_ancilla(spec: CorrelationSpec, plan: ShotPlan | None = None) -> complex:
    """Correlator via the probe-qubit protocol.

    Each operator must be (a scalar multiple of) a Pauli string or
    Pauli-decomposable; products of expansions are summed.  With ``plan``
    the ancilla coherence of each expanded chain is estimated from
    ``ceil(shots/2)`` sigma_x outcomes and as many sigma_y outcomes
    (physically one cannot measure both in the same shot).
    """
    n = spec.order
    per_op = [_protocol_terms(op) for op in spec.operators]
    total = 0.0 + 0.0j
    for chain_idx, combo in enumerate(itertools.product(*per_op)):
        coeff = 1.0 + 0.0j
        gates = []
        for c, pauli_mat in combo:
            coeff *= c
            gates.append(-1j * pauli_mat)  # exp(-i (pi/2) P) = -i P
        final = _run_protocol(spec, gates)
        x_mean, y_mean = _ancilla_xy(final, spec.system.dim)
        if plan is None:
            coherence = complex(x_mean, y_mean)
        else:
            coherence = _sample_coherence(x_mean, y_mean, plan,
                                          (plan.master_seed, chain_idx))
        total += coeff * (1j ** n) * coherence
    return total


# ---------------------------------------------------------------------------
# bosonic variant: derivative of the ancilla signal
# ---------------------------------------------------------------------------

def _is_flagged_bosonic(op: OperatorSum) -> bool:
    """True for a single term: Pauli letters on qubits, one (a+a^dag) factor."""
    if len(op.terms) != 1:
        return False
    _, factors = op.terms[0]
    n_x = 0
    for f, code in zip(op.space.factors, factors):
        if isinstance(f, Qubit):
            if code not in PAULI_LABELS:
                return False
        else:
            if code == "x":
                n_x += 1
            elif code != "I":
                return False
    return n_x == 1


def correlation_bosonic(spec: CorrelationSpec, h: float = 1e-3,
                        richardson: int = 1) -> complex:
    """Correlator with spin-boson factors ``P (x) (a + a^dag)``.

    Flagged operators contribute through central finite differences of the
    ancilla signal with respect to their gate angle at zero (step ``h``,
    one Richardson extrapolation level by default); plain spin operators
    keep their pi/2 gates.
    """
    if h < 1e-8:
        raise ValueError("derivative step too small: roundoff would dominate")
    n = spec.order
    flagged = [k for k, op in enumerate(spec.operators) if _is_flagged_bosonic(op)]
    scale = 1.0 + 0.0j
    bare = {}
    for k, op in enumerate(spec.operators):
        if k in flagged:
            coeff, _ = op.terms[0]
            scale *= coeff
            bare[k] = op.matrix() / coeff
        else:
            terms = _protocol_terms(op)
            if len(terms) != 1:
                raise ValueError("non-flagged operators must be plain Pauli strings here")
            coeff, pauli = terms[0]
            scale *= coeff
            bare[k] = pauli

    def signal(angles: dict) -> complex:
        gates = []
        for k in range(n):
            if k in flagged:
                gates.append(expm(-1j * angles[k] * bare[k]))
            else:
                gates.append(-1j * bare[k])
        x_mean, y_mean = _ancilla_xy(_run_protocol(spec, gates), spec.system.dim)
        return complex(x_mean, y_mean)

    def derivative(axes: list, angles: dict, step: float) -> complex:
        if not axes:
            return signal(angles)
        k, rest = axes[0], axes[1:]

        def central(s: float) -> complex:
            up = dict(angles); up[k] = angles.get(k, 0.0) + s
            dn = dict(angles); dn[k] = angles.get(k, 0.0) - s
            return (derivative(rest, up, step) - derivative(rest, dn, step)) / (2.0 * s)

        if richardson:
            return (4.0 * central(step / 2.0) - central(step)) / 3.0
        return central(step)

    base = {k: 0.0 for k in flagged}
    value = derivative(flagged, base, h)
    return scale * (1j ** n) * value


# ---------------------------------------------------------------------------
# fermionic variant: Jordan-Wigner expansion
# ---------------------------------------------------------------------------

def jordan_wigner_terms(space: HilbertSpace, mode: int, dagger: bool) -> list:
    """(coeff, label) Pauli expansion of b_mode or b^dag_mode.

    ``b^dag_p -> sigma^+_p (x) prod_{r<p} sigma^z_r`` with the occupied
    level at the computational |0> (= |e>).  sigma^pm = (X +- iY)/2 expands
    each ladder operator into two Pauli strings.
    """
    m = space.n_factors
    if not space.is_qubit_only or mode >= m or mode < 0:
        raise ValueError("mode index out of range for the qubit register")
    prefix = "Z" * mode
    suffix = "I" * (m - mode - 1)
    sign = 1.0j if dagger else -1.0j
    return [(0.5, prefix + "X" + suffix), (0.5 * sign, prefix + "Y" + suffix)]


def fermion_operator_dense(space: HilbertSpace, mode: int, dagger: bool) -> np.ndarray:
    """Occupation-number construction of the same operator (oracle path).

    Walks computational basis states, applying the phase
    ``prod_{r<mode} (+1 if occupied else -1)`` and flipping the target
    occupation; no Pauli matrices involved.
    """
    m = space.n_factors
    d = 2 ** m
    out = np.zeros((d, d), dtype=complex)
    for idx in range(d):
        bits = [(idx >> (m - 1 - r)) & 1 for r in range(m)]  # 0 = occupied (|e>)
        occupied = bits[mode] == 0
        if dagger == occupied:
            continue  # annihilating an empty mode or creating on an occupied one
        phase = 1.0
        for r in range(mode):
            phase *= 1.0 if bits[r] == 0 else -1.0
        new_bits = list(bits)
        new_bits[mode] = 0 if dagger else 1
        new_idx = 0
        for b in new_bits:
            new_idx = (new_idx << 1) | b
        out[new_idx, idx] = phase
    return out


def correlation_fermionic(evolution: Schedule, entries: Sequence, state,
                          plan: ShotPlan | None = None, tol: float = 1e-10) -> complex:
    """``<b(dag)_{p_{n-1}}(t_{n-1}) ... b(dag)_{p_0}(t_0)>`` via the ancilla protocol.

    ``entries`` is a sequence of ``(mode, dagger, time)`` with nondecreasing
    times, ordered like the operator list of :class:`CorrelationSpec`
    (entry 0 = earliest = rightmost in the correlator).
    """
    space = evolution.space
    times = [t for _, _, t in entries]
    expansions = [jordan_wigner_terms(space, p, dg) for p, dg, _ in entries]
    total = 0.0 + 0.0j
    for combo in itertools.product(*expansions):
        coeff = np.prod([c for c, _ in combo])
        ops = tuple(OperatorSum.pauli_string(space, lbl) for _, lbl in combo)
        sub = CorrelationSpec(evolution, tuple(times), ops, state, tol=tol)
        total += coeff * correlation_ancilla(sub, plan)
    return total


# ---------------------------------------------------------------------------
# linear response
# ---------------------------------------------------------------------------

def _two_time_correlator(h0: Schedule, a: OperatorSum, b: OperatorSum, state,
                         tau: float, tol: float) -> complex:
    """<B(tau) A(0)> through the protocol machinery."""
    spec = CorrelationSpec(h0, (0.0, tau), (a, b), state, tol=tol)
    if _is_flagged_bosonic(b) or _is_flagged_bosonic(a):
        return correlation_bosonic(spec)
    return correlation_ancilla(spec)


def response_function(h0: Schedule, a: OperatorSum, b: OperatorSum, state,
                      t_grid: Sequence, tol: float = 1e-10) -> np.ndarray:
    """phi(t) = i <[B(t), A(0)]> on the grid, from ancilla correlators.

    For Hermitian A and B the commutator expectation is ``2i Im <B(t)A(0)>``
    so a single protocol per grid point suffices; the conjugate ordering is
    implied.
    """
    for name, op in (("A", a), ("B", b)):
        mat = op.matrix()
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError(f"{name} must be Hermitian")
    out = np.empty(len(t_grid), dtype=float)
    for i, tau in enumerate(t_grid):
        c = _two_time_correlator(h0, a, b, state, float(tau), tol)
        out[i] = -2.0 * c.imag  # i*(c - conj(c))
    return out


def susceptibility(phi: np.ndarray, t_grid: Sequence, omega: float) -> complex:
    """chi(omega) = int_0^t phi(u) exp(-i omega u) du by the trapezoid rule."""
    t_grid = np.asarray(t_grid, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if t_grid.size < 2 or phi.shape != t_grid.shape:
        raise ValueError("need matching phi/time grids with at least two points")
    dt_max = float(np.max(np.diff(t_grid)))
    if abs(omega) * dt_max >= math.pi:
        raise ValueError("response grid too coarse for this frequency (Nyquist)")
    integrand = phi * np.exp(-1j * omega * t_grid)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return complex(trapezoid(integrand, t_grid))


def linear_response_check(h0: Schedule, a: OperatorSum, b: OperatorSum, state,
                          f: float, omega: float, t: float,
                          n_grid: int = 201, tol: float = 1e-10) -> tuple:
    """(predicted, exact) <B(t)> under the drive ``2 f cos(omega s) A``.

    ``predicted`` combines the unperturbed value with the first-order
    susceptibility integral; ``exact`` integrates the perturbed Schroedinger
    equation.  Their gap is the quadratic remainder, O(f^2).
    """
    grid = np.linspace(0.0, t, n_grid)
    phi = response_function(h0, a, b, state, grid, tol=tol)
    chi = susceptibility(phi, grid, omega)
    evolved = _evolve_any(state, h0, t, tol)
    base = expectation(evolved, b).real
    predicted = base - 2.0 * f * (np.exp(1j * omega * t) * chi).real

    h0_mat = _schedule_matrix_fn(h0)
    a_mat = a.matrix()
    builder = lambda s: h0_mat(s) + (2.0 * f * math.cos(omega * s)) * a_mat
    perturbed = Schedule.time_dependent(h0.space, builder)
    exact_state = _evolve_any(state, perturbed, t, tol)
    exact = expectation(exact_state, b).real
    return float(predicted), float(exact)


def _schedule_matrix_fn(h: Schedule) -> Callable[[float], np.ndarray]:
    if h.is_constant:
        mat = h.constant_matrix
        return lambda t: mat
    return h.matrix_at


def _evolve_any(state, h: Schedule, t: float, tol: float):
    from .qcore import evolve
    return evolve(state, h, 0.0, t, tol)


# ---------------------------------------------------------------------------
# cost accounting
# ---------------------------------------------------------------------------

def gate_count(n: int, q: int, m: int = 4) -> int:
    """Total gates for an order-n correlation: n controlled gates at m
    entangling gates each plus n-1 evolution segments at q gates each,
    i.e. (m+q)*n - q."""
    if n < 1:
        raise ValueError("order must be >= 1")
    return (m + q) * n - q
