"""Open-system dynamics by unitary means: exact Lindblad propagation, the
truncated Volterra/Dyson reconstruction of observables from multi-time
correlators, single-shot Monte-Carlo integration over the time simplex,
and the rigorous error-bound calculators (trace-distance, observable,
sample-size, measurement totals, and the non-Hermitian variant).

Vectorization is column-stacking throughout: ``vec(A X B) = (B^T kron A)
vec(X)``, so superoperator matrices are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.integrate import solve_ivp

from .qcore import (
    DensityMatrix,
    HilbertSpace,
    OperatorSum,
    Schedule,
    dense_pauli,
    pauli_decompose,
    propagator,
)
from .qcore.metrics import operator_infinity_norm
from .timecorr import heisenberg_chain_expectation

_GAMMA_SUP_SAMPLES = 1024


def _as_rate(gamma) -> Callable[[float], float]:
    if callable(gamma):
        return gamma
    g = float(gamma)
    return lambda t: g


class _UnitaryFactory:
    """U(a -> b) under the model Hamiltonian, cheap for constant generators.

    Constant Hamiltonians are diagonalized once so each propagator is two
    matrix products; time-dependent ones fall back to the adaptive stepper.
    """

    def __init__(self, h: Schedule, tol: float):
        self.h = h
        self.tol = tol
        if h.is_constant:
            m = h.constant_matrix
            if np.max(np.abs(m - m.conj().T)) > 1e-10:
                raise ValueError("Hamiltonian part must be Hermitian")
            self._evals, self._evecs = np.linalg.eigh(m)
        else:
            self._evals = None

    def u(self, a: float, b: float) -> np.ndarray:
        if self._evals is not None:
            phases = np.exp(-1j * self._evals * (b - a))
            return (self._evecs * phases) @ self._evecs.conj().T
        if b >= a:
            return propagator(self.h, a, b, self.tol)
        return propagator(self.h, b, a, self.tol).conj().T

    def conjugate(self, mat: np.ndarray, a: float, b: float) -> np.ndarray:
        u = self.u(a, b)
        return u @ mat @ u.conj().T


@dataclass(frozen=True)
class Channel:
    operator: OperatorSum
    rate: Callable[[float], float]
    norm_scale: float  # infinity norm absorbed from the raw operator


class LindbladModel:
    """Hermitian generator plus (Lindblad operator, rate) channels.

    Each Lindblad operator is rescaled at construction to infinity norm 1,
    the factor being absorbed into the rate (the master equation is
    invariant under ``L -> L/s, gamma -> s^2 gamma``).  Rates may be
    time-dependent and transiently negative; ``has_negative_rates`` records
    the sign pattern seen on a dense sampling grid.
    """

    def __init__(self, h: Schedule | OperatorSum, channels: Sequence,
                 horizon: float = 1.0):
        if isinstance(h, OperatorSum):
            h = Schedule.constant(h)
        self.h = h
        self.space: HilbertSpace = h.space
        built = []
        for op, gamma in channels:
            scale = op.norm_inf()
            if scale <= 0.0:
                raise ValueError("Lindblad operator must be nonzero")
            rate = _as_rate(gamma)
            built.append(Channel(operator=(1.0 / scale) * op,
                                 rate=(lambda t, r=rate, s=scale: (s ** 2) * r(t)),
                                 norm_scale=scale))
        self.channels = tuple(built)
        self.horizon = float(horizon)
        self.has_negative_rates = bool(
            (self._rate_samples(self.horizon) < 0.0).any()) if built else False

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    def _rate_samples(self, t: float) -> np.ndarray:
        grid = np.linspace(0.0, t, _GAMMA_SUP_SAMPLES + 1)
        return np.array([[ch.rate(s) for s in grid] for ch in self.channels])

    def gamma_bar(self, t: float | None = None) -> float:
        """max_i sup_{s in [0,t]} |gamma_i(s)|.

        Approximated by dense sampling (1024 intervals, endpoints included);
        an exact supremum is not available for arbitrary rate callables.
        """
        if not self.channels:
            return 0.0
        return float(np.max(np.abs(self._rate_samples(self.horizon if t is None else t))))

    def dissipator_matrices(self) -> list:
        return [ch.operator.matrix() for ch in self.channels]


# ---------------------------------------------------------------------------
# exact oracle
# ---------------------------------------------------------------------------

def _vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1, order="F")


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape(d, d, order="F")


def liouvillian_matrix(model: LindbladModel, t: float) -> np.ndarray:
    """Dense superoperator of the master equation at time ``t`` (column stacking)."""
    d = model.space.dim
    eye = np.eye(d, dtype=complex)
    h = model.h.matrix_at(t)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for ch in model.channels:
        l = ch.operator.matrix()
        g = ch.rate(t)
        ldl = l.conj().T @ l
        gen += g * (np.kron(l.conj(), l)
                    - 0.5 * np.kron(eye, ldl)
                    - 0.5 * np.kron(ldl.T, eye))
    return gen


def _rates_constant(model: LindbladModel, t: float, probes: int = 7) -> bool:
    if model.h.is_constant is False:
        return False
    for ch in model.channels:
        vals = [ch.rate(s) for s in np.linspace(0.0, t, probes)]
        if max(vals) - min(vals) > 1e-14 * max(1.0, abs(vals[0])):
            return False
    return True


def lindblad_exact(model: LindbladModel, rho0: DensityMatrix, t: float,
                   tol: float = 1e-10) -> DensityMatrix:
    """Integrate the master equation on the vectorized superoperator.

    Time-independent generators get one matrix exponential; otherwise the
    adaptive stepper runs on vec(rho).
    """
    if rho0.space != model.space:
        raise ValueError("initial state does not live on the model's space")
    if t == 0.0:
        return rho0
    d = model.space.dim
    if _rates_constant(model, t):
        prop = expm(liouvillian_matrix(model, 0.0) * t)
        rho = _unvec(prop @ _vec(rho0.matrix), d)
    else:
        def rhs(s, y):
            return liouvillian_matrix(model, s) @ y

        sol = solve_ivp(rhs, (0.0, t), _vec(rho0.matrix), method="RK45",
                        rtol=tol, atol=tol * 1e-2)
        if not sol.success:
            raise RuntimeError(f"Lindblad integration failed: {sol.message}")
        rho = _unvec(sol.y[:, -1], d)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(model.space, rho)


# ---------------------------------------------------------------------------
# Dyson terms
# ---------------------------------------------------------------------------

def _dissipator_apply(l: np.ndarray, ldl: np.ndarray, g: float, xi: np.ndarray) -> np.ndarray:
    return g * (l @ xi @ l.conj().T - 0.5 * (ldl @ xi + xi @ ldl))


def dyson_term(model: LindbladModel, observable: OperatorSum | np.ndarray,
               rho0: DensityMatrix, channel_indices: Sequence[int],
               times: Sequence[float], t: float, tol: float = 1e-10,
               debug_expand: bool = False,
               _factory: "_UnitaryFactory | None" = None) -> float:
    """Integrand <A_{[i_1..i_n]}(s_1..s_n)> of the order-n Volterra term.

    ``times`` must be sorted descending (t >= s_1 >= ... >= s_n >= 0); the
    chain applies the channel dissipators at those instants between unitary
    segments and closes with Tr[O ...].  With ``debug_expand`` the same
    quantity is recomputed through Pauli-expanded multi-time correlators
    and the two paths are asserted to agree.
    """
    times = [float(s) for s in times]
    n = len(times)
    if len(channel_indices) != n:
        raise ValueError("one channel index per time required")
    if any(b > a for a, b in zip(times, times[1:])) or (n and times[0] > t):
        raise ValueError("times must satisfy t >= s_1 >= ... >= s_n >= 0")
    omat = observable.matrix() if isinstance(observable, OperatorSum) else np.asarray(observable)
    fac = _factory or _UnitaryFactory(model.h, tol)

    xi = rho0.matrix
    current = 0.0
    for k in range(n - 1, -1, -1):
        s_k = times[k]
        xi = fac.conjugate(xi, current, s_k)
        ch = model.channels[channel_indices[k]]
        l = ch.operator.matrix()
        xi = _dissipator_apply(l, l.conj().T @ l, ch.rate(s_k), xi)
        current = s_k
    xi = fac.conjugate(xi, current, t)
    value = float(np.real(np.trace(omat @ xi)))

    if debug_expand:
        alt = _dyson_term_by_correlators(model, omat, rho0, channel_indices, times, t, tol)
        if abs(alt - value) > 1e-8 * max(1.0, abs(value)):
            raise AssertionError(
                f"dual-path mismatch: superoperator {value:.3e} vs expansion {alt:.3e}")
    return value


def _dyson_term_by_correlators(model, omat, rho0, channel_indices, times, t, tol) -> float:
    """Same quantity as a sum of Pauli-string multi-time correlators.

    Expands every Lindblad operator over Pauli strings and distributes the
    nested dissipators into left/right operator chains, each evaluated by
    the generic Heisenberg-chain oracle.
    """
    space = model.space
    o_terms = pauli_decompose(omat, space)
    # chains: list of (coeff, left ops [(mat, time)...], right ops) built
    # outward from O(t); left ops multiply O's left, right ops its right.
    chains = [(q, [(dense_pauli(lbl), t)], []) for q, lbl in o_terms]
    for k, (idx, s) in enumerate(zip(channel_indices, times)):
        ch = model.channels[idx]
        g = ch.rate(s)
        l_terms = pauli_decompose(ch.operator)
        new_chains = []
        for coeff, left, right in chains:
            for ql, lbl_l in l_terms:
                for qr, lbl_r in l_terms:
                    # L^dag ... L sandwich
                    new_chains.append((
                        coeff * g * np.conj(ql) * qr,
                        [(dense_pauli(lbl_l).conj().T, s)] + left,
                        right + [(dense_pauli(lbl_r), s)],
                    ))
                    # -1/2 {L^dag L, .}
                    new_chains.append((
                        -0.5 * coeff * g * np.conj(ql) * qr,
                        [(dense_pauli(lbl_l).conj().T, s), (dense_pauli(lbl_r), s)] + left,
                        right,
                    ))
                    new_chains.append((
                        -0.5 * coeff * g * np.conj(ql) * qr,
                        left,
                        right + [(dense_pauli(lbl_l).conj().T, s), (dense_pauli(lbl_r), s)],
                    ))
        chains = new_chains
    total = 0.0 + 0.0j
    for coeff, left, right in chains:
        total += coeff * heisenberg_chain_expectation(
            model.h, left + right, rho0, t_ref=0.0, tol=tol)
    return float(np.real(total))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _nested_quadrature(fn, t: float, n: int) -> float:
    """Iterated 16-point Gauss-Legendre over the simplex t >= s_1 >= ... >= s_n >= 0."""
    def level(k: int, upper: float, prefix: tuple) -> float:
        nodes = 0.5 * upper * (_GL_NODES + 1.0)
        weights = 0.5 * upper * _GL_WEIGHTS
        acc = 0.0
        for x, w in zip(nodes, weights):
            point = prefix + (x,)
            if k == n:
                acc += w * fn(point)
            else:
                acc += w * level(k + 1, x, point)
        return acc

    return level(1, t, ())


@dataclass(frozen=True)
class MonteCarloPlan:
    samples_per_order: int
    master_seed: int = 0
    shots_per_value: int | None = None  # None: exact single-sample values


@dataclass
class Reconstruction:
    value: float
    per_order: list
    mode: str


def _order_contribution_quadrature(model, omat, rho0, order, t, tol) -> float:
    fac = _UnitaryFactory(model.h, tol)
    if order == 0:
        return float(np.real(np.trace(omat @ fac.conjugate(rho0.matrix, 0.0, t))))
    total = 0.0
    n_ch = model.n_channels
    indices = np.stack(np.meshgrid(*([np.arange(n_ch)] * order), indexing="ij"),
                       axis=-1).reshape(-1, order) if n_ch else np.zeros((0, order), int)
    for idx_combo in indices:
        total += _nested_quadrature(
            lambda s: dyson_term(model, omat, rho0, list(idx_combo), list(s), t, tol,
                                 _factory=fac),
            t, order)
    return total


def _single_shot_value(model, omat, rho0, idx_combo, times, t, rng, shots, tol,
                       fac: "_UnitaryFactory") -> float:
    """Single-shot (or k-shot) unbiased estimate of the Dyson integrand.

    Expands the nested dissipators into Pauli-string chains exactly as the
    measurement protocol would, then replaces every chain's complex
    expectation by +-1 coherence outcomes.
    """
    space = model.space
    o_terms = pauli_decompose(omat, space)
    chains = [(q, [(dense_pauli(lbl), t)], []) for q, lbl in o_terms]
    for idx, s in zip(idx_combo, times):
        ch = model.channels[idx]
        g = ch.rate(s)
        l_terms = pauli_decompose(ch.operator)
        new_chains = []
        for coeff, left, right in chains:
            for ql, lbl_l in l_terms:
                for qr, lbl_r in l_terms:
                    c = coeff * g * np.conj(ql) * qr
                    new_chains.append((c, [(dense_pauli(lbl_l).conj().T, s)] + left,
                                       right + [(dense_pauli(lbl_r), s)]))
                    new_chains.append((-0.5 * c,
                                       [(dense_pauli(lbl_l).conj().T, s),
                                        (dense_pauli(lbl_r), s)] + left, right))
                    new_chains.append((-0.5 * c, left,
                                       right + [(dense_pauli(lbl_l).conj().T, s),
                                                (dense_pauli(lbl_r), s)]))
        chains = new_chains

    def chain_mean(ops) -> complex:
        acc = rho0.matrix
        for mat, tau in reversed(ops):
            u = fac.u(0.0, tau)
            acc = (u.conj().T @ mat @ u) @ acc
        return complex(np.trace(acc))

    total = 0.0
    for coeff, left, right in chains:
        mean = chain_mean(left + right)
        k = shots if shots else 1
        px = np.clip(0.5 * (1.0 + np.clip(mean.real, -1.0, 1.0)), 0.0, 1.0)
        py = np.clip(0.5 * (1.0 + np.clip(mean.imag, -1.0, 1.0)), 0.0, 1.0)
        x_est = np.mean(np.where(rng.random(k) < px, 1.0, -1.0))
        y_est = np.mean(np.where(rng.random(k) < py, 1.0, -1.0))
        total += float(np.real(coeff * complex(x_est, y_est)))
    return total


def _order_contribution_monte_carlo(model, omat, rho0, order, t, plan, tol) -> float:
    if order == 0:
        return _order_contribution_quadrature(model, omat, rho0, 0, t, tol)
    n_ch = model.n_channels
    if n_ch == 0:
        return 0.0
    fac = _UnitaryFactory(model.h, tol)
    total = 0.0
    volume_factor = (n_ch * t) ** order / math.factorial(order)
    for j in range(plan.samples_per_order):
        # per-sample stream: a pure function of (master_seed, order, j)
        key = np.asarray((plan.master_seed, (order << 32) | j), dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        idx_combo = rng.integers(0, n_ch, size=order)
        times = np.sort(rng.uniform(0.0, t, size=order))[::-1]
        if plan.shots_per_value is None:
            val = dyson_term(model, omat, rho0, list(idx_combo), list(times), t, tol,
                             _factory=fac)
        else:
            val = _single_shot_value(model, omat, rho0, idx_combo, times, t,
                                     rng, plan.shots_per_value, tol, fac)
        total += val
    return volume_factor * total / plan.samples_per_order


def reconstruct(model: LindbladModel, observable: OperatorSum | np.ndarray,
                rho0: DensityMatrix, t: float, order: int,
                plan: MonteCarloPlan | None = None, tol: float = 1e-10) -> Reconstruction:
    """Estimate <O>_rho(t) from the Volterra series truncated at ``order``.

    Without a plan the simplex integrals are done by nested Gauss-Legendre
    quadrature (orders <= 3); with a plan each order uses uniform simplex
    sampling with the ``(N t)^n / (n! |Omega_n|) sum`` estimator, optionally
    replacing each sampled value by a k-shot coherence estimate.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if order > 6:
        raise ValueError("order capped at 6 (cost guard)")
    if plan is None and order > 3:
        raise ValueError("quadrature reconstruction supports order <= 3; pass a Monte-Carlo plan")
    omat = observable.matrix() if isinstance(observable, OperatorSum) else np.asarray(observable)
    per_order = []
    for n in range(order + 1):
        if plan is None:
            per_order.append(_order_contribution_quadrature(model, omat, rho0, n, t, tol))
        else:
            per_order.append(_order_contribution_monte_carlo(model, omat, rho0, n, t, plan, tol))
    return Reconstruction(value=float(sum(per_order)), per_order=per_order,
                          mode="quadrature" if plan is None else "monte-carlo")


def truncated_states(model: LindbladModel, rho0: DensityMatrix, t: float,
                     max_order: int, tol: float = 1e-10) -> list:
    """Dense series states [rho~_0(t), rho~_1(t), ..., rho~_max_order(t)].

    Each entry adds the next simplex-integrated correction (nested 16-point
    Gauss-Legendre, matrix-valued).  The truncated states are not exactly
    trace one or positive; that is the point of the bounds.
    """
    if max_order > 3:
        raise ValueError("quadrature series states support order <= 3")
    d = model.space.dim
    fac = _UnitaryFactory(model.h, tol)
    ls = model.dissipator_matrices()
    ldls = [l.conj().T @ l for l in ls]

    def term(order_n):
        if order_n == 0:
            return fac.conjugate(rho0.matrix, 0.0, t)

        def integrand(s):
            # s sorted descending: s_1 >= ... >= s_n
            xi = rho0.matrix
            current = 0.0
            for k in range(order_n - 1, -1, -1):
                xi = fac.conjugate(xi, current, s[k])
                acc = np.zeros_like(xi)
                for ch, l, ldl in zip(model.channels, ls, ldls):
                    acc += _dissipator_apply(l, ldl, ch.rate(s[k]), xi)
                xi = acc
                current = s[k]
            return fac.conjugate(xi, current, t)

        def level(k, upper, prefix):
            nodes = 0.5 * upper * (_GL_NODES + 1.0)
            weights = 0.5 * upper * _GL_WEIGHTS
            acc = np.zeros((d, d), dtype=complex)
            for x, w in zip(nodes, weights):
                point = prefix + (x,)
                acc += w * (integrand(point) if k == order_n else level(k + 1, x, point))
            return acc

        return level(1, t, ())

    out = []
    total = np.zeros((d, d), dtype=complex)
    for n in range(max_order + 1):
        total = total + term(n)
        out.append(total.copy())
    return out


def truncated_state(model: LindbladModel, rho0: DensityMatrix, t: float,
                    order: int, tol: float = 1e-10) -> np.ndarray:
    """Dense matrix of the series state truncated at ``order``."""
    return truncated_states(model, rho0, t, order, tol)[-1]


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def sample_size_bound(delta_n: float, beta: float, n: int, t: float, n_channels: int,
                      m_lindblad: int, m_observable: int, gamma_bar: float) -> int:
    """Smallest |Omega_n| meeting the concentration bound
    ``36 M_O^2 (2+beta) / delta_n^2 * (2 gamma_bar M N t)^(2n) / (n!)^2``.

    Valid only for ``delta_n <= (2 gamma_bar N t)^n / n!``; larger targets
    are rejected (the concentration argument behind the formula needs it).
    """
    if delta_n <= 0:
        raise ValueError("delta_n must be positive")
    validity = (2.0 * gamma_bar * n_channels * t) ** n / math.factorial(n)
    if delta_n > validity * (1.0 + 1e-12):
        raise ValueError(
            f"delta_n = {delta_n} exceeds the validity limit {validity:.6g} "
            "of the concentration bound")
    raw = (36.0 * m_observable ** 2 * (2.0 + beta) / delta_n ** 2
           * (2.0 * gamma_bar * m_lindblad * n_channels * t) ** (2 * n)
           / math.factorial(n) ** 2)
    return int(math.ceil(raw - 1e-9))


def truncation_bound(n: int, t: float, gamma_bar: float, n_channels: int) -> float:
    """Trace-distance bound (2 gamma_bar N t)^(n+1) / (2 (n+1)!)."""
    if t < 0 or gamma_bar < 0 or n_channels < 0:
        raise ValueError("arguments must be nonnegative")
    x = 2.0 * gamma_bar * n_channels * t
    return x ** (n + 1) / (2.0 * math.factorial(n + 1))


def truncation_order(eps_prime: float, t: float, gamma_bar: float, n_channels: int) -> int:
    """Smallest truncation order K with guaranteed trace-distance error
    below ``eps_prime``: K = ceil(2e gamma_bar N t + log(1/(2 eps')) - 1)."""
    if not (0.0 < eps_prime):
        raise ValueError("eps_prime must be positive")
    value = 2.0 * math.e * gamma_bar * n_channels * t + math.log(1.0 / (2.0 * eps_prime)) - 1.0
    return max(0, int(math.ceil(value)))


def total_measurements(eps: float, t: float, gamma_bar: float, n_channels: int,
                       m_lindblad: int, m_observable: int, beta: float,
                       c: float = 0.5) -> int:
    """Σ_{n=0}^K 3^n |Omega_n| with the error split eps' = c*eps and
    delta_n = (1-c) eps / (K+1)."""
    if not (0.0 < eps < 1.0):
        raise ValueError("total error budget must satisfy 0 < eps < 1")
    if not (0.0 < c < 1.0):
        raise ValueError("c must sit strictly between 0 and 1")
    k = truncation_order(c * eps, t, gamma_bar, n_channels)
    delta_n = (1.0 - c) * eps / (k + 1)
    total = 0
    for n in range(k + 1):
        validity = (2.0 * gamma_bar * n_channels * t) ** n / math.factorial(n)
        dn = min(delta_n, validity)  # the error split never exceeds the validity range
        total += 3 ** n * sample_size_bound(dn, beta, n, t, n_channels,
                                            m_lindblad, m_observable, gamma_bar)
    return total


def dissipator_adjoint(model: LindbladModel, omat: np.ndarray, t: float) -> np.ndarray:
    """L_D^dag applied to an observable at time ``t``."""
    acc = np.zeros_like(omat)
    for ch in model.channels:
        l = ch.operator.matrix()
        ldl = l.conj().T @ l
        acc += ch.rate(t) * (l.conj().T @ omat @ l - 0.5 * (ldl @ omat + omat @ ldl))
    return acc


def observable_bound(model: LindbladModel, observable: OperatorSum | np.ndarray,
                     n: int, t: float) -> float:
    """(||L_D^dag O||_inf / ||O||_inf) (2 gamma_bar N)^n t^(n+1) / (2(n+1)!).

    ``||L_D^dag O||_inf`` is evaluated densely and maximized over the
    rate-sampling grid when rates are time-dependent.
    """
    omat = observable.matrix() if isinstance(observable, OperatorSum) else np.asarray(observable)
    o_norm = operator_infinity_norm(omat)
    if o_norm == 0.0:
        raise ValueError("observable must be nonzero")
    if np.max(np.abs(omat - omat.conj().T)) > 1e-10:
        raise ValueError("observable must be Hermitian")
    grid = np.linspace(0.0, t, 33)
    ld_norm = max(operator_infinity_norm(dissipator_adjoint(model, omat, s)) for s in grid)
    gb = model.gamma_bar(t)
    return (ld_norm / o_norm) * (2.0 * gb * model.n_channels) ** n \
        * t ** (n + 1) / (2.0 * math.factorial(n + 1))


# ---------------------------------------------------------------------------
# non-Hermitian Hamiltonians
# ---------------------------------------------------------------------------

def nonhermitian_evolve(h: OperatorSum, gamma_op: OperatorSum, rho0: DensityMatrix,
                        t: float, order: int | None = None,
                        tol: float = 1e-10) -> DensityMatrix | np.ndarray:
    """d rho/dt = -i[H, rho] - {Gamma, rho} with J = H - i Gamma.

    ``order=None`` propagates exactly: rho(t) = e^{-iJt} rho0 e^{+iJ^dag t}
    (trace decays for positive semidefinite Gamma).  An integer order
    treats the anticommutator as the perturbation and sums the Volterra
    series by nested quadrature.
    """
    hm, gm = h.matrix(), gamma_op.matrix()
    for name, m in (("H", hm), ("Gamma", gm)):
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError(f"{name} must be Hermitian")
    gamma_psd = bool(np.linalg.eigvalsh(gm)[0] >= -1e-12)
    space = h.space

    if order is None:
        j = hm - 1j * gm
        u = expm(-1j * j * t)
        rho = u @ rho0.matrix @ u.conj().T
        tr = float(np.real(np.trace(rho)))
        if gamma_psd and tr > 1.0 + 1e-6:
            raise ValueError(
                f"trace grew to {tr:.8f} although Gamma is positive semidefinite; "
                "check the inputs")
        return DensityMatrix(space, 0.5 * (rho + rho.conj().T), check_trace=False)

    d = space.dim
    fac = _UnitaryFactory(Schedule.constant(h), tol)

    def term(order_n):
        if order_n == 0:
            return fac.conjugate(rho0.matrix, 0.0, t)

        def integrand(s):
            xi = rho0.matrix
            current = 0.0
            for k in range(order_n - 1, -1, -1):
                xi = fac.conjugate(xi, current, s[k])
                xi = -(gm @ xi + xi @ gm)
                current = s[k]
            return fac.conjugate(xi, current, t)

        def level(k, upper, prefix):
            nodes = 0.5 * upper * (_GL_NODES + 1.0)
            weights = 0.5 * upper * _GL_WEIGHTS
            acc = np.zeros((d, d), dtype=complex)
            for x, w in zip(nodes, weights):
                point = prefix + (x,)
                acc += w * (integrand(point) if k == order_n else level(k + 1, x, point))
            return acc

        return level(1, t, ())

    if order > 3:
        raise ValueError("perturbative non-Hermitian propagation supports order <= 3")
    total = sum(term(n) for n in range(order + 1))
    return np.asarray(total)


def nonhermitian_bound(gamma_op: OperatorSum, n: int, t: float) -> float:
    """(2 ||Gamma||_inf t)^(n+1) / (2 (n+1)!) from ||L_Gamma||_{1->1} <= 2||Gamma||_inf."""
    g_norm = gamma_op.norm_inf()
    return (2.0 * g_norm * t) ** (n + 1) / (2.0 * math.factorial(n + 1))
