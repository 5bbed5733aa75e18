"""Real-embedding simulator: one extra qubit makes complex conjugation a
physical gate, so antilinear entanglement monotones become two-observable
measurements.

The embedding stacks real and imaginary amplitude parts,
``psi -> (Re psi; Im psi)``, with decode matrix ``M = (1, i) (x) I`` and
conjugation gate ``K~ = sigma_z (x) I``; a Hermitian ``H = A + iB`` maps to
the purely imaginary Hermitian ``H~ = i I (x) B - sigma_y (x) A`` which
intertwines ``M H~ = H M`` and keeps real vectors real.  The embedding
qubit is subsystem 0 of the enlarged register.

Also here: the entangling-gate compiler from collective-spin interactions,
the controlled-Z circuit identity for the three-qubit embedded evolution,
single-site readout of dressed Pauli observables, and the depolarizing /
crosstalk error models with their exact inversion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .qcore import (
    DensityMatrix,
    HilbertSpace,
    OperatorSum,
    PureState,
    dense_pauli,
    kron_all,
)
from .qcore.operators import PAULIS, SIGMA_Y, boson_annihilation

#: metric weights over (I, X, Y, Z) used by the antilinear monotone family
METRIC_DIAGONAL = (-1.0, 1.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# the embedding map
# ---------------------------------------------------------------------------

def embed_state(psi: PureState | np.ndarray) -> PureState:
    """(Re psi; Im psi) on the enlarged register (one extra qubit, index 0)."""
    if isinstance(psi, PureState):
        amps = psi.amplitudes
        n = psi.space.n_factors
        if not psi.space.is_qubit_only:
            raise ValueError("the embedding is defined for qubit registers")
    else:
        amps = np.asarray(psi, dtype=complex).reshape(-1)
        n = int(round(math.log2(amps.size)))
        if 2 ** n != amps.size:
            raise ValueError("amplitude vector length must be a power of two")
    enlarged = HilbertSpace.qubits(n + 1)
    stacked = np.concatenate([amps.real, amps.imag]).astype(complex)
    return PureState(enlarged, stacked)


def decode_state(psi_tilde: PureState | np.ndarray) -> np.ndarray:
    """Inverse map: psi = (first half) + i (second half)."""
    amps = psi_tilde.amplitudes if isinstance(psi_tilde, PureState) else \
        np.asarray(psi_tilde, dtype=complex).reshape(-1)
    half = amps.size // 2
    return amps[:half] + 1j * amps[half:]


def decode_matrix(n_qubits: int) -> np.ndarray:
    """M = (1, i) (x) I_{2^n} as a dense (2^n, 2^{n+1}) matrix."""
    eye = np.eye(2 ** n_qubits, dtype=complex)
    return np.concatenate([eye, 1j * eye], axis=1)


def conjugation_gate(n_qubits: int) -> np.ndarray:
    """K~ = sigma_z (x) I on the enlarged register."""
    return np.kron(PAULIS["Z"], np.eye(2 ** n_qubits, dtype=complex))


def embed_hamiltonian(h: np.ndarray | OperatorSum) -> np.ndarray:
    """H~ = i I (x) B - sigma_y (x) A for H = A + iB (A = Re H, B = Im H).

    Hermiticity of H guarantees A symmetric and B antisymmetric; both are
    asserted.  The result is Hermitian with purely imaginary entries and
    satisfies the intertwining relation M H~ = H M.
    """
    hm = h.matrix() if isinstance(h, OperatorSum) else np.asarray(h, dtype=complex)
    if np.max(np.abs(hm - hm.conj().T)) > 1e-10:
        raise ValueError("H must be Hermitian")
    a, b = hm.real, hm.imag
    if np.max(np.abs(a - a.T)) > 1e-12 or np.max(np.abs(b + b.T)) > 1e-12:
        raise ValueError("Re H must be symmetric and Im H antisymmetric")
    return 1j * np.kron(np.eye(2), b) - np.kron(SIGMA_Y, a)


def conj_expectation(psi_tilde: PureState, observable: np.ndarray | OperatorSum) -> complex:
    """<psi|O K|psi> = <psi~|(sigma_z - i sigma_x) (x) O|psi~>."""
    omat = observable.matrix() if isinstance(observable, OperatorSum) else \
        np.asarray(observable, dtype=complex)
    big = np.kron(PAULIS["Z"] - 1j * PAULIS["X"], omat)
    v = psi_tilde.amplitudes
    return complex(np.vdot(v, big @ v))


# ---------------------------------------------------------------------------
# entanglement monotones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneSpec:
    """Which antilinear monotone to evaluate on an N-qubit register."""

    kind: str  # Concurrence2 | SecondOrder2 | Tangle3 | EvenN | OddN
    n_qubits: int

    def __post_init__(self):
        kind, n = self.kind, self.n_qubits
        if kind == "Concurrence2" and n != 2:
            raise ValueError("the concurrence is a two-qubit monotone")
        if kind == "SecondOrder2" and n != 2:
            raise ValueError("the second-order monotone is two-qubit")
        if kind == "Tangle3" and n != 3:
            raise ValueError("the 3-tangle is a three-qubit monotone")
        if kind == "EvenN" and n % 2 != 0:
            raise ValueError("EvenN requires an even register")
        if kind == "OddN" and n % 2 == 0:
            raise ValueError("OddN requires an odd register")
        if kind not in ("Concurrence2", "SecondOrder2", "Tangle3", "EvenN", "OddN"):
            raise ValueError(f"unknown monotone kind {self.kind!r}")


@dataclass(frozen=True)
class MonotoneResult:
    value: float
    observables: tuple   # enlarged-space Pauli strings the protocol measures

    @property
    def observables_measured(self) -> int:
        return len(self.observables)


def _enlarged_observables(labels) -> tuple:
    """Each antilinear term <psi|P K|psi> costs the pair Z+P and X+P."""
    out = []
    for lbl in labels:
        out.append("Z" + lbl)
        out.append("X" + lbl)
    return tuple(out)


def _conj_values(psi: np.ndarray, labels: Sequence[str]) -> list:
    """<psi|P|psi*> for each Pauli-string label, via direct conjugation."""
    conj = psi.conj()
    return [complex(np.vdot(psi, dense_pauli(lbl) @ conj)) for lbl in labels]


def monotone(state: PureState, spec: MonotoneSpec, embedded: bool | None = None) -> MonotoneResult:
    """Evaluate the monotone, reporting how many enlarged-space observables
    the embedding protocol would have measured (two per antilinear term).

    ``state`` may be the simulated register state or its embedded image;
    by default the register size disambiguates.
    """
    n = spec.n_qubits
    if embedded is None:
        embedded = state.space.n_factors == n + 1
    psi = decode_state(state) if embedded else state.amplitudes
    if psi.size != 2 ** n:
        raise ValueError("state does not match the monotone's register size")
    nrm = np.linalg.norm(psi)
    psi = psi / nrm

    if spec.kind == "Concurrence2":
        val = abs(_conj_values(psi, ["YY"])[0])
        return MonotoneResult(float(val), _enlarged_observables(["YY"]))

    if spec.kind == "EvenN":
        val = abs(_conj_values(psi, ["Y" * n])[0])
        return MonotoneResult(float(val), _enlarged_observables(["Y" * n]))

    if spec.kind in ("Tangle3", "OddN"):
        labels = [mu + "Y" * (n - 1) for mu in "IXYZ"]
        vals = _conj_values(psi, labels)
        acc = sum(g * v * v for g, v in zip(METRIC_DIAGONAL, vals))
        metered = [lbl for lbl, g in zip(labels, METRIC_DIAGONAL) if g != 0.0]
        return MonotoneResult(float(abs(acc)), _enlarged_observables(metered))

    # SecondOrder2: double metric contraction of squared conjugation values
    labels, weights = [], []
    letters = "IXYZ"
    for i, gi in enumerate(METRIC_DIAGONAL):
        for j, gj in enumerate(METRIC_DIAGONAL):
            if gi == 0.0 or gj == 0.0:
                continue
            labels.append(letters[i] + letters[j])
            weights.append(gi * gj)
    vals = _conj_values(psi, labels)
    acc = sum(w * v * v for w, v in zip(weights, vals))
    return MonotoneResult(float(abs(acc)), _enlarged_observables(labels))


def concurrence_direct(psi: PureState | np.ndarray) -> float:
    """|<psi|sigma_y (x) sigma_y|psi*>| evaluated without the embedding."""
    amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, complex)
    return float(abs(np.vdot(amps, dense_pauli("YY") @ amps.conj())))


def monotone_mixed(decomposition, spec: MonotoneSpec) -> MonotoneResult:
    """sum_i p_i E(psi_i) for one GIVEN pure-state decomposition.

    This is only the inner evaluation of the convex-roof construction;
    the minimization over decompositions is out of scope here, so the
    value is an upper bound on the mixed-state monotone.
    """
    total = 0.0
    observables: tuple = ()
    weight = 0.0
    for p, psi in decomposition:
        if p < 0.0:
            raise ValueError("decomposition weights must be nonnegative")
        out = monotone(psi, spec)
        total += p * out.value
        observables += out.observables
        weight += p
    if abs(weight - 1.0) > 1e-9:
        raise ValueError("decomposition weights must sum to one")
    return MonotoneResult(float(total), observables)


# ---------------------------------------------------------------------------
# controlled-Z circuit identity
# ---------------------------------------------------------------------------

def _cz(i: int, j: int, n: int) -> np.ndarray:
    """|0><0|_i (x) 1 + |1><1|_i (x) sigma_z_j on n qubits."""
    p0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    p1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    term0 = [np.eye(2, dtype=complex)] * n
    term1 = [np.eye(2, dtype=complex)] * n
    term0[i] = p0
    term1[i] = p1
    term1[j] = PAULIS["Z"]
    return kron_all(term0) + kron_all(term1)


def reduced_circuit_unitary(phi: float) -> np.ndarray:
    """CZ_02 CZ_01 Ry0(phi) CZ_01 CZ_02 on three qubits,
    with Ry(phi) = exp(-i phi sigma_y); equals exp(-i phi Y (x) Z (x) Z)."""
    ry = expm(-1j * phi * np.kron(np.kron(PAULIS["Y"], np.eye(2)), np.eye(2)))
    cz01, cz02 = _cz(0, 1, 3), _cz(0, 2, 3)
    return cz02 @ cz01 @ ry @ cz01 @ cz02


def reduced_circuit_target(phi: float) -> np.ndarray:
    return expm(-1j * phi * dense_pauli("YZZ"))


def reduced_circuit_two_gate(phi: float) -> np.ndarray:
    """Two-gate variant CZ_02 CZ_01 Ry0(phi): equivalent on the |0>-ancilla subspace."""
    ry = expm(-1j * phi * np.kron(np.kron(PAULIS["Y"], np.eye(2)), np.eye(2)))
    return _cz(0, 2, 3) @ _cz(0, 1, 3) @ ry


# ---------------------------------------------------------------------------
# entangling-gate compiler (collective-spin sandwich)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gate:
    kind: str          # "ms" | "rotation" | "local"
    matrix: np.ndarray
    description: str


def collective_spin_gate(theta: float, phi: float, k: int,
                         boson_dim: int | None = None) -> np.ndarray:
    """exp(-i theta (cos(phi) Sx + sin(phi) Sy)^2 / 4) on k qubits."""
    sx = sum(_single_site(PAULIS["X"], q, k) for q in range(k))
    sy = sum(_single_site(PAULIS["Y"], q, k) for q in range(k))
    s = math.cos(phi) * sx + math.sin(phi) * sy
    gate = expm(-1j * theta * (s @ s) / 4.0)
    if boson_dim:
        gate = np.kron(gate, np.eye(boson_dim, dtype=complex))
    return gate


def _single_site(mat: np.ndarray, site: int, n: int) -> np.ndarray:
    ops = [np.eye(2, dtype=complex)] * n
    ops[site] = mat
    return kron_all(ops)


_AXIS_TO_BASE = {
    # unitary u with u BASE u^dag = target axis; BASE is Z for site 0, X elsewhere
    ("Z", "X"): expm(-1j * math.pi / 4.0 * PAULIS["Y"]),
    ("Z", "Y"): expm(+1j * math.pi / 4.0 * PAULIS["X"]),
    ("Z", "Z"): np.eye(2, dtype=complex),
    ("X", "X"): np.eye(2, dtype=complex),
    ("X", "Y"): expm(-1j * math.pi / 4.0 * PAULIS["Z"]),
    ("X", "Z"): expm(+1j * math.pi / 4.0 * PAULIS["Y"]),
}


def ms_compile(label: str, phi: float, boson_quadrature: bool = False,
               n_max: int = 30) -> list:
    """Gate sequence for exp(i phi P) with P the Pauli string ``label``
    (no identity letters), built from two collective entangling gates and
    one central rotation, plus local basis changes.

    With ``boson_quadrature`` the central rotation generator is multiplied
    by ``(a + a^dag)`` on an attached mode, producing
    ``exp(i phi P (x) (a + a^dag))``.
    """
    k = len(label)
    if k < 2:
        raise ValueError("need at least two qubits")
    if any(ch not in "XYZ" for ch in label):
        raise ValueError("identity letters are not compiled here; dress the "
                         "readout instead (see measure_via_anticommutation)")
    boson_dim = (n_max + 1) if boson_quadrature else None

    # conjugated central operator: V sigma_c^{(0)} V^dag = sign * Z X...X
    central_letter = "Z" if k % 2 == 1 else "Y"
    ms_plus = collective_spin_gate(math.pi / 2.0, 0.0, k)
    ms_minus = ms_plus.conj().T
    central = _single_site(PAULIS[central_letter], 0, k)
    conj = ms_minus @ central @ ms_plus
    base = dense_pauli("Z" + "X" * (k - 1))
    sign = None
    for s in (1.0, -1.0):
        if np.max(np.abs(conj - s * base)) < 1e-10:
            sign = s
            break
    if sign is None:
        raise AssertionError("collective-gate conjugation did not produce the base string")

    locals_per_site = [_AXIS_TO_BASE[("Z" if q == 0 else "X", label[q])] for q in range(k)]
    local_change = kron_all(locals_per_site)

    phi_central = sign * phi
    if boson_quadrature:
        a = boson_annihilation(boson_dim)
        x = a + a.conj().T
        rot = expm(1j * phi_central * np.kron(_single_site(PAULIS[central_letter], 0, k), x))
        eye_b = np.eye(boson_dim, dtype=complex)
        gates = [
            Gate("local", np.kron(local_change.conj().T, eye_b), "basis change in"),
            Gate("ms", np.kron(ms_plus, eye_b), "collective gate (+pi/2)"),
            Gate("rotation", rot,
                 f"exp(i {phi_central:+.6f} {central_letter}0 (a+adag))"),
            Gate("ms", np.kron(ms_minus, eye_b), "collective gate (-pi/2)"),
            Gate("local", np.kron(local_change, eye_b), "basis change out"),
        ]
    else:
        rot = expm(1j * phi_central * central)
        gates = [
            Gate("local", local_change.conj().T, "basis change in"),
            Gate("ms", ms_plus, "collective gate (+pi/2)"),
            Gate("rotation", rot, f"exp(i {phi_central:+.6f} {central_letter}0)"),
            Gate("ms", ms_minus, "collective gate (-pi/2)"),
            Gate("local", local_change, "basis change out"),
        ]
    return gates


def ms_target(label: str, phi: float, boson_quadrature: bool = False,
              n_max: int = 30) -> np.ndarray:
    p = dense_pauli(label)
    if boson_quadrature:
        a = boson_annihilation(n_max + 1)
        p = np.kron(p, a + a.conj().T)
    return expm(1j * phi * p)


def ms_verify(gates: Sequence[Gate], target: np.ndarray) -> float:
    """Spectral-norm distance between the compiled product and the target."""
    acc = np.eye(target.shape[0], dtype=complex)
    for g in gates:
        acc = g.matrix @ acc
    return float(np.linalg.norm(acc - target, ord=2))


# ---------------------------------------------------------------------------
# dressed single-site readout of Pauli observables
# ---------------------------------------------------------------------------

_EPS_LEVI = {("X", "Y"): ("Z", 1.0), ("Y", "Z"): ("X", 1.0), ("Z", "X"): ("Y", 1.0),
             ("Y", "X"): ("Z", -1.0), ("Z", "Y"): ("X", -1.0), ("X", "Z"): ("Y", -1.0)}


def _other_two(letter: str) -> tuple:
    return tuple(ch for ch in "XYZ" if ch != letter)


@dataclass(frozen=True)
class DressedReadout:
    value: float
    n_evolutions: int
    readout: str         # Pauli string actually measured (identities elsewhere)
    evolutions: tuple    # the dressing Pauli strings


def measure_via_anticommutation(theta_label: str, state: PureState) -> DressedReadout:
    """Expectation of the Pauli string ``theta_label`` from one- or two-site
    readout after at most two commuting pi/4 dressing evolutions, each
    anticommuting with the readout.

    Identity-free strings need a single evolution; strings with identity
    slots take two.  Single-site observables pass straight through.
    """
    n = len(theta_label)
    if state.space.dim != 2 ** n:
        raise ValueError("state register does not match the observable")
    support = [i for i, ch in enumerate(theta_label) if ch != "I"]
    if not support:
        raise ValueError("nothing to measure")
    psi = state.amplitudes

    def expect(label: str) -> float:
        return float(np.real(np.vdot(psi, dense_pauli(label) @ psi)))

    if len(support) == 1:
        return DressedReadout(expect(theta_label), 0, theta_label, ())

    full_support = len(support) == n
    if full_support:
        # single dressing: measure sigma_beta at site a after exp(-i pi/4 P1)
        a = support[0]
        alpha = theta_label[a]
        beta, gamma = _other_two(alpha)
        # choose (beta, gamma) so that sigma_beta sigma_gamma = i eps sigma_alpha
        target, eps = _EPS_LEVI[(beta, gamma)]
        if target != alpha:
            beta, gamma = gamma, beta
            target, eps = _EPS_LEVI[(beta, gamma)]
        p1 = theta_label[:a] + gamma + theta_label[a + 1:]
        readout = "I" * a + beta + "I" * (n - a - 1)
        u1 = expm(-1j * math.pi / 4.0 * dense_pauli(p1))
        evolved = u1 @ psi
        raw = float(np.real(np.vdot(evolved, dense_pauli(readout) @ evolved)))
        # <U1^dag S U1> = <S (-i P1)> = -i <S P1>;  S P1 = i eps Theta
        value = eps * raw
        return DressedReadout(value, 1, readout, (p1,))

    # identity slots: two commuting dressings, one- or two-site readout
    odd_weight = len(support) % 2 == 1
    a = support[0]
    if odd_weight:
        read_sites = [a]
    else:
        read_sites = [a, support[1]]
    p1, p2 = [], []
    for i, ch in enumerate(theta_label):
        if i == a:
            # anticommuting site: both dressings share a letter != Theta_a
            beta = _other_two(ch)[0]
            p1.append(beta)
            p2.append(beta)
        elif i in read_sites:
            p1.append(ch)   # commuting at the second readout site
            p2.append(ch)
        elif ch == "I":
            p1.append("Y")
            p2.append("Y")
        else:
            b, g = _other_two(ch)
            p1.append(b)
            p2.append(g)
    p1, p2 = "".join(p1), "".join(p2)
    readout = "".join(theta_label[i] if i in read_sites else "I" for i in range(n))

    s_mat = dense_pauli(readout)
    p1_mat, p2_mat = dense_pauli(p1), dense_pauli(p2)
    if np.max(np.abs(p1_mat @ p2_mat - p2_mat @ p1_mat)) > 1e-12:
        raise ValueError("no valid dressing found: evolutions do not commute")
    for pm in (p1_mat, p2_mat):
        if np.max(np.abs(s_mat @ pm + pm @ s_mat)) > 1e-12:
            raise ValueError("no valid dressing found: readout fails to anticommute")
    # measured = <S (-iP1)(-iP2)> = -<S P1 P2>; S P1 P2 = c * Theta with c = +-1
    prod = s_mat @ p1_mat @ p2_mat
    theta_mat = dense_pauli(theta_label)
    c = complex(np.trace(theta_mat @ prod)) / theta_mat.shape[0]
    if abs(abs(c) - 1.0) > 1e-12 or abs(c.imag) > 1e-12:
        raise ValueError("no valid dressing found: product does not reproduce the target")
    u = expm(-1j * math.pi / 4.0 * p1_mat) @ expm(-1j * math.pi / 4.0 * p2_mat)
    evolved = u @ psi
    raw = float(np.real(np.vdot(evolved, s_mat @ evolved)))
    return DressedReadout(-float(c.real) * raw, 2, readout, (p1, p2))


# ---------------------------------------------------------------------------
# noise models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Per-gate depolarizing fidelity and nearest-neighbor crosstalk strength."""

    gate_fidelity: float = 1.0   # epsilon in (0, 1]
    crosstalk: float = 0.0       # Delta_0

    def __post_init__(self):
        if not (0.0 < self.gate_fidelity <= 1.0):
            raise ValueError("gate fidelity must sit in (0, 1]")

    def crosstalk_matrix(self, n: int) -> np.ndarray:
        delta = np.eye(n)
        for k in range(n - 1):
            delta[k, k + 1] = self.crosstalk
            delta[k + 1, k] = self.crosstalk
        return delta


def apply_depolarizing(rho: DensityMatrix, epsilon: float, n_gates: int) -> DensityMatrix:
    """n_gates-fold per-gate depolarizing: eps^n rho + (1 - eps^n) I/d."""
    if not (0.0 < epsilon <= 1.0):
        raise ValueError("epsilon must sit in (0, 1]")
    d = rho.space.dim
    weight = epsilon ** n_gates
    out = weight * rho.matrix + (1.0 - weight) * np.eye(d) / d
    return DensityMatrix(rho.space, out)


def apply_noise(rho: DensityMatrix, model: "NoiseModel", n_gates: int) -> DensityMatrix:
    """Depolarizing part of a noise model applied over ``n_gates`` gates."""
    return apply_depolarizing(rho, model.gate_fidelity, n_gates)


def rescale_expectation(measured: float, epsilon: float, n_gates: int,
                        observable: np.ndarray | OperatorSum) -> float:
    """Exact inversion of the depolarizing channel on an expectation value.

    For traceless observables this is measured / eps^n; in general the
    identity's contribution ``(1 - eps^n) Tr(O)/d`` is subtracted first.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    omat = observable.matrix() if isinstance(observable, OperatorSum) else \
        np.asarray(observable, dtype=complex)
    d = omat.shape[0]
    weight = epsilon ** n_gates
    tr = complex(np.trace(omat)).real
    return (measured - (1.0 - weight) * tr / d) / weight


def crosstalk_z_rotation(theta: float, qubit: int, n: int, delta0: float) -> np.ndarray:
    """exp(-i theta/2 sum_k Delta_{k,qubit} sigma_z^k): leakage of a
    single-qubit z rotation onto nearest neighbors."""
    model = NoiseModel(crosstalk=delta0)
    delta = model.crosstalk_matrix(n)
    gen = sum(delta[k, qubit] * _single_site(PAULIS["Z"], k, n) for k in range(n))
    return expm(-1j * 0.5 * theta * gen)


def cost_ratio(n_qubits: int, n_observables: int, epsilon: float, delta: float,
               n_gates: int | None = None) -> float:
    """Measurement-cost ratio of the embedding route versus full tomography,
    ``l (delta / (sqrt(3) eps))^{2 N}`` when the gate count grows like the
    register size (n_gates defaults to n_qubits)."""
    if not (0.0 < epsilon <= 1.0) or not (0.0 < delta <= 1.0):
        raise ValueError("fidelities must sit in (0, 1]")
    n = n_qubits if n_gates is None else n_gates
    return n_observables * (delta ** (2 * n)) / (3 ** n_qubits * epsilon ** (2 * n))


# ---------------------------------------------------------------------------
# embedded Trotter circuit with noise annotations
# ---------------------------------------------------------------------------

def trotter_embedded_circuit(terms: Sequence, t: float, steps: int,
                             initial: PureState, noise: NoiseModel | None = None):
    """First-order Trotter evolution of a sum of Pauli-string terms.

    ``terms`` is a list of (coeff, label); each step applies
    ``exp(-i coeff label t/steps)`` for every term.  Single-qubit rotations
    are compiled through z rotations so the crosstalk model (which affects
    only z rotations) acts on them; multi-qubit exponentials are applied
    exactly.  With depolarizing noise the state is carried as a density
    matrix and every gate contributes one depolarizing application.

    Returns ``(state_or_rho, n_gates)``.
    """
    n = initial.space.n_factors
    dt = t / steps
    gate_seq = []
    for coeff, label in terms:
        support = [i for i, ch in enumerate(label) if ch != "I"]
        theta = 2.0 * coeff * dt  # exp(-i coeff P dt) = Rp(2 coeff dt) convention
        if len(support) == 1:
            # single-qubit rotations run through Rz so the crosstalk model
            # (which leaks z rotations onto neighbors) acts on them:
            # exp(-i theta/2 sigma_axis) = U Rz(theta) U^dag with
            # U sigma_z U^dag = sigma_axis; gates are listed first-applied
            # first, so the list reads [U^dag, Rz, U].
            q, axis = support[0], label[support[0]]
            if axis == "Z":
                seq = [("rz", q, theta)]
            else:
                gen = "Y" if axis == "X" else "X"
                sgn = -1.0 if axis == "X" else +1.0
                u = expm(sgn * 1j * math.pi / 4.0 * _single_site(PAULIS[gen], q, n))
                seq = [("u", None, u.conj().T), ("rz", q, theta), ("u", None, u)]
            gate_seq.extend(seq)
        else:
            gate_seq.append(("u", None, expm(-1j * coeff * dt * dense_pauli(label))))

    eps = noise.gate_fidelity if noise else 1.0
    delta0 = noise.crosstalk if noise else 0.0
    use_dm = eps < 1.0
    state = initial.to_density_matrix() if use_dm else initial
    d = initial.space.dim
    n_gates = 0

    def apply(u, st):
        if use_dm:
            out = u @ st.matrix @ u.conj().T
            out = eps * out + (1.0 - eps) * np.eye(d) / d
            return DensityMatrix(initial.space, out)
        return PureState(initial.space, u @ st.amplitudes)

    for _ in range(steps):
        for kind, q, payload in gate_seq:
            if kind == "rz":
                u = crosstalk_z_rotation(payload, q, n, delta0)
            else:
                u = payload
            state = apply(u, state)
            n_gates += 1
    return state, n_gates
