"""Ion drives, effective Rabi models, spectra, parity, and regime labels."""
import math

import numpy as np
import pytest
from scipy.linalg import expm

from qworkbench import ionrabi as ir
from qworkbench import qcore as qc

TWO_PI = 2.0 * math.pi


def jc_drive(eta=0.06, nu=TWO_PI * 3e6, omega=TWO_PI * 68e3, delta_b=-TWO_PI * 102e3):
    return ir.IonDriveParams(nu=nu, omega0=TWO_PI * 10e6, omega_r=omega, omega_b=omega,
                             eta=eta, delta_r=0.0, delta_b=delta_b)


# ---------------------------------------------------------------------------
# parameter maps
# ---------------------------------------------------------------------------

def test_effective_qrm_mapping_values():
    r = ir.effective_qrm(jc_drive())
    assert abs(r.omega0_r - TWO_PI * 51e3) < 1e-6
    assert abs(r.omega_r - TWO_PI * 51e3) < 1e-6
    assert abs(r.g - TWO_PI * 2.04e3) < 1e-6
    # the parameter maps give g/omega_R = 0.04 for these drive values
    assert abs(r.g / r.omega_r - 0.04) < 1e-12


def test_effective_two_photon_symmetric_detunings():
    x = TWO_PI * 1e3
    p = ir.IonDriveParams(nu=TWO_PI * 1e6, omega0=TWO_PI * 10e6,
                          omega_r=TWO_PI * 50e3, omega_b=TWO_PI * 50e3,
                          eta=0.04, delta_r=4 * x, delta_b=-4 * x, sideband_order=2)
    tp = ir.effective_two_photon(p)
    assert abs(tp.omega - 2 * x) < 1e-9
    assert abs(tp.omega_q) < 1e-9
    assert abs(tp.g - 0.04 ** 2 * TWO_PI * 50e3 / 4.0) < 1e-6


def test_collapse_flag():
    assert not ir.TwoPhotonParams(1.0, 1.9, 0.49).collapse_flag
    assert ir.TwoPhotonParams(1.0, 1.9, 0.5).collapse_flag


def test_drive_validation():
    with pytest.raises(ValueError):
        ir.IonDriveParams(nu=1.0, omega0=1.0, omega_r=1.0, omega_b=1.0, eta=0.0)
    with pytest.warns(UserWarning):
        ir.IonDriveParams(nu=1.0, omega0=1.0, omega_r=0.1, omega_b=0.1,
                          eta=0.05, delta_r=0.5)


# ---------------------------------------------------------------------------
# full drive Hamiltonian
# ---------------------------------------------------------------------------

def test_zero_drive_is_zero_hamiltonian():
    p = ir.IonDriveParams(nu=1.0, omega0=5.0, omega_r=0.0, omega_b=0.0, eta=0.1)
    h = ir.ion_hamiltonian(p, n_max=10)
    for t in (0.0, 0.3, 1.7):
        assert np.max(np.abs(h.matrix_at(t))) == 0.0


def linearized_drive_matrix(p, n_max, t):
    """Carrier plus first-order Lamb-Dicke terms of the bichromatic drive."""
    db = n_max + 1
    a = qc.boson_annihilation(db)
    at = a * np.exp(-1j * p.nu * t) + a.conj().T * np.exp(1j * p.nu * t)
    s = p.sideband_order
    block = np.zeros((db, db), dtype=complex)
    for omega_n, freq in ((p.omega_r, s * p.nu - p.delta_r),
                          (p.omega_b, -s * p.nu - p.delta_b)):
        block += 0.5 * omega_n * np.exp(1j * freq * t) * (np.eye(db) + 1j * p.eta * at)
    h = np.zeros((2 * db, 2 * db), dtype=complex)
    h[:db, db:] = block
    h[db:, :db] = block.conj().T
    return h


def test_small_eta_expansion_scaling():
    # || H_full - (carrier + linear) || = O(eta^2): halving eta cuts ~4x
    devs = {}
    for eta in (0.08, 0.04):
        p = ir.IonDriveParams(nu=1.0, omega0=10.0, omega_r=0.3, omega_b=0.3,
                              eta=eta, delta_r=0.02, delta_b=-0.03)
        h = ir.ion_hamiltonian(p, n_max=12)
        worst = 0.0
        for t in np.linspace(0.0, 5.0, 7):
            dev = np.linalg.norm(h.matrix_at(t) - linearized_drive_matrix(p, 12, t), ord=2)
            worst = max(worst, dev)
        devs[eta] = worst
    assert 3.0 < devs[0.08] / devs[0.04] < 5.0


def test_jc_regime_short_run():
    # half a Rabi oscillation of the full drive against the closed-form
    # resonant JC solution
    p = jc_drive()
    r = ir.effective_qrm(p)
    n_max = 25
    h = ir.ion_hamiltonian(p, n_max)
    psi0 = qc.basis_state(h.space, [0, 0])
    t_half = 0.5 * math.pi / r.g
    checkpoints = np.linspace(0.0, t_half, 6)[1:]
    states = qc.evolve_trace(psi0, h, checkpoints, tol=1e-6)
    for t, st in zip(checkpoints, states):
        ana = ir.jc_analytic_state(r.g, t, n_max)
        assert qc.fidelity(ana, st) > 0.99
    assert ir.lamb_dicke_monitor(p, states) < 0.12


def test_interaction_frame_equivalence_observables():
    # full drive vs effective Rabi model on sigma_z and phonon number
    p = jc_drive()
    r = ir.effective_qrm(p)
    n_max = 25
    h_full = ir.ion_hamiltonian(p, n_max)
    h_qrm = qc.Schedule.constant(ir.qrm_hamiltonian(r, n_max))
    psi0 = qc.basis_state(h_full.space, [0, 0])
    space = h_full.space
    z_op = qc.OperatorSum.single(space, 0, "Z", hermitian=True)
    n_op = qc.OperatorSum.single(space, 1, "n", hermitian=True)
    for t in (0.2e-4, 1.2e-4):
        full = qc.evolve(psi0, h_full, 0.0, t, tol=1e-7)
        eff = qc.evolve(psi0, h_qrm, 0.0, t)
        for op in (z_op, n_op):
            assert abs(qc.expectation(full, op).real
                       - qc.expectation(eff, op).real) < 1e-2


def test_qrm_frame_rotation_equivalence():
    r = ir.RabiParams(omega0_r=0.8, omega_r=1.0, g=0.35)
    n_max = 12
    hy = ir.qrm_hamiltonian(r, n_max).matrix()
    rot = ir.qrm_frame_rotation(n_max)
    db = n_max + 1
    a = qc.boson_annihilation(db)
    hx = 0.5 * r.omega0_r * np.kron(qc.SIGMA_Z, np.eye(db)) \
        + r.omega_r * np.kron(np.eye(2), np.diag(np.arange(db, dtype=complex))) \
        + r.g * np.kron(qc.SIGMA_X, a + a.conj().T)
    assert np.max(np.abs(rot @ hy @ rot.conj().T - hx)) < 1e-12


def test_two_photon_full_drive_vs_effective():
    # second-sideband drive against the effective two-photon model at
    # g/omega = 0.4 (shortened window keeps the suite quick)
    nu = TWO_PI * 1e6
    omega_drive = TWO_PI * 100e3
    eta = 0.04
    p = ir.IonDriveParams(nu=nu, omega0=TWO_PI * 12e6, omega_r=omega_drive,
                          omega_b=omega_drive, eta=eta,
                          delta_r=0.0, delta_b=-TWO_PI * 400.0, sideband_order=2)
    tp = ir.effective_two_photon(p)
    assert abs(tp.g / tp.omega - 0.4) < 1e-9
    n_max = 25
    h_full = ir.ion_hamiltonian(p, n_max)
    h_eff = ir.two_photon_hamiltonian(tp, 1, n_max, simulation_frame=True).matrix()
    space = h_full.space
    psi0 = qc.basis_state(space, [1, 2])   # |g, 2>
    t = 0.35 / tp.g                        # a slice of the two-phonon exchange
    full = qc.evolve(psi0, h_full, 0.0, t, tol=2e-7)
    # simulation picture: psi_sim = exp(+i H0 t) psi_I
    db = n_max + 1
    h0_diag = np.kron(0.25 * (p.delta_b + p.delta_r) * np.array([1.0, -1.0]), np.ones(db)) \
        + np.kron(np.ones(2), 0.25 * (p.delta_b - p.delta_r) * np.arange(db))
    sim_frame = np.exp(1j * h0_diag * t)
    psi_sim = qc.PureState(space, sim_frame * full.amplitudes)
    ideal = qc.PureState(space, expm(-1j * h_eff * t) @ psi0.amplitudes)
    assert qc.fidelity(psi_sim, ideal) > 0.98


# ---------------------------------------------------------------------------
# regime classification
# ---------------------------------------------------------------------------

def test_regime_examples():
    assert ir.classify_regime(ir.RabiParams(1.0, 0.5, 1.0)) == "DSC"     # g/w = 2
    assert ir.classify_regime(ir.RabiParams(0.7, 0.0, 0.3)) == "Dirac"   # w = 0
    assert ir.classify_regime(ir.RabiParams(0.0, 1.0, 0.01)) == "Decoupling"
    assert ir.classify_regime(ir.RabiParams(1.0, 1.0, 0.01)) == "JC"
    assert ir.classify_regime(ir.RabiParams(-1.0, 1.0, 0.01)) == "AJC"
    assert ir.classify_regime(ir.RabiParams(0.4, 1.0, 0.02)) == "TwoFoldDispersive"
    assert ir.classify_regime(ir.RabiParams(1.0, 1.0, 0.3)) == "USC"


def test_regime_total_function():
    rng = np.random.default_rng(7)
    for _ in range(300):
        r = ir.RabiParams(omega0_r=float(rng.normal()), omega_r=float(rng.normal()),
                          g=float(abs(rng.normal())))
        assert ir.classify_regime(r) in ir.REGIME_LABELS


# ---------------------------------------------------------------------------
# adiabatic preparation
# ---------------------------------------------------------------------------

def qrm_family(omega, omega0, n_max):
    base = ir.RabiParams(omega0_r=omega0, omega_r=omega, g=0.0)
    h0 = ir.qrm_hamiltonian(base, n_max).matrix()
    db = n_max + 1
    coupling = -np.kron(qc.SIGMA_Y, qc.boson_annihilation(db)
                        + qc.boson_annihilation(db).conj().T)
    return lambda g: h0 + g * coupling


def test_adiabatic_zero_ramp():
    n_max = 10
    fam = qrm_family(1.0, 1.0, n_max)
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    out = ir.adiabatic_ground_state(fam, 0.0, 5.0, space, n_checkpoints=9)
    assert np.all(out.fidelities > 1.0 - 1e-7)


def test_adiabatic_duration_ladder():
    n_max = 16
    fam = qrm_family(1.0, 1.0, n_max)
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    finals = []
    for duration in (3.0, 6.0, 12.0, 24.0, 48.0):
        out = ir.adiabatic_ground_state(fam, 1.0, duration, space,
                                        n_checkpoints=7, tol=1e-8)
        finals.append(out.final_fidelity)
    assert all(b >= a - 1e-6 for a, b in zip(finals, finals[1:]))
    assert finals[-1] > 0.99


def test_adiabatic_dsc_parity_chain_support():
    # ramping into g/omega = 2 keeps the state exactly on the parity chain
    # of the initial ground state |g,0>
    n_max = 30
    fam = qrm_family(1.0, 1.0, n_max)
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    out = ir.adiabatic_ground_state(fam, 2.0, 60.0, space, n_checkpoints=5, tol=1e-9)
    schedule = qc.Schedule.time_dependent(space, lambda t: fam(2.0 * t / 60.0))
    evals, evecs = np.linalg.eigh(fam(0.0))
    final = qc.evolve(qc.PureState(space, evecs[:, 0]), schedule, 0.0, 60.0, tol=1e-9)
    diag = ir.qrm_parity_diagonal(space)
    ground_sector = diag[int(np.argmax(np.abs(evecs[:, 0])))]
    mask = np.abs(diag - ground_sector) < 1e-9
    off_chain = float(np.sum(np.abs(final.amplitudes[~mask]) ** 2))
    assert off_chain < 1e-6


# ---------------------------------------------------------------------------
# spectra and collapse diagnostics
# ---------------------------------------------------------------------------

def test_parity_chain_weight():
    space = qc.HilbertSpace.qubit_boson(n_max=6)
    # |e,1> sits in the -i sector of the generalized parity
    st = qc.basis_state(space, [0, 1])
    assert ir.parity_chain_weight(st, -1.0j) == pytest.approx(1.0)
    assert ir.parity_chain_weight(st, 1.0 + 0.0j) == pytest.approx(0.0)
    mix = qc.PureState(space, (st.amplitudes
                               + qc.basis_state(space, [1, 0]).amplitudes)
                       / math.sqrt(2.0))
    assert ir.parity_chain_weight(mix, -1.0j) == pytest.approx(0.5)


def test_two_photon_decoupled_spectrum():
    pts = ir.two_photon_spectrum(1.0, 1.9, 1, [0.0], n_levels=8, n_max=40)
    expected = np.sort(np.concatenate([np.arange(6) + 0.95, np.arange(6) - 0.95]))[:8]
    assert np.max(np.abs(pts[0].energies - expected)) < 1e-10
    assert np.all(pts[0].parity_weights > 0.999)


def test_two_photon_parity_commutes_and_is_conserved():
    tp = ir.TwoPhotonParams(omega=1.0, omega_q=1.9, g=0.3)
    n_max = 40
    h = ir.two_photon_hamiltonian(tp, 1, n_max).matrix()
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    diag = ir.generalized_parity_diagonal(space)
    pi_mat = np.diag(diag)
    assert np.max(np.abs(pi_mat @ h - h @ pi_mat)) < 1e-12
    # evolving a parity eigenstate keeps <Pi> fixed
    psi0 = qc.basis_state(space, [0, 1])  # parity -(+1)(i) = -i
    sched = qc.Schedule.constant(h, space)
    for t in (0.7, 2.3):
        st = qc.evolve(psi0, sched, 0.0, t)
        val = complex(np.sum(diag * np.abs(st.amplitudes) ** 2))
        assert abs(val - ir.parity_direct(psi0)) < 1e-10


def test_truncation_guard_fires_when_too_small():
    with pytest.raises(ir.TruncationError):
        ir.two_photon_spectrum(1.0, 1.9, 1, [0.45], n_levels=8, n_max=16)


def test_collapse_compression_trend():
    diag = ir.collapse_diagnostics(1.0, 1.9, [0.10, 0.30, 0.49], n_levels=8, n_max=80)
    # the lowest-8 band compresses toward the collapse point
    span0 = diag.mean_occupations[0][1]
    assert diag.min_spacings[-1] < diag.min_spacings[0]
    # effective potential coefficient omega - 2g approaches zero
    assert np.all(np.diff(diag.potential_coefficients[:, 0]) < 0)
    assert diag.potential_coefficients[-1, 0] == pytest.approx(1.0 - 2 * 0.49)


def test_effective_potential_sign_structure():
    for g in (0.1, 0.3, 0.49):
        assert 1.0 - 2 * g > 0 and 1.0 + 2 * g > 0
    assert (1.0 - 2 * 0.5) == pytest.approx(0.0)


def test_energy_conservation_constant_model():
    tp = ir.TwoPhotonParams(omega=1.0, omega_q=1.9, g=0.3)
    n_max = 40
    h_op = ir.two_photon_hamiltonian(tp, 1, n_max)
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    sched = qc.Schedule.constant(h_op.matrix(), space)
    psi0 = qc.basis_state(space, [1, 2])
    e0 = qc.expectation(psi0, h_op.matrix()).real
    st = qc.evolve(psi0, sched, 0.0, 3.1)
    assert abs(qc.expectation(st, h_op.matrix()).real - e0) < 1e-9


# ---------------------------------------------------------------------------
# characteristic exponents
# ---------------------------------------------------------------------------

def test_exponents_pure_point():
    out = ir.characteristic_exponents(4.0)
    expected = {2 + math.sqrt(3), 2 - math.sqrt(3), -2 + math.sqrt(3), -2 - math.sqrt(3)}
    got = {complex(g).real for g in out.exponents}
    assert all(min(abs(e - g) for g in got) < 1e-12 for e in expected)
    assert out.kind == "PurePoint"
    assert any(abs(g) < 1.0 for g in out.exponents)


def test_exponents_collapse_and_continuous():
    assert ir.characteristic_exponents(2.0).kind == "CollapsePoint"
    out = ir.characteristic_exponents(1.0)
    assert out.kind == "Continuous"
    assert all(abs(abs(g) - 1.0) < 1e-12 for g in out.exponents)


def test_exponents_random_classification():
    rng = np.random.default_rng(11)
    for _ in range(100):
        w = float(rng.uniform(0.05, 6.0))
        out = ir.characteristic_exponents(w)
        normalizable = [g for g in out.exponents if abs(g) < 1.0 - 1e-12]
        if out.kind == "PurePoint":
            assert w / 2.0 > 1.0 and len(normalizable) == 2
        elif out.kind == "Continuous":
            assert w / 2.0 < 1.0 and not normalizable
        else:
            assert abs(w - 2.0) < 1e-12


# ---------------------------------------------------------------------------
# parity measurement protocol
# ---------------------------------------------------------------------------

def test_parity_protocol_fock_states():
    space = qc.HilbertSpace.qubit_boson(n_max=16)
    for occ, expected in (([1, 0], 1.0), ([0, 1], -1.0j), ([1, 2], -1.0)):
        st = qc.basis_state(space, occ)
        direct = ir.parity_direct(st)
        assert abs(direct - expected) < 1e-12
        assert abs(ir.parity_measurement(st) - direct) < 1e-8


def test_parity_protocol_superpositions():
    rng = np.random.default_rng(13)
    space = qc.HilbertSpace.qubit_boson(n_max=16)
    for _ in range(5):
        st = qc.random_pure_state(space, rng)
        assert abs(ir.parity_measurement(st) - ir.parity_direct(st)) < 1e-8


def test_parity_protocol_sampled():
    space = qc.HilbertSpace.qubit_boson(n_max=10)
    st = qc.basis_state(space, [1, 0])
    est = ir.parity_measurement(st, shots=20000, master_seed=5)
    assert est == ir.parity_measurement(st, shots=20000, master_seed=5)
    assert abs(est - ir.parity_direct(st)) < 0.05


def test_parity_dispersive_low_manifold():
    space = qc.HilbertSpace.qubit_boson(n_max=14)
    for occ in ([1, 0], [0, 1], [1, 2]):
        st = qc.basis_state(space, occ)
        err = abs(ir.parity_measurement_dispersive(st) - ir.parity_direct(st))
        assert err < 2e-2, (occ, err)
    amps = np.zeros(30, dtype=complex)
    amps[[0, 1, 15, 16]] = [0.5, 0.5, 0.5, 0.5]
    st = qc.PureState(space, amps)
    err = abs(ir.parity_measurement_dispersive(st) - ir.parity_direct(st))
    assert err < 2e-2


# ---------------------------------------------------------------------------
# mode guard
# ---------------------------------------------------------------------------

def test_mode_guard_values():
    nu = TWO_PI * 1e6
    report = ir.dicke_mode_guard(3, nu, omega_drive=TWO_PI * 10e3)
    assert report.delta_first / nu == pytest.approx(2.0 - math.sqrt(3.0), abs=1e-12)
    assert report.delta_second / nu == pytest.approx(2.0 * math.sqrt(3.0) - 2.0, abs=1e-12)
    assert report.delta_first / nu == pytest.approx(0.2679, abs=1e-4)
    assert report.delta_second / nu == pytest.approx(1.4641, abs=1e-4)
    assert not report.flagged
    assert ir.dicke_mode_guard(1, nu).nearest_ratio == 0.0


def test_quadrature_operators():
    n_max = 8
    space = qc.HilbertSpace.qubit_boson(n_max=n_max)
    x = ir.position_quadrature(space).matrix()
    p = ir.momentum_quadrature(space).matrix()
    assert np.max(np.abs(x - x.conj().T)) < 1e-14
    assert np.max(np.abs(p - p.conj().T)) < 1e-14
    # canonical commutator away from the truncation boundary of each block
    comm = np.real(np.diag((x @ p - p @ x) / 2j))
    fock = np.kron(np.ones(2), np.arange(n_max + 1))
    assert np.max(np.abs(comm[fock < n_max] - 1.0)) < 1e-12
