import numpy as np
import pytest

from quadcat import (
    LossChannel,
    TraceLossError,
    TruncationConfig,
    annihilation_op,
    apply_beam_splitter,
    apply_loss,
    beam_splitter_unitary,
    cat_circuit_output,
    coherent,
    displacement,
    fock_state,
    four_cat,
    identity_op,
    loss_kraus_operators,
    tensor,
)
from quadcat.detection import pnrd_project

T = TruncationConfig(24)
SQ2 = np.sqrt(2.0)


def test_beam_splitter_preserves_vacuum():
    out = apply_beam_splitter(tensor(fock_state(0, T), fock_state(0, T)))
    assert out.amplitudes[0] == pytest.approx(1.0)
    assert np.max(np.abs(out.amplitudes[1:])) < 1e-14


def test_beam_splitter_coherent_mapping():
    # |a>|g> -> |(a+g)/sqrt2> |(g-a)/sqrt2>, checked for a=1, g=0.5i
    a, g = 1.0, 0.5j
    out = apply_beam_splitter(tensor(coherent(a, T), coherent(g, T)))
    expected = tensor(coherent((a + g) / SQ2, T), coherent((g - a) / SQ2, T))
    fid = abs(np.vdot(expected.amplitudes, out.amplitudes)) ** 2
    assert fid > 1 - 1e-10


def test_cat_inputs_vacuum_projection_heralds_four_cat():
    alpha = 1.5
    trunc = TruncationConfig.for_amplitude(alpha)
    psi = cat_circuit_output(alpha, trunc)
    rec = pnrd_project(psi, measured_mode=2, n=0)
    target = four_cat(alpha * np.exp(1j * np.pi / 4), 0, trunc)
    assert abs(target.overlap(rec.pure)) ** 2 > 1 - 1e-10


def test_beam_splitter_blocks_conserve_total_photon_number():
    trunc = TruncationConfig(6)
    u = beam_splitter_unitary(trunc).matrix
    d = trunc.dim
    for row in range(d * d):
        for col in range(d * d):
            if row // d + row % d != col // d + col % d:
                assert u[row, col] == 0.0  # exact, by construction


def test_beam_splitter_unitarity():
    trunc = TruncationConfig(16)
    u = beam_splitter_unitary(trunc).matrix
    dev = np.max(np.abs(u.conj().T @ u - np.eye(trunc.dim**2)))
    assert dev < 1e-10


def test_beam_splitter_dense_matches_block_application():
    trunc = TruncationConfig(10)
    rng = np.random.default_rng(3)
    amps = rng.normal(size=trunc.dim**2) + 1j * rng.normal(size=trunc.dim**2)
    from quadcat import TwoModeState, normalize

    psi, _ = normalize(TwoModeState(amps, trunc))
    dense = beam_splitter_unitary(trunc).matrix @ psi.amplitudes
    blocked = apply_beam_splitter(psi).amplitudes
    assert np.max(np.abs(dense - blocked)) < 1e-12


def test_commutation_identity_on_safe_subspace():
    # U a1 a2 = (1/2)(a1^2 - a2^2) U on total photon number <= dim-3
    trunc = TruncationConfig(12)
    d = trunc.dim
    u = beam_splitter_unitary(trunc).matrix
    a = annihilation_op(trunc).matrix
    eye = identity_op(trunc).matrix
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    lhs = u @ (a1 @ a2)
    rhs = 0.5 * (a1 @ a1 - a2 @ a2) @ u
    totals = np.add.outer(np.arange(d), np.arange(d)).ravel()
    safe = totals <= d - 3
    assert np.max(np.abs((lhs - rhs)[:, safe])) < 1e-9


def test_loss_channel_validation_and_completeness():
    with pytest.raises(ValueError):
        LossChannel(1.2, 3)
    channel = LossChannel.for_max_level(0.7, T.dim - 1)
    kraus = loss_kraus_operators(channel, T)
    total = sum(k.conj().T @ k for k in kraus)
    reliable = min(channel.kraus_cutoff + 1, T.dim)
    dev = np.max(np.abs(np.diag(total)[:reliable] - 1.0))
    assert dev < 1e-10


def test_apply_loss_identity_channel():
    rho = coherent(1.0, T).to_density()
    out = apply_loss(rho, LossChannel(1.0, 0))
    assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-14


def test_apply_loss_full_loss_gives_vacuum():
    rho = coherent(1.3, T).to_density()
    out = apply_loss(rho, LossChannel.for_max_level(0.0, T.dim - 1))
    assert out.matrix[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(out.matrix - fock_state(0, T).to_density().matrix)) < 1e-12


def test_apply_loss_coherent_covariance():
    # loss maps |a><a| to |sqrt(eta) a><sqrt(eta) a|
    alpha, eta = 1.2, 0.7
    rho = coherent(alpha, T).to_density()
    out = apply_loss(rho, LossChannel.for_max_level(eta, T.dim - 1))
    target = coherent(np.sqrt(eta) * alpha, T)
    fid = float(np.real(target.amplitudes.conj() @ out.matrix @ target.amplitudes))
    assert fid == pytest.approx(1.0, abs=1e-9)
    assert out.trace() == pytest.approx(1.0, abs=1e-9)


def test_apply_loss_preserves_positivity():
    rho = four_cat(1.5 * np.exp(1j * np.pi / 4), 1, TruncationConfig.for_amplitude(1.5)).to_density()
    out = apply_loss(rho, LossChannel.for_max_level(0.85, rho.trunc.dim - 1))
    evals = np.linalg.eigvalsh(out.matrix)
    assert evals.min() > -1e-9
    assert out.trace() == pytest.approx(1.0, abs=1e-9)


def test_apply_loss_trace_error_when_cutoff_too_small():
    rho = fock_state(9, T).to_density()
    with pytest.raises(TraceLossError):
        apply_loss(rho, LossChannel(0.5, 1))


def test_displacement_identity_and_coherent_generation():
    assert np.max(np.abs(displacement(0.0, T).matrix - np.eye(T.dim))) < 1e-14
    gamma = 0.3 + 0.1j
    displaced = displacement(gamma, T).apply(fock_state(0, T))
    fid = abs(coherent(gamma, T).overlap(displaced)) ** 2
    assert fid > 1 - 1e-10


def test_displacement_group_inverse_and_unitarity():
    gamma = 0.5
    d_plus = displacement(gamma, T).matrix
    d_minus = displacement(-gamma, T).matrix
    assert np.max(np.abs(d_plus @ d_minus - np.eye(T.dim))) < 1e-9
    assert np.max(np.abs(d_plus.conj().T @ d_plus - np.eye(T.dim))) < 1e-8
