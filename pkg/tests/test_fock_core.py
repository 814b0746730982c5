import numpy as np
import pytest

from quadcat import (
    DensityMatrix,
    FockState,
    TruncationConfig,
    TwoModeDensity,
    ZeroNormError,
    annihilation_op,
    creation_op,
    fock_state,
    normalize,
    number_op,
    partial_trace,
    tensor,
    two_mode_index,
)

T8 = TruncationConfig(8)


def test_truncation_config_validation():
    with pytest.raises(ValueError):
        TruncationConfig(1)
    with pytest.raises(ValueError):
        TruncationConfig(8, tail_tol=1.0)
    with pytest.raises(ValueError):
        TruncationConfig(8, tail_tol=-0.1)


def test_dim_heuristic():
    assert TruncationConfig.for_amplitude(0.0).dim == 20
    assert TruncationConfig.for_amplitude(1.5).dim == 27  # ceil(2.25 + 12 + 12)
    assert TruncationConfig.for_amplitude(3.0).dim == 45


def test_annihilation_ladder_identities():
    a = annihilation_op(T8)
    assert np.allclose(a.apply(fock_state(1, T8)).amplitudes, fock_state(0, T8).amplitudes)
    assert np.allclose(a.apply(fock_state(0, T8)).amplitudes, 0.0)
    lowered = a.apply(fock_state(5, T8))
    assert np.allclose(lowered.amplitudes, np.sqrt(5) * fock_state(4, T8).amplitudes)


def test_number_operator_is_exact_diagonal():
    a = annihilation_op(T8).matrix
    n_from_ladders = a.conj().T @ a
    assert np.array_equal(n_from_ladders, number_op(T8).matrix)


def test_commutator_identity_off_the_top_level():
    a = annihilation_op(T8).matrix
    ad = creation_op(T8).matrix
    comm = a @ ad - ad @ a
    d = T8.dim
    assert np.allclose(comm[: d - 1, : d - 1], np.eye(d - 1), atol=1e-14)
    assert comm[d - 1, d - 1] == pytest.approx(-(d - 1))


def test_tensor_basis_and_index_convention():
    both = tensor(fock_state(1, T8), fock_state(2, T8))
    idx = np.flatnonzero(both.amplitudes)
    assert list(idx) == [two_mode_index(1, 2, T8.dim)]
    assert two_mode_index(1, 2, T8.dim) == 1 * T8.dim + 2
    vac = tensor(fock_state(0, T8), fock_state(0, T8))
    assert vac.amplitudes[0] == 1.0 and np.count_nonzero(vac.amplitudes) == 1


def test_tensor_norm_multiplicative():
    a = FockState(np.arange(1, 9, dtype=complex), T8)
    b = FockState(np.linspace(0.1, 0.8, 8).astype(complex) * 1j, T8)
    assert tensor(a, b).norm() == pytest.approx(a.norm() * b.norm(), rel=1e-12)


def test_tensor_rejects_mismatched_truncations():
    with pytest.raises(ValueError):
        tensor(fock_state(0, T8), fock_state(0, TruncationConfig(9)))


def test_partial_trace_product_state():
    rho = tensor(fock_state(0, T8), fock_state(0, T8)).to_density()
    reduced = partial_trace(rho, keep=1)
    assert np.allclose(reduced.matrix, fock_state(0, T8).to_density().matrix, atol=1e-14)


def test_partial_trace_maximally_correlated():
    d = T8.dim
    amps = np.zeros(d * d, dtype=complex)
    amps[two_mode_index(0, 0, d)] = 1 / np.sqrt(2)
    amps[two_mode_index(1, 1, d)] = 1 / np.sqrt(2)
    rho = TwoModeDensity(np.outer(amps, amps.conj()), T8)
    for keep in (1, 2):
        red = partial_trace(rho, keep)
        assert red.matrix[0, 0] == pytest.approx(0.5)
        assert red.matrix[1, 1] == pytest.approx(0.5)
        assert abs(red.matrix[0, 1]) < 1e-14


def test_partial_trace_preserves_trace_and_roundtrips():
    rng = np.random.default_rng(7)
    a = FockState(rng.normal(size=T8.dim) + 1j * rng.normal(size=T8.dim), T8)
    a, _ = normalize(a)
    b = FockState(rng.normal(size=T8.dim) + 1j * rng.normal(size=T8.dim), T8)
    b, _ = normalize(b)
    joint = tensor(a, b).to_density()
    assert partial_trace(joint, 1).trace() == pytest.approx(joint.trace(), abs=1e-12)
    assert np.max(np.abs(partial_trace(joint, 1).matrix - a.to_density().matrix)) < 1e-12
    assert np.max(np.abs(partial_trace(joint, 2).matrix - b.to_density().matrix)) < 1e-12


def test_partial_trace_rejects_bad_mode():
    rho = tensor(fock_state(0, T8), fock_state(0, T8)).to_density()
    with pytest.raises(ValueError):
        partial_trace(rho, keep=3)


def test_normalize_returns_weight():
    doubled = FockState(2.0 * fock_state(0, T8).amplitudes, T8)
    unit, weight = normalize(doubled)
    assert weight == pytest.approx(2.0)
    assert unit.norm() == pytest.approx(1.0)

    already = fock_state(3, T8)
    same, w = normalize(already)
    assert w == pytest.approx(1.0)
    assert np.array_equal(same.amplitudes, already.amplitudes)


def test_normalize_zero_vector_raises():
    zero = FockState(np.zeros(T8.dim, dtype=complex), T8)
    with pytest.raises(ZeroNormError):
        normalize(zero)


def test_normalize_density_matrix():
    rho = DensityMatrix(0.25 * fock_state(0, T8).to_density().matrix, T8)
    unit, tr = normalize(rho)
    assert tr == pytest.approx(0.25)
    assert unit.trace() == pytest.approx(1.0)


def test_states_are_immutable():
    state = fock_state(2, T8)
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0
    op = annihilation_op(T8)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 1.0


def test_density_matrix_rejects_non_hermitian():
    mat = np.zeros((T8.dim, T8.dim), dtype=complex)
    mat[0, 1] = 1.0
    with pytest.raises(ValueError):
        DensityMatrix(mat, T8)


def test_operations_leave_inputs_unchanged():
    state = fock_state(1, T8)
    before = state.amplitudes.copy()
    annihilation_op(T8).apply(state)
    normalize(FockState(2 * state.amplitudes, T8))
    assert np.array_equal(state.amplitudes, before)
