import math

import numpy as np
import pytest

from quadcat import (
    CatAxis,
    CatParity,
    CatPhase,
    SqueezeSign,
    TruncationConfig,
    TruncationError,
    ZeroNormError,
    coherent,
    fock_state,
    four_cat,
    photon_subtract,
    squeezed_vacuum,
    two_cat,
)

T = TruncationConfig(30)
EVEN_REAL = CatPhase(CatAxis.REAL, CatParity.EVEN)
ODD_REAL = CatPhase(CatAxis.REAL, CatParity.ODD)
EVEN_IMAG = CatPhase(CatAxis.IMAGINARY, CatParity.EVEN)


def coherent_by_recursion(alpha, dim):
    # independent construction: c_0 = e^{-|a|^2/2}, c_{n+1} = c_n * a / sqrt(n+1)
    c = np.zeros(dim, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def test_coherent_vacuum_limit():
    assert np.allclose(coherent(0.0, T).amplitudes, fock_state(0, T).amplitudes)


def test_coherent_vacuum_overlap_closed_form():
    # oracle: <0|coherent(1)> = e^{-1/2}, cross-checked against the recursion
    state = coherent(1.0, T)
    assert state.amplitudes[0].real == pytest.approx(0.6065306597126334, abs=1e-12)
    assert np.allclose(state.amplitudes, coherent_by_recursion(1.0, T.dim), atol=1e-12)


def test_coherent_overlap_formula():
    # oracle: <a|g> = exp(-(|a|^2+|g|^2)/2 + conj(a) g) at a=1, g=i
    got = coherent(1.0, T).overlap(coherent(1j, T))
    assert got == pytest.approx(0.19876611034641298 + 0.3095598756531122j, abs=1e-12)


def test_coherent_truncation_error():
    with pytest.raises(TruncationError):
        coherent(5.0, TruncationConfig(12))


def test_two_cat_vacuum_limit_and_parity_support():
    assert np.allclose(two_cat(0.0, EVEN_REAL, T).amplitudes, fock_state(0, T).amplitudes)
    even = two_cat(1.5, EVEN_REAL, T)
    assert np.max(np.abs(even.amplitudes[1::2])) == 0.0
    odd = two_cat(1.5, ODD_REAL, T)
    assert np.max(np.abs(odd.amplitudes[0::2])) == 0.0
    imag = two_cat(1.5, EVEN_IMAG, T)
    assert np.max(np.abs(imag.amplitudes[1::2])) == 0.0


def test_two_cat_normalization_factor():
    # oracle: || |a> + |-a> || = sqrt(2(1 + e^{-2|a|^2})) = 1.5068744362000523 at a=1
    raw = coherent_by_recursion(1.0, T.dim) + coherent_by_recursion(-1.0, T.dim)
    assert np.linalg.norm(raw) == pytest.approx(1.5068744362000523, abs=1e-12)
    # and the constructor reproduces the same normalized vector
    assert np.allclose(two_cat(1.0, EVEN_REAL, T).amplitudes, raw / np.linalg.norm(raw), atol=1e-12)


def test_two_cat_odd_zero_amplitude_raises():
    with pytest.raises(ZeroNormError):
        two_cat(0.0, ODD_REAL, T)


@pytest.mark.parametrize("beta", [1.0, 2.0 * np.exp(1j * np.pi / 4), 2.5j])
def test_four_cat_two_routes_agree(beta):
    trunc = TruncationConfig.for_amplitude(beta)
    for k in range(4):
        comb = four_cat(beta, k, trunc)
        parts = [coherent_by_recursion(c * beta, trunc.dim) for c in (1, -1, 1j, -1j)]
        coeffs = [1.0, (-1.0) ** k, (-1j) ** k, (1j) ** k]
        super_route = sum(c * p for c, p in zip(coeffs, parts))
        super_route = super_route / np.linalg.norm(super_route)
        # fix the irrelevant global phase before comparing vectors
        phase = np.vdot(super_route, comb.amplitudes)
        phase /= abs(phase)
        assert np.max(np.abs(comb.amplitudes - phase * super_route)) < 1e-12


def test_four_cat_orthonormal_family():
    beta = 2.0 * np.exp(1j * np.pi / 4)
    trunc = TruncationConfig.for_amplitude(beta)
    cats = [four_cat(beta, k, trunc) for k in range(4)]
    for j in range(4):
        for k in range(4):
            expected = 1.0 if j == k else 0.0
            assert abs(cats[j].overlap(cats[k]) - expected) < 1e-10


def test_four_cat_spans_coherent_subspace():
    # the four combs span the same 4-dim subspace as the four coherent components
    beta = 2.0 * np.exp(1j * np.pi / 4)
    trunc = TruncationConfig.for_amplitude(beta)
    cats = np.column_stack([four_cat(beta, k, trunc).amplitudes for k in range(4)])
    cohs = np.column_stack([coherent(c * beta, trunc).amplitudes for c in (1, -1, 1j, -1j)])
    p_cats = cats @ cats.conj().T  # orthonormal columns
    q, _ = np.linalg.qr(cohs)
    p_cohs = q @ q.conj().T
    assert np.max(np.abs(p_cats - p_cohs)) < 1e-10


def test_four_cat_fock_comb_ratio():
    beta = 1.3 * np.exp(0.4j)
    state = four_cat(beta, 0, TruncationConfig.for_amplitude(beta))
    ratio = state.amplitudes[4] / state.amplitudes[0]
    assert ratio == pytest.approx(beta**4 / math.sqrt(24), abs=1e-12)


def test_four_cat_degenerate_limits():
    tiny = four_cat(1e-8, 0, T)
    assert np.max(np.abs(tiny.amplitudes - fock_state(0, T).amplitudes)) < 1e-12
    for k in (1, 2, 3):
        with pytest.raises(ZeroNormError):
            four_cat(0.0, k, T)


def test_squeezed_vacuum_identity_and_support():
    assert np.allclose(squeezed_vacuum(0.0, SqueezeSign.S, T).amplitudes, fock_state(0, T).amplitudes)
    state = squeezed_vacuum(0.8, SqueezeSign.S, TruncationConfig(60))
    assert np.max(np.abs(state.amplitudes[1::2])) == 0.0


def test_squeezed_vacuum_closed_form_populations():
    # oracle: |c_{2n}|^2 = tanh(r)^{2n} (2n)!/(4^n n!^2 cosh r), frozen at r = 0.5
    expected = [
        0.886818883970074,
        0.09469109156021772,
        0.015166122952961573,
        0.002698966615602023,
        0.000504324134484704,
    ]
    state = squeezed_vacuum(0.5, SqueezeSign.S, TruncationConfig(40))
    pops = state.populations()
    for n, want in enumerate(expected):
        assert pops[2 * n] == pytest.approx(want, abs=1e-12)


def test_squeeze_sign_convention():
    plus = squeezed_vacuum(0.5, SqueezeSign.S, TruncationConfig(40))
    minus = squeezed_vacuum(0.5, SqueezeSign.S_DAGGER, TruncationConfig(40))
    # two-photon coefficient: -tanh(r)/sqrt(2 cosh r) for S, positive for S_DAGGER
    ratio_plus = (plus.amplitudes[2] / plus.amplitudes[0]).real
    ratio_minus = (minus.amplitudes[2] / minus.amplitudes[0]).real
    assert ratio_plus == pytest.approx(-math.tanh(0.5) / math.sqrt(2), abs=1e-12)
    assert ratio_minus == pytest.approx(+math.tanh(0.5) / math.sqrt(2), abs=1e-12)


def test_squeezed_vacuum_truncation_error():
    with pytest.raises(TruncationError):
        squeezed_vacuum(2.0, SqueezeSign.S, TruncationConfig(30))


def test_photon_subtract_basics():
    state, weight = photon_subtract(fock_state(1, T))
    assert np.allclose(state.amplitudes, fock_state(0, T).amplitudes)
    assert weight == pytest.approx(1.0)
    with pytest.raises(ZeroNormError):
        photon_subtract(fock_state(0, T))


def test_photon_subtract_squeezed_flips_parity():
    state, weight = photon_subtract(squeezed_vacuum(0.6, SqueezeSign.S, TruncationConfig(50)))
    assert np.max(np.abs(state.amplitudes[0::2])) == 0.0
    # the success weight squared is the mean photon number sinh(r)^2
    assert weight**2 == pytest.approx(math.sinh(0.6) ** 2, rel=1e-10)


def test_constructors_do_not_touch_arguments():
    state = squeezed_vacuum(0.4, SqueezeSign.S, T)
    before = state.amplitudes.copy()
    photon_subtract(state)
    assert np.array_equal(state.amplitudes, before)
