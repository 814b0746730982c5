"""Constructors for the circuit's input and target states.

All constructors renormalize inside the truncated space and record the
discarded tail on the returned state. Degenerate limits (odd cat at
alpha = 0, four-component combs with no support) raise ZeroNormError
instead of silently substituting a limit state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import TruncationError, ZeroNormError
from .fock_core import NORM_FLOOR, FockState, TruncationConfig, _frozen


class CatAxis(Enum):
    REAL = "real"            # components +/- alpha
    IMAGINARY = "imaginary"  # components +/- i*alpha


class CatParity(Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class CatPhase:
    """Which two-component cat: the phase-space axis and the photon-number parity."""

    axis: CatAxis
    parity: CatParity


class SqueezeSign(Enum):
    """Exponent sign of the squeezer exp[(r/2)(a^2 - a†^2)] vs its adjoint."""

    S = "s"
    S_DAGGER = "s_dagger"


def _raw_coherent(alpha: complex, dim: int) -> np.ndarray:
    """Unnormalized truncation of e^{-|a|^2/2} a^n/sqrt(n!); squared norm = 1 - tail."""
    amps = np.zeros(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return amps


def coherent(alpha: complex, trunc: TruncationConfig) -> FockState:
    """Coherent state |alpha> with amplitudes e^{-|a|^2/2} a^n/sqrt(n!)."""
    raw = _raw_coherent(alpha, trunc.dim)
    kept = float(np.vdot(raw, raw).real)
    tail = max(0.0, 1.0 - kept)
    if tail > trunc.tail_tol:
        raise TruncationError(
            f"coherent tail {tail:.3e} exceeds tail_tol {trunc.tail_tol:.1e} at dim {trunc.dim}"
        )
    return FockState(raw / math.sqrt(kept), trunc, tail=tail)


def two_cat(alpha: complex, phase: CatPhase, trunc: TruncationConfig) -> FockState:
    """Two-component cat, proportional to |c> + |-c> (even) or |c> - |-c> (odd).

    c is alpha on the real axis or i*alpha on the imaginary axis. The even
    (odd) cat has support only on even (odd) photon numbers; the exact norm
    of the unnormalized sum is sqrt(2(1 +/- e^{-2|alpha|^2})).
    """
    c = alpha if phase.axis is CatAxis.REAL else 1j * alpha
    sign = 1.0 if phase.parity is CatParity.EVEN else -1.0
    raw = _raw_coherent(c, trunc.dim) + sign * _raw_coherent(-c, trunc.dim)
    # Parity support is exact: the opposite-parity entries cancel to exactly zero.
    start = 1 if phase.parity is CatParity.EVEN else 0
    raw[start::2] = 0.0
    kept = float(np.vdot(raw, raw).real)
    exact = 2.0 * (1.0 + sign * math.exp(-2.0 * abs(alpha) ** 2))
    if kept < NORM_FLOOR or exact < NORM_FLOOR:
        raise ZeroNormError(f"two-component cat vanishes at alpha={alpha} ({phase.parity.value})")
    coherent_tail = max(0.0, 1.0 - float(np.linalg.norm(_raw_coherent(c, trunc.dim)) ** 2))
    tail = max(0.0, 1.0 - kept / exact)
    if coherent_tail > trunc.tail_tol or tail > trunc.tail_tol:
        raise TruncationError(
            f"cat tail {max(tail, coherent_tail):.3e} exceeds tail_tol at dim {trunc.dim}"
        )
    return FockState(raw / math.sqrt(kept), trunc, tail=tail)


def _comb_series_total(x: float, k: int) -> float:
    """Sum of x^n/n! over n = k (mod 4), by the fourth-root-of-unity filter."""
    return (math.exp(x) + (-1.0) ** k * math.exp(-x) + 2.0 * ((-1j) ** k * np.exp(1j * x)).real) / 4.0


def four_cat(beta: complex, k: int, trunc: TruncationConfig) -> FockState:
    """Four-component cat: the normalized comb sum_n beta^n/sqrt(n!) over n = k (mod 4).

    Identical to the balanced superposition of |beta>, |-beta>, |i beta>,
    |-i beta> with coefficients 1, (-1)^k, (-i)^k, i^k; the two routes agree
    because the root-of-unity filter kills every other photon-number class.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be 0..3, got {k}")
    raw = _raw_coherent(beta, trunc.dim)
    comb = np.zeros(trunc.dim, dtype=complex)
    comb[k::4] = raw[k::4]
    kept = float(np.vdot(comb, comb).real)
    if kept < NORM_FLOOR:
        raise ZeroNormError(f"four-component cat k={k} has no support at beta={beta}")
    x = abs(beta) ** 2
    exact = math.exp(-x) * _comb_series_total(x, k)
    coherent_tail = max(0.0, 1.0 - float(np.vdot(raw, raw).real))
    tail = max(0.0, 1.0 - kept / exact) if exact > 0 else 0.0
    if coherent_tail > trunc.tail_tol or tail > trunc.tail_tol:
        raise TruncationError(
            f"four-cat tail {max(tail, coherent_tail):.3e} exceeds tail_tol at dim {trunc.dim}"
        )
    return FockState(comb / math.sqrt(kept), trunc, tail=tail)


def _squeezed_tail(r: float, dim: int) -> float:
    """Population of exp[(r/2)(a^2 - a†^2)]|0> beyond the truncated space.

    |c_{2n}|^2 = tanh(r)^{2n} (2n)!/(4^n n!^2 cosh r), summed for 2n >= dim.
    """
    t2 = math.tanh(r) ** 2
    if t2 == 0.0:
        return 0.0
    n0 = (dim - 1) // 2 + 1
    # log of the first tail term, then the stable term ratio t2*(2n+1)/(2n+2)
    logw = (
        n0 * math.log(t2)
        + math.lgamma(2 * n0 + 1)
        - n0 * math.log(4.0)
        - 2.0 * math.lgamma(n0 + 1)
        - math.log(math.cosh(r))
    )
    if logw < -700.0:
        return 0.0
    w = math.exp(logw)
    total = 0.0
    n = n0
    while w > total * 1e-18 + 1e-300 and n < n0 + 100000:
        total += w
        w *= t2 * (2 * n + 1) / (2 * n + 2)
        n += 1
    return total


@lru_cache(maxsize=16)
def _squeeze_eigensystem(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigensystem of (i/2)(a^2 - a†^2); exp[(r/2)(a^2 - a†^2)] follows for every r."""
    lowering = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    gen = 0.5 * (lowering @ lowering - lowering.T @ lowering.T)
    w, v = np.linalg.eigh(1j * gen)
    return _frozen(w), _frozen(v)


def squeezed_vacuum(r: float, sign: SqueezeSign, trunc: TruncationConfig) -> FockState:
    """Squeezed vacuum: the matrix exponential of the quadratic generator on |0>.

    SqueezeSign.S applies exp[(r/2)(a^2 - a†^2)] so the two-photon amplitude
    is -tanh(r)/sqrt(2 cosh r); S_DAGGER flips the generator and that sign.
    The generator is diagonalized once per dimension (it is anti-Hermitian,
    so this equals the scaling-and-squaring exponential to machine precision)
    and each call costs one matrix-vector product.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    tail = _squeezed_tail(r, trunc.dim)
    if tail > trunc.tail_tol:
        raise TruncationError(
            f"squeezed-vacuum tail {tail:.3e} exceeds tail_tol {trunc.tail_tol:.1e} at dim {trunc.dim}"
        )
    w, v = _squeeze_eigensystem(trunc.dim)
    scale = r if sign is SqueezeSign.S else -r
    amps = v @ (np.exp(-1j * scale * w) * v[0, :].conj())
    # The generator only couples n to n+-2: odd levels carry rounding noise only.
    amps[1::2] = 0.0
    amps = amps / np.linalg.norm(amps)
    return FockState(amps, trunc, tail=tail)


def photon_subtract(state: FockState) -> tuple[FockState, float]:
    """Apply the annihilation operator and renormalize.

    Returns (state, weight) with weight the pre-normalization norm ||a psi||,
    i.e. the square root of the mean photon number for normalized input.
    Raises ZeroNormError when the input lies in the kernel of a (vacuum).
    """
    d = state.trunc.dim
    lowered = np.zeros(d, dtype=complex)
    ns = np.arange(1, d, dtype=float)
    lowered[:-1] = np.sqrt(ns) * state.amplitudes[1:]
    weight = float(np.linalg.norm(lowered))
    if weight < NORM_FLOOR:
        raise ZeroNormError("photon subtraction annihilated the state")
    return FockState(lowered / weight, state.trunc, tail=state.tail), weight
