"""Circuit elements: balanced beam splitter, bosonic loss channel, displacement.

Sign convention, fixed once here: the balanced beam splitter is

    U = exp[(pi/4) (a1† a2 - a1 a2†)]

which sends a coherent product to |alpha>|gamma> -> |(alpha+gamma)/sqrt(2)>
(x) |(gamma-alpha)/sqrt(2)> with no residual phase. Interfering an even real
cat with an even imaginary cat of amplitude alpha and projecting mode 2 on
|n> then heralds, in mode 1, the four-component cat of amplitude
alpha*e^{i pi/4} and photon-number class n mod 4. Any leftover global-phase
freedom is unobservable in every quantity this package computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.stats import binom

from .errors import TraceLossError
from .fock_core import (
    DensityMatrix,
    FockState,
    Operator,
    TruncationConfig,
    TwoModeState,
    _frozen,
    tensor,
)
from .state_factory import CatAxis, CatParity, CatPhase, two_cat

_TRACE_DEFICIT_TOL = 1e-9


@dataclass(frozen=True)
class LossChannel:
    """Pure-loss channel of transmission eta, truncated to at most kraus_cutoff lost photons.

    Kraus operators: K_l = sqrt((1-eta)^l / l!) eta^{n/2} a^l for l = 0..kraus_cutoff,
    which resolve the binomial photon-loss statistics exactly on every level
    n <= kraus_cutoff.
    """

    eta: float
    kraus_cutoff: int

    def __post_init__(self):
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "kraus_cutoff", int(self.kraus_cutoff))
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.kraus_cutoff < 0:
            raise ValueError("kraus_cutoff must be non-negative")

    @classmethod
    def for_max_level(cls, eta: float, max_level: int, bound: float = 1e-12) -> "LossChannel":
        """Smallest cutoff whose binomial loss tail beyond it stays below bound."""
        eta = float(eta)
        max_level = max(0, int(max_level))
        if eta >= 1.0:
            return cls(eta, 0)
        for cut in range(max_level + 1):
            if binom.sf(cut, max_level, 1.0 - eta) < bound:
                return cls(eta, cut)
        return cls(eta, max_level)


def occupied_levels(diag: np.ndarray, floor: float = 1e-16) -> int:
    """Highest populated level + 1, used to size loss cutoffs."""
    idx = np.nonzero(np.asarray(diag).real > floor)[0]
    return int(idx[-1]) + 1 if idx.size else 1


def loss_kraus_operators(channel: LossChannel, trunc: TruncationConfig) -> list[np.ndarray]:
    """Dense single-mode Kraus matrices of the channel on the truncated space."""
    d = trunc.dim
    eta = channel.eta
    half = eta ** (np.arange(d) / 2.0)
    lowering = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    ops = []
    power = np.eye(d, dtype=complex)
    for l in range(channel.kraus_cutoff + 1):
        if eta >= 1.0:
            coef = 1.0 if l == 0 else 0.0
        else:
            log_c = 0.5 * (l * math.log(1.0 - eta) - math.lgamma(l + 1))
            coef = math.exp(log_c) if log_c > -350.0 else 0.0
        ops.append(coef * (half[:, None] * power))
        if l < channel.kraus_cutoff:
            power = lowering @ power
    return ops


def apply_loss(rho: DensityMatrix, channel: LossChannel) -> DensityMatrix:
    """Kraus sum of the loss channel; errors out if the cutoff drops trace.

    The result keeps whatever trace survives (no silent renormalization);
    a deficit above 1e-9 means kraus_cutoff is too small for the state.
    """
    out = np.zeros_like(rho.matrix)
    for k in loss_kraus_operators(channel, rho.trunc):
        out += k @ rho.matrix @ k.conj().T
    deficit = rho.trace() - float(np.trace(out).real)
    if deficit > _TRACE_DEFICIT_TOL:
        raise TraceLossError(
            f"loss channel dropped {deficit:.3e} trace; raise kraus_cutoff "
            f"(currently {channel.kraus_cutoff})"
        )
    return DensityMatrix(out, rho.trunc)


@lru_cache(maxsize=32)
def _beam_splitter_blocks(dim: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Orthogonal blocks of the balanced beam splitter per total photon number.

    The generator a1†a2 - a1a2† conserves n1+n2, so each block is the
    exponential of a real antisymmetric tridiagonal matrix and the assembled
    operator is exactly block diagonal: no truncation leakage between totals.
    """
    blocks = []
    for total in range(2 * dim - 1):
        lo = max(0, total - dim + 1)
        hi = min(total, dim - 1)
        size = hi - lo + 1
        gen = np.zeros((size, size))
        for i in range(size - 1):
            n1 = lo + i
            n2 = total - n1
            gen[i + 1, i] = math.sqrt((n1 + 1) * n2)
            gen[i, i + 1] = -gen[i + 1, i]
        block = expm((math.pi / 4.0) * gen) if size > 1 else np.ones((1, 1))
        n1s = np.arange(lo, hi + 1)
        idx = n1s * dim + (total - n1s)
        blocks.append((_frozen(idx), _frozen(block.astype(complex))))
    return tuple(blocks)


def beam_splitter_unitary(trunc: TruncationConfig) -> Operator:
    """Dense dim^2 x dim^2 balanced beam splitter (see module docstring for the convention).

    The dense form is convenient for identity checks at small dim; sweep
    code should route states through apply_beam_splitter, which never
    materializes this matrix.
    """
    d = trunc.dim
    mat = np.zeros((d * d, d * d), dtype=complex)
    for idx, block in _beam_splitter_blocks(d):
        mat[np.ix_(idx, idx)] = block
    return Operator(mat, trunc)


def apply_beam_splitter(psi: TwoModeState) -> TwoModeState:
    """Balanced beam splitter applied blockwise per total photon number."""
    out = np.zeros_like(psi.amplitudes)
    for idx, block in _beam_splitter_blocks(psi.trunc.dim):
        out[idx] = block @ psi.amplitudes[idx]
    return TwoModeState(out, psi.trunc)


def cat_circuit_output(alpha: complex, trunc: TruncationConfig) -> TwoModeState:
    """Joint state after interfering the two even input cats on the beam splitter.

    Mode 1 carries the even real-axis cat, mode 2 the even imaginary-axis cat,
    both of amplitude alpha.
    """
    mode1 = two_cat(alpha, CatPhase(CatAxis.REAL, CatParity.EVEN), trunc)
    mode2 = two_cat(alpha, CatPhase(CatAxis.IMAGINARY, CatParity.EVEN), trunc)
    return apply_beam_splitter(tensor(mode1, mode2))


@lru_cache(maxsize=8)
def _displacement_eigensystem(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of i(a† - a), shared by displacement() and the Wigner grid."""
    hermitian = np.zeros((dim, dim), dtype=complex)
    offs = np.sqrt(np.arange(1, dim, dtype=float))
    hermitian[np.arange(1, dim), np.arange(dim - 1)] = 1j * offs
    hermitian[np.arange(dim - 1), np.arange(1, dim)] = -1j * offs
    w, v = np.linalg.eigh(hermitian)
    return _frozen(w), _frozen(v)


def displacement_matrix(gamma: complex, dim: int) -> np.ndarray:
    """exp(gamma a† - gamma* a) as a dense matrix, exactly unitary at any dim.

    Computed by rotating the fixed eigensystem of i(a† - a), which equals the
    matrix exponential of the truncated generator to machine precision.
    """
    w, v = _displacement_eigensystem(dim)
    mag = abs(gamma)
    core = (v * np.exp(-1j * mag * w)) @ v.conj().T
    if gamma == 0:
        return core
    phases = np.exp(1j * np.angle(gamma) * np.arange(dim))
    return (phases[:, None] * core) * phases.conj()[None, :]


def displacement(gamma: complex, trunc: TruncationConfig) -> Operator:
    """Displacement operator D(gamma); D(gamma)|0> reproduces coherent(gamma)."""
    return Operator(displacement_matrix(gamma, trunc.dim), trunc)
