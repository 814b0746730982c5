"""Truncated Fock-space primitives: states, operators, tensor products, partial traces.

Every type is immutable after construction (the backing arrays are marked
read-only), so values can be shared freely across threads. All operations
return fresh objects and never touch their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroNormError

NORM_FLOOR = 1e-14


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TruncationConfig:
    """Fock levels 0..dim-1 plus the acceptable truncated-tail probability."""

    dim: int
    tail_tol: float = 1e-10

    def __post_init__(self):
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "tail_tol", float(self.tail_tol))
        if self.dim < 2:
            raise ValueError(f"dim must be at least 2, got {self.dim}")
        if not 0.0 <= self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in [0, 1), got {self.tail_tol}")

    @classmethod
    def for_amplitude(cls, amplitude: complex, tail_tol: float = 1e-10) -> "TruncationConfig":
        """Size the space for the largest coherent amplitude in play.

        dim = max(20, ceil(|a|^2 + 8|a| + 12)). The Poisson photon-number
        tail of a coherent state then stays far below the default tail_tol;
        constructors re-check the actual tail of whatever they build.
        """
        m = abs(amplitude)
        return cls(dim=max(20, math.ceil(m * m + 8.0 * m + 12.0)), tail_tol=tail_tol)


def _check_amplitudes(amps: np.ndarray, expected_len: int, what: str) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (expected_len,):
        raise ValueError(f"{what} must have shape ({expected_len},), got {amps.shape}")
    if not np.all(np.isfinite(amps)):
        raise ValueError(f"{what} contains non-finite entries")
    return amps


def _check_matrix(mat: np.ndarray, expected: int, what: str, hermitian_tol: float | None = None) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (expected, expected):
        raise ValueError(f"{what} must have shape ({expected}, {expected}), got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{what} contains non-finite entries")
    if hermitian_tol is not None:
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > hermitian_tol:
            raise ValueError(f"{what} is not Hermitian (deviation {dev:.3e})")
    return mat


@dataclass(frozen=True)
class FockState:
    """Pure single-mode state: complex amplitudes over photon numbers 0..dim-1.

    ``tail`` records the squared-amplitude mass a constructor discarded when
    renormalizing inside the truncated space.
    """

    amplitudes: np.ndarray
    trunc: TruncationConfig
    tail: float = 0.0

    def __post_init__(self):
        amps = _check_amplitudes(self.amplitudes, self.trunc.dim, "FockState amplitudes")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "FockState") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.trunc)


@dataclass(frozen=True)
class Operator:
    """Dense matrix acting on one mode (dim x dim) or two modes (dim^2 x dim^2)."""

    matrix: np.ndarray
    trunc: TruncationConfig

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.trunc.dim
        if mat.shape not in ((d, d), (d * d, d * d)):
            raise ValueError(f"operator must be {d}x{d} or {d * d}x{d * d}, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator contains non-finite entries")
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def n_modes(self) -> int:
        return 1 if self.matrix.shape[0] == self.trunc.dim else 2

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.trunc)

    def apply(self, state):
        """Raw linear action on a FockState or TwoModeState (no normalization)."""
        if isinstance(state, FockState) and self.n_modes == 1:
            return FockState(self.matrix @ state.amplitudes, self.trunc, tail=state.tail)
        if isinstance(state, TwoModeState) and self.n_modes == 2:
            return TwoModeState(self.matrix @ state.amplitudes, self.trunc)
        raise TypeError("operator/state mode count mismatch")


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode state over (n1, n2), stored row-major: index = n1*dim + n2."""

    amplitudes: np.ndarray
    trunc: TruncationConfig

    def __post_init__(self):
        d = self.trunc.dim
        amps = _check_amplitudes(self.amplitudes, d * d, "TwoModeState amplitudes")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    def mode_matrix(self) -> np.ndarray:
        """Read-only (dim, dim) view with rows indexed by the mode-1 photon number."""
        d = self.trunc.dim
        return self.amplitudes.reshape(d, d)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_density(self) -> "TwoModeDensity":
        return TwoModeDensity(np.outer(self.amplitudes, self.amplitudes.conj()), self.trunc)


@dataclass(frozen=True)
class DensityMatrix:
    """Single-mode density matrix; Hermiticity is enforced at 1e-10."""

    matrix: np.ndarray
    trunc: TruncationConfig

    def __post_init__(self):
        mat = _check_matrix(self.matrix, self.trunc.dim, "density matrix", hermitian_tol=1e-10)
        object.__setattr__(self, "matrix", _frozen(mat))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def populations(self) -> np.ndarray:
        return np.diag(self.matrix).real.copy()


@dataclass(frozen=True)
class TwoModeDensity:
    """Joint density matrix over two modes, indexed like TwoModeState."""

    matrix: np.ndarray
    trunc: TruncationConfig

    def __post_init__(self):
        d = self.trunc.dim
        mat = _check_matrix(self.matrix, d * d, "two-mode density matrix", hermitian_tol=1e-10)
        object.__setattr__(self, "matrix", _frozen(mat))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def two_mode_index(n1: int, n2: int, dim: int) -> int:
    """The one place the (n1, n2) -> flat index convention is defined."""
    if not (0 <= n1 < dim and 0 <= n2 < dim):
        raise ValueError(f"photon numbers ({n1}, {n2}) outside 0..{dim - 1}")
    return n1 * dim + n2


def fock_state(n: int, trunc: TruncationConfig) -> FockState:
    """Number state |n>."""
    if not 0 <= n < trunc.dim:
        raise ValueError(f"n={n} outside truncated range 0..{trunc.dim - 1}")
    amps = np.zeros(trunc.dim, dtype=complex)
    amps[n] = 1.0
    return FockState(amps, trunc)


def annihilation_op(trunc: TruncationConfig) -> Operator:
    """Ladder operator with <n-1|a|n> = sqrt(n)."""
    mat = np.diag(np.sqrt(np.arange(1, trunc.dim, dtype=float)), k=1).astype(complex)
    return Operator(mat, trunc)


def creation_op(trunc: TruncationConfig) -> Operator:
    """Ladder operator with <n+1|a†|n> = sqrt(n+1)."""
    mat = np.diag(np.sqrt(np.arange(1, trunc.dim, dtype=float)), k=-1).astype(complex)
    return Operator(mat, trunc)


def number_op(trunc: TruncationConfig) -> Operator:
    return Operator(np.diag(np.arange(trunc.dim, dtype=float)).astype(complex), trunc)


def identity_op(trunc: TruncationConfig) -> Operator:
    return Operator(np.eye(trunc.dim, dtype=complex), trunc)


def parity_op(trunc: TruncationConfig) -> Operator:
    """(-1)^n, exact in the number basis."""
    signs = np.where(np.arange(trunc.dim) % 2 == 0, 1.0, -1.0)
    return Operator(np.diag(signs).astype(complex), trunc)


def tensor(a: FockState, b: FockState) -> TwoModeState:
    """Product state a (x) b; requires both factors to share one truncation."""
    if a.trunc != b.trunc:
        raise ValueError("tensor factors must share the same TruncationConfig")
    return TwoModeState(np.kron(a.amplitudes, b.amplitudes), a.trunc)


def partial_trace(rho: TwoModeDensity, keep: int) -> DensityMatrix:
    """Trace out one mode of a joint density matrix; keep is 1 or 2."""
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep}")
    d = rho.trunc.dim
    four = rho.matrix.reshape(d, d, d, d)  # (n1, n2, m1, m2)
    if keep == 1:
        reduced = np.einsum("abcb->ac", four)
    else:
        reduced = np.einsum("abad->bd", four)
    return DensityMatrix(reduced, rho.trunc)


def normalize(obj):
    """Scale to unit norm (states) or unit trace (densities).

    Returns (normalized, weight) where weight is the original norm or trace.
    Upstream code uses the weight as a herald probability amplitude/mass.
    """
    if isinstance(obj, FockState):
        w = obj.norm()
        if w < NORM_FLOOR:
            raise ZeroNormError("cannot normalize a numerically zero state")
        return FockState(obj.amplitudes / w, obj.trunc, tail=obj.tail), w
    if isinstance(obj, TwoModeState):
        w = obj.norm()
        if w < NORM_FLOOR:
            raise ZeroNormError("cannot normalize a numerically zero state")
        return TwoModeState(obj.amplitudes / w, obj.trunc), w
    if isinstance(obj, DensityMatrix):
        w = obj.trace()
        if w < NORM_FLOOR:
            raise ZeroNormError("cannot normalize a zero-trace density matrix")
        return DensityMatrix(obj.matrix / w, obj.trunc), w
    if isinstance(obj, TwoModeDensity):
        w = obj.trace()
        if w < NORM_FLOOR:
            raise ZeroNormError("cannot normalize a zero-trace density matrix")
        return TwoModeDensity(obj.matrix / w, obj.trunc), w
    raise TypeError(f"cannot normalize object of type {type(obj).__name__}")
