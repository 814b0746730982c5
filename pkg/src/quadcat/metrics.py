"""Fidelities, the Wigner function, and displacement sensitivity (QFI).

Phase-space convention, stated once: a grid point (x, p) is the complex
amplitude gamma = x + i p, and

    W(gamma) = (2/pi) Tr[rho D(gamma) P D†(gamma)],   P = (-1)^n,

so W integrates to 1 over dx dp, is bounded by 2/pi in magnitude, and the
vacuum peaks at 2/pi. On these axes the position quadrature (a + a†)/sqrt(2)
of a state centered at amplitude gamma reads sqrt(2) x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .detection import pnrd_outcome_distribution
from .errors import NonPositiveError, QuadcatError
from .fock_core import DensityMatrix, FockState, TruncationConfig
from .optics import _displacement_eigensystem, cat_circuit_output, displacement_matrix
from .state_factory import four_cat

_EIG_CLAMP = -1e-6       # below this an eigenvalue is a bug, not rounding
_WIGNER_DIM_CAP = 1200   # working-dimension budget for grid evaluation
_WIGNER_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class WignerGrid:
    """Wigner values on a rectangular amplitude-plane grid; values[i, j] = W(x_j, p_i)."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int
    values: np.ndarray
    reliable: bool = True

    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)


@dataclass(frozen=True)
class QfiEstimate:
    """Richardson-extrapolated finite-difference QFI for displacements along phi."""

    value: float
    epsilon_used: float
    phi: float
    richardson_residual: float


class PerOutcome(NamedTuple):
    n: int
    probability: float
    fidelity: float


class MeanHeraldedFidelity(NamedTuple):
    mean: float
    std: float
    per_outcome: list[PerOutcome]


def fidelity_pure(rho: DensityMatrix, target: FockState) -> float:
    """<target| rho |target>, clamped into [0, 1]."""
    val = float(np.real(target.amplitudes.conj() @ rho.matrix @ target.amplitudes))
    return min(1.0, max(0.0, val))


def _psd_sqrt(mat: np.ndarray, what: str) -> np.ndarray:
    evals, evecs = np.linalg.eigh(mat)
    if evals.min() < _EIG_CLAMP:
        raise NonPositiveError(f"{what} has eigenvalue {evals.min():.3e} below {_EIG_CLAMP}")
    return (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via singular values of sqrt(rho) sqrt(sigma).

    Eigenvalues in [-1e-6, 0) are clamped to zero; anything lower raises
    NonPositiveError. Reduces to fidelity_pure when either argument is pure.
    """
    if rho.trunc != sigma.trunc:
        raise ValueError("fidelity arguments must share one truncation")
    a = _psd_sqrt(rho.matrix, "rho")
    b = _psd_sqrt(sigma.matrix, "sigma")
    sv = np.linalg.svd(a @ b, compute_uv=False)
    return min(1.0, max(0.0, float(sv.sum() ** 2)))


def _support_dim(rho: DensityMatrix, floor: float = 1e-15) -> int:
    pops = np.diag(rho.matrix).real
    idx = np.nonzero(pops > floor)[0]
    return int(idx[-1]) + 1 if idx.size else 2


def wigner(
    rho: DensityMatrix,
    x_min: float = -5.0,
    x_max: float = 5.0,
    p_min: float = -5.0,
    p_max: float = 5.0,
    n_x: int = 101,
    n_p: int = 101,
) -> WignerGrid:
    """Displaced-parity Wigner function on a rectangular grid.

    Evaluated through the identity D(g) P D†(g) = D(2g) P inside a working
    space sized so that displacements to the farthest grid point stay
    faithful; the result is flagged unreliable only if that working space
    would exceed the internal budget. The imaginary residue of every value
    must stay below 1e-9 (checked, then discarded).
    """
    if n_x < 2 or n_p < 2:
        raise ValueError("grid needs at least 2 points per axis")
    xs = np.linspace(x_min, x_max, n_x)
    ps = np.linspace(p_min, p_max, n_p)
    gx, gp = np.meshgrid(xs, ps)
    zeta = 2.0 * (gx + 1j * gp).ravel()  # displacement argument of D(2 gamma)

    n_supp = _support_dim(rho)
    reach = np.max(np.abs(zeta)) + math.sqrt(n_supp) + 5.0
    needed = int(math.ceil(reach * reach)) + 8
    dim_work = max(rho.trunc.dim, needed)
    reliable = True
    if dim_work > _WIGNER_DIM_CAP:
        dim_work = max(rho.trunc.dim, _WIGNER_DIM_CAP)
        reliable = False

    w, v = _displacement_eigensystem(dim_work)
    block = rho.matrix[:n_supp, :n_supp]
    # Tr[rho D(zeta) P] = sum_{k,n} B[n,k] D(zeta)[n,k] with B[n,k] = rho[k,n] (-1)^k
    signs = np.where(np.arange(n_supp) % 2 == 0, 1.0, -1.0)
    b_mat = block.T * signs[None, :]

    mags = np.abs(zeta)
    args = np.angle(zeta)
    levels = np.arange(n_supp)
    ray = np.exp(1j * np.outer(args, levels))  # phase rotation e^{i theta n}

    vals = np.zeros(zeta.size, dtype=complex)
    v_top = v[:n_supp, :]
    for j in range(dim_work):
        y = ray * v_top[:, j][None, :]
        inner = y.conj() @ b_mat.T  # per point: sum_k B[n,k] conj(y[k])
        gj = np.sum(inner * y, axis=1)
        vals += gj * np.exp(-1j * mags * w[j])

    imag_max = float(np.max(np.abs(vals.imag)))
    if imag_max > _WIGNER_IMAG_TOL:
        raise QuadcatError(f"Wigner imaginary residue {imag_max:.3e} exceeds 1e-9")
    grid = (2.0 / math.pi) * vals.real.reshape(n_p, n_x)
    return WignerGrid(
        x_min=float(x_min), x_max=float(x_max), p_min=float(p_min), p_max=float(p_max),
        n_x=int(n_x), n_p=int(n_p), values=grid, reliable=reliable,
    )


def qfi_displacement(rho: DensityMatrix, phi: float = 0.0, epsilon: float = 1e-3) -> QfiEstimate:
    """Quantum Fisher information for displacements along direction phi.

    Evaluates 8 (1 - sqrt(F(rho, D(e e^{i phi}) rho D†))) / e^2 at epsilon and
    epsilon/2 and Richardson-extrapolates the leading O(e^2) error; the
    reported residual is the size of the extrapolation correction.
    """
    if not 1e-4 <= epsilon <= 1e-1:
        raise ValueError(f"epsilon must lie in [1e-4, 1e-1], got {epsilon}")
    estimates = []
    for eps in (epsilon, epsilon / 2.0):
        d_mat = displacement_matrix(eps * np.exp(1j * phi), rho.trunc.dim)
        displaced = DensityMatrix(d_mat @ rho.matrix @ d_mat.conj().T, rho.trunc)
        fid = uhlmann_fidelity(rho, displaced)
        estimates.append(8.0 * (1.0 - math.sqrt(fid)) / eps**2)
    coarse, fine = estimates
    value = (4.0 * fine - coarse) / 3.0
    return QfiEstimate(
        value=value,
        epsilon_used=float(epsilon),
        phi=float(phi),
        richardson_residual=abs(value - fine),
    )


def mean_heralded_fidelity(
    alpha: float,
    eta: float,
    n_cutoff: int = 20,
    trunc: TruncationConfig | None = None,
    residue: int | None = None,
) -> MeanHeraldedFidelity:
    """Probability-weighted fidelity of the lossy-PNRD cat circuit across outcomes.

    Runs the two-cat interference circuit at input amplitude alpha, detects
    mode 2 with an efficiency-eta PNRD, and scores each outcome n against the
    ideal four-component cat of amplitude alpha e^{i pi/4} and class n mod 4.
    The mean and standard deviation are weighted by the outcome probabilities
    over n = 0..n_cutoff (optionally restricted to one n mod 4 residue).
    """
    if trunc is None:
        base = TruncationConfig.for_amplitude(alpha)
        trunc = TruncationConfig(max(base.dim, n_cutoff + 2), base.tail_tol)
    psi = cat_circuit_output(alpha, trunc)
    records = pnrd_outcome_distribution(psi, measured_mode=2, eta=eta, n_cutoff=n_cutoff)
    beta = alpha * np.exp(1j * np.pi / 4.0)
    targets = {k: four_cat(beta, k, trunc) for k in range(4)}

    rows: list[PerOutcome] = []
    for rec in records:
        if rec.conditional is None:
            continue
        if residue is not None and rec.n % 4 != residue:
            continue
        fid = fidelity_pure(rec.conditional, targets[rec.n % 4])
        rows.append(PerOutcome(n=rec.n, probability=rec.probability, fidelity=fid))
    if not rows:
        raise ZeroDivisionError("no outcomes with nonzero probability")
    weight = sum(r.probability for r in rows)
    mean = sum(r.probability * r.fidelity for r in rows) / weight
    var = sum(r.probability * (r.fidelity - mean) ** 2 for r in rows) / weight
    return MeanHeraldedFidelity(mean=mean, std=math.sqrt(max(0.0, var)), per_outcome=rows)
