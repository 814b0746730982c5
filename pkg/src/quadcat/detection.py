"""Detector models and the heralded conditional states they produce.

Inefficient photon counting is modeled as a transmission-eta loss channel on
the measured mode followed by an ideal detector. The loss is applied to the
measured mode of the joint pure state (the purification is kept until the
measurement), so the mode-1 conditionals inherit the classical correlations
carried by the lost photons; tracing out the partner mode first would not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import TraceLossError, ZeroNormError
from .fock_core import (
    NORM_FLOOR,
    DensityMatrix,
    FockState,
    Operator,
    TruncationConfig,
    TwoModeDensity,
    TwoModeState,
    partial_trace,
)
from .optics import LossChannel, loss_kraus_operators, occupied_levels


class DetectorKind(Enum):
    PNRD = "pnrd"
    ONOFF = "onoff"
    MULTIPLEXED_ONOFF = "multiplexed_onoff"


@dataclass(frozen=True)
class DetectorModel:
    """Detector description: kind, quantum efficiency, and multiplexing count m."""

    kind: DetectorKind
    eta: float = 1.0
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "m", int(self.m))
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.m < 1:
            raise ValueError(f"detector count m must be >= 1, got {self.m}")
        if self.kind is not DetectorKind.MULTIPLEXED_ONOFF and self.m != 1:
            raise ValueError("m > 1 only makes sense for multiplexed on-off detection")

    def click_povm(self, trunc: TruncationConfig) -> Operator:
        if self.kind is DetectorKind.PNRD:
            raise ValueError("a PNRD resolves photon number; it has no single click POVM")
        return onoff_click_povm(self.m, trunc)


@dataclass(frozen=True)
class HeraldRecord:
    """One measurement outcome: count n, its probability, and the conditional state.

    ``conditional`` is None when the outcome probability falls below 1e-14
    (reported with probability 0). ``pure`` carries the conditional as a ket
    whenever ideal detection guarantees purity.
    """

    n: int
    probability: float
    conditional: DensityMatrix | None
    pure: FockState | None = None


def _measured_columns(psi: TwoModeState, measured_mode: int) -> np.ndarray:
    """(dim_partner, dim_measured) matrix whose column n is <n|_measured psi."""
    if measured_mode == 2:
        return psi.mode_matrix()
    if measured_mode == 1:
        return psi.mode_matrix().T
    raise ValueError(f"measured_mode must be 1 or 2, got {measured_mode}")


def pnrd_project(psi: TwoModeState, measured_mode: int, n: int) -> HeraldRecord:
    """Ideal photon-number projection of one mode onto |n>.

    probability = ||<n| psi||^2; the conditional on the partner mode is pure.
    Outcomes with probability below 1e-14 come back with probability 0 and
    no conditional state.
    """
    d = psi.trunc.dim
    if not 0 <= n < d:
        raise ValueError(f"outcome n={n} outside truncated range 0..{d - 1}")
    vec = _measured_columns(psi, measured_mode)[:, n]
    prob = float(np.vdot(vec, vec).real)
    if prob < NORM_FLOOR:
        return HeraldRecord(n=n, probability=0.0, conditional=None)
    ket = FockState(vec / math.sqrt(prob), psi.trunc)
    return HeraldRecord(n=n, probability=prob, conditional=ket.to_density(), pure=ket)


def pnrd_outcome_distribution(
    psi: TwoModeState,
    measured_mode: int,
    eta: float,
    n_cutoff: int,
    kraus_cutoff: int | None = None,
) -> list[HeraldRecord]:
    """All outcomes n = 0..n_cutoff of an efficiency-eta PNRD on one mode.

    Conditional states are mixed in general. The probabilities cover only the
    reported outcomes; 1 - sum(probabilities) is the mass sitting in outcomes
    above n_cutoff and is never silently renormalized away.
    """
    d = psi.trunc.dim
    if not 0 <= n_cutoff < d:
        raise ValueError(f"n_cutoff must lie in 0..{d - 1}, got {n_cutoff}")
    cols = _measured_columns(psi, measured_mode)
    measured_pops = np.sum(np.abs(cols) ** 2, axis=0)
    if kraus_cutoff is None:
        channel = LossChannel.for_max_level(eta, occupied_levels(measured_pops) - 1)
    else:
        channel = LossChannel(eta, kraus_cutoff)
    kraus = loss_kraus_operators(channel, psi.trunc)

    probs = np.zeros(d)
    conds = np.zeros((n_cutoff + 1, cols.shape[0], cols.shape[0]), dtype=complex)
    for k in kraus:
        lossy = cols @ k.T  # loss acts on the measured index
        probs += np.sum(np.abs(lossy) ** 2, axis=0)
        kept = lossy[:, : n_cutoff + 1]
        conds += np.einsum("ap,bp->pab", kept, kept.conj())
    deficit = float(np.vdot(psi.amplitudes, psi.amplitudes).real) - float(probs.sum())
    if deficit > 1e-9:
        raise TraceLossError(
            f"measured-mode loss dropped {deficit:.3e} trace; raise kraus_cutoff"
        )

    records = []
    for n in range(n_cutoff + 1):
        p = float(probs[n])
        if p < NORM_FLOOR:
            records.append(HeraldRecord(n=n, probability=0.0, conditional=None))
        else:
            records.append(
                HeraldRecord(n=n, probability=p, conditional=DensityMatrix(conds[n] / p, psi.trunc))
            )
    return records


def onoff_click_povm(m: int, trunc: TruncationConfig) -> Operator:
    """POVM element for exactly one click among m on-off detectors.

    Diagonal with entry 0 at n = 0 and m^{-(n-1)} at n >= 1: all n photons
    must end up in the same detector after the balanced m-way split. m = 1
    is the bare on-off "click" projector I - |0><0|.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    diag = np.zeros(trunc.dim)
    ns = np.arange(1, trunc.dim)
    diag[1:] = float(m) ** (-(ns - 1.0))
    return Operator(np.diag(diag).astype(complex), trunc)


def condition_on_povm(
    rho: TwoModeDensity, measured_mode: int, povm: Operator
) -> tuple[float, DensityMatrix]:
    """Outcome probability and heralded partner-mode state for a POVM element.

    For the diagonal POVMs used here the conditional is the probability
    weighted mixture of the per-Fock-outcome conditionals; non-diagonal
    elements fall back to the sqrt(povm) conditioning rule.
    """
    if measured_mode not in (1, 2):
        raise ValueError(f"measured_mode must be 1 or 2, got {measured_mode}")
    d = rho.trunc.dim
    if povm.matrix.shape != (d, d):
        raise ValueError("POVM element must act on a single mode")
    four = rho.matrix.reshape(d, d, d, d)  # (n1, n2, m1, m2)

    offdiag = np.max(np.abs(povm.matrix - np.diag(np.diag(povm.matrix))))
    if offdiag < 1e-14:
        weights = np.diag(povm.matrix).real
        if weights.min() < -1e-12 or weights.max() > 1.0 + 1e-12:
            raise ValueError("POVM element must have eigenvalues in [0, 1]")
        if measured_mode == 2:
            blocks = np.einsum("anbn,n->ab", four, weights)
        else:
            blocks = np.einsum("nanb,n->ab", four, weights)
        prob = float(np.trace(blocks).real)
        if prob < NORM_FLOOR:
            raise ZeroNormError("POVM outcome has vanishing probability")
        return prob, DensityMatrix(blocks / prob, rho.trunc)

    evals, evecs = np.linalg.eigh(povm.matrix)
    if evals.min() < -1e-12 or evals.max() > 1.0 + 1e-12:
        raise ValueError("POVM element must have eigenvalues in [0, 1]")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    if measured_mode == 2:
        op = np.kron(np.eye(d, dtype=complex), root)
    else:
        op = np.kron(root, np.eye(d, dtype=complex))
    conditioned = op @ rho.matrix @ op.conj().T
    prob = float(np.trace(conditioned).real)
    if prob < NORM_FLOOR:
        raise ZeroNormError("POVM outcome has vanishing probability")
    reduced = partial_trace(TwoModeDensity(conditioned / prob, rho.trunc), keep=3 - measured_mode)
    return prob, reduced


def success_probability_closed_form(beta: complex) -> float:
    """Vacuum-projection success probability of the cat interference circuit.

    P = e^{-|b|^2} (1 + e^{-2|b|^2} + 2 e^{-|b|^2} cos|b|^2) / (1 + e^{-2|b|^2})^2,
    exactly 1 at beta = 0.
    """
    x = abs(beta) ** 2
    e1 = math.exp(-x)
    e2 = math.exp(-2.0 * x)
    return e1 * (1.0 + e2 + 2.0 * e1 * math.cos(x)) / (1.0 + e2) ** 2


def pool_heralds(
    records: Sequence[HeraldRecord], residue: int | None = None, modulus: int = 4
) -> tuple[float, DensityMatrix]:
    """Probability-weighted mixture of conditionals, optionally one n mod 4 class."""
    total = 0.0
    acc = None
    trunc = None
    for rec in records:
        if rec.conditional is None:
            continue
        if residue is not None and rec.n % modulus != residue:
            continue
        total += rec.probability
        trunc = rec.conditional.trunc
        term = rec.probability * rec.conditional.matrix
        acc = term if acc is None else acc + term
    if acc is None or total < NORM_FLOOR:
        raise ZeroNormError("no outcome mass in the requested herald class")
    return total, DensityMatrix(acc / total, trunc)
