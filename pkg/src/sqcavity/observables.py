"""Intracavity observables of a steady state."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fock import number
from .model import BathKind
from .solver import DensityMatrix

__all__ = [
    "ImaginaryResidue",
    "MismatchedParams",
    "PhotonDistribution",
    "DEFAULT_THRESHOLD",
    "mean_photon",
    "photon_distribution",
    "delta_n",
    "detect_atom",
]

DEFAULT_THRESHOLD = 1e-6


class ImaginaryResidue(ValueError):
    """An expectation value that should be real has a sizeable imaginary part."""


class MismatchedParams(ValueError):
    """Two states compared by :func:`delta_n` differ in more than the bath kind."""


@dataclass(frozen=True)
class PhotonDistribution:
    """Field photon-number probabilities ``P_0 .. P_n`` (atom traced out).

    A full distribution sums to one; a truncated report need not.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = self.probs
        if p.ndim != 1 or len(p) < 1:
            raise ValueError("probs must be a non-empty 1-D array")
        if np.any(p < -1e-10) or np.any(p > 1 + 1e-10):
            raise ValueError("photon-number probabilities outside [0, 1]")

    def __getitem__(self, n):
        return self.probs[n]

    def __len__(self):
        return len(self.probs)

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.probs)), self.probs))


def mean_photon(rho: DensityMatrix) -> float:
    """``Tr(a+a rho)``."""
    value = np.trace(number(rho.cfg) @ rho.data)
    if abs(value.imag) > 1e-8:
        raise ImaginaryResidue(f"<a+a> has imaginary part {value.imag:.3e}")
    return float(value.real)


def photon_distribution(rho: DensityMatrix) -> PhotonDistribution:
    """Diagonal of the field state after tracing out the atom.

    No renormalization is applied, so truncation losses stay visible.
    """
    diag = np.real(np.diag(rho.data))
    if rho.cfg.include_atom:
        diag = diag.reshape(2, rho.cfg.n_levels).sum(axis=0)
    if abs(diag.sum() - 1.0) > 1e-9:
        raise ValueError(f"photon-number probabilities sum to {diag.sum():.12g}")
    return PhotonDistribution(diag.copy())


def delta_n(rho_sq: DensityMatrix, rho_th: DensityMatrix) -> float:
    """Excess mean photon number of ``rho_sq`` over its thermal twin ``rho_th``.

    Both states must come from the same parameters apart from the bath, and
    the baths must carry the same mean photon number.
    """
    p, q = rho_sq.params, rho_th.params
    if p is None or q is None:
        raise MismatchedParams("both states need parameter provenance")
    if p != q:
        if replace(p, bath=q.bath) != q:
            raise MismatchedParams("states differ in more than the bath")
        if p.bath.n_eff != q.bath.n_eff:
            raise MismatchedParams(
                f"bath photon numbers differ: {p.bath.n_eff!r} vs {q.bath.n_eff!r}"
            )
        if q.bath.kind is not BathKind.THERMAL:
            raise MismatchedParams("reference state must come from a thermal bath")
    return mean_photon(rho_sq) - mean_photon(rho_th)


def detect_atom(P: PhotonDistribution, threshold: float = DEFAULT_THRESHOLD) -> bool:
    """Whether the one-photon probability exceeds ``threshold``.

    Meaningful for the resonant (``delta_c = 0``), undriven (``eta = 0``)
    squeezed-vacuum steady state: an empty cavity then holds only even
    photon numbers.
    """
    return bool(P.probs[1] > threshold)
