"""Closed-form results for the empty cavity, used to check the numerics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DenominatorVanishes",
    "WeakDriveSolution",
    "thermal_pn",
    "squeezed_vacuum_pn",
    "weak_drive_solution",
    "thermal_rate_rhs",
]


class DenominatorVanishes(ZeroDivisionError):
    pass


def thermal_pn(N: float, n: int) -> float:
    """Geometric photon distribution ``N^n / (1+N)^(n+1)``."""
    if N < 0 or n < 0:
        raise ValueError("need N >= 0 and n >= 0")
    return N**n / (1.0 + N) ** (n + 1)


def squeezed_vacuum_pn(r: float, n: int, as_printed: bool = False) -> float:
    """Photon-number probability of the squeezed vacuum ``S(r)|0>``.

    Odd ``n`` gives 0.  For ``n = 2k`` the value is
    ``(2k)! tanh^{2k}(r) / (2^{2k} (k!)^2 cosh r)``.  With ``as_printed=True``
    the denominator carries a single ``k!``; that variant is not normalized
    and exists only for comparison.
    """
    if r < 0 or n < 0:
        raise ValueError("need r >= 0 and n >= 0")
    if n % 2:
        return 0.0
    k = n // 2
    # log form keeps large k finite
    kfact = math.lgamma(k + 1)
    log_denominator = 2 * k * math.log(2.0) + (kfact if as_printed else 2 * kfact)
    if r == 0:
        return 1.0 if k == 0 else 0.0
    log_p = (
        math.lgamma(2 * k + 1)
        + 2 * k * math.log(math.tanh(r))
        - log_denominator
        - math.log(math.cosh(r))
    )
    return math.exp(log_p)


@dataclass(frozen=True)
class WeakDriveSolution:
    p11: float
    p22: float
    p20: complex
    w: float


def weak_drive_solution(N: float, M: float, delta_c: float, kappa: float) -> WeakDriveSolution:
    """Populations of ``|1>`` and ``|2>`` for a weakly squeezed empty cavity.

    Truncates the steady-state equations at two photons, with ``p00 ~ 1``.
    ``M`` is the magnitude of the pair correlation.  The coherence ``p20`` is
    back-substituted from
    ``kappa M (1 - 2 p11 + p22) + sqrt(2) [kappa (3N+1) + i delta_c] p20 = 0``.
    """
    M = abs(M)
    a = 3.0 * N + 1.0
    w = -2.0 * kappa**2 * M**2 * a / (kappa**2 * a**2 + delta_c**2)
    den = (4 * N + 2 * w) * (2 + 2 * N + w) - (1 + 3 * N + 2 * w) * (4 + 10 * N + w)
    if abs(den) < 1e-14:
        raise DenominatorVanishes(f"denominator {den:.3e} at N={N}, W={w}")
    p11 = (w * (2 + 2 * N + w) - (N + w) * (4 + 10 * N + w)) / den
    p22 = ((1 + 3 * N + 2 * w) * w - (4 * N + 2 * w) * (N + w)) / den
    p20 = -kappa * M * (1 - 2 * p11 + p22) / (math.sqrt(2.0) * (kappa * a + 1j * delta_c))
    return WeakDriveSolution(p11=float(p11), p22=float(p22), p20=complex(p20), w=float(w))


def thermal_rate_rhs(populations, N: float, kappa: float) -> np.ndarray:
    """Time derivative of the photon populations for a thermal bath.

    ``dp_n/dt = -2 kappa (1+N) [n p_n - (n+1) p_{n+1}] - 2 kappa N [(n+1) p_n - n p_{n-1}]``
    with populations beyond the array taken as zero.
    """
    p = np.asarray(populations, dtype=float)
    n = np.arange(len(p), dtype=float)
    up = np.zeros_like(p)
    up[:-1] = (n[1:]) * p[1:]
    down = np.zeros_like(p)
    down[1:] = n[1:] * p[:-1]
    return -2 * kappa * (1 + N) * (n * p - up) - 2 * kappa * N * ((n + 1) * p - down)
