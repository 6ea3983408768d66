"""Truncated Fock-space and two-level-atom operators.

Composite operators use the ordering atom ⊗ field, so the basis index of
``|s, n>`` is ``s * (n_max + 1) + n`` with ``s = 0`` for ``|g>`` and ``s = 1``
for ``|e>``.  All builders return dense ``complex128`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "SpaceConfig",
    "annihilation",
    "creation",
    "number",
    "atom_lowering",
    "atom_raising",
    "identity",
    "tensor",
]


@dataclass(frozen=True)
class SpaceConfig:
    """Truncation of the atom-field Hilbert space.

    Parameters
    ----------
    n_max : int
        Highest retained photon number.
    include_atom : bool
        Whether the two-level atom factor is present.
    """

    n_max: int = 15
    include_atom: bool = True

    def __post_init__(self):
        if isinstance(self.n_max, bool) or int(self.n_max) != self.n_max:
            raise ValueError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_levels if self.include_atom else self.n_levels

    def index(self, s: int, n: int) -> int:
        """Basis index of ``|s, n>`` (``s`` is ignored without an atom)."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"photon number {n} outside 0..{self.n_max}")
        if not self.include_atom:
            return n
        return s * self.n_levels + n


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the operators, left factor outermost."""
    if not ops:
        raise ValueError("tensor needs at least one operator")
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def _field_annihilation(n_levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1).astype(complex)


def _on_field(cfg: SpaceConfig, op: np.ndarray) -> np.ndarray:
    if cfg.include_atom:
        return tensor(np.eye(2), op)
    return op


def annihilation(cfg: SpaceConfig) -> np.ndarray:
    """Photon annihilation operator, ``<n-1|a|n> = sqrt(n)``."""
    return _on_field(cfg, _field_annihilation(cfg.n_levels))


def creation(cfg: SpaceConfig) -> np.ndarray:
    return annihilation(cfg).conj().T


def number(cfg: SpaceConfig) -> np.ndarray:
    return _on_field(cfg, np.diag(np.arange(cfg.n_levels, dtype=float)).astype(complex))


def atom_lowering(cfg: SpaceConfig) -> np.ndarray:
    """Atomic lowering operator ``|g><e|`` (identity on the field)."""
    if not cfg.include_atom:
        raise ValueError("atom_lowering requires a space with the atom factor")
    sigma_minus = np.array([[0, 1], [0, 0]], dtype=complex)
    return tensor(sigma_minus, np.eye(cfg.n_levels))


def atom_raising(cfg: SpaceConfig) -> np.ndarray:
    return atom_lowering(cfg).conj().T


def identity(cfg: SpaceConfig) -> np.ndarray:
    return np.eye(cfg.dim, dtype=complex)
