"""Driven Jaynes-Cummings model with a broadband squeezed (or thermal) cavity bath.

Units: every rate and detuning is expressed in units of the atomic decay
parameter ``gamma``.  Dissipator prefactors follow the convention

    L_atom rho = -gamma (s+ s- rho - 2 s- rho s+ + rho s+ s-)

so the atomic population decays at ``2 gamma`` and the empty-cavity energy
decays at ``2 kappa``.  The superoperator acts on column-stacked density
matrices, ``vec(A rho B) = (B^T kron A) vec(rho)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fock import SpaceConfig, annihilation, atom_lowering, identity, number

__all__ = [
    "BathKind",
    "BathSpec",
    "SystemParams",
    "Liouvillian",
    "bath_parameters",
    "build_hamiltonian",
    "build_liouvillian",
    "cavity_dissipator",
]


class BathKind(enum.Enum):
    SQUEEZED_VACUUM = "squeezed"
    THERMAL = "thermal"
    VACUUM = "vacuum"


def bath_parameters(r: float, phi: float = 0.0) -> tuple[float, complex]:
    """Return ``(N, M) = (sinh^2 r, cosh r sinh r e^{i phi})``."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    s = np.sinh(r)
    return float(s * s), complex(np.cosh(r) * s * np.exp(1j * phi))


@dataclass(frozen=True)
class BathSpec:
    """Reservoir seen by the cavity mode.

    Use the :meth:`squeezed`, :meth:`thermal` and :meth:`vacuum`
    constructors rather than filling the fields by hand.
    """

    kind: BathKind
    r: float = 0.0
    phi: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing parameter must be >= 0, got {self.r}")
        if self.nbar < 0:
            raise ValueError(f"thermal occupation must be >= 0, got {self.nbar}")
        if self.kind is not BathKind.SQUEEZED_VACUUM and (self.r or self.phi):
            raise ValueError(f"{self.kind.value} bath takes no squeezing parameters")
        if self.kind is not BathKind.THERMAL and self.nbar:
            raise ValueError(f"{self.kind.value} bath takes no thermal occupation")

    @classmethod
    def squeezed(cls, r: float, phi: float = 0.0) -> "BathSpec":
        return cls(BathKind.SQUEEZED_VACUUM, r=float(r), phi=float(phi))

    @classmethod
    def thermal(cls, nbar: float) -> "BathSpec":
        return cls(BathKind.THERMAL, nbar=float(nbar))

    @classmethod
    def vacuum(cls) -> "BathSpec":
        return cls(BathKind.VACUUM)

    @property
    def n_eff(self) -> float:
        if self.kind is BathKind.SQUEEZED_VACUUM:
            return bath_parameters(self.r, self.phi)[0]
        return self.nbar

    @property
    def m_eff(self) -> complex:
        if self.kind is BathKind.SQUEEZED_VACUUM:
            return bath_parameters(self.r, self.phi)[1]
        return 0j

    def thermal_twin(self) -> "BathSpec":
        """Thermal bath with the same mean photon number."""
        return BathSpec.thermal(self.n_eff)


@dataclass(frozen=True)
class SystemParams:
    """One simulation point.

    ``delta_a`` defaults to ``None``, meaning the atomic detuning follows
    ``delta_c`` (resonant atom and cavity).  ``dataclasses.replace`` on
    ``delta_c`` then keeps the two locked.
    """

    delta_c: float = 0.0
    g: float = 0.0
    eta: float = 0.0
    gamma: float = 1.0
    kappa: float = 1.0
    bath: BathSpec = field(default_factory=BathSpec.vacuum)
    delta_a: float | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")

    @property
    def atomic_detuning(self) -> float:
        return self.delta_c if self.delta_a is None else self.delta_a


def build_hamiltonian(p: SystemParams, cfg: SpaceConfig) -> np.ndarray:
    """Rotating-frame Hamiltonian (hbar = 1).

    ``H = dC a+a + dA s+s- + g (a+ s- + a s+) + eta (a + a+)``.  Without the
    atom factor only the cavity and drive terms are kept, which requires
    ``g == 0``.
    """
    a = annihilation(cfg)
    ad = a.conj().T
    h = p.delta_c * number(cfg) + p.eta * (a + ad)
    if cfg.include_atom:
        sm = atom_lowering(cfg)
        spl = sm.conj().T
        h = h + p.atomic_detuning * (spl @ sm) + p.g * (ad @ sm + a @ spl)
    elif p.g != 0:
        raise ValueError("g != 0 requires a space with the atom factor")
    return h


@dataclass(frozen=True)
class Liouvillian:
    """Generator of ``d vec(rho)/dt = L vec(rho)``.

    ``matrix`` is stored sparse (CSR); :meth:`toarray` gives the dense form.
    ``params`` and ``cfg`` record where the generator came from.
    """

    matrix: sp.csr_matrix
    cfg: SpaceConfig
    params: SystemParams | None = None

    @property
    def hilbert_dim(self) -> int:
        return self.cfg.dim

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm(self) -> float:
        """Induced 1-norm (largest absolute column sum)."""
        return float(spla.norm(self.matrix, 1))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.hilbert_dim
        out = self.matrix @ np.asarray(rho, dtype=complex).reshape(-1, order="F")
        return out.reshape(d, d, order="F")


def _pre(op: np.ndarray) -> sp.csr_matrix:
    return sp.kron(sp.identity(op.shape[0], format="csr"), sp.csr_matrix(op), format="csr")


def _post(op: np.ndarray) -> sp.csr_matrix:
    return sp.kron(sp.csr_matrix(op.T), sp.identity(op.shape[0], format="csr"), format="csr")


def _sandwich(left: np.ndarray, right: np.ndarray) -> sp.csr_matrix:
    return sp.kron(sp.csr_matrix(right.T), sp.csr_matrix(left), format="csr")


def _damping(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> sp.csr_matrix:
    """Superoperator of ``-(x rho - 2 y rho z + rho x)``."""
    return -(_pre(x) - 2.0 * _sandwich(y, z) + _post(x))


def _commutator(h: np.ndarray) -> sp.csr_matrix:
    return -1j * (_pre(h) - _post(h))


@lru_cache(maxsize=32)
def _unit_superoperators(cfg: SpaceConfig) -> dict[str, sp.csr_matrix]:
    a = annihilation(cfg)
    ad = a.conj().T
    terms = {
        "cavity_detuning": _commutator(number(cfg)),
        "drive": _commutator(a + ad),
        "loss": _damping(ad @ a, a, ad),
        "gain": _damping(a @ ad, ad, a),
        "pair_up": _damping(ad @ ad, ad, ad),
        "pair_down": _damping(a @ a, a, a),
    }
    if cfg.include_atom:
        sm = atom_lowering(cfg)
        spl = sm.conj().T
        terms["atom_detuning"] = _commutator(spl @ sm)
        terms["coupling"] = _commutator(ad @ sm + a @ spl)
        terms["atom_decay"] = _damping(spl @ sm, sm, spl)
    for m in terms.values():
        m.eliminate_zeros()
        m.sort_indices()
    return terms


def _combine(cfg: SpaceConfig, coefficients: list[tuple[str, complex]]) -> sp.csr_matrix:
    units = _unit_superoperators(cfg)
    d2 = cfg.dim**2
    out = sp.csr_matrix((d2, d2), dtype=complex)
    for name, c in coefficients:
        if c != 0:
            out = out + c * units[name]
    out.eliminate_zeros()
    out.sort_indices()
    return out


def cavity_dissipator(cfg: SpaceConfig, kappa: float, n_eff: float, m_eff: complex) -> sp.csr_matrix:
    """Cavity-bath superoperator with prefactors ``kappa(1+N), kappa N, kappa M, kappa M*``."""
    return _combine(
        cfg,
        [
            ("loss", kappa * (1.0 + n_eff)),
            ("gain", kappa * n_eff),
            ("pair_up", kappa * m_eff),
            ("pair_down", kappa * np.conj(m_eff)),
        ],
    )


def build_liouvillian(p: SystemParams, cfg: SpaceConfig) -> Liouvillian:
    """Liouvillian of the full master equation for ``p`` on the space ``cfg``."""
    if not cfg.include_atom and p.g != 0:
        raise ValueError("g != 0 requires a space with the atom factor")
    n_eff, m_eff = p.bath.n_eff, p.bath.m_eff
    coefficients = [
        ("cavity_detuning", p.delta_c),
        ("drive", p.eta),
        ("loss", p.kappa * (1.0 + n_eff)),
        ("gain", p.kappa * n_eff),
        ("pair_up", p.kappa * m_eff),
        ("pair_down", p.kappa * np.conj(m_eff)),
    ]
    if cfg.include_atom:
        coefficients += [
            ("atom_detuning", p.atomic_detuning),
            ("coupling", p.g),
            ("atom_decay", p.gamma),
        ]
    return Liouvillian(_combine(cfg, coefficients), cfg, p)
