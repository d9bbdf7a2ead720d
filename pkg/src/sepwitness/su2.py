"""Angular-momentum operators, multi-j wavefunctions, and basis changes.

Wavefunctions live as per-irrep coefficient blocks over a truncated j grid;
there is no global basis object. A block for two_j stores amplitudes with m
descending (index i holds two_m = two_j - 2i).

Basis conventions, fixed once and used consistently everywhere:

* The y->z coefficient change for each j block is C_z = D^T C_y with D the
  d^j(pi/2) matrix of `dmatrix` (equal to exp(-i (pi/2) Jy) in the z basis).
  This orientation is the one under which the coherent-state family maps onto
  itself with rotated mode amplitudes, and it keeps all three first moments
  invariant (checked to 1e-8 in the tests).
* First moments from coefficient blocks, writing X, Y, Z for the standard
  spin matrices acting on a block:
    y basis:  <Jx> = <Y>,  <Jy> = <Z> (diagonal),  <Jz> = <X>
    z basis:  <Jx> = <Y>,  <Jy> = -<X>,            <Jz> = <Z> (diagonal)
  Both rule sets satisfy the cyclic commutator algebra and are intertwined
  exactly by the D^T kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import TYPE_CHECKING, Iterator, Mapping

import numpy as np
from scipy.special import gammaln, xlogy

from .dmatrix import Irrep, wigner_d_stable
from .hilbert import HilbertDims, PureState

if TYPE_CHECKING:
    from .states import GaussianEnvelope

BLOCK_NORM_TOL = 1e-10
DEFAULT_TRUNCATION_TOL = 1e-9

BASES = ("y", "z")
PHASE_SPACINGS = ("paper", "orthogonal")


def _m_values(two_j: int) -> np.ndarray:
    """m descending, as floats."""
    return (two_j - 2.0 * np.arange(two_j + 1)) / 2.0


def _ladder_coeffs(two_j: int) -> np.ndarray:
    """sqrt((j-m)(j+m+1)) for m = j-1 .. -j (aligned with descending blocks)."""
    j = two_j / 2.0
    m = _m_values(two_j)[1:]
    return np.sqrt((j - m) * (j + m + 1.0))


@dataclass(frozen=True)
class SpinOperatorSet:
    """Jx, Jy, Jz for one irrep, in the z eigenbasis with m descending."""

    irrep: Irrep
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    def __post_init__(self):
        for name in ("jx", "jy", "jz"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def j_squared(self) -> np.ndarray:
        return self.jx @ self.jx + self.jy @ self.jy + self.jz @ self.jz

    def validate(self, tol: float = 1e-12) -> None:
        """Check [Jy,Jz] = iJx (and cyclic) and the Casimir, relative to scale."""
        j = self.irrep.j
        scale = max(1.0, j * (j + 1.0))
        triples = (
            (self.jy, self.jz, self.jx),
            (self.jz, self.jx, self.jy),
            (self.jx, self.jy, self.jz),
        )
        for a, b, c in triples:
            dev = float(np.abs(a @ b - b @ a - 1j * c).max())
            if dev > tol * scale:
                raise ValueError(f"commutator deviation {dev:.3e} exceeds {tol * scale:.3e}")
        cas = float(np.abs(self.j_squared() - j * (j + 1.0) * np.eye(self.irrep.dimension)).max())
        if cas > tol * scale:
            raise ValueError(f"Casimir deviation {cas:.3e} exceeds {tol * scale:.3e}")


def spin_operators(irrep: Irrep) -> SpinOperatorSet:
    """Standard ladder construction of the spin matrices for one irrep."""
    n = irrep.dimension
    lam = _ladder_coeffs(irrep.two_j)
    jplus = np.zeros((n, n), dtype=complex)
    jplus[np.arange(n - 1), np.arange(1, n)] = lam
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    jz = np.diag(_m_values(irrep.two_j)).astype(complex)
    return SpinOperatorSet(irrep, jx, jy, jz)


@dataclass(frozen=True)
class SpinWaveFunction:
    """Amplitudes C(j, m) over a truncated multi-j grid, in the y or z basis.

    blocks maps two_j -> complex amplitude array with m descending. For
    ordinary wavefunctions every block spans the full physical grid
    m = j .. -j. Provisional wavefunctions (outputs of the Fourier-shortcut
    transform, which ignores the |m| <= j constraint by construction) carry
    per-block grid tops in m_tops and relax that invariant.
    """

    basis: str
    blocks: Mapping[int, np.ndarray]
    discarded_weight: float = 0.0
    truncation_tol: float = DEFAULT_TRUNCATION_TOL
    provisional: bool = False
    m_tops: Mapping[int, int] | None = None
    notes: tuple[str, ...] = ()
    envelope: "GaussianEnvelope | None" = None

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        if not self.blocks:
            raise ValueError("wavefunction needs at least one j block")
        frozen: dict[int, np.ndarray] = {}
        for two_j, amps in self.blocks.items():
            if two_j < 0:
                raise ValueError(f"two_j must be >= 0, got {two_j}")
            arr = np.array(amps, dtype=complex)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"block {two_j} must be a nonempty 1-d array")
            if not self.provisional and arr.size != two_j + 1:
                raise ValueError(f"block {two_j} has {arr.size} amplitudes, needs {two_j + 1}")
            arr.setflags(write=False)
            frozen[two_j] = arr
        object.__setattr__(self, "blocks", MappingProxyType(frozen))
        if self.provisional:
            if self.m_tops is None:
                raise ValueError("provisional wavefunction requires m_tops")
            tops = dict(self.m_tops)
            for two_j in frozen:
                top = tops.get(two_j)
                if top is None:
                    raise ValueError(f"missing m_top for block {two_j}")
                if (top - two_j) % 2 != 0:
                    raise ValueError(f"m_top {top} has wrong parity for two_j {two_j}")
            object.__setattr__(self, "m_tops", MappingProxyType(tops))
        elif self.m_tops is not None:
            raise ValueError("m_tops is only meaningful for provisional wavefunctions")
        tol = max(self.truncation_tol, 1e-12)
        total = self.norm_squared()
        if abs(total - 1.0) > 10 * tol:
            raise ValueError(f"total squared norm {total!r} differs from 1 beyond tolerance")

    def two_j_values(self) -> tuple[int, ...]:
        return tuple(sorted(self.blocks))

    def two_m_top(self, two_j: int) -> int:
        if self.provisional:
            return self.m_tops[two_j]  # type: ignore[index]
        return two_j

    def two_m_values(self, two_j: int) -> np.ndarray:
        top = self.two_m_top(two_j)
        return top - 2 * np.arange(self.blocks[two_j].size)

    def amplitude(self, two_j: int, two_m: int) -> complex:
        block = self.blocks.get(two_j)
        if block is None:
            return 0.0
        top = self.two_m_top(two_j)
        if (top - two_m) % 2 != 0:
            raise ValueError(f"two_m {two_m} has wrong parity for block {two_j}")
        idx = (top - two_m) // 2
        if idx < 0 or idx >= block.size:
            return 0.0
        return complex(block[idx])

    def items(self) -> Iterator[tuple[tuple[int, int], complex]]:
        for two_j in self.two_j_values():
            block = self.blocks[two_j]
            top = self.two_m_top(two_j)
            for i, amp in enumerate(block):
                yield (two_j, top - 2 * i), complex(amp)

    def norm_squared(self) -> float:
        return float(sum(np.vdot(b, b).real for b in self.blocks.values()))


def wavefunction_overlap(psi1: SpinWaveFunction, psi2: SpinWaveFunction) -> complex:
    """<psi1|psi2> summed over the common (j, m) grid; bases must match."""
    if psi1.basis != psi2.basis:
        raise ValueError(f"overlap needs matching bases, got {psi1.basis!r} vs {psi2.basis!r}")
    total = 0.0 + 0.0j
    for two_j in set(psi1.blocks) & set(psi2.blocks):
        b1, b2 = psi1.blocks[two_j], psi2.blocks[two_j]
        t1, t2 = psi1.two_m_top(two_j), psi2.two_m_top(two_j)
        if t1 == t2 and b1.size == b2.size:
            total += complex(np.vdot(b1, b2))
            continue
        if (t1 - t2) % 2 != 0:
            continue
        for i, amp in enumerate(b2):
            idx = (t1 - (t2 - 2 * i)) // 2
            if 0 <= idx < b1.size:
                total += complex(np.conj(b1[idx]) * amp)
    return total


def fidelity(psi1: SpinWaveFunction, psi2: SpinWaveFunction) -> float:
    return abs(wavefunction_overlap(psi1, psi2)) ** 2


@dataclass(frozen=True)
class MomentReport:
    """First moments of a multi-j wavefunction (m_mean is along the basis axis)."""

    basis: str
    j_mean: float
    m_mean: float
    jx: float
    jy: float
    jz: float


def wavefunction_moments(psi: SpinWaveFunction) -> MomentReport:
    """j and first-moment bookkeeping via diagonal sums and ladder contractions.

    For provisional wavefunctions (grids beyond |m| <= j) the two transverse
    moments are not defined by the spin ladders and come back as nan; the
    along-axis mean and j mean remain meaningful.
    """
    j_mean = 0.0
    m_mean = 0.0
    raising = 0.0 + 0.0j
    for two_j in psi.two_j_values():
        block = psi.blocks[two_j]
        weights = np.abs(block) ** 2
        j_mean += float(weights.sum()) * (two_j / 2.0)
        m_mean += float((psi.two_m_values(two_j) / 2.0) @ weights)
        if not psi.provisional and two_j > 0:
            lam = _ladder_coeffs(two_j)
            raising += complex(np.sum(block[:-1].conj() * lam * block[1:]))
    if psi.provisional:
        jx = jy = jz = math.nan
        if psi.basis == "y":
            jy = m_mean
        else:
            jz = m_mean
        return MomentReport(psi.basis, j_mean, m_mean, jx, jy, jz)
    if psi.basis == "y":
        return MomentReport("y", j_mean, m_mean, jx=raising.imag, jy=m_mean, jz=raising.real)
    return MomentReport("z", j_mean, m_mean, jx=raising.imag, jy=-raising.real, jz=m_mean)


def _basis_change(psi: SpinWaveFunction, transpose: bool, target: str,
                  method: str | None, two_j_max: int | None) -> SpinWaveFunction:
    if psi.provisional:
        raise ValueError("cannot basis-change a provisional wavefunction")
    new_blocks: dict[int, np.ndarray] = {}
    for two_j, block in psi.blocks.items():
        dmat = wigner_d_stable(Irrep(two_j), method=method, two_j_max=two_j_max)
        kernel = dmat.matrix.T if transpose else dmat.matrix
        rotated = kernel @ block
        drift = abs(float(np.vdot(rotated, rotated).real) - float(np.vdot(block, block).real))
        if drift > BLOCK_NORM_TOL:
            raise ValueError(f"block {two_j} norm drift {drift:.3e} exceeds {BLOCK_NORM_TOL}")
        new_blocks[two_j] = rotated
    return SpinWaveFunction(
        basis=target,
        blocks=new_blocks,
        discarded_weight=psi.discarded_weight,
        truncation_tol=psi.truncation_tol,
        notes=psi.notes,
    )


def basis_change_y_to_z(
    psi: SpinWaveFunction, *, method: str | None = None, two_j_max: int | None = None
) -> SpinWaveFunction:
    """Per-j rotation C_z = D^T C_y; norm preserved to 1e-10 per block."""
    if psi.basis != "y":
        raise ValueError(f"expected a y-basis wavefunction, got basis {psi.basis!r}")
    return _basis_change(psi, transpose=True, target="z", method=method, two_j_max=two_j_max)


def basis_change_z_to_y(
    psi: SpinWaveFunction, *, method: str | None = None, two_j_max: int | None = None
) -> SpinWaveFunction:
    """Inverse rotation C_y = D C_z (transpose kernel of the y->z direction)."""
    if psi.basis != "z":
        raise ValueError(f"expected a z-basis wavefunction, got basis {psi.basis!r}")
    return _basis_change(psi, transpose=False, target="y", method=method, two_j_max=two_j_max)


def phase_state_kernel(irrep: Irrep, theta: float, m: float) -> complex:
    """Fourier kernel e^{i m theta} / sqrt(2j+1) linking |j,m> to a phase state."""
    two_m = round(2 * m)
    if abs(2 * m - two_m) > 1e-9 or (two_m - irrep.two_j) % 2 != 0:
        raise ValueError(f"m = {m} invalid for two_j = {irrep.two_j}")
    if abs(two_m) > irrep.two_j:
        raise ValueError(f"|m| = {abs(m)} exceeds j = {irrep.j}")
    return complex(np.exp(1j * m * theta)) / math.sqrt(irrep.dimension)


@dataclass(frozen=True)
class PhaseStateBasis:
    """Grid of 2j+1 phase states |theta_k> = sum_m kernel(theta_k, m) |j,m>.

    spacing "paper" uses theta_k = k pi / (2j+1) (as printed; the resulting
    states are not orthogonal), spacing "orthogonal" uses 2 pi k / (2j+1)
    (a discrete Fourier basis, unitary overlap matrix).
    """

    irrep: Irrep
    spacing: str = "paper"

    def __post_init__(self):
        if self.spacing not in PHASE_SPACINGS:
            raise ValueError(f"spacing must be one of {PHASE_SPACINGS}, got {self.spacing!r}")

    @property
    def thetas(self) -> np.ndarray:
        n = self.irrep.dimension
        step = math.pi / n if self.spacing == "paper" else 2.0 * math.pi / n
        return step * np.arange(n)

    def kernel_matrix(self) -> np.ndarray:
        """B[i, k] = kernel(theta_k, m_i) with m descending; columns are states."""
        m = _m_values(self.irrep.two_j)
        return np.exp(1j * np.outer(m, self.thetas)) / math.sqrt(self.irrep.dimension)

    def overlap_matrix(self) -> np.ndarray:
        """Gram matrix <theta_k|theta_l> of the phase states."""
        b = self.kernel_matrix()
        return b.conj().T @ b


def spin_coherent_state(irrep: Irrep, theta: float, phi: float) -> PureState:
    """Spin-j coherent state polarized along (sin t cos p, sin t sin p, cos t).

    Amplitudes in the z basis (m descending), evaluated in the log domain so
    large irreps do not overflow the binomial weights.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    two_j = irrep.two_j
    j = irrep.j
    m = _m_values(two_j)
    half = theta / 2.0
    logbin = 0.5 * (gammaln(two_j + 1.0) - gammaln(j + m + 1.0) - gammaln(j - m + 1.0))
    logmag = logbin + xlogy(j + m, math.cos(half)) + xlogy(j - m, math.sin(half))
    amps = np.exp(logmag) * np.exp(-1j * m * phi)
    amps /= np.linalg.norm(amps)
    return PureState(HilbertDims(irrep.dimension), amps)


def plus_x_state(irrep: Irrep) -> PureState:
    """Coherent state fully polarized along +x (<Jx> = j)."""
    return spin_coherent_state(irrep, math.pi / 2.0, 0.0)
