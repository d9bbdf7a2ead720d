"""Constructors for the state families used by the witnesses and case study.

Spin side: the two-parameter coherent family over a truncated multi-j grid,
its exact z-basis twin (rotated mode amplitudes), Gaussian approximations to
both, and the Fourier-shortcut transform that treats the magnetic quantum
number as an unbounded continuous variable (returned tagged "provisional"
since its support ignores |m| <= j).

Oscillator side: truncated two-mode Fock spaces, quadrature operators, and
the two-mode squeezed vacuum used to exercise the position-momentum witness.

All factorial and power ratios are evaluated in the log domain with phases
tracked separately; direct evaluation overflows once the mean j passes ~85.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.special import gammaln, xlogy

from .hilbert import HilbertDims, Observable, PureState
from .su2 import DEFAULT_TRUNCATION_TOL, SpinWaveFunction

OSCILLATOR_TAIL_GUARD = 1e-9
GAUSSIAN_REGIME_MIN_JBAR = 100.0
FOURIER_GRID_SIGMAS = 8.0


@dataclass(frozen=True)
class SU2CoherentParams:
    """Mode amplitudes (alpha1, alpha2) of the coherent spin family."""

    alpha1: complex
    alpha2: complex

    def __post_init__(self):
        if self.j_bar <= 0.0:
            raise ValueError("coherent family needs |alpha1|^2 + |alpha2|^2 > 0")

    @property
    def j_bar(self) -> float:
        return (abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2) / 2.0

    @property
    def phi1(self) -> float:
        return cmath.phase(self.alpha1)

    @property
    def phi2(self) -> float:
        return cmath.phase(self.alpha2)

    # closed-form first moments of the family
    @property
    def jy_mean(self) -> float:
        return (abs(self.alpha1) ** 2 - abs(self.alpha2) ** 2) / 2.0

    @property
    def jz_mean(self) -> float:
        return abs(self.alpha1 * self.alpha2) * math.cos(self.phi2 - self.phi1)

    @property
    def jx_mean(self) -> float:
        return abs(self.alpha1 * self.alpha2) * math.sin(self.phi2 - self.phi1)


@dataclass(frozen=True)
class TransformedParams:
    """Rotated mode amplitudes: beta1 = (a2+a1)/sqrt2, beta2 = (a2-a1)/sqrt2."""

    beta1: complex
    beta2: complex

    @classmethod
    def from_coherent(cls, params: SU2CoherentParams) -> "TransformedParams":
        rt2 = math.sqrt(2.0)
        return cls((params.alpha2 + params.alpha1) / rt2, (params.alpha2 - params.alpha1) / rt2)

    @property
    def phi1_prime(self) -> float:
        return cmath.phase(self.beta1)

    @property
    def phi2_prime(self) -> float:
        return cmath.phase(self.beta2)

    @property
    def mz_mean(self) -> float:
        return (abs(self.beta1) ** 2 - abs(self.beta2) ** 2) / 2.0


@dataclass(frozen=True)
class TruncationWindow:
    """j grid j_bar +- width*sqrt(j_bar); discarded weight above tol refuses."""

    width: float = 6.0
    tol: float = DEFAULT_TRUNCATION_TOL

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError("window width must be positive")
        if self.tol <= 0.0:
            raise ValueError("truncation tolerance must be positive")

    def two_j_range(self, j_bar: float) -> range:
        spread = self.width * math.sqrt(j_bar)
        lo = max(0, math.floor(2.0 * (j_bar - spread)))
        hi = math.ceil(2.0 * (j_bar + spread))
        return range(lo, hi + 1)


@dataclass(frozen=True)
class GaussianEnvelope:
    """Per-j Gaussian description: amplitude ~ C(j) exp[-(m-center)^2 / (2 variance)]
    exp[i phase_rate m], with C(j) the (complex) j weight."""

    center: float
    variance: float
    phase_rate: float
    j_weights: Mapping[int, complex]

    def __post_init__(self):
        if self.variance <= 0.0:
            raise ValueError("envelope variance must be positive")
        object.__setattr__(self, "j_weights", MappingProxyType(dict(self.j_weights)))


def _m_grid(two_j: int) -> np.ndarray:
    return (two_j - 2.0 * np.arange(two_j + 1)) / 2.0


def _coherent_amplitudes(a1: complex, a2: complex, two_j: int, j_bar: float) -> np.ndarray:
    """exp(-j_bar) a1^{j+m} a2^{j-m} / sqrt((j+m)!(j-m)!), m descending."""
    m = _m_grid(two_j)
    j = two_j / 2.0
    n1 = j + m
    n2 = j - m
    logmag = (
        -j_bar
        + xlogy(n1, abs(a1))
        + xlogy(n2, abs(a2))
        - 0.5 * (gammaln(n1 + 1.0) + gammaln(n2 + 1.0))
    )
    phase = n1 * cmath.phase(a1) + n2 * cmath.phase(a2)
    return np.exp(logmag + 1j * phase)


def _family_wavefunction(a1: complex, a2: complex, basis: str,
                         truncation: TruncationWindow) -> SpinWaveFunction:
    j_bar = (abs(a1) ** 2 + abs(a2) ** 2) / 2.0
    blocks: dict[int, np.ndarray] = {}
    weight = 0.0
    for two_j in truncation.two_j_range(j_bar):
        amps = _coherent_amplitudes(a1, a2, two_j, j_bar)
        blocks[two_j] = amps
        weight += float(np.vdot(amps, amps).real)
    discarded = max(0.0, 1.0 - weight)
    if discarded > truncation.tol:
        raise ValueError(
            f"truncation window discards weight {discarded:.3e} > {truncation.tol:.3e}; "
            "widen the window"
        )
    scale = 1.0 / math.sqrt(weight)
    blocks = {two_j: amps * scale for two_j, amps in blocks.items()}
    return SpinWaveFunction(
        basis=basis,
        blocks=blocks,
        discarded_weight=discarded,
        truncation_tol=truncation.tol,
    )


def coherent_spin_wavefunction(
    params: SU2CoherentParams, truncation: TruncationWindow | None = None
) -> SpinWaveFunction:
    """The coherent family in the y basis, normalized on the truncated grid."""
    truncation = truncation or TruncationWindow()
    return _family_wavefunction(params.alpha1, params.alpha2, "y", truncation)


def transformed_coefficients_exact(
    params: SU2CoherentParams, truncation: TruncationWindow | None = None
) -> SpinWaveFunction:
    """The same state written exactly in the z basis (rotated amplitudes)."""
    truncation = truncation or TruncationWindow()
    tp = TransformedParams.from_coherent(params)
    return _family_wavefunction(tp.beta1, tp.beta2, "z", truncation)


def _poisson_j_weights(j_bar: float, two_js, phase_rate_j: float) -> dict[int, complex]:
    """C(j) = sqrt(e^{-2 j_bar} (2 j_bar)^{2j} / (2j)!) e^{i phase_rate_j * j}."""
    out: dict[int, complex] = {}
    for two_j in two_js:
        logmag = 0.5 * (-2.0 * j_bar + xlogy(two_j, 2.0 * j_bar) - gammaln(two_j + 1.0))
        out[two_j] = math.exp(logmag) * cmath.exp(1j * phase_rate_j * (two_j / 2.0))
    return out


def _gaussian_wavefunction(envelope: GaussianEnvelope, basis: str,
                           truncation: TruncationWindow, notes: tuple[str, ...]) -> SpinWaveFunction:
    norm_quart = (math.pi * envelope.variance) ** -0.25
    blocks: dict[int, np.ndarray] = {}
    weight = 0.0
    for two_j, cj in envelope.j_weights.items():
        m = _m_grid(two_j)
        amps = (
            cj
            * norm_quart
            * np.exp(-((m - envelope.center) ** 2) / (2.0 * envelope.variance))
            * np.exp(1j * envelope.phase_rate * m)
        )
        blocks[two_j] = amps
        weight += float(np.vdot(amps, amps).real)
    discarded = max(0.0, 1.0 - weight)
    scale = 1.0 / math.sqrt(weight)
    blocks = {two_j: amps * scale for two_j, amps in blocks.items()}
    return SpinWaveFunction(
        basis=basis,
        blocks=blocks,
        discarded_weight=discarded,
        truncation_tol=truncation.tol,
        notes=notes,
        envelope=envelope,
    )


def _regime_notes(j_bar: float) -> tuple[str, ...]:
    if j_bar < GAUSSIAN_REGIME_MIN_JBAR:
        return (f"gaussian regime warning: j_bar = {j_bar:.3g} < {GAUSSIAN_REGIME_MIN_JBAR:.0f}",)
    return ()


def gaussian_approx_y(
    params: SU2CoherentParams, truncation: TruncationWindow | None = None
) -> SpinWaveFunction:
    """Gaussian-envelope approximation to the y-basis coherent family."""
    truncation = truncation or TruncationWindow()
    j_bar = params.j_bar
    two_js = truncation.two_j_range(j_bar)
    envelope = GaussianEnvelope(
        center=params.jy_mean,
        variance=j_bar,
        phase_rate=params.phi1 - params.phi2,
        j_weights=_poisson_j_weights(j_bar, two_js, params.phi1 + params.phi2),
    )
    return _gaussian_wavefunction(envelope, "y", truncation, _regime_notes(j_bar))


def gaussian_approx_z(
    params: SU2CoherentParams, truncation: TruncationWindow | None = None
) -> SpinWaveFunction:
    """Gaussian approximation to the exact z-basis form (rotated amplitudes).

    The j weight reuses the rotated phases arg(beta_k); their sum enters the
    per-j phase just as the unrotated phases do in the y-basis envelope.
    """
    truncation = truncation or TruncationWindow()
    tp = TransformedParams.from_coherent(params)
    j_bar = params.j_bar
    two_js = truncation.two_j_range(j_bar)
    envelope = GaussianEnvelope(
        center=tp.mz_mean,
        variance=j_bar,
        phase_rate=tp.phi1_prime - tp.phi2_prime,
        j_weights=_poisson_j_weights(j_bar, two_js, tp.phi1_prime + tp.phi2_prime),
    )
    return _gaussian_wavefunction(envelope, "z", truncation, _regime_notes(j_bar))


def fourier_basis_change(psi: SpinWaveFunction, jx_mean: float) -> SpinWaveFunction:
    """Continuous Fourier transform of a Gaussian y-basis wavefunction.

    Treats Q = m_y / sqrt(jx_mean) and P = m_z / sqrt(jx_mean) as unbounded
    conjugate variables and transforms each j block's envelope analytically
    (Gaussian in, Gaussian out), evaluating the result on a discrete m_z grid
    around the transformed center. The output is tagged provisional: its
    support ignores the |m_z| <= j constraint, which is the point of the
    construction. Each block keeps the parity of its own two_j.
    """
    if psi.basis != "y":
        raise ValueError("fourier_basis_change expects a y-basis wavefunction")
    if psi.envelope is None:
        raise ValueError("fourier_basis_change needs Gaussian envelope metadata")
    if jx_mean <= 0.0:
        raise ValueError(f"jx_mean must be positive, got {jx_mean}")
    env = psi.envelope
    var_z = jx_mean**2 / env.variance
    center_z = env.phase_rate * jx_mean
    sigma = math.sqrt(var_z)
    norm_quart = (env.variance / (math.pi * jx_mean**2)) ** 0.25
    blocks: dict[int, np.ndarray] = {}
    m_tops: dict[int, int] = {}
    weight = 0.0
    for two_j, cj in env.j_weights.items():
        hi = 2.0 * (center_z + FOURIER_GRID_SIGMAS * sigma)
        lo = 2.0 * (center_z - FOURIER_GRID_SIGMAS * sigma)
        two_m_top = math.floor(hi)
        if (two_m_top - two_j) % 2 != 0:
            two_m_top -= 1
        two_m_bot = math.ceil(lo)
        if (two_m_bot - two_j) % 2 != 0:
            two_m_bot += 1
        if two_m_top < two_m_bot:
            two_m_top = two_m_bot
        count = (two_m_top - two_m_bot) // 2 + 1
        m = (two_m_top - 2.0 * np.arange(count)) / 2.0
        amps = (
            cj
            * norm_quart
            * np.exp(-((m - center_z) ** 2) / (2.0 * var_z))
            * np.exp(-1j * (m * env.center / jx_mean - env.phase_rate * env.center))
        )
        blocks[two_j] = amps
        m_tops[two_j] = two_m_top
        weight += float(np.vdot(amps, amps).real)
    resample_drift = abs(1.0 - weight)
    scale = 1.0 / math.sqrt(weight)
    blocks = {two_j: amps * scale for two_j, amps in blocks.items()}
    envelope_z = GaussianEnvelope(center_z, var_z, -env.center / jx_mean, env.j_weights)
    return SpinWaveFunction(
        basis="z",
        blocks=blocks,
        discarded_weight=psi.discarded_weight,
        truncation_tol=psi.truncation_tol,
        provisional=True,
        m_tops=m_tops,
        notes=psi.notes + (f"resample renormalization {resample_drift:.3e}",),
        envelope=envelope_z,
    )


@dataclass(frozen=True)
class OscillatorParams:
    """Two-mode squeezing strength and Fock cutoff, with a truncation guard."""

    r: float
    cutoff: int

    def __post_init__(self):
        if self.cutoff < 2:
            raise ValueError(f"cutoff must be >= 2, got {self.cutoff}")
        if self.tail_weight >= OSCILLATOR_TAIL_GUARD:
            raise ValueError(
                f"cutoff {self.cutoff} leaves tail weight {self.tail_weight:.3e} "
                f">= {OSCILLATOR_TAIL_GUARD:.0e} at r = {self.r}"
            )

    @property
    def tail_weight(self) -> float:
        """Exact weight beyond the cutoff for the two-mode squeezed family."""
        return math.tanh(abs(self.r)) ** (2 * self.cutoff)


def tmsv_state(params: OscillatorParams) -> PureState:
    """Two-mode squeezed vacuum on the truncated Fock space.

    Amplitudes (-tanh r)^n on |n, n>; the alternating sign is the phase for
    which the (q1+q2, p1-p2) pair is the squeezed one.
    """
    n = np.arange(params.cutoff)
    amps = (-math.tanh(params.r)) ** n
    amps = amps / np.linalg.norm(amps)
    vec = np.zeros(params.cutoff * params.cutoff, dtype=complex)
    vec[n * params.cutoff + n] = amps
    return PureState(HilbertDims(params.cutoff, params.cutoff), vec)


def two_mode_vacuum(cutoff: int) -> PureState:
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    vec[0] = 1.0
    return PureState(HilbertDims(cutoff, cutoff), vec)


def lowering_matrix(cutoff: int) -> np.ndarray:
    a = np.zeros((cutoff, cutoff), dtype=complex)
    ns = np.arange(1, cutoff)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def number_matrix(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff, dtype=float)).astype(complex)


@dataclass(frozen=True)
class QuadratureOps:
    """q and p for both modes of a truncated two-mode Fock space."""

    q1: Observable
    p1: Observable
    q2: Observable
    p2: Observable


def quadrature_ops(cutoff: int) -> QuadratureOps:
    """Ladder-built q = (a+a^dag)/sqrt2, p = -i(a-a^dag)/sqrt2 per mode.

    On the truncated space [q, p] = i holds except in the final Fock level,
    so expectation values of the commutator are i only for states with
    negligible weight near the cutoff; callers guard the tail, the operators
    make no pretense.
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    a = lowering_matrix(cutoff)
    q = (a + a.conj().T) / math.sqrt(2.0)
    p = -1j * (a - a.conj().T) / math.sqrt(2.0)
    dims = HilbertDims(cutoff, cutoff)
    return QuadratureOps(
        q1=Observable(dims, q, "system1"),
        p1=Observable(dims, p, "system1"),
        q2=Observable(dims, q, "system2"),
        p2=Observable(dims, p, "system2"),
    )
