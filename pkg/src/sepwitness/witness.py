"""Variance-sum separability witnesses and their supporting machinery.

The core inequality: for any separable state and local Hermitian pairs
(A1, B1), (A2, B2) with u = alpha A1 + beta A2 and v = alpha B1 - beta B2,

    var(u) + var(v) >= alpha^2 C1 + beta^2 C2,
    C_i = |Tr(rho [A_i, B_i])|.

A margin (lhs - rhs) below -1e-9 therefore certifies entanglement; the
tolerance keeps accumulated float error from ever producing a false claim.
Also here: the ensemble decomposition identity check, the closed-form
(alpha, beta) optimizer, seeded separable-ensemble generators, and a
brute-force margin minimizer used as the small-j violation oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dmatrix import Irrep
from .hilbert import (
    DensityOperator,
    HilbertDims,
    Observable,
    PureState,
    State,
    commutator_bound,
    covariance,
    expectation,
    variance,
)
from .states import quadrature_ops
from .su2 import spin_operators

VIOLATION_TOL = 1e-9
HW_TAIL_GUARD = 1e-6
S_FLOOR = -1e-12


@dataclass(frozen=True)
class ObservablePair:
    """Local Hermitian pairs (A1, B1) on system 1 and (A2, B2) on system 2."""

    a1: Observable
    b1: Observable
    a2: Observable
    b2: Observable

    def __post_init__(self):
        for name, obs, tag in (
            ("a1", self.a1, "system1"),
            ("b1", self.b1, "system1"),
            ("a2", self.a2, "system2"),
            ("b2", self.b2, "system2"),
        ):
            if obs.subsystem != tag:
                raise ValueError(f"{name} must be tagged {tag}, got {obs.subsystem}")
        dims = {obs.dims for obs in (self.a1, self.b1, self.a2, self.b2)}
        if len(dims) != 1:
            raise ValueError("all four observables must share the same HilbertDims")

    @property
    def dims(self) -> HilbertDims:
        return self.a1.dims


@dataclass(frozen=True)
class WitnessConfig:
    """Real coefficients (alpha, beta) of the linear combinations."""

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")
        if self.alpha == 0.0 and self.beta == 0.0:
            raise ValueError("alpha and beta must not both vanish")


@dataclass(frozen=True)
class CombinedObservables:
    """u = alpha A1 x 1 + beta 1 x A2 and v = alpha B1 x 1 - beta 1 x B2."""

    u: Observable
    v: Observable


def assemble_uv(pairs: ObservablePair, cfg: WitnessConfig) -> CombinedObservables:
    dims = pairs.dims
    u = Observable(
        dims, cfg.alpha * pairs.a1.embedded() + cfg.beta * pairs.a2.embedded(), "joint"
    )
    v = Observable(
        dims, cfg.alpha * pairs.b1.embedded() - cfg.beta * pairs.b2.embedded(), "joint"
    )
    return CombinedObservables(u, v)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of one witness evaluation; violated means margin < -1e-9."""

    lhs: float
    rhs: float
    c1: float
    c2: float
    alpha: float
    beta: float
    criterion: str
    rhs_mode: str = "general"

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def violated(self) -> bool:
        return self.margin < -VIOLATION_TOL

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "rhs_mode": self.rhs_mode,
            "alpha": self.alpha,
            "beta": self.beta,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "c1": self.c1,
            "c2": self.c2,
            "margin": self.margin,
            "violated": self.violated,
        }


def general_criterion(state: State, pairs: ObservablePair, cfg: WitnessConfig,
                      criterion: str = "eq7") -> WitnessReport:
    """var(u) + var(v) against alpha^2 C1 + beta^2 C2 on the given state."""
    combined = assemble_uv(pairs, cfg)
    lhs = variance(state, combined.u) + variance(state, combined.v)
    c1 = commutator_bound(state, pairs.a1, pairs.b1)
    c2 = commutator_bound(state, pairs.a2, pairs.b2)
    rhs = cfg.alpha**2 * c1 + cfg.beta**2 * c2
    return WitnessReport(lhs, rhs, c1, c2, cfg.alpha, cfg.beta, criterion)


def sum_criterion(state: State, pairs: ObservablePair) -> WitnessReport:
    """The alpha = beta = 1 special case: var(A1+A2) + var(B1-B2) >= C1 + C2."""
    return general_criterion(state, pairs, WitnessConfig(1.0, 1.0), criterion="eq8")


def jkp_pairs(j1: Irrep, j2: Irrep) -> ObservablePair:
    """The collective-spin pairs A1 = Jy1, B1 = Jz1, A2 = Jy2, B2 = -Jz2."""
    dims = HilbertDims(j1.dimension, j2.dimension)
    ops1 = spin_operators(j1)
    ops2 = spin_operators(j2)
    return ObservablePair(
        a1=Observable(dims, ops1.jy, "system1"),
        b1=Observable(dims, ops1.jz, "system1"),
        a2=Observable(dims, ops2.jy, "system2"),
        b2=Observable(dims, -ops2.jz, "system2"),
    )


def spin_criterion(state: State, j1: Irrep, j2: Irrep, rhs_mode: str = "paper") -> WitnessReport:
    """var(Jy1+Jy2) + var(Jz1+Jz2) against the collective-spin bound.

    rhs_mode "paper" uses 2|<Jx1>| (the printed symmetric form, a valid bound
    only when |<Jx1>| = |<Jx2>|); "general" uses C1 + C2 = |<Jx1>| + |<Jx2>|,
    which is the necessity bound for arbitrary states.
    """
    if rhs_mode not in ("paper", "general"):
        raise ValueError(f"rhs_mode must be 'paper' or 'general', got {rhs_mode!r}")
    pairs = jkp_pairs(j1, j2)
    report = general_criterion(state, pairs, WitnessConfig(1.0, 1.0), criterion="eq9")
    if rhs_mode == "paper":
        dims = pairs.dims
        jx1 = expectation(state, Observable(dims, spin_operators(j1).jx, "system1"))
        report = WitnessReport(
            report.lhs, 2.0 * abs(jx1), report.c1, report.c2, 1.0, 1.0, "eq9", "paper"
        )
    return report


def hw_criterion(state: State, mode: str = "fixed-bound") -> WitnessReport:
    """var(q1+q2) + var(p1-p2) >= 2 on a truncated two-mode Fock space.

    mode "fixed-bound" uses rhs = 2 exactly; "state-dependent" measures
    |<[q,p]>| per mode, guarding against truncation artifacts. States with
    more than 1e-6 weight in either mode's top Fock level are refused, since
    the truncated commutator is wrong there.
    """
    if mode not in ("fixed-bound", "state-dependent"):
        raise ValueError(f"mode must be 'fixed-bound' or 'state-dependent', got {mode!r}")
    dims = state.dims
    if not dims.bipartite or dims.d1 != dims.d2:
        raise ValueError("hw_criterion expects a two-mode space with equal cutoffs")
    cutoff = dims.d1
    tail = _top_level_weight(state, cutoff)
    if tail > HW_TAIL_GUARD:
        raise ValueError(
            f"state weight {tail:.3e} in the top Fock level exceeds {HW_TAIL_GUARD:.0e}; "
            "truncation unsafe, raise the cutoff"
        )
    quads = quadrature_ops(cutoff)
    pairs = ObservablePair(quads.q1, quads.p1, quads.q2, quads.p2)
    report = general_criterion(state, pairs, WitnessConfig(1.0, 1.0), criterion="eq2")
    if mode == "fixed-bound":
        report = WitnessReport(
            report.lhs, 2.0, report.c1, report.c2, 1.0, 1.0, "eq2", "fixed-bound"
        )
    else:
        report = WitnessReport(
            report.lhs, report.rhs, report.c1, report.c2, 1.0, 1.0, "eq2", "state-dependent"
        )
    return report


def _top_level_weight(state: State, cutoff: int) -> float:
    if isinstance(state, PureState):
        probs = np.abs(state.vector.reshape(cutoff, cutoff)) ** 2
    else:
        probs = np.diag(state.matrix).real.reshape(cutoff, cutoff)
    return float(probs[cutoff - 1, :].sum() + probs[:, cutoff - 1].sum())


@dataclass(frozen=True)
class SeparableEnsemble:
    """Convex mixture of product density operators."""

    terms: tuple[tuple[float, DensityOperator, DensityOperator], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("ensemble needs at least one term")
        total = 0.0
        dims = None
        for p, rho1, rho2 in self.terms:
            if p < 0.0:
                raise ValueError(f"negative probability {p}")
            if rho1.dims.bipartite or rho2.dims.bipartite:
                raise ValueError("ensemble factors must be single-system densities")
            key = (rho1.dims.d1, rho2.dims.d1)
            if dims is None:
                dims = key
            elif key != dims:
                raise ValueError("all terms must share factor dimensions")
            total += p
        if abs(total - 1.0) > 1e-12 * max(1.0, len(self.terms)):
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @property
    def dims(self) -> HilbertDims:
        _, rho1, rho2 = self.terms[0]
        return HilbertDims(rho1.dims.d1, rho2.dims.d1)


def ensemble_to_density(ensemble: SeparableEnsemble) -> DensityOperator:
    dims = ensemble.dims
    acc = np.zeros((dims.joint, dims.joint), dtype=complex)
    for p, rho1, rho2 in ensemble.terms:
        acc += p * np.kron(rho1.matrix, rho2.matrix)
    return DensityOperator(dims, acc)


@dataclass(frozen=True)
class DecompositionCheckReport:
    """Two-route variance bookkeeping over an explicit separable ensemble.

    For w in {u, v}: var(w) on the mixed state must equal the probability-
    weighted per-term variances plus the spread of per-term means
    S = sum_i p_i <w>_i^2 - (sum_i p_i <w>_i)^2, which is >= 0 by the
    Cauchy-Schwarz inequality. residual_* is the difference of the two routes.
    """

    s_u: float
    s_v: float
    per_term_var_u: float
    per_term_var_v: float
    direct_var_u: float
    direct_var_v: float

    @property
    def residual_u(self) -> float:
        return abs(self.direct_var_u - (self.per_term_var_u + self.s_u))

    @property
    def residual_v(self) -> float:
        return abs(self.direct_var_v - (self.per_term_var_v + self.s_v))

    @property
    def identity_residual(self) -> float:
        return max(self.residual_u, self.residual_v)


def decomposition_check(ensemble: SeparableEnsemble, pairs: ObservablePair,
                        cfg: WitnessConfig) -> DecompositionCheckReport:
    """Check var(u) (and var(v)) directly against the ensemble decomposition."""
    rho = ensemble_to_density(ensemble)
    combined = assemble_uv(pairs, cfg)
    direct_u = variance(rho, combined.u)
    direct_v = variance(rho, combined.v)
    mean_u = mean_v = 0.0
    mean_u2 = mean_v2 = 0.0
    per_u = per_v = 0.0
    for p, rho1, rho2 in ensemble.terms:
        ea1 = _local_expectation(rho1, pairs.a1)
        ea2 = _local_expectation(rho2, pairs.a2)
        eb1 = _local_expectation(rho1, pairs.b1)
        eb2 = _local_expectation(rho2, pairs.b2)
        va1 = _local_variance(rho1, pairs.a1)
        va2 = _local_variance(rho2, pairs.a2)
        vb1 = _local_variance(rho1, pairs.b1)
        vb2 = _local_variance(rho2, pairs.b2)
        u_mean = cfg.alpha * ea1 + cfg.beta * ea2
        v_mean = cfg.alpha * eb1 - cfg.beta * eb2
        per_u += p * (cfg.alpha**2 * va1 + cfg.beta**2 * va2)
        per_v += p * (cfg.alpha**2 * vb1 + cfg.beta**2 * vb2)
        mean_u += p * u_mean
        mean_v += p * v_mean
        mean_u2 += p * u_mean**2
        mean_v2 += p * v_mean**2
    return DecompositionCheckReport(
        s_u=mean_u2 - mean_u**2,
        s_v=mean_v2 - mean_v**2,
        per_term_var_u=per_u,
        per_term_var_v=per_v,
        direct_var_u=direct_u,
        direct_var_v=direct_v,
    )


def _local_expectation(rho: DensityOperator, obs: Observable) -> float:
    return expectation(rho, Observable(rho.dims, obs.matrix, "joint"))


def _local_variance(rho: DensityOperator, obs: Observable) -> float:
    return variance(rho, Observable(rho.dims, obs.matrix, "joint"))


@dataclass(frozen=True)
class OptimizerResult:
    """Strongest witness direction: smallest eigenvalue of the margin form."""

    alpha: float
    beta: float
    min_margin: float
    matrix: np.ndarray

    @property
    def violated(self) -> bool:
        return self.min_margin < -VIOLATION_TOL


def margin_quadratic_form(state: State, pairs: ObservablePair) -> np.ndarray:
    """2x2 M with margin(alpha, beta) = (alpha, beta) M (alpha, beta)^T.

    M11 = var(A1) + var(B1) - C1, M22 = var(A2) + var(B2) - C2,
    M12 = cov(A1, A2) - cov(B1, B2); all moments on the joint state.
    """
    m11 = (
        variance(state, pairs.a1)
        + variance(state, pairs.b1)
        - commutator_bound(state, pairs.a1, pairs.b1)
    )
    m22 = (
        variance(state, pairs.a2)
        + variance(state, pairs.b2)
        - commutator_bound(state, pairs.a2, pairs.b2)
    )
    m12 = covariance(state, pairs.a1, pairs.a2) - covariance(state, pairs.b1, pairs.b2)
    return np.array([[m11, m12], [m12, m22]])


def optimize_alpha_beta(state: State, pairs: ObservablePair) -> OptimizerResult:
    """Closed-form minimizer of margin/(alpha^2 + beta^2) over real (alpha, beta)."""
    m = margin_quadratic_form(state, pairs)
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite moments in the margin form")
    eigvals, eigvecs = np.linalg.eigh(m)
    vec = eigvecs[:, 0]
    return OptimizerResult(float(vec[0]), float(vec[1]), float(eigvals[0]), m)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * (g + g.conj().T) / 2.0


def random_pure_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    vec /= np.linalg.norm(vec)
    return DensityOperator(HilbertDims(dim), np.outer(vec, vec.conj()))


def random_separable(d1: int, d2: int, n_terms: int, seed: int) -> SeparableEnsemble:
    """Seeded ensemble of Haar-random pure products with Dirichlet weights."""
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(n_terms))
    terms = tuple(
        (float(p), random_pure_density(d1, rng), random_pure_density(d2, rng))
        for p in probs
    )
    return SeparableEnsemble(terms)


def random_observable_pairs(dims: HilbertDims, rng: np.random.Generator) -> ObservablePair:
    return ObservablePair(
        a1=Observable(dims, random_hermitian(dims.d1, rng), "system1"),
        b1=Observable(dims, random_hermitian(dims.d1, rng), "system1"),
        a2=Observable(dims, random_hermitian(dims.d2, rng), "system2"),
        b2=Observable(dims, random_hermitian(dims.d2, rng), "system2"),
    )


@dataclass(frozen=True)
class NecessityRunReport:
    """Summary of a seeded necessity sweep over random separable ensembles."""

    seed: int
    ensembles: int
    draws_per_ensemble: int
    worst_margin: float
    worst_identity_residual: float
    min_s: float
    violations: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ensembles": self.ensembles,
            "draws_per_ensemble": self.draws_per_ensemble,
            "worst_margin": self.worst_margin,
            "worst_identity_residual": self.worst_identity_residual,
            "min_s": self.min_s,
            "violations": self.violations,
        }


def necessity_property_run(
    seed: int = 42,
    ensembles: int = 1000,
    draws_per_ensemble: int = 10,
    max_dim: int = 4,
) -> NecessityRunReport:
    """Drive random separable ensembles through the witness and the identity.

    Every ensemble (dims up to max_dim x max_dim, 1-4 terms) is evaluated
    against draws_per_ensemble random Hermitian pairs and (alpha, beta)
    configurations; a margin below -1e-9 anywhere counts as a violation
    (which would falsify the implementation, not the inequality). The
    decomposition identity and the nonnegativity of the mean-spread S are
    tracked on the same draws.
    """
    if ensembles < 1:
        raise ValueError(f"ensembles must be >= 1, got {ensembles}")
    if draws_per_ensemble < 1:
        raise ValueError(f"draws_per_ensemble must be >= 1, got {draws_per_ensemble}")
    rng = np.random.default_rng(seed)
    worst_margin = math.inf
    worst_residual = 0.0
    min_s = math.inf
    violations = 0
    for _ in range(ensembles):
        d1 = int(rng.integers(2, max_dim + 1))
        d2 = int(rng.integers(2, max_dim + 1))
        n_terms = int(rng.integers(1, 5))
        ensemble = random_separable(d1, d2, n_terms, int(rng.integers(0, 2**63)))
        rho = ensemble_to_density(ensemble)
        for _ in range(draws_per_ensemble):
            pairs = random_observable_pairs(ensemble.dims, rng)
            cfg = WitnessConfig(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(-2.0, 2.0)))
            if cfg.alpha == 0.0 and cfg.beta == 0.0:
                cfg = WitnessConfig(1.0, 1.0)
            report = general_criterion(rho, pairs, cfg)
            worst_margin = min(worst_margin, report.margin)
            if report.violated:
                violations += 1
            check = decomposition_check(ensemble, pairs, cfg)
            worst_residual = max(worst_residual, check.identity_residual)
            min_s = min(min_s, check.s_u, check.s_v)
    return NecessityRunReport(
        seed=seed,
        ensembles=ensembles,
        draws_per_ensemble=draws_per_ensemble,
        worst_margin=worst_margin,
        worst_identity_residual=worst_residual,
        min_s=min_s,
        violations=violations,
    )


def brute_force_min_margin(
    j1: Irrep,
    j2: Irrep,
    criterion=None,
    iterations: int = 60,
    seed: int = 0,
    product_only: bool = False,
):
    """Random-restart local minimization of the margin over pure joint states.

    criterion maps a PureState on the joint space to a margin; the default is
    the general-mode collective-spin witness. With product_only the search is
    restricted to product states (a separability sanity check: the minimum
    must then be nonnegative). Returns (best_state, best_margin).
    """
    dims = HilbertDims(j1.dimension, j2.dimension)
    if dims.joint > 64:
        raise ValueError(f"joint dimension {dims.joint} exceeds the brute-force cap 64")
    if criterion is None:
        def criterion(state):
            return spin_criterion(state, j1, j2, rhs_mode="general").margin

    rng = np.random.default_rng(seed)

    def make_state(x: np.ndarray) -> PureState:
        if product_only:
            n1, n2 = dims.d1, dims.d2
            v1 = x[:n1] + 1j * x[n1 : 2 * n1]
            v2 = x[2 * n1 : 2 * n1 + n2] + 1j * x[2 * n1 + n2 :]
            v1 /= np.linalg.norm(v1)
            v2 /= np.linalg.norm(v2)
            vec = np.kron(v1, v2)
        else:
            n = dims.joint
            vec = x[:n] + 1j * x[n:]
            vec /= np.linalg.norm(vec)
        return PureState(dims, vec)

    def objective(x: np.ndarray) -> float:
        if np.linalg.norm(x) < 1e-6:
            return 1e6
        return criterion(make_state(x))

    n_params = 2 * (dims.d1 + dims.d2) if product_only else 2 * dims.joint
    best_margin = math.inf
    best_state = None
    for _ in range(iterations):
        x0 = rng.standard_normal(n_params)
        res = minimize(objective, x0, method="L-BFGS-B")
        if res.fun < best_margin:
            best_margin = float(res.fun)
            best_state = make_state(res.x)
    return best_state, best_margin
