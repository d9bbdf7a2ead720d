"""Dense complex linear algebra on finite-dimensional Hilbert spaces.

States (pure vectors and density operators), Hermitian observables on one- and
two-system spaces, and the moment bookkeeping (expectations, variances,
symmetrized covariances, commutator bounds) that every witness is built from.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12     # relative, Frobenius (upper bound on operator norm)
TRACE_TOL = 1e-12
PSD_TOL = -1e-10            # smallest eigenvalue may dip this far below zero
NORM_TOL = 1e-12
VARIANCE_CLAMP = -1e-12     # variances in [clamp, 0) report as 0; below is an error
IMAG_TOL = 1e-10            # largest tolerated imaginary part of a real moment

SUBSYSTEMS = ("system1", "system2", "joint")


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _require_hermitian(matrix: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(matrix)))
    dev = float(np.linalg.norm(matrix - matrix.conj().T))
    if dev > HERMITICITY_TOL * scale:
        raise ValueError(f"{what} is not Hermitian: deviation {dev:.3e} (scale {scale:.3e})")


@dataclass(frozen=True)
class HilbertDims:
    """Dimensions of a single space (d2 absent) or a bipartite space d1 x d2."""

    d1: int
    d2: int | None = None

    def __post_init__(self):
        if self.d1 < 1:
            raise ValueError(f"d1 must be >= 1, got {self.d1}")
        if self.d2 is not None and self.d2 < 1:
            raise ValueError(f"d2 must be >= 1, got {self.d2}")

    @property
    def bipartite(self) -> bool:
        return self.d2 is not None

    @property
    def joint(self) -> int:
        return self.d1 * self.d2 if self.d2 is not None else self.d1


@dataclass(frozen=True)
class Observable:
    """Hermitian operator attached to a subsystem of `dims`.

    The matrix size must match the tagged subsystem: d1 for "system1", d2 for
    "system2", d1*d2 (or d1 when single-system) for "joint".
    """

    dims: HilbertDims
    matrix: np.ndarray
    subsystem: str = "joint"

    def __post_init__(self):
        if self.subsystem not in SUBSYSTEMS:
            raise ValueError(f"unknown subsystem tag {self.subsystem!r}")
        mat = _frozen_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"observable matrix must be square, got shape {mat.shape}")
        expected = self._expected_dim()
        if mat.shape[0] != expected:
            raise ValueError(
                f"observable on {self.subsystem} must have dim {expected}, got {mat.shape[0]}"
            )
        _require_hermitian(mat, "observable")
        object.__setattr__(self, "matrix", mat)

    def _expected_dim(self) -> int:
        if self.subsystem == "system1":
            return self.dims.d1
        if self.subsystem == "system2":
            if self.dims.d2 is None:
                raise ValueError("system2 observable requires bipartite dims")
            return self.dims.d2
        return self.dims.joint

    def embedded(self) -> np.ndarray:
        """Matrix acting on the joint space (A x 1, 1 x B, or as stored)."""
        if self.subsystem == "joint":
            return self.matrix
        if self.subsystem == "system1":
            if self.dims.d2 is None:
                return self.matrix
            return np.kron(self.matrix, np.eye(self.dims.d2))
        return np.kron(np.eye(self.dims.d1), self.matrix)


@dataclass(frozen=True)
class PureState:
    """Unit vector on the (joint) space described by dims."""

    dims: HilbertDims
    vector: np.ndarray

    def __post_init__(self):
        vec = _frozen_array(self.vector)
        if vec.ndim != 1:
            raise ValueError(f"state vector must be 1-d, got shape {vec.shape}")
        if vec.shape[0] != self.dims.joint:
            raise ValueError(f"vector length {vec.shape[0]} != joint dim {self.dims.joint}")
        norm2 = float(np.vdot(vec, vec).real)
        if abs(norm2 - 1.0) > 2 * NORM_TOL:
            raise ValueError(f"state norm^2 = {norm2!r} differs from 1 beyond tolerance")
        object.__setattr__(self, "vector", vec)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.dims, np.outer(self.vector, self.vector.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Trace-one positive operator on the (joint) space described by dims."""

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen_array(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if mat.shape[0] != self.dims.joint:
            raise ValueError(f"matrix dim {mat.shape[0]} != joint dim {self.dims.joint}")
        _require_hermitian(mat, "density operator")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > 10 * TRACE_TOL:
            raise ValueError(f"density trace {tr!r} differs from 1 beyond tolerance")
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < PSD_TOL:
            raise ValueError(f"density operator has eigenvalue {lo:.3e} < {PSD_TOL}")
        object.__setattr__(self, "matrix", mat)


State = PureState | DensityOperator


def maximally_mixed(dims: HilbertDims) -> DensityOperator:
    n = dims.joint
    return DensityOperator(dims, np.eye(n) / n)


def basis_state(dims: HilbertDims, index: int) -> PureState:
    vec = np.zeros(dims.joint, dtype=complex)
    vec[index] = 1.0
    return PureState(dims, vec)


def tensor(a, b):
    """Kronecker product of two single-system objects of the same kind.

    `a` lives on system 1, `b` on system 2; the result is the joint object
    with dims (d1, d2). Raises if either operand already spans two systems.
    """
    for side, obj in (("first", a), ("second", b)):
        if obj.dims.bipartite:
            raise ValueError(f"tensor: {side} operand must be single-system")
    dims = HilbertDims(a.dims.d1, b.dims.d1)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(dims, np.kron(a.vector, b.vector))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(dims, np.kron(a.matrix, b.matrix))
    if isinstance(a, Observable) and isinstance(b, Observable):
        return Observable(dims, np.kron(a.matrix, b.matrix), "joint")
    raise TypeError(f"tensor: mismatched operand types {type(a).__name__}, {type(b).__name__}")


def _check_state_obs(state: State, obs: Observable) -> np.ndarray:
    if state.dims.joint != obs.dims.joint:
        raise ValueError(
            f"state joint dim {state.dims.joint} != observable joint dim {obs.dims.joint}"
        )
    return obs.embedded()


def _real_moment(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        raise ValueError(f"{what} has imaginary part {value.imag:.3e} beyond tolerance")
    return float(value.real)


def expectation(state: State, obs: Observable) -> float:
    """Re Tr(rho O); the imaginary part is asserted negligible."""
    mat = _check_state_obs(state, obs)
    if isinstance(state, PureState):
        val = complex(np.vdot(state.vector, mat @ state.vector))
    else:
        val = complex(np.einsum("ij,ji->", state.matrix, mat))
    return _real_moment(val, "expectation")


def variance(state: State, obs: Observable) -> float:
    """<O^2> - <O>^2, clamped to 0 inside the negative rounding band."""
    mat = _check_state_obs(state, obs)
    if isinstance(state, PureState):
        w = mat @ state.vector
        second = float(np.vdot(w, w).real)
        mean = _real_moment(complex(np.vdot(state.vector, w)), "expectation")
    else:
        second = _real_moment(complex(np.einsum("ij,jk,ki->", state.matrix, mat, mat)), "<O^2>")
        mean = _real_moment(complex(np.einsum("ij,ji->", state.matrix, mat)), "expectation")
    var = second - mean * mean
    if var < 0.0:
        scale = max(1.0, abs(second))
        if var < VARIANCE_CLAMP * scale:
            raise ValueError(f"variance {var:.3e} below clamp band; state or observable broken")
        var = 0.0
    return var


def covariance(state: State, obs1: Observable, obs2: Observable) -> float:
    """Symmetrized covariance (1/2)<{dO1, dO2}> about the state means."""
    m1 = _check_state_obs(state, obs1)
    m2 = _check_state_obs(state, obs2)
    if isinstance(state, PureState):
        w1 = m1 @ state.vector
        w2 = m2 @ state.vector
        cross = float(np.vdot(w1, w2).real)
        e1 = _real_moment(complex(np.vdot(state.vector, w1)), "expectation")
        e2 = _real_moment(complex(np.vdot(state.vector, w2)), "expectation")
    else:
        prod = complex(np.einsum("ij,jk,ki->", state.matrix, m1, m2))
        cross = prod.real  # (Tr(rho O1 O2) + conj)/2
        e1 = _real_moment(complex(np.einsum("ij,ji->", state.matrix, m1)), "expectation")
        e2 = _real_moment(complex(np.einsum("ij,ji->", state.matrix, m2)), "expectation")
    return cross - e1 * e2


def commutator_bound(state: State, a: Observable, b: Observable) -> float:
    """|Tr(rho [A, B])|; the trace is purely imaginary for Hermitian A, B."""
    ma = _check_state_obs(state, a)
    mb = _check_state_obs(state, b)
    if isinstance(state, PureState):
        wa = ma @ state.vector
        wb = mb @ state.vector
        val = complex(np.vdot(wa, wb)) - complex(np.vdot(wb, wa))
    else:
        val = complex(np.einsum("ij,jk,ki->", state.matrix, ma, mb)) - complex(
            np.einsum("ij,jk,ki->", state.matrix, mb, ma)
        )
    if abs(val.real) > IMAG_TOL * max(1.0, abs(val.imag)):
        raise ValueError(f"commutator trace has real part {val.real:.3e}; A or B not Hermitian?")
    return abs(val.imag)
