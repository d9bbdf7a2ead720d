"""Wigner d-matrices at beta = pi/2 across three accuracy/size regimes.

The closed-form alternating binomial sum for d^j_{mm'}(pi/2) cancels
catastrophically in floating point (the largest term exceeds the result by a
factor ~2^j), so the methods here never sum it in doubles:

* "exact-rational"  - the sum is taken in exact integer arithmetic and the
  squared entry is formed as a Fraction; the float is then correct to ~2 ulp.
  Default regime two_j <= 50 (configurable cap; cost grows with the bignum
  sizes).
* "log-domain"      - same exact integer sum, but the entry is assembled in
  log space from the big-integer magnitude and a log-factorial prefactor,
  avoiding rational normalization. Accuracy ~|log| * eps (measured and
  attached). Default regime 50 < two_j <= 300.
* "recursion"       - edge-seeded three-term recurrence in m' with exact row
  normalization (see _dkernel_py); O(n^2), used beyond two_j = 300 and
  capable to the configured cap (default two_j = 4000, env SEPWITNESS_JMAX).

Ordering convention everywhere: row i holds m = j - i and column i' holds
m' = j - i' (both descending), which makes the matrix equal to the matrix
exponential exp(-i (pi/2) Jy) written in the Jz eigenbasis.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .kernels import dmatrix_pi_half

ANGLE = math.pi / 2

EXACT_TWO_J_CAP = 50
LOG_DOMAIN_TWO_J_CAP = 300
DEFAULT_TWO_J_MAX = 4000
JMAX_ENV_VAR = "SEPWITNESS_JMAX"

_LN2 = math.log(2.0)

_CACHE_TWO_J_LIMIT = 400
_cache: dict[tuple[int, str], "WignerDMatrix"] = {}
_cache_lock = threading.Lock()


@dataclass(frozen=True)
class Irrep:
    """Angular-momentum irrep labeled by two_j (j in half-integer steps)."""

    two_j: int

    def __post_init__(self):
        if self.two_j < 0:
            raise ValueError(f"two_j must be >= 0, got {self.two_j}")

    @classmethod
    def from_j(cls, j: float) -> "Irrep":
        two_j = round(2 * j)
        if abs(2 * j - two_j) > 1e-9:
            raise ValueError(f"j = {j} is not a half-integer")
        return cls(two_j)

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def dimension(self) -> int:
        return self.two_j + 1


def two_j_max_default() -> int:
    """Configured two_j cap for d-matrix construction (SEPWITNESS_JMAX overrides)."""
    raw = os.environ.get(JMAX_ENV_VAR)
    if raw is None:
        return DEFAULT_TWO_J_MAX
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{JMAX_ENV_VAR} must be an integer, got {raw!r}") from exc


def _two_m(irrep: Irrep, m: float, what: str) -> int:
    two_m = round(2 * m)
    if abs(2 * m - two_m) > 1e-9:
        raise ValueError(f"{what} = {m} is not a half-integer")
    if (two_m - irrep.two_j) % 2 != 0:
        raise ValueError(f"{what} = {m} has wrong parity for two_j = {irrep.two_j}")
    if abs(two_m) > irrep.two_j:
        raise ValueError(f"|{what}| = {abs(m)} exceeds j = {irrep.j}")
    return two_m


def _alternating_sum(two_j: int, two_m: int, two_mp: int) -> int:
    """Exact integer sum_k C(j+m, j+m'-k) C(j-m, k) (-1)^k."""
    jm = (two_j + two_m) // 2
    jmm = (two_j - two_m) // 2
    jmp = (two_j + two_mp) // 2
    total = 0
    sign = 1
    for k in range(jmm + 1):
        top = jmp - k
        if 0 <= top <= jm:
            total += sign * math.comb(jm, top) * math.comb(jmm, k)
        sign = -sign
    return total


@dataclass(frozen=True)
class ExactDEntry:
    """One d^j_{mm'}(pi/2) entry in exact form: sign * sqrt(squared).

    sum_term is the signed integer alternating sum; ratio is the factorial
    ratio (j+m')!(j-m')! / ((j+m)!(j-m)!); together with the 2^{-2j} from the
    prefactor they give squared = sum_term^2 * ratio / 2^{2j} exactly.
    """

    two_j: int
    two_m: int
    two_mp: int
    sum_term: int
    ratio: Fraction

    @property
    def sign(self) -> int:
        if self.sum_term == 0:
            return 0
        parity = -1 if ((self.two_m - self.two_mp) // 2) % 2 else 1
        return parity * (1 if self.sum_term > 0 else -1)

    @property
    def squared(self) -> Fraction:
        return Fraction(self.sum_term * self.sum_term, 1 << self.two_j) * self.ratio

    @property
    def value(self) -> float:
        if self.sum_term == 0:
            return 0.0
        return self.sign * math.sqrt(float(self.squared))


def wigner_d_exact(irrep: Irrep, m: float, mp: float, *, cap_two_j: int = EXACT_TWO_J_CAP) -> ExactDEntry:
    """Exact-rational d^j_{m m'}(pi/2); refuses above the cap."""
    if irrep.two_j > cap_two_j:
        raise ValueError(
            f"two_j = {irrep.two_j} above exact-arithmetic cap {cap_two_j}; "
            "use wigner_d_stable instead"
        )
    two_m = _two_m(irrep, m, "m")
    two_mp = _two_m(irrep, mp, "m'")
    s = _alternating_sum(irrep.two_j, two_m, two_mp)
    jm = (irrep.two_j + two_m) // 2
    jmm = (irrep.two_j - two_m) // 2
    jmp = (irrep.two_j + two_mp) // 2
    jmpm = (irrep.two_j - two_mp) // 2
    ratio = Fraction(
        math.factorial(jmp) * math.factorial(jmpm),
        math.factorial(jm) * math.factorial(jmm),
    )
    return ExactDEntry(irrep.two_j, two_m, two_mp, s, ratio)


def _log_abs_bigint(n: int) -> float:
    bits = n.bit_length()
    if bits <= 512:
        return math.log(abs(n))
    shift = bits - 64
    return math.log(abs(n) >> shift) + shift * _LN2


def _entry_log_domain(two_j: int, two_m: int, two_mp: int, lnfact) -> float:
    s = _alternating_sum(two_j, two_m, two_mp)
    if s == 0:
        return 0.0
    jm = (two_j + two_m) // 2
    jmm = (two_j - two_m) // 2
    jmp = (two_j + two_mp) // 2
    jmpm = (two_j - two_mp) // 2
    ln = (
        _log_abs_bigint(s)
        + 0.5 * (lnfact[jmp] + lnfact[jmpm] - lnfact[jm] - lnfact[jmm])
        - (two_j / 2.0) * _LN2
    )
    parity = -1.0 if ((two_m - two_mp) // 2) % 2 else 1.0
    return parity * math.copysign(math.exp(ln), s)


def _symmetric_fill(two_j: int, entry_fn) -> np.ndarray:
    """Build the full matrix from entries on the octant m >= m' >= 0.

    Images and signs (all exponents are integers):
      (m', m), (-m, -m')  pick up (-1)^{m - m'}
      (-m', -m)           is equal
      (m, -m'), (m', -m)  pick up (-1)^{j + m}
      (-m, m'), (-m', m)  pick up (-1)^{j - m'}
    """
    n = two_j + 1
    out = np.empty((n, n))
    lo = 0 if two_j % 2 == 0 else 1
    for two_m in range(two_j, lo - 1, -2):
        i = (two_j - two_m) // 2
        ri = n - 1 - i
        sig_r = -1.0 if ((two_j + two_m) // 2) % 2 else 1.0
        for two_mp in range(lo, two_m + 1, 2):
            ip = (two_j - two_mp) // 2
            rip = n - 1 - ip
            e = entry_fn(two_m, two_mp)
            sig_t = -1.0 if ((two_m - two_mp) // 2) % 2 else 1.0
            sig_c = -1.0 if ((two_j - two_mp) // 2) % 2 else 1.0
            out[i, ip] = e
            out[ip, i] = sig_t * e
            out[ri, rip] = sig_t * e
            out[rip, ri] = e
            out[i, rip] = sig_r * e
            out[ip, ri] = sig_r * e
            out[ri, ip] = sig_c * e
            out[rip, i] = sig_c * e
    return out


def _max_row_norm_deviation(matrix: np.ndarray) -> float:
    return float(np.abs((matrix**2).sum(axis=1) - 1.0).max())


def _sampled_orthogonality(matrix: np.ndarray, two_j: int) -> float:
    n = matrix.shape[0]
    if n < 2:
        return 0.0
    rng = np.random.default_rng(two_j)
    worst = 0.0
    for _ in range(min(64, n * (n - 1) // 2)):
        a, b = rng.choice(n, size=2, replace=False)
        worst = max(worst, abs(float(matrix[:, a] @ matrix[:, b])))
    return worst


@dataclass(frozen=True)
class WignerDMatrix:
    """d^j(pi/2) with method and accuracy metadata; matrix is read-only."""

    irrep: Irrep
    matrix: np.ndarray
    method: str
    max_abs_error: float
    angle: float = ANGLE

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def entry(self, m: float, mp: float) -> float:
        i = (self.irrep.two_j - _two_m(self.irrep, m, "m")) // 2
        ip = (self.irrep.two_j - _two_m(self.irrep, mp, "m'")) // 2
        return float(self.matrix[i, ip])

    def unitarity_deviation(self) -> float:
        """max |D D^T - I|; O(n^3), meant for tests and report summaries."""
        n = self.matrix.shape[0]
        return float(np.abs(self.matrix @ self.matrix.T - np.eye(n)).max())

    def transpose_symmetry_deviation(self) -> float:
        """max |d_{mm'} - (-1)^{m-m'} d_{m'm}|."""
        n = self.matrix.shape[0]
        signs = np.where((np.arange(n)[:, None] - np.arange(n)[None, :]) % 2 == 0, 1.0, -1.0)
        return float(np.abs(self.matrix - signs * self.matrix.T).max())


def _build(two_j: int, method: str) -> WignerDMatrix:
    irrep = Irrep(two_j)
    if method == "exact-rational":
        def entry(two_m, two_mp, _two_j=two_j):
            e = ExactDEntry(
                _two_j,
                two_m,
                two_mp,
                _alternating_sum(_two_j, two_m, two_mp),
                Fraction(
                    math.factorial((_two_j + two_mp) // 2) * math.factorial((_two_j - two_mp) // 2),
                    math.factorial((_two_j + two_m) // 2) * math.factorial((_two_j - two_m) // 2),
                ),
            )
            return e.value

        matrix = _symmetric_fill(two_j, entry)
        return WignerDMatrix(irrep, matrix, method, 5e-16)
    if method == "log-domain":
        lnfact = [math.lgamma(k + 1) for k in range(two_j + 1)]
        matrix = _symmetric_fill(two_j, lambda a, b: _entry_log_domain(two_j, a, b, lnfact))
        est = max(_max_row_norm_deviation(matrix), 1e-15)
        return WignerDMatrix(irrep, matrix, method, est)
    if method == "recursion":
        matrix = dmatrix_pi_half(two_j)
        est = max(_sampled_orthogonality(matrix, two_j), 1e-15 * math.sqrt(two_j + 1))
        return WignerDMatrix(irrep, matrix, method, est)
    raise ValueError(f"unknown d-matrix method {method!r}")


def default_method(two_j: int) -> str:
    if two_j <= EXACT_TWO_J_CAP:
        return "exact-rational"
    if two_j <= LOG_DOMAIN_TWO_J_CAP:
        return "log-domain"
    return "recursion"


def wigner_d_stable(
    irrep: Irrep,
    *,
    method: str | None = None,
    two_j_max: int | None = None,
    use_cache: bool = True,
) -> WignerDMatrix:
    """Full d^j(pi/2) by the method appropriate for this size (or as forced)."""
    cap = two_j_max if two_j_max is not None else two_j_max_default()
    if irrep.two_j > cap:
        raise ValueError(f"two_j = {irrep.two_j} exceeds configured cap {cap}")
    chosen = method or default_method(irrep.two_j)
    key = (irrep.two_j, chosen)
    if use_cache and irrep.two_j <= _CACHE_TWO_J_LIMIT:
        with _cache_lock:
            hit = _cache.get(key)
        if hit is not None:
            return hit
        built = _build(irrep.two_j, chosen)
        with _cache_lock:
            _cache.setdefault(key, built)
        return built
    return _build(irrep.two_j, chosen)


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def wigner_d_asymptotic(irrep: Irrep, m: float, mp: float) -> float:
    """Large-j closed form sqrt(2/pi j) exp(+|m^2-m'^2|/2j) cos((j+m-m') pi/2).

    Implemented exactly as printed (including the growing exponential factor);
    approximation quality is the caller's concern. The cosine is resolved from
    integer parity when j+m-m' is an integer, so its zeros are exact.
    """
    two_m = _two_m(irrep, m, "m")
    two_mp = _two_m(irrep, mp, "m'")
    j = irrep.two_j / 2.0
    if j <= 0:
        raise ValueError("asymptotic form needs j > 0")
    t = (irrep.two_j + two_m - two_mp) // 2 if (irrep.two_j + two_m - two_mp) % 2 == 0 else None
    if t is not None:
        cos_factor = (1.0, 0.0, -1.0, 0.0)[t % 4]
    else:
        half = ((irrep.two_j + two_m - two_mp) % 8) / 2.0
        cos_factor = math.cos(half * math.pi / 2.0)
    amp = math.sqrt(2.0 / (math.pi * j)) * math.exp(abs(m * m - mp * mp) / (2.0 * j))
    return amp * cos_factor
