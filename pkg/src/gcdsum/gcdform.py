"""GCD Gram matrices and the quadratic form sum c_k c_l (k,l)^{2s} / (k^s l^s).

Besides brute-force evaluation this module has the Cesaro diagonalization over
the factor closure, the T / T-check matrix factorization (float and exact
rational paths), the divisor-sum identity and a Cauchy-measure Monte-Carlo estimator.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from gcdsum.arith import divisors, factorize, jordan_totient, mobius
from gcdsum.errors import DomainError, SizeError
from gcdsum.fcset import IndexSet, as_index_set, fc_closure
from gcdsum.zeta import zeta_reference

DENSE_CAP = 2048
PRNG_NAME = f"numpy.random.PCG64/numpy-{np.__version__}"


class CoefSeq(dict):
    """Sparse coefficients indexed by positive integers; absent indices read as 0."""

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        super().__init__()
        items = entries.items() if isinstance(entries, Mapping) else entries
        for k, v in items:
            if int(k) < 1:
                raise DomainError(f"coefficient index must be >= 1, got {k}")
            self[int(k)] = v

    def __missing__(self, k: int) -> float:
        return 0.0

    @classmethod
    def on(cls, K: Iterable[int], values: Iterable[float]) -> "CoefSeq":
        K, values = list(K), list(values)
        if len(K) != len(values):
            raise DomainError(f"{len(values)} coefficients for a set of size {len(K)}")
        return cls(zip(K, values))

    @classmethod
    def dense(cls, values: Sequence[float]) -> "CoefSeq":
        """a_1, a_2, ... from a plain sequence."""
        return cls(enumerate(values, start=1))

    def support(self) -> list[int]:
        return sorted(k for k, v in self.items() if v != 0)

    def vector(self, K: Iterable[int]) -> np.ndarray:
        return np.array([self[k] for k in K], dtype=float)


@dataclass(frozen=True)
class GcdFormSpec:
    set: IndexSet
    s: float
    include_zeta_factor: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "set", as_index_set(self.set))
        if not self.s > 0:
            raise DomainError(f"s must be positive, got {self.s}")
        if self.include_zeta_factor and not self.s > 0.5:
            raise DomainError(f"the zeta(2s) factor needs s > 1/2, got {self.s}")

    @property
    def scale(self) -> float:
        return zeta_reference(2 * self.s, 0).real if self.include_zeta_factor else 1.0


def _check_support(K: IndexSet, c: Mapping[int, float]) -> None:
    outside = [k for k, v in c.items() if v != 0 and k not in K]
    if outside:
        raise DomainError(f"coefficients supported outside K: {sorted(outside)[:5]}")


def gcd_kernel(K: Sequence[int], s: float) -> np.ndarray:
    """Unscaled matrix (k,l)^{2s} / (k^s l^s)."""
    k = np.asarray(K, dtype=np.int64)
    g = np.gcd.outer(k, k).astype(float)
    kf = k.astype(float)
    # (g/k)^s (g/l)^s keeps the diagonal exactly 1
    return (g / kf[:, None]) ** s * (g / kf[None, :]) ** s


def quadratic_form_direct(spec: GcdFormSpec, c: Mapping[int, float]) -> float:
    K = spec.set
    _check_support(K, c)
    elems = list(K)
    total = 0.0
    for k in elems:
        ck = c.get(k, 0.0)
        if ck == 0:
            continue
        for l in elems:
            cl = c.get(l, 0.0)
            if cl:
                g = math.gcd(k, l)
                total += ck * cl * (g / k) ** spec.s * (g / l) ** spec.s
    return total * spec.scale


@dataclass(frozen=True)
class DiagReport:
    b: dict[int, float]
    value: float
    fc_embedding: IndexSet

    def to_dict(self) -> dict:
        return {
            "b": {str(i): v for i, v in self.b.items()},
            "value": self.value,
            "fc_embedding": self.fc_embedding.to_list(),
        }


def cesaro_diagonalize(spec: GcdFormSpec, c: Mapping[int, float]) -> DiagReport:
    """b_i = sqrt(J_{2s}(i)) * sum_{k in K, i | k} c_k k^{-s} over i in F(K)."""
    K = spec.set
    _check_support(K, c)
    F = fc_closure(K)
    s = spec.s
    inner = dict.fromkeys(F, 0.0)
    for k in K:
        ck = c.get(k, 0.0)
        if ck:
            w = ck / k**s
            for d in divisors(k):
                inner[d] += w
    root = math.sqrt(spec.scale)
    b = {i: root * math.sqrt(jordan_totient(2 * s, i)) * inner[i] for i in F}
    value = math.fsum(v * v for v in b.values())
    return DiagReport(b=b, value=value, fc_embedding=F)


def gram_matrix(spec: GcdFormSpec, cap: int = DENSE_CAP) -> np.ndarray:
    if len(spec.set) > cap:
        raise SizeError(f"|K|={len(spec.set)} exceeds the dense-matrix cap {cap}")
    return gcd_kernel(list(spec.set), spec.s) * spec.scale


# T and T-check factorization


@dataclass(frozen=True)
class MoebiusFactorization:
    """t_ij = delta_i theta_j [i|j], tcheck_ij = mu(j/i) [i|j] / (theta_i delta_j).

    delta may be given through its square (delta_sq) so that the rational path
    stays exact when delta itself is irrational.
    """

    n: int
    delta_sq: tuple
    theta: tuple
    H: tuple = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("dimension must be at least 1")
        if len(self.delta_sq) != self.n or len(self.theta) != self.n:
            raise DomainError("delta and theta must have length n")
        if any(not d > 0 for d in self.delta_sq):
            raise DomainError("delta_i must be positive")
        if any(t == 0 for t in self.theta):
            raise DomainError("theta_i must be nonzero")
        zero = 0 * self.delta_sq[0]
        H = tuple(
            sum((self.delta_sq[k - 1] for k in divisors(m)), start=zero) for m in range(1, self.n + 1)
        )
        object.__setattr__(self, "H", H)

    @classmethod
    def from_delta(cls, delta: Sequence[float], theta: Sequence[float]) -> "MoebiusFactorization":
        if any(not d > 0 for d in delta):
            raise DomainError("delta_i must be positive")
        return cls(len(delta), tuple(d * d for d in delta), tuple(theta))

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.delta_sq + self.theta)

    def t_matrix(self) -> np.ndarray:
        n = self.n
        delta = np.sqrt(np.array([float(d) for d in self.delta_sq]))
        theta = np.array([float(t) for t in self.theta])
        T = np.zeros((n, n))
        for i in range(1, n + 1):
            for j in range(i, n + 1, i):
                T[i - 1, j - 1] = delta[i - 1] * theta[j - 1]
        return T

    def tcheck_matrix(self) -> np.ndarray:
        n = self.n
        delta = np.sqrt(np.array([float(d) for d in self.delta_sq]))
        theta = np.array([float(t) for t in self.theta])
        Tc = np.zeros((n, n))
        for i in range(1, n + 1):
            for j in range(i, n + 1, i):
                Tc[i - 1, j - 1] = mobius(j // i) / (theta[i - 1] * delta[j - 1])
        return Tc

    def target(self) -> np.ndarray:
        """A_ij = theta_i theta_j H_{(i,j)}."""
        n = self.n
        theta = np.array([float(t) for t in self.theta])
        H = np.array([float(h) for h in self.H])
        idx = np.arange(1, n + 1)
        g = np.gcd.outer(idx, idx)
        return np.outer(theta, theta) * H[g - 1]


@dataclass(frozen=True)
class FactorizationCheck:
    n: int
    exact: bool
    inverse_ok: bool
    gram_ok: bool
    inverse_err: float
    gram_err: float
    det_T: float
    positive_definite: bool

    @property
    def passed(self) -> bool:
        return self.inverse_ok and self.gram_ok and self.positive_definite

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def _exact_inverse(mf: MoebiusFactorization) -> bool:
    """T = D R with D = diag(delta), R_kj = theta_j [k|j], and T-check = R' D^{-1} with
    R'_ik = mu(k/i) [i|k] / theta_i, so T-check T = R' R is rational in theta alone."""
    n = mf.n
    theta = [Fraction(t) for t in mf.theta]
    for i in range(1, n + 1):
        row: dict[int, Fraction] = {}
        for k in range(i, n + 1, i):
            mu = mobius(k // i)
            if mu == 0:
                continue
            coef = Fraction(mu) / theta[i - 1]
            for j in range(k, n + 1, k):
                row[j] = row.get(j, Fraction(0)) + coef * theta[j - 1]
        for j in range(1, n + 1):
            if row.get(j, 0) != (1 if i == j else 0):
                return False
    return True


def _exact_gram(mf: MoebiusFactorization) -> bool:
    """T^T T = R^T D^2 R, summed over k dividing both i and j, against theta_i theta_j H_(i,j)."""
    n = mf.n
    theta = [Fraction(t) for t in mf.theta]
    dsq = [Fraction(d) for d in mf.delta_sq]
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            acc = Fraction(0)
            for k in range(1, i + 1):
                if i % k == 0 and j % k == 0:
                    acc += theta[i - 1] * dsq[k - 1] * theta[j - 1]
            if acc != theta[i - 1] * theta[j - 1] * Fraction(mf.H[math.gcd(i, j) - 1]):
                return False
    return True


def moebius_factorization_check(mf: MoebiusFactorization, tol: float = 1e-12) -> FactorizationCheck:
    T = mf.t_matrix()
    Tc = mf.tcheck_matrix()
    n = mf.n
    inv_err = float(np.max(np.abs(Tc @ T - np.eye(n))))
    A = mf.target()
    scale = max(1.0, float(np.max(np.abs(A))))
    gram_err = float(np.max(np.abs(T.T @ T - A))) / scale
    det = float(np.prod(np.diag(T)))
    try:
        np.linalg.cholesky(A)
        pd = det != 0
    except np.linalg.LinAlgError:
        pd = False
    if mf.is_rational:
        inverse_ok = _exact_inverse(mf)
        gram_ok = _exact_gram(mf)
        return FactorizationCheck(n, True, inverse_ok, gram_ok, inv_err, gram_err, det, pd)
    return FactorizationCheck(n, False, inv_err <= tol, gram_err <= tol, inv_err, gram_err, det, pd)


def hilberdink_identity(a: Mapping[int, complex], N: int, s: float) -> tuple[float, float]:
    """lhs = sum_{n<=N} |b_n|^2 with b_n = n^{-s} sum_{d|n} d^s a_d; rhs is the gcd double sum."""
    if N < 1:
        raise DomainError("N must be at least 1")
    outside = [m for m, v in a.items() if v != 0 and not 1 <= m <= N]
    if outside:
        raise DomainError(f"a supported outside [1, N]: {sorted(outside)[:5]}")
    av = np.zeros(N + 1, dtype=complex)
    for m, v in a.items():
        av[m] = v
    lhs = 0.0
    for n in range(1, N + 1):
        b = sum(d**s * av[d] for d in divisors(n)) / n**s
        lhs += abs(b) ** 2
    # star sums: tail[q] = sum_{k <= q} k^{-2s}
    tail = np.concatenate([[0.0], np.cumsum(np.arange(1, N + 1, dtype=float) ** (-2 * s))])
    support = [m for m in range(1, N + 1) if av[m] != 0]
    rhs = 0j
    for m in support:
        for n in support:
            g = math.gcd(m, n)
            q = N // (m // g * n)
            if q:
                rhs += av[m] * av[n].conjugate() * g ** (2 * s) / (m * n) ** s * tail[q]
    return float(lhs), float(rhs.real)


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    samples: int
    seed: int
    workers: int
    prng: str = PRNG_NAME

    def __iter__(self):
        return iter((self.estimate, self.stderr))

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _mc_chunk(V: np.ndarray, cv: np.ndarray, s: float, n: int, seed_seq, batch: int):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    count, mean, m2 = 0, 0.0, 0.0
    P = V.shape[1]
    while count < n:
        b = min(batch, n - count)
        t = np.tan(np.pi * (rng.random((b, P)) - 0.5))
        phase = -s * (t @ V.T)
        re = np.cos(phase) @ cv
        im = np.sin(phase) @ cv
        x = re * re + im * im
        # Chan merge of batch moments
        bm = float(x.mean())
        bm2 = float(((x - bm) ** 2).sum())
        tot = count + b
        d = bm - mean
        mean += d * b / tot
        m2 += bm2 + d * d * count * b / tot
        count = tot
    return count, mean, m2


def cauchy_mc_estimate(
    spec: GcdFormSpec,
    c: Mapping[int, float],
    samples: int,
    seed: int,
    workers: int = 1,
    batch: int = 65536,
) -> MCEstimate:
    """Average of |sum_k c_k prod_p p^{-i v_p(k) s t_p}|^2 over iid standard Cauchy t_p."""
    if samples < 1:
        raise DomainError("samples must be at least 1")
    if workers < 1:
        raise DomainError("workers must be at least 1")
    K = spec.set
    _check_support(K, c)
    elems = list(K)
    primes = sorted({p for k in elems for p, _ in factorize(k)})
    V = np.zeros((len(elems), max(1, len(primes))))
    for r, k in enumerate(elems):
        fac = dict(factorize(k).factors)
        for q, p in enumerate(primes):
            V[r, q] = fac.get(p, 0) * math.log(p)
    cv = np.array([c.get(k, 0.0) for k in elems], dtype=float)
    children = np.random.SeedSequence(seed).spawn(workers)
    shares = [samples // workers + (1 if w < samples % workers else 0) for w in range(workers)]
    jobs = [(V, cv, spec.s, n, ss, batch) for n, ss in zip(shares, children) if n > 0]
    if workers == 1:
        parts = [_mc_chunk(*j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _mc_chunk(*j), jobs))
    count, mean, m2 = 0, 0.0, 0.0
    for n, mu, q in parts:
        tot = count + n
        d = mu - mean
        mean += d * n / tot
        m2 += q + d * d * count * n / tot
        count = tot
    var = m2 / (count - 1) if count > 1 else 0.0
    scale = spec.scale
    # each sample carries rounding of order eps * (sum |c_k|)^2; without this floor a
    # zero-variance case (a single k) would report a stderr below its own roundoff
    roundoff = 16 * np.finfo(float).eps * float(np.abs(cv).sum()) ** 2
    return MCEstimate(
        estimate=mean * scale,
        stderr=math.hypot(math.sqrt(var / count), roundoff) * scale,
        samples=samples,
        seed=seed,
        workers=workers,
    )
