"""Sieve-backed factorization and the arithmetic functions built on it.

Multiplicative functions are evaluated from the canonical factorization.
Integer-valued ones (d, theta, mu, phi, d(k^2)) stay in exact integer
arithmetic; real-valued ones (sigma_u, J_s) use binary64.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from gcdsum.errors import DomainError, RangeError

DEFAULT_SIEVE_BOUND = 10**7
MAX_FACTOR_N = 10**12
SIEVE_ENV = "GCDSUM_SIEVE_BOUND"

ArithFn = Callable[[int], float]


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"non-canonical factorization {self.factors}")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError(f"factors of {self.n} multiply to {prod}")

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def valuation(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


class Sieve:
    """Smallest-prime-factor table on [0, bound], read-only after construction."""

    def __init__(self, bound: int = DEFAULT_SIEVE_BOUND):
        if bound < 2:
            raise RangeError(f"sieve bound must be at least 2, got {bound}")
        self.bound = int(bound)
        spf = np.zeros(self.bound + 1, dtype=np.int64)
        for p in range(2, math.isqrt(self.bound) + 1):
            if spf[p] == 0:
                seg = spf[p * p :: p]
                seg[seg == 0] = p
        idx = np.flatnonzero(spf == 0)
        spf[idx] = idx
        spf.flags.writeable = False
        self._spf = spf
        # primes up to 10^6 drive the trial-division fallback
        cap = min(self.bound, 10**6)
        small = np.flatnonzero(spf[2 : cap + 1] == np.arange(2, cap + 1)) + 2
        self._small_primes = small.tolist()

    def factorize(self, n: int) -> Factorization:
        n = _check_n(n)
        if n <= self.bound:
            return Factorization(n, _spf_factor(self._spf, n))
        return Factorization(n, self._trial_factor(n))

    def _trial_factor(self, n: int) -> tuple[tuple[int, int], ...]:
        out = []
        m = n
        for p in self._small_primes:
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out.append((p, e))
        # sieve covers up to 10^6 only when bound >= 10^6; finish by odd trial division
        p = (self._small_primes[-1] + 2) if self._small_primes else 3
        p |= 1
        while p * p <= m:
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                out.append((p, e))
            p += 2
        if m > 1:
            out.append((m, 1))
        return tuple(out)

    def spf_table(self) -> np.ndarray:
        return self._spf


def _spf_factor(spf: np.ndarray, n: int) -> tuple[tuple[int, int], ...]:
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return tuple(out)


def _check_n(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise RangeError(f"expected a positive integer, got {n!r}")
    n = int(n)
    if n < 1 or n > MAX_FACTOR_N:
        raise RangeError(f"n={n} outside [1, {MAX_FACTOR_N}]")
    return n


_lock = threading.Lock()
_default: Sieve | None = None
_default_bound: int | None = None


def configured_sieve_bound() -> int:
    if _default_bound is not None:
        return _default_bound
    raw = os.environ.get(SIEVE_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise RangeError(f"{SIEVE_ENV}={raw!r} is not an integer") from None
    return DEFAULT_SIEVE_BOUND


def set_sieve_bound(bound: int) -> None:
    """Choose the default sieve size; the sieve is rebuilt lazily on next use."""
    global _default, _default_bound
    if bound < 2:
        raise RangeError(f"sieve bound must be at least 2, got {bound}")
    with _lock:
        _default_bound = int(bound)
        if _default is not None and _default.bound != bound:
            _default = None


def get_sieve() -> Sieve:
    global _default
    if _default is None:
        with _lock:
            if _default is None:
                _default = Sieve(configured_sieve_bound())
    return _default


def factorize(n: int) -> Factorization:
    return get_sieve().factorize(n)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**j for d in divs for j in range(e + 1)]
    divs.sort()
    return divs


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def omega(n: int) -> int:
    return len(factorize(n))


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def divisor_count_square(n: int) -> int:
    """d(n^2) from the exponents of n."""
    return math.prod(2 * e + 1 for _, e in factorize(n))


def divisor_sigma(u: float, n: int) -> float:
    fac = factorize(n)
    if u == 0:
        return float(math.prod(e + 1 for _, e in fac))
    out = 1.0
    for p, e in fac:
        q = float(p) ** u
        term = 1.0
        acc = 1.0
        for _ in range(e):
            term *= q
            acc += term
        out *= acc
    return out


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def jordan_totient(s: float, n: int) -> float:
    out = float(n) ** s
    for p, _ in factorize(n):
        out *= 1.0 - float(p) ** (-s)
    return out


def theta_sqfree(n: int) -> int:
    return 1 << omega(n)


def hooley_delta(n: int) -> int:
    divs = divisors(n)
    best = 0
    j = 0
    # window just below d_i: counts d_i <= d < e*d_i, never equality since e is irrational
    for i, d in enumerate(divs):
        j = max(j, i)
        while j + 1 < len(divs) and divs[j + 1] < math.e * d:
            j += 1
        best = max(best, j - i + 1)
    return best


def loglog(x: float) -> float:
    """log log max(x, e^e), so the value is always at least 1."""
    return math.log(math.log(max(float(x), math.exp(math.e))))


def dirichlet_convolve(f: ArithFn, g: ArithFn, n: int) -> float:
    return sum(f(d) * g(n // d) for d in divisors(n))


def zeta_power(eps: float) -> ArithFn:
    """The arithmetic function n -> n^eps."""
    return lambda n: float(n) ** eps


def delta(n: int) -> int:
    return 1 if n == 1 else 0


# table versions used by scans; O(N log N) divisor-sum sieving


def sigma_table(u: float, N: int) -> np.ndarray:
    """sigma_u(n) for 0 <= n <= N (entry 0 unused)."""
    tab = np.zeros(N + 1, dtype=np.float64)
    for d in range(1, N + 1):
        tab[d::d] += float(d) ** u
    return tab


STATISTICS = ("sigma_over_nloglogn", "sigma_alpha_ratio")


def extremal_scan(
    N: int, statistic: str = "sigma_over_nloglogn", alpha: float | None = None
) -> list[tuple[int, float]]:
    """Running-maximum records of an extremal divisor statistic over 3 <= n <= N."""
    if N < 3:
        raise RangeError(f"N must be at least 3, got {N}")
    if N > configured_sieve_bound():
        raise RangeError(f"N={N} exceeds sieve bound {configured_sieve_bound()}")
    n = np.arange(3, N + 1, dtype=np.float64)
    ll = np.log(np.log(np.maximum(n, math.exp(math.e))))
    if statistic == "sigma_over_nloglogn":
        sig = sigma_table(1.0, N)[3:]
        ratio = sig / (n * ll)
    elif statistic == "sigma_alpha_ratio":
        if alpha is None or not 0 < alpha < 1:
            raise DomainError("sigma_alpha_ratio needs 0 < alpha < 1")
        sig = sigma_table(alpha, N)[3:]
        ratio = np.log(sig / n**alpha) / (np.log(n) ** (1 - alpha) / ll)
    else:
        raise DomainError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    running = np.maximum.accumulate(ratio)
    is_record = np.empty(ratio.size, dtype=bool)
    is_record[0] = True
    is_record[1:] = ratio[1:] > running[:-1]
    idx = np.flatnonzero(is_record)
    return [(int(i) + 3, float(ratio[i])) for i in idx]


MULTIPLICATIVE: dict[str, ArithFn] = {
    "mobius": mobius,
    "theta": theta_sqfree,
    "phi": euler_phi,
    "d": divisor_count,
    "d_square": divisor_count_square,
}


def is_multiplicative_on(f: ArithFn, pairs: Sequence[tuple[int, int]], rel: float = 0.0) -> bool:
    for m, n in pairs:
        lhs, rhs = f(m * n), f(m) * f(n)
        if abs(lhs - rhs) > rel * max(abs(lhs), abs(rhs)):
            return False
    return True
