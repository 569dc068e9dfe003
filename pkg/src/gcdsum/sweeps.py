"""Seeded random cases on each bound's hypothesis domain, and sweep runners.

Every generator draws from a numpy Generator so a (seed, cases) pair fixes the
whole campaign.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from gcdsum import bounds
from gcdsum.gcdform import CoefSeq

Case = dict
Runner = Callable[[np.random.Generator], "bounds.BoundReport"]


def random_set(rng: np.random.Generator, lo: int, hi: int, max_size: int) -> list[int]:
    size = int(rng.integers(1, max_size + 1))
    size = min(size, hi - lo + 1)
    return sorted(int(k) for k in rng.choice(np.arange(lo, hi + 1), size=size, replace=False))


def antichain_set(rng: np.random.Generator, max_size: int) -> list[int]:
    """Elements of (m, 2m] never divide one another, so K* is empty."""
    m = int(rng.integers(4, 60))
    return random_set(rng, m + 1, 2 * m, max_size)


def random_coefs(rng: np.random.Generator, K: list[int], nonneg: bool = False) -> CoefSeq:
    lo = 0.0 if nonneg else -1.0
    return CoefSeq.on(K, rng.uniform(lo, 1.0, size=len(K)).tolist())


def random_fourier(rng: np.random.Generator, M: int = 48) -> CoefSeq:
    """a_m = u_m / m^alpha with random signs and a random decay alpha in [0.5, 1.5]."""
    alpha = float(rng.uniform(0.5, 1.5))
    m = np.arange(1, M + 1)
    vals = rng.uniform(-1, 1, size=M) / m**alpha
    return CoefSeq.dense(vals.tolist())


def random_positive_psi(rng: np.random.Generator, upto: int) -> Callable[[int], float]:
    table = np.exp(rng.normal(0, 1, size=upto + 1))
    return lambda n: float(table[n])


def random_nondecreasing_psi(rng: np.random.Generator, upto: int) -> Callable[[int], float]:
    table = np.cumsum(rng.exponential(0.3, size=upto + 1)) + 0.1
    return lambda n: float(table[n])


def _c1(rng):
    K = random_set(rng, 1, 60, 10)
    return bounds.bound_theorem_c1(random_fourier(rng), K, random_coefs(rng, K))


def _t1(rng):
    K = random_set(rng, 1, 60, 10)
    kind = rng.choice(["theta", "one", "d", "random"])
    psi = random_positive_psi(rng, max(K)) if kind == "random" else bounds.psi_by_name(str(kind))
    return bounds.bound_theorem_t1(random_fourier(rng), K, random_coefs(rng, K), psi, str(kind))


def _p1_general(rng):
    K = random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.05, 1.5))
    tau = float(rng.uniform(0, 2 * s))
    psi1 = random_nondecreasing_psi(rng, max(K))
    return bounds.bound_theorem_p1(K, random_coefs(rng, K), s, tau, preset="general", psi1=psi1)


def _p1_i(rng):
    K = random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.05, 1.5))
    tau = float(rng.uniform(0, 2 * s))
    return bounds.bound_theorem_p1(K, random_coefs(rng, K), s, tau, preset="i")


def _p1_ii(rng):
    K = random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.05, 1.5))
    return bounds.bound_theorem_p1(K, random_coefs(rng, K), s, preset="ii")


def _p1_iii(rng):
    K = random_set(rng, 3, 100, 12)
    return bounds.bound_theorem_p1(K, random_coefs(rng, K), 1.0, 1.0, preset="iii")


def _p1_r1(rng):
    K = random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.51, 1.5))
    eps = float(rng.uniform(0, 2 * s - 1)) or 2 * s - 1
    return bounds.bound_theorem_p1(K, random_coefs(rng, K), s, preset="r1", eps=eps)


def _eq61(rng):
    K = random_set(rng, 1, 100, 12)
    s = 0.5 if rng.random() < 0.1 else float(rng.uniform(0.5, 1.0))
    return bounds.bound_eq61(K, random_coefs(rng, K), s)


def _wqe(rng):
    K = random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.05, 1.5))
    return bounds.bound_wqe(K, random_coefs(rng, K), s)


def _strengthened(rng):
    K = antichain_set(rng, 10) if rng.random() < 0.5 else random_set(rng, 1, 100, 12)
    s = float(rng.uniform(0.51, 1.5))
    tau = float(rng.uniform(0, 2 * s))
    return bounds.bound_strengthened(K, random_coefs(rng, K, nonneg=True), s, tau)


def _gershgorin(rng):
    K = random_set(rng, 1, 100, 32)
    s = float(rng.uniform(0.51, 1.0))
    return bounds.gershgorin_as_bound(K, s)


def _hooley(rng):
    r = int(rng.integers(1, 5))
    lo, hi = int(np.floor(np.exp(r))) + 1, int(np.floor(np.exp(r + 1)))
    K = random_set(rng, lo, hi, 10)
    return bounds.bound_hooley(random_fourier(rng), K, random_coefs(rng, K))


EVALUATORS: dict[str, Runner] = {
    "c1": _c1,
    "t1": _t1,
    "p1_general": _p1_general,
    "p1_i": _p1_i,
    "p1_ii": _p1_ii,
    "p1_iii": _p1_iii,
    "p1_r1": _p1_r1,
    "eq61": _eq61,
    "wqe": _wqe,
    "t1a1": _strengthened,
    "gershgorin": _gershgorin,
    "hooley": _hooley,
}


def sweep(name: str, cases: int, seed: int) -> list[bounds.BoundReport]:
    if name not in EVALUATORS:
        raise KeyError(f"unknown evaluator {name!r}; choose from {sorted(EVALUATORS)}")
    # one child stream per evaluator keeps campaigns independent of evaluation order
    key = sum(ord(ch) * 31**i for i, ch in enumerate(name)) % (2**32)
    rng = np.random.default_rng([seed, key])
    return [EVALUATORS[name](rng) for _ in range(cases)]


def summarize(reports: list[bounds.BoundReport]) -> dict:
    failed = [r for r in reports if not r.satisfied]
    worst = max(reports, key=lambda r: r.ratio)
    return {
        "cases": len(reports),
        "satisfied": len(reports) - len(failed),
        "failed": len(failed),
        "max_ratio": worst.ratio,
        "worst_params": worst.params,
        "all_satisfied": not failed,
    }
