"""Invariant suites behind `gcdsum verify`.

Each check returns a plain dict {id, module, passed, cases, detail}; the list of
ids doubles as the coverage manifest. Everything is driven by one seed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from gcdsum import arith, bounds, dilated, fcset, gcdform, sweeps, zeta

Check = Callable[[np.random.Generator, int], dict]

MEANVALUE_PAIRS = ((1, 1), (2, 1), (3, 2))
MEANVALUE_SIGMAS = (0.75, 1.0)
MEANVALUE_LADDER = (50.0, 100.0, 200.0)


def _rec(cid: str, module: str, passed: bool, cases: int, **detail) -> dict:
    return {"id": cid, "module": module, "passed": bool(passed), "cases": int(cases), "detail": detail}


def _coprime_pairs(rng: np.random.Generator, count: int, hi: int = 10**5) -> list[tuple[int, int]]:
    out = []
    while len(out) < count:
        m, n = (int(v) for v in rng.integers(1, hi + 1, size=2))
        if m * n <= arith.configured_sieve_bound() and math.gcd(m, n) == 1:
            out.append((m, n))
    return out


# arith


def check_multiplicative(rng, cases):
    pairs = _coprime_pairs(rng, 10 * cases, hi=3000)
    exact = {name: arith.is_multiplicative_on(f, pairs) for name, f in arith.MULTIPLICATIVE.items()}
    u = float(rng.uniform(-2, 2))
    real = {
        "sigma_u": arith.is_multiplicative_on(lambda n: arith.divisor_sigma(u, n), pairs, rel=1e-12),
        "jordan": arith.is_multiplicative_on(lambda n: arith.jordan_totient(u + 2.5, n), pairs, rel=1e-12),
    }
    return _rec("arith.multiplicative", "arith", all(exact.values()) and all(real.values()), len(pairs), **exact, **real)


def check_sigma_reflection(rng, cases):
    worst = 0.0
    for _ in range(10 * cases):
        a = float(rng.uniform(-3, 3))
        n = int(rng.integers(1, 10**6))
        lhs = arith.divisor_sigma(-a, n)
        rhs = n ** (-a) * arith.divisor_sigma(a, n)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return _rec("arith.sigma_reflection", "arith", worst <= 1e-12, 10 * cases, max_rel_err=worst)


def check_mobius_delta(rng, cases, N: int = 10**5):
    mu = np.array([0] + [arith.mobius(n) for n in range(1, N + 1)], dtype=np.int64)
    acc = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        if mu[d]:
            acc[d::d] += mu[d]
    expect = np.zeros(N + 1, dtype=np.int64)
    expect[1] = 1
    bad = np.flatnonzero(acc[1:] != expect[1:]) + 1
    return _rec("arith.mobius_delta", "arith", bad.size == 0, N, first_bad=bad[:5].tolist())


def check_theta_dk2(rng, cases, N: int = 10**5):
    theta = np.array([0] + [arith.theta_sqfree(n) for n in range(1, N + 1)], dtype=np.int64)
    acc = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        acc[d::d] += theta[d]
    dk2 = np.array([0] + [arith.divisor_count_square(n) for n in range(1, N + 1)], dtype=np.int64)
    bad = np.flatnonzero(acc[1:] != dk2[1:]) + 1
    return _rec("arith.theta_dk2", "arith", bad.size == 0, N, first_bad=bad[:5].tolist())


def check_jordan_sigma(rng, cases):
    worst = 0.0
    for _ in range(10 * cases):
        s = float(rng.uniform(0.05, 2.0))
        tau = float(rng.uniform(-1.0, 3.0))
        nu = int(rng.integers(1, 10**4 + 1))
        lhs = arith.dirichlet_convolve(
            lambda d: arith.jordan_totient(2 * s, d), lambda d: arith.divisor_sigma(tau, d), nu
        )
        rhs = nu**tau * arith.divisor_sigma(2 * s - tau, nu)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return _rec("arith.jordan_sigma_convolution", "arith", worst <= 1e-9, 10 * cases, max_rel_err=worst)


def check_sigma_phi(rng, cases, N: int = 10**5):
    sig = arith.sigma_table(1.0, N)
    bad = [n for n in range(1, N + 1) if not sig[n] * arith.euler_phi(n) > 6 * n * n / math.pi**2]
    return _rec("arith.sigma_phi_lower", "arith", not bad, N, first_bad=bad[:5])


# fcset


def check_fcset(rng, cases):
    ok_idem = ok_mono = ok_fc = ok_kstar = ok_varpi = True
    for _ in range(cases):
        K = sweeps.random_set(rng, 1, 300, 8)
        L = sorted(set(K) | set(sweeps.random_set(rng, 1, 300, 4)))
        F = fcset.fc_closure(K)
        ok_idem &= fcset.fc_closure(F) == F
        ok_mono &= set(F) <= set(fcset.fc_closure(L))
        ok_fc &= fcset.IndexSet(K).is_fc == (F.to_list() == K)
        ok_kstar &= set(fcset.kstar(K)) <= set(K)
        primes = [p for p in (2, 3, 5, 7, 11, 13, 17, 19, 23) if rng.random() < 0.5] or [29]
        ok_kstar &= fcset.kstar(primes) == ()
        nu = int(rng.integers(2, 10**5))
        ok_varpi &= fcset.varpi(fcset.divisor_set(nu)) == nu
    return _rec(
        "fcset.properties", "fcset", ok_idem and ok_mono and ok_fc and ok_kstar and ok_varpi, cases,
        idempotent=ok_idem, monotone=ok_mono, is_fc_iff_closed=ok_fc, kstar=ok_kstar, varpi_divisor_set=ok_varpi,
    )  # fmt: skip


# gcdform


def diag_case(rng: np.random.Generator):
    K = sweeps.random_set(rng, 1, 200, 64)
    s = float(rng.choice([0.6, 0.75, 1.0]))
    c = sweeps.random_coefs(rng, K)
    return K, s, c


def check_diagonalization(rng, cases):
    worst = 0.0
    neg = False
    for _ in range(cases):
        K, s, c = diag_case(rng)
        spec = gcdform.GcdFormSpec(K, s)
        direct = gcdform.quadratic_form_direct(spec, c)
        diag = gcdform.cesaro_diagonalize(spec, c).value
        worst = max(worst, abs(direct - diag) / max(abs(direct), 1e-300))
        neg |= diag < 0
    return _rec("gcdform.diagonalization_oracle", "gcdform", worst <= 1e-10 and not neg, cases,
                max_rel_err=worst, psd_violation=neg)  # fmt: skip


def random_factorization(rng: np.random.Generator, n: int) -> gcdform.MoebiusFactorization:
    dsq = tuple(Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50))) for _ in range(n))
    theta = tuple(
        Fraction(int(rng.integers(1, 50)) * int(rng.choice([-1, 1])), int(rng.integers(1, 50))) for _ in range(n)
    )
    return gcdform.MoebiusFactorization(n, dsq, theta)


def check_factorization(rng, cases):
    results = []
    for n in (1, 6, 16, int(rng.integers(2, 65)), 64):
        results.append(gcdform.moebius_factorization_check(random_factorization(rng, n)).passed)
    hand = gcdform.MoebiusFactorization(
        6, tuple(Fraction(round(arith.jordan_totient(2, i))) for i in range(1, 7)), tuple(Fraction(1, i) for i in range(1, 7))
    )
    idx = np.arange(1, 7)
    gcd_matrix = np.gcd.outer(idx, idx) ** 2 / np.outer(idx, idx)
    hand_ok = gcdform.moebius_factorization_check(hand).passed and np.allclose(hand.target(), gcd_matrix, rtol=1e-14)
    floats = gcdform.MoebiusFactorization.from_delta(rng.uniform(0.5, 2, 24).tolist(), rng.uniform(0.5, 2, 24).tolist())
    float_ok = gcdform.moebius_factorization_check(floats).passed
    return _rec("gcdform.moebius_factorization", "gcdform", all(results) and hand_ok and float_ok, len(results) + 2,
                exact_cases=results, hand_case=hand_ok, float_path=float_ok)  # fmt: skip


def check_divisor_sum_identity(rng, cases):
    worst = 0.0
    count = max(5, cases // 5)
    for _ in range(count):
        N = int(rng.integers(1, 201))
        s = float(rng.uniform(0.1, 2.0))
        a = {m: float(rng.uniform(-1, 1)) for m in range(1, N + 1) if rng.random() < 0.5} or {1: 1.0}
        lhs, rhs = gcdform.hilberdink_identity(a, N, s)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1e-300))
    hand = gcdform.hilberdink_identity({1: 1.0, 2: 1.0}, 2, 1.0)
    ok = worst <= 1e-10 and abs(hand[0] - 3.25) < 1e-12 and abs(hand[1] - 3.25) < 1e-12
    return _rec("gcdform.divisor_sum_identity", "gcdform", ok, count, max_rel_err=worst, hand_case=list(hand))


def mc_case(rng: np.random.Generator):
    K = sweeps.random_set(rng, 1, 60, 6)
    s = float(rng.uniform(0.3, 1.5))
    return K, s, sweeps.random_coefs(rng, K)


def check_monte_carlo(rng, cases, runs: int = 20, samples: int = 20000):
    within = 0
    for _ in range(runs):
        K, s, c = mc_case(rng)
        spec = gcdform.GcdFormSpec(K, s)
        est = gcdform.cauchy_mc_estimate(spec, c, samples, int(rng.integers(0, 2**32)))
        oracle = gcdform.quadratic_form_direct(spec, c)
        within += abs(est.estimate - oracle) <= 4 * est.stderr
    return _rec("gcdform.cauchy_monte_carlo", "gcdform", within >= runs - 1, runs, within_4_stderr=within)


# bounds


def check_bound_sweeps(rng, cases, seed: int):
    out = []
    for name in sweeps.EVALUATORS:
        summary = sweeps.summarize(sweeps.sweep(name, cases, seed))
        ok = summary.pop("all_satisfied")
        out.append(_rec(f"bounds.sweep.{name}", "bounds", ok, summary.pop("cases"), **summary))
    return out


def check_t1_theta_relation(rng, cases):
    ok = True
    for _ in range(cases):
        K = sweeps.random_set(rng, 1, 60, 10)
        a = sweeps.random_fourier(rng)
        rep = bounds.bound_theorem_t1(a, K, sweeps.random_coefs(rng, K), arith.theta_sqfree, "theta")
        ok &= rep.details["B"] <= rep.details["sum_a2_d"] * (1 + 1e-12)
    return _rec("bounds.t1_theta_B_le_sum_a2_d", "bounds", ok, cases)


# zeta


def envelope_grid() -> list[tuple[float, float]]:
    sig = np.linspace(0.6, 2.0, 10)
    ts = np.geomspace(1.0, 100.0, 10)
    return [(float(a), float(t)) for a in sig for t in ts]


def truncation_envelope() -> float:
    worst = 0.0
    for s, t in envelope_grid():
        err = abs(zeta.zeta_truncated(s, t, t) - zeta.zeta_reference(s, t))
        worst = max(worst, err * t**s)
    return worst


def check_zeta_basics(rng, cases):
    env = truncation_envelope()
    z2 = abs(zeta.zeta_reference(2, 0) - math.pi**2 / 6)
    conj = 0.0
    for _ in range(cases):
        s = float(rng.uniform(0.2, 3))
        t = float(rng.uniform(-500, 500))
        conj = max(conj, abs(zeta.zeta_reference(s, -t) - zeta.zeta_reference(s, t).conjugate()))
    ok = env <= 10 and env <= zeta.TRUNCATION_ENVELOPE and z2 <= 1e-10 and conj <= 1e-12
    return _rec("zeta.reference_and_envelope", "zeta", ok, 100 + cases, envelope=env, zeta2_err=z2, conjugate_err=conj)


def check_meanvalue(rng, cases):
    out = []
    for sigma in MEANVALUE_SIGMAS:
        for k, l in MEANVALUE_PAIRS:
            reps, dec = zeta.meanvalue_ladder(sigma, k, l, MEANVALUE_LADDER)
            out.append(_rec(f"zeta.meanvalue_ladder.s{sigma}.k{k}.l{l}", "zeta", dec, len(reps),
                            ratios=[r.ratio for r in reps], residuals=[r.residual for r in reps]))  # fmt: skip
    return out


def omega_direct(nu: int, sigma: float, eps: float) -> float:
    """lb_factor by nested divisor loops, independent of the library's sigma routine."""
    num = 0.0
    for n in range(1, nu + 1):
        if nu % n:
            continue
        inner = sum(d ** (-sigma + eps) for d in range(1, n + 1) if n % d == 0)
        num += inner**2 / n ** (2 * eps)
    den = sum(d ** (-2 * eps) for d in range(1, nu + 1) if nu % d == 0)
    return math.sqrt(num / den)


def check_omega_paths(rng, cases):
    worst = 0.0
    for _ in range(cases):
        nu = int(rng.integers(2, 2000))
        sigma = float(rng.uniform(0.55, 1.5))
        lib0 = math.sqrt(zeta.omega_divisor_sum(nu, sigma, 0.0) / arith.divisor_count(nu))
        worst = max(worst, abs(lib0 - omega_direct(nu, sigma, 0.0)) / lib0)
    return _rec("zeta.omega_lb_paths", "zeta", worst <= 1e-12, cases, max_rel_err=worst)


# dilated


def check_dilated(rng, cases):
    env = 0.0
    for k, l in ((1, 1), (2, 4), (3, 5), (6, 4)):
        for M in (100, 1000, 10000):
            g = dilated.gram_inner_product_numeric(1.0, k, l, M, 4 * M * max(k, l))
            env = max(env, abs(g.truncated_exact - g.closed_form) * M)
    worst_norm = 0.0
    for _ in range(min(cases, 8)):
        K = sweeps.random_set(rng, 1, 24, 8)
        c = sweeps.random_coefs(rng, K)
        a = dilated.norm_via_gram(K, c, 1.0)
        b = dilated.norm_quadrature(K, c, 1.0, 10**4, 2**14)
        worst_norm = max(worst_norm, abs(a - b) / a)
    fn = dilated.DilatedFunction(float(rng.uniform(0.6, 2)), 2000)
    xs = rng.uniform(0, 1, size=200)
    anti = float(np.max(np.abs(dilated.eval_fs(fn, 1 - xs) + dilated.eval_fs(fn, xs))))
    ok = env <= 1.0 and worst_norm <= 1e-3 and anti <= 1e-12
    return _rec("dilated.gram_structure", "dilated", ok, cases,
                truncation_envelope=env, norm_rel_err=worst_norm, antisymmetry_err=anti)  # fmt: skip


def run_all(cases: int, seed: int) -> list[dict]:
    base = np.random.SeedSequence(seed)
    streams = iter(np.random.Generator(np.random.PCG64(ss)) for ss in base.spawn(32))
    results: list[dict] = []
    for check in (check_multiplicative, check_sigma_reflection, check_mobius_delta, check_theta_dk2,
                  check_jordan_sigma, check_sigma_phi, check_fcset, check_diagonalization,
                  check_factorization, check_divisor_sum_identity, check_monte_carlo, check_t1_theta_relation,
                  check_zeta_basics, check_omega_paths, check_dilated):  # fmt: skip
        results.append(check(next(streams), cases))
    results.extend(check_bound_sweeps(next(streams), cases, seed))
    results.extend(check_meanvalue(next(streams), cases))
    return results


COVERAGE = {
    "arith": [
        "multiplicativity on coprime pairs",
        "sigma_{-a}(n) = n^{-a} sigma_a(n)",
        "zeta_0 * mu = delta for n <= 1e5",
        "sum_{d|k} theta(d) = d(k^2) for k <= 1e5",
        "J_{2s} * sigma_tau = nu^tau sigma_{2s-tau}",
        "sigma(n) phi(n) > 6 n^2 / pi^2 for n <= 1e5",
    ],
    "fcset": ["closure idempotent and monotone", "is_fc iff closure fixes K", "kstar subset, coprime empty",
              "varpi(divisor_set(nu)) = nu"],  # fmt: skip
    "gcdform": ["diagonalization = direct", "positive semidefinite", "T-check T = I and T^T T = A",
                "divisor-sum identity lhs = rhs", "Monte-Carlo within 4 stderr"],  # fmt: skip
    "bounds": ["every evaluator satisfied on random sweeps", "Gershgorin containment", "eigen trace and det",
               "B <= sum a_m^2 d(m) for psi = theta"],  # fmt: skip
    "zeta": ["truncation envelope <= calibrated constant", "zeta(2) and conjugate symmetry",
             "mean-value residual ratio decreasing", "omega lb_factor two-path agreement"],  # fmt: skip
    "dilated": ["truncated inner product envelope", "norm via Gram = quadrature", "antisymmetry"],
    "cli": ["byte-identical reports for equal seeds (checked by comparing two runs)"],
}
