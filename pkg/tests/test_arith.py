import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcdsum import arith
from gcdsum.errors import DomainError, RangeError


# brute-force oracles, independent of the sieve


def bf_divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def bf_factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def bf_mobius(n):
    f = bf_factor(n)
    return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)


def bf_hooley(n):
    ds = bf_divisors(n)
    # the maximum over u is attained with u just below a divisor
    return max(sum(1 for e in ds if d <= e < math.e * d) for d in ds)


ns = st.integers(min_value=1, max_value=5000)


@pytest.mark.parametrize(
    "n, expected",
    [(1, ()), (2, ((2, 1),)), (12, ((2, 2), (3, 1))), (97, ((97, 1),)), (360, ((2, 3), (3, 2), (5, 1)))],
)
def test_factorize_small(n, expected):
    assert tuple(arith.factorize(n)) == expected


def test_factorize_beyond_sieve_uses_trial_division():
    n = 999983 * 1000003
    assert tuple(arith.factorize(n)) == ((999983, 1), (1000003, 1))


@pytest.mark.parametrize("n", [0, -3, arith.MAX_FACTOR_N + 1])
def test_factorize_range(n):
    with pytest.raises(RangeError):
        arith.factorize(n)


@given(ns)
def test_divisors_match_oracle(n):
    assert arith.divisors(n) == bf_divisors(n)


@given(ns)
def test_mobius_and_counts(n):
    f = bf_factor(n)
    assert arith.mobius(n) == bf_mobius(n)
    assert arith.omega(n) == len(f)
    assert arith.divisor_count(n) == len(bf_divisors(n))
    assert arith.divisor_count_square(n) == len(bf_divisors(n * n))
    assert arith.theta_sqfree(n) == 2 ** len(f)
    assert arith.euler_phi(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


@given(ns, st.floats(min_value=-3, max_value=3, allow_nan=False))
def test_divisor_sigma_oracle(n, u):
    want = math.fsum(d**u for d in bf_divisors(n))
    assert arith.divisor_sigma(u, n) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("u, n, expected", [(-1, 6, 2.0), (0, 12, 6.0), (1, 28, 56.0), (2, 4, 21.0)])
def test_divisor_sigma_examples(u, n, expected):
    assert arith.divisor_sigma(u, n) == pytest.approx(expected, rel=1e-15)


@given(ns, st.floats(min_value=0.1, max_value=3))
def test_jordan_totient_counts_via_mobius(n, s):
    want = math.fsum(bf_mobius(d) * (n // d) ** s for d in bf_divisors(n))
    assert arith.jordan_totient(s, n) == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_jordan_totient_is_phi_at_one():
    for n in range(1, 300):
        assert arith.jordan_totient(1, n) == pytest.approx(arith.euler_phi(n))


@given(st.integers(min_value=1, max_value=3000))
def test_hooley_delta_oracle(n):
    assert arith.hooley_delta(n) == bf_hooley(n)


@pytest.mark.parametrize("n, expected", [(1, 1), (2, 2), (6, 2), (12, 3), (60, 4)])
def test_hooley_delta_examples(n, expected):
    assert arith.hooley_delta(n) == expected == bf_hooley(n)


def test_loglog_floor():
    assert arith.loglog(1.0) == pytest.approx(1.0)
    assert arith.loglog(1e6) == pytest.approx(math.log(math.log(1e6)))


def test_sigma_table_matches_pointwise():
    tab = arith.sigma_table(0.5, 400)
    for n in range(1, 401):
        assert tab[n] == pytest.approx(arith.divisor_sigma(0.5, n), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 30, 64, 97, 360])
def test_convolution_identities(n):
    one = arith.zeta_power(0.0)
    assert arith.dirichlet_convolve(one, arith.mobius, n) == arith.delta(n)
    assert arith.dirichlet_convolve(one, arith.euler_phi, n) == n
    assert arith.dirichlet_convolve(one, arith.theta_sqfree, n) == arith.divisor_count_square(n)


@given(st.integers(1, 2000), st.floats(0.2, 2.5), st.floats(0.0, 2.0))
def test_jordan_sigma_convolution(nu, s, tau):
    lhs = arith.dirichlet_convolve(lambda n: arith.jordan_totient(2 * s, n), lambda n: arith.divisor_sigma(tau, n), nu)
    rhs = nu**tau * arith.divisor_sigma(2 * s - tau, nu)
    assert lhs == pytest.approx(rhs, rel=1e-9)


@given(st.integers(1, 10**4), st.floats(-2, 2))
def test_sigma_reflection(n, u):
    assert arith.divisor_sigma(-u, n) == pytest.approx(n ** (-u) * arith.divisor_sigma(u, n), rel=1e-12)


@given(st.integers(1, 10**4))
def test_sigma_phi_lower_bound(n):
    assert arith.divisor_sigma(1, n) * arith.euler_phi(n) >= 6 / math.pi**2 * n * n - 1e-9


@settings(max_examples=60)
@given(st.integers(1, 300), st.integers(1, 300))
def test_multiplicativity(m, n):
    if math.gcd(m, n) != 1:
        return
    for name, f in arith.MULTIPLICATIVE.items():
        assert f(m * n) == f(m) * f(n), name


def test_is_multiplicative_on_detects_failure():
    pairs = [(2, 3), (4, 9), (5, 7)]
    assert arith.is_multiplicative_on(arith.mobius, pairs)
    assert not arith.is_multiplicative_on(lambda n: n + 1, pairs)


def test_extremal_scan_records_are_running_maxima():
    recs = arith.extremal_scan(2000, "sigma_over_nloglogn")
    vals = [v for _, v in recs]
    assert vals == sorted(vals) and len(set(vals)) == len(vals)
    brute = max(arith.divisor_sigma(1, n) / (n * math.log(math.log(max(n, math.e**math.e)))) for n in range(3, 2001))
    assert vals[-1] == pytest.approx(brute, rel=1e-12)


def test_extremal_scan_validates_statistic():
    with pytest.raises(DomainError):
        arith.extremal_scan(100, "nope")


def test_sieve_bound_override(monkeypatch):
    old = arith.configured_sieve_bound()
    try:
        arith.set_sieve_bound(1000)
        assert arith.get_sieve().bound == 1000
        # beyond the small table the trial-division path takes over
        assert tuple(arith.factorize(1009 * 1013)) == ((1009, 1), (1013, 1))
    finally:
        arith.set_sieve_bound(old)


def test_sieve_spf_table():
    sv = arith.Sieve(100)
    spf = sv.spf_table()
    for n in range(2, 101):
        assert spf[n] == min(p for p in bf_factor(n))
