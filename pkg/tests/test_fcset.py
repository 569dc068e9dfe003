import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcdsum.errors import DomainError
from gcdsum.fcset import IndexSet, divisor_set, f_prime, fc_closure, kstar, varpi

sets = st.sets(st.integers(1, 400), min_size=1, max_size=12)


def bf_closure(K):
    return sorted({d for k in K for d in range(1, k + 1) if k % d == 0})


@pytest.mark.parametrize("bad", [[], [0, 1], [1, 1], [-2]])
def test_index_set_rejects(bad):
    with pytest.raises(DomainError):
        IndexSet(bad)


def test_index_set_sorted_and_flags():
    K = IndexSet([6, 1, 3, 2])
    assert K.to_list() == [1, 2, 3, 6]
    assert K.is_fc and K.min == 1 and K.max == 6
    assert 3 in K and 4 not in K
    assert not IndexSet([2, 4]).is_fc


@pytest.mark.parametrize(
    "K, closure, fprime, ks, w",
    [
        ([4, 6], [1, 2, 3, 4, 6], [2, 3, 4, 6], [], 3),
        ([1, 2], [1, 2], [2], [2], 2),
        ([2, 3, 6], [1, 2, 3, 6], [2, 3, 6], [6], 3),
        ([7], [1, 7], [7], [], 1),
        ([6, 7, 9], [1, 2, 3, 6, 7, 9], [2, 3, 6, 7, 9], [], 9),
    ],
)
def test_examples(K, closure, fprime, ks, w):
    assert fc_closure(K).to_list() == closure
    assert list(f_prime(K)) == fprime
    assert list(kstar(K)) == ks
    assert varpi(K) == Fraction(w)


@given(sets)
def test_closure_oracle_and_idempotence(K):
    F = fc_closure(K)
    assert F.to_list() == bf_closure(K)
    assert F.is_fc
    assert fc_closure(F) == F
    assert set(K) <= set(F)


@given(sets, sets)
def test_closure_monotone(A, B):
    assert set(fc_closure(A)) <= set(fc_closure(A | B))


@given(sets)
def test_is_fc_iff_closed(K):
    assert IndexSet(K).is_fc == (sorted(K) == bf_closure(K))


@given(sets)
def test_kstar_oracle(K):
    want = sorted(l for l in K if any(k < l and l % k == 0 for k in K))
    assert list(kstar(K)) == want


@given(sets)
def test_varpi_oracle(K):
    want = max([max(k, l) // math.gcd(k, l) for k, l in combinations(K, 2)], default=1)
    assert varpi(K) == want


@given(st.integers(1, 5000))
def test_divisor_set_varpi_is_nu(nu):
    assert divisor_set(nu).is_fc
    assert varpi(divisor_set(nu)) == nu
