import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from greedy_cs import (Dictionary, coherence_profile, global_2_coherence,
                       global_2_coherence_brute, lemma1_chain, mutual_coherence,
                       normalize_columns, nu_sequence, ric_bounds, ric_exact,
                       ric_gershgorin_upper)
from greedy_cs.errors import BudgetExceeded, OrderOutOfRange

from conftest import INV_SQRT2


def gaussian_dict(seed, n, d):
    return normalize_columns(np.random.default_rng(seed).standard_normal((n, d)))


def ric_svd_oracle(phi, k):
    """delta_k from singular values of every column subset of size <= k."""
    best = 0.0
    for size in range(1, k + 1):
        for sub in itertools.combinations(range(phi.d), size):
            s = np.linalg.svd(phi.sub(sub), compute_uv=False)
            full = np.zeros(size)
            full[:s.size] = s
            best = max(best, full[0] ** 2 - 1, 1 - full[-1] ** 2)
    return best


def nu_loop_oracle(phi, k):
    g = phi.matrix.T @ phi.matrix
    best = 0.0
    for i in range(phi.d):
        others = [j for j in range(phi.d) if j != i]
        for size in range(1, k + 1):
            for sub in itertools.combinations(others, size):
                best = max(best, math.sqrt(sum(g[i, j] ** 2 for j in sub)))
    return best


# --- mutual coherence

def test_mutual_coherence_examples(phi_ex):
    assert mutual_coherence(Dictionary(np.eye(4))) == 0.0
    assert mutual_coherence(Dictionary(np.eye(3)[:, [0, 1, 1]])) == 1.0
    assert mutual_coherence(phi_ex) == pytest.approx(INV_SQRT2, abs=1e-15)


def test_mutual_coherence_against_pairs():
    phi = gaussian_dict(1, 5, 9)
    ref = max(abs(phi.atom(i) @ phi.atom(j))
              for i, j in itertools.combinations(range(9), 2))
    assert mutual_coherence(phi) == pytest.approx(ref, abs=1e-15)


# --- global 2-coherence

def test_nu_examples(phi_ex):
    for k in (1, 2, 3):
        assert global_2_coherence(Dictionary(np.eye(4)), k) == 0.0
    assert global_2_coherence(phi_ex, 1) == pytest.approx(INV_SQRT2, abs=1e-15)
    assert global_2_coherence(phi_ex, 2) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(OrderOutOfRange):
        global_2_coherence(phi_ex, 0)
    with pytest.raises(OrderOutOfRange):
        global_2_coherence(phi_ex, 3)


def test_nu_brute_examples(phi_ex):
    for method in ("direct", "gram"):
        assert global_2_coherence_brute(phi_ex, 2, method) == pytest.approx(1.0, abs=1e-12)
        assert global_2_coherence_brute(Dictionary(np.eye(3)), 2, method) == 0.0
    phi = gaussian_dict(5, 4, 6)
    fast = global_2_coherence(phi, 3)
    assert abs(global_2_coherence_brute(phi, 3) - fast) <= 1e-12
    assert abs(global_2_coherence_brute(phi, 3, "gram") - fast) <= 1e-12
    assert abs(nu_loop_oracle(phi, 3) - fast) <= 1e-12


def test_nu_brute_budget():
    phi = gaussian_dict(0, 10, 30)
    with pytest.raises(BudgetExceeded) as exc:
        global_2_coherence_brute(phi, 6, budget=1000)
    assert exc.value.count > 1000


def test_nu1_equals_mutual_coherence():
    for seed in range(50):
        phi = gaussian_dict(seed, 5, 9)
        assert abs(global_2_coherence(phi, 1) - mutual_coherence(phi)) <= 1e-15


def test_nu_sequence_matches_single_calls():
    phi = gaussian_dict(7, 6, 11)
    seq = nu_sequence(phi)
    assert set(seq) == set(range(1, 11))
    for k, v in seq.items():
        assert abs(v - global_2_coherence(phi, k)) <= 1e-15


@given(st.integers(0, 100_000), st.integers(3, 8), st.integers(0, 4))
def test_nu_monotone_property(seed, n, extra):
    phi = gaussian_dict(seed, n, n + extra)
    seq = nu_sequence(phi)
    for k in range(1, phi.d - 1):
        assert seq[k] <= seq[k + 1]
        assert seq[k + 1] / math.sqrt(k + 1) <= seq[k] / math.sqrt(k) + 1e-12


# --- restricted isometry constant

def test_ric_examples(phi_ex):
    for k in (1, 2, 3, 4):
        assert ric_exact(Dictionary(np.eye(4)), k) == 0.0
    # 2x2 Gram eigenvalues 1 +- 1/sqrt(2)
    assert ric_exact(phi_ex, 2) == pytest.approx(INV_SQRT2, abs=1e-12)
    # full Gram eigenvalues {0, 1, 2}
    assert ric_exact(phi_ex, 3) == pytest.approx(1.0, abs=1e-12)
    _, worst = ric_exact(phi_ex, 2, return_support=True)
    assert worst in {(0, 2), (1, 2)}


def test_ric_against_svd_oracle():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 7))
        d = int(rng.integers(n + 1, n + 5))
        phi = gaussian_dict(seed, n, d)
        for k in range(1, min(d, 4) + 1):
            assert abs(ric_exact(phi, k) - ric_svd_oracle(phi, k)) <= 1e-12


def test_ric_contains_sampled_ratios():
    phi = gaussian_dict(11, 6, 10)
    rng = np.random.default_rng(0)
    for k in (2, 3):
        delta = ric_exact(phi, k)
        for _ in range(500):
            sub = rng.choice(10, size=k, replace=False)
            a = rng.standard_normal(k)
            ratio = np.sum((phi.sub(sub) @ a) ** 2) / np.sum(a ** 2)
            assert 1 - delta - 1e-12 <= ratio <= 1 + delta + 1e-12


def test_ric_budget_and_range(phi_ex):
    phi = gaussian_dict(0, 10, 40)
    with pytest.raises(BudgetExceeded):
        ric_exact(phi, 8)
    with pytest.raises(OrderOutOfRange):
        ric_exact(phi_ex, 4)
    with pytest.raises(OrderOutOfRange):
        ric_exact(phi_ex, 0)


def test_ric_monotone_in_k():
    for seed in range(30):
        phi = gaussian_dict(seed, 5, 9)
        deltas = [ric_exact(phi, k) for k in range(1, 7)]
        assert all(a <= b + 1e-12 for a, b in zip(deltas, deltas[1:]))


# --- Gershgorin

def test_gershgorin_examples(phi_ex):
    assert ric_gershgorin_upper(Dictionary(np.eye(4)), 3) == 0.0
    assert ric_gershgorin_upper(phi_ex, 2) == pytest.approx(INV_SQRT2, abs=1e-15)
    assert ric_gershgorin_upper(phi_ex, 3) == pytest.approx(math.sqrt(2), abs=1e-15)
    with pytest.raises(OrderOutOfRange):
        ric_gershgorin_upper(phi_ex, 1)


def test_gershgorin_fast_equals_brute_and_bounds_ric():
    for seed in range(30):
        phi = gaussian_dict(seed, 6, 10)
        for k in range(2, 6):
            fast = ric_gershgorin_upper(phi, k)
            assert abs(fast - ric_gershgorin_upper(phi, k, brute=True)) <= 1e-12
            assert fast >= ric_exact(phi, k) - 1e-9


def test_ric_bounds_bracket_exact():
    for seed in range(30):
        phi = gaussian_dict(seed, 6, 10)
        for k in range(1, 6):
            lo, hi = ric_bounds(phi, k)
            delta = ric_exact(phi, k)
            assert lo - 1e-9 <= delta <= hi + 1e-9


# --- Lemma 1 chain and profile

def test_chain_examples(phi_ex):
    rep = lemma1_chain(Dictionary(np.eye(4)), 2)
    assert rep.values == (0, 0, 0, 0, 0) and rep.holds
    rep = lemma1_chain(phi_ex, 2)
    np.testing.assert_allclose(rep.values, [INV_SQRT2] * 5, atol=1e-12)
    assert rep.holds
    assert set(rep.to_dict()) == {"k", "M", "nu_km1", "delta_k", "sqrt_bound",
                                  "M_bound", "holds"}
    with pytest.raises(OrderOutOfRange):
        lemma1_chain(phi_ex, 1)


def test_chain_detects_violation_with_negative_slack(phi_ex):
    # equality throughout, so any negative slack must flag it
    assert not lemma1_chain(phi_ex, 2, slack=-1e-6).holds


def test_chain_random_6x10_k3():
    for seed in range(100):
        assert lemma1_chain(gaussian_dict(seed, 6, 10), 3).holds


def test_coherence_profile_invariants():
    phi = gaussian_dict(3, 6, 9)
    prof = coherence_profile(phi, k_max=5)
    assert prof.M == mutual_coherence(phi)
    assert abs(prof.nu[1] - prof.M) <= 1e-15
    for k, delta in prof.delta_exact.items():
        if k >= 2:
            assert prof.delta_lower[k] <= delta + 1e-9
            assert delta <= prof.delta_upper_nu[k] + 1e-9
            assert prof.delta_upper_nu[k] <= prof.delta_upper_M[k] + 1e-9
            assert delta <= prof.gershgorin_radius_max[k] + 1e-9
        lo, hi = prof.delta_interval(k)
        assert lo == hi == delta


def test_profile_falls_back_to_bounds():
    phi = gaussian_dict(4, 8, 20)
    prof = coherence_profile(phi, k_max=5, budget=1000)
    assert 5 not in prof.delta_exact
    lo, hi = prof.delta_interval(5)
    assert lo <= ric_exact(phi, 5) <= hi
