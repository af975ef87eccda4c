import math
from itertools import permutations

import numpy as np
import pytest

from shallowbs.arch import build_local_parallel, build_nlhs, forward_lightcone, realize
from shallowbs.fock import (
    GuardError,
    count_permitted_fbs,
    count_permitted_fbs_effective,
    enumerate_outcomes,
    fbs_depth_thresholds,
    fbs_permitted_ratio_bound,
    fbs_probability,
    is_permitted_fbs,
    outcome_count,
    pattern_factorial,
    _photon_cone_matching,
)
from shallowbs.linalg import RngStream, haar_unitary


def test_pattern_factorial():
    assert pattern_factorial(()) == 1
    assert pattern_factorial((0, 1, 2)) == 1
    assert pattern_factorial((0, 0, 1, 3, 3, 3)) == 12
    assert pattern_factorial((5, 5, 5, 5)) == 24


def test_fbs_probability_balanced_beamsplitter():
    """Two photons into a balanced splitter bunch; the split outcome cancels."""
    u = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    np.testing.assert_allclose(fbs_probability(u, (0, 1), (0, 0)), 0.5, rtol=1e-12)
    np.testing.assert_allclose(fbs_probability(u, (0, 1), (1, 1)), 0.5, rtol=1e-12)
    assert fbs_probability(u, (0, 1), (0, 1)) < 1e-15


def test_fbs_probability_validation():
    u = np.eye(4, dtype=complex)
    with pytest.raises(ValueError):
        fbs_probability(u, (0, 1), (0,))
    with pytest.raises(ValueError):
        fbs_probability(u, (1, 0), (0, 1))
    with pytest.raises(ValueError):
        fbs_probability(u, (0, 0), (0, 1))
    with pytest.raises(IndexError):
        fbs_probability(u, (0, 4), (0, 1))
    assert fbs_probability(u, (), ()) == 1.0


def test_fbs_probabilities_normalize():
    for m, t, seed in ((5, (0, 2, 4), 0), (6, (1, 3), 1)):
        u = haar_unitary(m, RngStream(77, seed))
        total = sum(fbs_probability(u, t, s) for s in enumerate_outcomes(m, len(t)))
        np.testing.assert_allclose(total, 1.0, atol=1e-9)


def test_outcome_enumeration_agrees_with_count():
    for m, n in ((1, 3), (4, 0), (5, 2), (6, 3)):
        outcomes = list(enumerate_outcomes(m, n))
        assert len(outcomes) == outcome_count(m, n)
        assert len(set(outcomes)) == len(outcomes)
        assert all(tuple(sorted(s)) == s for s in outcomes)


def matching_exists_brute_force(cones, outcome):
    n = len(outcome)
    for perm in permutations(range(n)):
        if all(outcome[perm[k]] in cones[k] for k in range(n)):
            return True
    return False


def test_cone_matching_against_brute_force():
    gen = np.random.default_rng(31)
    arch = build_local_parallel(1, [8], 3)
    for _ in range(200):
        depth = int(gen.integers(0, 4))
        n = int(gen.integers(1, 5))
        t = sorted(gen.choice(8, size=n, replace=False).tolist())
        cones = [forward_lightcone(arch, mode, depth) for mode in t]
        outcome = tuple(sorted(gen.integers(0, 8, size=n).tolist()))
        assert _photon_cone_matching(cones, outcome) == matching_exists_brute_force(
            cones, outcome
        )


def test_is_permitted_fbs_frozen_chain():
    arch = build_local_parallel(1, [8], 1)
    permitted = {(0, 6), (0, 7), (1, 6), (1, 7)}
    for s in enumerate_outcomes(8, 2):
        assert is_permitted_fbs(arch, (0, 7), s, 1) == (s in permitted)


def test_forbidden_outcomes_carry_no_probability():
    arch = build_local_parallel(1, [8], 2)
    t = (0, 3, 6)
    for i in range(3):
        u = realize(arch, RngStream(91, i))
        for s in enumerate_outcomes(8, 3):
            if not is_permitted_fbs(arch, t, s, 2):
                assert fbs_probability(u, t, s) < 1e-12


def test_count_permitted_fbs_frozen():
    arch = build_local_parallel(1, [8], 1)
    report = count_permitted_fbs(arch, (0, 7), 1)
    assert report.exact_count == 4
    assert report.upper_bound == 4.0
    assert report.total_outcomes == 36
    np.testing.assert_allclose(report.exact_ratio, 4 / 36, rtol=1e-12)


def test_count_permitted_fbs_bound_dominates():
    gen = np.random.default_rng(13)
    arch = build_local_parallel(1, [10], 4)
    for _ in range(25):
        depth = int(gen.integers(1, 5))
        n = int(gen.integers(1, 4))
        t = sorted(gen.choice(10, size=n, replace=False).tolist())
        report = count_permitted_fbs(arch, t, depth)
        assert report.exact_count <= report.upper_bound
        assert 0.0 <= report.exact_ratio <= report.bound_ratio <= 1.0


def test_count_permitted_fbs_full_connectivity():
    arch = build_nlhs(3, 1)
    report = count_permitted_fbs(arch, (0, 5), arch.depth)
    assert report.exact_count == report.total_outcomes == outcome_count(8, 2)


def test_count_permitted_fbs_guard():
    arch = build_nlhs(7, 1)
    with pytest.raises(GuardError):
        count_permitted_fbs(arch, tuple(range(8)), arch.depth, guard=10**6)


def test_effective_count_without_clipping_matches_plain():
    # radius 5 exceeds what depth 3 can reach, so clipping changes nothing
    arch = build_local_parallel(1, [8], 3)
    plain = count_permitted_fbs(arch, (0, 4), 3)
    eff = count_permitted_fbs_effective(arch, (0, 4), 3, 0.5, 0.5)
    assert eff.exact_count == plain.exact_count


def test_effective_count_clips_wide_cones():
    arch = build_local_parallel(1, [12], 6)
    plain = count_permitted_fbs(arch, (0, 6), 6)
    eff = count_permitted_fbs_effective(arch, (0, 6), 6, 0.1, 0.9)
    assert eff.exact_count <= plain.exact_count
    assert eff.exact_count < plain.exact_count  # radius 4 trims depth-6 cones


def test_effective_count_requires_lattice():
    with pytest.raises(ValueError):
        count_permitted_fbs_effective(build_nlhs(3, 1), (0,), 3, 0.5, 0.5)


def test_ratio_bound_formula_and_domain():
    m, n, gamma, d, depth = 8, 2, 1.5, 1, 1
    c0 = m / n**gamma
    expect = 3 * math.sqrt(n) * (
        (2**d * depth**d * n ** (1 - gamma)) / (math.e * d**d * c0)
    ) ** n
    np.testing.assert_allclose(
        fbs_permitted_ratio_bound(m, n, gamma, c0, d, depth), expect, rtol=1e-12
    )
    with pytest.raises(ValueError):
        fbs_permitted_ratio_bound(m, n, gamma, c0 * 1.5, d, depth)


def test_fbs_depth_thresholds_unit_constants():
    th = fbs_depth_thresholds(4, 1.0, 1.0, 1, 0.5, 0.5)
    np.testing.assert_allclose(th.forbidden_constant, math.e / 2, rtol=1e-14)
    np.testing.assert_allclose(th.concentration_constant, math.e**2 / 4, rtol=1e-14)
    np.testing.assert_allclose(th.forbidden_depth, th.forbidden_constant, rtol=1e-14)
    np.testing.assert_allclose(
        th.concentration_depth, th.concentration_constant / 2.0, rtol=1e-14
    )
    # with m = n the additive error is n!/n^n exactly
    np.testing.assert_allclose(th.additive_error, 24 / 256, rtol=1e-12)
    assert set(th.to_dict()) >= {"scheme", "forbidden_depth", "concentration_depth"}


def test_fbs_depth_thresholds_domain():
    with pytest.raises(ValueError):
        fbs_depth_thresholds(4, 0.9, 1.0, 1, 0.5, 0.5)
    with pytest.raises(ValueError):
        fbs_depth_thresholds(4, 1.0, 1.0, 1, 0.5, 1.0)
    with pytest.raises(ValueError):
        fbs_depth_thresholds(0, 1.0, 1.0, 1, 0.5, 0.5)
