import math

import numpy as np
import pytest

import shallowbs.gaussian as gaussian
from shallowbs.arch import build_local_parallel, build_nlhs, realize
from shallowbs.fock import GuardError, enumerate_outcomes
from shallowbs.gaussian import (
    GbsConfig,
    count_permitted_gbs,
    evolve_covariance,
    gbs_depth_thresholds,
    gbs_permitted_ratio_bound,
    gbs_unnormalized_probability,
    is_permitted_gbs,
    is_valid_covariance,
    page_curve,
    photon_pair_marginal,
    reduced_covariance,
    renyi2_entropy,
    smsv_covariance,
    symplectic_from_unitary,
    _photon_pairing_possible,
)
from shallowbs.linalg import RngStream, haar_unitary


def test_gbs_config_validation():
    with pytest.raises(ValueError):
        GbsConfig(4, 5, 0.4, 1)
    with pytest.raises(ValueError):
        GbsConfig(4, 2, 0.4, 3)
    with pytest.raises(ValueError):
        GbsConfig(4, 2, 0.0, 1)
    assert GbsConfig(4, 2, 0.4, 0).pairs == 0


def test_matched_squeezing_mean_photons():
    for modes, k, pairs in ((8, 8, 2), (16, 4, 3)):
        cfg = GbsConfig.with_matched_squeezing(modes, k, pairs)
        np.testing.assert_allclose(
            k * math.sinh(cfg.squeeze_r) ** 2, 2.0 * pairs, rtol=1e-12
        )


def test_smsv_covariance_structure():
    cfg = GbsConfig(3, 2, 0.5, 1)
    sigma = smsv_covariance(cfg, (0, 2))
    expect = np.diag(
        [math.exp(-1.0), 1.0, math.exp(-1.0), math.exp(1.0), 1.0, math.exp(1.0)]
    )
    np.testing.assert_allclose(sigma, expect, rtol=1e-12)
    np.testing.assert_allclose(np.linalg.det(sigma), 1.0, rtol=1e-12)
    with pytest.raises(ValueError):
        smsv_covariance(cfg, (0, 1, 2))


def test_symplectic_from_unitary_properties():
    u = haar_unitary(5, RngStream(3, 0))
    o = symplectic_from_unitary(u)
    np.testing.assert_allclose(o @ o.T, np.eye(10), atol=1e-12)
    eye, zero = np.eye(5), np.zeros((5, 5))
    omega = np.block([[zero, eye], [-eye, zero]])
    np.testing.assert_allclose(o @ omega @ o.T, omega, atol=1e-12)


def test_evolve_covariance_keeps_vacuum_and_purity():
    u = haar_unitary(4, RngStream(5, 1))
    np.testing.assert_allclose(evolve_covariance(np.eye(8), u), np.eye(8), atol=1e-12)
    cfg = GbsConfig(4, 4, 0.3, 1)
    sigma = evolve_covariance(smsv_covariance(cfg), u)
    np.testing.assert_allclose(np.linalg.det(sigma), 1.0, rtol=1e-10)
    assert is_valid_covariance(sigma)
    with pytest.raises(ValueError):
        evolve_covariance(sigma, u * 1.01)


def test_reduced_covariance_picks_blocks():
    sigma = np.arange(36.0).reshape(6, 6)
    sigma = sigma + sigma.T
    red = reduced_covariance(sigma, [1])
    idx = np.array([1, 4])
    np.testing.assert_array_equal(red, sigma[np.ix_(idx, idx)])
    with pytest.raises(ValueError):
        reduced_covariance(sigma, [])
    with pytest.raises(ValueError):
        reduced_covariance(sigma, [0, 1, 2])
    with pytest.raises(IndexError):
        reduced_covariance(sigma, [3])


def tmsv_covariance(r):
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    x = np.array([[c, s], [s, c]])
    p = np.array([[c, -s], [-s, c]])
    out = np.zeros((4, 4))
    out[:2, :2] = x
    out[2:, 2:] = p
    return out


def test_renyi2_entropy_two_mode_squeezed():
    """One arm of a two-mode squeezed state has entropy ln cosh(2r)."""
    for r in (0.2, 0.6, 1.1):
        sigma = tmsv_covariance(r)
        assert is_valid_covariance(sigma)
        np.testing.assert_allclose(renyi2_entropy(sigma), 0.0, atol=1e-12)
        np.testing.assert_allclose(
            renyi2_entropy(reduced_covariance(sigma, [0])),
            math.log(math.cosh(2 * r)),
            rtol=1e-12,
        )
    with pytest.raises(ValueError):
        renyi2_entropy(np.diag([-1.0, 1.0, 1.0, 1.0]))


def test_entropy_complement_symmetry_exact():
    # a pure Gaussian state has equal subsystem entropies across any cut
    u = haar_unitary(6, RngStream(8, 4))
    cfg = GbsConfig(6, 6, 0.4, 1)
    sigma = evolve_covariance(smsv_covariance(cfg), u)
    for subset in ([0], [0, 3], [1, 2, 5]):
        complement = [i for i in range(6) if i not in subset]
        np.testing.assert_allclose(
            renyi2_entropy(reduced_covariance(sigma, subset)),
            renyi2_entropy(reduced_covariance(sigma, complement)),
            rtol=1e-9,
        )


def test_is_valid_covariance_rejects_subvacuum():
    assert is_valid_covariance(np.eye(8))
    assert not is_valid_covariance(0.5 * np.eye(8))
    assert not is_valid_covariance(np.eye(7))
    skew = np.eye(4)
    skew[0, 1] = 0.2
    assert not is_valid_covariance(skew)


def test_page_curve_rows_and_determinism():
    def sampler(gen):
        return haar_unitary(4, gen)

    rows = page_curve(sampler, 4, 0.4, 10, RngStream(42, 0))
    assert [r[0] for r in rows] == [1, 2, 3]
    assert all(mean > -1e-9 and err >= 0 for _, mean, err in rows)
    again = page_curve(sampler, 4, 0.4, 10, RngStream(42, 0))
    assert rows == again
    threaded = page_curve(sampler, 4, 0.4, 10, RngStream(42, 0), threads=3)
    assert rows == threaded
    subset = page_curve(sampler, 4, 0.4, 10, RngStream(42, 0), subsystem_sizes=[2])
    assert subset[0] == rows[1]


def test_page_curve_validation():
    def sampler(gen):
        return haar_unitary(4, gen)

    with pytest.raises(ValueError):
        page_curve(sampler, 1, 0.4, 10, RngStream(0, 0))
    with pytest.raises(ValueError):
        page_curve(sampler, 4, 0.4, 1, RngStream(0, 0))
    with pytest.raises(ValueError):
        page_curve(sampler, 4, 0.4, 10, RngStream(0, 0), subsystem_sizes=[4])


def test_gbs_probability_single_source_identity_circuit():
    cfg = GbsConfig(3, 1, 0.7, 1)
    u = np.eye(3, dtype=complex)
    np.testing.assert_allclose(
        gbs_unnormalized_probability(u, cfg, (0, 0)), 0.5, rtol=1e-12
    )
    assert gbs_unnormalized_probability(u, cfg, (0, 1)) == 0.0
    assert gbs_unnormalized_probability(u, cfg, (1, 1)) == 0.0
    assert gbs_unnormalized_probability(u, cfg, ()) == 1.0
    with pytest.raises(ValueError):
        gbs_unnormalized_probability(u, cfg, (0,))


def test_gbs_probability_balanced_beamsplitter_antibunches():
    """U U^T = I for the real balanced splitter, so split pairs are forbidden."""
    cfg = GbsConfig(2, 2, 0.5, 1)
    u = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    assert gbs_unnormalized_probability(u, cfg, (0, 1)) < 1e-15
    np.testing.assert_allclose(
        gbs_unnormalized_probability(u, cfg, (0, 0)), 0.5, rtol=1e-12
    )


def random_adjacency(gen, n):
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if gen.random() < 0.4:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return rows


def test_pairing_routes_agree(monkeypatch):
    # force the matching fallback and compare with the exhaustive search
    gen = np.random.default_rng(61)
    for n in (6, 8, 10):
        for _ in range(30):
            adjacency = random_adjacency(gen, n)
            direct = _photon_pairing_possible(adjacency, n)
            monkeypatch.setattr(gaussian, "_EXHAUSTIVE_MATCHING_MAX", 0)
            fallback = _photon_pairing_possible(adjacency, n)
            monkeypatch.undo()
            assert direct == fallback


def test_is_permitted_gbs_frozen_chain():
    arch = build_local_parallel(1, [8], 1)
    cfg = GbsConfig(8, 8, 0.4, 1)
    t = tuple(range(8))
    assert is_permitted_gbs(arch, cfg, t, (0, 1), 1)
    assert is_permitted_gbs(arch, cfg, t, (0, 0), 1)
    assert not is_permitted_gbs(arch, cfg, t, (0, 5), 1)
    cfg2 = GbsConfig(8, 8, 0.4, 2)
    assert is_permitted_gbs(arch, cfg2, t, (0, 1, 2, 3), 1)
    assert not is_permitted_gbs(arch, cfg2, t, (0, 1, 2, 5), 1)


def test_is_permitted_gbs_respects_input_support():
    arch = build_local_parallel(1, [8], 1)
    cfg = GbsConfig(8, 2, 0.4, 1)
    assert not is_permitted_gbs(arch, cfg, (0, 1), (6, 7), 1)
    assert is_permitted_gbs(arch, cfg, (6, 7), (6, 7), 1)


def test_forbidden_gbs_outcomes_carry_no_probability():
    arch = build_local_parallel(1, [8], 1)
    cfg = GbsConfig(8, 8, 0.4, 2)
    t = tuple(range(8))
    for i in range(2):
        u = realize(arch, RngStream(83, i))
        for s in enumerate_outcomes(8, 4):
            if not is_permitted_gbs(arch, cfg, t, s, 1):
                assert gbs_unnormalized_probability(u, cfg, s) < 1e-12


def test_count_permitted_gbs_frozen_and_support():
    """Exact counts cross-checked against the nonzero-probability support."""
    cfg = GbsConfig(8, 8, 0.4, 2)
    t = tuple(range(8))
    expected = {1: (74, 144.0), 2: (219, 576.0), 3: (314, 1296.0)}
    for depth, (count, bound) in expected.items():
        arch = build_local_parallel(1, [8], depth)
        report = count_permitted_gbs(arch, cfg, t, depth)
        assert report.exact_count == count
        assert report.upper_bound == bound
        assert report.total_outcomes == 330
        assert report.exact_count <= report.upper_bound
        u = realize(arch, RngStream(500, 0))
        support = sum(
            1
            for s in enumerate_outcomes(8, 4)
            if gbs_unnormalized_probability(u, cfg, s) > 1e-12
        )
        assert support == count


def test_count_permitted_gbs_nlhs_fallback_bound():
    arch = build_nlhs(3, 1)
    report = count_permitted_gbs(arch, GbsConfig(8, 8, 0.4, 2), tuple(range(8)), None)
    assert report.exact_count == report.total_outcomes == 330
    assert report.exact_count <= report.upper_bound == 576.0


def test_count_permitted_gbs_guard():
    arch = build_nlhs(7, 1)
    cfg = GbsConfig(128, 128, 0.4, 4)
    with pytest.raises(GuardError):
        count_permitted_gbs(arch, cfg, tuple(range(128)), None, guard=10**6)


def test_gbs_depth_thresholds_unit_constants():
    th = gbs_depth_thresholds(4, 1.0, 1.0, 1, 0.5, 0.5)
    np.testing.assert_allclose(th.forbidden_constant, math.e / 8, rtol=1e-14)
    np.testing.assert_allclose(th.concentration_constant, math.e**2 / 64, rtol=1e-14)
    assert th.scheme == "gbs"
    assert th.photons == 8
    # with m = n the additive error is (2n)!/n^(2n)
    np.testing.assert_allclose(
        th.additive_error, math.factorial(8) / 4**8, rtol=1e-12
    )


def test_gbs_ratio_bound_formula_and_domain():
    m, n, gamma, d, depth = 8, 2, 1.5, 1, 2
    c1 = m / n**gamma
    expect = 2.0 * (
        (2.0 ** (2 * d + 1) / (math.e * d**d * c1)) * depth**d * n ** (1 - gamma)
    ) ** n
    np.testing.assert_allclose(
        gbs_permitted_ratio_bound(m, n, gamma, c1, d, depth), expect, rtol=1e-12
    )
    with pytest.raises(ValueError):
        gbs_permitted_ratio_bound(m + 3, n, gamma, c1, d, depth)


def test_photon_pair_marginal_values():
    cfg = GbsConfig(4, 2, 0.4, 1)
    np.testing.assert_allclose(
        photon_pair_marginal(cfg, 1), 0.12352105383470628, rtol=1e-12
    )
    # K = 2 reduces to a geometric law in tanh^2
    r = cfg.squeeze_r
    for n in range(5):
        np.testing.assert_allclose(
            photon_pair_marginal(cfg, n),
            math.tanh(r) ** (2 * n) / math.cosh(r) ** 2,
            rtol=1e-12,
        )


def test_photon_pair_marginal_normalizes_and_matches_mean():
    for k, r in ((2, 0.4), (4, 0.3), (8, 0.25)):
        cfg = GbsConfig(8, k, r, 1)
        probs = [photon_pair_marginal(cfg, n) for n in range(60)]
        np.testing.assert_allclose(sum(probs), 1.0, atol=1e-12)
        mean = sum(2 * n * p for n, p in enumerate(probs))
        np.testing.assert_allclose(mean, k * math.sinh(r) ** 2, rtol=1e-10)


def test_photon_pair_marginal_odd_sources_warns():
    cfg = GbsConfig(8, 3, 0.4, 1)
    with pytest.warns(UserWarning):
        photon_pair_marginal(cfg, 1)
