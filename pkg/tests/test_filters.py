import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manistab.errors import ConfigurationError, ContractError, DomainError
from manistab.filters import (
    FilterCoefficients,
    apply_filter,
    continuity_constants,
    design_filter,
    filter_matrix,
    freq_derivative,
    freq_response,
    normalize,
    sup_abs_response,
    verify_fdt_frt,
)
from manistab.geometry import sample_manifold
from manistab.graph import DenseOperator, build_graph, laplacian
from manistab.spectral import SpectralDecomposition, eigendecompose, partition_eigenvalues, partition_spectrum

from oracles import expm_taylor, qr_design_residual


def _dec_from(lam):
    lam = np.asarray(lam, dtype=float)
    return SpectralDecomposition(lam, np.eye(lam.size))


def test_response_examples():
    assert freq_response(FilterCoefficients([1.0]), [0.0, 3.7])[1] == 1.0
    assert freq_response(FilterCoefficients([0.0, 1.0]), 2.0) == pytest.approx(math.exp(-2), rel=1e-15)
    assert freq_response(FilterCoefficients([1.0, -1.0]), 0.0) == 0.0


def test_response_rejects_negative_frequency():
    with pytest.raises(DomainError):
        freq_response(FilterCoefficients([1.0, 1.0]), -0.1)


def test_derivative_matches_difference_quotient():
    h = FilterCoefficients([0.3, -1.2, 0.8, 0.1])
    lam = np.linspace(0.1, 3, 7)
    step = 1e-6
    fd = (freq_response(h, lam + step) - freq_response(h, lam - step)) / (2 * step)
    np.testing.assert_allclose(freq_derivative(h, lam), fd, rtol=1e-7, atol=1e-9)


def test_identity_filter_returns_input(sphere60):
    _, _, dec = sphere60
    x = np.random.default_rng(0).standard_normal(dec.n)
    np.testing.assert_allclose(apply_filter(FilterCoefficients([1.0]), dec, x).values[:, 0], x, atol=1e-13)


def test_eigenvector_pointwise_action(sphere60):
    _, _, dec = sphere60
    h = FilterCoefficients([0.2, 0.5, -0.3])
    for j in (0, 5, 59):
        phi = dec.eigenvectors[:, j]
        z = apply_filter(h, dec, phi).values[:, 0]
        np.testing.assert_allclose(z, freq_response(h, max(dec.eigenvalues[j], 0.0)) * phi, atol=1e-13)


def test_spectral_equals_exponential_path():
    rng = np.random.default_rng(4)
    L = laplacian(build_graph(sample_manifold("sphere2", 30, 8)))
    dec = eigendecompose(L)
    h = FilterCoefficients(rng.standard_normal(5))
    x = rng.standard_normal(30)
    E = expm_taylor(-L.matrix)
    ref = sum(hk * np.linalg.matrix_power(E, k) for k, hk in enumerate(h.taps)) @ x
    z = apply_filter(h, dec, x).values[:, 0]
    assert np.linalg.norm(z - ref) / np.linalg.norm(ref) < 1e-8
    np.testing.assert_allclose(filter_matrix(h, dec) @ x, z, atol=1e-12)


def test_apply_dimension_mismatch(sphere60):
    _, _, dec = sphere60
    with pytest.raises(ContractError):
        apply_filter(FilterCoefficients([1.0]), dec, np.zeros(dec.n - 1))


def test_constant_filter_constants():
    c = continuity_constants(FilterCoefficients([1.0]), (0.0, 20.0))
    assert (c.lipschitz, c.integral_lipschitz, c.sup_abs_response) == (0.0, 0.0, 1.0)
    assert c.non_amplifying


def test_single_tap_constants():
    c = continuity_constants(FilterCoefficients([0.0, 1.0]), (0.0, 20.0))
    assert c.lipschitz == pytest.approx(1.0, abs=1e-12)
    assert c.integral_lipschitz == pytest.approx(math.exp(-1), abs=1e-9)
    assert c.sup_abs_response == pytest.approx(1.0, abs=1e-12)


def test_constants_grid_density_guard():
    with pytest.raises(ConfigurationError):
        continuity_constants(FilterCoefficients([0.0, 1.0]), (0.0, 1.0), grid_density=10)


@settings(max_examples=40, deadline=None)
@given(taps=st.lists(st.floats(-3, 3), min_size=2, max_size=6), hi=st.floats(0.5, 20.0))
def test_constants_dominate_dense_sampling(taps, hi):
    h = FilterCoefficients(taps)
    c = continuity_constants(h, (0.0, hi))
    lam = np.linspace(0.0, hi, 20001)
    d = freq_derivative(h, lam)
    tol = 1e-9 * (1 + np.sum(np.abs(taps)) * len(taps))
    assert np.max(np.abs(d)) <= c.lipschitz + tol
    assert np.max(np.abs(lam * d)) <= c.integral_lipschitz + tol
    assert np.max(np.abs(freq_response(h, lam))) <= c.sup_abs_response + tol


def test_fdt_examples():
    dec = _dec_from([0.5, 1.0, 1.1, 3.0])
    part = partition_eigenvalues(dec.eigenvalues, "alpha_difference", 0.2)
    rep = verify_fdt_frt(FilterCoefficients([1.0]), part, dec, 1e-12)
    assert rep.holds and rep.worst_deviation == 0.0
    rep = verify_fdt_frt(FilterCoefficients([0.0, 1.0]), part, dec, 0.01)
    assert not rep.holds
    assert rep.worst_deviation == pytest.approx(math.exp(-1) - math.exp(-1.1), abs=1e-12)
    assert rep.group_deviations[0] == 0.0 and rep.group_deviations[2] == 0.0


def test_fdt_wrong_partition():
    dec = _dec_from([0.5, 1.0])
    part = partition_eigenvalues([0.5, 1.5], "alpha_difference", 0.2)
    with pytest.raises(ContractError):
        verify_fdt_frt(FilterCoefficients([1.0]), part, dec, 0.1)


def test_normalize_examples():
    np.testing.assert_allclose(normalize(FilterCoefficients([2.0]), (0, 1)).taps, [1.0])
    np.testing.assert_allclose(normalize(FilterCoefficients([0.0, 3.0]), (0, 20)).taps, [0.0, 1.0], atol=1e-15)
    h = normalize(FilterCoefficients([0.4, -0.9, 0.2]), (0, 5))
    np.testing.assert_allclose(normalize(h, (0, 5)).taps, h.taps, atol=1e-12)
    with pytest.raises(DomainError):
        normalize(FilterCoefficients([0.0, 0.0]), (0, 1))


def test_sup_of_tap_difference():
    # 1 - e^{-lambda} on [0, 2] peaks at the right end
    assert sup_abs_response(FilterCoefficients([1.0, -1.0]), (0, 2)) == pytest.approx(1 - math.exp(-2), abs=1e-15)


def test_design_single_group_well_spread():
    dec = _dec_from(np.linspace(0.0, 4.0, 30))
    part = partition_eigenvalues(dec.eigenvalues, "alpha_difference", 1.0)
    assert part.group_count == 1
    res = design_filter(dec, part, [1.0], 5)
    assert res.residual <= 1e-6
    np.testing.assert_allclose(res.filter.taps, [1, 0, 0, 0, 0], atol=1e-6)


@pytest.mark.parametrize("K", [2, 3])
def test_design_single_group_on_sphere(sphere60, K):
    _, _, dec = sphere60
    part = partition_spectrum(dec, "alpha_difference", 10.0)
    res = design_filter(dec, part, [1.0], K)
    assert res.residual <= 1e-6


def test_design_all_zero_targets(sphere60):
    _, _, dec = sphere60
    part = partition_spectrum(dec, "alpha_difference", 0.02)
    res = design_filter(dec, part, [0.0, 0.0, 0.0], 4)
    assert res.zero_filter
    assert np.all(res.filter.taps == 0)


def test_design_two_clusters_against_qr_oracle():
    rng = np.random.default_rng(1)
    lam = np.sort(np.concatenate([0.1 + 0.01 * rng.random(10), 5.0 + 0.01 * rng.random(10)]))
    dec = _dec_from(lam)
    part = partition_eigenvalues(lam, "alpha_difference", 1.0)
    res = design_filter(dec, part, [1.0, 0.0], 5)
    y = np.repeat([1.0, 0.0], 10)
    ref = qr_design_residual(lam, y, 5)
    assert res.residual <= 0.05
    assert abs(res.residual - ref) < 1e-5


def test_design_preset_groups(sphere60):
    _, _, dec = sphere60
    part = partition_spectrum(dec, "alpha_difference", 0.02)
    res = design_filter(dec, part, [1.0, 0.6, 0.2], 5)
    assert not res.zero_filter
    assert sup_abs_response(res.filter, res.lambda_range) == pytest.approx(1.0, abs=1e-12)


def test_design_validation(sphere60):
    _, _, dec = sphere60
    part = partition_spectrum(dec, "alpha_difference", 0.02)
    with pytest.raises(ContractError):
        design_filter(dec, part, [1.0, 0.5], 5)
    with pytest.raises(ConfigurationError):
        design_filter(dec, part, [1.0, 0.5, 2.0], 5)
    with pytest.raises(ConfigurationError):
        design_filter(dec, part, [1.0, 0.5, 0.0], 1)


def test_design_warns_when_underdetermined():
    dec = _dec_from([0.0, 1.0, 2.0])
    part = partition_eigenvalues(dec.eigenvalues, "alpha_difference", 0.5)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        res = design_filter(dec, part, [1.0, 0.0, 1.0], 5)
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)
    assert np.all(np.isfinite(res.filter.taps))


def test_filter_needs_taps():
    with pytest.raises(Exception):
        FilterCoefficients([])
    with pytest.raises(Exception):
        FilterCoefficients([np.nan])


def test_apply_on_generic_operator_with_negative_eigenvalues():
    dec = eigendecompose(DenseOperator(np.diag([-0.01, 1.0]), "generic_symmetric"))
    z = apply_filter(FilterCoefficients([0.0, 1.0]), dec, [1.0, 0.0]).values[:, 0]
    assert z[0] == pytest.approx(math.exp(0.01))


@settings(max_examples=30, deadline=None)
@given(
    taps=st.lists(st.floats(-3, 3), min_size=1, max_size=6),
    x=st.integers(0, 2**32 - 1),
    a=st.floats(-5, 5),
    b=st.floats(-5, 5),
)
def test_linearity(sphere60, taps, x, a, b):
    _, _, dec = sphere60
    h = FilterCoefficients(taps)
    rng = np.random.default_rng(x)
    u, v = rng.standard_normal((2, dec.n))
    lhs = apply_filter(h, dec, a * u + b * v).values[:, 0]
    rhs = a * apply_filter(h, dec, u).values[:, 0] + b * apply_filter(h, dec, v).values[:, 0]
    scale = 1 + np.sum(np.abs(taps)) * (abs(a) + abs(b)) * np.max(np.abs([u, v]))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(taps=st.lists(st.floats(-3, 3), min_size=1, max_size=6), x=st.integers(0, 2**32 - 1))
def test_normalized_filter_does_not_amplify(sphere60, taps, x):
    _, _, dec = sphere60
    raw = FilterCoefficients(taps)
    rng_ = (0.0, 1.1 * dec.eigenvalues[-1])
    if sup_abs_response(raw, rng_) < 1e-12:
        return
    h = normalize(raw, rng_)
    sig = np.random.default_rng(x).standard_normal(dec.n)
    assert np.linalg.norm(apply_filter(h, dec, sig).values) <= np.linalg.norm(sig) * (1 + 1e-8)


def _soundness_cases():
    """Normalized random and designed filters on the eigenvalues of five sphere graphs."""
    rng = np.random.default_rng(77)
    for seed in range(5):
        dec = eigendecompose(laplacian(build_graph(sample_manifold("sphere2", 60, seed))))
        rng_ = (0.0, 1.1 * dec.eigenvalues[-1])
        part = partition_spectrum(dec, "alpha_difference", 0.02)
        for i in range(40):
            if i % 2:
                raw = FilterCoefficients(rng.standard_normal(int(rng.integers(2, 7))))
                h = normalize(raw, rng_)
            else:
                targets = list(rng.uniform(0, 1, len(part.groups)))
                h = design_filter(dec, part, targets, int(rng.integers(2, 6)), lambda_range=rng_).filter
            yield dec.eigenvalues, h, continuity_constants(h, rng_, grid_density=20000)


def _pair_ratios():
    worst_a = worst_b = worst_log = 0.0
    for lam, h, c in _soundness_cases():
        pos = lam[lam > 0]
        a, b = np.meshgrid(pos, pos, indexing="ij")
        off = a != b
        diff = np.abs(freq_response(h, a[off]) - freq_response(h, b[off]))
        a, b = a[off], b[off]
        worst_a = max(worst_a, float(np.max(diff / (c.lipschitz * np.abs(a - b)))))
        if c.integral_lipschitz > 0:
            worst_b = max(worst_b, float(np.max(diff / (c.integral_lipschitz * np.abs(a - b) / ((a + b) / 2)))))
            worst_log = max(worst_log, float(np.max(diff / (c.integral_lipschitz * np.abs(np.log(b / a))))))
    return worst_a, worst_b, worst_log


@pytest.fixture(scope="module")
def pair_ratios():
    return _pair_ratios()


def test_lipschitz_constant_is_pairwise_sound(pair_ratios):
    assert pair_ratios[0] <= 1 + 1e-6


def test_integral_lipschitz_constant_is_pairwise_sound(pair_ratios):
    # pairwise midpoint form of the integral Lipschitz condition
    assert pair_ratios[1] <= 1 + 1e-6


def test_integral_lipschitz_constant_bounds_log_ratio(pair_ratios):
    # max |lambda hhat'| bounds |hhat(a) - hhat(b)| by B_h |log(b / a)|
    assert pair_ratios[2] <= 1 + 1e-6
