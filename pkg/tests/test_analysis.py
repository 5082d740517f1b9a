import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarray_esprit.analysis import (
    BoundIngredients,
    bound_report,
    esprit_md_from_dist,
    gauss_cov_bound,
    gauss_cov_failure_prob,
    matched_distance,
    matched_distance_bruteforce,
    matched_distance_cyclic,
    md_bound,
    md_bound_unclamped,
    min_separation,
    probability_floor,
    resolution_snapshots,
    subspace_error_bound,
    wraparound_dist,
)
from coarray_esprit.array_model import reference_mra, steering_matrix, ula
from coarray_esprit.errors import DimensionError, PreconditionError
from coarray_esprit.esprit import esprit_freqs
from coarray_esprit.linalg_kernels import orthonormal_basis, subspace_dist
from coarray_esprit.signal_sim import SourceScene, reference_scene


def loop_matched_distance(a, b):
    """Plain-Python oracle: every permutation, scalar wrap-around distance."""
    best = math.inf
    for perm in itertools.permutations(range(len(a))):
        worst = max(min(abs(a[perm[k]] - b[k]), 1 - abs(a[perm[k]] - b[k])) for k in range(len(b)))
        best = min(best, worst)
    return best


class TestWraparound:
    def test_equal(self):
        assert wraparound_dist(0.1, 0.1) == 0

    def test_wrap(self):
        assert wraparound_dist(0.95, 0.1) == pytest.approx(0.15)

    def test_antipodal(self):
        assert wraparound_dist(0.2, 0.7) == pytest.approx(0.5)


class TestMatchedDistance:
    def test_identical(self):
        t = [0.1, 0.5, 0.9]
        assert matched_distance(t, t) == 0

    def test_two_point_wrap(self):
        assert matched_distance([0.0, 0.5], [0.98, 0.52]) == pytest.approx(0.02)

    def test_against_loop_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            a, b = rng.uniform(0, 1, 6), rng.uniform(0, 1, 6)
            assert matched_distance(a, b) == pytest.approx(loop_matched_distance(a, b), abs=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            matched_distance([0.1], [0.1, 0.2])

    def test_large_k_uses_cyclic(self):
        rng = np.random.default_rng(1)
        t = rng.uniform(0, 1, 12)
        t_hat = np.mod(t + rng.normal(0, 1e-3, 12), 1)
        assert matched_distance(t_hat, t) == matched_distance_cyclic(t_hat, t)

    def test_cyclic_equals_bruteforce(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            k = int(rng.integers(1, 7))
            a, b = rng.uniform(0, 1, k), rng.uniform(0, 1, k)
            assert matched_distance_cyclic(a, b) == matched_distance_bruteforce(a, b)

    @settings(max_examples=200)
    @given(st.integers(1, 5).flatmap(lambda k: st.tuples(*[st.lists(st.floats(0, 0.999), min_size=k, max_size=k)] * 3)))
    def test_pseudometric(self, sets):
        a, b, c = sets
        assert matched_distance(a, b) == matched_distance(b, a)
        assert matched_distance(a, a) == 0
        assert matched_distance(a, c) <= matched_distance(a, b) + matched_distance(b, c) + 1e-12


class TestMinSeparation:
    def test_wrap(self):
        assert min_separation([0.1, 0.9]) == pytest.approx(0.2)

    def test_delta_set(self):
        t = [0.1, 0.25, 0.35, 0.45, 0.6, 0.7, 0.8, 0.8 + 0.018]
        assert min_separation(t) == pytest.approx(0.018, abs=1e-12)

    def test_antipodal(self):
        assert min_separation([0.0, 0.5]) == 0.5

    def test_single(self):
        with pytest.raises(DimensionError):
            min_separation([0.3])


@pytest.fixture
def ref_ing():
    return BoundIngredients.from_problem(reference_mra(), reference_scene(1.0), 10_000)


def direct_ingredients(geom, scene):
    """Independent route to sigma_K(A_M) and ||A_Omega|| with explicit exponentials."""
    m = 0
    diffs = {a - b for a in geom.omega for b in geom.omega}
    while m in diffs:
        m += 1
    a_m = np.array([[np.exp(2j * np.pi * n * f) for f in scene.freqs] for n in range(m)])
    a_om = np.array([[np.exp(2j * np.pi * n * f) for f in scene.freqs] for n in geom.omega])
    return np.linalg.svd(a_m, compute_uv=False)[scene.k - 1], np.linalg.norm(a_om, 2), m


class TestSubspaceBound:
    def test_halving_with_four_times_snapshots(self, ref_ing):
        b1 = subspace_error_bound(ref_ing)
        b2 = subspace_error_bound(BoundIngredients(**{**ref_ing.__dict__, "n_snapshots": 20_000}))
        assert b1 / b2 == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_dual_evaluation(self, ref_ing):
        geom, scene = reference_mra(), reference_scene(1.0)
        sk, na, m = direct_ingredients(geom, scene)
        expected = 16 * 6 * np.sqrt(m) / (1.0 * sk**2) * (1.0 * na**2 + 1.0) / np.sqrt(10_000)
        assert subspace_error_bound(ref_ing) == pytest.approx(expected, rel=1e-12)
        assert ref_ing.sigma_k_am == pytest.approx(sk, rel=1e-12)
        assert ref_ing.norm_a_omega == pytest.approx(na, rel=1e-12)

    def test_saturation(self):
        ing = BoundIngredients.from_problem(reference_mra(), reference_scene(0.0), 10_000)
        assert subspace_error_bound(ing) > 0

    def test_preconditions(self, ref_ing):
        with pytest.raises(PreconditionError):
            subspace_error_bound(BoundIngredients(**{**ref_ing.__dict__, "n_snapshots": 5}))
        with pytest.raises(PreconditionError):
            subspace_error_bound(BoundIngredients(**{**ref_ing.__dict__, "m": 8}))


class TestMdBound:
    @pytest.mark.parametrize("n_snap", [1, 100, 10_000])
    def test_clamped_for_reference_scene(self, n_snap):
        ing = BoundIngredients.from_problem(reference_mra(), reference_scene(1.0), n_snap)
        assert md_bound_unclamped(ing) > 1
        assert md_bound(ing) == 1.0

    def test_direct_value(self, ref_ing):
        sk, na, m = direct_ingredients(reference_mra(), reference_scene(1.0))
        expected = 2**25 * 6 * m * math.sqrt(8**3) / sk**3 * max(1.0, na**2) / 100
        assert md_bound_unclamped(ref_ing) == pytest.approx(expected, rel=1e-12)

    def test_single_source_scaling(self):
        scene = SourceScene((0.3,), None, 0.5)
        b1 = md_bound(BoundIngredients.from_problem(ula(4), scene, 10**16))
        b2 = md_bound(BoundIngredients.from_problem(ula(4), scene, 4 * 10**16))
        assert b1 < 1
        assert b1 / b2 == pytest.approx(2.0, rel=1e-12)

    def test_independent_of_small_noise(self):
        geom = ula(4)
        base = BoundIngredients.from_problem(geom, SourceScene((0.3,), None, 0.0), 10**16)
        for s2 in (0.1, 1.0, 3.9):
            ing = BoundIngredients.from_problem(geom, SourceScene((0.3,), None, s2), 10**16)
            assert s2 < ing.signal_level
            assert md_bound(ing) == md_bound(base)

    def test_noise_dominated_branch(self):
        geom = ula(4)
        ing = BoundIngredients.from_problem(geom, SourceScene((0.3,), None, 1000.0), 10**20)
        ing2 = BoundIngredients.from_problem(geom, SourceScene((0.3,), None, 2000.0), 10**20)
        assert md_bound(ing2) / md_bound(ing) == pytest.approx(2.0, rel=1e-12)


class TestResolution:
    def test_delta_squared_law(self, ref_ing):
        assert resolution_snapshots(ref_ing, 0.05) / resolution_snapshots(ref_ing, 0.1) == pytest.approx(4.0)

    @pytest.mark.parametrize("delta", [0.01, 0.1, 0.5])
    def test_consistent_with_md_bound(self, delta):
        ing = BoundIngredients.from_problem(ula(4), SourceScene((0.3,), None, 0.5), 1)
        n_snap = resolution_snapshots(ing, delta) * (1 + 1e-9)
        at = BoundIngredients(**{**ing.__dict__, "n_snapshots": n_snap})
        assert md_bound(at) < delta / 2
        below = BoundIngredients(**{**ing.__dict__, "n_snapshots": n_snap * 0.99})
        assert md_bound(below) > delta / 2

    def test_single_source_direct(self):
        scene = SourceScene((0.3,), None, 0.5)
        ing = BoundIngredients.from_problem(ula(4), scene, 1)
        # one source on a 4-element ULA: sigma_1(A_M) = ||A_Omega|| = 2
        expected = 2**24 * 16 * 16 * 1 / (1 * 2**6 * 0.1**2) * max(0.25, 16)
        assert resolution_snapshots(ing, 0.1) == pytest.approx(expected, rel=1e-12)
        assert math.isfinite(expected) and expected > 0

    def test_bad_delta(self, ref_ing):
        with pytest.raises(PreconditionError):
            resolution_snapshots(ref_ing, 0.0)

    def test_overflow_is_infinite(self):
        ing = BoundIngredients(1e-3, 10.0, 1.0, 1.0, 100, 400, 300, 1, 1.0)
        assert resolution_snapshots(ing, 1e-3) == math.inf
        assert md_bound(ing) == 1.0
        finite = BoundIngredients(1e-3, 10.0, 1.0, 1.0, 100, 400, 200, 1, 1.0)
        assert math.isfinite(resolution_snapshots(finite, 1e-3))


class TestGaussCovBound:
    @pytest.mark.parametrize("p, n", [(6, 6), (6, 60), (3, 1000)])
    def test_sample_cov_bound_simplification(self, p, n):
        u = math.sqrt(p / n)
        assert gauss_cov_bound(p, n, u, 2.0) <= 8 * math.sqrt(p / n) * 2.0 + 1e-15

    def test_vanishes(self):
        assert gauss_cov_bound(1, 10**12, 1e-9, 1.0) < 1e-5

    def test_direct(self):
        assert gauss_cov_bound(5, 5, 1.0, 3.0) == pytest.approx(24.0)

    def test_failure_probability(self):
        assert gauss_cov_failure_prob(6, 1.0) == pytest.approx(2 * math.exp(-3))
        assert probability_floor(6) == pytest.approx(1 - 2 * math.exp(-3))


@pytest.mark.parametrize("k", [1, 2])
def test_subspace_to_md_chain(k):
    rng = np.random.default_rng(100 + k)
    m = 6
    checked = 0
    for _ in range(200):
        freqs = np.sort(rng.uniform(0, 1, k))
        if k > 1 and min_separation(freqs) < 0.1:
            continue
        scene = SourceScene(tuple(freqs))
        u = orthonormal_basis(steering_matrix(range(m), freqs))
        eps = 10 ** rng.uniform(-6, -2)
        g = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        u_hat = orthonormal_basis(u + eps * g)
        dist = subspace_dist(u_hat, u)
        md = matched_distance(esprit_freqs(u_hat).freqs, freqs)
        ing = BoundIngredients.from_problem(ula(m), scene, 1)
        assert md <= esprit_md_from_dist(ing, dist)
        checked += 1
    assert checked > 50


def test_bound_report_text(ref_ing):
    rep = bound_report(reference_mra(), reference_scene(1.0), 10_000)
    text = rep.to_text()
    lines = dict(line.split(" = ") for line in text.strip().splitlines())
    assert lines["md_bound"] == "1"
    assert float(lines["probability_floor"]) == pytest.approx(1 - 2 * math.exp(-3), rel=1e-11)
    assert int(lines["m"]) == 14 and int(lines["k"]) == 8
    assert 0 < rep.probability_floor < 1
    assert float(lines["subspace_bound"]) == pytest.approx(subspace_error_bound(ref_ing), rel=1e-11)
