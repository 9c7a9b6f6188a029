import numpy as np
import pytest

from mubtrace.estimators import (EstimatorKind, draw_probe, estimate_trace,
                                 random_bits_required, single_shot, single_shots)
from mubtrace.mub import NotPrimeError, generate_mub_family
from mubtrace.oracle import DenseOracle
from mubtrace.rng import RandomStream

from conftest import random_psd, random_symmetric

F, M, H, G = (EstimatorKind.FIXED, EstimatorKind.MUBS,
              EstimatorKind.HUTCHINSON, EstimatorKind.GAUSSIAN)


def test_parse_names():
    assert EstimatorKind.parse("MUBs") is M
    assert EstimatorKind.parse("unit") is F
    assert EstimatorKind.parse("rademacher") is H
    with pytest.raises(ValueError):
        EstimatorKind.parse("sobol")


def test_fixed_probe():
    p = draw_probe(F, 4, RandomStream(1, 0))
    assert p.scale == 4
    assert sorted(p.x.tolist()) == [0, 0, 0, 1]
    assert p.bits_used >= 2


def test_hutchinson_probe():
    p = draw_probe(H, 3, RandomStream(1, 0))
    assert set(p.x.tolist()) <= {-1.0, 1.0}
    assert p.bits_used == 3
    assert p.scale == 1


def test_mubs_probe_is_a_family_member():
    fam = generate_mub_family(5)
    vecs = fam.all_vectors()
    for i in range(20):
        p = draw_probe(M, 5, RandomStream(3, i))
        assert p.scale == 5
        assert abs(np.linalg.norm(p.x) - 1) < 1e-14
        assert np.any(np.all(vecs == p.x[:, None], axis=0))
        # rejection sampling: 3 bits per attempt for both 6 and 5 outcomes
        assert p.bits_used >= 6 and p.bits_used % 3 == 0


def test_mubs_probe_needs_prime():
    with pytest.raises(NotPrimeError):
        draw_probe(M, 6, RandomStream(0))


def test_gaussian_probe_booking():
    p = draw_probe(G, 7, RandomStream(0))
    assert p.bits_used == 64 * 7
    assert p.x.dtype == np.float64


def test_single_shot_examples():
    for i in range(10):
        p = draw_probe(M, 5, RandomStream(9, i))
        assert abs(single_shot(DenseOracle(np.eye(5)), p) - 5) < 1e-13
    e0 = draw_probe(F, 3, RandomStream(0))
    e0 = type(e0)(np.array([1.0, 0, 0]), 3.0, e0.bits_used)
    assert single_shot(DenseOracle(np.diag([7.0, 0, 0])), e0) == 21
    for i in range(10):
        p = draw_probe(H, 2, RandomStream(2, i))
        assert single_shot(DenseOracle(np.eye(2)), p) == 2


def test_hutchinson_exact_on_diagonal(rng):
    d = rng.standard_normal(9)
    shots, _ = single_shots(np.diag(d), H, 50, seed=4)
    np.testing.assert_allclose(shots, d.sum(), rtol=1e-13)


def test_identity_mubs_zero_variance():
    est = estimate_trace(np.eye(5), M, 100, seed=123)
    assert abs(est.mean - 5) < 1e-12
    assert est.sample_variance < 1e-24


def test_padding_for_non_prime_dimension():
    est = estimate_trace(np.eye(6), M, 30, seed=1)
    assert est.dim == 7
    shots, _ = single_shots(np.eye(6), M, 30, seed=1)
    assert np.all(shots >= 0) and np.all(shots <= 7 + 1e-12)


def test_single_sample_variance_is_zero(rng):
    est = estimate_trace(random_psd(5, rng), G, 1, seed=0)
    assert est.sample_variance == 0.0


@pytest.mark.parametrize("kind", list(EstimatorKind))
def test_deterministic(rng, kind):
    a = random_symmetric(11, rng)
    one = estimate_trace(a, kind, 40, seed=77)
    two = estimate_trace(a, kind, 40, seed=77)
    assert one == two
    other = estimate_trace(a, kind, 40, seed=78)
    assert other.mean != one.mean


def test_streams_are_per_sample(rng):
    a = random_symmetric(7, rng)
    full, _ = single_shots(a, H, 30, seed=5)
    # sample i depends only on (seed, i): a longer run extends a shorter one
    longer, _ = single_shots(a, H, 60, seed=5)
    np.testing.assert_array_equal(longer[:30], full)


@pytest.mark.parametrize("kind", list(EstimatorKind))
def test_statistical_unbiasedness(rng, kind):
    a = random_psd(7, rng)
    est = estimate_trace(a, kind, 4000, seed=2)
    assert abs(est.mean - np.trace(a)) < 5 * est.standard_error


def test_bits_required_table():
    assert random_bits_required(F, 1024).bits == 10
    assert random_bits_required(M, 5).bits == 6
    assert random_bits_required(H, 100).bits == 100
    g = random_bits_required(G, 10)
    assert g.bits is None and g.fixed_precision_bits == 640
    assert "unbounded" in str(g)


def test_total_bits_at_least_theoretical(rng):
    a = random_psd(13, rng)
    for kind in (F, M, H):
        est = estimate_trace(a, kind, 100, seed=0)
        assert est.total_bits >= est.theoretical_bits
    assert estimate_trace(a, H, 100, seed=0).total_bits == 1300
