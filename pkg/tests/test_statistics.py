import math
import random
from fractions import Fraction

import pytest

from selmerlab.curve_family import FamilyWindow, density_rho, enumerate_window
from selmerlab.statistics import (
    MomentReport,
    PrimeModel,
    cdf_distance,
    empirical_mixed_moment,
    family_scan,
    g1,
    g2,
    model_mixed_moment,
    model_mixed_moment_exact,
    moment_report_from_scan,
    normal_cdf,
    rho_sum,
)


def test_g1_examples():
    assert g1(1, 3) == 1  # A^2-4B = -11
    assert g1(1, 3, 10) == 0
    assert g1(1, 18) == 1  # -71 is prime
    assert g1(1, 18, 72) == 1
    with pytest.raises(ValueError):
        g1(2, 1)


def test_g2_examples():
    assert g2(1, 3) == 1
    assert g2(1, 18) == 1  # odd primes of 18: just 3
    assert g2(1, -2) == 0
    assert g2(0, 45, 5) == 1  # only 3 < 5
    with pytest.raises(ValueError):
        g2(1, 0)


def test_model_first_moments_vanish():
    for z in (4, 10, 50):
        assert model_mixed_moment_exact(1, 0, z) == 0
        assert model_mixed_moment_exact(0, 1, z) == 0
        assert model_mixed_moment_exact(0, 0, z) == 1


def test_model_single_prime_values():
    rho = density_rho(3)
    assert model_mixed_moment_exact(2, 0, 4) == rho * (1 - rho)
    assert model_mixed_moment_exact(1, 1, 4) == Fraction(80, 728) - rho * rho
    assert model_mixed_moment(2, 0, 4) == pytest.approx(0.22192, abs=2e-5)
    assert model_mixed_moment(1, 1, 4) == pytest.approx(-0.00061, abs=2e-5)


def test_model_exchangeable():
    for (k1, k2) in [(2, 1), (3, 0), (2, 2), (4, 1)]:
        for z in (10, 30):
            assert model_mixed_moment_exact(k1, k2, z) == model_mixed_moment_exact(k2, k1, z)


def test_model_difference_variance_identity():
    # Var(D - D') = sum over p of [2 rho (1-rho) - 2 (pBoth - rho^2)]
    for z in (10, 30, 50):
        lhs = (
            model_mixed_moment_exact(2, 0, z)
            + model_mixed_moment_exact(0, 2, z)
            - 2 * model_mixed_moment_exact(1, 1, z)
        )
        rhs = Fraction(0)
        for p, both, o1, o2, neither in PrimeModel.build(z).perPrime:
            rho = both + o1
            rhs += 2 * rho * (1 - rho) - 2 * (both - rho * rho)
        assert lhs == rhs


def test_model_degree_limit():
    with pytest.raises(ValueError):
        model_mixed_moment(4, 3, 10)
    with pytest.raises(ValueError):
        model_mixed_moment(1, 0, 2)


def test_prime_model_rows_validate():
    m = PrimeModel.build(20)
    assert [row[0] for row in m.perPrime] == [3, 5, 7, 11, 13, 17, 19]


def test_empirical_matches_scan_exactly():
    X, z = 200, 30
    curves = list(enumerate_window(FamilyWindow(X)))
    scan = family_scan(X, z)
    assert scan["n_total"] == len(curves)
    assert scan["n_square_disc"] == sum(1 for c in curves if c.twoTorsionFull)
    for (k1, k2) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (2, 2)]:
        stream = empirical_mixed_moment(iter(curves), k1, k2, z, xmax=X)
        grid = moment_report_from_scan(scan, k1, k2)
        assert stream.empirical == grid.empirical
        assert stream.sampleSize == grid.sampleSize == scan["n_stats"]


def test_empirical_zero_degree_is_one():
    curves = enumerate_window(FamilyWindow(20))
    rep = empirical_mixed_moment(curves, 0, 0, 10, xmax=20)
    assert rep.empirical == 1.0


def test_empirical_rejects_empty():
    with pytest.raises(ValueError):
        empirical_mixed_moment(iter(()), 1, 0, 10)


def test_moment_report_validation():
    with pytest.raises(ValueError):
        MomentReport(10, 10, 1, 0, 0.0, 0.0, 0, 1.0)


def test_rho_sum_monotone():
    assert rho_sum(4) == density_rho(3)
    assert rho_sum(100) > rho_sum(50) > rho_sum(10)


def test_cdf_distance_degenerate():
    assert cdf_distance([0] * 500, 100) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        cdf_distance([1, 2], 15)
    with pytest.raises(ValueError):
        cdf_distance([], 100)


def test_cdf_distance_on_synthetic_normal():
    rng = random.Random(12)
    X = 10**4
    sigma = math.sqrt(2 * math.log(math.log(X)))
    values = [rng.gauss(0, sigma) for _ in range(40000)]
    assert cdf_distance(values, X) < 0.02


def test_normal_cdf_reference_values():
    assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-12)
    assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-9)
    assert normal_cdf(-2.0) == pytest.approx(0.02275013194817921, abs=1e-9)
