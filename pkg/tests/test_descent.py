import math
import random

import pytest

from selmerlab.core_arith import is_prime, primes_below, squarefree_part
from selmerlab.descent import (
    INF_PLACE,
    SelmerSet,
    TorsorQuartic,
    _chart_solvable,
    _side_coefficients,
    _square_class,
    _torsor_solvable_at,
    descent_exponent,
    local_image,
    relevant_places,
    sel2_lower_bound,
    selmer_phi,
    selmer_phihat,
    solvable_padic,
    solvable_real,
)


def test_torsor_validation():
    TorsorQuartic(-2, 0, -4)
    with pytest.raises(ValueError):
        TorsorQuartic(4, 0, -4)  # not squarefree
    with pytest.raises(ValueError):
        TorsorQuartic(3, 0, -4)  # support outside b
    with pytest.raises(ValueError):
        TorsorQuartic(1, 0, 0)


def test_solvable_real():
    assert solvable_real(TorsorQuartic(1, 5, 7))
    assert not solvable_real(TorsorQuartic(-1, 0, 1))
    assert solvable_real(TorsorQuartic(-1, 0, -4))
    # vertex cases for d < 0: need a*d < 0 and a^2 >= 4b when b > 0
    assert solvable_real(TorsorQuartic(-1, 4, 4))
    assert not solvable_real(TorsorQuartic(-1, -4, 4))


def _real_solutions_grid(d, a, b):
    # coarse numeric sweep used only as a one-sided oracle
    for u in [x / 8 for x in range(-40, 41)]:
        for v in [x / 8 for x in range(-40, 41)]:
            if u == 0 and v == 0:
                continue
            rhs = d * d * u**4 + a * d * u**2 * v**2 + b * v**4
            if d * rhs >= 0:
                return True
    return False


def test_solvable_real_against_grid():
    rng = random.Random(5)
    for _ in range(300):
        d = rng.choice([1, -1, 2, -2, 3, -3, 5, -5])
        a, b = rng.randint(-9, 9), rng.choice([i for i in range(-9, 10) if i])
        try:
            t = TorsorQuartic(d, a, b)
        except ValueError:
            continue
        if _real_solutions_grid(d, a, b):
            assert solvable_real(t), (d, a, b)


def test_solvable_padic_examples():
    assert solvable_padic(TorsorQuartic(1, 12345, 77), 7)
    assert solvable_padic(TorsorQuartic(-1, 0, 1), 3)  # w^2 = -2 in Q_3
    assert solvable_padic(TorsorQuartic(2, 0, -4), 5)  # global point (1, 1, 0)
    with pytest.raises(ValueError):
        solvable_padic(TorsorQuartic(1, 0, 1), 6)


def test_structural_matches_scan_on_random_charts():
    rng = random.Random(42)
    ps = [p for p in primes_below(60) if p >= 17]
    n = 0
    for _ in range(250):
        p = rng.choice(ps)
        d = rng.choice([-1, 2, -2, 3, p, -p, 2 * p])
        a = rng.randint(-40, 40)
        b = rng.choice(
            [rng.randint(1, 200), -rng.randint(1, 200), p * rng.randint(1, 20), -p * p * rng.randint(1, 8)]
        )
        if b == 0 or a * a == 4 * b:
            continue
        for f in [(b * d, 0, a * d * d, 0, d**3), (d**3, 0, a * d * d, 0, b * d)]:
            if 16 * f[4] * f[0] * (f[2] ** 2 - 4 * f[4] * f[0]) ** 2 == 0:
                continue
            n += 1
            assert _chart_solvable(f, p, force="structural") == _chart_solvable(f, p, force="scan"), (f, p)
    assert n > 300


def test_spot_curve_selmer_groups():
    sphi = selmer_phi(0, 1)
    assert sphi.classes == frozenset({1, -1, 2, -2}) and sphi.dim == 2
    sphh = selmer_phihat(0, 1)
    assert sphh.classes == frozenset({1}) and sphh.dim == 0
    assert descent_exponent(0, 1) == 2
    assert sel2_lower_bound(0, 1) == 1


def test_selmerset_validation():
    with pytest.raises(ValueError):
        SelmerSet("phi", frozenset({1, 2, 3}), 2)  # not closed / wrong size
    with pytest.raises(ValueError):
        SelmerSet("phi", frozenset({2, -2}), 1)


def test_local_images_at_infinity():
    assert local_image(0, 1, INF_PLACE, "phi") == {1, -1}
    assert local_image(0, 1, INF_PLACE, "phihat") == {1}
    assert local_image(0, 1, 2, "phi") == {1, -1, 5, -5, 2, -2, 10, -10}


def test_forced_classes_and_subgroup(e60_sample):
    for c in e60_sample[:40]:
        sphi, sphh = selmer_phi(c.A, c.B), selmer_phihat(c.A, c.B)
        assert 1 in sphi.classes and 1 in sphh.classes
        assert squarefree_part(c.A * c.A - 4 * c.B) in sphi.classes
        assert squarefree_part(c.B) in sphh.classes
        for s in (sphi, sphh):
            for x in s.classes:
                for y in s.classes:
                    assert squarefree_part(x * y) in s.classes


def test_local_duality_small_sample(e60_sample):
    want = {INF_PLACE: 2, 2: 8}
    for c in e60_sample[:25]:
        for v in relevant_places(c.A, c.B):
            na = len(local_image(c.A, c.B, v, "phi"))
            nb = len(local_image(c.A, c.B, v, "phihat"))
            assert na * nb == want.get(v, 4), (c.A, c.B, v)


def test_product_formula_small_sample(e60_sample):
    from selmerlab.local_analysis import tamagawa_exponent

    for c in e60_sample[:40]:
        assert tamagawa_exponent(c).total == descent_exponent(c.A, c.B), (c.A, c.B)


def test_image_invariant_under_model_rescaling(e60_sample):
    # (A, B) -> (4A, 16B) is an isomorphic model; local conditions agree
    for c in e60_sample[:8]:
        for v in relevant_places(c.A, c.B):
            for side in ("phi", "phihat"):
                a1 = local_image(c.A, c.B, v, side)
                a2 = local_image(4 * c.A, 16 * c.B, v, side)
                assert a1 == a2, (c.A, c.B, v, side)


def _search_global_point(d, a, b, bound=18):
    for u in range(0, bound + 1):
        for v in range(0, bound + 1):
            if u == v == 0:
                continue
            rhs = d * d * u**4 + a * d * u**2 * v**2 + b * v**4
            if rhs % d == 0 and rhs // d >= 0 and math.isqrt(rhs // d) ** 2 == rhs // d:
                return (u, v)
    return None


def test_rational_point_soundness(e60_sample):
    # a torsor with a global point must be solvable at every tested place
    from selmerlab.core_arith import signed_squarefree_divisors

    hits = 0
    for c in e60_sample:
        a, b = _side_coefficients(c.A, c.B, "phi")
        for d in sorted(signed_squarefree_divisors(b)):
            if _search_global_point(d, a, b) is not None:
                hits += 1
                assert solvable_real(TorsorQuartic(d, a, b))
                for p in relevant_places(c.A, c.B, d)[1:]:
                    assert _torsor_solvable_at(d, a, b, p), (c.A, c.B, d, p)
        if hits > 25:
            break
    assert hits > 10


def test_good_primes_are_automatically_solvable(e60_sample):
    rng = random.Random(17)
    checked = 0
    for c in e60_sample[:10]:
        a, b = _side_coefficients(c.A, c.B, "phi")
        bad = set(relevant_places(c.A, c.B)[1:])
        for p in rng.sample([p for p in primes_below(200) if p > 2], 8):
            if p in bad:
                continue
            for d in (1, -1):
                assert _torsor_solvable_at(d, a, b, p)
                checked += 1
    assert checked > 50


def test_square_class_tags():
    assert _square_class(-4, 2) == (0, 7)
    assert _square_class(36, 3) == (0, 1)
    assert _square_class(12, 3) == (1, 1)
    assert _square_class(3, 3) == (1, 1)
    assert _square_class(-1, INF_PLACE) == (-1,)
