"""Selmer groups of the two-isogeny pair via local solvability of quartic torsors.

A square class d (a squarefree integer) belongs to the group attached to the
isogeny out of y^2 = x^3 + A x^2 + B x exactly when the homogeneous space

    d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4,   (u, v) != (0, 0),

has points over R and over Q_p at every relevant place.  On the forward side
the coefficients are (a, b) = (-2A, A^2-4B) and candidate classes are
supported on the primes of A^2-4B; on the dual side they are (A, B) with
support in the primes of B.

Local solvability over Q_p is decided chart by chart: a projective point can
be scaled so that u or v is a unit, which turns the torsor into
y^2 = (integral quartic in one variable) with x, y in Z_p.  Small p (and
always p = 2) use an exhaustive residue search with exact Hensel
certificates.  Larger odd p use the same recursion driven by the mod-p shape
of the quartic: when the reduction is not a constant times a square the
incomplete character sum already forces a square value (complete for
p >= 17), so only multiple roots are descended into, and the search runs in
polylog(p).  The two deciders agree by construction and are cross-checked in
the test suite.  Precision exhaustion raises; it never silently guesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from ._polymod import pmod_trim, quadratic_roots, roots_mod_p
from .core_arith import (
    factor,
    is_prime,
    jacobi,
    signed_squarefree_divisors,
    squarefree_part,
)

__all__ = [
    "TorsorQuartic",
    "SelmerSet",
    "SolverPrecisionError",
    "solvable_real",
    "solvable_padic",
    "local_image",
    "selmer_phi",
    "selmer_phihat",
    "descent_exponent",
    "sel2_lower_bound",
    "relevant_places",
    "INF_PLACE",
]

Side = Literal["phi", "phihat"]
INF_PLACE = "inf"

# Residue scan is used below this prime bound (and always at p = 2); the
# structural decider requires p >= 17 for its character-sum step.
_SCAN_MAX_P = 13


class SolverPrecisionError(RuntimeError):
    """A local solvability search exhausted its precision budget."""


@dataclass(frozen=True)
class TorsorQuartic:
    """Homogeneous space d w^2 = d^2 u^4 + a d u^2 v^2 + b v^4."""

    d: int
    a: int
    b: int

    def __post_init__(self):
        if self.b == 0:
            raise ValueError("torsor needs b != 0")
        if self.d == 0 or squarefree_part(self.d) != self.d:
            raise ValueError(f"torsor class {self.d} is not squarefree")
        bad = set(factor(self.d).primes) - set(factor(self.b).primes)
        if bad:
            raise ValueError(f"class support {sorted(bad)} outside the primes of b = {self.b}")


@dataclass(frozen=True)
class SelmerSet:
    """A finite subgroup of square classes with its F_2-dimension."""

    side: Side
    classes: frozenset[int]
    dim: int

    def __post_init__(self):
        cl = self.classes
        if 1 not in cl:
            raise ValueError("identity class missing")
        if len(cl) != 1 << self.dim:
            raise ValueError("class count is not 2^dim")
        for x in cl:
            for y in cl:
                if squarefree_part(x * y) not in cl:
                    raise ValueError("classes not closed under multiplication mod squares")


# ---------------------------------------------------------------------------
# real place
# ---------------------------------------------------------------------------


def solvable_real(t: TorsorQuartic) -> bool:
    """Real solvability of the torsor, in closed form.

    For d > 0 the point (u, v, w) = (1, 0, sqrt(d)) always works.  For d < 0
    divide by v^4: the upward parabola q(s) = d^2 s^2 + a d s + b must take a
    value <= 0 at some s = (u/v)^2 >= 0, i.e. b <= 0, or the vertex lies at
    s > 0 with nonpositive minimum (a*d < 0 and a^2 >= 4b).
    """
    return _real_solvable(t.d, t.a, t.b)


def _real_solvable(d: int, a: int, b: int) -> bool:
    if d > 0:
        return True
    return b <= 0 or (a * d < 0 and a * a >= 4 * b)


# ---------------------------------------------------------------------------
# p-adic solvability of y^2 = f(x) with x, y in Z_p
# (integer coefficient tuples, ascending degree)
# ---------------------------------------------------------------------------


def _poly_eval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _poly_deriv(f):
    return tuple(i * c for i, c in enumerate(f) if i)


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 1 << 30
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _shift_scale(f, r: int, p: int):
    """Coefficients of g(t) = f(r + p t), computed exactly."""
    work = list(f)
    taylor = []
    while work:  # repeated synthetic division by (x - r)
        rem = work[-1]
        quot = [0] * (len(work) - 1)
        for i in range(len(work) - 2, -1, -1):
            quot[i] = rem
            rem = work[i] + rem * r
        taylor.append(rem)
        work = quot
    return tuple(c * p**k for k, c in enumerate(taylor))


def _zp_solvable_scan(f, p: int, kmax: int) -> bool:
    """Exhaustive certified search for a Z_p point of y^2 = f(x).

    Residue classes x = x0 (mod p^k) are refined until an exact value f(x0)
    is a p-adic square (giving a point with that literal x0), a Hensel
    certificate for a nearby root of f fires (a point with y = 0), or the
    class is provably empty.  Exceeding kmax raises.
    """
    while len(f) < 5:
        f = tuple(f) + (0,)
    c0, c1, c2, c3, c4 = f
    d0, d1, d2, d3 = c1, 2 * c2, 3 * c3, 4 * c4
    two = p == 2
    need = 3 if two else 1
    stack = [(x0, 1, p) for x0 in range(p - 1, -1, -1)]
    while stack:
        x0, k, q = stack.pop()  # q = p**k
        c = (((c4 * x0 + c3) * x0 + c2) * x0 + c1) * x0 + c0
        if c == 0:
            return True
        if two:
            v = (c & -c).bit_length() - 1
            if not v & 1 and (c >> v) & 7 == 1:
                return True
        else:
            v, u = 0, c
            while u % p == 0:
                u //= p
                v += 1
            if not v & 1 and jacobi(u % p, p) == 1:
                return True
        if v:  # y = 0 certificate can only fire once f(x0) is divisible by p
            fp = ((d3 * x0 + d2) * x0 + d1) * x0 + d0
            if v >= 2 * _vp(fp, p) + 1:
                return True
        if v < k and (v & 1 or k - v >= need):
            continue  # valuation and unit class pinned: no solution here
        if k >= kmax:
            raise SolverPrecisionError(
                f"residue search at p={p} exhausted modulus p^{kmax} without a certificate"
            )
        stack.extend((x0 + j * q, k + 1, q * p) for j in range(p))
    return False


def _as_const_times_square(fb, p):
    """Write a nonzero polynomial over F_p as c * h(x)^2 (h monic, deg <= 2), or None."""
    deg = len(fb) - 1
    if deg == 0:
        return fb[0], [1]
    if deg % 2:
        return None
    c = fb[-1]
    cinv = pow(c, -1, p)
    inv2 = pow(2, -1, p)
    if deg == 2:
        s = fb[1] * cinv * inv2 % p
        if fb[0] % p == c * s * s % p:
            return c, [s, 1]
        return None
    s = fb[3] * cinv * inv2 % p
    t = (fb[2] * cinv - s * s) % p * inv2 % p
    if fb[1] % p == 2 * c * s * t % p and fb[0] % p == c * t * t % p:
        return c, [t, s, 1]
    return None


def _zp_solvable_structural(f, p: int, budget: int) -> bool:
    """Z_p solvability of y^2 = f(x) for odd p >= 17 via mod-p shapes.

    If f mod p is not a constant times a perfect square, incomplete character
    sums force a nonzero square value (so a point exists).  Otherwise only
    roots of the square part can carry solutions and the search recurses into
    x = r + p t; y = 0 points at irrational p-adic roots are caught by
    simple-root lifting.
    """
    if budget < 0:
        raise SolverPrecisionError(f"structural solver at p={p} exceeded its recursion budget")
    v = min(_vp(c, p) for c in f if c)
    if v >= 2:
        e = v // 2 * 2
        return _zp_solvable_structural(tuple(c // p**e for c in f), p, budget - 1)
    if v == 1:
        h = tuple(c // p for c in f)
        if len(pmod_trim(h, p)) <= 1:
            return False  # f(x) has odd valuation 1 for every x
        hprime = _poly_deriv(h)
        for r in roots_mod_p(list(h), p):
            if _poly_eval(hprime, r) % p != 0:
                return True  # simple root of h lifts to an exact zero of f
            if _zp_solvable_structural(_shift_scale(f, r, p), p, budget - 1):
                return True
        return False
    fb = pmod_trim(f, p)
    decomp = _as_const_times_square(fb, p)
    if decomp is None:
        return True  # some residue already gives a nonzero square value
    c, h = decomp
    if jacobi(c, p) == 1:
        return True  # any x off the roots of h works
    if len(h) == 1:
        return False  # constant non-square: value class pinned everywhere
    roots = [(-h[0]) % p] if len(h) == 2 else quadratic_roots(h[0], h[1], 1, p)
    return any(_zp_solvable_structural(_shift_scale(f, r, p), p, budget - 1) for r in roots)


def _chart_solvable(f, p: int, force: str | None = None) -> bool:
    """Z_p solvability of y^2 = f(x) for one (biquadratic) torsor chart."""
    e = min(_vp(c, p) for c in f if c)
    if e >= 2:
        f = tuple(c // p ** (e // 2 * 2) for c in f)  # y-rescaling
    c0, _, c2, _, c4 = f
    disc = 16 * c4 * c0 * (c2 * c2 - 4 * c4 * c0) ** 2
    if disc == 0:
        raise ValueError("degenerate chart quartic")
    vd = _vp(disc, p)
    method = force or ("scan" if (p == 2 or p <= _SCAN_MAX_P) else "structural")
    if method == "scan":
        return _zp_solvable_scan(f, p, vd + 6)
    return _zp_solvable_structural(f, p, vd + 10)


def _torsor_solvable_at(d: int, a: int, b: int, p: int, force: str | None = None) -> bool:
    if d == 1:
        return True  # (u, v, w) = (1, 0, 1)
    # chart v = 1 (u a unit), then chart u = 1; y = d*w absorbs the class.
    if _chart_solvable((b * d, 0, a * d * d, 0, d**3), p, force):
        return True
    return _chart_solvable((d**3, 0, a * d * d, 0, b * d), p, force)


def solvable_padic(t: TorsorQuartic, p: int) -> bool:
    """Whether the torsor has a Q_p point."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return _torsor_solvable_at(t.d, t.a, t.b, p)


# ---------------------------------------------------------------------------
# local images and Selmer sets
# ---------------------------------------------------------------------------


def _square_class(d: int, v) -> tuple:
    """Tag identifying the class of a nonzero integer in Q_v*/(Q_v*)^2."""
    if v == INF_PLACE:
        return (1 if d > 0 else -1,)
    if v == 2:
        e = _vp(d, 2)
        return (e & 1, (d >> e) % 8)
    e = _vp(d, v)
    return (e & 1, jacobi((d // v**e) % v, v))


def _class_reps(v) -> list[int]:
    if v == INF_PLACE:
        return [1, -1]
    if v == 2:
        return [1, -1, 5, -5, 2, -2, 10, -10]
    n = 2
    while jacobi(n, v) != -1:
        n += 1
    return [1, n, v, n * v]


def _group_mul(x: tuple, y: tuple, v) -> tuple:
    if v == INF_PLACE:
        return (x[0] * y[0],)
    if v == 2:
        return ((x[0] + y[0]) & 1, x[1] * y[1] % 8)
    return ((x[0] + y[0]) & 1, x[1] * y[1])


def _span(tags: set[tuple], v) -> set[tuple]:
    out = set(tags)
    frontier = list(tags)
    while frontier:
        t = frontier.pop()
        for u in list(out):
            w = _group_mul(t, u, v)
            if w not in out:
                out.add(w)
                frontier.append(w)
    return out


def _local_image_tags(a: int, b: int, v, closure_shortcut: bool = False) -> set[tuple]:
    """Square-class tags whose torsor (with coefficients a, b) is Q_v-solvable.

    With closure_shortcut the image is only probed on classes not already
    generated by confirmed members (the image of a homomorphism is a
    subgroup); without it every class is tested and closure is asserted.
    """
    if v == INF_PLACE:
        tags = {(1,)}
        if _real_solvable(-1, a, b):
            tags.add((-1,))
        return tags
    nclasses = 8 if v == 2 else 4
    tags = {_square_class(1, v)}
    for r in _class_reps(v):
        if r == 1:
            continue
        t = _square_class(r, v)
        if closure_shortcut and (t in tags or len(tags) == nclasses):
            continue
        if _torsor_solvable_at(r, a, b, v):
            if closure_shortcut:
                tags = _span(tags | {t}, v)
            else:
                tags.add(t)
    if not closure_shortcut:
        for x in tags:
            for y in tags:
                if _group_mul(x, y, v) not in tags:
                    raise AssertionError(
                        f"local image at v={v} for (a, b)=({a}, {b}) is not a subgroup"
                    )
    return tags


def local_image(A: int, B: int, v, side: Side) -> set[int]:
    """Subgroup of Q_v*/(Q_v*)^2 cut out by solvable torsors, as canonical reps.

    v is a prime or the string "inf".  Representatives are {1, -1} at the
    real place, {1, n, p, n p} with n the least positive non-residue at odd
    p, and {+-1, +-2, +-5, +-10} at 2.
    """
    if B * (A * A - 4 * B) == 0:
        raise ValueError("singular curve")
    a, b = _side_coefficients(A, B, side)
    tags = _local_image_tags(a, b, v)
    return {r for r in _class_reps(v) if _square_class(r, v) in tags}


def _side_coefficients(A: int, B: int, side: Side) -> tuple[int, int]:
    if side == "phi":
        return (-2 * A, A * A - 4 * B)
    if side == "phihat":
        return (A, B)
    raise ValueError(f"unknown side {side!r}")


def relevant_places(A: int, B: int, d: int = 1) -> list:
    """Places where a torsor over this curve can fail: inf, 2, odd p | d*B*(A^2-4B)."""
    n = B * (A * A - 4 * B) * d
    odd = sorted(p for p in factor(n).primes if p != 2)
    return [INF_PLACE, 2] + odd


def _selmer(A: int, B: int, side: Side) -> SelmerSet:
    a, b = _side_coefficients(A, B, side)
    kernel = (A * A - 4 * B) if side == "phi" else B
    images = {v: _local_image_tags(a, b, v) for v in relevant_places(A, B) if v != INF_PLACE}
    classes = set()
    for d in signed_squarefree_divisors(kernel):
        if not _real_solvable(d, a, b):
            continue
        if all(_square_class(d, v) in tags for v, tags in images.items()):
            classes.add(d)
    forced = squarefree_part(kernel)
    if forced not in classes:
        raise AssertionError(f"forced class {forced} missing from side {side} at ({A}, {B})")
    n = len(classes)
    if n & (n - 1):
        raise AssertionError(f"class count {n} is not a power of two at ({A}, {B})")
    return SelmerSet(side, frozenset(classes), n.bit_length() - 1)


def selmer_phi(A: int, B: int) -> SelmerSet:
    """Everywhere-locally-solvable classes supported on A^2-4B, for torsor
    coefficients (-2A, A^2-4B)."""
    return _selmer(A, B, "phi")


def selmer_phihat(A: int, B: int) -> SelmerSet:
    """Everywhere-locally-solvable classes supported on B, for torsor
    coefficients (A, B)."""
    return _selmer(A, B, "phihat")


def descent_exponent(A: int, B: int) -> int:
    """dim of the forward Selmer group minus dim of the dual one."""
    return selmer_phi(A, B).dim - selmer_phihat(A, B).dim


def sel2_lower_bound(A: int, B: int) -> int:
    """Certified lower bound for the F_2-dimension of the full 2-Selmer group.

    The forward group maps onto a subgroup of the 2-Selmer group with kernel
    of dimension at most 1, so dim - 1 (clamped at 0) is always safe.
    """
    return max(0, selmer_phi(A, B).dim - 1)
