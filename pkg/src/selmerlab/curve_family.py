"""The height-ordered family of curves y^2 = x^3 + A x^2 + B x.

Membership in the window of height X means |A| <= X, B^2 <= X, the cubic is
nonsingular (B and A^2-4B both nonzero), and the model is reduced: no prime
p has p^2 | A and p^4 | B simultaneously (A = 0 counts as divisible by every
p^2).  Enumeration is lexicographic in (B, A) and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .core_arith import factor, is_prime, is_square

__all__ = [
    "CurvePair",
    "FamilyWindow",
    "is_member",
    "enumerate_window",
    "count_window",
    "dual_coefficients",
    "density_delta",
    "density_rho",
    "ZETA6",
]

ZETA6 = math.pi**6 / 945.0


@dataclass(frozen=True)
class CurvePair:
    """A family member (A, B) with its isogeny-dual data.

    dualA, dualB are the coefficients of the companion curve
    y^2 = x^3 - 2A x^2 + (A^2-4B) x; disc = 16 B^2 (A^2-4B).
    """

    A: int
    B: int
    dualA: int = 0
    dualB: int = 0
    disc: int = 0
    twoTorsionFull: bool = False

    def __post_init__(self):
        A, B = self.A, self.B
        d = A * A - 4 * B
        if B == 0 or d == 0:
            raise ValueError(f"singular pair (A, B) = ({A}, {B})")
        if not _is_reduced_model(A, B):
            raise ValueError(f"non-reduced pair (A, B) = ({A}, {B})")
        object.__setattr__(self, "dualA", -2 * A)
        object.__setattr__(self, "dualB", d)
        object.__setattr__(self, "disc", 16 * B * B * d)
        object.__setattr__(self, "twoTorsionFull", d > 0 and is_square(d))


@dataclass(frozen=True)
class FamilyWindow:
    X: int
    includeSquareDisc: bool = True

    def __post_init__(self):
        if self.X < 0:
            raise ValueError("window height must be nonnegative")


def _fourth_power_primes(B: int) -> list[int]:
    """Primes p with p^4 | B."""
    out = []
    b = abs(B)
    p = 2
    while p**4 <= b:
        if b % p**4 == 0:
            out.append(p)
        p += 1 if p == 2 else 2
    return out


def _is_reduced_model(A: int, B: int) -> bool:
    for p in _fourth_power_primes(B):
        if A == 0 or A % (p * p) == 0:
            return False
    return True


def is_member(A: int, B: int, X: int) -> bool:
    """Window membership test (see module docstring)."""
    if abs(A) > X or B == 0 or B * B > X:
        return False
    if A * A - 4 * B == 0:
        return False
    return _is_reduced_model(A, B)


def dual_coefficients(A: int, B: int) -> tuple[int, int]:
    """Coefficients (-2A, A^2-4B) of the degree-2 isogenous companion curve."""
    if B * (A * A - 4 * B) == 0:
        raise ValueError("singular input")
    return (-2 * A, A * A - 4 * B)


def enumerate_window(w: FamilyWindow) -> Iterator[CurvePair]:
    """Yield each member exactly once, ordered lexicographically by (B, A)."""
    X = w.X
    bmax = math.isqrt(X)
    for B in range(-bmax, bmax + 1):
        if B == 0:
            continue
        moduli = [p * p for p in _fourth_power_primes(B)]
        for A in range(-X, X + 1):
            if moduli and ((A == 0) or any(A % m == 0 for m in moduli)):
                continue
            if A * A == 4 * B:
                continue
            c = CurvePair(A, B)
            if not w.includeSquareDisc and c.twoTorsionFull:
                continue
            yield c


def count_window(X: int) -> tuple[int, float]:
    """Exact member count and the asymptotic prediction 4 X^1.5 / zeta(6).

    The count is closed-form per B column (inclusion-exclusion over the
    reduction moduli), so this is O(sqrt(X)) and exact.
    """
    count = 0
    bmax = math.isqrt(X)
    for B in range(-bmax, bmax + 1):
        if B == 0:
            continue
        moduli = [p * p for p in _fourth_power_primes(B)]
        allowed = _count_allowed(X, moduli)
        # remove the two singular A values when A^2 = 4B has integer roots
        if B > 0 and is_square(B):
            a = 2 * math.isqrt(B)
            if a <= X:
                for s in (a, -a):
                    if not (moduli and (s == 0 or any(s % m == 0 for m in moduli))):
                        allowed -= 1
        count += allowed
    predicted = 4.0 * X**1.5 / ZETA6
    return count, predicted


def _count_allowed(X: int, moduli: list[int]) -> int:
    # |{A in [-X, X]}| minus those divisible by any modulus (A=0 included
    # in every modulus class).
    total = 2 * X + 1
    k = len(moduli)
    if k == 0:
        return total
    excluded = 0
    for mask in range(1, 1 << k):
        l = 1
        for i in range(k):
            if mask >> i & 1:
                l = l * moduli[i] // math.gcd(l, moduli[i])
        term = 2 * (X // l) + 1
        excluded += term if bin(mask).count("1") % 2 else -term
    return total - excluded


def density_delta(q: int, a: int, b: int) -> Fraction:
    """Product over p | q of the local residue-class density of (a, b) mod p.

    Per prime: p^4/(p^6-1) unless p divides both a and b, in which case
    (p^4-1)/(p^6-1).  q must be squarefree and positive.
    """
    if q < 1:
        raise ValueError("q must be a positive squarefree integer")
    out = Fraction(1)
    for p, e in factor(q).factors:
        if e > 1:
            raise ValueError(f"{q} is not squarefree")
        if a % p == 0 and b % p == 0:
            out *= Fraction(p**4 - 1, p**6 - 1)
        else:
            out *= Fraction(p**4, p**6 - 1)
    return out


def density_rho(p: int) -> Fraction:
    """Probability (p^5-1)/(p^6-1) that a fixed odd prime divides B
    (equivalently A^2-4B) over the family."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    return Fraction(p**5 - 1, p**6 - 1)
