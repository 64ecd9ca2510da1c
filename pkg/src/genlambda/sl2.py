"""Integer 2x2 matrices of determinant one and their reductions mod N."""

from __future__ import annotations

import random
from math import gcd
from typing import NamedTuple


class SL2Mat(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def checked(cls, a: int, b: int, c: int, d: int) -> "SL2Mat":
        if a * d - b * c != 1:
            raise ValueError(f"det [[{a},{b}],[{c},{d}]] = {a * d - b * c} != 1")
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "SL2Mat":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "SL2Mat") -> "SL2Mat":
        return SL2Mat(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "SL2Mat":
        return SL2Mat(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "SL2Mat":
        return SL2Mat(self.d, -self.b, -self.c, self.a)

    def mod(self, n: int) -> tuple[int, int, int, int]:
        return (self.a % n, self.b % n, self.c % n, self.d % n)

    def in_gamma(self, n: int) -> bool:
        """Membership in the principal congruence subgroup of level n."""
        return self.mod(n) == (1 % n, 0, 0, 1 % n)

    def in_pm_gamma(self, n: int) -> bool:
        return self.in_gamma(n) or (-self).in_gamma(n)

    def to_list(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]


def parse_matrix(text: str) -> SL2Mat:
    a, b, c, d = (int(x) for x in text.split(","))
    return SL2Mat.checked(a, b, c, d)


def _sym(x: int, n: int) -> int:
    x %= n
    return x - n if 2 * x > n else x


def lift_sl2(a: int, b: int, c: int, d: int, n: int) -> SL2Mat:
    """An integer matrix of determinant 1 congruent to [[a,b],[c,d]] mod n.

    The target must have determinant 1 mod n. Entries are first moved to
    symmetric residues, then d is shifted by multiples of n until gcd(c, d) = 1
    and a, b are corrected by multiples of n.
    """
    if (a * d - b * c - 1) % n:
        raise ValueError(f"det [[{a},{b}],[{c},{d}]] is not 1 mod {n}")
    a, b, c, d = (_sym(x, n) for x in (a, b, c, d))
    if a * d - b * c == 1:
        return SL2Mat(a, b, c, d)
    if c == 0:
        c = n
    t = 0
    while gcd(c, d + t * n) != 1:
        t += 1
    d += t * n
    k, rem = divmod(a * d - b * c - 1, n)
    assert rem == 0
    # x0*d - y0*c = 1
    g, x0, y0 = _xgcd(d, -c)
    assert g == 1
    a -= k * n * x0
    b -= k * n * y0
    m = SL2Mat(a, b, c, d)
    assert m.det == 1
    return m


def _xgcd(x: int, y: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*x + t*y = g = gcd(x, y) >= 0."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def sl2_mod_elements(n: int) -> list[tuple[int, int, int, int]]:
    return [
        (a, b, c, d)
        for a in range(n)
        for b in range(n)
        for c in range(n)
        for d in range(n)
        if (a * d - b * c) % n == 1 % n
    ]


def coset_key(m: SL2Mat, n: int) -> tuple[int, int, int, int]:
    """Canonical label of the class of m in SL2(Z)/Gamma(n){+-1}."""
    return min(m.mod(n), (-m).mod(n))


def random_sl2(rng: random.Random, size: int = 30) -> SL2Mat:
    """A pseudo-random element of SL2(Z), built from random coprime (c, d)."""
    while True:
        c, d = rng.randint(-size, size), rng.randint(-size, size)
        if gcd(c, d) == 1:
            break
    _, x, y = _xgcd(d, -c)  # x*d - y*c = 1
    t = rng.randint(-3, 3)
    return SL2Mat.checked(x + t * c, y + t * d, c, d)


def random_gamma(rng: random.Random, n: int, size: int = 4) -> SL2Mat:
    """A pseudo-random element of Gamma(n)."""
    m = SL2Mat.identity()
    for _ in range(rng.randint(1, 4)):
        e = rng.randint(-size, size)
        gen = SL2Mat(1, n * e, 0, 1) if rng.random() < 0.5 else SL2Mat(1, 0, n * e, 1)
        m = m @ gen
    if rng.random() < 0.5:
        m = m @ lift_sl2(1, 0, 0, 1, n) @ SL2Mat(1 + n, n, -n, 1 - n)
    assert m.in_gamma(n)
    return m
