"""Prime field arithmetic.

Scalars are plain Python ints in ``range(p)``; :class:`PrimeField` bundles the
few operations that need the modulus.  Keeping them as ints keeps the sparse
dictionaries used everywhere else cheap.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb


class FieldError(ValueError):
    """Raised for inputs outside F_p (non-invertible denominators, bad p)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def embed_rational(num: int, den: int, p: int) -> int:
    """Image of num/den in F_p; the denominator must be prime to p."""
    if den % p == 0:
        raise FieldError(f"denominator {den} is not invertible mod {p}")
    return num * pow(den, -1, p) % p


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p via Lucas' theorem."""
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while n or k:
        n_d, k_d = n % p, k % p
        if k_d > n_d:
            return 0
        result = result * comb(n_d, k_d) % p
        n //= p
        k //= p
    return result


class PrimeField:
    """F_p for an odd prime p."""

    def __init__(self, p: int):
        if p == 2 or not is_prime(p):
            raise FieldError(f"p must be an odd prime, got {p}")
        self.p = p

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("F", self.p))

    def __call__(self, x: int) -> int:
        return x % self.p

    def frac(self, num: int, den: int = 1) -> int:
        return embed_rational(num, den, self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise FieldError("0 has no inverse")
        return pow(a, -1, self.p)

    def neg(self, a: int) -> int:
        return -a % self.p

    def binom(self, n: int, k: int) -> int:
        return binom_mod_p(n, k, self.p)

    def elements(self):
        return range(self.p)

    def half(self) -> int:
        return self.inv(2)

    def kappa(self, N: int) -> int:
        """kappa = N/2 - 1 as an element of F_p."""
        return self.frac(N - 2, 2)


@lru_cache(maxsize=None)
def factorial_mod(n: int, p: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out = out * k % p
    return out
