from functools import lru_cache

from .errors import ModulusError, ModulusMismatch

MAX_PRIME = 97
MAX_LEVEL = 2


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_modulus(p, n):
    """ Validate the (p, n) pair and return the modulus p**n. """
    if not is_prime(p) or p <= 3:
        raise ModulusError(f"p must be a prime larger than 3, got {p}")
    if p > MAX_PRIME:
        raise ModulusError(f"p={p} is above the supported cap {MAX_PRIME}")
    if n not in range(1, MAX_LEVEL + 1):
        raise ModulusError(f"level n must be 1 or 2, got {n}")
    return p ** n


@lru_cache(maxsize=None)
def split_modulus(q):
    """ q = p**n -> (p, n); raises ModulusError for anything out of range. """
    for p in range(5, MAX_PRIME + 1):
        if not is_prime(p):
            continue
        if q == p:
            return p, 1
        if q == p * p:
            return p, 2
    raise ModulusError(f"modulus {q} is not p or p^2 for a prime 3 < p <= {MAX_PRIME}")


def same_modulus(*moduli):
    first = moduli[0]
    for m in moduli[1:]:
        if m != first:
            raise ModulusMismatch(f"moduli differ: {first} vs {m}")
    return first


class Residue:
    """ An element of Z/qZ with q = p^n. """

    __slots__ = ("value", "modulus")

    def __init__(self, value, modulus):
        self.modulus = modulus
        self.value = int(value) % modulus

    def _coerce(self, other):
        if isinstance(other, Residue):
            same_modulus(self.modulus, other.modulus)
            return other.value
        return int(other)

    def __add__(self, other):
        return Residue(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return Residue(self.value - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return Residue(self._coerce(other) - self.value, self.modulus)

    def __mul__(self, other):
        return Residue(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, e):
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Residue({self.value}, {self.modulus})"

    @property
    def prime(self):
        return split_modulus(self.modulus)[0]

    def is_unit(self):
        return self.value % self.prime != 0

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.modulus}")
        return Residue(pow(self.value, -1, self.modulus), self.modulus)

    def valuation(self):
        """ p-adic valuation, with 0 mapped to n. """
        p, n = split_modulus(self.modulus)
        v, x = 0, self.value
        while v < n and x % p == 0:
            x //= p
            v += 1
        return v
