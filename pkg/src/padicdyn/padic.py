"""Exact arithmetic in Z/p^K viewed as the p-adic integers truncated to K digits.

Every value is an immutable residue in [0, p^K) together with its prime and
digit count. All operations are exact modulo p^K; magnitudes are carried as
integer valuation exponents, never as floats. Residues are plain Python
integers, so p^K may exceed the machine word without any special handling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .errors import DomainError


def is_prime(n: int) -> bool:
    """Trial-division primality test; intended for desk-scale moduli."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    f = 3
    r = isqrt(n)
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, as {prime: multiplicity}."""
    if n <= 0:
        raise ValueError("factorize needs a positive integer")
    out: dict[int, int] = {}
    while n % 2 == 0:
        out[2] = out.get(2, 0) + 1
        n //= 2
    f = 3
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def int_valuation(n: int, p: int) -> int:
    """Exponent of p in n, for n != 0."""
    if n == 0:
        raise ValueError("valuation of 0 is unbounded; handle separately")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, slots=True)
class Valuation:
    """A p-adic valuation known to finite precision.

    ``value`` is the exact exponent when the residue does not vanish; ``None``
    means the residue is 0 mod p^K, so only the lower bound "at least
    ``precision``" is known. The norm is the exponent -value; it is exposed as
    an integer, never a float.
    """

    value: int | None
    precision: int

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def capped(self) -> int:
        """The exponent, with the sentinel collapsed to the precision bound."""
        return self.precision if self.value is None else self.value

    def at_least(self, k: int) -> bool:
        return self.capped() >= k

    def equals_exactly(self, k: int) -> bool:
        return self.value == k

    @property
    def norm_exponent(self) -> int:
        """Exponent e with |x|_p = p^e (upper bound -precision at the sentinel)."""
        return -self.capped()

    def __str__(self) -> str:
        if self.value is None:
            return f">={self.precision}"
        return str(self.value)


@dataclass(frozen=True, slots=True)
class PadicInt:
    """An element of Z_p known to absolute precision ``precision`` digits.

    Two values interoperate only if both prime and precision match; mixing
    them raises :class:`DomainError`. Instances are immutable and safe to
    share across threads.
    """

    prime: int
    precision: int
    residue: int

    def __post_init__(self) -> None:
        if not is_prime(self.prime):
            raise DomainError(f"{self.prime} is not prime")
        if self.precision < 1:
            raise DomainError("precision must be at least 1 digit")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    # -- construction -------------------------------------------------

    @classmethod
    def from_integer(cls, z: int, p: int, K: int) -> "PadicInt":
        """Embed an integer; negatives wrap to their residue mod p^K."""
        return cls(p, K, z)

    @classmethod
    def from_rational(cls, num: int, den: int, p: int, K: int) -> "PadicInt":
        """Embed num/den, which must be a p-adic integer (p does not divide den)."""
        if den == 0:
            raise ValueError("zero denominator")
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        if den % p == 0:
            raise DomainError(f"{num}/{den} is not a {p}-adic integer")
        m = p**K
        return cls(p, K, num * pow(den, -1, m))

    @classmethod
    def zero(cls, p: int, K: int) -> "PadicInt":
        return cls(p, K, 0)

    @classmethod
    def one(cls, p: int, K: int) -> "PadicInt":
        return cls(p, K, 1)

    # -- ring structure -----------------------------------------------

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def _check_compatible(self, other: "PadicInt") -> None:
        if self.prime != other.prime or self.precision != other.precision:
            raise DomainError(
                f"mixed operands: ({self.prime}, K={self.precision}) vs "
                f"({other.prime}, K={other.precision})"
            )

    def __add__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return PadicInt(self.prime, self.precision, self.residue + other.residue)

    def __sub__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return PadicInt(self.prime, self.precision, self.residue - other.residue)

    def __mul__(self, other: "PadicInt") -> "PadicInt":
        self._check_compatible(other)
        return PadicInt(self.prime, self.precision, self.residue * other.residue)

    def __neg__(self) -> "PadicInt":
        return PadicInt(self.prime, self.precision, -self.residue)

    def pow_nat(self, e: int) -> "PadicInt":
        """x^e for a natural exponent, by square-and-multiply mod p^K."""
        if e < 0:
            raise DomainError("pow_nat takes a non-negative exponent")
        m = self.modulus
        result = 1
        base = self.residue
        while e:
            if e & 1:
                result = (result * base) % m
            base = (base * base) % m
            e >>= 1
        return PadicInt(self.prime, self.precision, result)

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def invert(self) -> "PadicInt":
        if not self.is_unit():
            raise DomainError("only units are invertible in Z_p")
        return PadicInt(self.prime, self.precision, pow(self.residue, -1, self.modulus))

    # -- metric structure ----------------------------------------------

    def valuation(self) -> Valuation:
        if self.residue == 0:
            return Valuation(None, self.precision)
        return Valuation(int_valuation(self.residue, self.prime), self.precision)

    def dist(self, other: "PadicInt") -> Valuation:
        """Valuation of the difference; the metric carried as an exponent."""
        return (self - other).valuation()

    # -- digits and rendering -------------------------------------------

    def digits(self) -> tuple[int, ...]:
        """Base-p digits a_0..a_{K-1} with residue = sum a_i p^i."""
        out = []
        n = self.residue
        for _ in range(self.precision):
            n, d = divmod(n, self.prime)
            out.append(d)
        return tuple(out)

    def digit_text(self) -> str:
        """Canonical textual form: digits high to low, base and digit count."""
        ds = " ".join(str(d) for d in reversed(self.digits()))
        return f"{ds} (base {self.prime}, {self.precision} digits)"

    def __str__(self) -> str:
        return f"{self.residue} = {self.digit_text()}"


@dataclass(frozen=True, slots=True)
class Ball:
    """The closed ball of radius p^-radius_exp around ``center``.

    Membership is residue congruence mod p^radius_exp, so every member is
    also a center of the same ball.
    """

    center: PadicInt
    radius_exp: int

    def __post_init__(self) -> None:
        if not 0 <= self.radius_exp <= self.center.precision:
            raise DomainError(
                f"ball radius exponent {self.radius_exp} outside [0, {self.center.precision}]"
            )

    @property
    def prime(self) -> int:
        return self.center.prime

    def contains_residue(self, r: int) -> bool:
        q = self.prime**self.radius_exp
        return (r - self.center.residue) % q == 0

    def contains(self, x: PadicInt) -> bool:
        self.center._check_compatible(x)
        return self.contains_residue(x.residue)

    def members(self) -> list[int]:
        """All residues mod p^K lying in the ball, ascending."""
        q = self.prime**self.radius_exp
        first = self.center.residue % q
        return list(range(first, self.center.modulus, q))


@dataclass(frozen=True, slots=True)
class Sphere:
    """Points at exact distance p^-radius_exp from ``center``.

    At precision K the condition "distance exponent equals radius_exp" is
    decidable only for radius_exp < K, which is enforced here.
    """

    center: PadicInt
    radius_exp: int

    def __post_init__(self) -> None:
        if not 1 <= self.radius_exp < self.center.precision:
            raise DomainError(
                f"sphere radius exponent {self.radius_exp} outside [1, {self.center.precision - 1}]"
            )

    @property
    def prime(self) -> int:
        return self.center.prime

    def contains_residue(self, r: int) -> bool:
        d = (r - self.center.residue) % self.center.modulus
        if d == 0:
            return False
        return int_valuation(d, self.prime) == self.radius_exp

    def contains(self, x: PadicInt) -> bool:
        self.center._check_compatible(x)
        return self.contains_residue(x.residue)

    def members(self) -> list[int]:
        """All residues mod p^K at exact distance p^-radius_exp, ascending.

        Count is (p-1) * p^(K - radius_exp - 1).
        """
        p = self.prime
        low = self.prime**self.radius_exp
        out = []
        for t in range(1, self.center.modulus // low):
            if t % p != 0:
                out.append((self.center.residue + t * low) % self.center.modulus)
        out.sort()
        return out


def ball_members(b: Ball) -> list[int]:
    return b.members()


def sphere_members(s: Sphere) -> list[int]:
    return s.members()


def unit_sphere_around_one(p: int, level: int, precision: int) -> Sphere:
    """The sphere of radius p^-level around 1, the phase space of the dynamics."""
    return Sphere(PadicInt.one(p, precision), level)


def euler_phi_prime_power(p: int, l: int) -> int:
    """Order of the unit group mod p^l."""
    return (p - 1) * p ** (l - 1)
