"""Multiplicative structure of the units mod p^l: orders, generator tests,
generated sets, and the level-consistency facts the dynamics verdicts rest on.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import DomainError, ResourceError
from .padic import euler_phi_prime_power, factorize, is_prime

DEFAULT_RESIDUE_CAP = 10**7


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


def multiplicative_order(n: int, p: int, l: int) -> int:
    """Least N >= 1 with n^N = 1 mod p^l.

    Factors the group order (p-1) * p^(l-1) by trial division and descends
    through its divisors; desk-scale p only.
    """
    _require_prime(p)
    if l < 1:
        raise DomainError("level must be at least 1")
    if gcd(n, p) != 1:
        raise DomainError(f"{n} is not a unit mod {p}^{l}")
    modulus = p**l
    order = euler_phi_prime_power(p, l)
    primes = set(factorize(p - 1))
    if l >= 2:
        primes.add(p)
    for q in sorted(primes):
        while order % q == 0 and pow(n, order // q, modulus) == 1:
            order //= q
    return order


@dataclass(frozen=True, slots=True)
class UnitGroupReport:
    """Order data for one element of the units mod p^l."""

    p: int
    l: int
    group_order: int
    element: int
    element_order: int
    is_generator: bool


def unit_group_report(n: int, p: int, l: int) -> UnitGroupReport:
    order = multiplicative_order(n, p, l)
    group_order = euler_phi_prime_power(p, l)
    return UnitGroupReport(p, l, group_order, n, order, order == group_order)


def is_generator_mod_p2(n: int, p: int) -> bool:
    """Whether n generates the full unit group mod p^2 (order p(p-1)).

    This is the master criterion every dynamics verdict reduces to. Undefined
    for p = 2: the units mod 2^l are noncyclic for l >= 3, so no single
    element can play this role.
    """
    if p == 2:
        raise DomainError("generator criterion undefined at p = 2 (noncyclic unit groups)")
    _require_prime(p)
    return multiplicative_order(n, p, 2) == p * (p - 1)


def generated_set(n: int, modulus: int, cap: int = DEFAULT_RESIDUE_CAP) -> list[int]:
    """The multiplicative cycle {n, n^2, ..., 1} mod modulus, in generation order."""
    if modulus < 2:
        raise DomainError("modulus must be at least 2")
    if gcd(n, modulus) != 1:
        raise DomainError(f"{n} is not coprime to {modulus}")
    if modulus > cap:
        raise ResourceError(f"modulus {modulus} exceeds residue cap {cap}")
    out = []
    x = n % modulus
    while True:
        out.append(x)
        if x == 1:
            break
        x = (x * n) % modulus
    return out


@dataclass(frozen=True, slots=True)
class LevelOrder:
    level: int
    group_order: int
    element_order: int
    is_generator: bool


@dataclass(frozen=True, slots=True)
class GeneratorConsistencyReport:
    """Orders of one element across levels 1..l_max of the prime-power tower."""

    p: int
    element: int
    levels: tuple[LevelOrder, ...]
    generator_at_2: bool
    consistent: bool  # generator at level 2 <=> generator at every level >= 2


def generator_consistency(n: int, p: int, l_max: int) -> GeneratorConsistencyReport:
    """Check that being a generator mod p^2 decides the question at all levels >= 2."""
    if p == 2:
        raise DomainError("level consistency undefined at p = 2")
    _require_prime(p)
    if l_max < 2:
        raise DomainError("l_max must be at least 2")
    levels = []
    for l in range(1, l_max + 1):
        order = multiplicative_order(n, p, l)
        group = euler_phi_prime_power(p, l)
        levels.append(LevelOrder(l, group, order, order == group))
    gen2 = levels[1].is_generator
    consistent = all(lv.is_generator == gen2 for lv in levels[1:])
    return GeneratorConsistencyReport(p, n, tuple(levels), gen2, consistent)


def noncyclic_2adic_check(l: int) -> bool:
    """True when no odd residue mod 2^l reaches the full order 2^(l-1).

    Exhaustive over the 2^(l-1) odd residues; rejects l < 3 where the group
    is still cyclic.
    """
    if l < 3:
        raise DomainError("units mod 2 and mod 4 are cyclic; need l >= 3")
    modulus = 2**l
    full = modulus // 2
    for u in range(1, modulus, 2):
        x = u
        order = 1
        while x != 1:
            x = (x * u) % modulus
            order += 1
        if order == full:
            return False
    return True


def density_check(n: int, p: int, k: int, cap: int = DEFAULT_RESIDUE_CAP) -> bool:
    """Whether the powers of n reach every unit mod p^k.

    For k >= 2 this must coincide with the mod-p^2 generator test; the two
    routes are computed independently here and a mismatch raises
    :class:`IntegrityError`.
    """
    if p == 2:
        raise DomainError("density criterion undefined at p = 2")
    _require_prime(p)
    if k < 1:
        raise DomainError("k must be at least 1")
    if gcd(n, p) != 1:
        raise DomainError(f"{n} is not a unit mod {p}")
    reached = len(generated_set(n, p**k, cap))
    dense = reached == euler_phi_prime_power(p, k)
    if k >= 2:
        from .errors import IntegrityError

        if dense != is_generator_mod_p2(n, p):
            raise IntegrityError(
                f"density of <{n}> mod {p}^{k} disagrees with the mod-{p}^2 generator test"
            )
    return dense
