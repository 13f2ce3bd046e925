"""p-adic logarithm, exponential, continuous powers x^a, and roots of unity.

The series are summed in exact integer arithmetic at a widened internal
precision: a term of the log series at index k is divided by p^v_p(k), and a
term of the exp series by p^v_p(k!), so enough guard digits are added up
front that the final result is bit-exact mod p^K. No rounding ever occurs;
a division that fails to be exact would be a bug, not a precision event.

Domains (all distances as valuation exponents):
  log: defined on dist(x, 1) >= 1, and >= 2 when p = 2;
  exp: defined on valuation(x) >= 1, and >= 2 when p = 2;
  x^a: x in the log domain (p = 2 restricted to dist(x, 1) >= 2), a in Z_p.
"""

from __future__ import annotations

from math import gcd

from .errors import DomainError, IntegrityError
from .padic import PadicInt, int_valuation


def _ilog(p: int, k: int) -> int:
    """floor(log_p(k)) for k >= 1."""
    v = 0
    q = p
    while q <= k:
        v += 1
        q *= p
    return v


def _factorial_valuation(p: int, k: int) -> int:
    """v_p(k!) by Legendre's formula."""
    total = 0
    q = p
    while q <= k:
        total += k // q
        q *= p
    return total


def padic_log(x: PadicInt) -> PadicInt:
    """log(x) = sum (-1)^(k+1) (x-1)^k / k, exact mod p^K on its domain."""
    p, K = x.prime, x.precision
    one = PadicInt.one(p, K)
    lam_val = x.dist(one)
    needed = 2 if p == 2 else 1
    if not lam_val.at_least(needed):
        raise DomainError(
            f"log needs dist(x, 1) >= {needed} at p = {p}; got {lam_val}"
        )
    if not lam_val.is_finite:
        return PadicInt.zero(p, K)
    v = lam_val.value

    k_max = 1
    while k_max * v - _ilog(p, k_max) < K:
        k_max += 1
    guard = _ilog(p, k_max) + 1
    kw = K + guard
    mod_w = p**kw

    lam = (x.residue - 1) % x.modulus
    total = 0
    for k in range(1, k_max + 1):
        vk = int_valuation(k, p) if k % p == 0 else 0
        unit = k // p**vk
        pk = pow(lam, k, p ** (kw + vk))
        term = (pk // p**vk) * pow(unit, -1, mod_w) % mod_w
        total = (total - term if k % 2 == 0 else total + term) % mod_w
    return PadicInt(p, K, total % x.modulus)


def padic_exp(x: PadicInt) -> PadicInt:
    """exp(x) = sum x^k / k!, exact mod p^K on its domain."""
    p, K = x.prime, x.precision
    xval = x.valuation()
    needed = 2 if p == 2 else 1
    if not xval.at_least(needed):
        raise DomainError(
            f"exp needs valuation(x) >= {needed} at p = {p}; got {xval}"
        )
    if not xval.is_finite:
        return PadicInt.one(p, K)
    v = xval.value

    # All terms from k_stop on have valuation k*v - v_p(k!) >= K, because
    # v_p(k!) <= (k-1)/(p-1).
    denom = v * (p - 1) - 1
    k_stop = (K * (p - 1) - 1 + denom - 1) // denom
    guard = _factorial_valuation(p, k_stop) + 1
    kw = K + guard
    mod_w = p**kw

    xi = x.residue
    total = 1
    vfact = 0
    ufact = 1  # unit part of k! mod p^kw
    for k in range(1, k_stop + 1):
        vk = int_valuation(k, p) if k % p == 0 else 0
        vfact += vk
        ufact = (ufact * (k // p**vk)) % mod_w
        pk = pow(xi, k, p ** (kw + vfact))
        term = (pk // p**vfact) * pow(ufact, -1, mod_w) % mod_w
        total = (total + term) % mod_w
    return PadicInt(p, K, total % x.modulus)


def pow_padic(x: PadicInt, a: PadicInt) -> PadicInt:
    """x^a for a p-adic exponent, computed two ways and cross-checked.

    Route one is exp(a * log x); route two is the natural power x^(a mod p^K),
    which is the truncation limit of x^a. The two agree exactly mod p^K on the
    domain; a mismatch is an implementation bug and raises IntegrityError.
    """
    x._check_compatible(a)
    p = x.prime
    needed = 2 if p == 2 else 1
    if not x.dist(PadicInt.one(p, x.precision)).at_least(needed):
        raise DomainError(
            f"powers x^a need dist(x, 1) >= {needed} at p = {p}"
        )
    analytic = padic_exp(a * padic_log(x))
    truncated = x.pow_nat(a.residue)
    if analytic != truncated:
        raise IntegrityError(
            f"x^a routes disagree at p={p}, K={x.precision}: "
            f"exp/log gave {analytic.residue}, natural power gave {truncated.residue}"
        )
    return analytic


def teichmuller(x: PadicInt) -> PadicInt:
    """The unique (p-1)-th root of unity congruent to x mod p, for odd p.

    Obtained by the p-th power stabilization x -> x^p, which converges one
    digit per step; the fixed point is checked before returning.
    """
    p, K = x.prime, x.precision
    if p == 2:
        raise DomainError("Teichmuller lifting implemented for odd p only")
    if not x.is_unit():
        raise DomainError("Teichmuller representative exists only for units")
    m = x.modulus
    y = x.residue
    for _ in range(K):
        y = pow(y, p, m)
    if pow(y, p, m) != y:
        raise IntegrityError("Teichmuller stabilization failed to reach a fixed point")
    return PadicInt(p, K, y)


def roots_of_unity(d: int, p: int, K: int) -> list[PadicInt]:
    """All solutions of x^d = 1 in Z_p at precision K, sorted by residue.

    For odd p the solutions form the cyclic group of order gcd(d, p-1): the
    residues mod p solving x^gcd = 1 are lifted with the Teichmuller map.
    """
    if p == 2:
        raise DomainError("roots of unity at p = 2 are just +-1; use odd p here")
    if d < 1:
        raise DomainError("root order must be a positive integer")
    d0 = gcd(d, p - 1)
    out = []
    for u in range(1, p):
        if pow(u, d0, p) == 1:
            root = teichmuller(PadicInt.from_integer(u, p, K))
            if root.pow_nat(d).residue != 1:
                raise IntegrityError(f"lifted root {root.residue} fails x^{d} = 1 mod {p}^{K}")
            out.append(root)
    out.sort(key=lambda r: r.residue)
    if len(out) != d0:
        raise IntegrityError(
            f"expected gcd({d}, {p - 1}) = {d0} roots, found {len(out)}"
        )
    return out
