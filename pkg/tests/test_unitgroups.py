"""Orders, generators, generated sets, and 2-adic noncyclicity."""

import pytest

from padicdyn.errors import DomainError, ResourceError
from padicdyn.padic import euler_phi_prime_power
from padicdyn.unitgroups import (
    density_check,
    generated_set,
    generator_consistency,
    is_generator_mod_p2,
    multiplicative_order,
    noncyclic_2adic_check,
    unit_group_report,
)


def walked_order(n: int, modulus: int) -> int:
    x = n % modulus
    order = 1
    while x != 1:
        x = (x * n) % modulus
        order += 1
    return order


def test_order_examples():
    assert multiplicative_order(2, 3, 2) == 6
    assert multiplicative_order(4, 3, 2) == 3
    assert multiplicative_order(1, 7, 3) == 1
    assert multiplicative_order(3, 17, 2) == 272


def test_order_matches_walked_cycle_exhaustive():
    for p, l in ((3, 3), (5, 2), (7, 2)):
        m = p**l
        for n in range(1, m):
            if n % p == 0:
                continue
            assert multiplicative_order(n, p, l) == walked_order(n, m)


def test_order_divides_group_order():
    for p in (3, 5, 7):
        for l in (1, 2, 3):
            group = euler_phi_prime_power(p, l)
            for n in range(1, p**l):
                if n % p == 0:
                    continue
                assert group % multiplicative_order(n, p, l) == 0


def test_order_rejects_non_units_and_composites():
    with pytest.raises(DomainError):
        multiplicative_order(6, 3, 2)
    with pytest.raises(DomainError):
        multiplicative_order(5, 9, 2)


def test_generator_examples():
    assert is_generator_mod_p2(2, 3) is True
    assert is_generator_mod_p2(4, 3) is False
    assert is_generator_mod_p2(3, 17) is True
    with pytest.raises(DomainError):
        is_generator_mod_p2(3, 2)


def test_unit_group_report_fields():
    rep = unit_group_report(2, 3, 2)
    assert rep.group_order == 6 and rep.element_order == 6 and rep.is_generator
    rep = unit_group_report(4, 3, 2)
    assert rep.element_order == 3 and not rep.is_generator


def test_generated_sets():
    assert generated_set(4, 9) == [4, 7, 1]
    assert sorted(generated_set(2, 9)) == [1, 2, 4, 5, 7, 8]
    assert generated_set(1, 100) == [1]
    with pytest.raises(DomainError):
        generated_set(6, 9)
    with pytest.raises(ResourceError):
        generated_set(2, 10**8 + 7)


def test_generated_set_size_is_the_order():
    for p, l in ((3, 3), (5, 2)):
        m = p**l
        for n in range(2, m):
            if n % p == 0:
                continue
            assert len(generated_set(n, m)) == multiplicative_order(n, p, l)


def test_generator_consistency_examples():
    rep = generator_consistency(2, 3, 5)
    assert rep.generator_at_2 and rep.consistent
    assert all(lv.is_generator for lv in rep.levels[1:])
    rep = generator_consistency(4, 3, 5)
    assert not rep.generator_at_2 and rep.consistent
    assert not any(lv.is_generator for lv in rep.levels[1:])


def test_generator_mod_p_but_not_mod_p2():
    # 8 generates the units mod 3 but 8^2 = 64 = 1 mod 9
    rep = generator_consistency(8, 3, 5)
    assert rep.levels[0].is_generator  # level 1
    assert not rep.generator_at_2
    assert rep.consistent  # consistency concerns levels >= 2 only
    assert not any(lv.is_generator for lv in rep.levels[1:])


def test_generator_consistency_exhaustive():
    # level 2 decides every level up to 5, for all units mod p^2
    for p in (3, 5, 7, 11):
        for n in range(1, p * p):
            if n % p == 0:
                continue
            assert generator_consistency(n, p, 5).consistent


def test_noncyclic_2adic():
    for l in range(3, 11):
        assert noncyclic_2adic_check(l) is True
    with pytest.raises(DomainError):
        noncyclic_2adic_check(2)


def test_noncyclic_2adic_against_direct_max_order():
    for l in (3, 4, 5):
        m = 2**l
        max_order = max(walked_order(u, m) for u in range(1, m, 2))
        assert max_order < m // 2


def test_density_examples():
    assert density_check(2, 3, 4) is True
    assert density_check(4, 3, 2) is False
    assert density_check(2, 3, 1) is True  # primitive root mod 3
    with pytest.raises(DomainError):
        density_check(3, 2, 2)


def test_density_by_enumeration_oracle():
    # <2> mod 81 really reaches every unit
    reached = set(generated_set(2, 81))
    units = {r for r in range(81) if r % 3 != 0}
    assert reached == units


def test_density_tracks_generator_for_deep_levels():
    for p in (3, 5):
        for n in range(1, p * p):
            if n % p == 0:
                continue
            gen = is_generator_mod_p2(n, p)
            for k in (2, 3):
                assert density_check(n, p, k) == gen
