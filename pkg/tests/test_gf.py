import random

import pytest

from twistrank.gf import MAX_P, Flavor, build_field, is_prime

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def all_fields_q_le(limit):
    fields = []
    for p in range(2, limit + 1):
        if is_prime(p):
            fields.append(build_field(p, Flavor.SYMPLECTIC))
            if p * p <= limit:
                fields.append(build_field(p, Flavor.UNITARY))
    return fields


def test_build_field_symplectic():
    field = build_field(2, Flavor.SYMPLECTIC)
    assert field.q == 2
    assert field.epsilon == 1
    assert field.modulus is None


def test_build_field_unitary_f4_modulus():
    field = build_field(2, Flavor.UNITARY)
    assert field.q == 4
    assert field.epsilon * 2 == 1
    # x^2+x+1 is the only monic irreducible quadratic over F_2: check all four
    irreducible = []
    for a1 in range(2):
        for a0 in range(2):
            if all((r * r + a1 * r + a0) % 2 != 0 for r in range(2)):
                irreducible.append((a1, a0))
    assert irreducible == [(1, 1)]
    assert field.modulus == (1, 1)


def test_build_field_unitary_f9_modulus():
    field = build_field(3, Flavor.UNITARY)
    assert field.q == 9
    # -1 is a non-residue mod 3, so the modulus is x^2 + 1; confirm no roots
    assert field.modulus == (0, 1)
    assert all((r * r + 1) % 3 != 0 for r in range(3))


def test_build_field_rejects_nonprime():
    with pytest.raises(ValueError):
        build_field(10, Flavor.SYMPLECTIC)
    with pytest.raises(ValueError):
        build_field(1, Flavor.UNITARY)


def test_build_field_rejects_oversized_prime():
    with pytest.raises(ValueError):
        build_field(65537, Flavor.SYMPLECTIC)
    assert MAX_P == 1 << 15


def test_f4_multiplication_by_hand():
    field = build_field(2, Flavor.UNITARY)
    x = field.gen()
    assert x * x == field.elem(1, 1)  # x^2 = x + 1


def test_multiplicative_identity():
    for field in all_fields_q_le(25):
        one = field.one()
        for a in field.elements():
            assert a * one == a


def test_f3_inverse_of_two():
    field = build_field(3, Flavor.SYMPLECTIC)
    assert field.elem(2).inv() == field.elem(2)


def test_inverse_of_zero_raises():
    for flavor in Flavor:
        field = build_field(3, flavor)
        with pytest.raises(ZeroDivisionError):
            field.zero().inv()


def test_inverse_times_self_is_one():
    for field in all_fields_q_le(49):
        one = field.one()
        for a in field.elements():
            if a:
                assert a * a.inv() == one


def test_conj_identity_on_prime_field():
    for p in SMALL_PRIMES:
        field = build_field(p, Flavor.SYMPLECTIC)
        for a in field.elements():
            assert a.conj() == a


def test_conj_f4():
    field = build_field(2, Flavor.UNITARY)
    x = field.gen()
    assert x.conj() == field.elem(1, 1)  # x^2 = x + 1


def test_conj_f9():
    field = build_field(3, Flavor.UNITARY)
    x = field.gen()
    assert x.conj() == -x  # x^3 = x * x^2 = -x with modulus x^2 + 1


def test_conj_fixes_prime_subfield_in_extension():
    field = build_field(5, Flavor.UNITARY)
    for c0 in range(5):
        assert field.elem(c0).conj() == field.elem(c0)


def test_field_axioms_on_seeded_random_triples():
    for field in [build_field(13, Flavor.SYMPLECTIC), build_field(7, Flavor.UNITARY)]:
        rng = random.Random(20240601)
        elems = list(field.elements())
        for _ in range(1000):
            a, b, c = (rng.choice(elems) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a + b == b + a
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c


def test_conj_is_multiplicative_involution_exhaustive():
    for field in all_fields_q_le(49):
        for a in field.elements():
            assert a.conj().conj() == a
            for b in field.elements():
                assert (a * b).conj() == a.conj() * b.conj()


def test_multiplicative_group_order_exhaustive():
    for field in all_fields_q_le(49):
        one = field.one()
        for a in field.elements():
            if a:
                assert a ** (field.q - 1) == one


def test_pow_negative_exponent():
    field = build_field(5, Flavor.UNITARY)
    for a in field.elements():
        if a:
            assert a**-1 == a.inv()
            assert a**-3 == (a * a * a).inv()


def test_int_coercion_in_arithmetic():
    field = build_field(7, Flavor.SYMPLECTIC)
    a = field.elem(3)
    assert a + 5 == field.elem(1)
    assert 2 * a == field.elem(6)
    assert a - 10 == field.elem(0)


def test_mixed_field_arithmetic_rejected():
    a = build_field(3, Flavor.SYMPLECTIC).elem(1)
    b = build_field(5, Flavor.SYMPLECTIC).elem(1)
    with pytest.raises(ValueError):
        a + b


def test_epsilon_is_exact_rational():
    sym = build_field(3, Flavor.SYMPLECTIC)
    uni = build_field(3, Flavor.UNITARY)
    # q^epsilon = p holds exactly in both flavors
    assert sym.q ** sym.epsilon.numerator == sym.p ** sym.epsilon.denominator
    assert uni.q ** uni.epsilon.numerator == uni.p ** uni.epsilon.denominator
