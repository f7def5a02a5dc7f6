import itertools

import pytest

from phimod.field import fq_make, frobenius


def test_prime_field_is_plain_residues():
    F = fq_make(2, 1)
    assert F.q == 2
    assert F.modulus is None
    assert F.add(1, 1) == 0


def test_f4_modulus_is_unique_irreducible():
    F = fq_make(2, 2)
    assert F.modulus == (1, 1)  # x^2 + x + 1


def test_f9_modulus_is_lex_lowest():
    F = fq_make(3, 2)
    assert F.modulus == (0, 1)  # x^2 + 1


def test_invalid_inputs_rejected():
    with pytest.raises(ValueError):
        fq_make(4, 1)
    with pytest.raises(ValueError):
        fq_make(3, 3)


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (3, 2), (5, 1), (7, 2)])
def test_field_axioms_exhaustive(p, f):
    F = fq_make(p, f)
    els = list(F.elements())
    for a, b in itertools.product(els, els):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els[: min(len(els), 9)], repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.mul(a, 1) == a
    for a in F.units():
        assert F.mul(a, F.inv(a)) == 1
        assert F.pow(a, F.q - 1) == 1


@pytest.mark.parametrize("p,f", [(2, 2), (3, 2), (2, 1), (3, 1)])
def test_frobenius_is_automorphism_fixing_prime_field(p, f):
    F = fq_make(p, f)
    for a in F.elements():
        for b in F.elements():
            assert frobenius(F, F.add(a, b)) == F.add(frobenius(F, a), frobenius(F, b))
            assert frobenius(F, F.mul(a, b)) == F.mul(frobenius(F, a), frobenius(F, b))
    fixed = [a for a in F.elements() if frobenius(F, a) == a]
    assert fixed == list(range(p))


def test_frobenius_squared_is_identity_on_f4():
    F = fq_make(2, 2)
    for a in F.elements():
        assert frobenius(F, frobenius(F, a)) == a


def test_frobenius_power_on_f9_generator():
    F = fq_make(3, 2)
    # g = code 3 satisfies g^2 = -1; frobenius(g) = g^3
    g = 3
    assert frobenius(F, g) == F.pow(g, 3)
