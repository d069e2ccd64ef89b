"""Divisibility, irreducibility, and unique prime factorization."""

import itertools
import random

import pytest

from oracles import planted_composite, random_prime
from holantlab.errors import DomainError
from holantlab.factor import (
    Factorization,
    divides,
    is_reducible_across,
    real_factorization,
    upf,
)
from holantlab.gadget import permute, tensor
from holantlab.scalar import EXACT, i_unit
from holantlab.signature import Signature, delta0, delta1, eq, ghz

E = EXACT.coerce


def sig(*values):
    n = len(values).bit_length() - 1
    return Signature(n, tuple(E(v) for v in values), EXACT)


def from_fractions(values, n):
    return Signature(n, tuple(E(v) for v in values), EXACT)


def shuffled_factor(g, scope, order):
    """Where a factor on `scope` lands after permute(f, order)."""
    posmap = {v: order.index(v) + 1 for v in scope}
    new_scope = tuple(sorted(posmap[v] for v in scope))
    old_sorted = sorted(scope)
    perm = [0] * len(old_sorted)
    for p in range(len(old_sorted)):
        perm[new_scope.index(posmap[old_sorted[p]])] = p + 1
    return permute(g, tuple(perm)), new_scope


def test_is_reducible_across():
    assert not is_reducible_across(eq(2), (1,))
    assert is_reducible_across(sig(1, 0, 0, 1, 2, 0, 0, 2), (1,))
    for v in (1, 2, 3):
        assert not is_reducible_across(ghz(3), (v,))
    with pytest.raises(DomainError):
        is_reducible_across(sig(0, 0, 0, 0), (1,))


def test_upf_planted_three_factor_composite():
    f = tensor(tensor(sig(1, 2), eq(2)), ghz(3))
    order = (3, 6, 1, 4, 2, 5)
    fac = upf(permute(f, order))
    assert fac.factor_count() == 3
    expected = {}
    for g, scope in ((sig(1, 2), (1,)), (eq(2), (2, 3)), (ghz(3), (4, 5, 6))):
        moved, new_scope = shuffled_factor(g, scope, order)
        expected[new_scope] = moved.normalized()[0]
    assert dict((s, g) for g, s in fac.factors) == expected
    assert fac.reconstruct() == permute(f, order)


def test_upf_reconstruction_and_scope_recovery():
    rng = random.Random(201)
    for _ in range(60):
        shapes = rng.choice([(2, 2), (1, 3), (2, 3), (1, 2, 2), (2, 2, 3)])
        values, n, blocks = planted_composite(rng, list(shapes))
        f = from_fractions(values, n)
        fac = upf(f)
        assert fac.reconstruct() == f
        assert set(fac.scopes()) == {scope for scope, _ in blocks}
        for (scope, bvals), (g, gscope) in zip(
            sorted(blocks), sorted(fac.factors, key=lambda fs: fs[1])
        ):
            assert gscope == scope
            planted = from_fractions(bvals, len(scope))
            assert planted.normalized()[0] == g


def test_upf_unique_under_variable_shuffles():
    rng = random.Random(202)
    for _ in range(40):
        shapes = rng.choice([(1, 2), (2, 2), (1, 1, 3)])
        values, n, blocks = planted_composite(rng, list(shapes))
        f = from_fractions(values, n)
        order = list(range(1, n + 1))
        rng.shuffle(order)
        order = tuple(order)
        fac = upf(permute(f, order))
        expected = {}
        for g, scope in [(g, s) for s, bv in blocks for g in [from_fractions(bv, len(s))]]:
            moved, new_scope = shuffled_factor(g, scope, order)
            expected[new_scope] = moved.normalized()[0]
        assert dict((s, g) for g, s in fac.factors) == expected


def test_upf_rejects_zero():
    with pytest.raises(DomainError):
        upf(sig(0, 0, 0, 0))


def test_upf_records_float_threshold():
    fac = upf(tensor(sig(1, 2), sig(3, 5)).to_float())
    assert fac.epsilon == pytest.approx(1e-9)
    assert fac.factor_count() == 2


def test_divides_goldens():
    scope, cof = divides(delta0(), sig(1, 0, 0, 0))
    assert scope == (1,)
    assert cof == delta0()
    assert divides(sig(1, 1), ghz(3)) is None
    scope, cof = divides(eq(2), tensor(eq(2), sig(3, 5)))
    assert scope == (1, 2)
    assert cof == sig(3, 5)
    scope, cof = divides(eq(2), eq(2).scale(E(3)))
    assert scope == (1, 2)
    assert cof.arity == 0 and cof.values == (E(3),)


def test_division_from_matching_pinned_factors():
    # If both pins of f at a fresh variable share the factor g on the same
    # scope, g divides f itself.
    rng = random.Random(203)
    found = 0
    for _ in range(200):
        gn = rng.randint(1, 2)
        hn = rng.randint(1, 2)
        g = from_fractions(random_prime(rng, gn), gn)
        h0 = Signature(
            hn, tuple(E(rng.randint(-2, 2)) for _ in range(1 << hn)), EXACT
        )
        h1 = Signature(
            hn, tuple(E(rng.randint(-2, 2)) for _ in range(1 << hn)), EXACT
        )
        if h0.is_zero and h1.is_zero:
            continue
        branch0 = tensor(delta0(), tensor(g, h0))
        branch1 = tensor(delta1(), tensor(g, h1))
        f = branch0.add(branch1)
        order = list(range(1, f.arity + 1))
        rng.shuffle(order)
        f = permute(f, tuple(order))
        result = divides(g, f)
        assert result is not None
        scope, cof = result
        complement = tuple(v for v in range(1, f.arity + 1) if v not in scope)
        placements = [
            Factorization(
                E(1), ((permute(g, sigma), scope), (cof, complement)), f.arity, EXACT
            ).reconstruct()
            for sigma in itertools.permutations(range(1, g.arity + 1))
        ]
        assert f in placements
        found += 1
    assert found >= 190


def test_divisor_scopes_disjoint_or_equal():
    # Scopes of irreducible divisors either coincide (associate factors) or
    # do not meet at all.
    rng = random.Random(204)
    for _ in range(25):
        values, n, blocks = planted_composite(rng, [2, 2])
        f = from_fractions(values, n)
        seen = []
        for scope, bvals in blocks:
            g = from_fractions(bvals, len(scope))
            result = divides(g, f)
            assert result is not None
            seen.append(set(result[0]))
        a, b = seen
        assert a == b or not (a & b)


def test_real_factorization_realifies_complex_factors():
    g1 = sig(1, 2).scale(i_unit())
    g2 = sig(3, 1).scale(i_unit().conj())
    prod = tensor(g1, g2)
    assert all(v.is_real for v in prod.values)
    fac = real_factorization(prod)
    assert fac.global_scalar.is_real
    for g, _ in fac.factors:
        assert all(v.is_real for v in g.values)
    assert fac.reconstruct() == prod


def test_real_factorization_needs_a_reducible_input():
    with pytest.raises(DomainError):
        real_factorization(ghz(4))


def test_real_factorization_property():
    rng = random.Random(205)
    done = 0
    while done < 200:
        shapes = rng.choice([(1, 2), (2, 2), (1, 3), (2, 3)])
        values, n, _ = planted_composite(rng, list(shapes))
        f = from_fractions(values, n)
        fac = real_factorization(f)
        assert fac.global_scalar.is_real
        for g, _ in fac.factors:
            assert all(v.is_real for v in g.values)
        assert fac.reconstruct() == f
        done += 1
