"""Gadget constructions: pins, loops, mating, holographic transforms."""

import random
from fractions import Fraction

import pytest

from holantlab.errors import ArityError, DomainError
from holantlab.gadget import (
    Transform2x2,
    compose,
    compose_self,
    connect_unary,
    diagonal_transform,
    hat,
    hat_mate,
    holo,
    identity,
    interpolation_predicates,
    mate,
    merge,
    orthogonality_kind,
    pauli_x,
    pauli_z,
    permute,
    pin,
    proportional,
    reflection,
    restrict,
    rotate45,
    rotation,
    self_loop,
    t_alpha,
    t_rho,
    tensor,
    unhat,
    z_inverse,
    z_transform,
)
from holantlab.scalar import EXACT, Cyclo, i_unit
from holantlab.signature import Signature, delta0, delta1, eq, neq2

E = EXACT.coerce


def sig(*values):
    n = len(values).bit_length() - 1
    return Signature(n, tuple(E(v) for v in values), EXACT)


def random_sig(rng, n, lo=-3, hi=3):
    return Signature(n, tuple(E(rng.randint(lo, hi)) for _ in range(1 << n)), EXACT)


def test_pin_values_and_errors():
    assert pin(eq(3), 1, 1) == sig(0, 0, 0, 1)
    assert pin(eq(3), 2, 0) == sig(1, 0, 0, 0)
    for bad in (0, 4):
        with pytest.raises(DomainError):
            pin(eq(3), bad, 0)
    with pytest.raises(DomainError):
        pin(eq(3), 1, 2)


def test_pin_pin_commutes_after_index_shift():
    rng = random.Random(101)
    for _ in range(300):
        n = rng.randint(2, 6)
        f = random_sig(rng, n)
        i, j = sorted(rng.sample(range(1, n + 1), 2))
        a, b = rng.randint(0, 1), rng.randint(0, 1)
        assert pin(pin(f, i, a), j - 1, b) == pin(pin(f, j, b), i, a)


def test_pin_self_loop_commutes_after_index_shift():
    rng = random.Random(102)
    for _ in range(200):
        n = rng.randint(3, 6)
        f = random_sig(rng, n)
        i, j, k = rng.sample(range(1, n + 1), 3)
        j, k = sorted((j, k))
        a = rng.randint(0, 1)
        jj = j - (1 if j > i else 0)
        kk = k - (1 if k > i else 0)
        ii = i - (1 if i > j else 0) - (1 if i > k else 0)
        assert self_loop(pin(f, i, a), jj, kk) == pin(self_loop(f, j, k), ii, a)


def test_self_loop_default_wire_and_errors():
    assert self_loop(eq(3), 1, 2) == sig(1, 1)
    assert merge(eq(3), 1, 2) == self_loop(eq(3), 1, 2)
    full = self_loop(eq(2), 1, 2)
    assert full.arity == 0
    assert full.values == (E(2),)
    with pytest.raises(DomainError):
        self_loop(eq(3), 2, 2)


def _middle_indices(n):
    return [idx for idx in range(1 << n) if 0 < bin(idx).count("1") < n]


def _all_neq_loops_vanish(fh):
    n = fh.arity
    wire = neq2()
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            if not self_loop(fh, i, j, wire).is_zero:
                return False
    return True


def test_vanishing_merge_structure():
    # A hatted real signature whose disequality loops all vanish keeps its
    # weight only at the two endpoints, and conversely a surviving middle
    # coefficient forces some loop to survive.
    rng = random.Random(103)
    ghz_like = 0
    for _ in range(120):
        n = rng.randint(3, 5)
        f = random_sig(rng, n)
        if f.is_zero:
            continue
        fh = hat(f)
        mids_zero = all(EXACT.is_zero(fh[idx]) for idx in _middle_indices(n))
        assert _all_neq_loops_vanish(fh) == mids_zero
    # and explicitly on signatures built to satisfy the hypothesis
    for _ in range(20):
        n = rng.randint(3, 5)
        vals = [E(0)] * (1 << n)
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        vals[0] = E(a) + i_unit().scale_fraction(b)
        vals[-1] = E(a) - i_unit().scale_fraction(b)
        fh = Signature(n, tuple(vals), EXACT)
        assert all(v.is_real for v in unhat(fh).values)
        assert _all_neq_loops_vanish(fh)
        ghz_like += 1
    assert ghz_like == 20


def test_all_pins_zero_structure():
    rng = random.Random(104)
    for _ in range(120):
        n = rng.randint(2, 5)
        if rng.random() < 0.4:
            vals = [E(0)] * (1 << n)
            vals[-1] = E(rng.randint(1, 3))
        else:
            vals = [E(rng.randint(-2, 2)) for _ in range(1 << n)]
        f = Signature(n, tuple(vals), EXACT)
        pins_vanish = all(pin(f, i, 0).is_zero for i in range(1, n + 1))
        support_at_top = all(
            EXACT.is_zero(f[idx]) for idx in range((1 << n) - 1)
        )
        assert pins_vanish == support_at_top


def test_mating_symmetry_and_cauchy_schwarz():
    rng = random.Random(105)
    for _ in range(60):
        n = rng.randint(2, 5)
        f = random_sig(rng, n)
        i = rng.randint(1, n)
        m = mate(f, (i,))
        assert m.arity == 2
        assert m[1] == m[2]
        d0, d1, off = m[0].as_fraction(), m[3].as_fraction(), m[1].as_fraction()
        assert d0 >= 0 and d1 >= 0
        assert off * off <= d0 * d1


def test_mate_variable_order():
    f = tensor(delta0(), delta1())
    m = mate(f, (1, 2))
    assert m.arity == 4
    assert [idx for idx in range(16) if not EXACT.is_zero(m[idx])] == [0b0101]
    g = mate(eq(3), (1, 2))
    assert [idx for idx in range(16) if not EXACT.is_zero(g[idx])] == [0, 15]


def test_hat_mate_law():
    rng = random.Random(106)
    for _ in range(25):
        n = rng.randint(2, 4)
        f = random_sig(rng, n)
        if f.is_zero:
            continue
        i = rng.randint(1, n)
        assert hat(mate(f, (i,))) == hat_mate(hat(f), (i,))


def test_hat_of_equality_is_disequality():
    assert hat(eq(2)) == neq2()
    assert holo(eq(2), z_inverse()) == neq2()


def test_hat_unhat_round_trip():
    rng = random.Random(107)
    for _ in range(40):
        n = rng.randint(1, 5)
        f = random_sig(rng, n)
        assert unhat(hat(f)) == f


def test_holo_composes_by_matrix_product():
    rng = random.Random(108)
    f = random_sig(rng, 3)
    s, t = rotate45(), diagonal_transform(1, 2)
    assert holo(holo(f, s), t) == holo(f, t.matmul(s))
    assert holo(f, identity()) == f


def test_transform_algebra():
    assert z_transform().inverse().entries() == z_inverse().entries()
    assert pauli_x().matmul(pauli_x()).entries() == identity().entries()
    assert pauli_z().matmul(pauli_z()).entries() == identity().entries()
    assert rotate45().det() == E(1)
    assert t_alpha().d * t_alpha().d == i_unit()
    assert rotation(3, 4).is_orthogonal_up_to_scalar()
    assert reflection(3, 4).is_orthogonal_up_to_scalar()
    shear = Transform2x2(E(1), E(1), E(0), E(1))
    assert not shear.is_orthogonal_up_to_scalar()


def test_t_rho_is_a_diagonal_root_of_unity():
    one = E(1)
    for k in (1, 2, 3):
        rho = t_rho(k, 1).d
        acc, order = rho, 1
        while acc != one:
            acc = acc * rho
            order += 1
        assert order == 4 * k
        assert t_rho(k, 2).d == rho * rho


def test_orthogonality_kind():
    assert orthogonality_kind(rotation(3, 4)) == "antidiagonal-hat"
    assert orthogonality_kind(reflection(3, 4)) == "diagonal-hat"
    assert orthogonality_kind(Transform2x2(E(1), E(1), E(0), E(1))) == "neither"


def test_interpolation_predicates():
    r = interpolation_predicates(sig(1, 0, 0, 2))
    assert r.path == "exact"
    assert not r.degenerate
    assert r.eig_ratio_off_unit_circle
    r = interpolation_predicates(sig(0, 1, -1, 0))
    assert not r.eig_ratio_off_unit_circle
    r = interpolation_predicates(sig(1, 1, 1, 2), delta0())
    assert r.eig_ratio_off_unit_circle
    assert r.h_not_eigenvector
    r = interpolation_predicates(sig(1, 0, 0, 0))
    assert r.degenerate
    with pytest.raises(ArityError):
        interpolation_predicates(eq(3))
    with pytest.raises(DomainError):
        interpolation_predicates(sig(0, 0, 0, 0))


def test_proportional():
    lam = proportional(sig(2, 4), sig(1, 2))
    assert lam is not None and sig(2, 4).scale(lam) == sig(1, 2)
    assert proportional(sig(1, 0), sig(0, 1)) is None
    assert proportional(sig(1, 2), sig(2, 4)) == E(2)


def test_compose_and_compose_self():
    assert compose(eq(3), eq(3), [(3, 1)]) == eq(4)
    assert compose_self(eq(3), [(1, 2)]) == eq(4)
    assert compose(eq(2), eq(2), [(2, 1)], wire=neq2()) == neq2()


def test_permute():
    g = sig(0, 1, 2, 3)
    assert permute(g, (2, 1)) == sig(0, 2, 1, 3)
    rng = random.Random(109)
    for _ in range(30):
        n = rng.randint(2, 5)
        f = random_sig(rng, n)
        order = list(range(1, n + 1))
        rng.shuffle(order)
        inverse = [0] * n
        for pos, v in enumerate(order):
            inverse[v - 1] = pos + 1
        assert permute(permute(f, order), inverse) == f


def test_restrict_matches_iterated_pins():
    rng = random.Random(110)
    f = random_sig(rng, 4)
    assert restrict(f, {1: 1, 3: 0}) == pin(pin(f, 1, 1), 2, 0)


def test_connect_unary():
    u = Signature(1, (E(2), E(3)), EXACT)
    assert connect_unary(eq(2), 1, u) == sig(2, 3)


def test_tensor_shapes():
    assert tensor(delta0(), delta1()) == sig(0, 1, 0, 0)
    assert tensor(eq(2), eq(2)).arity == 4
