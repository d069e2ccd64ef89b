"""Tractable-class membership tests and dichotomy verdict engines."""

import random
from fractions import Fraction

import pytest

from holantlab.classify import (
    CATALOG_VERSION,
    affine_reconstruct,
    first_order_orthogonality,
    in_A,
    in_Akd,
    in_L,
    in_P,
    in_T,
    in_T1,
    monotone_normal_form,
    verdict_csp,
    verdict_csp2,
    verdict_cspk,
    verdict_holant_odd,
    verdict_holantc,
)
from holantlab.entangle import replay
from holantlab.errors import ArityError, DomainError
from holantlab.gadget import Transform2x2, hat, pin, self_loop, tensor
from holantlab.scalar import EXACT, Cyclo, i_unit
from holantlab.signature import Signature, delta0, eq, ghz, neq2, support_structure

E = EXACT.coerce


def sig(*values):
    n = len(values).bit_length() - 1
    return Signature(n, tuple(E(v) for v in values), EXACT)


def zeta12():
    return Cyclo(24, tuple(Fraction(1 if k == 2 else 0) for k in range(8)))


def random_affine_member(rng, n):
    """lambda * chi_{AX=0} * i^Q with even cross terms, built pointwise."""
    lin = [rng.randrange(4) for _ in range(n)]
    cross = {
        (a, b): 2 * rng.randrange(2)
        for a in range(n)
        for b in range(a + 1, n)
    }
    pins = [rng.choice([None, None, None, 0, 1]) for _ in range(n)]
    lam = rng.choice([E(1), E(2), i_unit(), E(-1)])
    vals = []
    for idx in range(1 << n):
        bits = [(idx >> (n - 1 - p)) & 1 for p in range(n)]
        if any(want is not None and bit != want for want, bit in zip(pins, bits)):
            vals.append(E(0))
            continue
        q = sum(c * bits[p] for p, c in enumerate(lin))
        q += sum(c * bits[a] * bits[b] for (a, b), c in cross.items())
        vals.append(lam * i_unit() ** (q % 4))
    return Signature(n, tuple(vals), EXACT)


def random_parity_member(rng, blocks):
    """Tensor of blocks each supported on one antipodal pair."""
    parts = None
    for m in blocks:
        alpha = rng.randrange(1 << m)
        vals = [E(0)] * (1 << m)
        vals[alpha] = E(rng.choice([1, 2, -1]))
        vals[(1 << m) - 1 - alpha] = E(rng.choice([0, 1, 3, -2]))
        g = Signature(m, tuple(vals), EXACT)
        parts = g if parts is None else tensor(parts, g)
    return parts


def test_in_T_and_T1():
    assert not in_T(ghz(3)).yes
    assert in_T(tensor(tensor(eq(2), eq(2)), sig(1, 7))).yes
    assert not in_T1(eq(2)).yes
    assert in_T1(tensor(sig(1, 2), sig(3, 1))).yes
    z = sig(0, 0, 0, 0)
    assert in_T(z).yes and in_T(z).certificate == {"zero": True}


def test_in_P():
    assert in_P(neq2()).yes
    assert in_P(eq(3)).yes
    r = in_P(sig(1, 1, 1, -1))
    assert not r.yes
    assert r.certificate["scope"] == (1, 2)
    assert len(r.certificate["support"]) == 4


def test_in_A_goldens():
    r = in_A(eq(3))
    assert r.yes
    assert r.certificate["q_linear"] == {} and r.certificate["q_cross"] == {}
    r = in_A(sig(1, i_unit(), i_unit(), 1))
    assert r.yes
    assert r.certificate["q_linear"] == {1: 1, 2: 1}
    assert r.certificate["q_cross"] == {(1, 2): 2}
    r = in_A(sig(1, 1, 1, i_unit()))
    assert not r.yes
    assert r.certificate == {"odd_cross_term": (1, 2), "coefficient": 1}


def test_in_A_certificate_reconstructs_the_signature():
    rng = random.Random(301)
    hits = 0
    for _ in range(100):
        n = rng.randint(1, 4)
        f = random_affine_member(rng, n)
        if f.is_zero:
            continue
        r = in_A(f)
        assert r.yes
        assert affine_reconstruct(r.certificate, n, EXACT) == f
        hits += 1
    assert hits >= 90


def test_in_L():
    assert not in_L(neq2()).yes
    assert in_L(eq(2)).yes
    assert in_L(sig(0, 0, 0, 0)).yes


def test_in_Akd():
    for d in (1, 2, 3):
        assert in_Akd(neq2(), 3, d).yes
        assert in_Akd(eq(3), 3, d).yes
        assert not in_Akd(sig(1, 1, 1, zeta12()), 3, d).yes
    with pytest.raises(DomainError):
        in_Akd(eq(2), 3, 4)


def test_A_closed_under_gadget_moves():
    rng = random.Random(302)
    checked = 0
    while checked < 150:
        f = random_affine_member(rng, rng.randint(2, 4))
        if f.is_zero or not in_A(f).yes:
            continue
        g = random_affine_member(rng, rng.randint(1, 2))
        if not g.is_zero:
            assert in_A(tensor(f, g)).yes
        assert in_A(pin(f, rng.randint(1, f.arity), rng.randint(0, 1))).yes
        if f.arity >= 3:
            wire = rng.choice([eq(2), neq2()])
            assert in_A(self_loop(f, 1, 2, wire)).yes
        checked += 1


def test_P_closed_under_gadget_moves():
    rng = random.Random(303)
    checked = 0
    while checked < 150:
        f = random_parity_member(rng, rng.choice([(2, 2), (1, 3), (2, 3)]))
        if f.is_zero or not in_P(f).yes:
            continue
        g = random_parity_member(rng, (rng.randint(1, 2),))
        if not g.is_zero:
            assert in_P(tensor(f, g)).yes
        pinned = pin(f, rng.randint(1, f.arity), rng.randint(0, 1))
        if not pinned.is_zero:
            assert in_P(pinned).yes
        looped = self_loop(f, 1, 2, rng.choice([eq(2), neq2()]))
        if not looped.is_zero:
            assert in_P(looped).yes
        checked += 1


def test_first_order_orthogonality_goldens():
    assert first_order_orthogonality(eq(2)) == E(1)
    assert first_order_orthogonality(ghz(5)) == E(1)
    assert first_order_orthogonality(sig(1, 1, 1, -1)) == E(2)
    assert first_order_orthogonality(sig(1, 1, 1, 1)) is None
    with pytest.raises(ArityError):
        first_order_orthogonality(sig(1, 1))


def test_first_order_orthogonality_transfers_through_hat():
    rng = random.Random(304)
    for _ in range(60):
        n = rng.randint(2, 4)
        f = Signature(
            n, tuple(E(rng.randint(-3, 3)) for _ in range(1 << n)), EXACT
        )
        if f.is_zero:
            continue
        mu_f = first_order_orthogonality(f)
        mu_h = first_order_orthogonality(hat(f))
        assert (mu_f is None) == (mu_h is None)
        if mu_f is not None:
            assert mu_f == mu_h


def test_binary_orthogonality_matches_matrix_test():
    rng = random.Random(305)
    for _ in range(200):
        vals = [rng.randint(-3, 3) for _ in range(4)]
        f = sig(*vals)
        if f.is_zero:
            continue
        t = Transform2x2(*(E(v) for v in vals))
        assert (first_order_orthogonality(f) is not None) == (
            t.is_orthogonal_up_to_scalar()
        )


def test_verdict_csp():
    v = verdict_csp([eq(3), neq2()])
    assert v.problem == "CSP" and v.outcome == "tractable"
    assert v.witness == {"class": "A"}
    v = verdict_csp([sig(1, 1, 1, -1)])
    assert v.outcome == "tractable"
    cert = in_A(sig(1, 1, 1, -1)).certificate
    assert cert["q_cross"] == {(1, 2): 2} and cert["q_linear"] == {}
    v = verdict_csp([sig(1, 1, 1, i_unit())])
    assert v.outcome == "hard"
    assert set(v.witness["failures"]) == {"A", "P"}


def test_verdict_csp2_and_cspk():
    assert verdict_csp2([neq2()]).outcome == "tractable"
    v = verdict_cspk([eq(5)], 3)
    assert v.outcome == "tractable"
    f = sig(1, 1, 1, i_unit())
    v = verdict_cspk([f], 3)
    scan = in_P(f).yes or any(
        in_Akd(f, 3, d).yes and in_Akd(neq2(), 3, d).yes for d in (1, 2, 3)
    )
    assert (v.outcome == "tractable") == scan


def test_verdict_holantc():
    assert verdict_holantc([eq(2)]).witness == {"class": "T"}
    assert verdict_holantc([ghz(3)]).witness == {"class": "A"}
    v = verdict_holantc([sig(3, 1, 0, 2, 1, 0, 1, 5)])
    assert v.outcome == "hard"
    assert set(v.witness["failures"]) == {
        "T",
        "A",
        "P",
        "L",
        "H->P",
        "hat->P",
        "Talpha->A",
    }
    with pytest.raises(DomainError):
        verdict_holantc([sig(1, i_unit())])


def test_verdict_holant_odd_tractable():
    v = verdict_holant_odd([sig(1, 1), eq(2)])
    assert v.outcome == "tractable"
    assert v.witness["class"] == "T"
    assert v.witness["catalog_version"] == CATALOG_VERSION
    flipped = sig(1, 0, 0, 0, 0, 0, 0, -1)
    v = verdict_holant_odd([flipped])
    assert v.outcome == "tractable"
    assert v.witness["class"] in ("P", "A")
    if v.witness["class"] == "P":
        assert in_P(flipped).yes


def test_verdict_holant_odd_hard_carries_checkable_chain():
    from holantlab.entangle import trace_is_faithful
    from holantlab.gadget import holo

    f3 = sig(1, 2, 2, 1, 2, 1, 1, 3)
    fs = [f3]
    v = verdict_holant_odd(fs)
    assert v.outcome == "hard"
    w = v.witness
    assert w["handoff"].outcome == "hard"
    assert trace_is_faithful(w["odd_normalize"], fs[w["start_index"]])
    start = holo(fs[w["reduced_index"]], w["odd_normalize"].set_transform)
    assert replay(w["reduction"], start) == w["reduction"].witness
    assert trace_is_faithful(w["reduction"], start)


def test_monotone_normal_form():
    g, flips = monotone_normal_form(neq2())
    assert flips == frozenset({2})
    assert g.support_indices() == eq(2).support_indices()
    g2, flips2 = monotone_normal_form(g)
    assert g2 == g and flips2 == frozenset()
    s_before = sorted(
        tuple(sorted(b)) for b in support_structure(neq2()).bundles
    )
    s_after = sorted(tuple(sorted(b)) for b in support_structure(g).bundles)
    assert [len(b) for b in s_before] == [len(b) for b in s_after]
