"""Divisibility and unique prime factorization of signatures.

A signature is reducible when it splits as a tensor product across some
variable cut, detected here by a rank condition on the corresponding
matrix view.  Peeling minimal split sets off the lowest variable yields
the finest factorization; it is unique up to associates and factor
order, which the canonical first-nonzero-is-one scaling pins down.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Optional

from .config import get_epsilon
from .errors import AnomalyError, BackendMismatch, DomainError
from .gadget import permute, proportional, tensor
from .signature import Signature, matrix_view
from .scalar import ExactBackend

# Trying every re-embedding of a divisor is factorial work, so cap the
# arity beyond which only the ascending embedding is attempted.
_PERMUTE_SEARCH_CAP = 6


@dataclass(frozen=True)
class Factorization:
    """A signature as global_scalar times a tensor product of primes.

    factors holds (signature, scope) pairs ordered by smallest scope
    element; scopes are 1-based variable tuples partitioning the input's
    variables.  epsilon records the rank threshold on the float backend,
    None when the arithmetic was exact.
    """

    global_scalar: object
    factors: tuple
    arity: int
    backend: object
    epsilon: Optional[float] = None

    def factor_count(self) -> int:
        return len(self.factors)

    def scopes(self):
        return tuple(scope for _, scope in self.factors)

    def reconstruct(self) -> Signature:
        """Tensor the factors back together on their scopes."""
        if not self.factors:
            return Signature(0, (self.global_scalar,), self.backend)
        combined = None
        var_order = []
        for g, scope in self.factors:
            combined = g if combined is None else tensor(combined, g)
            var_order.extend(scope)
        target = sorted(var_order)
        order = tuple(var_order.index(v) + 1 for v in target)
        return permute(combined, order).scale(self.global_scalar)


def _row_support_mask(row, is_zero) -> int:
    mask = 0
    for j, v in enumerate(row):
        if not is_zero(v):
            mask |= 1 << j
    return mask


def _rank_at_most_one(view, backend) -> bool:
    """Whether a matrix view has rank 0 or 1.

    The support must form a combinatorial rectangle, which is checked
    first as a cheap filter, then entries are cross-multiplied against
    the pivot row.
    """
    rows_n, cols_n = view.shape
    is_zero = backend.is_zero
    pivot_row = None
    pivot_mask = 0
    masks = []
    for i in range(rows_n):
        row = view.row(i)
        mask = _row_support_mask(row, is_zero)
        masks.append(mask)
        if mask and pivot_row is None:
            pivot_row = i
            pivot_mask = mask
    if pivot_row is None:
        return True
    for mask in masks:
        if mask and mask != pivot_mask:
            return False
    pr = view.row(pivot_row)
    j0 = (pivot_mask & -pivot_mask).bit_length() - 1
    p = pr[j0]
    for i in range(rows_n):
        if i == pivot_row or not masks[i]:
            continue
        row = view.row(i)
        lead = row[j0]
        for j in range(cols_n):
            if not backend.eq(row[j] * p, pr[j] * lead):
                return False
    return True


def is_reducible_across(f: Signature, subset) -> bool:
    """True iff f splits as a tensor product between subset and the rest."""
    if f.is_zero:
        raise DomainError("the zero signature has no meaningful splits")
    a = tuple(sorted(set(subset)))
    if not a or len(a) >= f.arity:
        raise DomainError("the cut must be a proper nonempty variable subset")
    return _rank_at_most_one(matrix_view(f, a), f.backend)


def _split(f: Signature, positions) -> tuple[Signature, Signature, object]:
    """Split a known rank-1 cut into (g, h, pivot) with f = g (x) h / pivot."""
    view = matrix_view(f, positions)
    rows_n, cols_n = view.shape
    be = f.backend
    pivot_row = None
    for i in range(rows_n):
        if any(not be.is_zero(v) for v in view.row(i)):
            pivot_row = i
            break
    pr = view.row(pivot_row)
    j0 = next(j for j in range(cols_n) if not be.is_zero(pr[j]))
    g = Signature(len(positions), tuple(view.entry(i, j0) for i in range(rows_n)), be)
    h = Signature(f.arity - len(positions), tuple(pr), be)
    return g, h, pr[j0]


def upf(f: Signature) -> Factorization:
    """The unique prime factorization of a nonzero signature.

    Works by repeatedly finding the smallest variable set that contains
    the lowest still-unfactored variable and splits off, which is
    exactly the scope of that variable's prime.  Subset enumeration is
    exponential in the arity; the arity cap keeps it honest.
    """
    if f.is_zero:
        raise DomainError("zero signatures are reducible by convention and have no factorization")
    be = f.backend
    eps = None if isinstance(be, ExactBackend) else get_epsilon()
    if f.arity == 0:
        return Factorization(f[0], (), 0, be, eps)
    labels = list(range(1, f.arity + 1))
    work = f
    factors = []
    scalar = be.coerce(1)
    while True:
        m = work.arity
        if m == 1:
            g, s = work.normalized()
            factors.append((g, (labels[0],)))
            scalar = scalar * s
            break
        found = None
        for size in range(1, m):
            for extra in combinations(range(2, m + 1), size - 1):
                positions = (1,) + extra
                if _rank_at_most_one(matrix_view(work, positions), be):
                    found = positions
                    break
            if found:
                break
        if found is None:
            g, s = work.normalized()
            factors.append((g, tuple(labels)))
            scalar = scalar * s
            break
        g, h, pivot = _split(work, found)
        g_n, s_g = g.normalized()
        factors.append((g_n, tuple(labels[p - 1] for p in found)))
        scalar = scalar * be.div(s_g, pivot)
        rest = [p for p in range(1, m + 1) if p not in found]
        labels = [labels[p - 1] for p in rest]
        work = h
    factors.sort(key=lambda pair: pair[1][0])
    return Factorization(scalar, tuple(factors), f.arity, be, eps)


def _assemble(chosen) -> tuple[Signature, tuple]:
    """Tensor factors together and sort their variables ascending."""
    combined = None
    var_order = []
    for g, scope in chosen:
        combined = g if combined is None else tensor(combined, g)
        var_order.extend(scope)
    target = tuple(sorted(var_order))
    order = tuple(var_order.index(v) + 1 for v in target)
    return permute(combined, order), target


def divides(g: Signature, f: Signature):
    """A scope and cofactor with f = g (x) cofactor, or None.

    Division allows re-embedding g's variables in any order (capped by
    arity for the factorial search).  Zero f is divisible by anything;
    equal arities degrade to proportionality with a rank-0 cofactor.
    """
    if g.is_zero:
        raise DomainError("the divisor must be nonzero")
    if type(g.backend) is not type(f.backend):
        raise BackendMismatch("division compares matching backends")
    be = f.backend
    m, n = g.arity, f.arity
    if m > n:
        return None
    if f.is_zero:
        scope = tuple(range(1, m + 1))
        if m == n:
            return scope, Signature(0, (be.coerce(0),), be)
        return scope, Signature(n - m, (be.coerce(0),) * (1 << (n - m)), be)
    if m == n:
        s = proportional(g, f)
        if s is None and m <= _PERMUTE_SEARCH_CAP:
            for sigma in permutations(range(1, m + 1)):
                s = proportional(permute(g, sigma), f)
                if s is not None:
                    break
        if s is None:
            return None
        return tuple(range(1, n + 1)), Signature(0, (s,), be)
    fac = upf(f)
    k = len(fac.factors)
    for mask in range(1, 1 << k):
        chosen = [fac.factors[i] for i in range(k) if mask >> i & 1]
        if sum(fa.arity for fa, _ in chosen) != m:
            continue
        cand, scope = _assemble(chosen)
        s = proportional(cand, g)
        if s is None and m <= _PERMUTE_SEARCH_CAP:
            for sigma in permutations(range(1, m + 1)):
                s = proportional(permute(cand, sigma), g)
                if s is not None:
                    break
        if s is None:
            continue
        rest = [fac.factors[i] for i in range(k) if not mask >> i & 1]
        cof, _ = _assemble(rest)
        return scope, cof.scale(be.div(fac.global_scalar, s))
    return None


def real_factorization(f: Signature) -> Factorization:
    """UPF of a real reducible signature, with every factor verified real.

    Canonical scaling already forces real factors for real input; a
    complex factor here would contradict the uniqueness argument, so it
    aborts loudly instead of patching things up.
    """
    if f.is_zero:
        raise DomainError("zero signatures have no factorization")
    if not f.is_real_valued:
        raise DomainError("input must be real valued")
    fac = upf(f)
    if fac.factor_count() == 1 and fac.factors[0][0].arity == f.arity:
        raise DomainError("input is irreducible; there is nothing to factor")
    for g, scope in fac.factors:
        if not g.is_real_valued:
            raise AnomalyError(
                "a real signature produced a non-real canonical factor on scope %s" % (scope,)
            )
    if not f.backend.is_real(fac.global_scalar):
        raise AnomalyError("a real signature produced a non-real global scalar")
    return fac
