"""Independent reference implementations used to pin expected test values.

Nothing in this module imports the package under test.  Everything works
on plain tuples of ints, Fractions, or complex numbers with explicit
index arithmetic, so a library bug cannot hide behind fixtures computed
by the same code paths it would corrupt.

Index convention throughout: an assignment (x_1, ..., x_n) maps to the
integer x_1*2^(n-1) + ... + x_n (first variable is the most significant
bit), matching the library's dense layout.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

# -- frozen value tables --------------------------------------------------

# The 8x8 table of the six-variable Bell-closure state, row index from the
# first three variables and column index from the last three, both in
# lexicographic order.
PSI6_MATRIX = (
    (1, 0, 0, 1, 0, 1, 1, 0),
    (0, -1, 1, 0, 1, 0, 0, -1),
    (0, 1, -1, 0, 1, 0, 0, -1),
    (-1, 0, 0, -1, 0, 1, 1, 0),
    (0, 1, 1, 0, -1, 0, 0, -1),
    (-1, 0, 0, 1, 0, -1, 1, 0),
    (-1, 0, 0, 1, 0, 1, -1, 0),
    (0, 1, 1, 0, 1, 0, 0, 1),
)

# The sixteen support strings of the eight-variable strong-Bell state, all
# with coefficient +1.
PSI8_KETS = (
    "00000000",
    "00001111",
    "00110011",
    "00111100",
    "01010101",
    "01011010",
    "10011001",
    "10010110",
    "01101001",
    "01100110",
    "10100101",
    "10101010",
    "11000011",
    "11001100",
    "11110000",
    "11111111",
)

# On the support of the eight-variable state, bits 4, 6, 7, 8 are the mod-2
# sums of the four 3-element subsets of the free bits {x1, x2, x3, x5}.
PSI8_DEPENDENT_BITS = {
    4: (1, 2, 3),
    6: (1, 2, 5),
    7: (1, 3, 5),
    8: (2, 3, 5),
}


def psi6_values() -> tuple:
    return tuple(
        PSI6_MATRIX[idx >> 3][idx & 7] for idx in range(64)
    )


def psi8_values() -> tuple:
    vals = [0] * 256
    for ket in PSI8_KETS:
        vals[int(ket, 2)] = 1
    return tuple(vals)


# -- index arithmetic -----------------------------------------------------


def bits_of(index: int, n: int) -> tuple:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def index_of(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


# -- Bell projections -----------------------------------------------------

# Coefficient tables on (a, b): all four states have real entries, so the
# bra side needs no conjugation.
BELL_TABLE = {
    "phi+": {(0, 0): 1, (1, 1): 1},
    "psi+": {(0, 1): 1, (1, 0): 1},
    "phi-": {(0, 0): 1, (1, 1): -1},
    "psi-": {(0, 1): 1, (1, 0): -1},
}


def project_pair(values, n: int, i: int, j: int, which: str) -> tuple:
    """<bell|_(i,j) applied to an n-variable state; variables 1-based, i < j.

    The result ranges over the remaining variables in ascending original
    order.
    """
    assert 1 <= i < j <= n
    rest = [v for v in range(1, n + 1) if v not in (i, j)]
    table = BELL_TABLE[which]
    out = []
    for ridx in range(1 << (n - 2)):
        rbits = bits_of(ridx, n - 2)
        acc = 0
        for (a, b), w in sorted(table.items()):
            full = [0] * n
            full[i - 1] = a
            full[j - 1] = b
            for pos, bit in zip(rest, rbits):
                full[pos - 1] = bit
            acc += w * values[index_of(full)]
        out.append(acc)
    return tuple(out)


def bell_tensor(which: str, pairs: int) -> tuple:
    """The state |which> tensored with itself on consecutive pairs."""
    table = BELL_TABLE[which]
    out = []
    for idx in range(1 << (2 * pairs)):
        bits = bits_of(idx, 2 * pairs)
        val = 1
        for p in range(pairs):
            val *= table.get((bits[2 * p], bits[2 * p + 1]), 0)
        out.append(val)
    return tuple(out)


def perfect_matchings(items):
    """All ways to pair up an even-sized sequence."""
    items = list(items)
    if not items:
        yield ()
        return
    head = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for sub in perfect_matchings(rest):
            yield ((head, items[k]),) + sub


def bell_tensor_on(which: str, positions, matching) -> tuple:
    """Product of |which> placed on the matched position pairs; positions
    lists the variables in the order the output tuple is indexed by."""
    table = BELL_TABLE[which]
    m = len(positions)
    at = {v: k for k, v in enumerate(positions)}
    out = []
    for idx in range(1 << m):
        bits = bits_of(idx, m)
        val = 1
        for a, b in matching:
            val *= table.get((bits[at[a]], bits[at[b]]), 0)
        out.append(val)
    return tuple(out)


def proportionality(values, reference):
    """values == s * reference for the unique s, else None (both tuples)."""
    s = None
    for v, r in zip(values, reference):
        if r == 0:
            if v != 0:
                return None
            continue
        cand = Fraction(v, r) if not isinstance(v, complex) else v / r
        if s is None:
            s = cand
        elif s != cand:
            return None
    if s is None:
        return None
    return s


def strong_bell_scalars(values, n: int):
    """Scalar per (i, j, which) such that the projection equals scalar
    times a product of copies of the projecting state on some pairing of
    the remaining variables; raises if any case admits no pairing.
    """
    out = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            rest = [v for v in range(1, n + 1) if v not in (i, j)]
            for which in ("phi+", "psi+", "phi-", "psi-"):
                proj = project_pair(values, n, i, j, which)
                s = None
                for matching in perfect_matchings(rest):
                    ref = bell_tensor_on(which, rest, matching)
                    s = proportionality(proj, ref)
                    if s is not None:
                        break
                if s is None:
                    raise AssertionError(
                        f"projection ({i},{j},{which}) is not a multiple of "
                        "the projecting state on any pairing"
                    )
                out[(i, j, which)] = s
    return out


# -- affine support and quadratic phase -----------------------------------


def is_affine_support(support) -> bool:
    pts = sorted(support)
    if not pts:
        return True
    for x, y, z in itertools.product(pts, repeat=3):
        if x ^ y ^ z not in support:
            return False
    return True


def affine_rank(support) -> int:
    pts = sorted(support)
    base = pts[0]
    vecs = [p ^ base for p in pts]
    rank = 0
    basis = []
    for v in vecs:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            rank += 1
    return rank


def exhaust_quadratic_phase(values, n: int):
    """Search for lam, c, d with values = lam * chi_S * i^Q exactly, where
    Q(x) = sum c_k x_k + sum 2*d_kl x_k x_l mod 4, c_k in Z4, d_kl in Z2.

    values are plain complex numbers with exact small components.  Returns
    the witness dict, or None when no such representation exists.
    """
    support = [idx for idx, v in enumerate(values) if v != 0]
    if not support:
        return {"zero": True}
    if not is_affine_support(set(support)):
        return None
    i_powers = (1, 1j, -1, -1j)
    s0 = support[0]
    lam = values[s0]
    expo = {}
    for idx in support:
        ratio = values[idx] / lam
        for k, p in enumerate(i_powers):
            if ratio == p:
                expo[idx] = k
                break
        else:
            return None
    pair_list = list(itertools.combinations(range(1, n + 1), 2))
    for cs in itertools.product(range(4), repeat=n):
        for ds in itertools.product((0, 1), repeat=len(pair_list)):
            for c0 in range(4):
                ok = True
                for idx in support:
                    x = bits_of(idx, n)
                    q = c0 + sum(c * x[k] for k, c in enumerate(cs))
                    q += sum(
                        2 * d * x[a - 1] * x[b - 1]
                        for d, (a, b) in zip(ds, pair_list)
                    )
                    if q % 4 != expo[idx]:
                        ok = False
                        break
                if ok:
                    return {
                        "lambda": lam,
                        "constant": c0,
                        "linear": cs,
                        "cross": dict(zip(pair_list, ds)),
                    }
    return None


def binary_product_type(values) -> bool:
    """Arity-2 membership in the product-type class: degenerate, or
    supported inside one antipodal pair."""
    f00, f01, f10, f11 = values
    if f00 * f11 == f01 * f10:
        return True
    support = {idx for idx, v in enumerate(values) if v != 0}
    return support <= {0, 3} or support <= {1, 2}


# -- first-order orthogonality instances ----------------------------------


def _tensor(a, b):
    return tuple(x * y for x in a for y in b)


def _rotated_equality(a: int, b: int, k: int) -> tuple:
    """u^(x)k + v^(x)k for u=(a,b), v=(-b,a): orthogonal columns, so every
    variable's two restriction rows are orthogonal with equal norm."""
    u, v = (a, b), (-b, a)
    fu, fv = (1,), (1,)
    for _ in range(k):
        fu, fv = _tensor(fu, u), _tensor(fv, v)
    return tuple(x + y for x, y in zip(fu, fv))


def orthogonality_instance(rng: random.Random, n: int):
    """A random n-variable real signature satisfying first-order
    orthogonality, with its exact common norm value.

    Built as a tensor product of rotated equality blocks (sizes >= 2) and
    an overall rational scale.  Pinning a variable inside one block leaves
    every other block whole, so the common norm is the pinned block's
    (a^2+b^2)^k times the full squared norm 2*(a^2+b^2)^k of each other
    block, times the scale squared.
    """
    assert n >= 2
    sizes = []
    left = n
    while left > 0:
        if left in (2, 3):
            k = left
        else:
            k = rng.choice([2, 3]) if left != 4 else rng.choice([2, 4])
            k = min(k, left)
            if left - k == 1:
                k += 1
        sizes.append(k)
        left -= k
    vals = (Fraction(1),)
    mu = Fraction(1)
    for k in sizes:
        while True:
            a, b = rng.randint(-3, 3), rng.randint(-3, 3)
            if (a, b) != (0, 0):
                break
        block = _rotated_equality(a, b, k)
        vals = _tensor(vals, tuple(Fraction(x) for x in block))
        mu *= Fraction(a * a + b * b) ** k
    mu *= Fraction(2) ** (len(sizes) - 1)
    lam = Fraction(rng.choice([1, 2, 3]), rng.choice([1, 2]))
    vals = tuple(lam * v for v in vals)
    mu *= lam * lam
    return vals, mu


# -- irreducibility and planted factorizations ----------------------------


def _flatten(values, n: int, subset) -> list:
    """Rows indexed by the subset variables, columns by the rest."""
    inside = sorted(subset)
    outside = [v for v in range(1, n + 1) if v not in subset]
    rows = []
    for ri in range(1 << len(inside)):
        rbits = bits_of(ri, len(inside))
        row = []
        for ci in range(1 << len(outside)):
            cbits = bits_of(ci, len(outside))
            full = [0] * n
            for pos, bit in zip(inside, rbits):
                full[pos - 1] = bit
            for pos, bit in zip(outside, cbits):
                full[pos - 1] = bit
            row.append(values[index_of(full)])
        rows.append(row)
    return rows


def _rank_at_most_one(rows) -> bool:
    pivot = None
    for row in rows:
        if any(row):
            pivot = row
            break
    if pivot is None:
        return True
    for row in rows:
        for a, b in zip(pivot, row):
            for c, d in zip(pivot, row):
                if a * d != c * b:
                    return False
    return True


def oracle_irreducible(values, n: int) -> bool:
    """No bipartition of the variables splits the signature as a tensor
    product: every proper flattening has rank at least two."""
    if not any(values):
        return False
    if n <= 1:
        return True
    for size in range(1, n // 2 + 1):
        for subset in itertools.combinations(range(1, n + 1), size):
            if 1 not in subset and size == n - size:
                continue
            if _rank_at_most_one(_flatten(values, n, subset)):
                return False
    return True


def random_prime(rng: random.Random, n: int) -> tuple:
    """Rejection-sample an irreducible signature with small int entries."""
    while True:
        vals = tuple(
            Fraction(rng.randint(-2, 2)) for _ in range(1 << n)
        )
        if oracle_irreducible(vals, n):
            return vals


def planted_composite(rng: random.Random, block_sizes):
    """Tensor irreducible blocks onto a random variable partition.

    Returns (values, n, blocks) where blocks is a tuple of
    (variable tuple, block values) with variables 1-based, and
    values[idx] = product over blocks of the block value at idx's
    restriction to the block's variables in ascending order.
    """
    n = sum(block_sizes)
    variables = list(range(1, n + 1))
    rng.shuffle(variables)
    blocks = []
    at = 0
    for size in block_sizes:
        scope = tuple(sorted(variables[at : at + size]))
        at += size
        blocks.append((scope, random_prime(rng, size)))
    blocks.sort(key=lambda sb: sb[0][0])
    values = []
    for idx in range(1 << n):
        bits = bits_of(idx, n)
        prod = Fraction(1)
        for scope, bvals in blocks:
            sub = index_of(tuple(bits[v - 1] for v in scope))
            prod *= bvals[sub]
        values.append(prod)
    return tuple(values), n, tuple(blocks)


def pauli_stabilizer_size(values, n: int) -> int:
    """Count Pauli tensors fixing the state up to a global scalar.

    A tensor is encoded by (xmask, zmask): legs in both masks carry Y.
    It maps |v> to i^{|Y|} (-1)^{zmask.v} |v xor xmask>, so it
    stabilizes projectively iff the support is closed under the xor and
    the value ratio times the phase is constant.  The projective orbit
    size is 4^n divided by this count.
    """
    support = [v for v in range(1 << n) if values[v]]
    sset = set(support)
    count = 0
    for xmask in range(1 << n):
        if any(v ^ xmask not in sset for v in support):
            continue
        for zmask in range(1 << n):
            g = bin(xmask & zmask).count("1") % 4
            ref = None
            ok = True
            for v in support:
                sign = -1 if bin(zmask & v).count("1") % 2 else 1
                ratio = (Fraction(sign) * values[v] / values[v ^ xmask], g)
                if ref is None:
                    ref = ratio
                elif ratio != ref:
                    ok = False
                    break
            if ok:
                count += 1
    return count
