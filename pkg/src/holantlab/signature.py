"""Signatures: dense maps from {0,1}^n to scalars.

Index convention (fixed everywhere): the assignment (x_1, ..., x_n) lives
at integer position sum x_i * 2^(n-i), so x_1 is the most significant
bit and positions enumerate assignments lexicographically. Variables are
1-based throughout the package.

Also here: matrix views (reshaping a signature into a 2^k x 2^(n-k)
grid over a chosen row-variable set), support-structure analysis over
Z_2 (affine test, free variables, bundles), compression onto the free
variables, and the ARS check.
"""

from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from . import config
from .errors import ArityError, DomainError
from .scalar import EXACT, FLOAT

BitVector = tuple[int, ...]


def bits_of(index: int, n: int) -> BitVector:
    """Assignment tuple (x_1..x_n) stored at `index`."""
    return tuple((index >> (n - i)) & 1 for i in range(1, n + 1))


def index_of(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | (b & 1)
    return idx


def weight(index: int) -> int:
    return bin(index).count("1")


class Signature:
    """Immutable dense signature over a scalar backend.

    `values` has length 2^arity. Arity 0 is the rank-0 record produced
    by full contractions: a single scalar in signature clothing.
    """

    __slots__ = ("arity", "values", "backend")

    def __init__(self, arity: int, values: tuple, backend=EXACT):
        if arity < 0:
            raise ArityError(f"negative arity {arity}")
        if arity > config.get_arity_cap():
            raise ArityError(
                f"arity {arity} exceeds cap {config.get_arity_cap()}"
            )
        if len(values) != 1 << arity:
            raise ArityError(
                f"arity {arity} needs {1 << arity} values, got {len(values)}"
            )
        self.arity = arity
        self.values = values
        self.backend = backend

    # -- constructors ---------------------------------------------------

    @staticmethod
    def from_values(values: Iterable, backend=EXACT) -> "Signature":
        vals = tuple(backend.coerce(v) for v in values)
        n = (len(vals) - 1).bit_length()
        if len(vals) != 1 << n:
            raise ArityError(f"value count {len(vals)} is not a power of two")
        return Signature(n, vals, backend)

    @staticmethod
    def from_function(
        arity: int, fn: Callable[[BitVector], object], backend=EXACT
    ) -> "Signature":
        vals = tuple(
            backend.coerce(fn(bits_of(i, arity))) for i in range(1 << arity)
        )
        return Signature(arity, vals, backend)

    @staticmethod
    def from_sparse(
        arity: int, entries: Mapping[Union[str, BitVector], object], backend=EXACT
    ) -> "Signature":
        vals = [backend.zero()] * (1 << arity)
        for key, v in entries.items():
            bits = tuple(int(c) for c in key) if isinstance(key, str) else key
            if len(bits) != arity:
                raise ArityError(f"entry key {key!r} has wrong length for arity {arity}")
            vals[index_of(bits)] = backend.coerce(v)
        return Signature(arity, tuple(vals), backend)

    @staticmethod
    def scalar(value, backend=EXACT) -> "Signature":
        """Rank-0 record holding one scalar."""
        return Signature(0, (backend.coerce(value),), backend)

    # -- access -----------------------------------------------------------

    def __getitem__(self, key):
        if isinstance(key, int):
            return self.values[key]
        return self.values[index_of(key)]

    def value(self, bits: Sequence[int]):
        return self.values[index_of(bits)]

    def support_indices(self) -> tuple[int, ...]:
        bz = self.backend.is_zero
        return tuple(i for i, v in enumerate(self.values) if not bz(v))

    def support(self) -> tuple[BitVector, ...]:
        return tuple(bits_of(i, self.arity) for i in self.support_indices())

    @property
    def is_zero(self) -> bool:
        bz = self.backend.is_zero
        return all(bz(v) for v in self.values)

    @property
    def is_real_valued(self) -> bool:
        br = self.backend.is_real
        return all(br(v) for v in self.values)

    def first_nonzero_index(self) -> Optional[int]:
        bz = self.backend.is_zero
        for i, v in enumerate(self.values):
            if not bz(v):
                return i
        return None

    # -- simple algebra -----------------------------------------------------

    def scale(self, s) -> "Signature":
        s = self.backend.coerce(s)
        return Signature(self.arity, tuple(v * s for v in self.values), self.backend)

    def conj(self) -> "Signature":
        bc = self.backend.conj
        return Signature(self.arity, tuple(bc(v) for v in self.values), self.backend)

    def add(self, other: "Signature") -> "Signature":
        if other.arity != self.arity or other.backend is not self.backend:
            raise DomainError("signature addition needs matching arity and backend")
        return Signature(
            self.arity,
            tuple(a + b for a, b in zip(self.values, other.values)),
            self.backend,
        )

    def normalized(self) -> tuple["Signature", object]:
        """(g, s) with g = self / s and g's first nonzero entry 1."""
        i = self.first_nonzero_index()
        if i is None:
            raise DomainError("cannot normalize the zero signature")
        s = self.values[i]
        div = self.backend.div
        return (
            Signature(self.arity, tuple(div(v, s) for v in self.values), self.backend),
            s,
        )

    def to_float(self) -> "Signature":
        if self.backend is FLOAT:
            return self
        return Signature(
            self.arity, tuple(FLOAT.coerce(v) for v in self.values), FLOAT
        )

    def approx(self) -> tuple[complex, ...]:
        return tuple(self.backend.as_complex(v) for v in self.values)

    def canonical_key(self) -> tuple:
        """Hashable key: equal signatures (same backend) share it.

        Exact values of mixed cyclotomic orders are embedded into the
        common lcm order first so the key is representation-independent.
        """
        if self.backend is FLOAT:
            return (self.arity, "float") + tuple(
                self.backend.scalar_key(v) for v in self.values
            )
        from math import gcd

        order = 8
        for v in self.values:
            order = order // gcd(order, v.order) * v.order
        return (self.arity, "exact", order) + tuple(
            v.embed(order).coeffs for v in self.values
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        if self.arity != other.arity or self.backend is not other.backend:
            return False
        eq = self.backend.eq
        return all(eq(a, b) for a, b in zip(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.arity > 4:
            nz = len(self.support_indices())
            return f"Signature(arity={self.arity}, {nz} nonzero)"
        return f"Signature({self.arity}, {list(self.values)!r})"


# -- matrix views ----------------------------------------------------------


class MatrixView:
    """Lossless reshape of a signature: row variables vs. the rest.

    `row_vars` keeps the caller's order (first one most significant in
    the row index); `col_vars` is the complement in increasing order.
    """

    __slots__ = ("row_vars", "col_vars", "entries", "backend")

    def __init__(self, row_vars, col_vars, entries, backend):
        self.row_vars = row_vars
        self.col_vars = col_vars
        self.entries = entries
        self.backend = backend

    @property
    def shape(self) -> tuple[int, int]:
        return (1 << len(self.row_vars), 1 << len(self.col_vars))

    def entry(self, r: int, c: int):
        return self.entries[r][c]

    def row(self, r: int) -> tuple:
        return self.entries[r]

    def to_signature(self) -> Signature:
        n = len(self.row_vars) + len(self.col_vars)
        vals = [None] * (1 << n)
        for r in range(1 << len(self.row_vars)):
            rbits = bits_of(r, len(self.row_vars))
            for c in range(1 << len(self.col_vars)):
                cbits = bits_of(c, len(self.col_vars))
                full = [0] * n
                for var, b in zip(self.row_vars, rbits):
                    full[var - 1] = b
                for var, b in zip(self.col_vars, cbits):
                    full[var - 1] = b
                vals[index_of(full)] = self.entries[r][c]
        return Signature(n, tuple(vals), self.backend)

    def __repr__(self) -> str:
        return f"MatrixView(rows={self.row_vars}, cols={self.col_vars})"


def matrix_view(f: Signature, rows: Sequence[int]) -> MatrixView:
    """M_{A,B}(f) with A = `rows` (order kept) and B the complement."""
    n = f.arity
    row_vars = tuple(rows)
    seen = set()
    for v in row_vars:
        if not 1 <= v <= n:
            raise DomainError(f"row variable {v} out of range for arity {n}")
        if v in seen:
            raise DomainError(f"duplicate row variable {v}")
        seen.add(v)
    col_vars = tuple(v for v in range(1, n + 1) if v not in seen)
    k, m = len(row_vars), len(col_vars)
    # shift amount of variable i in the full index
    shift = {i: n - i for i in range(1, n + 1)}
    ents = []
    for r in range(1 << k):
        rbits = bits_of(r, k) if k else ()
        base = 0
        for var, b in zip(row_vars, rbits):
            if b:
                base |= 1 << shift[var]
        row = []
        for c in range(1 << m):
            cbits = bits_of(c, m) if m else ()
            idx = base
            for var, b in zip(col_vars, cbits):
                if b:
                    idx |= 1 << shift[var]
            row.append(f.values[idx])
        ents.append(tuple(row))
    return MatrixView(row_vars, col_vars, tuple(ents), f.backend)


def row_vectors(f: Signature, i: int) -> tuple[tuple, tuple]:
    """The two rows of M_i(f): restrictions x_i = 0 and x_i = 1."""
    mv = matrix_view(f, [i])
    return mv.entries[0], mv.entries[1]


# -- support structure -------------------------------------------------------


class SupportStructure:
    """Affine analysis of a signature's support over Z_2.

    For affine supports: `offset` is the lexicographically first support
    point, `basis` holds RREF row vectors of the linear part (as bit
    tuples), `free_vars` are the pivot variables, `relations` maps every
    variable to (constant bit, frozenset of free variables) so that
    x_v = const + sum of the named free variables on the support, and
    `bundles` groups variables by that free-variable combination with a
    '+' mark for const 0 and '-' for const 1.

    For non-affine supports only `witness` is populated: support points
    (a, b, c) whose XOR lies outside the support.
    """

    __slots__ = (
        "affine",
        "rank",
        "offset",
        "basis",
        "free_vars",
        "relations",
        "bundles",
        "witness",
    )

    def __init__(self, affine, rank, offset, basis, free_vars, relations, bundles, witness):
        self.affine = affine
        self.rank = rank
        self.offset = offset
        self.basis = basis
        self.free_vars = free_vars
        self.relations = relations
        self.bundles = bundles
        self.witness = witness

    def bundle_types(self) -> dict:
        """Map bundle name -> sorted tuple of marks (the +/- multiset)."""
        return {
            name: tuple(sorted(m for _, m in members))
            for name, members in self.bundles.items()
        }

    def __repr__(self) -> str:
        if not self.affine:
            return f"SupportStructure(non-affine, witness={self.witness})"
        return (
            f"SupportStructure(affine, rank={self.rank}, free={self.free_vars})"
        )


def support_structure(f: Signature) -> SupportStructure:
    if f.arity < 1:
        raise ArityError("support structure needs arity >= 1")
    pts = f.support_indices()
    if not pts:
        raise DomainError("zero signature has no support structure")
    n = f.arity
    offset = pts[0]
    vecs = [p ^ offset for p in pts]

    # RREF over Z_2; variable i occupies bit n-i (x_1 most significant)
    basis: list[int] = []
    for v in vecs:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    # back-eliminate so each pivot bit appears in exactly one row
    for i in range(len(basis)):
        hi = basis[i].bit_length() - 1
        for j in range(len(basis)):
            if j != i and (basis[j] >> hi) & 1:
                basis[j] ^= basis[i]
    basis.sort(reverse=True)
    rank = len(basis)

    if len(pts) != 1 << rank:
        vset = set(vecs)
        witness = None
        for a in range(len(vecs)):
            for b in range(a + 1, len(vecs)):
                if vecs[a] ^ vecs[b] not in vset:
                    witness = (
                        bits_of(pts[a], n),
                        bits_of(pts[b], n),
                        bits_of(offset, n),
                    )
                    break
            if witness:
                break
        return SupportStructure(
            False, rank, bits_of(offset, n), (), (), {}, {}, witness
        )

    pivots = [n - (row.bit_length() - 1) for row in basis]  # variable indices
    free_vars = tuple(sorted(pivots))
    obits = bits_of(offset, n)

    relations: dict[int, tuple[int, frozenset]] = {}
    for var in range(1, n + 1):
        combo = []
        const = obits[var - 1]
        for row, pv in zip(basis, pivots):
            if (row >> (n - var)) & 1:
                combo.append(pv)
                if var != pv:
                    const ^= obits[pv - 1]
        if var in pivots:
            relations[var] = (0, frozenset({var}))
        else:
            relations[var] = (const, frozenset(combo))

    bundles: dict[frozenset, tuple] = {}
    grouped: dict[frozenset, list] = {}
    for var in range(1, n + 1):
        const, combo = relations[var]
        grouped.setdefault(combo, []).append((var, "+" if const == 0 else "-"))
    for combo, members in grouped.items():
        bundles[combo] = tuple(sorted(members))

    basis_bits = tuple(bits_of(row, n) for row in basis)
    return SupportStructure(
        True, rank, obits, basis_bits, free_vars, relations, bundles, None
    )


def compressed(f: Signature, free: Optional[Iterable[int]] = None) -> Signature:
    """Restriction of an affine-supported f to a free-variable set.

    The result has arity rank(support); entry at an assignment of the
    free variables is f's value on the unique support point extending it.
    """
    st = support_structure(f)
    if not st.affine:
        raise DomainError("compressed signature needs affine support")
    X = tuple(sorted(free)) if free is not None else st.free_vars
    if len(X) != st.rank:
        raise DomainError(
            f"free set size {len(X)} does not match support rank {st.rank}"
        )
    if st.rank == 0:
        raise DomainError("support rank 0: compressed signature would have arity 0")
    n = f.arity
    seen: dict[int, int] = {}
    for p in f.support_indices():
        bits = bits_of(p, n)
        key = index_of(tuple(bits[v - 1] for v in X))
        if key in seen:
            raise DomainError(f"variables {X} are not a free set for the support")
        seen[key] = p
    vals = []
    for a in range(1 << st.rank):
        vals.append(f.values[seen[a]])
    return Signature(st.rank, tuple(vals), f.backend)


def ars_check(f: Signature) -> bool:
    """Whether f(complement of x) equals conj(f(x)) for every x."""
    mask = (1 << f.arity) - 1
    eq = f.backend.eq
    bc = f.backend.conj
    return all(eq(f.values[mask ^ i], bc(v)) for i, v in enumerate(f.values))


# -- builtins ------------------------------------------------------------


def delta0() -> Signature:
    return Signature.from_values([1, 0])


def delta1() -> Signature:
    return Signature.from_values([0, 1])


def eq(k: int) -> Signature:
    if k < 1:
        raise DomainError(f"equality arity must be >= 1, got {k}")
    vals = [0] * (1 << k)
    vals[0] = 1
    vals[-1] = 1
    return Signature.from_values(vals)


def ghz(n: int) -> Signature:
    if n < 2:
        raise DomainError(f"GHZ arity must be >= 2, got {n}")
    return eq(n)


def neq2() -> Signature:
    return Signature.from_values([0, 1, 1, 0])


_BELLS = {
    "phi+": (1, 0, 0, 1),
    "psi+": (0, 1, 1, 0),
    "phi-": (1, 0, 0, -1),
    "psi-": (0, 1, -1, 0),
}


def bell(which: str) -> Signature:
    try:
        return Signature.from_values(_BELLS[which])
    except KeyError:
        raise DomainError(
            f"unknown Bell state {which!r}; expected one of {sorted(_BELLS)}"
        ) from None


def psi6() -> Signature:
    """The 6-qubit state with values (-1)^Q on even-parity inputs,
    Q = x1x2 + x1x3 + x2x3 + x1x4 + x2x5 + x3x6."""
    vals = []
    for i in range(64):
        x = bits_of(i, 6)
        if sum(x) % 2:
            vals.append(0)
            continue
        q = (
            x[0] * x[1]
            + x[0] * x[2]
            + x[1] * x[2]
            + x[0] * x[3]
            + x[1] * x[4]
            + x[2] * x[5]
        )
        vals.append(-1 if q % 2 else 1)
    return Signature.from_values(vals)


_PSI8_KETS = (
    "00000000",
    "00001111",
    "00110011",
    "00111100",
    "01010101",
    "01011010",
    "01100110",
    "01101001",
    "10010110",
    "10011001",
    "10100101",
    "10101010",
    "11000011",
    "11001100",
    "11110000",
    "11111111",
)


def psi8() -> Signature:
    """The 8-qubit state with sixteen +1 kets (all other entries zero)."""
    return Signature.from_sparse(8, {k: 1 for k in _PSI8_KETS})


_NAME_RE = re.compile(r"^([a-z0-9+\-]+)(?:\(([^)]*)\))?$")


def builtin(name: str) -> Signature:
    """Look up a built-in signature by name.

    Accepted: delta0, delta1, neq2, psi6, psi8, eq(k), ghz(n),
    bell(phi+|psi+|phi-|psi-).
    """
    m = _NAME_RE.match(name.strip().lower())
    if not m:
        raise DomainError(f"malformed builtin name {name!r}")
    head, arg = m.group(1), m.group(2)
    if arg is None:
        simple = {
            "delta0": delta0,
            "delta1": delta1,
            "neq2": neq2,
            "psi6": psi6,
            "psi8": psi8,
        }
        if head in simple:
            return simple[head]()
        if head in _BELLS:
            return bell(head)
        raise DomainError(f"unknown builtin {name!r}")
    if head in ("eq", "ghz"):
        try:
            k = int(arg)
        except ValueError:
            raise DomainError(f"malformed builtin name {name!r}") from None
        return eq(k) if head == "eq" else ghz(k)
    if head == "bell":
        return bell(arg.strip())
    raise DomainError(f"unknown builtin {name!r}")
