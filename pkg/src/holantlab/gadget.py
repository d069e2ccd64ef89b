"""Gadget calculus on signatures.

Pinning, self-loops (merging through a binary signature), mating,
tensor products, variable permutation, holographic transforms, and the
predicate reports used by interpolation arguments.  Everything here is
a pure function over immutable inputs.

Scalars are never dropped: transforms keep their 1/sqrt(2) factors and
"equal up to a scalar" is the explicit predicate :func:`proportional`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import AnomalyError, ArityError, BackendMismatch, DomainError
from .scalar import (
    EXACT,
    FLOAT,
    Cyclo,
    ExactBackend,
    FloatBackend,
    alpha,
    i_unit,
    sqrt2,
    sqrt_rational,
)
from .signature import Signature, bits_of, eq, index_of, matrix_view


class Transform2x2:
    """A 2x2 matrix acting on signatures one variable at a time.

    Flags (real, diagonal, orthogonal up to scalar, ...) are computed on
    demand from the entries so they can never go stale.
    """

    __slots__ = ("a", "b", "c", "d", "backend")

    def __init__(self, a, b, c, d, backend=EXACT):
        self.backend = backend
        self.a = backend.coerce(a)
        self.b = backend.coerce(b)
        self.c = backend.coerce(c)
        self.d = backend.coerce(d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def det(self):
        return self.a * self.d - self.b * self.c

    def is_invertible(self) -> bool:
        return not self.backend.is_zero(self.det())

    def is_real(self) -> bool:
        return all(self.backend.is_real(e) for e in self.entries())

    def is_diagonal(self) -> bool:
        return self.backend.is_zero(self.b) and self.backend.is_zero(self.c)

    def is_anti_diagonal(self) -> bool:
        return self.backend.is_zero(self.a) and self.backend.is_zero(self.d)

    def is_orthogonal_up_to_scalar(self) -> bool:
        """True iff the matrix is real and Q Q^T is a nonzero scalar matrix."""
        if not self.is_real():
            return False
        p = self.matmul(self.transpose())
        be = self.backend
        if not (be.is_zero(p.b) and be.is_zero(p.c) and be.eq(p.a, p.d)):
            return False
        return not be.is_zero(p.a)

    def transpose(self) -> "Transform2x2":
        return Transform2x2(self.a, self.c, self.b, self.d, self.backend)

    def conj(self) -> "Transform2x2":
        be = self.backend
        return Transform2x2(*(be.conj(e) for e in self.entries()), backend=be)

    def inverse(self) -> "Transform2x2":
        det = self.det()
        if self.backend.is_zero(det):
            raise DomainError("transform is singular")
        inv = self.backend.div(self.backend.coerce(1), det)
        return Transform2x2(
            self.d * inv, -self.b * inv, -self.c * inv, self.a * inv, self.backend
        )

    def matmul(self, other: "Transform2x2") -> "Transform2x2":
        if self.backend is not other.backend:
            raise BackendMismatch("cannot multiply transforms across backends")
        return Transform2x2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.backend,
        )

    def scale(self, s) -> "Transform2x2":
        s = self.backend.coerce(s)
        return Transform2x2(*(e * s for e in self.entries()), backend=self.backend)

    def apply_vec(self, v):
        """Apply to a length-2 column vector, returning a pair."""
        x = self.backend.coerce(v[0])
        y = self.backend.coerce(v[1])
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def to_float(self) -> "Transform2x2":
        if isinstance(self.backend, FloatBackend):
            return self
        return Transform2x2(
            *(FLOAT.coerce(e.approx()) for e in self.entries()), backend=FLOAT
        )

    def approx(self):
        return tuple(self.backend.as_complex(e) for e in self.entries())

    def __eq__(self, other):
        if not isinstance(other, Transform2x2):
            return NotImplemented
        if self.backend is not other.backend:
            return False
        return all(
            self.backend.eq(x, y) for x, y in zip(self.entries(), other.entries())
        )

    __hash__ = None

    def __repr__(self):
        return "Transform2x2(%r, %r, %r, %r)" % self.entries()


def identity(backend=EXACT) -> Transform2x2:
    return Transform2x2(1, 0, 0, 1, backend)


def pauli_x(backend=EXACT) -> Transform2x2:
    return Transform2x2(0, 1, 1, 0, backend)


def pauli_y(backend=EXACT) -> Transform2x2:
    if isinstance(backend, ExactBackend):
        i = i_unit()
        return Transform2x2(Cyclo.zero(), -i, i, Cyclo.zero(), backend)
    return Transform2x2(0, -1j, 1j, 0, backend)


def pauli_z(backend=EXACT) -> Transform2x2:
    return Transform2x2(1, 0, 0, -1, backend)


def _half_sqrt2():
    # 1/sqrt(2) as an exact cyclotomic
    return sqrt2().scale_fraction(1, 2)


def hadamard(backend=EXACT) -> Transform2x2:
    """(1/sqrt 2) [[1,1],[1,-1]], the symmetric Hadamard."""
    if isinstance(backend, ExactBackend):
        s = _half_sqrt2()
        return Transform2x2(s, s, s, -s, backend)
    s = 2 ** -0.5
    return Transform2x2(s, s, s, -s, backend)


def rotate45(backend=EXACT) -> Transform2x2:
    """(1/sqrt 2) [[1,1],[-1,1]], the rotation by 45 degrees."""
    if isinstance(backend, ExactBackend):
        s = _half_sqrt2()
        return Transform2x2(s, s, -s, s, backend)
    s = 2 ** -0.5
    return Transform2x2(s, s, -s, s, backend)


def z_transform(backend=EXACT) -> Transform2x2:
    """(1/sqrt 2) [[1,1],[i,-i]]; the inverse of :func:`z_inverse`."""
    if isinstance(backend, ExactBackend):
        s = _half_sqrt2()
        i = i_unit()
        return Transform2x2(s, s, s * i, -(s * i), backend)
    s = 2 ** -0.5
    return Transform2x2(s, s, s * 1j, -s * 1j, backend)


def z_inverse(backend=EXACT) -> Transform2x2:
    """(1/sqrt 2) [[1,-i],[1,i]], the hat transform."""
    if isinstance(backend, ExactBackend):
        s = _half_sqrt2()
        i = i_unit()
        return Transform2x2(s, -(s * i), s, s * i, backend)
    s = 2 ** -0.5
    return Transform2x2(s, -s * 1j, s, s * 1j, backend)


def t_alpha(backend=EXACT) -> Transform2x2:
    """diag(1, alpha) with alpha = (1+i)/sqrt(2), a primitive 8th root."""
    if isinstance(backend, ExactBackend):
        return Transform2x2(Cyclo.one(), Cyclo.zero(), Cyclo.zero(), alpha(), backend)
    return Transform2x2(1, 0, 0, (1 + 1j) * 2 ** -0.5, backend)


def t_rho(k: int, d: int, backend=EXACT) -> Transform2x2:
    """diag(1, rho^d) where rho is a primitive 4k-th root of unity."""
    if k < 1:
        raise DomainError("k must be positive")
    if isinstance(backend, ExactBackend):
        rho = Cyclo.root_of_unity(4 * k, d)
        return Transform2x2(Cyclo.one(), Cyclo.zero(), Cyclo.zero(), rho, backend)
    import cmath

    return Transform2x2(1, 0, 0, cmath.exp(2j * cmath.pi * d / (4 * k)), backend)


def diagonal_transform(a, d, backend=EXACT) -> Transform2x2:
    return Transform2x2(a, 0, 0, d, backend)


def rotation(a, b, backend=EXACT) -> Transform2x2:
    """[[a,b],[-b,a]]; orthogonal up to the scalar a^2+b^2."""
    a = backend.coerce(a)
    b = backend.coerce(b)
    return Transform2x2(a, b, -b, a, backend)


def reflection(a, b, backend=EXACT) -> Transform2x2:
    """[[a,b],[b,-a]]; the orientation-reversing companion of rotation."""
    a = backend.coerce(a)
    b = backend.coerce(b)
    return Transform2x2(a, b, b, -a, backend)


def _match_transform(f: Signature, t: Transform2x2) -> Transform2x2:
    if isinstance(f.backend, FloatBackend):
        return t.to_float()
    if isinstance(t.backend, FloatBackend):
        raise BackendMismatch("float transform cannot act on an exact signature")
    return t


def _match_binary(f: Signature, b: Signature) -> Signature:
    if b.arity != 2:
        raise ArityError("loop signature must be binary")
    if isinstance(f.backend, FloatBackend) and isinstance(b.backend, ExactBackend):
        return b.to_float()
    if isinstance(f.backend, ExactBackend) and isinstance(b.backend, FloatBackend):
        raise BackendMismatch("float loop signature cannot contract an exact one")
    return b


def pin(f: Signature, i: int, c: int) -> Signature:
    """Set variable i of f to the bit c, yielding an arity n-1 signature."""
    n = f.arity
    if not 1 <= i <= n:
        raise DomainError("pin index %d out of range for arity %d" % (i, n))
    if c not in (0, 1):
        raise DomainError("pinned value must be 0 or 1")
    pos = i - 1
    vals = []
    for idx in range(1 << (n - 1)):
        bits = bits_of(idx, n - 1)
        full = bits[:pos] + (c,) + bits[pos:]
        vals.append(f[index_of(full)])
    return Signature(n - 1, tuple(vals), f.backend)


def restrict(f: Signature, assignment: dict) -> Signature:
    """Pin several variables at once; keys are 1-based indices."""
    g = f
    for i in sorted(assignment, reverse=True):
        g = pin(g, i, assignment[i])
    return g


def self_loop(f: Signature, i: int, j: int, b: Optional[Signature] = None) -> Signature:
    """Join variables i and j of f through the binary signature b.

    The loop signature's coefficients are conjugated, matching the
    projector reading of a Bell-state contraction; for the four Bell
    states conjugation changes nothing.  With b omitted this is the
    ordinary merge through an equality edge.
    """
    n = f.arity
    if i == j:
        raise DomainError("self loop needs two distinct variables")
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError("loop indices out of range for arity %d" % n)
    if b is None:
        b = eq(2)
    b = _match_binary(f, b)
    be = f.backend
    coeff = {
        (a_, c_): be.conj(b[index_of((a_, c_))]) for a_ in (0, 1) for c_ in (0, 1)
    }
    p, q = (i - 1, j - 1) if i < j else (j - 1, i - 1)
    swapped = i > j
    vals = []
    for idx in range(1 << (n - 2)):
        rest = bits_of(idx, n - 2)
        acc = be.coerce(0)
        for a_ in (0, 1):
            for c_ in (0, 1):
                u, v = (c_, a_) if swapped else (a_, c_)
                full = rest[:p] + (u,) + rest[p : q - 1] + (v,) + rest[q - 1 :]
                acc = acc + coeff[(a_, c_)] * f[index_of(full)]
        vals.append(acc)
    return Signature(n - 2, tuple(vals), f.backend)


def merge(f: Signature, i: int, j: int) -> Signature:
    """The equality merge, written as its own verb since it is ubiquitous."""
    return self_loop(f, i, j, None)


def inner_product_interpretable(f: Signature) -> bool:
    """Whether mate(f, ...) entries read as complex inner products.

    That reading needs every value of f to be real; mate itself never
    conjugates, so for non-real f the result is still well defined as a
    gadget but the Gram interpretation is lost.
    """
    return f.is_real_valued


def mate(f: Signature, dangling: Iterable[int]) -> Signature:
    """Connect two copies of f by equality edges on all non-dangling variables.

    The kept (dangling) variables of the first copy come first in the
    result, then those of the second copy, each block in ascending
    original order.  No conjugation happens anywhere.
    """
    d_sorted = sorted(set(dangling))
    n = f.arity
    for i in d_sorted:
        if not 1 <= i <= n:
            raise DomainError("dangling index %d out of range" % i)
    m = len(d_sorted)
    view = matrix_view(f, tuple(d_sorted)) if 0 < m < n else None
    be = f.backend
    if view is not None:
        rows = 1 << m
        cols = 1 << (n - m)
        vals = []
        for y in range(rows):
            ry = view.row(y)
            for yp in range(rows):
                ryp = view.row(yp)
                acc = be.coerce(0)
                for a_ in range(cols):
                    acc = acc + ry[a_] * ryp[a_]
                vals.append(acc)
        return Signature(2 * m, tuple(vals), be)
    if m == n:
        from_this = [f[y] for y in range(1 << n)]
        vals = []
        for y in range(1 << n):
            for yp in range(1 << n):
                vals.append(from_this[y] * from_this[yp])
        return Signature(2 * n, tuple(vals), be)
    acc = be.coerce(0)
    for a_ in range(1 << n):
        acc = acc + f[a_] * f[a_]
    return Signature(0, (acc,), be)


def hat_mate(fh: Signature, dangling: Iterable[int]) -> Signature:
    """Mating on the hat side: copies joined by disequality edges.

    Satisfies hat_mate(hat(f), D) == hat(mate(f, D)) bit for bit, since
    an equality edge conjugated by Z turns into a disequality edge.
    """
    d_sorted = sorted(set(dangling))
    n = fh.arity
    for i in d_sorted:
        if not 1 <= i <= n:
            raise DomainError("dangling index %d out of range" % i)
    m = len(d_sorted)
    be = fh.backend
    if m == n:
        vals = []
        for y in range(1 << n):
            for yp in range(1 << n):
                vals.append(fh[y] * fh[yp])
        return Signature(2 * n, tuple(vals), be)
    if m == 0:
        full = (1 << n) - 1
        acc = be.coerce(0)
        for a_ in range(1 << n):
            acc = acc + fh[a_] * fh[a_ ^ full]
        return Signature(0, (acc,), be)
    view = matrix_view(fh, tuple(d_sorted))
    rows = 1 << m
    cols = 1 << (n - m)
    flip = cols - 1
    vals = []
    for y in range(rows):
        ry = view.row(y)
        for yp in range(rows):
            ryp = view.row(yp)
            acc = be.coerce(0)
            for a_ in range(cols):
                acc = acc + ry[a_] * ryp[a_ ^ flip]
            vals.append(acc)
    return Signature(2 * m, tuple(vals), be)


def tensor(f: Signature, g: Signature) -> Signature:
    """Product signature on the disjoint union of variables, f's first."""
    if type(f.backend) is not type(g.backend):
        raise BackendMismatch("tensor needs matching backends")
    shift = 1 << g.arity
    vals = []
    for x in range(1 << f.arity):
        fx = f[x]
        for y in range(shift):
            vals.append(fx * g[y])
    return Signature(f.arity + g.arity, tuple(vals), f.backend)


def permute(f: Signature, order: Sequence[int]) -> Signature:
    """Reorder variables; order[k] is the old index that becomes variable k+1."""
    n = f.arity
    if sorted(order) != list(range(1, n + 1)):
        raise DomainError("order must list each variable of f exactly once")
    vals = []
    for idx in range(1 << n):
        bits = bits_of(idx, n)
        old = [0] * n
        for new_pos, old_var in enumerate(order):
            old[old_var - 1] = bits[new_pos]
        vals.append(f[index_of(tuple(old))])
    return Signature(n, tuple(vals), f.backend)


def holo(f: Signature, t: Transform2x2) -> Signature:
    """Apply t to every variable: the signature T^(x) n f, column convention."""
    t = _match_transform(f, t)
    n = f.arity
    vals = list(f.values)
    for p in range(n):
        stride = 1 << (n - 1 - p)
        nxt = list(vals)
        for idx in range(1 << n):
            if idx & stride:
                continue
            lo = vals[idx]
            hi = vals[idx | stride]
            nxt[idx] = t.a * lo + t.b * hi
            nxt[idx | stride] = t.c * lo + t.d * hi
        vals = nxt
    return Signature(n, tuple(vals), f.backend)


def hat(f: Signature) -> Signature:
    """The Z^(-1) holographic image of f."""
    return holo(f, z_inverse())


def unhat(fh: Signature) -> Signature:
    return holo(fh, z_transform())


def connect_unary(f: Signature, i: int, u: Signature) -> Signature:
    """Attach the unary u to variable i: u(0) f_i^0 + u(1) f_i^1."""
    if u.arity != 1:
        raise ArityError("connect_unary needs a unary signature")
    if isinstance(f.backend, FloatBackend) and isinstance(u.backend, ExactBackend):
        u = u.to_float()
    elif isinstance(f.backend, ExactBackend) and isinstance(u.backend, FloatBackend):
        raise BackendMismatch("float unary cannot contract an exact signature")
    f0 = pin(f, i, 0)
    f1 = pin(f, i, 1)
    return f0.scale(u[0]).add(f1.scale(u[1]))


def compose(
    f: Signature,
    g: Signature,
    joins: Sequence[tuple],
    wire: Optional[Signature] = None,
) -> Signature:
    """Wire variables of f to variables of g through a binary signature.

    joins lists (i, j) pairs: variable i of f meets variable j of g, by
    default through an equality edge.  Unjoined variables of f come
    first in the result, then unjoined variables of g, both in their
    original order.
    """
    t = tensor(f, g)
    nf = f.arity
    used_f = set()
    used_g = set()
    for i, j in joins:
        if not 1 <= i <= nf:
            raise DomainError("join index %d out of range for the left factor" % i)
        if not 1 <= j <= g.arity:
            raise DomainError("join index %d out of range for the right factor" % j)
        if i in used_f or j in used_g:
            raise DomainError("a variable can be joined at most once")
        used_f.add(i)
        used_g.add(j)
    removed = []
    for i, j in joins:
        a_pos = i
        b_pos = nf + j
        a_cur = a_pos - sum(1 for r in removed if r < a_pos)
        b_cur = b_pos - sum(1 for r in removed if r < b_pos)
        t = self_loop(t, a_cur, b_cur, wire)
        removed.extend([a_pos, b_pos])
    return t


def compose_self(f: Signature, joins: Sequence[tuple], wire=None) -> Signature:
    """Compose f with a fresh copy of itself; joins read (var of copy 1, var of copy 2)."""
    return compose(f, f, joins, wire)


def proportional(f: Signature, g: Signature):
    """The scalar s with g == s*f, or None if no such scalar exists.

    Both zero gives 1; the scalar is 0 when g is zero and f is not.
    """
    if f.arity != g.arity:
        raise DomainError("proportionality compares equal arities")
    if type(f.backend) is not type(g.backend):
        raise BackendMismatch("proportionality needs matching backends")
    be = f.backend
    k = f.first_nonzero_index()
    if k is None:
        return be.coerce(1) if g.is_zero else None
    s = be.div(g[k], f[k])
    for idx in range(1 << f.arity):
        if not be.eq(g[idx], s * f[idx]):
            return None
    return s


def orthogonality_kind(q: Transform2x2) -> str:
    """Classify the hat image of a real orthogonal-up-to-scalar matrix.

    Rotations hat to anti-diagonal matrices and reflections to diagonal
    ones.  Anything not real orthogonal up to a nonzero scalar reports
    "neither" without inspecting the hat image at all.
    """
    if not q.is_orthogonal_up_to_scalar():
        return "neither"
    zi = z_inverse() if isinstance(q.backend, ExactBackend) else z_inverse(q.backend)
    qh = zi.matmul(q).matmul(zi.transpose())
    if qh.is_anti_diagonal():
        return "antidiagonal-hat"
    if qh.is_diagonal():
        return "diagonal-hat"
    raise AnomalyError("hat of an orthogonal matrix was neither diagonal nor anti-diagonal")


@dataclass(frozen=True)
class InterpolationReport:
    """Hypothesis checks for the two interpolation lemmas; nothing is executed."""

    eigenvalues: tuple
    path: str
    degenerate: bool
    eig_ratio_off_unit_circle: bool
    h_not_eigenvector: Optional[bool]


def interpolation_predicates(
    g: Signature, h: Optional[Signature] = None
) -> InterpolationReport:
    """Eigenvalue facts about M(g) that drive interpolation arguments.

    Exact eigenvalues whenever the discriminant of the characteristic
    polynomial is rational (its square root then lives in a cyclotomic
    field); otherwise floating point with the configured epsilon.
    """
    if g.arity != 2:
        raise ArityError("interpolation predicates need a binary signature")
    if g.is_zero:
        raise DomainError("zero signature has no useful interpolation report")
    be = g.backend
    m00, m01, m10, m11 = g[0], g[1], g[2], g[3]
    tr = m00 + m11
    det = m00 * m11 - m01 * m10
    degenerate = be.is_zero(det)
    lam = None
    path = "float"
    if isinstance(be, ExactBackend):
        disc = tr * tr - det.scale_fraction(4)
        if disc.is_rational:
            half = Cyclo.from_rational(1, disc.order).scale_fraction(1, 2)
            rt = sqrt_rational(disc.as_fraction())
            lam = ((tr + rt) * half, (tr - rt) * half)
            path = "exact"
    if lam is None:
        c00, c01, c10, c11 = (be.as_complex(v) for v in (m00, m01, m10, m11))
        ctr = c00 + c11
        cdet = c00 * c11 - c01 * c10
        rt = (ctr * ctr - 4 * cdet) ** 0.5
        lam = ((ctr + rt) / 2, (ctr - rt) / 2)
    if path == "exact":
        off_circle = not (lam[0] * lam[0].conj() == lam[1] * lam[1].conj())
    else:
        from .config import get_epsilon

        off_circle = abs(abs(lam[0]) - abs(lam[1])) > get_epsilon()
    h_flag = None
    if h is not None:
        if h.arity != 1:
            raise ArityError("the optional h must be unary")
        if h.is_zero:
            raise DomainError("the optional h must be nonzero")
        if type(h.backend) is not type(be):
            raise BackendMismatch("h must share g's backend")
        image = Signature(
            1, (m00 * h[0] + m01 * h[1], m10 * h[0] + m11 * h[1]), be
        )
        h_flag = proportional(h, image) is None
    return InterpolationReport(
        eigenvalues=lam,
        path=path,
        degenerate=degenerate,
        eig_ratio_off_unit_circle=off_circle,
        h_not_eigenvector=h_flag,
    )
