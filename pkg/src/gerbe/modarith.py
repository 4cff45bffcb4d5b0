"""Exact linear algebra over the integers and products of cyclic groups.

The classification and lifting layers reduce their abelian questions to
linear systems of the shape ``A x = t (mod e)`` where ``x`` ranges over a
product of cyclic groups.  Everything here is exact: matrices are lists of
Python integers, so there is no overflow and no numerical tolerance.  The
single primitive is the Smith normal form; membership tests, solution
witnesses, kernel generators and cokernel invariants all derive from it.

For systems whose moduli are all 2 the bitmask kit at the bottom is far
faster: vectors are Python integers with coordinate ``p`` stored in bit
``p``, and elimination is XOR.  ``Gf2Span.reduce`` returns the
lexicographically least element of a coset (coordinate 0 compared first),
which the classification layer uses for canonical representatives.
"""

from __future__ import annotations

from bisect import insort
from math import prod

from .groups import FiniteGroup, subgroup_closure, quotient
from .report import InvariantViolation, ResourceBudgetError, StructuralError


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_vec(a: list[list[int]], x: list[int]) -> list[int]:
    return [sum(row[j] * x[j] for j in range(len(x))) for row in a]


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    cols = len(b[0]) if b else 0
    return [
        [sum(row[k] * b[k][j] for k in range(len(b))) for j in range(cols)]
        for row in a
    ]


def smith_normal_form(a):
    """Diagonalise an integer matrix: returns (u, s, v) with u a v = s.

    ``u`` and ``v`` are unimodular (products of elementary row and column
    operations), ``s`` is diagonal with nonnegative entries and each
    diagonal entry divides the next.  Works on any rectangular matrix,
    including empty ones.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    s = [[int(x) for x in row] for row in a]
    u = _identity(rows)
    v = _identity(cols)

    def row_op(i, j, q):  # row i -= q * row j
        s[i] = [x - q * y for x, y in zip(s[i], s[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col i -= q * col j
        for r in s:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    def row_swap(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero magnitude in the remaining block
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if s[i][j] and (pivot is None or abs(s[i][j]) < abs(s[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        if pivot != (t, t):
            if pivot[0] != t:
                row_swap(t, pivot[0])
            if pivot[1] != t:
                col_swap(t, pivot[1])

        dirty = True
        while dirty:
            dirty = False
            for i in range(rows):
                if i != t and s[i][t]:
                    q = s[i][t] // s[t][t]
                    row_op(i, t, q)
                    if s[i][t]:  # remainder became the smaller pivot
                        row_swap(t, i)
                        dirty = True
            for j in range(cols):
                if j != t and s[t][j]:
                    q = s[t][j] // s[t][t]
                    col_op(j, t, q)
                    if s[t][j]:
                        col_swap(t, j)
                        dirty = True
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

        # the pivot must divide the whole remaining block; if it does not,
        # fold the offending row in and re-clear (strictly shrinks the pivot)
        p = s[t][t]
        offender = None
        for i in range(t + 1, rows):
            if any(x % p for x in s[i][t + 1:]):
                offender = i
                break
        if offender is not None:
            row_op(t, offender, -1)
            continue
        t += 1
    return u, s, v


def _det_unimodular_check(m: list[list[int]]) -> bool:
    """True when the integer matrix has determinant +-1 (test helper)."""
    n = len(m)
    if n == 0:
        return True
    # fraction-free Gaussian elimination (Bareiss)
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return False
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return abs(sign * a[-1][-1]) == 1


class ModHom:
    """A homomorphism between finite products of cyclic groups.

    The domain is ``prod Z_dom[j]``, the codomain ``prod Z_cod[i]``, and
    ``matrix`` (rows indexed by the codomain) sends the j-th domain
    generator to the j-th column.  Well-definedness (each column times its
    domain modulus lands in the codomain relations) is checked up front.

    All the derived data comes from one Smith normal form of the block
    matrix ``[matrix | diag(cod)]``, whose column lattice is exactly the
    set of integer vectors representing the image.
    """

    def __init__(self, matrix, dom, cod):
        self.dom = [int(d) for d in dom]
        self.cod = [int(e) for e in cod]
        if any(d <= 0 for d in self.dom) or any(e <= 0 for e in self.cod):
            raise StructuralError("ModHom: moduli must be positive")
        self.matrix = [[int(x) for x in row] for row in matrix]
        if len(self.matrix) != len(self.cod):
            raise StructuralError("ModHom: row count must match codomain rank")
        for row in self.matrix:
            if len(row) != len(self.dom):
                raise StructuralError("ModHom: column count must match domain rank")
        for i, e in enumerate(self.cod):
            for j, d in enumerate(self.dom):
                if (self.matrix[i][j] * d) % e:
                    raise StructuralError(
                        f"ModHom: entry ({i},{j}) does not respect the moduli"
                    )
        n, m = len(self.cod), len(self.dom)
        self._m = m
        self._n = n
        if n == 0:
            self._u, self._v, self._s = [], _identity(m), []
            return
        block = [
            self.matrix[i] + [self.cod[i] if j == i else 0 for j in range(n)]
            for i in range(n)
        ]
        self._u, snf, self._v = smith_normal_form(block)
        # diag(cod) has full row rank, so the rank is n and all s_k > 0
        self._s = [snf[k][k] for k in range(n)]

    # -- orders ------------------------------------------------------------

    def cokernel_order(self) -> int:
        return prod(self._s)

    def image_order(self) -> int:
        return prod(self.cod) // self.cokernel_order()

    def kernel_order(self) -> int:
        return prod(self.dom) * self.cokernel_order() // prod(self.cod)

    # -- membership, witnesses, invariants ----------------------------------

    def apply(self, x) -> tuple[int, ...]:
        return tuple(
            sum(row[j] * x[j] for j in range(self._m)) % e
            for row, e in zip(self.matrix, self.cod)
        )

    def cokernel_invariant(self, t) -> tuple[int, ...]:
        """A complete invariant of ``t`` modulo the image.

        Two targets lie in the same image coset exactly when their
        invariants agree; the invariant of an image element is all zeros.
        """
        w = mat_vec(self._u, list(t))
        return tuple(w[k] % self._s[k] for k in range(self._n) if self._s[k] != 1)

    def solve(self, t):
        """A domain vector with ``apply(x) == t mod cod``, or None."""
        w = mat_vec(self._u, list(t))
        z = [0] * (self._m + self._n)
        for k in range(self._n):
            if w[k] % self._s[k]:
                return None
            z[k] = w[k] // self._s[k]
        x = mat_vec(self._v, z)[: self._m]
        return tuple(x[j] % self.dom[j] for j in range(self._m))

    def kernel_generators(self) -> list[tuple[int, ...]]:
        """Generators of ``{x : apply(x) == 0}`` as a subgroup of the domain."""
        gens = []
        for j in range(self._n, self._m + self._n):
            col = [self._v[i][j] for i in range(self._m)]
            gens.append(tuple(col[i] % self.dom[i] for i in range(self._m)))
        return gens


def enumerate_span(gens, moduli, budget: int | None = None) -> list[tuple[int, ...]]:
    """All elements of the subgroup of ``prod Z_moduli`` the generators span.

    Breadth-first closure; the result is sorted.  ``budget`` bounds the
    subgroup size and a :class:`ResourceBudgetError` is raised beyond it.
    """
    moduli = [int(d) for d in moduli]
    zero = tuple(0 for _ in moduli)
    seen = {zero}
    frontier = [zero]
    gens = [tuple(int(g[i]) % moduli[i] for i in range(len(moduli))) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % d for a, b, d in zip(x, g, moduli))
                if y not in seen:
                    if budget is not None and len(seen) >= budget:
                        raise ResourceBudgetError(
                            f"enumerate_span: subgroup exceeds budget {budget}"
                        )
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


# -- GF(2) bitmask kit -------------------------------------------------------


def _low_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def gf2_lex_less(a: int, b: int) -> bool:
    """Lexicographic order on coordinate tuples (coordinate 0 first)."""
    if a == b:
        return False
    low = (a ^ b) & -(a ^ b)
    return not (a & low)


class Gf2Span:
    """A GF(2) subspace with membership, witnesses and coset leaders.

    Vectors are integers, coordinate ``p`` in bit ``p``.  The basis is kept
    fully reduced with pivots at the lowest set bit of each row, so
    ``reduce`` zeroes every pivot coordinate; the result is the unique
    coset element that is zero on all pivots, which is the
    lexicographically least element of the coset.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}  # pivot -> (vector, combo)
        self._pivots: list[int] = []  # sorted
        self._count = 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: int, combo: int) -> tuple[int, int]:
        # rows are fully reduced (zero at every other pivot), so one
        # ascending pass clears every pivot coordinate of v
        for p in self._pivots:
            if v >> p & 1:
                row, rc = self._rows[p]
                v ^= row
                combo ^= rc
        return v, combo

    def add(self, v: int) -> bool:
        """Insert a generator; True when it enlarged the span."""
        index = self._count
        self._count += 1
        v, combo = self._reduce(int(v), 1 << index)
        if v == 0:
            return False
        p = _low_bit(v)
        for q, (row, rc) in self._rows.items():
            if row >> p & 1:
                self._rows[q] = (row ^ v, rc ^ combo)
        self._rows[p] = (v, combo)
        insort(self._pivots, p)
        return True

    def reduce(self, v: int) -> int:
        """The lexicographically least element of ``v``'s coset."""
        return self._reduce(int(v), 0)[0]

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def solve(self, t: int):
        """A bitmask over inserted generators summing to ``t``, or None."""
        v, combo = self._reduce(int(t), 0)
        return combo if v == 0 else None


def gf2_kernel_basis(rows, width: int) -> list[int]:
    """A basis of ``{x : row . x == 0 for all rows}`` over GF(2)."""
    span = Gf2Span()
    for r in rows:
        span.add(r)
    pivots = sorted(span._rows)
    reduced = [span._rows[p][0] for p in pivots]
    pivot_set = set(pivots)
    basis = []
    for f in range(width):
        if f in pivot_set:
            continue
        vec = 1 << f
        for p, row in zip(pivots, reduced):
            if row >> f & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


# -- abelian group coordinates ------------------------------------------------


def abelian_basis(g: FiniteGroup):
    """Decompose a finite abelian group into cyclic factors.

    Returns ``(gens, moduli, coords)``: generator indices, their orders in
    descending divisibility order (each modulus divides the one before),
    and a dict sending every element to its coordinate tuple, so that
    ``prod(gens[i] ** coords[x][i]) == x``.
    """
    if not g.is_abelian():
        raise StructuralError("abelian_basis: group is not abelian")
    gens, moduli = _abelian_gens(g)
    if not gens:
        return [], [], {g.identity: ()}
    coords: dict[int, tuple[int, ...]] = {}

    # enumerate the product of cyclic factors and record coordinates
    def fill(prefix: tuple[int, ...], value: int, idx: int):
        if idx == len(gens):
            coords[value] = prefix
            return
        x = value
        for a in range(moduli[idx]):
            fill(prefix + (a,), x, idx + 1)
            x = g.mul(x, gens[idx])

    fill((), g.identity, 0)
    if len(coords) != g.order:
        raise InvariantViolation("abelian_basis: factors do not span the group")
    return gens, moduli, coords


def _abelian_gens(g: FiniteGroup) -> tuple[list[int], list[int]]:
    if g.order == 1:
        return [], []
    top = max(g.elements, key=lambda x: (g.element_order(x), -x))
    order = g.element_order(top)
    if order == g.order:
        return [top], [order]
    q, proj = quotient(g, subgroup_closure(g, [top]))
    qgens, qmoduli = _abelian_gens(q)
    gens = [top]
    for qg, qo in zip(qgens, qmoduli):
        lift = None
        for x in g.elements:
            if proj(x) == qg and g.element_order(x) == qo:
                lift = x
                break
        if lift is None:
            raise InvariantViolation("abelian_basis: no order-preserving lift")
        gens.append(lift)
    return gens, [order] + qmoduli


def hom_matrix(h, source_basis, target_basis) -> list[list[int]]:
    """The integer matrix of a group hom in abelian coordinates.

    ``source_basis`` and ``target_basis`` are ``abelian_basis`` results for
    the two groups; rows are indexed by target coordinates.
    """
    sgens, smoduli, _ = source_basis
    _, tmoduli, tcoords = target_basis
    cols = [tcoords[h(x)] for x in sgens]
    return [[cols[j][i] for j in range(len(sgens))] for i in range(len(tmoduli))]
