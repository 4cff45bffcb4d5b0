"""Finite groups as explicit multiplication tables, plus homs and actions.

Elements of a group of order ``n`` are the integers ``0 .. n-1``.  All
structure (multiplication, homomorphisms, actions) is tabulated, so every
law can be checked exhaustively.  Groups in this package are small (the
verification corpus stays at order <= 64), which keeps the cubic
associativity sweep trivial.

``verify_group`` and friends are total: they return a
:class:`~gerbe.report.ValidationReport` with witnesses rather than raising.
Constructors raise :class:`StructuralError` for malformed data and
:class:`InvariantViolation` when the data is well-shaped but the axioms
fail, so that an instance in hand is always an actual group.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .report import InvariantViolation, StructuralError, ValidationReport


def _as_table(table, what: str) -> np.ndarray:
    arr = np.asarray(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise StructuralError(f"{what}: expected a nonempty square table, got shape {arr.shape}")
    return arr


def verify_group(table) -> ValidationReport:
    """Check that a raw multiplication table defines a group.

    Laws reported on failure: ``closure`` (entry out of range, witness
    ``(a, b)``), ``identity`` (no two-sided identity, empty witness),
    ``inverses`` (witness ``(a,)``), ``associativity`` (witness
    ``(a, b, c)``).
    """
    report = ValidationReport("group")
    try:
        t = _as_table(table, "group table")
    except StructuralError as exc:
        report.fail("structure", (), str(exc))
        return report
    n = t.shape[0]

    bad = np.argwhere((t < 0) | (t >= n))
    for a, b in bad[: report.max_failures]:
        report.fail("closure", (int(a), int(b)), f"entry {int(t[a, b])} out of range")
    if not report.valid:
        return report

    # Two-sided identity.
    idx = np.arange(n)
    identity = None
    for e in range(n):
        if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx):
            identity = e
            break
    if identity is None:
        report.fail("identity", (), "no two-sided identity element")
        return report

    for a in range(n):
        row = t[a]
        invs = np.flatnonzero(row == identity)
        if len(invs) == 0 or t[invs[0], a] != identity:
            report.fail("inverses", (a,), "no two-sided inverse")

    # t[t[a,b],c] versus t[a,t[b,c]], fully vectorised:
    # t[t][a,b,c] = t[t[a,b],c] and np.take(t, t, axis=1)[a,b,c] = t[a,t[b,c]].
    left = t[t, :]
    right = np.take(t, t, axis=1)
    mismatch = np.argwhere(left != right)
    for a, b, c in mismatch[: report.max_failures]:
        report.fail("associativity", (int(a), int(b), int(c)))
    return report


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``table[a, b]`` is the product ``a * b``.  The constructor validates the
    axioms exhaustively and precomputes the identity and the inverse table.
    ``labels`` are optional display names used in reports.
    """

    def __init__(self, table, labels: Sequence[str] | None = None):
        self.table = _as_table(table, "group table")
        self.table.setflags(write=False)
        self.order = int(self.table.shape[0])
        verify_group(self.table).require_valid()

        idx = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], idx):
                self.identity = e
                break
        inverse = np.empty(self.order, dtype=np.int64)
        for a in range(self.order):
            inverse[a] = int(np.flatnonzero(self.table[a] == self.identity)[0])
        inverse.setflags(write=False)
        self.inverse = inverse

        if labels is None:
            labels = [str(i) for i in range(self.order)]
        labels = [str(x) for x in labels]
        if len(labels) != self.order:
            raise StructuralError(
                f"labels: expected {self.order} entries, got {len(labels)}"
            )
        self.labels = labels

    # -- arithmetic -------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, a: int, b: int) -> int:
        """``a * b * a^-1``."""
        return int(self.table[self.table[a, b], self.inverse[a]])

    def comm(self, a: int, b: int) -> int:
        """Commutator ``a * b * a^-1 * b^-1``."""
        return int(self.table[self.conj(a, b), self.inverse[b]])

    def prod(self, elements: Iterable[int]) -> int:
        out = self.identity
        for x in elements:
            out = int(self.table[out, x])
        return out

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity
        for _ in range(k):
            out = int(self.table[out, a])
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = int(self.table[x, a])
            k += 1
        return k

    @property
    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def label(self, a: int) -> str:
        return self.labels[a]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __repr__(self) -> str:
        return f"<FiniteGroup order={self.order}>"


class GroupHom:
    """A homomorphism between finite groups, tabulated as ``mapping``.

    The constructor checks shape and range only; use :func:`hom_verify` for
    the multiplicative law (so that broken candidate maps can be diagnosed
    rather than rejected outright).
    """

    def __init__(self, source: FiniteGroup, target: FiniteGroup, mapping):
        self.source = source
        self.target = target
        arr = np.asarray(mapping, dtype=np.int64)
        if arr.shape != (source.order,):
            raise StructuralError(
                f"hom mapping: expected {source.order} entries, got shape {arr.shape}"
            )
        if arr.size and (arr.min() < 0 or arr.max() >= target.order):
            raise StructuralError("hom mapping: image index out of range")
        arr.setflags(write=False)
        self.mapping = arr

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])

    def after(self, inner: "GroupHom") -> "GroupHom":
        """Composite ``self . inner`` (apply ``inner`` first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise StructuralError("hom composition: inner target differs from outer source")
        return GroupHom(inner.source, self.target, self.mapping[inner.mapping])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupHom)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.mapping, other.mapping)
        )

    def __repr__(self) -> str:
        return f"<GroupHom {self.source.order}->{self.target.order}>"


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, np.arange(g.order))


def hom_verify(h: GroupHom) -> ValidationReport:
    """Check ``h(a*b) == h(a)*h(b)`` for all pairs; witnesses are ``(a, b)``."""
    report = ValidationReport("hom")
    f = h.mapping
    lhs = f[h.source.table]
    rhs = h.target.table[np.ix_(f, f)]
    for a, b in np.argwhere(lhs != rhs)[: report.max_failures]:
        report.fail("multiplicativity", (int(a), int(b)))
    return report


class GroupAction:
    """An action of ``actor`` on the group ``space`` by automorphisms.

    ``act[g, x]`` is the result of ``g`` acting on ``x``.  Structural checks
    only; :func:`action_verify` checks the automorphism and action laws.
    """

    def __init__(self, actor: FiniteGroup, space: FiniteGroup, act):
        self.actor = actor
        self.space = space
        arr = np.asarray(act, dtype=np.int64)
        if arr.shape != (actor.order, space.order):
            raise StructuralError(
                f"action table: expected shape {(actor.order, space.order)}, got {arr.shape}"
            )
        if arr.size and (arr.min() < 0 or arr.max() >= space.order):
            raise StructuralError("action table: entry out of range")
        arr.setflags(write=False)
        self.act = arr

    def __call__(self, g: int, x: int) -> int:
        return int(self.act[g, x])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GroupAction)
            and self.actor == other.actor
            and self.space == other.space
            and np.array_equal(self.act, other.act)
        )

    def __repr__(self) -> str:
        return f"<GroupAction {self.actor.order} on {self.space.order}>"


def action_verify(action: GroupAction) -> ValidationReport:
    """Check the laws of an action by automorphisms.

    Laws: ``bijectivity`` (witness ``(g,)``), ``automorphism`` (witness
    ``(g, x, y)``), ``identity-acts-trivially`` (witness ``(x,)``) and
    ``compatibility`` (``act[g*h] == act[g] . act[h]``, witness
    ``(g, h, x)``).
    """
    report = ValidationReport("action")
    a = action.act
    sp, ac = action.space, action.actor
    for g in ac.elements:
        if len(set(a[g].tolist())) != sp.order:
            report.fail("bijectivity", (g,))
    if not report.valid:
        return report
    for g in ac.elements:
        row = a[g]
        lhs = row[sp.table]
        rhs = sp.table[np.ix_(row, row)]
        for x, y in np.argwhere(lhs != rhs)[:4]:
            report.fail("automorphism", (g, int(x), int(y)))
    e = ac.identity
    for x in np.flatnonzero(a[e] != np.arange(sp.order))[:4]:
        report.fail("identity-acts-trivially", (int(x),))
    # act[g*h] == act[g] applied after act[h]
    composed = a[:, a]  # composed[g, h, x] = a[g, a[h, x]]
    direct = a[ac.table]  # direct[g, h, x] = a[g*h, x]
    for g, h, x in np.argwhere(direct != composed)[: report.max_failures]:
        report.fail("compatibility", (int(g), int(h), int(x)))
    return report


def trivial_action(actor: FiniteGroup, space: FiniteGroup) -> GroupAction:
    act = np.tile(np.arange(space.order), (actor.order, 1))
    return GroupAction(actor, space, act)


def conjugation_action(g: FiniteGroup) -> GroupAction:
    """``g`` acting on itself by ``x -> a x a^-1``."""
    act = np.empty((g.order, g.order), dtype=np.int64)
    for a in g.elements:
        for x in g.elements:
            act[a, x] = g.conj(a, x)
    return GroupAction(g, g, act)


# -- subgroups, kernels, quotients ----------------------------------------


class Subgroup:
    """A subgroup recorded as a sorted element tuple inside its parent."""

    def __init__(self, parent: FiniteGroup, elements: Iterable[int]):
        elts = tuple(sorted(set(int(x) for x in elements)))
        for x in elts:
            if not 0 <= x < parent.order:
                raise StructuralError(f"subgroup element {x} out of range")
        if parent.identity not in elts:
            raise StructuralError("subgroup does not contain the identity")
        for a in elts:
            if parent.inv(a) not in elts:
                raise StructuralError(f"subgroup not closed under inverse at {a}")
            for b in elts:
                if parent.mul(a, b) not in elts:
                    raise StructuralError(f"subgroup not closed under product at ({a}, {b})")
        self.parent = parent
        self.elements = elts
        self.order = len(elts)

    def __contains__(self, x: int) -> bool:
        return x in self._index

    @property
    def _index(self) -> dict[int, int]:
        cached = getattr(self, "_index_cache", None)
        if cached is None:
            cached = {x: i for i, x in enumerate(self.elements)}
            self._index_cache = cached
        return cached

    def as_group(self) -> tuple[FiniteGroup, GroupHom]:
        """Materialise the subgroup with its embedding homomorphism."""
        pos = self._index
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[i, j] = pos[self.parent.mul(a, b)]
        grp = FiniteGroup(table, [self.parent.label(x) for x in self.elements])
        embed = GroupHom(grp, self.parent, list(self.elements))
        return grp, embed

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent == other.parent
            and self.elements == other.elements
        )

    def __repr__(self) -> str:
        return f"<Subgroup order={self.order} of {self.parent.order}>"


def subgroup_closure(g: FiniteGroup, generators: Iterable[int]) -> Subgroup:
    seen = {g.identity}
    frontier = [g.identity]
    gens = [int(x) for x in generators]
    while frontier:
        x = frontier.pop()
        for a in gens:
            for y in (g.mul(x, a), g.mul(x, g.inv(a))):
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
    return Subgroup(g, seen)


def kernel(h: GroupHom) -> Subgroup:
    hom_verify(h).require_valid()
    e = h.target.identity
    return Subgroup(h.source, (int(x) for x in np.flatnonzero(h.mapping == e)))


def image(h: GroupHom) -> Subgroup:
    hom_verify(h).require_valid()
    return Subgroup(h.target, (int(x) for x in set(h.mapping.tolist())))


def is_normal(g: FiniteGroup, elements: Iterable[int]) -> bool:
    elts = set(int(x) for x in elements)
    return all(g.conj(a, x) in elts for a in g.elements for x in elts)


def quotient(g: FiniteGroup, sub: Subgroup | Iterable[int]) -> tuple[FiniteGroup, GroupHom]:
    """Quotient by a normal subgroup, with the projection homomorphism.

    Cosets are numbered by their least element, ascending, so the result is
    deterministic and the identity coset is element 0.
    """
    if not isinstance(sub, Subgroup):
        sub = Subgroup(g, sub)
    if sub.parent != g:
        raise StructuralError("quotient: subgroup belongs to a different group")
    if not is_normal(g, sub.elements):
        raise InvariantViolation("quotient: subgroup is not normal")

    coset_of = [-1] * g.order
    reps: list[int] = []
    for x in g.elements:
        if coset_of[x] >= 0:
            continue
        rep_index = len(reps)
        members = sorted(g.mul(x, s) for s in sub.elements)
        reps.append(members[0])
        for y in members:
            coset_of[y] = rep_index
    n = len(reps)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            table[i, j] = coset_of[g.mul(a, b)]
    labels = [f"[{g.label(r)}]" for r in reps]
    q = FiniteGroup(table, labels)
    proj = GroupHom(g, q, coset_of)
    return q, proj


# -- stock constructors ----------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], ["e"])


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise StructuralError("cyclic: order must be positive")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, [str(i) for i in range(n)])


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Product group on index ``i * b.order + j``."""
    na, nb = a.order, b.order
    table = np.empty((na * nb, na * nb), dtype=np.int64)
    for i1 in range(na):
        for j1 in range(nb):
            for i2 in range(na):
                for j2 in range(nb):
                    table[i1 * nb + j1, i2 * nb + j2] = (
                        a.mul(i1, i2) * nb + b.mul(j1, j2)
                    )
    labels = [f"({a.label(i)},{b.label(j)})" for i in range(na) for j in range(nb)]
    return FiniteGroup(table, labels)


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on ``n`` letters, permutations in lexicographic order.

    Composition is ``(s * t)(x) = s(t(x))``.  Works for n <= 4 within the
    package's intended order range.
    """
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = np.empty((size, size), dtype=np.int64)
    for i, s in enumerate(perms):
        for j, t in enumerate(perms):
            table[i, j] = pos[tuple(s[t[x]] for x in range(n))]
    labels = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(table, labels)


def alternating_subgroup(sym: FiniteGroup) -> Subgroup:
    """Even permutations of a group built by :func:`symmetric`."""
    even = []
    for i, lab in enumerate(sym.labels):
        p = [int(c) for c in lab]
        inversions = sum(
            1 for x in range(len(p)) for y in range(x + 1, len(p)) if p[x] > p[y]
        )
        if inversions % 2 == 0:
            even.append(i)
    return Subgroup(sym, even)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order ``2n``; index ``i + n*j`` for ``r^i s^j``."""
    if n < 1:
        raise StructuralError("dihedral: n must be positive")
    size = 2 * n
    table = np.empty((size, size), dtype=np.int64)
    for i1 in range(n):
        for j1 in range(2):
            for i2 in range(n):
                for j2 in range(2):
                    # r^i1 s^j1 r^i2 s^j2 = r^(i1 + (-1)^j1 i2) s^(j1+j2)
                    i = (i1 + (i2 if j1 == 0 else -i2)) % n
                    j = (j1 + j2) % 2
                    table[i1 + n * j1, i2 + n * j2] = i + n * j
    labels = [f"r{i}" for i in range(n)] + [f"r{i}s" for i in range(n)]
    return FiniteGroup(table, labels)


def quaternion8() -> FiniteGroup:
    """Quaternion group; indices 0..7 are 1, i, j, k, -1, -i, -j, -k."""
    # basis multiplication: (sign, axis) pairs for e,i,j,k products
    basis = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    table = np.empty((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            sa, xa = (-1 if a >= 4 else 1), a % 4
            sb, xb = (-1 if b >= 4 else 1), b % 4
            s, x = basis[(xa, xb)]
            s *= sa * sb
            table[a, b] = x + (0 if s > 0 else 4)
    return FiniteGroup(table, ["1", "i", "j", "k", "-1", "-i", "-j", "-k"])


def klein_four() -> FiniteGroup:
    return direct_product(cyclic(2), cyclic(2))
