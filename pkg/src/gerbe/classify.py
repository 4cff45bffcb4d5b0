"""Gauge equivalence, exhaustive enumeration and classification of cocycles.

Everything here is exact and deterministic.  Three strategies cooperate:

- **Backtracking search.**  Cocycles are filled in slot by slot, in an order
  that visits an index tuple only after all tuples over smaller indices.
  Whenever a law expresses the boundary image of a slot in terms of earlier
  slots, the candidate set shrinks to one fibre of the boundary hom; the
  remaining laws become checks attached to the latest slot they mention.
  The same driver answers equivalence queries by searching over gauge data.

- **Cyclic coordinates.**  When the value groups are abelian and the actions
  and pairings that enter the laws are trivial, laws and gauge moves are
  linear over products of cyclic groups, and kernel/image orders, coset
  invariants and gauge witnesses all come from exact Smith normal forms
  (:mod:`gerbe.modarith`).  A ``None`` from :func:`equivalent` is then a
  proof, not a timeout.

- **GF(2) spans.**  With 2-torsion coefficients throughout, the linear
  model runs on bitmask linear algebra instead, which scales to cocycle
  spaces far too large to materialise; classes are represented by their
  lexicographically least coordinate vectors.

Search sizes are guarded: any operation that would visit more than
``GERBE_MAX_CANDIDATES`` candidates (default ``10**8``) raises
:class:`ResourceBudgetError` up front instead of stalling.

Equivalence of degree-3 cocycles whose structure has nontrivial M or N is
not implemented (the gauge groupoid at that level is out of scope); those
inputs raise :class:`UnsupportedOperation`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import modarith
from .cocycles import (
    AbelianObstruction,
    Bundle1Cocycle,
    Coboundary1,
    Coboundary2,
    Coboundary3,
    Gerbe2Cocycle,
    TcmCoboundary2,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
    _apply_coboundary_unchecked,
    apply_coboundary,
    product,
    verify,
)
from .crossed import CrossedModule, TwoCrossedModule
from .groups import FiniteGroup, verify_group
from .report import (
    InvariantViolation,
    ResourceBudgetError,
    StructuralError,
    UnsupportedOperation,
)

_DEFAULT_BUDGET = 100_000_000
_MATERIALIZE_LIMIT = 200_000  # cocycle sets above this are never materialised
_SNF_ENTRY_LIMIT = 250_000  # mixed-modulus systems above this many entries
_CLASS_COUNT_LIMIT = 100_000

_LEVELS = {
    "bundle1": Bundle1Cocycle,
    "gerbe2": Gerbe2Cocycle,
    "tcm-gerbe2": TcmGerbe2Cocycle,
    "two-gerbe3": TwoGerbe3Cocycle,
    "obstruction": AbelianObstruction,
}


def search_budget() -> int:
    """The candidate budget, from ``GERBE_MAX_CANDIDATES`` when set."""
    raw = os.environ.get("GERBE_MAX_CANDIDATES")
    if raw is None:
        return _DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise StructuralError(
            f"GERBE_MAX_CANDIDATES must be an integer, got {raw!r}"
        ) from None
    if value <= 0:
        raise StructuralError("GERBE_MAX_CANDIDATES must be positive")
    return value


def _level_tag(level) -> str:
    if isinstance(level, str):
        if level in _LEVELS:
            return level
        raise StructuralError(
            f"unknown cocycle level {level!r}; expected one of {sorted(_LEVELS)}"
        )
    for tag, cls in _LEVELS.items():
        if level is cls:
            return tag
    raise StructuralError(f"unknown cocycle level {level!r}")


def _check_structure(tag: str, structure) -> None:
    if tag in ("bundle1", "gerbe2"):
        if not isinstance(structure, CrossedModule):
            raise StructuralError(f"{tag} cocycles need a crossed module structure")
        structure.ensure_valid()
    elif tag in ("tcm-gerbe2", "two-gerbe3"):
        if not isinstance(structure, TwoCrossedModule):
            raise StructuralError(f"{tag} cocycles need a 2-crossed module structure")
        structure.ensure_valid()
    else:
        if not isinstance(structure, FiniteGroup) or not structure.is_abelian():
            raise StructuralError("obstruction cocycles need an abelian group")


# -- backtracking search -------------------------------------------------------


def _slot_key(slot):
    name, t = slot
    return (max(t), len(t), t)


class _SearchSpec:
    """Slots in fill order, per-slot candidate plans, bucketed checks.

    ``plan[slot]`` is one of ``("free", order)``, ``("fixed", values)`` or
    ``("fiber", fibers, target)`` where ``target(assignment)`` names the
    boundary value whose fibre is the candidate set.  Each check is a pair
    ``(slots_used, predicate)``; the predicate sees the assignment dict.
    """

    def __init__(self, slots, plan, checks):
        self.slots = slots
        self.plan = plan
        positions = {slot: p for p, slot in enumerate(slots)}
        self.checks_at = [[] for _ in slots]
        for used, predicate in checks:
            self.checks_at[max(positions[s] for s in used)].append(predicate)
        self.bounds = [self._bound(plan[slot]) for slot in slots]

    @staticmethod
    def _bound(entry):
        kind = entry[0]
        if kind == "free":
            return entry[1]
        if kind == "fixed":
            return len(entry[1])
        _, fibers, _ = entry
        if not fibers:
            return 0
        sizes = {len(f) for f in fibers.values()}
        return max(sizes)

    def candidates(self, pos, assignment):
        entry = self.plan[self.slots[pos]]
        kind = entry[0]
        if kind == "free":
            return range(entry[1])
        if kind == "fixed":
            return entry[1]
        _, fibers, target = entry
        return fibers.get(target(assignment), ())


def _require_estimate(spec: _SearchSpec, budget: int) -> int:
    est = 1
    for bound in spec.bounds:
        est *= max(1, bound)
        if est > budget:
            raise ResourceBudgetError(
                f"search needs more than {est} candidates, over the budget "
                f"{budget}; raise GERBE_MAX_CANDIDATES if this is intended"
            )
    return est


def _estimate_fits(spec: _SearchSpec, budget: int) -> bool:
    try:
        _require_estimate(spec, budget)
    except ResourceBudgetError:
        return False
    return True


def _search(spec: _SearchSpec, budget: int, mode: str, first_slice=None):
    """Run the backtracking search; ``mode`` is ``"all"`` or ``"first"``.

    ``first_slice = (offset, step)`` restricts the top-level candidate list
    to one residue class, which is how parallel workers split the tree.
    """
    slots = spec.slots
    total = len(slots)
    found: list[dict] = []
    assignment: dict = {}
    nodes = 0

    def descend(pos: int) -> bool:
        nonlocal nodes
        if pos == total:
            found.append(dict(assignment))
            return mode == "first"
        slot = slots[pos]
        cands = spec.candidates(pos, assignment)
        if pos == 0 and first_slice is not None:
            offset, step = first_slice
            cands = list(cands)[offset::step]
        for value in cands:
            nodes += 1
            if nodes > budget:
                raise ResourceBudgetError(
                    f"search visited more than {budget} candidates; raise "
                    "GERBE_MAX_CANDIDATES to continue"
                )
            assignment[slot] = value
            ok = True
            for check in spec.checks_at[pos]:
                if not check(assignment):
                    ok = False
                    break
            if ok and descend(pos + 1):
                return True
            del assignment[slot]
        return False

    descend(0)
    return found


def _hom_fibers(h) -> dict[int, tuple[int, ...]]:
    fibers: dict[int, list[int]] = {}
    for x in h.source.elements:
        fibers.setdefault(h(x), []).append(x)
    return {value: tuple(xs) for value, xs in fibers.items()}


def _ordered_slots(nerve, components):
    slots = []
    for name, arity in components:
        slots.extend((name, t) for t in nerve.tuples(arity))
    slots.sort(key=_slot_key)
    return slots


# -- per-level enumeration problems ---------------------------------------------


def _enumeration_spec(tag, structure, nerve):
    """The search problem whose solutions are the valid cocycles."""
    if tag == "bundle1":
        return _enum_bundle1(structure, nerve)
    if tag == "gerbe2":
        return _enum_gerbe2(structure, nerve)
    if tag == "tcm-gerbe2":
        return _enum_tcm_gerbe2(structure, nerve)
    if tag == "two-gerbe3":
        return _enum_two_gerbe3(structure, nerve)
    return _enum_obstruction(structure, nerve)


def _enum_bundle1(s: CrossedModule, nerve):
    L, M = s.L, s.M
    d1_fibers = _hom_fibers(s.d1)
    slots = _ordered_slots(nerve, Bundle1Cocycle.components)
    plan = {}
    for slot in slots:
        name, t = slot
        if name == "m":
            plan[slot] = ("free", M.order)
        else:
            i, j = t

            def target(a, i=i, j=j):
                return M.mul(a["m", (i,)], M.inv(a["m", (j,)]))

            plan[slot] = ("fiber", d1_fibers, target)
    checks = []
    for (i, j, k) in nerve.tuples(3):
        def law(a, i=i, j=j, k=k):
            return L.mul(a["l", (i, j)], a["l", (j, k)]) == a["l", (i, k)]

        checks.append(
            ([("l", (i, j)), ("l", (j, k)), ("l", (i, k))], law)
        )

    def build(a):
        m = {t: a["m", t] for t in nerve.tuples(1)}
        l = {t: a["l", t] for t in nerve.tuples(2)}
        return Bundle1Cocycle(s, nerve, m, l)

    return _SearchSpec(slots, plan, checks), build


def _enum_gerbe2(s: CrossedModule, nerve):
    L, M = s.L, s.M
    d1_fibers = _hom_fibers(s.d1)
    slots = _ordered_slots(nerve, Gerbe2Cocycle.components)
    plan = {}
    for slot in slots:
        name, t = slot
        if name == "m":
            plan[slot] = ("free", M.order)
        else:
            i, j, k = t

            def target(a, i=i, j=j, k=k):
                return M.prod(
                    [a["m", (i, j)], a["m", (j, k)], M.inv(a["m", (i, k)])]
                )

            plan[slot] = ("fiber", d1_fibers, target)
    checks = []
    for (i, j, k, l) in nerve.tuples(4):
        def law(a, i=i, j=j, k=k, l=l):
            lhs = L.mul(a["l", (i, j, k)], a["l", (i, k, l)])
            rhs = L.mul(s.act(a["m", (i, j)], a["l", (j, k, l)]), a["l", (i, j, l)])
            return lhs == rhs

        used = [
            ("l", (i, j, k)),
            ("l", (i, k, l)),
            ("m", (i, j)),
            ("l", (j, k, l)),
            ("l", (i, j, l)),
        ]
        checks.append((used, law))

    def build(a):
        m = {t: a["m", t] for t in nerve.tuples(2)}
        l = {t: a["l", t] for t in nerve.tuples(3)}
        return Gerbe2Cocycle(s, nerve, m, l)

    return _SearchSpec(slots, plan, checks), build


def _enum_tcm_gerbe2(t: TwoCrossedModule, nerve):
    L, M, N = t.L, t.M, t.N
    D = t.derived_table
    d1_fibers = _hom_fibers(t.d1)
    d2_fibers = _hom_fibers(t.d2)
    slots = _ordered_slots(nerve, TcmGerbe2Cocycle.components)
    plan = {}
    for slot in slots:
        name, tup = slot
        if name == "n":
            plan[slot] = ("free", N.order)
        elif name == "m":
            i, j = tup

            def target_m(a, i=i, j=j):
                return N.mul(a["n", (i,)], N.inv(a["n", (j,)]))

            plan[slot] = ("fiber", d2_fibers, target_m)
        else:
            i, j, k = tup

            def target_l(a, i=i, j=j, k=k):
                return M.prod(
                    [a["m", (i, j)], a["m", (j, k)], M.inv(a["m", (i, k)])]
                )

            plan[slot] = ("fiber", d1_fibers, target_l)
    checks = []
    for (i, j, k, l) in nerve.tuples(4):
        def law(a, i=i, j=j, k=k, l=l):
            lhs = L.mul(a["l", (i, j, k)], a["l", (i, k, l)])
            rhs = L.mul(int(D[a["m", (i, j)], a["l", (j, k, l)]]), a["l", (i, j, l)])
            return lhs == rhs

        used = [
            ("l", (i, j, k)),
            ("l", (i, k, l)),
            ("m", (i, j)),
            ("l", (j, k, l)),
            ("l", (i, j, l)),
        ]
        checks.append((used, law))

    def build(a):
        n = {tup: a["n", tup] for tup in nerve.tuples(1)}
        m = {tup: a["m", tup] for tup in nerve.tuples(2)}
        l = {tup: a["l", tup] for tup in nerve.tuples(3)}
        return TcmGerbe2Cocycle(t, nerve, n, m, l)

    return _SearchSpec(slots, plan, checks), build


def _enum_two_gerbe3(t: TwoCrossedModule, nerve):
    L, M, N = t.L, t.M, t.N
    D = t.derived_table
    aNM, aNL = t.actNM.act, t.actNL.act
    P = t.peiffer
    d1_fibers = _hom_fibers(t.d1)
    d2_fibers = _hom_fibers(t.d2)
    slots = _ordered_slots(nerve, TwoGerbe3Cocycle.components)
    plan = {}
    for slot in slots:
        name, tup = slot
        if name == "n":
            plan[slot] = ("free", N.order)
        elif name == "m":
            i, j, k = tup

            def target_m(a, i=i, j=j, k=k):
                return N.prod(
                    [a["n", (i, j)], a["n", (j, k)], N.inv(a["n", (i, k)])]
                )

            plan[slot] = ("fiber", d2_fibers, target_m)
        else:
            i, j, k, l = tup

            def target_l(a, i=i, j=j, k=k, l=l):
                return M.prod(
                    [
                        a["m", (i, j, k)],
                        a["m", (i, k, l)],
                        M.inv(a["m", (i, j, l)]),
                        M.inv(int(aNM[a["n", (i, j)], a["m", (j, k, l)]])),
                    ]
                )

            plan[slot] = ("fiber", d1_fibers, target_l)
    checks = []
    for (i, j, k, l, m) in nerve.tuples(5):
        def law(a, i=i, j=j, k=k, l=l, m=m):
            n_ij = a["n", (i, j)]
            lhs = L.prod(
                [
                    a["l", (i, j, k, l)],
                    int(D[int(aNM[n_ij, a["m", (j, k, l)]]), a["l", (i, j, l, m)]]),
                    int(aNL[n_ij, a["l", (j, k, l, m)]]),
                ]
            )
            rhs = L.prod(
                [
                    int(D[a["m", (i, j, k)], a["l", (i, k, l, m)]]),
                    int(P[a["m", (i, j, k)], int(aNM[a["n", (i, k)], a["m", (k, l, m)]])]),
                    int(
                        D[
                            int(aNM[N.mul(n_ij, a["n", (j, k)]), a["m", (k, l, m)]]),
                            a["l", (i, j, k, m)],
                        ]
                    ),
                ]
            )
            return lhs == rhs

        used = [
            ("l", (i, j, k, l)),
            ("l", (i, j, l, m)),
            ("l", (j, k, l, m)),
            ("l", (i, k, l, m)),
            ("l", (i, j, k, m)),
            ("m", (j, k, l)),
            ("m", (i, j, k)),
            ("m", (k, l, m)),
            ("n", (i, j)),
            ("n", (j, k)),
            ("n", (i, k)),
        ]
        checks.append((used, law))

    def build(a):
        n = {tup: a["n", tup] for tup in nerve.tuples(2)}
        m = {tup: a["m", tup] for tup in nerve.tuples(3)}
        l = {tup: a["l", tup] for tup in nerve.tuples(4)}
        return TwoGerbe3Cocycle(t, nerve, n, m, l)

    return _SearchSpec(slots, plan, checks), build


def _enum_obstruction(A: FiniteGroup, nerve):
    slots = _ordered_slots(nerve, AbelianObstruction.components)
    plan = {slot: ("free", A.order) for slot in slots}
    checks = []
    for (i, j, k, l, m) in nerve.tuples(5):
        def law(a, i=i, j=j, k=k, l=l, m=m):
            lhs = A.prod([a["a", (i, j, k, l)], a["a", (i, j, l, m)], a["a", (j, k, l, m)]])
            rhs = A.mul(a["a", (i, k, l, m)], a["a", (i, j, k, m)])
            return lhs == rhs

        used = [
            ("a", (i, j, k, l)),
            ("a", (i, j, l, m)),
            ("a", (j, k, l, m)),
            ("a", (i, k, l, m)),
            ("a", (i, j, k, m)),
        ]
        checks.append((used, law))

    def build(a):
        data = {t: a["a", t] for t in nerve.tuples(4)}
        return AbelianObstruction(A, nerve, data)

    return _SearchSpec(slots, plan, checks), build


# -- per-level gauge problems ----------------------------------------------------


def _gauge_spec(c1, c2):
    """The search problem whose solutions carry ``c1`` to ``c2``."""
    if isinstance(c1, Bundle1Cocycle):
        return _gauge_bundle1(c1, c2)
    if isinstance(c1, Gerbe2Cocycle):
        return _gauge_gerbe2(c1, c2)
    if isinstance(c1, TcmGerbe2Cocycle):
        return _gauge_tcm_gerbe2(c1, c2)
    raise UnsupportedOperation(
        f"gauge search over {type(c1).__name__} is not implemented, see docs"
    )


def _gauge_bundle1(c1, c2):
    s, nerve = c1.structure, c1.nerve
    L, M = s.L, s.M
    d1_fibers = _hom_fibers(s.d1)
    slots = [("l", t) for t in nerve.tuples(1)]
    plan = {}
    for slot in slots:
        (i,) = slot[1]
        value = M.mul(c2.m[(i,)], M.inv(c1.m[(i,)]))
        plan[slot] = ("fixed", d1_fibers.get(value, ()))
    checks = []
    for (i, j) in nerve.tuples(2):
        def law(a, i=i, j=j):
            out = L.prod([a["l", (i,)], c1.l[i, j], L.inv(a["l", (j,)])])
            return out == c2.l[i, j]

        checks.append(([("l", (i,)), ("l", (j,))], law))

    def build(a):
        return Coboundary1(s, nerve, {t: a["l", t] for t in nerve.tuples(1)})

    return _SearchSpec(slots, plan, checks), build


def _gauge_gerbe2(c1, c2):
    s, nerve = c1.structure, c1.nerve
    L, M = s.L, s.M
    d1_fibers = _hom_fibers(s.d1)
    slots = _ordered_slots(nerve, (("m", 1), ("l", 2)))
    plan = {}
    for slot in slots:
        name, t = slot
        if name == "m":
            plan[slot] = ("free", M.order)
        else:
            i, j = t

            def target(a, i=i, j=j):
                return M.prod(
                    [
                        M.inv(a["m", (i,)]),
                        c2.m[i, j],
                        a["m", (j,)],
                        M.inv(c1.m[i, j]),
                    ]
                )

            plan[slot] = ("fiber", d1_fibers, target)
    checks = []
    for (i, j, k) in nerve.tuples(3):
        def law(a, i=i, j=j, k=k):
            inner = L.prod(
                [
                    a["l", (i, j)],
                    s.act(c1.m[i, j], a["l", (j, k)]),
                    c1.l[i, j, k],
                    L.inv(a["l", (i, k)]),
                ]
            )
            return s.act(a["m", (i,)], inner) == c2.l[i, j, k]

        used = [("l", (i, j)), ("l", (j, k)), ("l", (i, k)), ("m", (i,))]
        checks.append((used, law))

    def build(a):
        m = {t: a["m", t] for t in nerve.tuples(1)}
        l = {t: a["l", t] for t in nerve.tuples(2)}
        return Coboundary2(s, nerve, m, l)

    return _SearchSpec(slots, plan, checks), build


def _gauge_tcm_gerbe2(c1, c2):
    t, nerve = c1.structure, c1.nerve
    L, M, N = t.L, t.M, t.N
    D = t.derived_table
    d1_fibers = _hom_fibers(t.d1)
    d2_fibers = _hom_fibers(t.d2)
    slots = _ordered_slots(nerve, (("m", 1), ("l", 2)))
    plan = {}
    for slot in slots:
        name, tup = slot
        if name == "m":
            (i,) = tup
            value = N.mul(c2.n[(i,)], N.inv(c1.n[(i,)]))
            plan[slot] = ("fixed", d2_fibers.get(value, ()))
        else:
            i, j = tup

            def target(a, i=i, j=j):
                return M.prod(
                    [
                        M.inv(a["m", (i,)]),
                        c2.m[i, j],
                        a["m", (j,)],
                        M.inv(c1.m[i, j]),
                    ]
                )

            plan[slot] = ("fiber", d1_fibers, target)
    checks = []
    for (i, j, k) in nerve.tuples(3):
        def law(a, i=i, j=j, k=k):
            inner = L.prod(
                [
                    a["l", (i, j)],
                    int(D[c1.m[i, j], a["l", (j, k)]]),
                    c1.l[i, j, k],
                    L.inv(a["l", (i, k)]),
                ]
            )
            return int(D[a["m", (i,)], inner]) == c2.l[i, j, k]

        used = [("l", (i, j)), ("l", (j, k)), ("l", (i, k)), ("m", (i,))]
        checks.append((used, law))

    def build(a):
        m = {tup: a["m", tup] for tup in nerve.tuples(1)}
        l = {tup: a["l", tup] for tup in nerve.tuples(2)}
        return TcmCoboundary2(t, nerve, m, l)

    return _SearchSpec(slots, plan, checks), build


# -- linear models ---------------------------------------------------------------


def _action_is_trivial(action) -> bool:
    actor, space = action.act.shape
    return bool(np.array_equal(action.act, np.tile(np.arange(space), (actor, 1))))


def _linear_structure(tag: str, structure) -> bool:
    """True when the level's laws and gauge moves are linear over cyclics.

    Only the operations that actually enter the laws matter: the degree-1
    laws never use the action, so a bundle over any abelian pair qualifies;
    the degree-2 crossed-module laws use the action; the 2-crossed laws use
    the Peiffer lifting but not the N-actions.
    """
    if tag == "bundle1":
        return structure.L.is_abelian() and structure.M.is_abelian()
    if tag == "gerbe2":
        return (
            structure.L.is_abelian()
            and structure.M.is_abelian()
            and _action_is_trivial(structure.actM)
        )
    if tag == "tcm-gerbe2":
        return (
            structure.L.is_abelian()
            and structure.M.is_abelian()
            and structure.N.is_abelian()
            and bool((structure.peiffer == structure.L.identity).all())
        )
    if tag == "two-gerbe3":
        return (
            structure.M.order == 1
            and structure.N.order == 1
            and structure.L.is_abelian()
        )
    return True  # obstruction coefficients are abelian by construction


_GAUGE_COMPONENTS = {
    "bundle1": (("l", 1, "L"),),
    "gerbe2": (("m", 1, "M"), ("l", 2, "L")),
    "tcm-gerbe2": (("m", 1, "M"), ("l", 2, "L")),
    "two-gerbe3": (("b", 3, "L"),),
    "obstruction": (("b", 3, "A"),),
}


class _LinearModel:
    """Laws and gauge moves as integer matrices over cyclic coordinates.

    Cocycle data is flattened to a vector whose blocks follow the canonical
    data order of the level (components in declared order, index tuples
    lexicographic), so vector order agrees with cocycle order.  ``law_rows``
    holds one row per cyclic law coordinate as ``(modulus, {column: coeff})``
    and ``phi`` maps gauge coordinates to the data shift they induce.
    """

    def __init__(self, tag: str, structure, nerve):
        self.tag = tag
        self.structure = structure
        self.nerve = nerve
        self.groups = self._component_groups(tag, structure)
        self.bases = {}
        self.elem_of = {}
        for name, group in self.groups.items():
            basis = modarith.abelian_basis(group)
            self.bases[name] = basis
            self.elem_of[name] = {coords: x for x, coords in basis[2].items()}

        components = _LEVELS[tag].components
        self.slots = []
        for name, arity in components:
            self.slots.extend((name, t) for t in nerve.tuples(arity))
        self.offsets = {}
        self.c_moduli = []
        for slot in self.slots:
            self.offsets[slot] = len(self.c_moduli)
            self.c_moduli.extend(self.bases[slot[0]][1])

        self.law_rows = []
        self._emit_laws()

        self.w_slots = []
        self.w_offsets = {}
        self.w_moduli = []
        for name, arity, key in _GAUGE_COMPONENTS[tag]:
            group = getattr(structure, key) if key != "A" else structure
            basis = modarith.abelian_basis(group)
            self.bases[f"w_{name}"] = basis
            self.elem_of[f"w_{name}"] = {coords: x for x, coords in basis[2].items()}
            for t in nerve.tuples(arity):
                slot = (name, t)
                self.w_slots.append(slot)
                self.w_offsets[slot] = len(self.w_moduli)
                self.w_moduli.extend(basis[1])
        self.phi: dict[tuple[int, int], int] = {}
        self._emit_gauge()

    @staticmethod
    def _component_groups(tag, structure):
        if tag == "bundle1" or tag == "gerbe2":
            return {"m": structure.M, "l": structure.L}
        if tag == "tcm-gerbe2" or tag == "two-gerbe3":
            return {"n": structure.N, "m": structure.M, "l": structure.L}
        return {"a": structure}

    # ---- law assembly

    def _law_terms(self, moduli, terms):
        """Append law rows ``sum(sign * coeff * slot coords) = 0``."""
        for r, modulus in enumerate(moduli):
            row: dict[int, int] = {}
            for sign, slot, matrix in terms:
                offset = self.offsets[slot]
                if matrix is None:
                    row[offset + r] = row.get(offset + r, 0) + sign
                else:
                    for col, coeff in enumerate(matrix[r]):
                        if coeff:
                            row[offset + col] = row.get(offset + col, 0) + sign * coeff
            cleaned = {c: v % modulus for c, v in row.items() if v % modulus}
            self.law_rows.append((modulus, cleaned))

    def _emit_laws(self):
        tag, nerve = self.tag, self.nerve
        if tag == "bundle1":
            mat_d1 = modarith.hom_matrix(
                self.structure.d1, self.bases["l"], self.bases["m"]
            )
            mm = self.bases["m"][1]
            lm = self.bases["l"][1]
            for (i, j) in nerve.tuples(2):
                self._law_terms(
                    mm,
                    [
                        (1, ("l", (i, j)), mat_d1),
                        (-1, ("m", (i,)), None),
                        (1, ("m", (j,)), None),
                    ],
                )
            for (i, j, k) in nerve.tuples(3):
                self._law_terms(
                    lm,
                    [
                        (1, ("l", (i, j)), None),
                        (1, ("l", (j, k)), None),
                        (-1, ("l", (i, k)), None),
                    ],
                )
        elif tag in ("gerbe2", "tcm-gerbe2"):
            s = self.structure
            mat_d1 = modarith.hom_matrix(s.d1, self.bases["l"], self.bases["m"])
            mm = self.bases["m"][1]
            lm = self.bases["l"][1]
            if tag == "tcm-gerbe2":
                mat_d2 = modarith.hom_matrix(s.d2, self.bases["m"], self.bases["n"])
                nm = self.bases["n"][1]
                for (i, j) in nerve.tuples(2):
                    self._law_terms(
                        nm,
                        [
                            (1, ("n", (i,)), None),
                            (-1, ("n", (j,)), None),
                            (-1, ("m", (i, j)), mat_d2),
                        ],
                    )
            for (i, j, k) in nerve.tuples(3):
                self._law_terms(
                    mm,
                    [
                        (1, ("m", (i, j)), None),
                        (1, ("m", (j, k)), None),
                        (-1, ("m", (i, k)), None),
                        (-1, ("l", (i, j, k)), mat_d1),
                    ],
                )
            for (i, j, k, l) in nerve.tuples(4):
                self._law_terms(
                    lm,
                    [
                        (1, ("l", (i, j, k)), None),
                        (1, ("l", (i, k, l)), None),
                        (-1, ("l", (j, k, l)), None),
                        (-1, ("l", (i, j, l)), None),
                    ],
                )
        else:
            name = "l" if tag == "two-gerbe3" else "a"
            moduli = self.bases[name][1]
            for (i, j, k, l, m) in self.nerve.tuples(5):
                self._law_terms(
                    moduli,
                    [
                        (1, (name, (i, j, k, l)), None),
                        (1, (name, (i, j, l, m)), None),
                        (1, (name, (j, k, l, m)), None),
                        (-1, (name, (i, k, l, m)), None),
                        (-1, (name, (i, j, k, m)), None),
                    ],
                )

    # ---- gauge assembly

    def _gauge_terms(self, target_slot, terms):
        """Record ``delta(target) += sum(sign * coeff * w coords)``."""
        width = len(self.bases[target_slot[0]][1])
        row_offset = self.offsets[target_slot]
        for sign, w_slot, matrix in terms:
            col_offset = self.w_offsets[w_slot]
            if matrix is None:
                for r in range(width):
                    key = (row_offset + r, col_offset + r)
                    self.phi[key] = self.phi.get(key, 0) + sign
            else:
                for r in range(width):
                    for col, coeff in enumerate(matrix[r]):
                        if coeff:
                            key = (row_offset + r, col_offset + col)
                            self.phi[key] = self.phi.get(key, 0) + sign * coeff

    def _emit_gauge(self):
        tag, nerve = self.tag, self.nerve
        if tag == "bundle1":
            mat_d1 = modarith.hom_matrix(
                self.structure.d1, self.bases["w_l"], self.bases["m"]
            )
            for (i,) in nerve.tuples(1):
                self._gauge_terms(("m", (i,)), [(1, ("l", (i,)), mat_d1)])
            for (i, j) in nerve.tuples(2):
                self._gauge_terms(
                    ("l", (i, j)),
                    [(1, ("l", (i,)), None), (-1, ("l", (j,)), None)],
                )
        elif tag in ("gerbe2", "tcm-gerbe2"):
            s = self.structure
            mat_d1 = modarith.hom_matrix(s.d1, self.bases["w_l"], self.bases["m"])
            if tag == "tcm-gerbe2":
                mat_d2 = modarith.hom_matrix(s.d2, self.bases["w_m"], self.bases["n"])
                for (i,) in nerve.tuples(1):
                    self._gauge_terms(("n", (i,)), [(1, ("m", (i,)), mat_d2)])
            for (i, j) in nerve.tuples(2):
                self._gauge_terms(
                    ("m", (i, j)),
                    [
                        (1, ("m", (i,)), None),
                        (-1, ("m", (j,)), None),
                        (1, ("l", (i, j)), mat_d1),
                    ],
                )
            for (i, j, k) in nerve.tuples(3):
                self._gauge_terms(
                    ("l", (i, j, k)),
                    [
                        (1, ("l", (i, j)), None),
                        (1, ("l", (j, k)), None),
                        (-1, ("l", (i, k)), None),
                    ],
                )
        else:
            name = "l" if tag == "two-gerbe3" else "a"
            for (i, j, k, l) in nerve.tuples(4):
                self._gauge_terms(
                    (name, (i, j, k, l)),
                    [
                        (1, ("b", (j, k, l)), None),
                        (-1, ("b", (i, k, l)), None),
                        (1, ("b", (i, j, l)), None),
                        (-1, ("b", (i, j, k)), None),
                    ],
                )

    # ---- vector conversions

    def encode(self, c) -> list[int]:
        vec = []
        for name, t in self.slots:
            vec.extend(self.bases[name][2][getattr(c, name)[t]])
        return vec

    def subtract(self, v2, v1) -> list[int]:
        return [(a - b) % m for a, b, m in zip(v2, v1, self.c_moduli)]

    def decode(self, vec):
        data = {name: {} for name in self.groups}
        pos = 0
        for name, t in self.slots:
            width = len(self.bases[name][1])
            coords = tuple(vec[pos : pos + width])
            pos += width
            data[name][t] = self.elem_of[name][coords]
        if self.tag == "bundle1":
            return Bundle1Cocycle(self.structure, self.nerve, data["m"], data["l"])
        if self.tag == "gerbe2":
            return Gerbe2Cocycle(self.structure, self.nerve, data["m"], data["l"])
        if self.tag == "tcm-gerbe2":
            return TcmGerbe2Cocycle(
                self.structure, self.nerve, data["n"], data["m"], data["l"]
            )
        if self.tag == "two-gerbe3":
            return TwoGerbe3Cocycle(
                self.structure, self.nerve, data["n"], data["m"], data["l"]
            )
        return AbelianObstruction(self.structure, self.nerve, data["a"])

    def decode_gauge(self, wvec):
        data = {}
        pos = 0
        for name, t in self.w_slots:
            width = len(self.bases[f"w_{name}"][1])
            coords = tuple(int(x) for x in wvec[pos : pos + width])
            pos += width
            data.setdefault(name, {})[t] = self.elem_of[f"w_{name}"][coords]
        nerve = self.nerve
        if self.tag == "bundle1":
            return Coboundary1(self.structure, nerve, data.get("l", {}))
        if self.tag == "gerbe2":
            return Coboundary2(
                self.structure,
                nerve,
                data.get("m", {t: 0 for t in nerve.tuples(1)}),
                data.get("l", {t: 0 for t in nerve.tuples(2)}),
            )
        if self.tag == "tcm-gerbe2":
            return TcmCoboundary2(
                self.structure,
                nerve,
                data.get("m", {t: 0 for t in nerve.tuples(1)}),
                data.get("l", {t: 0 for t in nerve.tuples(2)}),
            )
        return Coboundary3(
            self.structure, nerve, data.get("b", {t: 0 for t in nerve.tuples(3)})
        )


def _linear_model_for(tag, structure, nerve):
    if not _linear_structure(tag, structure):
        return None
    return _LinearModel(tag, structure, nerve)


# -- linear engines --------------------------------------------------------------


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def _pack_bits(vec) -> int:
    out = 0
    for pos, value in enumerate(vec):
        if value & 1:
            out |= 1 << pos
    return out


class _Gf2Engine:
    """Kernel/image bookkeeping over GF(2) bitmasks."""

    kind = "gf2"

    def __init__(self, model: _LinearModel):
        self.model = model
        self.width = len(model.c_moduli)
        law_masks = []
        for _, row in model.law_rows:
            mask = 0
            for col, coeff in row.items():
                if coeff & 1:
                    mask |= 1 << col
            if mask:
                law_masks.append(mask)
        self.law_masks = law_masks
        self.z_basis = modarith.gf2_kernel_basis(law_masks, self.width)
        self.w_count = len(model.w_moduli)
        columns = [0] * self.w_count
        for (r, c), coeff in model.phi.items():
            if coeff & 1:
                columns[c] |= 1 << r
        for column in columns:
            for law in law_masks:
                if _parity(column & law):
                    raise InvariantViolation(
                        "linear model: a gauge move violates a law row"
                    )
        self.columns = columns
        self.b_span = modarith.Gf2Span()
        for column in columns:
            self.b_span.add(column)

    def z_order(self) -> int:
        return 1 << len(self.z_basis)

    def b_order(self) -> int:
        return 1 << self.b_span.rank

    def invariant(self, vec):
        return self.b_span.reduce(_pack_bits(vec))

    def solve_gauge(self, delta):
        combo = self.b_span.solve(_pack_bits(delta))
        if combo is None:
            return None
        return [combo >> j & 1 for j in range(self.w_count)]

    def class_leaders(self, limit: int) -> list[int]:
        span = modarith.Gf2Span()
        for column in self.columns:
            span.add(column)
        complement = []
        for vector in self.z_basis:
            if span.add(vector):
                complement.append(vector)
        count = 1 << len(complement)
        if count > limit:
            raise ResourceBudgetError(
                f"{count} classes exceed the class table limit {limit}"
            )
        leaders = []
        for bits in range(count):
            v = 0
            for idx, vector in enumerate(complement):
                if bits >> idx & 1:
                    v ^= vector
            leaders.append(self.b_span.reduce(v))
        if len(set(leaders)) != count:
            raise InvariantViolation("linear model: coset leaders collide")
        return leaders

    def unpack(self, leader: int) -> list[int]:
        return [leader >> i & 1 for i in range(self.width)]


class _SnfEngine:
    """Kernel/image bookkeeping via exact Smith normal forms."""

    kind = "snf"

    def __init__(self, model: _LinearModel):
        self.model = model
        n_c = len(model.c_moduli)
        n_e = len(model.law_rows)
        n_w = len(model.w_moduli)
        if max(n_e, 1) * max(n_c, 1) > _SNF_ENTRY_LIMIT or max(n_c, 1) * max(
            n_w, 1
        ) > _SNF_ENTRY_LIMIT:
            raise ResourceBudgetError(
                "linear system too large for exact normal forms "
                f"({n_e} laws, {n_c} coordinates, {n_w} gauge coordinates)"
            )
        law_matrix = []
        law_moduli = []
        for modulus, row in model.law_rows:
            law_moduli.append(modulus)
            law_matrix.append([row.get(col, 0) for col in range(n_c)])
        self.psi = modarith.ModHom(law_matrix, model.c_moduli, law_moduli)
        phi_matrix = [[0] * n_w for _ in range(n_c)]
        for (r, c), coeff in model.phi.items():
            phi_matrix[r][c] = coeff % model.c_moduli[r]
        self.phi = modarith.ModHom(phi_matrix, model.w_moduli, model.c_moduli)

    def z_order(self) -> int:
        return self.psi.kernel_order()

    def b_order(self) -> int:
        return self.phi.image_order()

    def invariant(self, vec):
        return self.phi.cokernel_invariant(vec)

    def solve_gauge(self, delta):
        witness = self.phi.solve(delta)
        return None if witness is None else list(witness)


def _engine_for(model: _LinearModel):
    all_two = (
        all(m == 2 for m in model.c_moduli)
        and all(m == 2 for m in model.w_moduli)
        and all(modulus == 2 for modulus, _ in model.law_rows)
    )
    if all_two:
        return _Gf2Engine(model)
    return _SnfEngine(model)


# -- public operations -----------------------------------------------------------


class EquivalenceWitness:
    """A coboundary carrying one cocycle to another."""

    def __init__(self, coboundary):
        self.coboundary = coboundary

    def __eq__(self, other):
        return (
            isinstance(other, EquivalenceWitness)
            and self.coboundary == other.coboundary
        )

    def __repr__(self):
        return f"<EquivalenceWitness via {type(self.coboundary).__name__}>"


def _require_pair(c1, c2, what: str) -> None:
    if type(c1) is not type(c2):
        raise StructuralError(f"{what}: cocycle levels differ")
    if c1.structure != c2.structure:
        raise StructuralError(f"{what}: coefficient structures differ")
    if c1.nerve != c2.nerve:
        raise StructuralError(f"{what}: nerves differ")


def _require_valid(c, subject: str) -> None:
    report = verify(c)
    if not report.valid:
        report.subject = subject
        report.require_valid()


def equivalent(c1, c2):
    """An :class:`EquivalenceWitness` carrying ``c1`` to ``c2``, or None.

    Both inputs must be valid cocycles over the same structure and nerve.
    The decision is exact: a None return certifies that no gauge
    transformation relates the two (the candidate space was exhausted or
    the linear system was proved unsolvable).
    """
    _require_pair(c1, c2, "equivalent")
    _require_valid(c1, "equivalent input")
    _require_valid(c2, "equivalent input")
    tag = c1.level
    model = _linear_model_for(tag, c1.structure, c1.nerve)
    if model is not None:
        engine = _engine_for(model)
        delta = model.subtract(model.encode(c2), model.encode(c1))
        wvec = engine.solve_gauge(delta)
        if wvec is None:
            return None
        w = model.decode_gauge(wvec)
        if apply_coboundary(c1, w) != c2:
            raise InvariantViolation(
                "equivalent: solved gauge does not carry the first cocycle "
                "to the second"
            )
        return EquivalenceWitness(w)
    if tag == "two-gerbe3":
        raise UnsupportedOperation(
            "equivalence of degree-3 cocycles over a structure with "
            "nontrivial M or N is not implemented, see docs"
        )
    spec, build = _gauge_spec(c1, c2)
    budget = search_budget()
    _require_estimate(spec, budget)
    hits = _search(spec, budget, "first")
    if not hits:
        return None
    w = build(hits[0])
    if apply_coboundary(c1, w) != c2:
        raise InvariantViolation(
            "equivalent: search returned a gauge that fails to carry the "
            "first cocycle to the second"
        )
    return EquivalenceWitness(w)


def equivalence_search_size(c1, c2) -> int:
    """How many gauge candidates an exhaustive decision for the pair covers.

    For linear structures this is the size of the full gauge data space;
    otherwise it is the product of the per-slot candidate bounds of the
    search.  Useful for reporting what a None from :func:`equivalent` means.
    """
    _require_pair(c1, c2, "equivalence_search_size")
    tag = c1.level
    model = _linear_model_for(tag, c1.structure, c1.nerve)
    if model is not None:
        size = 1
        for modulus in model.w_moduli:
            size *= modulus
        return size
    if tag == "two-gerbe3":
        raise UnsupportedOperation(
            "equivalence of degree-3 cocycles over a structure with "
            "nontrivial M or N is not implemented, see docs"
        )
    spec, _ = _gauge_spec(c1, c2)
    size = 1
    for bound in spec.bounds:
        size *= bound
    return size


def enumerate_cocycles(level, structure, nerve, *, workers: int = 1):
    """Every valid cocycle of the level, sorted by canonical data vector.

    The search backtracks over data slots with boundary fibres as candidate
    sets.  Its size is estimated up front and checked against
    ``GERBE_MAX_CANDIDATES``; infeasible enumerations raise
    :class:`ResourceBudgetError` without visiting anything.  With
    ``workers > 1`` the top-level candidates are split round-robin; results
    are identical to the single-worker run.
    """
    tag = _level_tag(level)
    _check_structure(tag, structure)
    nerve.ensure_valid()
    if workers < 1:
        raise StructuralError("enumerate_cocycles: workers must be at least 1")
    budget = search_budget()
    spec, build = _enumeration_spec(tag, structure, nerve)
    _require_estimate(spec, budget)
    if workers == 1 or not spec.slots:
        assignments = _search(spec, budget, "all")
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(
                lambda r: _search(spec, budget, "all", first_slice=(r, workers)),
                range(workers),
            )
            assignments = [a for chunk in chunks for a in chunk]
    out = []
    for assignment in assignments:
        c = build(assignment)
        _require_valid(c, "enumerated cocycle")
        out.append(c)
    out.sort(key=lambda c: c.key())
    return out


# -- class tables ----------------------------------------------------------------


class ClassTable:
    """The equivalence classes of one (level, structure, nerve) triple.

    ``representatives[i]`` is the canonical cocycle of class ``i`` (the
    least element of the class in canonical data order whenever the class
    set was materialised), ``class_sizes[i]`` counts its cocycles, and
    ``product_table``, when the level's product applies, gives the induced
    class group as an index table.
    """

    def __init__(
        self, level, structure, nerve, representatives, class_sizes, product_table, membership
    ):
        self.level = level
        self.structure = structure
        self.nerve = nerve
        self.representatives = list(representatives)
        self.class_sizes = list(class_sizes)
        self.product_table = product_table
        self._membership = membership

    @property
    def class_count(self) -> int:
        return len(self.representatives)

    @property
    def cocycle_count(self) -> int:
        return sum(self.class_sizes)

    def class_of(self, cocycle) -> int:
        return class_of(cocycle, self)

    def __repr__(self):
        return (
            f"<ClassTable {self.level}: {self.class_count} classes, "
            f"{self.cocycle_count} cocycles>"
        )


def class_of(cocycle, table: ClassTable) -> int:
    """The index of the class of ``cocycle`` in ``table``.

    The cocycle must be valid and belong to the table's level, structure
    and nerve.
    """
    if not isinstance(table, ClassTable):
        raise StructuralError("class_of: second argument must be a ClassTable")
    expected = _LEVELS[table.level]
    if type(cocycle) is not expected:
        raise StructuralError(f"class_of: expected a {table.level} cocycle")
    if cocycle.structure != table.structure or cocycle.nerve != table.nerve:
        raise StructuralError(
            "class_of: cocycle belongs to a different structure or nerve"
        )
    _require_valid(cocycle, "class_of input")
    index = table._membership(cocycle)
    if index is None:
        raise InvariantViolation(
            "class_of: valid cocycle matched no class; the table is stale"
        )
    return index


def _generating_set(g: FiniteGroup) -> list[int]:
    """A small ascending generating set found by a greedy closure sweep."""
    gens: list[int] = []
    span = {g.identity}
    for x in g.elements:
        if x in span:
            continue
        gens.append(x)
        span = _closure(g, gens)
        if len(span) == g.order:
            break
    return gens


def _closure(g: FiniteGroup, gens) -> set[int]:
    seen = {g.identity}
    frontier = [g.identity]
    while frontier:
        new = []
        for a in frontier:
            for s in gens:
                b = g.mul(a, s)
                if b not in seen:
                    seen.add(b)
                    new.append(b)
        frontier = new
    return seen


def _gauge_generators(tag, structure, nerve):
    """Single-slot coboundaries that generate all gauge moves."""
    out = []
    if tag == "bundle1":
        L = structure.L
        base = {t: L.identity for t in nerve.tuples(1)}
        for t in nerve.tuples(1):
            for g0 in _generating_set(L):
                data = dict(base)
                data[t] = g0
                out.append(Coboundary1(structure, nerve, data))
    elif tag in ("gerbe2", "tcm-gerbe2"):
        cls = Coboundary2 if tag == "gerbe2" else TcmCoboundary2
        M, L = structure.M, structure.L
        m_base = {t: M.identity for t in nerve.tuples(1)}
        l_base = {t: L.identity for t in nerve.tuples(2)}
        for t in nerve.tuples(1):
            for g0 in _generating_set(M):
                m = dict(m_base)
                m[t] = g0
                out.append(cls(structure, nerve, m, dict(l_base)))
        for t in nerve.tuples(2):
            for g0 in _generating_set(L):
                l = dict(l_base)
                l[t] = g0
                out.append(cls(structure, nerve, dict(m_base), l))
    elif tag == "obstruction":
        base = {t: structure.identity for t in nerve.tuples(3)}
        for t in nerve.tuples(3):
            for g0 in _generating_set(structure):
                data = dict(base)
                data[t] = g0
                out.append(Coboundary3(structure, nerve, data))
    else:
        raise UnsupportedOperation(
            "degree-3 gauge orbits over a structure with nontrivial M or N "
            "are not implemented, see docs"
        )
    return out


def _orbit_partition(tag, structure, nerve, cocycles):
    """Partition an enumerated cocycle list into gauge orbits.

    Returns representatives (the least member of each orbit), orbit sizes
    and a membership function.  Iterating the sorted list and flooding each
    unvisited orbit makes every representative canonical for free.
    """
    index_of = {c.key(): i for i, c in enumerate(cocycles)}
    generators = _gauge_generators(tag, structure, nerve)
    class_index: list[int | None] = [None] * len(cocycles)
    representatives = []
    sizes = []
    for start in range(len(cocycles)):
        if class_index[start] is not None:
            continue
        label = len(representatives)
        class_index[start] = label
        stack = [start]
        members = 0
        while stack:
            j = stack.pop()
            members += 1
            for w in generators:
                out = _apply_coboundary_unchecked(cocycles[j], w)
                k = index_of.get(out.key())
                if k is None:
                    raise InvariantViolation(
                        "orbit search left the enumerated cocycle set; gauge "
                        "application disagrees with enumeration"
                    )
                if class_index[k] is None:
                    class_index[k] = label
                    stack.append(k)
        representatives.append(cocycles[start])
        sizes.append(members)
    key_to_class = {c.key(): class_index[i] for i, c in enumerate(cocycles)}

    def membership(c):
        return key_to_class.get(c.key())

    return representatives, sizes, membership


def _product_supported(tag, structure) -> bool:
    if tag == "gerbe2":
        return structure.M.order == 1
    if tag == "two-gerbe3":
        return structure.M.order == 1 and structure.N.order == 1
    return True


def _build_product_table(representatives, membership):
    table = []
    for a in representatives:
        row = []
        for b in representatives:
            index = membership(product(a, b))
            if index is None:
                raise InvariantViolation(
                    "class product landed outside the class table"
                )
            row.append(index)
        table.append(row)
    report = verify_group(table)
    if not report.valid:
        report.subject = "class product table"
        report.require_valid()
    return table


def enumerate_classes(level, structure, nerve, *, workers: int = 1) -> ClassTable:
    """Classify all cocycles of the level up to gauge equivalence.

    Strategy: when the laws are linear over cyclic coordinates, class
    counts come from exact kernel/image orders; the class set is then
    either materialised and partitioned (small cocycle spaces, with the
    linear count as a cross-check) or, for 2-torsion coefficients,
    represented implicitly by canonical GF(2) coset leaders, which handles
    cocycle spaces far too large to list.  Nonlinear structures fall back
    to full enumeration plus orbit flooding under single-slot gauge
    generators.  Class 0 always contains the trivial cocycle.

    When the level's product applies to the structure, the table includes
    the induced class product, checked to be a group.
    """
    tag = _level_tag(level)
    _check_structure(tag, structure)
    nerve.ensure_valid()
    budget = search_budget()
    model = _linear_model_for(tag, structure, nerve)
    if model is None:
        if tag == "two-gerbe3":
            raise UnsupportedOperation(
                "degree-3 classes over a structure with nontrivial M or N "
                "are not implemented, see docs"
            )
        cocycles = enumerate_cocycles(tag, structure, nerve, workers=workers)
        representatives, sizes, membership = _orbit_partition(
            tag, structure, nerve, cocycles
        )
    else:
        engine = _engine_for(model)
        z_order = engine.z_order()
        b_order = engine.b_order()
        if z_order % b_order:
            raise InvariantViolation(
                "class table: gauge image order does not divide the cocycle count"
            )
        count = z_order // b_order
        spec, _ = _enumeration_spec(tag, structure, nerve)
        if z_order <= min(budget, _MATERIALIZE_LIMIT) and _estimate_fits(spec, budget):
            cocycles = enumerate_cocycles(tag, structure, nerve, workers=workers)
            if len(cocycles) != z_order:
                raise InvariantViolation(
                    f"class table: search found {len(cocycles)} cocycles but the "
                    f"linear model predicts {z_order}"
                )
            label_of: dict = {}
            representatives = []
            sizes = []
            labels = []
            for c in cocycles:
                invariant = engine.invariant(model.encode(c))
                if invariant not in label_of:
                    label_of[invariant] = len(representatives)
                    representatives.append(c)
                    sizes.append(0)
                index = label_of[invariant]
                sizes[index] += 1
                labels.append(index)
            if len(representatives) != count or any(s != b_order for s in sizes):
                raise InvariantViolation(
                    "class table: orbit partition disagrees with the linear model"
                )

            def membership(c, label_of=label_of, engine=engine, model=model):
                return label_of.get(engine.invariant(model.encode(c)))

        elif engine.kind == "gf2":
            leaders = engine.class_leaders(min(_CLASS_COUNT_LIMIT, budget))
            decoded = []
            for leader in leaders:
                c = model.decode(engine.unpack(leader))
                _require_valid(c, "class representative")
                decoded.append((c, leader))
            decoded.sort(key=lambda pair: pair[0].key())
            representatives = [c for c, _ in decoded]
            sizes = [b_order] * len(decoded)
            label_of = {leader: i for i, (_, leader) in enumerate(decoded)}

            def membership(c, label_of=label_of, engine=engine, model=model):
                return label_of.get(engine.invariant(model.encode(c)))

        else:
            raise ResourceBudgetError(
                f"cocycle space of order {z_order} cannot be materialised and "
                "implicit class leaders need 2-torsion coefficients throughout"
            )
    product_table = None
    if _product_supported(tag, structure):
        product_table = _build_product_table(representatives, membership)
    return ClassTable(
        tag, structure, nerve, representatives, sizes, product_table, membership
    )
