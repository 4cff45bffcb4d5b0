"""Stock crossed modules and 2-crossed modules used across tests and demos.

These builders cover the standard families: inclusions of normal subgroups,
conjugation, abelian modules placed in a single degree, commutator pairings
and componentwise products.  Each builder returns a verified structure.
"""

from __future__ import annotations

import numpy as np

from .crossed import CrossedModule, TwoCrossedModule, cm_verify, tcm_verify
from .groups import (
    FiniteGroup,
    GroupAction,
    GroupHom,
    Subgroup,
    direct_product,
    is_normal,
    trivial_action,
    trivial_group,
)
from .report import StructuralError


def _checked_cm(c: CrossedModule) -> CrossedModule:
    cm_verify(c).require_valid()
    c._checked = True
    return c


def _checked_tcm(t: TwoCrossedModule) -> TwoCrossedModule:
    tcm_verify(t).require_valid()
    t._checked = True
    return t


def trivial_hom(source: FiniteGroup, target: FiniteGroup) -> GroupHom:
    return GroupHom(source, target, [target.identity] * source.order)


def module_cm(A: FiniteGroup) -> CrossedModule:
    """``(A -> 1)``: an abelian group placed in the fibre degree."""
    one = trivial_group()
    return _checked_cm(CrossedModule(A, one, trivial_hom(A, one), trivial_action(one, A)))


def group_cm(G: FiniteGroup) -> CrossedModule:
    """``(1 -> G)``: a bare structure group with trivial fibre degree."""
    one = trivial_group()
    return _checked_cm(CrossedModule(one, G, trivial_hom(one, G), trivial_action(G, one)))


def conjugation_cm(G: FiniteGroup) -> CrossedModule:
    """``(G -> G)`` with the identity boundary and the conjugation action."""
    from .groups import conjugation_action, identity_hom

    return _checked_cm(CrossedModule(G, G, identity_hom(G), conjugation_action(G)))


def inclusion_cm(parent: FiniteGroup, elements) -> CrossedModule:
    """``(K -> G)`` for a normal subgroup K, acting by conjugation."""
    sub = elements if isinstance(elements, Subgroup) else Subgroup(parent, elements)
    if not is_normal(parent, sub.elements):
        raise StructuralError("inclusion_cm: subgroup must be normal")
    K, embed = sub.as_group()
    pos = {x: i for i, x in enumerate(sub.elements)}
    act = np.empty((parent.order, K.order), dtype=np.int64)
    for m in parent.elements:
        for i, x in enumerate(sub.elements):
            act[m, i] = pos[parent.conj(m, x)]
    return _checked_cm(CrossedModule(K, parent, embed, GroupAction(parent, K, act)))


def central_quotient_cm(G: FiniteGroup, central_elements) -> CrossedModule:
    """``(G -> G/Z)`` for a central subgroup Z, with the action by
    conjugation through coset representatives (well defined by centrality)."""
    from .groups import quotient

    sub = (
        central_elements
        if isinstance(central_elements, Subgroup)
        else Subgroup(G, central_elements)
    )
    for z in sub.elements:
        if any(G.conj(g, z) != z for g in G.elements):
            raise StructuralError("central_quotient_cm: subgroup is not central")
    Q, proj = quotient(G, sub)
    reps = np.empty(Q.order, dtype=np.int64)
    seen = set()
    for g in G.elements:
        q = proj(g)
        if q not in seen:
            seen.add(q)
            reps[q] = g
    act = np.empty((Q.order, G.order), dtype=np.int64)
    for q in Q.elements:
        r = int(reps[q])
        for l in G.elements:
            act[q, l] = G.conj(r, l)
    return _checked_cm(CrossedModule(G, Q, proj, GroupAction(Q, G, act)))


def module_tcm(A: FiniteGroup) -> TwoCrossedModule:
    """``(A -> 1 -> 1)``: an abelian group two degrees down."""
    one = trivial_group()
    return _checked_tcm(
        TwoCrossedModule(
            A,
            one,
            one,
            trivial_hom(A, one),
            trivial_hom(one, one),
            trivial_action(one, one),
            trivial_action(one, A),
            np.zeros((1, 1), dtype=np.int64) + A.identity,
        )
    )


def commutator_tcm(G: FiniteGroup) -> TwoCrossedModule:
    """``(G -> G -> 1)`` with identity boundary and commutator pairing.

    The Peiffer lifting is forced to ``{m1, m2} = [m1, m2]`` by the pairing
    axioms once d1 is the identity; the derived action is then plain
    conjugation.  This structure discriminates the two printed forms of the
    pairing-product law whenever G has a commutator of order > 2.
    """
    from .groups import identity_hom

    one = trivial_group()
    pf = np.empty((G.order, G.order), dtype=np.int64)
    for a in G.elements:
        for b in G.elements:
            pf[a, b] = G.comm(a, b)
    return _checked_tcm(
        TwoCrossedModule(
            G,
            G,
            one,
            identity_hom(G),
            trivial_hom(G, one),
            trivial_action(one, G),
            trivial_action(one, G),
            pf,
        )
    )


def inclusion_tcm(parent: FiniteGroup, elements) -> TwoCrossedModule:
    """``(K -> G -> 1)`` for normal K containing all commutators of G.

    d1 is the inclusion, so the pairing is forced:
    ``{m1, m2} = d1^{-1}([m1, m2])``, which requires ``[G, G] <= K``.
    """
    sub = elements if isinstance(elements, Subgroup) else Subgroup(parent, elements)
    if not is_normal(parent, sub.elements):
        raise StructuralError("inclusion_tcm: subgroup must be normal")
    pos = {x: i for i, x in enumerate(sub.elements)}
    K, embed = sub.as_group()
    one = trivial_group()
    pf = np.empty((parent.order, parent.order), dtype=np.int64)
    for a in parent.elements:
        for b in parent.elements:
            c = parent.comm(a, b)
            if c not in pos:
                raise StructuralError(
                    "inclusion_tcm: commutator subgroup not contained in K"
                )
            pf[a, b] = pos[c]
    return _checked_tcm(
        TwoCrossedModule(
            K,
            parent,
            one,
            embed,
            trivial_hom(parent, one),
            trivial_action(one, parent),
            trivial_action(one, K),
            pf,
        )
    )


def forced_chain_tcm() -> TwoCrossedModule:
    """``(Z2 -> Z2 -> Z2)`` with identity d1 and zero d2.

    Surjectivity of d1 forces the trivial pairing, making this the smallest
    chain on which the trivial-lifting limit of every formula can be checked.
    """
    from .groups import cyclic, identity_hom

    z2 = cyclic(2)
    return _checked_tcm(
        TwoCrossedModule(
            z2,
            z2,
            z2,
            identity_hom(z2),
            trivial_hom(z2, z2),
            trivial_action(z2, z2),
            trivial_action(z2, z2),
            np.zeros((2, 2), dtype=np.int64),
        )
    )


def forced_pairing_tcm(
    parent: FiniteGroup,
    elements,
    d2: GroupHom,
    actNM: GroupAction,
) -> TwoCrossedModule:
    """``(K -> G -> N)`` with d1 an inclusion and the pairing forced.

    When d1 is injective the twisted-conjugation law determines the pairing:
    ``{m1, m2} = d1^-1( m1 m2 m1^-1 * (^(d2 m1) m2)^-1 )``.  The N-action on
    K is the restriction of the N-action on G (K must be stable).  All the
    remaining laws are then checked exhaustively.
    """
    sub = elements if isinstance(elements, Subgroup) else Subgroup(parent, elements)
    if d2.source != parent:
        raise StructuralError("forced_pairing_tcm: d2 must be defined on the parent")
    if actNM.actor != d2.target or actNM.space != parent:
        raise StructuralError("forced_pairing_tcm: actNM must be N acting on the parent")
    pos = {x: i for i, x in enumerate(sub.elements)}
    K, embed = sub.as_group()
    N = d2.target
    actNL = np.empty((N.order, K.order), dtype=np.int64)
    for n in N.elements:
        for i, x in enumerate(sub.elements):
            y = actNM(n, x)
            if y not in pos:
                raise StructuralError("forced_pairing_tcm: K is not N-stable")
            actNL[n, i] = pos[y]
    pf = np.empty((parent.order, parent.order), dtype=np.int64)
    for m1 in parent.elements:
        for m2 in parent.elements:
            defect = parent.mul(
                parent.conj(m1, m2), parent.inv(actNM(d2(m1), m2))
            )
            if defect not in pos:
                raise StructuralError(
                    "forced_pairing_tcm: twisted-conjugation defect escapes K"
                )
            pf[m1, m2] = pos[defect]
    return _checked_tcm(
        TwoCrossedModule(
            K,
            parent,
            N,
            embed,
            d2,
            actNM,
            GroupAction(N, K, actNL),
            pf,
        )
    )


def product_hom(f: GroupHom, g: GroupHom, source: FiniteGroup, target: FiniteGroup) -> GroupHom:
    """Componentwise hom on direct products built by :func:`direct_product`."""
    nb_s, nb_t = g.source.order, g.target.order
    mapping = [
        f(x // nb_s) * nb_t + g(x % nb_s) for x in range(source.order)
    ]
    return GroupHom(source, target, mapping)


def product_action(
    a: GroupAction, b: GroupAction, actor: FiniteGroup, space: FiniteGroup
) -> GroupAction:
    nb_act, nb_sp = b.actor.order, b.space.order
    act = np.empty((actor.order, space.order), dtype=np.int64)
    for g in range(actor.order):
        g1, g2 = g // nb_act, g % nb_act
        for x in range(space.order):
            x1, x2 = x // nb_sp, x % nb_sp
            act[g, x] = a(g1, x1) * nb_sp + b(g2, x2)
    return GroupAction(actor, space, act)


def tcm_direct_product(s: TwoCrossedModule, t: TwoCrossedModule) -> TwoCrossedModule:
    """Componentwise product of 2-crossed modules."""
    L = direct_product(s.L, t.L)
    M = direct_product(s.M, t.M)
    N = direct_product(s.N, t.N)
    d1 = product_hom(s.d1, t.d1, L, M)
    d2 = product_hom(s.d2, t.d2, M, N)
    actNM = product_action(s.actNM, t.actNM, N, M)
    actNL = product_action(s.actNL, t.actNL, N, L)
    nbM, nbL = t.M.order, t.L.order
    pf = np.empty((M.order, M.order), dtype=np.int64)
    for m1 in range(M.order):
        for m2 in range(M.order):
            pf[m1, m2] = (
                s.pf(m1 // nbM, m2 // nbM) * nbL + t.pf(m1 % nbM, m2 % nbM)
            )
    return _checked_tcm(TwoCrossedModule(L, M, N, d1, d2, actNM, actNL, pf))
