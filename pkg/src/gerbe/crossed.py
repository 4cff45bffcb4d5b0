"""Crossed modules and 2-crossed modules of finite groups, with verifiers.

A crossed module is a homomorphism ``d1 : L -> M`` together with an action
of ``M`` on ``L`` satisfying equivariance and the Peiffer identity.  A
2-crossed module is a complex ``L -> M -> N`` with ``N`` acting on both
``L`` and ``M`` and a Peiffer lifting ``{-,-} : M x M -> L`` measuring how
far ``d1 : L -> M`` is from being a crossed module on the nose.

Every law is checked exhaustively over the (finite) structure; the
verifiers return reports with concrete witnesses.  The one law with two
circulating printed forms (the pairing against a product in the second
slot) is implemented in both forms behind the ``axiom_v`` formula switch;
see :mod:`gerbe.formulas`.
"""

from __future__ import annotations

import numpy as np

from . import formulas
from .groups import (
    FiniteGroup,
    GroupAction,
    GroupHom,
    action_verify,
    hom_verify,
    image,
    quotient,
)
from .report import InvariantViolation, StructuralError, ValidationReport


def _conj_table(g: FiniteGroup) -> np.ndarray:
    """conj[a, b] = a b a^-1."""
    t = g.table
    return t[t, g.inverse[:, None]]


class CrossedModule:
    """``d1 : L -> M`` with ``M`` acting on ``L`` by automorphisms."""

    def __init__(self, L: FiniteGroup, M: FiniteGroup, d1: GroupHom, actM: GroupAction):
        if d1.source is not L and d1.source != L:
            raise StructuralError("crossed module: d1 source is not L")
        if d1.target is not M and d1.target != M:
            raise StructuralError("crossed module: d1 target is not M")
        if actM.actor != M or actM.space != L:
            raise StructuralError("crossed module: action must be M acting on L")
        self.L = L
        self.M = M
        self.d1 = d1
        self.actM = actM
        self._checked = False

    def act(self, m: int, l: int) -> int:
        return int(self.actM.act[m, l])

    def ensure_valid(self) -> "CrossedModule":
        if not self._checked:
            cm_verify(self).require_valid()
            self._checked = True
        return self

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CrossedModule)
            and self.L == other.L
            and self.M == other.M
            and self.d1 == other.d1
            and self.actM == other.actM
        )

    def __repr__(self) -> str:
        return f"<CrossedModule L={self.L.order} M={self.M.order}>"


def cm_verify(c: CrossedModule) -> ValidationReport:
    """Exhaustively check the crossed module laws.

    Laws: constituent validity (``d1.*``, ``action.*``), ``equivariance``
    (witness ``(m, l)`` for d1(^m l) != m d1(l) m^-1) and ``peiffer``
    (witness ``(l, l')`` for ^(d1 l)l' != l l' l^-1).
    """
    report = ValidationReport("crossed module")
    report.merge(hom_verify(c.d1), prefix="d1.")
    report.merge(action_verify(c.actM), prefix="action.")
    if not report.valid:
        return report

    tL, tM = c.L.table, c.M.table
    d1, act = c.d1.mapping, c.actM.act
    for m in c.M.elements:
        lhs = d1[act[m]]
        rhs = tM[tM[m, d1], c.M.inverse[m]]
        for l in np.flatnonzero(lhs != rhs)[:4]:
            report.fail("equivariance", (m, int(l)))
    for l in c.L.elements:
        lhs = act[d1[l]]
        rhs = tL[tL[l, :], c.L.inverse[l]]
        for lp in np.flatnonzero(lhs != rhs)[:4]:
            report.fail("peiffer", (l, int(lp)))
    return report


class CrossedModuleMorphism:
    """A pair of homs ``(lam : L -> L', kap : M -> M')`` between crossed modules."""

    def __init__(
        self,
        source: CrossedModule,
        target: CrossedModule,
        lam: GroupHom,
        kap: GroupHom,
    ):
        if lam.source != source.L or lam.target != target.L:
            raise StructuralError("morphism: lam must map source L to target L")
        if kap.source != source.M or kap.target != target.M:
            raise StructuralError("morphism: kap must map source M to target M")
        self.source = source
        self.target = target
        self.lam = lam
        self.kap = kap

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CrossedModuleMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.lam == other.lam
            and self.kap == other.kap
        )

    def __repr__(self) -> str:
        return "<CrossedModuleMorphism>"


def cm_morphism_verify(f: CrossedModuleMorphism) -> ValidationReport:
    """Check hom laws, the square ``kap . d1 == d1' . lam`` and equivariance
    ``lam(^m l) == ^(kap m) lam(l)``."""
    report = ValidationReport("crossed module morphism")
    report.merge(hom_verify(f.lam), prefix="lam.")
    report.merge(hom_verify(f.kap), prefix="kap.")
    if not report.valid:
        return report
    lam, kap = f.lam.mapping, f.kap.mapping
    d1, d1p = f.source.d1.mapping, f.target.d1.mapping
    for l in np.flatnonzero(kap[d1] != d1p[lam])[:4]:
        report.fail("square", (int(l),))
    act, actp = f.source.actM.act, f.target.actM.act
    for m in f.source.M.elements:
        lhs = lam[act[m]]
        rhs = actp[kap[m], lam]
        for l in np.flatnonzero(lhs != rhs)[:4]:
            report.fail("equivariance", (m, int(l)))
    return report


def identity_cm_morphism(c: CrossedModule) -> CrossedModuleMorphism:
    from .groups import identity_hom

    return CrossedModuleMorphism(c, c, identity_hom(c.L), identity_hom(c.M))


# -- the strict 2-group of a crossed module ---------------------------------


def two_group_compose_vertical(
    c: CrossedModule, p: tuple[int, int], q: tuple[int, int]
) -> tuple[int, int]:
    """Vertical composite ``(m, l1) . (d1(l1) m, l2) = (m, l1 l2)``.

    Raises when the composable condition fails.
    """
    (m1, l1), (m2, l2) = p, q
    if m2 != c.M.mul(c.d1(l1), m1):
        raise InvariantViolation(
            f"vertical composition: {m2} != d1({l1}) * {m1}, cells not composable"
        )
    return (m1, c.L.mul(l1, l2))


def two_group_compose_horizontal(
    c: CrossedModule, p: tuple[int, int], q: tuple[int, int]
) -> tuple[int, int]:
    """Horizontal composite ``(m1, l1) . (m2, l2) = (m1 m2, l1 * ^(m1) l2)``."""
    (m1, l1), (m2, l2) = p, q
    return (c.M.mul(m1, m2), c.L.mul(l1, c.act(m1, l2)))


# -- 2-crossed modules -------------------------------------------------------


class TwoCrossedModule:
    """``L -> M -> N`` with N-actions and a Peiffer lifting ``{-,-}``.

    ``peiffer[m1, m2]`` is the L-element ``{m1, m2}``.  The derived action of
    ``M`` on ``L`` is ``^m l = l * {d1(l)^-1, m}``; it is tabulated lazily.
    """

    def __init__(
        self,
        L: FiniteGroup,
        M: FiniteGroup,
        N: FiniteGroup,
        d1: GroupHom,
        d2: GroupHom,
        actNM: GroupAction,
        actNL: GroupAction,
        peiffer,
    ):
        if d1.source != L or d1.target != M:
            raise StructuralError("2-crossed module: d1 must map L to M")
        if d2.source != M or d2.target != N:
            raise StructuralError("2-crossed module: d2 must map M to N")
        if actNM.actor != N or actNM.space != M:
            raise StructuralError("2-crossed module: actNM must be N acting on M")
        if actNL.actor != N or actNL.space != L:
            raise StructuralError("2-crossed module: actNL must be N acting on L")
        pf = np.asarray(peiffer, dtype=np.int64)
        if pf.shape != (M.order, M.order):
            raise StructuralError(
                f"2-crossed module: peiffer table must have shape {(M.order, M.order)}"
            )
        if pf.size and (pf.min() < 0 or pf.max() >= L.order):
            raise StructuralError("2-crossed module: peiffer entry out of range")
        pf.setflags(write=False)
        self.L, self.M, self.N = L, M, N
        self.d1, self.d2 = d1, d2
        self.actNM, self.actNL = actNM, actNL
        self.peiffer = pf
        self._derived: np.ndarray | None = None
        self._checked = False

    def pf(self, m1: int, m2: int) -> int:
        return int(self.peiffer[m1, m2])

    def act_nm(self, n: int, m: int) -> int:
        return int(self.actNM.act[n, m])

    def act_nl(self, n: int, l: int) -> int:
        return int(self.actNL.act[n, l])

    @property
    def derived_table(self) -> np.ndarray:
        """``derived_table[m, l] = ^m l = l * {d1(l)^-1, m}``."""
        if self._derived is None:
            tL = self.L.table
            d1inv = self.M.inverse[self.d1.mapping]
            table = np.empty((self.M.order, self.L.order), dtype=np.int64)
            ls = np.arange(self.L.order)
            for m in self.M.elements:
                table[m] = tL[ls, self.peiffer[d1inv, m]]
            table.setflags(write=False)
            self._derived = table
        return self._derived

    def derived(self, m: int, l: int) -> int:
        return int(self.derived_table[m, l])

    def ensure_valid(self) -> "TwoCrossedModule":
        if not self._checked:
            tcm_verify(self).require_valid()
            self._checked = True
        return self

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TwoCrossedModule)
            and self.L == other.L
            and self.M == other.M
            and self.N == other.N
            and self.d1 == other.d1
            and self.d2 == other.d2
            and self.actNM == other.actNM
            and self.actNL == other.actNL
            and np.array_equal(self.peiffer, other.peiffer)
        )

    def __repr__(self) -> str:
        return (
            f"<TwoCrossedModule L={self.L.order} M={self.M.order} N={self.N.order}>"
        )


def peiffer_commutator(t: TwoCrossedModule, m1: int, m2: int) -> int:
    """``<m1, m2> = d1({m1, m2}) * ^(d2 m1) m2``, the twisted conjugate."""
    return t.M.mul(t.d1(t.pf(m1, m2)), t.act_nm(t.d2(m1), m2))


def tcm_verify(t: TwoCrossedModule, axiom_v_form: str | None = None) -> ValidationReport:
    """Exhaustively check the 2-crossed module laws.

    Laws and witnesses:

    - ``complex``: d2(d1(l)) != e, witness ``(l,)``
    - ``d1-equivariance``: d1(^n l) != ^n d1(l), witness ``(n, l)``
    - ``d2-equivariance``: d2(^n m) != n d2(m) n^-1, witness ``(n, m)``
    - ``twisted-conjugation``: m1 m2 m1^-1 != d1{m1,m2} * ^(d2 m1)m2,
      witness ``(m1, m2)``
    - ``commutator-pairing``: {d1 l1, d1 l2} != [l1, l2], witness ``(l1, l2)``
    - ``pairing-product-first``: axiom for {m1 m2, m3}, witness ``(m1, m2, m3)``
    - ``pairing-product-second``: axiom for {m1, m2 m3} in the selected form,
      witness ``(m1, m2, m3)``
    - ``pairing-boundary``: {d1 l, m}{m, d1 l} != l ^(d2 m)l^-1,
      witness ``(m, l)``
    - ``pairing-equivariance``: ^n{m1, m2} != {^n m1, ^n m2},
      witness ``(n, m1, m2)``

    The note ``axiom_v_form`` records which form the check ran under.
    """
    form = axiom_v_form or formulas.active("axiom_v")
    report = ValidationReport("2-crossed module")
    report.notes["axiom_v_form"] = form
    report.merge(hom_verify(t.d1), prefix="d1.")
    report.merge(hom_verify(t.d2), prefix="d2.")
    report.merge(action_verify(t.actNM), prefix="actNM.")
    report.merge(action_verify(t.actNL), prefix="actNL.")
    if not report.valid:
        return report

    L, M, N = t.L, t.M, t.N
    tL, tM, tN = L.table, M.table, N.table
    d1, d2 = t.d1.mapping, t.d2.mapping
    aNM, aNL = t.actNM.act, t.actNL.act
    P = t.peiffer
    conjM = _conj_table(M)

    # complex condition d2 . d1 = e
    for l in np.flatnonzero(d2[d1] != N.identity)[:4]:
        report.fail("complex", (int(l),))

    # axiom (i): both boundaries are N-equivariant
    for n in N.elements:
        bad = np.flatnonzero(d1[aNL[n]] != aNM[n][d1])
        for l in bad[:4]:
            report.fail("d1-equivariance", (n, int(l)))
        bad = np.flatnonzero(d2[aNM[n]] != tN[tN[n, d2], N.inverse[n]])
        for m in bad[:4]:
            report.fail("d2-equivariance", (n, int(m)))

    # axiom (ii): conjugation in M is the twisted conjugation
    rhs = tM[d1[P], aNM[d2]]
    for m1, m2 in np.argwhere(conjM != rhs)[:8]:
        report.fail("twisted-conjugation", (int(m1), int(m2)))

    # axiom (iii): the pairing restricted along d1 is the commutator
    conjL = _conj_table(L)
    commL = tL[conjL, L.inverse[None, :]]
    for l1, l2 in np.argwhere(P[np.ix_(d1, d1)] != commL)[:8]:
        report.fail("commutator-pairing", (int(l1), int(l2)))

    # axiom (iv): {m1 m2, m3} = {m1, m2 m3 m2^-1} * ^(d2 m1){m2, m3}
    for m1 in M.elements:
        lhs = P[tM[m1], :]
        rhs = tL[P[m1, conjM], aNL[d2[m1]][P]]
        for m2, m3 in np.argwhere(lhs != rhs)[:4]:
            report.fail("pairing-product-first", (m1, int(m2), int(m3)))

    # axiom (v): {m1, m2 m3}, first factor depends on the selected form
    DL = t.derived_table
    for m1 in M.elements:
        lhs = P[m1, tM]
        second = DL[conjM[m1]][np.arange(M.order)[:, None], P[m1][None, :]]
        if form == "standard":
            first = P[m1][:, None]
        elif form == "printed":
            first = P[m1][None, :]
        else:
            raise StructuralError(f"unknown axiom_v form {form!r}")
        rhs = tL[np.broadcast_to(first, (M.order, M.order)), second]
        for m2, m3 in np.argwhere(lhs != rhs)[:4]:
            report.fail("pairing-product-second", (m1, int(m2), int(m3)))

    # axiom (vi): {d1 l, m} {m, d1 l} = l * ^(d2 m) l^-1
    ls = np.arange(L.order)
    for m in M.elements:
        lhs = tL[P[d1, m], P[m][d1]]
        rhs = tL[ls, aNL[d2[m]][L.inverse]]
        for l in np.flatnonzero(lhs != rhs)[:4]:
            report.fail("pairing-boundary", (m, int(l)))

    # equivariance of the pairing itself
    for n in N.elements:
        lhs = aNL[n][P]
        rhs = P[np.ix_(aNM[n], aNM[n])]
        for m1, m2 in np.argwhere(lhs != rhs)[:4]:
            report.fail("pairing-equivariance", (n, int(m1), int(m2)))

    return report


def tcm_derived_action(t: TwoCrossedModule) -> GroupAction:
    """The derived action of ``M`` on ``L``, ``^m l = l * {d1(l)^-1, m}``.

    Asserts that it really is an action by automorphisms and that
    ``(L -> M, derived)`` is a crossed module, so the return value can be
    used to build one without re-checking.
    """
    action = GroupAction(t.M, t.L, t.derived_table)
    report = action_verify(action)
    if report.valid:
        report = cm_verify(CrossedModule(t.L, t.M, t.d1, action))
    report.require_valid()
    return action


def derived_crossed_module(t: TwoCrossedModule) -> CrossedModule:
    """``(L -> M)`` as a crossed module under the derived action."""
    c = CrossedModule(t.L, t.M, t.d1, tcm_derived_action(t))
    c._checked = True
    return c


def tcm_induced_quotient_cm(t: TwoCrossedModule) -> CrossedModule:
    """The crossed module ``(M / im d1 -> N)`` induced on the cokernel of d1.

    The boundary and the N-action descend because ``im d1`` is normal (a
    consequence of the twisted-conjugation law) and stable under the
    N-action.  The result is verified before being returned.
    """
    t.ensure_valid()
    im = image(t.d1)
    G, pi = quotient(t.M, im)
    # one representative per coset: invert pi on the least preimages
    reps = np.empty(G.order, dtype=np.int64)
    seen = set()
    for m in t.M.elements:
        g = pi(m)
        if g not in seen:
            seen.add(g)
            reps[g] = m
    d2p = GroupHom(G, t.N, t.d2.mapping[reps])
    actNG = GroupAction(t.N, G, pi.mapping[t.actNM.act[:, reps]])
    result = CrossedModule(G, t.N, d2p, actNG)
    cm_verify(result).require_valid()
    result._checked = True
    return result


# -- the Gray 2-group of a 2-crossed module ---------------------------------


def gray_compose(
    t: TwoCrossedModule,
    kind: str,
    p: tuple[int, int, int],
    q: tuple[int, int, int],
) -> tuple[int, int, int]:
    """Compose triples ``(n, m, l)`` in the Gray 2-group of ``t``.

    ``kind`` selects the composition:

    - ``vertical1``: ``(n, m, l1) . (n, d1(l1) m, l2) = (n, m, l1 l2)``
    - ``vertical2``: ``(n, m1, l1) . (d2(m1) n, m2, l2) = (n, m1 m2, l1 ^(m1)l2)``
    - ``horizontal``: ``(n1, m1, l1) . (n2, m2, l2)
      = (n1 n2, m1 ^(n1)m2, l1 ^(m1)(^(n1)l2))``

    where ``^m`` is the derived action.  Raises when the cells are not
    composable for the chosen kind.
    """
    (n1, m1, l1), (n2, m2, l2) = p, q
    if kind == "vertical1":
        if n2 != n1:
            raise InvariantViolation("vertical1: first components must agree")
        if m2 != t.M.mul(t.d1(l1), m1):
            raise InvariantViolation("vertical1: cells not composable")
        return (n1, m1, t.L.mul(l1, l2))
    if kind == "vertical2":
        if n2 != t.N.mul(t.d2(m1), n1):
            raise InvariantViolation("vertical2: cells not composable")
        return (n1, t.M.mul(m1, m2), t.L.mul(l1, t.derived(m1, l2)))
    if kind == "horizontal":
        return (
            t.N.mul(n1, n2),
            t.M.mul(m1, t.act_nm(n1, m2)),
            t.L.mul(l1, t.derived(m1, t.act_nl(n1, l2))),
        )
    raise StructuralError(f"unknown Gray composition kind {kind!r}")


class TwoCrossedModuleMorphism:
    """Levelwise homs ``(lam, mu, nu)`` between 2-crossed modules."""

    def __init__(
        self,
        source: TwoCrossedModule,
        target: TwoCrossedModule,
        lam: GroupHom,
        mu: GroupHom,
        nu: GroupHom,
    ):
        if lam.source != source.L or lam.target != target.L:
            raise StructuralError("morphism: lam must map source L to target L")
        if mu.source != source.M or mu.target != target.M:
            raise StructuralError("morphism: mu must map source M to target M")
        if nu.source != source.N or nu.target != target.N:
            raise StructuralError("morphism: nu must map source N to target N")
        self.source = source
        self.target = target
        self.lam = lam
        self.mu = mu
        self.nu = nu

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TwoCrossedModuleMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.lam == other.lam
            and self.mu == other.mu
            and self.nu == other.nu
        )

    def __repr__(self) -> str:
        return "<TwoCrossedModuleMorphism>"


def tcm_morphism_verify(f: TwoCrossedModuleMorphism) -> ValidationReport:
    """Check the two squares, both equivariances and pairing preservation."""
    report = ValidationReport("2-crossed module morphism")
    report.merge(hom_verify(f.lam), prefix="lam.")
    report.merge(hom_verify(f.mu), prefix="mu.")
    report.merge(hom_verify(f.nu), prefix="nu.")
    if not report.valid:
        return report
    s, g = f.source, f.target
    lam, mu, nu = f.lam.mapping, f.mu.mapping, f.nu.mapping
    for l in np.flatnonzero(mu[s.d1.mapping] != g.d1.mapping[lam])[:4]:
        report.fail("square-d1", (int(l),))
    for m in np.flatnonzero(nu[s.d2.mapping] != g.d2.mapping[mu])[:4]:
        report.fail("square-d2", (int(m),))
    for m1, m2 in np.argwhere(lam[s.peiffer] != g.peiffer[np.ix_(mu, mu)])[:4]:
        report.fail("pairing", (int(m1), int(m2)))
    for n in s.N.elements:
        bad = np.flatnonzero(mu[s.actNM.act[n]] != g.actNM.act[nu[n], mu])
        for m in bad[:4]:
            report.fail("equivariance-M", (n, int(m)))
        bad = np.flatnonzero(lam[s.actNL.act[n]] != g.actNL.act[nu[n], lam])
        for l in bad[:4]:
            report.fail("equivariance-L", (n, int(l)))
    return report


def identity_tcm_morphism(t: TwoCrossedModule) -> TwoCrossedModuleMorphism:
    from .groups import identity_hom

    return TwoCrossedModuleMorphism(
        t, t, identity_hom(t.L), identity_hom(t.M), identity_hom(t.N)
    )
