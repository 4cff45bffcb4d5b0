"""Lifting local trivialization data along exact sequences of groups.

A crossed module ``d1 : L -> M`` with trivial kernel presents ``M`` as an
extension of ``G = M / im(d1)`` by ``L``.  Quotient-valued data (functions,
bundle cocycles) can then be lifted to cocycles over the crossed module by
choosing preimages; the liftability defects sit in ``L`` and, one degree
up, in the abelian kernel.  This module implements those constructions for
finite structures:

- :class:`LiftContext` packages a crossed module with its cokernel and a
  deterministic section, and drives the degree-0 and degree-1 lifts.
- :class:`ExtensionContext` does the same for a 2-crossed module
  ``L -> M -> N`` with ``ker d1 = 1`` and ``ker d2 = im d1``, exposing the
  five-term exact sequence ``1 -> L -> M -> N -> Q -> 1`` and the lifts of
  ``(G -> N)``-bundle data and ``Q``-bundle data.
- :class:`TwistContext` handles the abelian-kernel case ``A = ker delta``:
  lifting a ``Q``-bundle produces gerbe data together with an A-valued
  defect on quadruple overlaps, the obstruction 4-cocycle.  The lift
  exists exactly when that class is trivial, and the trivializations
  produce the twisted gerbe cocycles.

Sections of the projections are chosen once per context (least preimage
index) and can be overridden; class-level outputs are section independent.
"""

from __future__ import annotations

import numpy as np

from .classify import equivalent
from .cocycles import (
    AbelianObstruction,
    Bundle1Cocycle,
    Gerbe2Cocycle,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
    _check_component,
    verify,
)
from .crossed import (
    CrossedModule,
    CrossedModuleMorphism,
    TwoCrossedModule,
    TwoCrossedModuleMorphism,
    tcm_induced_quotient_cm,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    image,
    kernel,
    identity_hom,
    quotient,
    trivial_action,
)
from .nerves import Nerve
from .report import InvariantViolation, StructuralError
from .standard import group_cm, trivial_hom

__all__ = [
    "LiftContext",
    "ExtensionContext",
    "TwistContext",
    "lift_function_to_bundle",
    "lift_bundle_to_gerbe",
    "lift_to_tcm_gerbe",
    "lift_bundle_to_two_gerbe",
    "compute_obstruction",
    "obstruction_is_trivial",
    "twisted_gerbe",
    "twist_by_abelian_gerbe",
]


def _right_inverse(proj: GroupHom, override, what: str) -> np.ndarray:
    """A section of ``proj``: least preimage per element, or a checked override."""
    n = proj.target.order
    if override is None:
        section = np.full(n, -1, dtype=np.int64)
        for x in proj.source.elements:
            y = proj(x)
            if section[y] < 0:
                section[y] = x
    else:
        section = np.asarray(list(override), dtype=np.int64)
        if section.shape != (n,):
            raise StructuralError(f"{what}: expected {n} entries")
    for y in range(n):
        if not 0 <= section[y] < proj.source.order or proj(int(section[y])) != y:
            raise StructuralError(f"{what}: entry {y} is not a preimage")
    section.setflags(write=False)
    return section


def _preimage_table(h: GroupHom, override, what: str) -> dict[int, int]:
    """Least (or overridden) preimage for every element of ``image(h)``."""
    table: dict[int, int] = {}
    for x in h.source.elements:
        table.setdefault(h(x), x)
    if override is not None:
        table = dict(table)
        for y, x in dict(override).items():
            if y not in table:
                raise StructuralError(f"{what}: {y} is outside the image")
            if not 0 <= int(x) < h.source.order or h(int(x)) != y:
                raise StructuralError(f"{what}: entry {y} is not a preimage")
            table[y] = int(x)
    return table


def _d1_lift(defect: int, tup, proj: GroupHom, preimages: dict[int, int], what: str) -> int:
    """The unique boundary preimage of a lifting defect.

    A defect with nontrivial image in the quotient means the input data
    never satisfied its own cocycle law; a defect in the kernel of the
    projection but outside the boundary image means the context's exact
    sequence is broken.
    """
    if proj(defect) != proj.target.identity:
        raise InvariantViolation(
            f"{what}: input not liftable at {tup} (defect projects to "
            f"{proj.target.label(proj(defect))})"
        )
    found = preimages.get(defect)
    if found is None:
        raise InvariantViolation(
            f"{what}: context invariant broken at {tup} (defect has no "
            "boundary preimage despite projecting trivially)"
        )
    return found


def _require_on(c, nerve: Nerve, what: str) -> None:
    if c.nerve != nerve:
        raise StructuralError(f"{what}: input lives on a different nerve")


def _require_valid(c, subject: str) -> None:
    report = verify(c)
    if not report.valid:
        report.subject = subject
        report.require_valid()


class LiftContext:
    """A crossed module with injective boundary, its cokernel and a section.

    ``d1 : L -> M`` with ``ker d1 = 1`` presents the extension
    ``1 -> L -> M -> G -> 1`` with ``G = M / im(d1)``.  The context fixes
    the projection ``pi1``, a deterministic right inverse ``section_pi1``
    (least preimage per coset unless overridden), and the morphism
    ``to_quotient`` that pushes crossed-module cocycles down to ``(1 -> G)``
    data.
    """

    def __init__(self, cm: CrossedModule, *, section_pi1=None):
        cm.ensure_valid()
        if kernel(cm.d1).order != 1:
            raise StructuralError("lift context: the boundary must have trivial kernel")
        self.cm = cm
        self.G, self.pi1 = quotient(cm.M, image(cm.d1))
        self.section_pi1 = _right_inverse(self.pi1, section_pi1, "section of pi1")
        self._d1_preimage = {cm.d1(l): l for l in cm.L.elements}
        self.quotient_cm = group_cm(self.G)
        self.to_quotient = CrossedModuleMorphism(
            cm,
            self.quotient_cm,
            trivial_hom(cm.L, self.quotient_cm.L),
            self.pi1,
        )

    def __repr__(self):
        return f"<LiftContext L={self.cm.L.order} M={self.cm.M.order} G={self.G.order}>"


def _quotient_tcm(G: FiniteGroup, N: FiniteGroup, d2p: GroupHom, actNG) -> TwoCrossedModule:
    """The 2-crossed module ``1 -> G -> N`` induced on the cokernel of d1."""
    one = group_cm(G).L
    t = TwoCrossedModule(
        one,
        G,
        N,
        trivial_hom(one, G),
        d2p,
        actNG,
        trivial_action(N, one),
        np.zeros((G.order, G.order), dtype=np.int64),
    )
    return t.ensure_valid()


class ExtensionContext:
    """Exactness data ``1 -> L -> M -> N -> Q -> 1`` of a 2-crossed module.

    Requires ``ker d1 = 1`` and ``ker d2 = im d1``.  Materialises
    ``G = M / im(d1)`` and ``Q = N / im(d2)`` with projections ``pi1``,
    ``pi2`` and deterministic sections (``section_pi1``, ``section_pi2``,
    and ``section_d2`` for the boundary preimages of ``im(d2)`` elements).
    ``quotient_cm`` is the induced crossed module ``(G -> N)`` that types
    the intermediate bundle data, and ``quotient_tcm`` / ``q_level_tcm``
    with the morphisms ``descend`` / ``descend_q`` push cocycles down the
    sequence.
    """

    def __init__(self, tcm: TwoCrossedModule, *, section_pi1=None, section_pi2=None,
                 section_d2=None):
        tcm.ensure_valid()
        if kernel(tcm.d1).order != 1:
            raise StructuralError("extension context: ker d1 must be trivial")
        if set(kernel(tcm.d2).elements) != set(image(tcm.d1).elements):
            raise StructuralError("extension context: ker d2 must equal im d1")
        self.tcm = tcm
        self.quotient_cm = tcm_induced_quotient_cm(tcm)
        self.G = self.quotient_cm.L
        _, self.pi1 = quotient(tcm.M, image(tcm.d1))
        self.section_pi1 = _right_inverse(self.pi1, section_pi1, "section of pi1")
        self.d2_induced = self.quotient_cm.d1
        self.Q, self.pi2 = quotient(tcm.N, image(self.d2_induced))
        self.section_pi2 = _right_inverse(self.pi2, section_pi2, "section of pi2")
        self.section_d2 = _preimage_table(tcm.d2, section_d2, "section of d2")
        self._d1_preimage = {tcm.d1(l): l for l in tcm.L.elements}
        self.quotient_tcm = _quotient_tcm(
            self.G, tcm.N, self.d2_induced, self.quotient_cm.actM
        )
        one = self.quotient_tcm.L
        self.q_level_tcm = TwoCrossedModule(
            one,
            one,
            self.Q,
            trivial_hom(one, one),
            trivial_hom(one, self.Q),
            trivial_action(self.Q, one),
            trivial_action(self.Q, one),
            np.zeros((1, 1), dtype=np.int64),
        ).ensure_valid()
        self.descend = TwoCrossedModuleMorphism(
            tcm,
            self.quotient_tcm,
            trivial_hom(tcm.L, self.quotient_tcm.L),
            self.pi1,
            identity_hom(tcm.N),
        )
        self.descend_q = TwoCrossedModuleMorphism(
            self.quotient_tcm,
            self.q_level_tcm,
            identity_hom(self.quotient_tcm.L),
            trivial_hom(self.G, one),
            self.pi2,
        )

    def as_quotient_bundle(self, c: TcmGerbe2Cocycle) -> Bundle1Cocycle:
        """Push a 2-cocycle down to the ``(G -> N)``-bundle it lifts."""
        if not isinstance(c, TcmGerbe2Cocycle) or c.structure != self.tcm:
            raise StructuralError("as_quotient_bundle: expected a cocycle over the context structure")
        out = Bundle1Cocycle(
            self.quotient_cm,
            c.nerve,
            {t: v for t, v in c.n.items()},
            {t: self.pi1(v) for t, v in c.m.items()},
        )
        _require_valid(out, "descended bundle data")
        return out

    def as_q_bundle(self, c: TwoGerbe3Cocycle) -> Gerbe2Cocycle:
        """Push a 3-cocycle down to the ``Q``-bundle data it lifts."""
        if not isinstance(c, TwoGerbe3Cocycle) or c.structure != self.tcm:
            raise StructuralError("as_q_bundle: expected a cocycle over the context structure")
        q_cm = group_cm(self.Q)
        out = Gerbe2Cocycle(
            q_cm,
            c.nerve,
            {t: self.pi2(v) for t, v in c.n.items()},
            {t: 0 for t in c.nerve.tuples(3)},
        )
        _require_valid(out, "descended bundle data")
        return out

    def __repr__(self):
        return (
            f"<ExtensionContext L={self.tcm.L.order} M={self.tcm.M.order} "
            f"N={self.tcm.N.order} G={self.G.order} Q={self.Q.order}>"
        )


class TwistContext:
    """Exactness data ``0 -> A -> L -> M -> Q -> 1`` with abelian kernel.

    ``A = ker delta`` is automatically central in ``L`` (hence abelian) by
    the Peiffer law; the one extra condition, checked here, is that the
    M-action fixes it.  Together these make the lifting defect on
    quadruple overlaps a well-defined A-valued 4-cocycle.  ``inclusion``
    embeds ``A`` in ``L``; ``pi2`` projects ``M`` onto ``Q = M / im(delta)``
    with section ``section_pi2``; ``section_delta`` picks boundary
    preimages of image elements.
    """

    def __init__(self, cm: CrossedModule, *, section_pi2=None, section_delta=None):
        cm.ensure_valid()
        ker = kernel(cm.d1)
        A, inclusion = ker.as_group()
        for a in ker.elements:
            for m in cm.M.elements:
                if cm.act(m, a) != a:
                    raise StructuralError("twist context: M must act trivially on the kernel")
        self.cm = cm
        self.A = A
        self.inclusion = inclusion
        self._a_of = {inclusion(a): a for a in A.elements}
        self.G, self.pi1 = quotient(cm.L, ker)
        self.Q, self.pi2 = quotient(cm.M, image(cm.d1))
        self.section_pi2 = _right_inverse(self.pi2, section_pi2, "section of pi2")
        self.section_delta = _preimage_table(cm.d1, section_delta, "section of delta")

    def __repr__(self):
        return (
            f"<TwistContext A={self.A.order} L={self.cm.L.order} "
            f"M={self.cm.M.order} Q={self.Q.order}>"
        )


# -- lifts along a crossed module -------------------------------------------------


def lift_function_to_bundle(ctx: LiftContext, g, nerve: Nerve) -> Bundle1Cocycle:
    """Lift a locally constant quotient-valued function to a bundle cocycle.

    ``g`` maps vertices to ``G`` and must agree across every edge (that is
    what locally constant means on the nerve); the defect of the chosen
    pointwise lifts is then killed by the unique boundary preimage.
    """
    if not isinstance(ctx, LiftContext):
        raise StructuralError("lift_function_to_bundle: first argument must be a LiftContext")
    nerve.ensure_valid()
    g = _check_component(g, nerve, 1, ctx.G.order, "quotient-valued function g")
    M = ctx.cm.M
    m = {t: int(ctx.section_pi1[g[t]]) for t in nerve.tuples(1)}
    l = {}
    for t in nerve.tuples(2):
        i, j = t
        defect = M.mul(m[(i,)], M.inv(m[(j,)]))
        l[t] = _d1_lift(defect, t, ctx.pi1, ctx._d1_preimage, "lift_function_to_bundle")
    out = Bundle1Cocycle(ctx.cm, nerve, m, l)
    _require_valid(out, "lifted bundle cocycle")
    return out


def lift_bundle_to_gerbe(ctx: LiftContext, g: Gerbe2Cocycle, nerve: Nerve) -> Gerbe2Cocycle:
    """Lift quotient-group bundle data to a gerbe cocycle over the crossed module.

    ``g`` is a valid cocycle over ``(1 -> G)``; its transition values lift
    through the section and the associativity defect has a unique boundary
    preimage because the boundary is injective.
    """
    if not isinstance(ctx, LiftContext):
        raise StructuralError("lift_bundle_to_gerbe: first argument must be a LiftContext")
    if not isinstance(g, Gerbe2Cocycle) or g.structure != ctx.quotient_cm:
        raise StructuralError(
            "lift_bundle_to_gerbe: input must be a cocycle over the quotient (1 -> G)"
        )
    _require_on(g, nerve, "lift_bundle_to_gerbe")
    _require_valid(g, "quotient bundle data")
    M = ctx.cm.M
    m = {t: int(ctx.section_pi1[v]) for t, v in g.m.items()}
    l = {}
    for t in nerve.tuples(3):
        i, j, k = t
        defect = M.prod([m[i, j], m[j, k], M.inv(m[i, k])])
        l[t] = _d1_lift(defect, t, ctx.pi1, ctx._d1_preimage, "lift_bundle_to_gerbe")
    out = Gerbe2Cocycle(ctx.cm, nerve, m, l)
    _require_valid(out, "lifted gerbe cocycle")
    return out


# -- lifts along a 2-crossed module ------------------------------------------------


def lift_to_tcm_gerbe(ctx: ExtensionContext, p: Bundle1Cocycle, nerve: Nerve) -> TcmGerbe2Cocycle:
    """Lift ``(G -> N)``-bundle data to a 2-cocycle over the 2-crossed module.

    The N-valued trivialization of ``p`` transfers unchanged (the induced
    boundary satisfies ``d2_induced . pi1 = d2``), while the G-part lifts
    as bundle data does, with defects killed in ``L``.
    """
    if not isinstance(ctx, ExtensionContext):
        raise StructuralError("lift_to_tcm_gerbe: first argument must be an ExtensionContext")
    if not isinstance(p, Bundle1Cocycle) or p.structure != ctx.quotient_cm:
        raise StructuralError(
            "lift_to_tcm_gerbe: input must be a cocycle over the quotient (G -> N)"
        )
    _require_on(p, nerve, "lift_to_tcm_gerbe")
    _require_valid(p, "quotient bundle data")
    M = ctx.tcm.M
    n = {t: v for t, v in p.m.items()}
    m = {t: int(ctx.section_pi1[v]) for t, v in p.l.items()}
    l = {}
    for t in nerve.tuples(3):
        i, j, k = t
        defect = M.prod([m[i, j], m[j, k], M.inv(m[i, k])])
        l[t] = _d1_lift(defect, t, ctx.pi1, ctx._d1_preimage, "lift_to_tcm_gerbe")
    out = TcmGerbe2Cocycle(ctx.tcm, nerve, n, m, l)
    _require_valid(out, "lifted 2-cocycle")
    return out


def lift_bundle_to_two_gerbe(ctx: ExtensionContext, q: Gerbe2Cocycle, nerve: Nerve) -> TwoGerbe3Cocycle:
    """Lift ``Q``-bundle data all the way to a degree-3 cocycle.

    Edge values lift through the section of ``pi2``; the triple-overlap
    defect lies in the image of ``d2`` and lifts through ``section_d2``;
    the quadruple-overlap defect has a unique boundary preimage in ``L``.
    The five-fold coherence then holds and is re-verified.
    """
    if not isinstance(ctx, ExtensionContext):
        raise StructuralError("lift_bundle_to_two_gerbe: first argument must be an ExtensionContext")
    if not isinstance(q, Gerbe2Cocycle) or q.structure != group_cm(ctx.Q):
        raise StructuralError(
            "lift_bundle_to_two_gerbe: input must be a cocycle over the quotient (1 -> Q)"
        )
    _require_on(q, nerve, "lift_bundle_to_two_gerbe")
    _require_valid(q, "quotient bundle data")
    t2 = ctx.tcm
    N, M = t2.N, t2.M
    n = {t: int(ctx.section_pi2[v]) for t, v in q.m.items()}
    m = {}
    for t in nerve.tuples(3):
        i, j, k = t
        defect = N.prod([n[i, j], n[j, k], N.inv(n[i, k])])
        if ctx.pi2(defect) != ctx.Q.identity:
            raise InvariantViolation(
                f"lift_bundle_to_two_gerbe: input not liftable at {t} (defect "
                f"projects to {ctx.Q.label(ctx.pi2(defect))})"
            )
        found = ctx.section_d2.get(defect)
        if found is None:
            raise InvariantViolation(
                f"lift_bundle_to_two_gerbe: context invariant broken at {t} "
                "(defect has no d2 preimage despite projecting trivially)"
            )
        m[t] = found
    l = {}
    aNM = t2.actNM.act
    for t in nerve.tuples(4):
        i, j, k, w = t
        twist = int(aNM[n[i, j], m[j, k, w]])
        defect = M.prod([m[i, j, k], m[i, k, w], M.inv(m[i, j, w]), M.inv(twist)])
        l[t] = _d1_lift(defect, t, ctx.pi1, ctx._d1_preimage, "lift_bundle_to_two_gerbe")
    out = TwoGerbe3Cocycle(t2, nerve, n, m, l)
    _require_valid(out, "lifted 3-cocycle")
    return out


# -- the abelian obstruction --------------------------------------------------------


def compute_obstruction(ctx: TwistContext, q: Gerbe2Cocycle, nerve: Nerve):
    """Lift ``Q``-bundle data through the abelian-kernel sequence.

    Returns ``((m, l), obstruction)``: the chosen lift data (edge values in
    ``M``, triple-overlap values in ``L``) and the A-valued defect on
    quadruple overlaps.  The defect always satisfies the degree-3 cocycle
    law; the lift closes into a gerbe cocycle exactly when its class is
    trivial.
    """
    if not isinstance(ctx, TwistContext):
        raise StructuralError("compute_obstruction: first argument must be a TwistContext")
    if not isinstance(q, Gerbe2Cocycle) or q.structure != group_cm(ctx.Q):
        raise StructuralError(
            "compute_obstruction: input must be a cocycle over the quotient (1 -> Q)"
        )
    _require_on(q, nerve, "compute_obstruction")
    _require_valid(q, "quotient bundle data")
    L, M = ctx.cm.L, ctx.cm.M
    m = {t: int(ctx.section_pi2[v]) for t, v in q.m.items()}
    l = {}
    for t in nerve.tuples(3):
        i, j, k = t
        defect = M.prod([m[i, j], m[j, k], M.inv(m[i, k])])
        if ctx.pi2(defect) != ctx.Q.identity:
            raise InvariantViolation(
                f"compute_obstruction: input not liftable at {t} (defect "
                f"projects to {ctx.Q.label(ctx.pi2(defect))})"
            )
        found = ctx.section_delta.get(defect)
        if found is None:
            raise InvariantViolation(
                f"compute_obstruction: context invariant broken at {t} "
                "(defect has no boundary preimage despite projecting trivially)"
            )
        l[t] = found
    a = {}
    for t in nerve.tuples(4):
        i, j, k, w = t
        defect = L.prod([
            l[i, j, k],
            l[i, k, w],
            L.inv(L.mul(ctx.cm.act(m[i, j], l[j, k, w]), l[i, j, w])),
        ])
        index = ctx._a_of.get(defect)
        if index is None:
            raise InvariantViolation(
                f"compute_obstruction: context invariant broken at {t} "
                "(quadruple defect is not killed by the boundary)"
            )
        a[t] = index
    obstruction = AbelianObstruction(ctx.A, nerve, a)
    _require_valid(obstruction, "obstruction 4-cocycle")
    return (m, l), obstruction


def obstruction_is_trivial(o: AbelianObstruction):
    """A trivializing assignment for the obstruction class, or None.

    Returns an arity-3 map ``a~`` with
    ``a_ijkl = a~_ijk * a~_ikl * a~_jkl^-1 * a~_ijl^-1`` when the class of
    ``o`` is trivial.  The decision is exact: the trivialization condition
    is linear over the abelian group and the full gauge space is accounted
    for, so None certifies a nontrivial class.
    """
    if not isinstance(o, AbelianObstruction):
        raise StructuralError("obstruction_is_trivial: expected an AbelianObstruction")
    witness = equivalent(AbelianObstruction.trivial(o.abelian_group, o.nerve), o)
    if witness is None:
        return None
    A = o.abelian_group
    return {t: A.inv(v) for t, v in witness.coboundary.b.items()}


def twisted_gerbe(ctx: TwistContext, lift_data, a_tilde, nerve: Nerve) -> Gerbe2Cocycle:
    """The gerbe cocycle carried by a trivialized lift.

    ``lift_data`` is the ``(m, l)`` pair from :func:`compute_obstruction`
    and ``a_tilde`` a trivialization of its obstruction; dividing the
    triple-overlap values by the embedded trivialization closes the
    cocycle law, which is re-verified.
    """
    if not isinstance(ctx, TwistContext):
        raise StructuralError("twisted_gerbe: first argument must be a TwistContext")
    nerve.ensure_valid()
    m, l = lift_data
    a_tilde = _check_component(a_tilde, nerve, 3, ctx.A.order, "trivialization data")
    L = ctx.cm.L
    twisted = {
        t: L.mul(l[t], L.inv(ctx.inclusion(a_tilde[t]))) for t in nerve.tuples(3)
    }
    out = Gerbe2Cocycle(ctx.cm, nerve, dict(m), twisted)
    _require_valid(out, "twisted gerbe cocycle")
    return out


def twist_by_abelian_gerbe(ctx: TwistContext, c: Gerbe2Cocycle, z: Gerbe2Cocycle) -> Gerbe2Cocycle:
    """Multiply the triple-overlap values of ``c`` by an embedded A-cocycle.

    ``z`` is a cocycle over ``(A -> 1)``; because ``A`` is central and
    fixed by the M-action this is the action of abelian gerbe data on
    lifts, and it preserves validity.
    """
    if not isinstance(ctx, TwistContext):
        raise StructuralError("twist_by_abelian_gerbe: first argument must be a TwistContext")
    if not isinstance(c, Gerbe2Cocycle) or c.structure != ctx.cm:
        raise StructuralError("twist_by_abelian_gerbe: cocycle must live over the context module")
    if not isinstance(z, Gerbe2Cocycle) or z.structure.L != ctx.A or z.structure.M.order != 1:
        raise StructuralError("twist_by_abelian_gerbe: twist must be a cocycle over (A -> 1)")
    if c.nerve != z.nerve:
        raise StructuralError("twist_by_abelian_gerbe: nerves differ")
    _require_valid(c, "twist input")
    _require_valid(z, "abelian twist data")
    L = ctx.cm.L
    twisted = {t: L.mul(v, ctx.inclusion(z.l[t])) for t, v in c.l.items()}
    out = Gerbe2Cocycle(ctx.cm, c.nerve, dict(c.m), twisted)
    _require_valid(out, "twisted gerbe cocycle")
    return out
