"""Command-line front end over document files.

Subcommands verify structures, combine and compare cocycles, enumerate
classes, run the lifting constructions and compute obstruction classes.
Reports are deterministic plain-text lines so scripts can assert on
them.  Exit codes: 0 for success or a positive answer, 1 for a
well-formed negative answer (axioms fail, cocycles inequivalent, lift
does not exist, obstruction nontrivial), 2 for structural and usage
errors.

Structure and nerve arguments accept either a document path or one of a
few built-in names (``z2-to-1``; ``triangle``, ``hexagon``,
``tetrahedron-boundary``, ``4-simplex-boundary``) so common runs need no
scratch files.
"""

from __future__ import annotations

import argparse
import os
import sys

from .classify import (
    enumerate_classes,
    enumerate_cocycles,
    equivalence_search_size,
    equivalent,
)
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
    change_structure,
    inverse,
    product,
    pullback,
    verify,
)
from .crossed import (
    CrossedModule,
    CrossedModuleMorphism,
    TwoCrossedModule,
    TwoCrossedModuleMorphism,
    cm_morphism_verify,
    cm_verify,
    tcm_morphism_verify,
    tcm_verify,
)
from .documents import from_document, load, parse, save
from .groups import FiniteGroup, cyclic, verify_group
from .lifting import (
    ExtensionContext,
    LiftContext,
    TwistContext,
    compute_obstruction,
    lift_bundle_to_gerbe,
    lift_bundle_to_two_gerbe,
    lift_function_to_bundle,
    lift_to_tcm_gerbe,
    obstruction_is_trivial,
)
from .nerves import (
    Nerve,
    NerveMap,
    hexagon,
    nerve_map_verify,
    nerve_verify,
    simplex_boundary,
    triangle,
)
from .report import (
    InvariantViolation,
    ResourceBudgetError,
    StructuralError,
    UnsupportedOperation,
)
from .standard import module_cm

__all__ = ["run_cli", "main"]

BUILTIN_NERVES = {
    "triangle": triangle,
    "hexagon": hexagon,
    "tetrahedron-boundary": lambda: simplex_boundary(2),
    "4-simplex-boundary": lambda: simplex_boundary(3),
}

BUILTIN_STRUCTURES = {
    "z2-to-1": lambda: module_cm(cyclic(2)),
}

_COCYCLE_TYPES = (
    Bundle1Cocycle,
    Gerbe2Cocycle,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
    AbelianObstruction,
)

_COBOUNDARY_TYPES = (Coboundary1, Coboundary2, TcmCoboundary2, Coboundary3)

_CONTEXT_PRECONDITIONS = ("lift context:", "extension context:", "twist context:")


def _parse_path(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as err:
        raise StructuralError(f"cannot read document {path!r}: {err}") from None
    return parse(data), (os.path.dirname(path) or ".")


def _load_cocycle(path, what):
    obj = load(path)
    if not isinstance(obj, _COCYCLE_TYPES):
        raise StructuralError(
            f"{what}: expected a cocycle or obstruction document, "
            f"got {type(obj).__name__}"
        )
    return obj


def _load_named(name, builtins, kinds, what):
    if os.path.exists(name):
        obj = load(name)
        if not isinstance(obj, kinds):
            raise StructuralError(f"{what}: {name!r} holds a {type(obj).__name__}")
        return obj
    builder = builtins.get(name)
    if builder is None:
        raise StructuralError(
            f"{what}: {name!r} is neither a file nor a built-in name "
            f"(built-ins: {', '.join(sorted(builtins))})"
        )
    return builder()


def _check_workers(workers: int) -> int:
    if workers < 1:
        raise StructuralError("workers must be at least 1")
    return workers


def _describe(obj) -> str:
    if isinstance(obj, _COBOUNDARY_TYPES):
        return f"{obj.level} coboundary"
    if isinstance(obj, LiftContext):
        return "lift context"
    if isinstance(obj, ExtensionContext):
        return "extension context"
    if isinstance(obj, TwistContext):
        return "twist context"
    return type(obj).__name__


def _verify_report(obj):
    """The semantic report for a decoded object, or None when decoding
    already proved everything there is to check."""
    if isinstance(obj, FiniteGroup):
        return verify_group(obj.table)
    if isinstance(obj, Nerve):
        return nerve_verify(obj)
    if isinstance(obj, NerveMap):
        return nerve_map_verify(obj)
    if isinstance(obj, CrossedModule):
        return cm_verify(obj)
    if isinstance(obj, TwoCrossedModule):
        return tcm_verify(obj)
    if isinstance(obj, CrossedModuleMorphism):
        return cm_morphism_verify(obj)
    if isinstance(obj, TwoCrossedModuleMorphism):
        return tcm_morphism_verify(obj)
    if isinstance(obj, _COCYCLE_TYPES):
        return verify(obj)
    return None


def _cmd_verify(args) -> int:
    doc, base = _parse_path(args.file)
    try:
        obj = from_document(doc, base_dir=base)
    except StructuralError as err:
        if doc.kind == "context" and str(err).startswith(_CONTEXT_PRECONDITIONS):
            print(f"{doc.payload.get('variant', 'context')} context: invalid")
            print(f"FAIL precondition: {err}")
            return 1
        raise
    report = _verify_report(obj)
    if report is None:
        print(f"{_describe(obj)}: valid")
        return 0
    if report.valid:
        print(f"{report.subject}: valid")
        return 0
    print(f"{report.subject}: invalid")
    for failure in report.failures:
        print(f"FAIL {failure.law}: witness {failure.witness}")
    return 1


def _cmd_product(args) -> int:
    a = _load_cocycle(args.a, "product")
    b = _load_cocycle(args.b, "product")
    out = product(a, b)
    save(out, args.output)
    print(f"level: {out.level}")
    print(f"output: {args.output}")
    return 0


def _cmd_inverse(args) -> int:
    a = _load_cocycle(args.a, "inverse")
    out = inverse(a)
    save(out, args.output)
    print(f"level: {out.level}")
    print(f"output: {args.output}")
    return 0


def _cmd_equiv(args) -> int:
    _check_workers(args.workers)
    a = _load_cocycle(args.a, "equiv")
    b = _load_cocycle(args.b, "equiv")
    witness = equivalent(a, b)
    if witness is None:
        print(f"inequivalent (search exhausted {equivalence_search_size(a, b)} candidates)")
        return 1
    print("equivalent")
    return 0


def _cmd_enumerate(args) -> int:
    _check_workers(args.workers)
    structure = _load_named(
        args.structure,
        BUILTIN_STRUCTURES,
        (CrossedModule, TwoCrossedModule, FiniteGroup),
        "enumerate structure",
    )
    nerve = _load_named(args.nerve, BUILTIN_NERVES, Nerve, "enumerate nerve")
    if not args.classes:
        if args.product_table:
            raise StructuralError("enumerate: --product-table requires --classes")
        if args.output:
            raise StructuralError("enumerate: -o requires --classes")
        cocycles = enumerate_cocycles(args.level, structure, nerve, workers=args.workers)
        print(f"cocycles: {len(cocycles)}")
        return 0
    table = enumerate_classes(args.level, structure, nerve, workers=args.workers)
    if args.product_table and table.product_table is None:
        raise UnsupportedOperation(
            "enumerate: no class product for this level and structure"
        )
    sizes = ",".join(str(s) for s in table.class_sizes)
    print(f"{table.class_count} classes (sizes {sizes})")
    if args.output:
        save(table, args.output)
        print(f"output: {args.output}")
    return 0


def _cmd_lift(args) -> int:
    context = load(args.context)
    c = _load_cocycle(args.input, "lift input")
    if args.level == "bundle1":
        if not isinstance(context, LiftContext):
            raise StructuralError("lift --level bundle1 needs a lift context")
        if not isinstance(c, Bundle1Cocycle) or c.structure != context.quotient_cm:
            raise StructuralError(
                "lift --level bundle1: input must be a bundle1 cocycle over "
                "the quotient (1 -> G)"
            )
        out = lift_function_to_bundle(context, c.m, c.nerve)
    elif args.level == "gerbe2":
        out = lift_bundle_to_gerbe(context, c, c.nerve)
    elif args.level == "tcm-gerbe2":
        out = lift_to_tcm_gerbe(context, c, c.nerve)
    else:
        out = lift_bundle_to_two_gerbe(context, c, c.nerve)
    save(out, args.output)
    print(f"level: {out.level}")
    print(f"output: {args.output}")
    return 0


def _cmd_obstruct(args) -> int:
    context = load(args.context)
    c = _load_cocycle(args.input, "obstruct input")
    _, obstruction = compute_obstruction(context, c, c.nerve)
    save(obstruction, args.output)
    trivialization = obstruction_is_trivial(obstruction)
    if trivialization is None:
        print("obstruction: nontrivial")
        print(f"output: {args.output}")
        return 1
    print("obstruction: trivial")
    print(f"output: {args.output}")
    return 0


def _cmd_change_structure(args) -> int:
    morphism = load(args.morphism)
    if not isinstance(morphism, (CrossedModuleMorphism, TwoCrossedModuleMorphism)):
        raise StructuralError(
            f"change-structure: {args.morphism!r} holds a {type(morphism).__name__}, "
            "expected a morphism document"
        )
    c = _load_cocycle(args.a, "change-structure")
    out = change_structure(c, morphism)
    save(out, args.output)
    print(f"level: {out.level}")
    print(f"output: {args.output}")
    return 0


def _cmd_pullback(args) -> int:
    nerve_map = load(args.map)
    if not isinstance(nerve_map, NerveMap):
        raise StructuralError(
            f"pullback: {args.map!r} holds a {type(nerve_map).__name__}, "
            "expected a nerve map document"
        )
    c = _load_cocycle(args.a, "pullback")
    out = pullback(c, nerve_map)
    save(out, args.output)
    print(f"level: {out.level}")
    print(f"output: {args.output}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gerbe",
        description="verify, combine and classify cocycle documents",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check the laws of one document")
    p.add_argument("file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("product", help="pointwise product of two cocycles")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_product)

    p = sub.add_parser("inverse", help="pointwise inverse of a cocycle")
    p.add_argument("a")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_inverse)

    p = sub.add_parser("equiv", help="decide equivalence of two cocycles")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("enumerate", help="enumerate cocycles or classes")
    p.add_argument("--level", required=True,
                   choices=["bundle1", "gerbe2", "tcm-gerbe2", "two-gerbe3", "obstruction"])
    p.add_argument("--structure", required=True,
                   help="document path or built-in name")
    p.add_argument("--nerve", required=True,
                   help="document path or built-in name")
    p.add_argument("--classes", action="store_true")
    p.add_argument("--product-table", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("lift", help="lift quotient data along a context")
    p.add_argument("--level", required=True,
                   choices=["bundle1", "gerbe2", "tcm-gerbe2", "two-gerbe3"],
                   help="level of the lifted output")
    p.add_argument("--context", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_lift)

    p = sub.add_parser("obstruct", help="obstruction class of a twist lift")
    p.add_argument("--context", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_obstruct)

    p = sub.add_parser("change-structure", help="push a cocycle along a morphism")
    p.add_argument("a")
    p.add_argument("--morphism", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_change_structure)

    p = sub.add_parser("pullback", help="pull a cocycle back along a nerve map")
    p.add_argument("a")
    p.add_argument("--map", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_pullback)

    return parser


def run_cli(argv=None) -> int:
    """Run one subcommand; returns the exit code instead of exiting."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        code = err.code if isinstance(err.code, int) else 2
        return 0 if code == 0 else 2
    try:
        return args.func(args)
    except InvariantViolation as err:
        print(str(err))
        return 1
    except (StructuralError, UnsupportedOperation, ResourceBudgetError) as err:
        print(f"error: {err}")
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
