"""Finite nerves of covers: face-closed simplicial complexes on integer indices.

A nerve records which finite families of patches intersect.  Simplices are
nonempty index sets of size at most 5 (enough for the arity-5 identities at
the top cocycle level).  Cocycle data is indexed by *ordered tuples with
repeats allowed* whose support set is a simplex; :meth:`Nerve.tuples`
enumerates these in lexicographic order, which fixes the canonical data
layout used everywhere else.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from .report import StructuralError, ValidationReport

MAX_SIMPLEX_SIZE = 5


class Nerve:
    """A set of simplices over indices ``0 .. index_count-1``.

    The constructor normalises and range-checks the simplices but does not
    require face closure; :func:`nerve_verify` reports closure and coverage
    violations with witnesses.  Use :meth:`from_maximal` to build a nerve
    from maximal simplices with the closure computed for you.
    """

    def __init__(self, index_count: int, simplices: Iterable[Iterable[int]]):
        if index_count < 1:
            raise StructuralError("nerve: index_count must be positive")
        self.index_count = int(index_count)
        normalised: set[frozenset[int]] = set()
        for s in simplices:
            fs = frozenset(int(x) for x in s)
            if not fs:
                raise StructuralError("nerve: empty simplex")
            if len(fs) > MAX_SIMPLEX_SIZE:
                raise StructuralError(
                    f"nerve: simplex {sorted(fs)} exceeds size {MAX_SIMPLEX_SIZE}"
                )
            if min(fs) < 0 or max(fs) >= self.index_count:
                raise StructuralError(f"nerve: simplex {sorted(fs)} out of range")
            normalised.add(fs)
        self.simplices = frozenset(normalised)
        self._tuple_cache: dict[int, tuple[tuple[int, ...], ...]] = {}
        self._checked = False

    @classmethod
    def from_maximal(cls, index_count: int, maximal: Iterable[Iterable[int]]) -> "Nerve":
        closed: set[frozenset[int]] = set()
        for s in maximal:
            fs = frozenset(int(x) for x in s)
            for r in range(1, len(fs) + 1):
                for face in itertools.combinations(sorted(fs), r):
                    closed.add(frozenset(face))
        return cls(index_count, closed)

    def maximal_simplices(self) -> list[tuple[int, ...]]:
        """Simplices not contained in any other; sorted for stable output."""
        out = []
        for s in self.simplices:
            if not any(s < t for t in self.simplices):
                out.append(tuple(sorted(s)))
        return sorted(out)

    def ensure_valid(self) -> "Nerve":
        if not self._checked:
            nerve_verify(self).require_valid()
            self._checked = True
        return self

    def tuples(self, arity: int) -> tuple[tuple[int, ...], ...]:
        """All ordered index tuples (repeats allowed) supported on a simplex,
        in lexicographic order."""
        if arity < 1:
            raise StructuralError("tuples: arity must be positive")
        cached = self._tuple_cache.get(arity)
        if cached is None:
            self.ensure_valid()
            cached = tuple(
                t
                for t in itertools.product(range(self.index_count), repeat=arity)
                if frozenset(t) in self.simplices
            )
            self._tuple_cache[arity] = cached
        return cached

    def has_support(self, t: Sequence[int]) -> bool:
        return frozenset(t) in self.simplices

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Nerve)
            and self.index_count == other.index_count
            and self.simplices == other.simplices
        )

    def __repr__(self) -> str:
        return f"<Nerve indices={self.index_count} simplices={len(self.simplices)}>"


def nerve_verify(nerve: Nerve) -> ValidationReport:
    """Report violations of face closure and vertex coverage.

    Witnesses: ``face-closure`` carries ``(simplex, missing_face)`` as sorted
    tuples; ``vertex-coverage`` carries the uncovered index.
    """
    report = ValidationReport("nerve")
    for s in sorted(nerve.simplices, key=lambda s: (len(s), sorted(s))):
        if len(s) == 1:
            continue
        for face in itertools.combinations(sorted(s), len(s) - 1):
            if frozenset(face) not in nerve.simplices:
                report.fail("face-closure", (tuple(sorted(s)), face))
    covered = set().union(*nerve.simplices) if nerve.simplices else set()
    for i in range(nerve.index_count):
        if i not in covered:
            report.fail("vertex-coverage", (i,))
    return report


class NerveMap:
    """A simplicial map given by its effect on indices."""

    def __init__(self, source: Nerve, target: Nerve, vertex_map: Sequence[int]):
        self.source = source
        self.target = target
        vm = tuple(int(x) for x in vertex_map)
        if len(vm) != source.index_count:
            raise StructuralError(
                f"nerve map: expected {source.index_count} entries, got {len(vm)}"
            )
        if vm and (min(vm) < 0 or max(vm) >= target.index_count):
            raise StructuralError("nerve map: index out of range")
        self.vertex_map = vm

    def __call__(self, i: int) -> int:
        return self.vertex_map[i]

    def apply(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.vertex_map[i] for i in t)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, NerveMap)
            and self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
        )

    def __repr__(self) -> str:
        return f"<NerveMap {self.source.index_count}->{self.target.index_count}>"


def nerve_map_verify(f: NerveMap) -> ValidationReport:
    """Check that the image of every source simplex is a target simplex."""
    report = ValidationReport("nerve map")
    for s in sorted(f.source.simplices, key=lambda s: (len(s), sorted(s))):
        img = frozenset(f.vertex_map[i] for i in s)
        if img not in f.target.simplices:
            report.fail("simplicial", (tuple(sorted(s)),), f"image {sorted(img)} not a simplex")
    return report


# -- stock nerves ------------------------------------------------------------


def simplex_boundary(k: int) -> Nerve:
    """Boundary of the (k+1)-simplex: k+2 indices, all subsets of size <= k+1.

    Its geometric realisation is the k-sphere, which makes it the standard
    test nerve for degree-k classification.
    """
    if not 0 <= k <= 3:
        raise StructuralError("simplex_boundary: k must be between 0 and 3")
    n = k + 2
    simplices = []
    for r in range(1, k + 2):
        simplices.extend(itertools.combinations(range(n), r))
    return Nerve(n, simplices)


def full_simplex(k: int) -> Nerve:
    """The solid k-simplex: k+1 indices, every nonempty subset."""
    if not 0 <= k <= MAX_SIMPLEX_SIZE - 1:
        raise StructuralError(f"full_simplex: k must be between 0 and {MAX_SIMPLEX_SIZE - 1}")
    n = k + 1
    simplices = []
    for r in range(1, n + 1):
        simplices.extend(itertools.combinations(range(n), r))
    return Nerve(n, simplices)


def triangle() -> Nerve:
    """Three indices with pairwise overlaps but no triple overlap (a circle)."""
    return simplex_boundary(1)


def hexagon() -> Nerve:
    """Six indices in a cycle; a finer cover of the circle than the triangle."""
    edges = [(i, (i + 1) % 6) for i in range(6)]
    return Nerve.from_maximal(6, edges)


def hexagon_to_triangle() -> NerveMap:
    """The refinement map from the hexagon cover onto the triangle cover."""
    return NerveMap(hexagon(), triangle(), (0, 0, 1, 1, 2, 2))
