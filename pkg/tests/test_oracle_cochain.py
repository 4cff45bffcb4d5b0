import itertools

from oracle_cochain import class_count, cohomology_dim, close_complex, gf2_rank

CIRCLE = [(0, 1), (1, 2), (0, 2)]
HEXAGON_CIRCLE = [(i, (i + 1) % 6) for i in range(6)]
SPHERE2 = list(itertools.combinations(range(4), 3))
SPHERE3 = list(itertools.combinations(range(5), 4))
SOLID = [tuple(range(4))]
# minimal 6-vertex closed surface with Euler characteristic 1 (projective plane)
RP2 = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
]


def test_gf2_rank_basics():
    assert gf2_rank([]) == 0
    assert gf2_rank([0b101, 0b011, 0b110]) == 2  # third row is the sum
    assert gf2_rank([0b1, 0b10, 0b100]) == 3


def test_close_complex():
    s = close_complex([(2, 0, 1)])
    assert (0, 1, 2) in s and (0, 2) in s and (1,) in s
    assert len(s) == 7


def test_circle():
    assert cohomology_dim(CIRCLE, 0) == 1
    assert cohomology_dim(CIRCLE, 1) == 1
    assert cohomology_dim(HEXAGON_CIRCLE, 1) == 1


def test_sphere2():
    assert [cohomology_dim(SPHERE2, k) for k in range(3)] == [1, 0, 1]


def test_sphere3():
    assert [cohomology_dim(SPHERE3, k) for k in range(4)] == [1, 0, 0, 1]


def test_contractible():
    assert [cohomology_dim(SOLID, k) for k in range(4)] == [1, 0, 0, 0]


def test_disjoint_circles():
    two = CIRCLE + [(a + 3, b + 3) for a, b in CIRCLE]
    assert cohomology_dim(two, 0) == 2
    assert cohomology_dim(two, 1) == 2


def test_projective_plane_mod2():
    # each edge lies in exactly two triangles
    edge_use = {}
    for f in RP2:
        for e in itertools.combinations(sorted(f), 2):
            edge_use[e] = edge_use.get(e, 0) + 1
    assert set(edge_use.values()) == {2} and len(edge_use) == 15
    assert [cohomology_dim(RP2, k) for k in range(3)] == [1, 1, 1]


def test_class_counts():
    assert class_count(CIRCLE, 1) == 2
    assert class_count(SPHERE2, 2) == 2
    assert class_count(SPHERE3, 3) == 2
    assert class_count(SOLID, 2) == 1
