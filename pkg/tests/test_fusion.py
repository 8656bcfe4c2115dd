import numpy as np
import pytest

from reflcat.errors import DomainError
from reflcat.families import build
from reflcat.fusion import (MetricGroup, fusion_axioms, fusion_ring, is_irreducible_skeleton, is_reflection_skeleton,
                            skeleton)
from reflcat.linalg import FpMatrix
from reflcat.matgroup import MatGroup
from reflcat.quadspace import QuadraticSpace, standard_space


def ring_of(text):
    C = build(text)
    sk = skeleton(MetricGroup(C.space), C.group)
    return sk, fusion_ring(sk)


def dense_constants(ring):
    L = ring.size
    N = np.zeros((L, L, L), dtype=np.int64)
    c = ring.constants
    N[c[:, 0], c[:, 1], c[:, 2]] = c[:, 3]
    return N


@pytest.mark.parametrize("text", ["A:n=1,p=3", "A:n=2,p=5", "I2:p=5,d=4,sign=+",
                                  "I2:p=7,d=3,sign=+"])
def test_associativity_against_dense_einsum(text):
    _, ring = ring_of(text)
    N = dense_constants(ring)
    lhs = np.einsum("xym,mzw->xyzw", N, N)
    rhs = np.einsum("yzm,xmw->xyzw", N, N)
    assert np.array_equal(lhs, rhs)
    assert ring.check_associativity()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_tambara_yamagami(p):
    sk, ring = ring_of(f"A:n=1,p={p}")
    assert ring.size == p + 1
    X = next(i for i, (g, _) in enumerate(ring.labels) if g != 0)
    invertibles = [i for i, (g, _) in enumerate(ring.labels) if g == 0]
    assert ring.product(X, X) == {a: 1 for a in invertibles}
    for a in invertibles:
        assert ring.product(a, X) == {X: 1} == ring.product(X, a)
    for a in invertibles:
        for b in invertibles:
            (s,) = ring.product(a, b)
            assert (ring.labels[s][1][0] - ring.labels[a][1][0] - ring.labels[b][1][0]) % p == 0
    assert ring.dual[X] == X
    assert all(fusion_axioms(ring, sk).values())


def test_two_reflections_fuse_to_one_simple():
    sk, ring = ring_of("I2:p=7,d=8,sign=-")
    G = sk.group
    refl = [g for g in range(G.order) if sk.d[g] == 1]
    g, h = refl[0], refl[1]
    assert sk.d[G.mul[g, h]] == 2
    x = next(i for i, (c, _) in enumerate(ring.labels) if c == g)
    y = next(i for i, (c, _) in enumerate(ring.labels) if c == h)
    assert list(ring.product(x, y).values()) == [1]


@pytest.mark.parametrize("text", ["A:n=2,p=5", "I2:p=7,d=8,sign=-", "O:dim=2,p=7,disc=-", "A:n=3,p=3"])
def test_axioms_and_dimensions(text):
    sk, ring = ring_of(text)
    ax = fusion_axioms(ring, sk)
    assert all(ax.values()), ax
    assert sum(sk.p ** int(d) for d in ring.dims) == sk.fp_dim_squared_total()
    for g in range(sk.group.order):
        assert sk.simple_count(g) == sum(1 for c, _ in ring.labels if c == g)


def test_json_shape():
    _, ring = ring_of("A:n=1,p=3")
    obj = ring.to_json()
    assert set(obj) >= {"labels", "unit", "dual", "constants"}
    assert obj["labels"][obj["unit"]] == {"element": 0, "coset": [0]}
    assert all(row[3] > 0 for row in obj["constants"])


@pytest.mark.parametrize("text", ["A:n=2,p=5", "B:n=3,p=3", "I2:p=7,d=8,sign=-", "Abar:n=3,p=5", "O2:dim=3,p=5",
                                  "H3:p=11,zeta=4"])
def test_reflection_criterion_positive(text):
    C = build(text)
    sk = skeleton(MetricGroup(C.space), C.group)
    assert is_reflection_skeleton(sk).ok
    assert is_irreducible_skeleton(sk)


def test_reflection_criterion_negative_controls():
    s = standard_space(3, 5)
    minus = MatGroup([FpMatrix.identity(3, 5).scale(-1)], space=s)
    sk = skeleton(MetricGroup(s), minus)
    res = is_reflection_skeleton(sk)
    assert not res.ok and res.condition == "generated_by_reflections"
    assert sk.group.elements[res.witness] == FpMatrix.identity(3, 5).scale(-1)
    # rotation by -1 in the plane is a scalar with d = 2
    s2 = standard_space(2, 5)
    sk2 = skeleton(MetricGroup(s2), MatGroup([FpMatrix.identity(2, 5).scale(-1)], space=s2))
    assert not is_reflection_skeleton(sk2).ok
    # trivial group on a plane is reducible
    sk3 = skeleton(MetricGroup(s2), MatGroup([FpMatrix.identity(2, 5)], space=s2))
    assert not is_irreducible_skeleton(sk3)
    # d = 2 dihedral group has an invariant axis
    C = build("I2:p=5,d=2,sign=+")
    assert not is_irreducible_skeleton(skeleton(MetricGroup(C.space), C.group))


def test_generalized_mode_allows_kernel():
    # I2(4) acting on F_5 through the determinant
    C = build("I2:p=5,d=4,sign=+")
    line = QuadraticSpace([[1]], 5)
    images = [FpMatrix([[int(g.det())]], 5) for g in C.group.generators]
    sk = skeleton(MetricGroup(line), C.group, action=images)
    strict = is_reflection_skeleton(sk)
    assert not strict.ok and strict.condition == "faithful"
    loose = is_reflection_skeleton(sk, generalized=True)
    assert loose.ok and loose.image_order == 2
    ring = fusion_ring(sk)
    assert all(fusion_axioms(ring, sk).values())


def test_non_isometry_rejected():
    s = standard_space(2, 5)
    with pytest.raises(DomainError):
        skeleton(MetricGroup(s), MatGroup([FpMatrix([[2, 0], [0, 1]], 5)]))
