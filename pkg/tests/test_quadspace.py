import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflcat.errors import DomainError, ResourceError, StructuralError
from reflcat.ff import is_square, nonsquare
from reflcat.linalg import FpMatrix, all_vectors
from reflcat.quadspace import (QuadraticSpace, SquareClass, anisotropic_plane, change_of_basis, discriminant,
                               hyperbolic_plane, is_isometric, is_isometry, is_reflection, projective_points,
                               reflection, reflection_axis, standard_space, twist, witt_decompose, witt_sign)

primes = st.sampled_from([3, 5, 7, 11])


@st.composite
def spaces(draw, max_dim=4):
    p = draw(primes)
    n = draw(st.integers(1, max_dim))
    a = np.array(draw(st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n))).reshape(n, n)
    g = (a + a.T) % p
    if FpMatrix(g, p).det():
        return QuadraticSpace(g, p)
    # fall back to a random diagonal form
    return QuadraticSpace(np.diag(draw(st.lists(st.integers(1, p - 1), min_size=n, max_size=n))), p)


def isotropic_count(space):
    vecs = all_vectors(space.p, space.dim)[1:]
    return int((space.Q_many(vecs) == 0).sum())


def expected_isotropic(n, p, sign):
    if n % 2:
        return p ** (n - 1) - 1
    m = n // 2
    eps = 1 if sign == "+" else -1
    return (p ** m - eps) * (p ** (m - 1) + eps)


@given(spaces())
def test_witt_sign_matches_isotropic_count(space):
    wd = witt_decompose(space)
    assert 2 * wd.witt_index + wd.anisotropic.shape[0] == space.dim
    assert wd.anisotropic.shape[0] <= 2
    if space.dim % 2 == 0:
        assert wd.sign == witt_sign(space)
    assert isotropic_count(space) == expected_isotropic(space.dim, space.p, wd.sign)


@given(spaces())
def test_hyperbolic_pairs(space):
    for v, w in witt_decompose(space).hyperbolic_pairs:
        assert space.Q(v) == 0 and space.Q(w) == 0 and space.B(v, w) == 1


@given(spaces(), st.data())
def test_reflection_axioms(space, data):
    p, n = space.p, space.dim
    a = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)))
    if space.Q(a) == 0:
        with pytest.raises(DomainError):
            reflection(space, a)
        return
    r = reflection(space, a)
    assert (r @ r).is_identity()
    assert is_isometry(space, r)
    assert r.det() == p - 1
    assert np.array_equal(r @ a, (-a) % p)
    for v in all_vectors(p, n)[:50]:
        if space.B(v, a) == 0:
            assert np.array_equal(r @ v, v % p)
    assert is_reflection(space, r)
    ax = reflection_axis(space, r)
    assert reflection(space, ax) == r


def test_discriminant_and_isometry_classes():
    p = 7
    assert discriminant(standard_space(3, p)) == SquareClass.SQUARE
    assert discriminant(standard_space(3, p, "minus")) == SquareClass.NONSQUARE
    assert not is_isometric(standard_space(2, p), standard_space(2, p, "minus"))
    assert witt_sign(hyperbolic_plane(p)) == "+"
    assert witt_sign(anisotropic_plane(p)) == "-"
    assert isotropic_count(anisotropic_plane(p)) == 0


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_standard_plane_witt_sign(p):
    # x^2 + y^2 is hyperbolic iff -1 is a square
    expected = "+" if is_square(-1, p) else "-"
    assert witt_sign(standard_space(2, p)) == expected


def test_twist_flips_discriminant_in_odd_dimension():
    s = standard_space(3, 5)
    t = twist(s, nonsquare(5))
    assert discriminant(t) != discriminant(s)
    s2 = standard_space(2, 5)
    assert discriminant(twist(s2, nonsquare(5))) == discriminant(s2)


def test_change_of_basis_preserves_invariants():
    s = standard_space(3, 5)
    P = FpMatrix([[1, 2, 0], [0, 1, 3], [1, 0, 1]], 5)
    t = change_of_basis(s, P)
    assert is_isometric(s, t)


def test_validation_errors():
    with pytest.raises(StructuralError):
        QuadraticSpace([[1, 2], [3, 1]], 5)
    with pytest.raises(DomainError):
        QuadraticSpace([[1, 1], [1, 1]], 5)
    with pytest.raises(ResourceError):
        projective_points(20, 13)
    with pytest.raises(DomainError):
        witt_sign(standard_space(3, 5))


def test_projective_points_count():
    for p, n in [(3, 1), (3, 3), (5, 2)]:
        pts = projective_points(n, p)
        assert len(pts) == (p ** n - 1) // (p - 1)


def test_json_roundtrip():
    s = standard_space(3, 7, "minus")
    assert QuadraticSpace.from_json(s.to_json()) == s
