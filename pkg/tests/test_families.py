import itertools
from fractions import Fraction

import numpy as np
import pytest

from reflcat import roots
from reflcat.errors import DomainError, StructuralError
from reflcat.families import (FamilySpec, build, classify_rank2_bruteforce, equivariantly_isometric_to_twist,
                              h_discriminant, h_realizable, parse_family_spec, reflections_of_group, twisted_form,
                              verify_family)
from reflcat.ff import is_square
from reflcat.linalg import FpMatrix, all_vectors
from reflcat.matgroup import closure_elements
from reflcat.quadspace import discriminant, is_reflection, standard_space


@pytest.mark.parametrize("family,n,count,weyl", [
    ("A", 3, 12, 24), ("A", 5, 30, 720), ("B", 3, 18, 48), ("B", 4, 32, 384), ("D", 4, 24, 192),
    ("D", 5, 40, 1920), ("E6", None, 72, 51840), ("E7", None, 126, 2903040), ("E8", None, 240, 696729600),
    ("F4", None, 48, 1152),
])
def test_root_systems(family, n, count, weyl):
    assert len(roots.root_system(family, n)) == count
    assert roots.weyl_order(family, n) == weyl
    g = roots.gram(family, n)
    assert all(g[i][i] > 0 for i in range(len(g)))


def test_cartan_matrix_e8_is_unimodular():
    from sympy import Matrix
    assert Matrix(roots.cartan("E8")).det() == 1
    assert Matrix(roots.cartan("E6")).det() == 3


SPECS = ["A:n=1,p=3", "A:n=2,p=5", "A:n=3,p=7", "A:n=4,p=3", "B:n=3,p=3", "B:n=3,p=5", "D:n=4,p=3",
         "F4:p=5", "E6:p=5", "H3:p=11,zeta=4", "H3:p=11,zeta=7", "H3:p=19,zeta=9", "Abar:n=3,p=5",
         "Abar:n=4,p=3", "I2:p=7,d=8,sign=-", "I2:p=7,d=3,sign=+", "I2:p=5,d=6,sign=-",
         "O:dim=3,p=3", "O:dim=3,p=5", "O:dim=4,p=3,disc=-", "O1:dim=3,p=5", "O2:dim=3,p=5",
         "O1:dim=2,p=7,disc=-", "O2:dim=4,p=3"]


@pytest.mark.parametrize("text", SPECS)
def test_verify_family(text):
    C = build(text)
    rep = verify_family(C)
    assert rep.passed, rep.to_json()


@pytest.mark.parametrize("text,order", [
    ("Abar:n=3,p=5", 120), ("H3:p=11,zeta=4", 120), ("I2:p=7,d=8,sign=-", 16), ("O:dim=3,p=3", 48),
    ("A:n=3,p=5", 24), ("B:n=3,p=7", 48), ("O2:dim=3,p=5", 120), ("I2:p=5,d=4,sign=+", 8),
])
def test_order_against_closure(text, order):
    C = build(text)
    assert C.order() == len(closure_elements(C.generators)) == order


def test_parse_spec_roundtrip_and_labels():
    for text in SPECS:
        spec = parse_family_spec(text)
        assert parse_family_spec(str(spec)) == spec
    assert parse_family_spec("H3:p=11,zeta=4").label() == "H_{3,11}^4"
    assert parse_family_spec("O2:dim=2,p=5,disc=+").label() == "O_2^+(2,5)"
    assert parse_family_spec("O2:dim=2,p=5,disc=-").label() == "O_2^-(2,5)"
    assert parse_family_spec("O1:dim=4,p=3,witt=-").get("disc") in "+-"
    for bad in ("X:p=5", "A:n=3", "A:n=3,p=5,foo=1", "nonsense", "O:dim=3,p=5,witt=+", "A:p=x"):
        with pytest.raises(StructuralError):
            parse_family_spec(bad)


def test_domain_errors():
    with pytest.raises(DomainError, match="Abar"):
        build("A:n=4,p=5")
    with pytest.raises(DomainError, match="O2"):
        build("E6:p=3")
    with pytest.raises(DomainError):
        build("Abar:n=3,p=7")
    with pytest.raises(DomainError):
        build("H3:p=7")
    with pytest.raises(DomainError):
        build("I2:p=7,d=5,sign=+")
    with pytest.raises(DomainError):
        build("H3:p=11,zeta=3")


@pytest.mark.parametrize("p", [7, 11, 13, 17, 19, 23, 29, 31, 41, 59, 61])
def test_h_realizability(p):
    expected = (p * p - 1) % 5 == 0
    assert h_realizable(p) == expected
    # sqrt(5) exists exactly when p = +-1 mod 5
    assert is_square(5, p) == expected


def test_h3_traces():
    # computed products of the generating reflections: Tr(r1 r2) = Tr(r2 r3) = 0, Tr(r1 r3) = 2 - alpha
    for p, z in ((11, 4), (11, 7), (19, 9), (29, 11)):
        C = build(f"H3:p={p},zeta={z}")
        r = C.generators
        a = C.notes["alpha"]
        tr = lambda m: int(np.trace(m.a)) % p
        assert tr(r[0] @ r[1]) == 0
        assert tr(r[1] @ r[2]) == 0
        assert tr(r[0] @ r[2]) == (2 - a) % p


def test_h_discriminant_depends_only_on_zeta_class():
    # (3 - zeta)(3 + zeta) = 4, so both square roots of 5 give the same class
    for p in (11, 19, 29, 31, 41):
        C1, C2 = build(f"H3:p={p}"), build(f"H3:p={p},zeta={p - build(f'H3:p={p}').notes['zeta']}")
        assert h_discriminant(C1) == h_discriminant(C2) == C1.notes["disc_formula"]


def _isometry_search(src, dst):
    """Some P with P^T G_dst P = G_src, by backtracking over vectors of dst."""
    p, n = src.p, src.dim
    vecs = all_vectors(p, n)[1:]
    Gs, Gd = src.gram.a, dst.gram.a

    def extend(chosen):
        k = len(chosen)
        if k == n:
            return chosen
        for v in vecs:
            if dst.Q(v) != Gs[k, k] % p:
                continue
            if all(dst.B(c, v) == Gs[i, k] % p for i, c in enumerate(chosen)):
                out = extend(chosen + [v])
                if out is not None:
                    return out
        return None

    cols = extend([])
    return FpMatrix(np.array(cols).T, p)


def test_abar_3_5_is_conjugate_to_o2_3_5():
    A = build("Abar:n=3,p=5")
    O2 = build("O2:dim=3,p=5")
    P = _isometry_search(A.space, O2.space)
    assert P.T @ O2.space.gram @ P == A.space.gram
    for g in A.generators:
        assert O2.group.contains(P @ g @ P.inverse())
    assert A.order() == O2.order() == 120


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("sign", ["+", "-"])
def test_rank2_bruteforce(p, sign):
    target = p - 1 if sign == "+" else p + 1
    rows = classify_rank2_bruteforce(p, sign)
    irr = [(o, d) for o, i, d in rows if i]
    assert all(target % d == 0 and o == 2 * d for o, d in irr)
    # every d >= 3 dividing the bound occurs
    assert sorted({d for _, d in irr}) == [d for d in range(3, target + 1) if target % d == 0]


def test_twisted_form_and_equivariance():
    C = build("A:n=3,p=5")
    T = twisted_form(C)
    assert T.order() == C.order()
    assert discriminant(T.space) != discriminant(C.space)
    assert verify_family(T).passed
    assert equivariantly_isometric_to_twist(C) is False


def test_reflection_counts_h3_vs_o1():
    H = build("H3:p=5")
    O1 = build("O1:dim=3,p=5")
    assert H.order() == O1.order() == 120
    assert len(reflections_of_group(H.space, H.group)) == len(reflections_of_group(O1.space, O1.group)) == 15
    assert H.group.contains_minus_identity() == O1.group.contains_minus_identity()


def test_orthogonal_reflection_classes():
    # odd dimension: exactly one class contains -id
    O1, O2 = build("O1:dim=3,p=7"), build("O2:dim=3,p=7")
    assert O1.group.contains_minus_identity() and not O2.group.contains_minus_identity()
    full = build("O:dim=3,p=7")
    assert O1.order() == O2.order() == full.order() // 2
    for g in O2.generators:
        assert is_reflection(O2.space, g)
