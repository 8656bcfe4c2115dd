"""Non-degenerate quadratic spaces over F_p.

The form is Q(v) = v^T G v with symmetric Gram matrix G, so the associated
bilinear form is B(u, v) = u^T G v and Q(v) = B(v, v).
"""
import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError, StructuralError
from .ff import check_odd_prime, inv, is_square, nonsquare
from .linalg import FpMatrix, all_vectors, det_array, kernel_array

ENUM_CAP = 10**6


class SquareClass(str, enum.Enum):
    SQUARE = "square"
    NONSQUARE = "nonsquare"

    @classmethod
    def of(cls, x, p):
        return cls.SQUARE if is_square(x, p) else cls.NONSQUARE

    @property
    def sign(self):
        return "+" if self is SquareClass.SQUARE else "-"

    def __mul__(self, other):
        return SquareClass.SQUARE if self is other else SquareClass.NONSQUARE


class QuadraticSpace:
    """(F_p^n, Q) with Q non-degenerate."""

    def __init__(self, gram, p=None):
        if not isinstance(gram, FpMatrix):
            if p is None:
                raise StructuralError("p is required when gram is not an FpMatrix")
            gram = FpMatrix(gram, p)
        if gram.rows != gram.cols:
            raise StructuralError(f"Gram matrix must be square, got {gram.shape}")
        if not np.array_equal(gram.a, gram.a.T):
            raise StructuralError("Gram matrix must be symmetric")
        if gram.rows and gram.det() == 0:
            raise DomainError("quadratic form is degenerate")
        self.gram = gram

    @property
    def p(self):
        return self.gram.p

    @property
    def dim(self):
        return self.gram.rows

    def Q(self, v):
        v = np.asarray(v, dtype=np.int64)
        return int(v @ self.gram.a @ v % self.p)

    def B(self, u, v):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return int(u @ self.gram.a @ v % self.p)

    def Q_many(self, vs):
        vs = np.asarray(vs, dtype=np.int64)
        return np.einsum("ij,ij->i", vs @ self.gram.a % self.p, vs) % self.p

    def det(self):
        return self.gram.det()

    def __eq__(self, other):
        return isinstance(other, QuadraticSpace) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"QuadraticSpace(p={self.p}, gram={self.gram.tolist()})"

    def to_json(self):
        return {"p": self.p, "gram": self.gram.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(obj["gram"], obj["p"])
        except (KeyError, TypeError) as e:
            raise StructuralError(f"bad quadratic space JSON: {e}") from None


def standard_space(n, p, variant="plus"):
    """x_1^2 + ... + x_n^2, or with the last coefficient a nonsquare for 'minus'."""
    check_odd_prime(p)
    if n < 1:
        raise DomainError("dimension must be positive")
    diag = [1] * n
    if variant == "minus":
        diag[-1] = nonsquare(p)
    elif variant != "plus":
        raise DomainError(f"unknown variant {variant!r}")
    return QuadraticSpace(np.diag(diag), p)


def hyperbolic_plane(p):
    return QuadraticSpace([[0, 1], [1, 0]], p)


def anisotropic_plane(p):
    """Norm form of F_{p^2} = F_p(sqrt(gamma)): Q(a + b sqrt(gamma)) = a^2 - gamma b^2."""
    return QuadraticSpace(np.diag([1, -nonsquare(p)]), p)


def discriminant(space):
    return SquareClass.of(space.det(), space.p)


def witt_sign(space):
    """'+' or '-' for even dimension: whether Q is a sum of hyperbolic planes."""
    n = space.dim
    if n % 2:
        raise DomainError("Witt sign is defined for even dimension only")
    d = (-1) ** (n // 2) * space.det()
    return "+" if is_square(d, space.p) else "-"


def is_isometric(s1, s2):
    """Over F_p (p odd) dimension and discriminant classify forms."""
    if s1.p != s2.p:
        raise StructuralError("spaces over different fields")
    return s1.dim == s2.dim and discriminant(s1) == discriminant(s2)


def twist(space, d):
    """The same space with form d*Q."""
    if d % space.p == 0:
        raise DomainError("twist scalar must be nonzero")
    return QuadraticSpace(space.gram.scale(d), space.p)


def projective_points(n, p, cap=ENUM_CAP):
    """All vectors of F_p^n whose first nonzero coordinate is 1, as an array."""
    if p ** n > cap:
        raise ResourceError(f"enumerating F_{p}^{n} exceeds the cap {cap}", estimate=p ** n)
    blocks = []
    for lead in range(n):
        rest = n - lead - 1
        tail = all_vectors(p, rest)
        block = np.zeros((tail.shape[0], n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    return np.concatenate(blocks)


@dataclass
class WittDecomposition:
    hyperbolic_pairs: list
    anisotropic: np.ndarray
    sign: str

    @property
    def witt_index(self):
        return len(self.hyperbolic_pairs)


def _find_isotropic(space, basis):
    k = basis.shape[0]
    if k == 0:
        return None
    pts = projective_points(k, space.p)
    vecs = pts @ basis % space.p
    q = space.Q_many(vecs)
    hit = np.flatnonzero(q == 0)
    return vecs[hit[0]] if hit.size else None


def witt_decompose(space, cap=ENUM_CAP):
    """Split V into hyperbolic planes plus an anisotropic kernel of dimension <= 2."""
    p = space.p
    G = space.gram.a
    basis = np.eye(space.dim, dtype=np.int64)
    pairs = []
    while basis.shape[0] >= 2:
        if p ** basis.shape[0] > cap:
            raise ResourceError(f"isotropic search in dimension {basis.shape[0]} exceeds cap", estimate=p ** basis.shape[0])
        v = _find_isotropic(space, basis)
        if v is None:
            break
        pair = basis @ G @ v % p
        j = int(np.flatnonzero(pair)[0])
        w0 = basis[j] * inv(int(pair[j]), p) % p
        w = (w0 - space.Q(w0) * inv(2, p) * v) % p
        pairs.append((v, w))
        cons = np.stack([basis @ G @ v % p, basis @ G @ w % p], axis=1).T
        coeffs = kernel_array(cons, p)
        basis = coeffs @ basis % p
    if space.dim % 2:
        sign = "odd"
    else:
        sign = "+" if basis.shape[0] == 0 else "-"
    return WittDecomposition(pairs, basis, sign)


def reflection(space, a):
    """r_a(v) = v - 2 B(v, a)/Q(a) a, as a matrix acting on column vectors."""
    a = np.asarray(a, dtype=np.int64) % space.p
    qa = space.Q(a)
    if qa == 0:
        raise DomainError("reflection axis must be anisotropic")
    p = space.p
    c = 2 * inv(qa, p) % p
    m = np.eye(space.dim, dtype=np.int64) - c * np.outer(a, a @ space.gram.a % p)
    return FpMatrix(m % p, p)


def is_isometry(space, M):
    if M.shape != (space.dim, space.dim):
        raise StructuralError("matrix does not act on this space")
    return M.T @ space.gram @ M == space.gram


def is_reflection(space, M):
    """Isometry of order 2 fixing a hyperplane pointwise."""
    n = space.dim
    I = FpMatrix.identity(n, space.p)
    return is_isometry(space, M) and (M @ M).is_identity() and (M - I).rank() == 1


def reflection_axis(space, M):
    """Axis a (up to scalar) of a reflection, normalized to leading coordinate 1."""
    d = (M - FpMatrix.identity(space.dim, space.p)).a
    col = d[:, np.flatnonzero(d.any(axis=0))[0]]
    return col * inv(int(col[np.flatnonzero(col)[0]]), space.p) % space.p


def change_of_basis(space, P):
    """The form expressed in new coordinates x = P y: Gram P^T G P."""
    return QuadraticSpace(P.T @ space.gram @ P)


def gram_det_class(gram, p):
    return SquareClass.of(det_array(np.asarray(gram), p), p)
