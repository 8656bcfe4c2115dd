"""Metric groups, graded extension skeletons and their fusion rings.

For an isometric action of G on a metric group A = (F_p^m, Q), the component of
degree g has simple objects labelled by cosets of I_g = Im(id - T_g), each of
Frobenius-Perron dimension p^(d_g/2) with d_g = dim I_g.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cohomology import FiniteGroup, GModule, beta_from_q
from .errors import DomainError, InvariantViolation
from .linalg import FpMatrix, all_vectors, rref_array, span_basis
from .meataxe import is_irreducible
from .quadspace import QuadraticSpace


@dataclass
class MetricGroup:
    """Braiding data of a pointed category, carried as exponents of a fixed p-th root of unity."""

    space: QuadraticSpace
    zeta_convention: str = "exponent"

    def __post_init__(self):
        self.beta = beta_from_q(self.space)

    @property
    def p(self):
        return self.space.p

    @property
    def rank(self):
        return self.space.dim

    def q(self, a):
        return self.space.Q(a)

    def b(self, x, y):
        return int(np.asarray(x) @ self.beta.a @ np.asarray(y) % self.p)


def _canon(v, basis, piv, p):
    """Canonical coset representatives of rows of v modulo the span of RREF rows basis."""
    if not piv:
        return v % p
    return (v - v[..., piv] @ basis) % p


class CrossedSkeleton:
    def __init__(self, metric, group, T):
        self.metric = metric
        self.group = group
        self.T = T
        p, m = metric.p, metric.rank
        self.images = []
        self.pivots = []
        eye = np.eye(m, dtype=np.int64)
        for t in T:
            red, piv = rref_array(((eye - t) % p).T, p)
            self.images.append(red)
            self.pivots.append(piv)
        self.d = np.array([len(pv) for pv in self.pivots], dtype=np.int64)

    @property
    def p(self):
        return self.metric.p

    def canon(self, g, v):
        return _canon(np.asarray(v, dtype=np.int64), self.images[g], self.pivots[g], self.p)

    def coset_reps(self, g):
        """Lexicographically ordered canonical representatives of A / I_g."""
        m, p = self.metric.rank, self.p
        free = [c for c in range(m) if c not in self.pivots[g]]
        grid = all_vectors(p, len(free))
        reps = np.zeros((grid.shape[0], m), dtype=np.int64)
        reps[:, free] = grid
        return reps

    def simple_count(self, g):
        return self.p ** (self.metric.rank - int(self.d[g]))

    def fp_dim_squared_total(self):
        return self.group.order * self.p ** self.metric.rank


def skeleton(metric, G, action=None, cap=5000):
    """Per-element image data for G acting on the metric group.

    G is a MatGroup; action, if given, lists the images of G.generators on A,
    otherwise G acts through its own matrices.
    """
    FG = FiniteGroup.from_matgroup(G, cap)
    p = metric.p
    if action is None:
        T = np.stack([g.a for g in FG.elements])
        gens = list(G.generators)
    else:
        T = GModule.from_images(FG, action, p).action
        gens = [FpMatrix(T[i], p) for i in FG.gen_indices]
    if T.shape[1] != metric.rank:
        raise DomainError("action dimension differs from the rank of the metric group")
    G_form = metric.space.gram
    for g in gens:
        if not (g.T @ G_form @ g == G_form):
            raise DomainError("action generator is not an isometry of the metric group")
    sk = CrossedSkeleton(metric, FG, T)
    for g in range(FG.order):
        for h in FG.gen_indices:
            if (sk.d[g] + sk.d[h] - sk.d[FG.mul[g, h]]) % 2:
                raise InvariantViolation("d_g + d_h and d_gh have different parity")
    return sk


class FusionRing:
    """Based ring with labels (g, coset representative)."""

    def __init__(self, labels, unit, dual, constants, dims, p):
        self.labels = labels
        self.unit = unit
        self.dual = dual
        self.constants = constants  # int64 array of rows (x, y, w, N)
        self.dims = dims  # d such that FPdim = p^(d/2)
        self.p = p

    @property
    def size(self):
        return len(self.labels)

    def _tensor(self):
        L = self.size
        c = self.constants
        return sp.csr_matrix((c[:, 3], (c[:, 0] * L + c[:, 1], c[:, 2])), shape=(L * L, L))

    def product(self, x, y):
        c = self.constants
        sel = (c[:, 0] == x) & (c[:, 1] == y)
        return {int(w): int(n) for w, n in zip(c[sel, 2], c[sel, 3])}

    def check_associativity(self):
        L = self.size
        S = self._tensor()
        M3 = S.reshape(L, L * L).tocsr()  # row m, column z*L + w
        for x in range(L):
            Ax = S[x * L:(x + 1) * L]  # row y, column m
            lhs = (Ax @ M3).tocsr()
            rhs = (S @ Ax).reshape(L, L * L).tocsr()
            diff = lhs - rhs
            diff.eliminate_zeros()
            if diff.nnz:
                return False
        return True

    def check_fp_homomorphism(self):
        L, p = self.size, self.p
        d = self.dims
        # p^(d/2) = ip + sp*sqrt(p), exact integers
        ip = np.where(d % 2 == 0, p ** (d // 2), 0)
        sq = np.where(d % 2 == 1, p ** (d // 2), 0)
        c = self.constants
        got_i = np.zeros((L, L), dtype=np.int64)
        got_s = np.zeros((L, L), dtype=np.int64)
        np.add.at(got_i, (c[:, 0], c[:, 1]), c[:, 3] * ip[c[:, 2]])
        np.add.at(got_s, (c[:, 0], c[:, 1]), c[:, 3] * sq[c[:, 2]])
        want_i = np.outer(ip, ip) + p * np.outer(sq, sq)
        want_s = np.outer(ip, sq) + np.outer(sq, ip)
        return bool(np.array_equal(got_i, want_i) and np.array_equal(got_s, want_s))

    def check_unit(self):
        c = self.constants
        left = c[c[:, 0] == self.unit]
        right = c[c[:, 1] == self.unit]
        L = np.arange(self.size)
        ok_left = len(left) == self.size and np.array_equal(left[:, 1], L) and np.array_equal(left[:, 2], L)
        ok_right = (len(right) == self.size and np.array_equal(np.sort(right[:, 0]), L)
                    and np.array_equal(right[np.argsort(right[:, 0]), 2], L))
        return bool(ok_left and ok_right and (left[:, 3] == 1).all() and (right[:, 3] == 1).all())

    def check_duality(self):
        c = self.constants
        unit_rows = c[c[:, 2] == self.unit]
        partners = {}
        for x, y, _w, n in unit_rows:
            if n != 1 or x in partners:
                return False
            partners[int(x)] = int(y)
        if len(partners) != self.size:
            return False
        return all(partners[partners[x]] == x and partners[x] == self.dual[x] for x in range(self.size))

    def check_grading(self, mul):
        comp = np.array([g for g, _ in self.labels])
        c = self.constants
        return bool(np.all(comp[c[:, 2]] == mul[comp[c[:, 0]], comp[c[:, 1]]]))

    def component_fp_squares(self):
        """Sum of FPdim^2 over each component, as integers."""
        out = {}
        for (g, _), d in zip(self.labels, self.dims):
            out[g] = out.get(g, 0) + self.p ** int(d)
        return out

    def to_json(self):
        return {
            "labels": [{"element": int(g), "coset": [int(x) for x in a]} for g, a in self.labels],
            "unit": int(self.unit),
            "dual": [int(x) for x in self.dual],
            "constants": [[int(v) for v in row] for row in self.constants],
            "fpdim_exponents": [int(d) for d in self.dims],
            "p": self.p,
        }


def fusion_ring(sk):
    p, m = sk.p, sk.metric.rank
    G = sk.group
    N = G.order
    weights = p ** np.arange(m - 1, -1, -1, dtype=np.int64)
    labels, offsets, lookup = [], [], []
    for g in range(N):
        reps = sk.coset_reps(g)
        offsets.append(len(labels))
        table = np.full(p ** m, -1, dtype=np.int64)
        table[reps @ weights] = np.arange(reps.shape[0])
        lookup.append(table)
        labels.extend((g, tuple(int(x) for x in r)) for r in reps)
    reps_of = [np.array([a for gg, a in labels if gg == g], dtype=np.int64).reshape(-1, m) for g in range(N)]
    rows = []
    for g in range(N):
        A = reps_of[g]
        for h in range(N):
            k = int(G.mul[g, h])
            Tg = sk.T[g]
            W = span_basis(np.concatenate([sk.images[g], sk.images[h] @ Tg.T % p]), p, m)
            dw = W.shape[0]
            e2 = int(sk.d[g] + sk.d[h] + sk.d[k]) - 2 * dw
            if e2 < 0 or e2 % 2:
                raise InvariantViolation(f"fusion exponent {e2}/2 is not a nonnegative integer")
            if sk.images[k].shape[0] and span_basis(np.concatenate([W, sk.images[k]]), p, m).shape[0] != dw:
                raise InvariantViolation("I_gh is not contained in I_g + T_g I_h")
            wvecs = all_vectors(p, dw) @ W % p
            wreps = np.unique(sk.canon(k, wvecs), axis=0)
            B = reps_of[h] @ Tg.T % p
            base = (A[:, None, :] + B[None, :, :]) % p
            outs = sk.canon(k, (base[:, :, None, :] + wreps[None, None, :, :]) % p)
            w_idx = lookup[k][outs @ weights] + offsets[k]
            if (w_idx < offsets[k]).any():
                raise InvariantViolation("product landed outside the canonical labels")
            na, nb, nw = w_idx.shape
            xs = np.repeat(np.arange(na) + offsets[g], nb * nw)
            ys = np.tile(np.repeat(np.arange(nb) + offsets[h], nw), na)
            rows.append(np.column_stack([xs, ys, w_idx.reshape(-1), np.full(xs.size, p ** (e2 // 2))]))
    constants = np.concatenate(rows).astype(np.int64)
    order = np.lexsort((constants[:, 2], constants[:, 1], constants[:, 0]))
    constants = constants[order]
    dual = []
    for g, a in labels:
        gi = int(G.inv[g])
        tinv = sk.T[gi]
        rep = sk.canon(gi, (-(tinv @ np.array(a, dtype=np.int64))) % p)
        dual.append(int(lookup[gi][rep @ weights] + offsets[gi]))
    dims = np.array([sk.d[g] for g, _ in labels], dtype=np.int64)
    unit = offsets[0] + int(lookup[0][0])
    return FusionRing(labels, unit, dual, constants, dims, p)


@dataclass
class ReflectionCheck:
    ok: bool
    condition: str = None
    witness: int = None
    image_order: int = None


def is_reflection_skeleton(sk, generalized=False):
    """(1) only the identity acts trivially, unless generalized; (2) elements with d_g = 1 generate G."""
    G = sk.group
    eye = np.eye(sk.metric.rank, dtype=np.int64)
    distinct = len({t.tobytes() for t in sk.T})
    if not generalized:
        for g in range(1, G.order):
            if np.array_equal(sk.T[g], eye):
                return ReflectionCheck(False, "faithful", g, distinct)
    S = [g for g in range(G.order) if sk.d[g] == 1]
    H = set(G.closure(S))
    if len(H) < G.order:
        w = next(g for g in range(G.order) if g not in H)
        return ReflectionCheck(False, "generated_by_reflections", w, distinct)
    return ReflectionCheck(True, None, None, distinct)


def is_irreducible_skeleton(sk, seed=0):
    G = sk.group
    gens = [FpMatrix(sk.T[i], sk.p) for i in G.gen_indices]
    m = sk.metric.rank
    if not gens:
        return m == 1
    return bool(is_irreducible(gens, sk.p, seed=seed))


def fusion_axioms(ring, sk):
    """Results of the ring-level checks, keyed by name."""
    squares = ring.component_fp_squares()
    target = sk.p ** sk.metric.rank
    return {
        "associativity": ring.check_associativity(),
        "unit": ring.check_unit(),
        "fp_homomorphism": ring.check_fp_homomorphism(),
        "grading": ring.check_grading(sk.group.mul),
        "component_dimensions": all(v == target for v in squares.values()) and len(squares) == sk.group.order,
        "duality": ring.check_duality(),
    }
