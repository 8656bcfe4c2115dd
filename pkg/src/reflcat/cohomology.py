"""Cohomology of finite groups with coefficients in F_p-modules.

Groups are handled through an explicit multiplication table (identity at index
0); cochains are normalized and stored as dense tables over G^n.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, ResourceError, StructuralError, UnsupportedError
from .ff import inv, p_part
from .linalg import FpMatrix, StreamingRank, kernel_array, rref_array

DEFAULT_BUDGET = 2 * 1024**3


class FiniteGroup:
    """A finite group given by its elements (matrices) and multiplication table."""

    def __init__(self, elements, generators=None):
        if not elements or not elements[0].is_identity():
            raise StructuralError("the first element must be the identity")
        self.elements = list(elements)
        self.p = elements[0].p
        self.index = {g.key(): i for i, g in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise StructuralError("repeated elements")
        n = len(self.elements)
        stack = np.stack([g.a for g in self.elements])
        self.mul = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            prods = np.matmul(stack[i], stack) % self.p
            for j in range(n):
                k = self.index.get(((prods[j].shape), prods[j].tobytes()))
                if k is None:
                    raise StructuralError("element list is not closed under multiplication")
                self.mul[i, j] = k
        self.inv = np.argmin(self.mul, axis=1).astype(np.int32)
        gens = generators if generators is not None else self.elements[1:]
        self.gen_indices = [self.index[g.key()] for g in gens if not g.is_identity()]

    @classmethod
    def from_matgroup(cls, G, cap=5000):
        if G.order() > cap:
            raise ResourceError(f"group of order {G.order()} is above the enumeration cap {cap}", estimate=G.order())
        return cls(G.elements(cap), G.generators)

    @property
    def order(self):
        return len(self.elements)

    def index_of(self, M):
        try:
            return self.index[M.key()]
        except KeyError:
            raise StructuralError("matrix is not an element of the group") from None

    def conj(self, g, x):
        """g x g^-1."""
        return self.mul[self.mul[g, x], self.inv[g]]

    def closure(self, idx):
        """Subgroup generated by some element indices, as a sorted index list (identity first)."""
        seen = {0}
        frontier = [0]
        gens = list(idx)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(self.mul[s, x])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def element_order(self, x):
        k, y = 1, x
        while y != 0:
            y = self.mul[y, x]
            k += 1
        return k

    def subgroup(self, idx):
        """FiniteGroup for a subgroup given by indices (must contain the identity)."""
        idx = sorted(set(int(i) for i in idx))
        if idx[0] != 0:
            raise StructuralError("subgroup must contain the identity")
        members = set(idx)
        for a in idx:
            for b in idx:
                if int(self.mul[a, b]) not in members:
                    raise StructuralError("indices are not closed under multiplication")
        sub = FiniteGroup.__new__(FiniteGroup)
        sub.elements = [self.elements[i] for i in idx]
        sub.p = self.p
        sub.index = {g.key(): i for i, g in enumerate(sub.elements)}
        pos = {g: i for i, g in enumerate(idx)}
        sub.mul = np.array([[pos[int(self.mul[a, b])] for b in idx] for a in idx], dtype=np.int32)
        sub.inv = np.argmin(sub.mul, axis=1).astype(np.int32)
        sub.gen_indices = list(range(1, len(idx)))
        sub.parent_indices = np.array(idx)
        return sub


class GModule:
    """F_p^dim with a group action given by one matrix per group element."""

    def __init__(self, group, action, p):
        action = np.asarray(action, dtype=np.int64) % p
        if action.ndim != 3 or action.shape[0] != group.order or action.shape[1] != action.shape[2]:
            raise StructuralError("action must have shape (|G|, d, d)")
        self.group = group
        self.action = action
        self.p = p

    @property
    def dim(self):
        return self.action.shape[1]

    @classmethod
    def natural(cls, group):
        return cls(group, np.stack([g.a for g in group.elements]), group.p)

    @classmethod
    def trivial(cls, group, p, dim=1):
        return cls(group, np.broadcast_to(np.eye(dim, dtype=np.int64), (group.order, dim, dim)).copy(), p)

    @classmethod
    def from_images(cls, group, images, p):
        """Extend generator images (in group.gen_indices order) to a homomorphism; checks consistency."""
        images = [np.asarray(m.a if isinstance(m, FpMatrix) else m, dtype=np.int64) % p for m in images]
        if len(images) != len(group.gen_indices):
            raise StructuralError("need one image per generator")
        d = images[0].shape[0]
        act = [None] * group.order
        act[0] = np.eye(d, dtype=np.int64)
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s, m in zip(group.gen_indices, images):
                    y = int(group.mul[s, x])
                    val = m @ act[x] % p
                    if act[y] is None:
                        act[y] = val
                        nxt.append(y)
                    elif not np.array_equal(act[y], val):
                        raise StructuralError("generator images do not define a homomorphism")
            frontier = nxt
        if any(a is None for a in act):
            raise StructuralError("generators do not generate the group")
        return cls(group, np.stack(act), p)

    def direct_sum(self, other):
        if other.group is not self.group:
            raise StructuralError("modules over different groups")
        d1, d2 = self.dim, other.dim
        act = np.zeros((self.group.order, d1 + d2, d1 + d2), dtype=np.int64)
        act[:, :d1, :d1] = self.action
        act[:, d1:, d1:] = other.action
        return GModule(self.group, act, self.p)

    def restrict(self, sub):
        """Restriction to a subgroup produced by FiniteGroup.subgroup."""
        return GModule(sub, self.action[sub.parent_indices], self.p)

    def is_homomorphism(self):
        G = self.group
        a = self.action
        return all(np.array_equal(a[G.mul[x, y]], a[x] @ a[y] % self.p)
                   for x in range(G.order) for y in G.gen_indices)

    def fixed_points(self):
        G = self.group
        rows = [self.action[s] - np.eye(self.dim, dtype=np.int64) for s in G.gen_indices]
        if not rows:
            return np.eye(self.dim, dtype=np.int64)
        return kernel_array(np.concatenate(rows) % self.p, self.p)


@dataclass
class Cochain:
    module: GModule
    degree: int
    table: np.ndarray

    @classmethod
    def zero(cls, module, degree):
        shape = (module.group.order,) * degree + (module.dim,)
        return cls(module, degree, np.zeros(shape, dtype=np.int64))

    def is_normalized(self):
        for axis in range(self.degree):
            if np.take(self.table, 0, axis=axis).any():
                return False
        return True

    def to_vector(self):
        """Coordinates on nonidentity tuples, module coordinate fastest."""
        t = self.table
        for axis in range(self.degree):
            t = np.take(t, np.arange(1, self.module.group.order), axis=axis)
        return t.reshape(-1) % self.module.p

    @classmethod
    def from_vector(cls, module, degree, vec):
        N, d = module.group.order, module.dim
        table = np.zeros((N,) * degree + (d,), dtype=np.int64)
        inner = np.asarray(vec, dtype=np.int64).reshape((N - 1,) * degree + (d,))
        table[(slice(1, None),) * degree] = inner
        return cls(module, degree, table % module.p)

    def __add__(self, other):
        return Cochain(self.module, self.degree, (self.table + other.table) % self.module.p)

    def __sub__(self, other):
        return Cochain(self.module, self.degree, (self.table - other.table) % self.module.p)

    def scale(self, c):
        return Cochain(self.module, self.degree, self.table * c % self.module.p)

    def is_zero(self):
        return not self.table.any()

    def to_json(self):
        entries = []
        nz = np.argwhere(self.table.reshape(-1, self.module.dim).any(axis=1))
        N = self.module.group.order
        flat = self.table.reshape(-1, self.module.dim)
        for (i,) in nz:
            tup = np.unravel_index(i, (N,) * self.degree) if self.degree else ()
            entries.append([[int(t) for t in tup], flat[i].tolist()])
        G = self.module.group
        return {"degree": self.degree, "p": self.module.p, "module_dim": self.module.dim,
                "group": {"order": G.order, "elements": [g.tolist() for g in G.elements]},
                "table": entries}


def coboundary(f):
    """d f for an n-cochain f (standard bar differential)."""
    M, n = f.module, f.degree
    G, p = M.group, M.p
    N = G.order
    g = np.indices((N,) * (n + 1)) if n + 1 else ()
    out = np.einsum("...ab,...b->...a", M.action[g[0]], f.table[tuple(g[1:])])
    for i in range(1, n + 1):
        args = list(g[:i - 1]) + [G.mul[g[i - 1], g[i]]] + list(g[i + 1:])
        out = out + (-1) ** i * f.table[tuple(args)]
    out = out + (-1) ** (n + 1) * f.table[tuple(g[:n])]
    return Cochain(M, n + 1, out % p)


def is_cocycle(f):
    return coboundary(f).is_zero()


def _tuples(N, n):
    """All n-tuples of nonidentity indices in lexicographic order, shape (count, n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((N - 1,) * n).reshape(n, -1).T + 1


def _tuple_index(t, N):
    """Position of nonidentity tuples in the order used by _tuples."""
    n = t.shape[1]
    idx = np.zeros(t.shape[0], dtype=np.int64)
    for k in range(n):
        idx = idx * (N - 1) + (t[:, k] - 1)
    return idx


def differential_batches(M, n, batch_rows=4096):
    """Yield the rows of d^n : C^n -> C^{n+1} (normalized) as CSR blocks."""
    G, p, d = M.group, M.p, M.dim
    N = G.order
    ncols = (N - 1) ** n * d
    rest = _tuples(N, n)
    per_first = rest.shape[0] * d
    step = max(1, batch_rows // max(per_first, 1))
    firsts = np.arange(1, N)
    aa = np.arange(d)
    for start in range(0, N - 1, step):
        chunk = firsts[start:start + step]
        T = np.concatenate([np.column_stack([np.full(rest.shape[0], g1), rest]) for g1 in chunk])
        nt = T.shape[0]
        local = np.arange(nt)
        rows, cols, vals = [], [], []
        # g1 . f(g2, ..., g_{n+1})
        acts = M.action[T[:, 0]]
        base = _tuple_index(T[:, 1:], N) * d
        r = (local[:, None, None] * d + aa[None, :, None]) * np.ones((1, 1, d), dtype=np.int64)
        c = base[:, None, None] + aa[None, None, :] * np.ones((1, d, 1), dtype=np.int64)
        rows.append(r.reshape(-1))
        cols.append(c.reshape(-1))
        vals.append(acts.reshape(-1))
        for i in range(1, n + 1):
            merged = G.mul[T[:, i - 1], T[:, i]]
            keep = merged != 0
            t2 = np.column_stack([T[keep, :i - 1], merged[keep], T[keep, i + 1:]])
            ci = _tuple_index(t2, N) * d
            rows.append((local[keep][:, None] * d + aa[None, :]).reshape(-1))
            cols.append((ci[:, None] + aa[None, :]).reshape(-1))
            vals.append(np.full(keep.sum() * d, (-1) ** i, dtype=np.int64))
        ci = _tuple_index(T[:, :n], N) * d
        rows.append((local[:, None] * d + aa[None, :]).reshape(-1))
        cols.append((ci[:, None] + aa[None, :]).reshape(-1))
        vals.append(np.full(nt * d, (-1) ** (n + 1), dtype=np.int64))
        m = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(nt * d, ncols)).tocsr()
        m.sum_duplicates()
        m.data %= p
        m.eliminate_zeros()
        yield m


def differential_matrix(M, n):
    blocks = list(differential_batches(M, n))
    return sp.vstack(blocks).tocsr() if blocks else sp.csr_matrix((0, (M.group.order - 1) ** n * M.dim))


def bar_memory_estimate(M, n):
    N, d = M.group.order, M.dim
    cn = (N - 1) ** n * d
    return 8 * (3 * cn * cn + 2 * 4096 * cn)


@dataclass
class CohomologyResult:
    degree: int
    dim: int
    method: str
    representatives: list = field(default_factory=list)
    details: dict = field(default_factory=dict)


def bar_h_n(M, n, memory_budget=DEFAULT_BUDGET):
    """H^n(G, M) from the normalized bar complex."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    est = bar_memory_estimate(M, n)
    if est > memory_budget:
        raise ResourceError(f"bar complex in degree {n} needs about {est} bytes (budget {memory_budget})", estimate=est)
    N, d, p = M.group.order, M.dim, M.p
    cn = (N - 1) ** n * d
    ker = StreamingRank(cn, p)
    for block in differential_batches(M, n):
        ker.add_sparse(block)
    K = ker.kernel()
    img = StreamingRank(cn, p)
    if n > 0:
        dprev = differential_matrix(M, n - 1).T.tocsr()
        for s in range(0, dprev.shape[0], 4096):
            img.add_sparse(dprev[s:s + 4096])
    dim = K.shape[0] - img.rank
    reps = []
    for k in K:
        if len(reps) == dim:
            break
        if img.add_dense(k[None, :]):
            reps.append(Cochain.from_vector(M, n, k))
    return CohomologyResult(n, dim, "bar", reps, {"cocycles": int(K.shape[0]), "coboundaries": img.rank})


def is_coboundary(c, memory_budget=DEFAULT_BUDGET):
    """Whether c = d h for some normalized (n-1)-cochain h."""
    n = c.degree
    if n == 0:
        return c.is_zero()
    if not c.is_normalized():
        raise DomainError("coboundary test works with normalized cochains")
    M = c.module
    est = bar_memory_estimate(M, n)
    if est > memory_budget:
        raise ResourceError(f"coboundary test needs about {est} bytes", estimate=est)
    cn = (M.group.order - 1) ** n * M.dim
    img = StreamingRank(cn, M.p)
    dprev = differential_matrix(M, n - 1).T.tocsr()
    for s in range(0, dprev.shape[0], 4096):
        img.add_sparse(dprev[s:s + 4096])
    return img.contains(c.to_vector())


def matrix_order(sigma, limit=10**6):
    x = sigma
    for k in range(1, limit + 1):
        if x.is_identity():
            return k
        x = x @ sigma
    raise DomainError(f"matrix has no finite order below {limit}")


def cyclic_h_n(sigma, n, m=None):
    """H^n of the cyclic group generated by sigma acting on F_p^d.

    Representatives are vectors of the module: for odd n classes of ker N / im(1 - sigma),
    for even n >= 2 classes of ker(1 - sigma) / im N, where N = 1 + sigma + ... + sigma^{m-1}.
    """
    if not isinstance(sigma, FpMatrix):
        raise StructuralError("sigma must be an FpMatrix")
    p, d = sigma.p, sigma.rows
    order = matrix_order(sigma)
    if m is None:
        m = order
    elif m % order:
        raise DomainError(f"sigma^{m} is not the identity")
    eye = np.eye(d, dtype=np.int64)
    one_minus = (eye - sigma.a) % p
    norm = sum((sigma ** i).a for i in range(m)) % p
    if n == 0:
        ker, im = kernel_array(one_minus, p), np.zeros((0, d), dtype=np.int64)
    elif n % 2:
        ker, im = kernel_array(norm, p), rref_array(one_minus.T, p)[0]
    else:
        ker, im = kernel_array(one_minus, p), rref_array(norm.T, p)[0]
    img = StreamingRank(d, p)
    if im.shape[0]:
        img.add_dense(im)
    reps = []
    for k in ker:
        if img.add_dense(k[None, :]):
            reps.append(k)
    return CohomologyResult(n, len(reps), "cyclic", reps, {"order": m})


def cyclic_generator_powers(G, sigma_idx):
    """pos[x] = i with x = sigma^i, for a cyclic group generated by sigma."""
    pos = np.full(G.order, -1, dtype=np.int64)
    x, i = 0, 0
    while pos[x] < 0:
        pos[x] = i
        x = int(G.mul[sigma_idx, x])
        i += 1
    if (pos < 0).any():
        raise DomainError("group is not generated by the given element")
    return pos


def cyclic_cocycle(M, sigma_idx, v, degree):
    """Explicit cocycle of degree 1 or 2 on a cyclic group attached to a module vector.

    degree 1: f(sigma^i) = (1 + sigma + ... + sigma^{i-1}) v, for v in ker N.
    degree 2: f(sigma^i, sigma^j) = v if i + j >= m else 0, for v fixed by sigma.
    """
    G, p = M.group, M.p
    m = G.order
    pos = cyclic_generator_powers(G, sigma_idx)
    v = np.asarray(v, dtype=np.int64) % p
    if degree == 1:
        partial = [np.zeros(M.dim, dtype=np.int64)]
        s = M.action[sigma_idx]
        for _ in range(1, m):
            partial.append((s @ partial[-1] + v) % p)
        table = np.stack([partial[pos[x]] for x in range(m)])
    elif degree == 2:
        i = pos[:, None]
        j = pos[None, :]
        carry = (i + j >= m).astype(np.int64)
        table = carry[:, :, None] * v[None, None, :]
    else:
        raise UnsupportedError("explicit cyclic cocycles only in degrees 1 and 2")
    return Cochain(M, degree, table % p)


def restriction(f, sub):
    """Restrict a cochain on G to a subgroup given as FiniteGroup.subgroup(...)."""
    idx = getattr(sub, "parent_indices", None)
    if idx is None:
        raise StructuralError("subgroup must come from FiniteGroup.subgroup")
    members = set(idx.tolist())
    G = f.module.group
    if sub.order != len(members) or any(int(G.mul[a, b]) not in members for a in idx for b in idx):
        raise StructuralError("not a subgroup")
    table = f.table[np.ix_(*([idx] * f.degree))] if f.degree else f.table
    return Cochain(f.module.restrict(sub), f.degree, table.copy())


def sylow_generator(G, p):
    """Index of an element generating a cyclic Sylow p-subgroup, or None if p does not divide |G|."""
    pk = p_part(G.order, p)
    if pk == 1:
        return None
    for x in range(1, G.order):
        if G.element_order(x) == pk:
            return x
    raise UnsupportedError(f"Sylow {p}-subgroup is not cyclic")


@dataclass
class StableResult:
    dim: int
    sylow_order: int
    h2_sylow_dim: int
    classes: list
    double_cosets: int
    method: str = "stable"


def h2_stable_elements(M):
    """dim H^2(G, M) via stable classes in H^2 of a cyclic Sylow p-subgroup."""
    G, p = M.group, M.p
    x = sylow_generator(G, p)
    if x is None:
        return StableResult(0, 1, 0, [], 0, "coprime")
    S_idx = G.closure([x])
    S = G.subgroup(S_idx)
    MS = M.restrict(S)
    sigma_pos = S_idx.index(x)
    sigma = FpMatrix(M.action[x], p)
    base = cyclic_h_n(sigma, 2, len(S_idx))
    zs = [cyclic_cocycle(MS, sigma_pos, v, 2) for v in base.representatives]
    k = len(zs)
    if k == 0:
        return StableResult(0, len(S_idx), 0, [], 0)
    in_S = np.full(G.order, -1, dtype=np.int64)
    in_S[S_idx] = np.arange(len(S_idx))
    # double cosets S g S
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for g in range(G.order):
        if seen[g]:
            continue
        reps.append(g)
        for s in S_idx:
            sg = G.mul[s, g]
            seen[G.mul[sg, S_idx]] = True
    conditions = []
    for g in reps:
        conj = np.array([G.conj(g, s) for s in S_idx])
        T_parent = sorted(set(conj.tolist()) & set(S_idx))
        if len(T_parent) == 1:
            continue
        T_inS = [int(in_S[t]) for t in T_parent]
        T = S.subgroup(T_inS)
        MT = MS.restrict(T)
        ginv = int(G.inv[g])
        # (c_g z)(t1, t2) = g . z(g^-1 t1 g, g^-1 t2 g)
        back = np.array([in_S[G.conj(ginv, t)] for t in T_parent])
        if (back < 0).any():
            raise AssertionError("conjugate of S intersection is not inside S")
        cols = []
        for z in zs:
            a = z.table[np.ix_(T_inS, T_inS)]
            b = np.einsum("ab,ijb->ija", M.action[g], z.table[np.ix_(back, back)]) % p
            cols.append(Cochain(MT, 2, (a - b) % p))
        img = StreamingRank((T.order - 1) ** 2 * M.dim, p)
        dprev = differential_matrix(MT, 1).T.tocsr()
        if dprev.shape[0]:
            img.add_sparse(dprev)
        resid = img.reduce(np.stack([c.to_vector() for c in cols]))
        conditions.append(resid.T)
    if conditions:
        C = np.concatenate(conditions)
        sol = kernel_array(C % p, p)
    else:
        sol = np.eye(k, dtype=np.int64)
    classes = []
    for coeffs in sol:
        t = sum(int(c) * z.table for c, z in zip(coeffs, zs)) % p
        classes.append(Cochain(MS, 2, t))
    return StableResult(sol.shape[0], len(S_idx), k, classes, len(reps))


@dataclass
class LHSResult:
    vanishes: bool
    dims: dict
    methods: dict


def lhs_vanishing(M, normal_gens, n, memory_budget=DEFAULT_BUDGET):
    """True when H^i(N, M) = 0 for all i <= n, which forces H^n(G, M) = 0."""
    G = M.group
    gi = [G.index_of(g) if isinstance(g, FpMatrix) else int(g) for g in normal_gens]
    N_idx = G.closure(gi)
    members = set(N_idx)
    for s in G.gen_indices or range(G.order):
        for h in gi:
            if int(G.conj(s, h)) not in members:
                raise StructuralError("subgroup is not normal")
    Nsub = G.subgroup(N_idx)
    MN = M.restrict(Nsub)
    dims, methods = {}, {}
    cyc = next((x for x in range(Nsub.order) if Nsub.element_order(x) == Nsub.order), None)
    for i in range(n + 1):
        if cyc is not None:
            r = cyclic_h_n(FpMatrix(MN.action[cyc], M.p), i, Nsub.order)
        else:
            r = bar_h_n(MN, i, memory_budget)
        dims[i] = r.dim
        methods[i] = r.method
        if r.dim:
            return LHSResult(False, dims, methods)
    return LHSResult(True, dims, methods)


def beta_from_q(space):
    """Bilinear form (Q(x+y) - Q(x) - Q(y))/2, computed from values of Q alone."""
    n, p = space.dim, space.p
    e = np.eye(n, dtype=np.int64)
    h = inv(2, p)
    b = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            b[i, j] = (space.Q(e[i] + e[j]) - space.Q(e[i]) - space.Q(e[j])) * h % p
    return FpMatrix(b, p)


def cup_product(L1, L2, form):
    """Cup product of a 2-cochain pair followed by a bilinear form: values in trivial F_p."""
    if L1.degree != 2 or L2.degree != 2:
        raise UnsupportedError("cup product implemented for degree-2 cochains")
    M = L1.module
    G, p = M.group, M.p
    N = G.order
    x1, x2 = np.indices((N, N))
    prod = G.mul[x1, x2]
    moved = np.einsum("ijab,klb->ijkla", M.action[prod], L2.table) % p
    vals = np.einsum("ija,ab,ijklb->ijkl", L1.table, form.a, moved) % p
    triv = GModule.trivial(G, p)
    return Cochain(triv, 4, vals[..., None])


@dataclass
class CupSquareResult:
    cochain: Cochain
    is_coboundary: bool

    @property
    def verdict(self):
        return "vanishes" if self.is_coboundary else "indeterminate"


def cup_square(L, form, memory_budget=DEFAULT_BUDGET):
    if not is_cocycle(L):
        raise DomainError("L is not a cocycle")
    c = cup_product(L, L, form)
    return CupSquareResult(c, is_coboundary(c, memory_budget))


def _conj_table(G):
    g, x = np.indices((G.order, G.order))
    return G.mul[G.mul[g, x], G.inv[g]]


def is_three_cocycle(G, omega, m):
    """Whether d omega = 0 in Z/m; omega is an (N,N,N) exponent table."""
    N = G.order
    omega = np.asarray(omega, dtype=np.int64) % m
    mul = G.mul
    for g in range(N):
        h, k, l = np.indices((N, N, N))
        lhs = omega[h, k, l] + omega[g, mul[h, k], l] + omega[g, h, k]
        rhs = omega[mul[g, h], k, l] + omega[g, h, mul[k, l]]
        if ((lhs - rhs) % m).any():
            return False
    return True


def pentagon_holds(G, omega, m):
    """Pentagon identity for the associator a^omega = omega * a on Vec_G (written additively)."""
    N = G.order
    mul = G.mul
    omega = np.asarray(omega, dtype=np.int64) % m
    g, h, k, l = np.indices((N, N, N, N))
    top = omega[mul[g, h], k, l] + omega[g, h, mul[k, l]]
    bottom = omega[g, h, k] + omega[g, mul[h, k], l] + omega[h, k, l]
    return not ((top - bottom) % m).any()


@dataclass
class TwistData:
    gamma: np.ndarray
    mu: np.ndarray
    m: int


def twist_data(G, omega, m):
    """gamma_{g,h}(x) and mu_g(x,y) from a 3-cocycle omega with Z/m exponents."""
    if G.order > 100:
        raise ResourceError("exhaustive cocycle check limited to |G| <= 100", estimate=G.order)
    omega = np.asarray(omega, dtype=np.int64) % m
    if not is_three_cocycle(G, omega, m):
        raise DomainError("omega is not a 3-cocycle")
    N = G.order
    conj = _conj_table(G)
    mul = G.mul
    g, h, x = np.indices((N, N, N))
    gamma = (omega[g, h, x] + omega[conj[mul[g, h], x], g, h] - omega[g, conj[h, x], h]) % m
    g, x, y = np.indices((N, N, N))
    mu = (omega[conj[g, x], g, y] - omega[conj[g, x], conj[g, y], g] - omega[g, x, y]) % m
    return TwistData(gamma, mu, m)


def twist_equivalent(G, omega1, omega2, m):
    """Whether two 3-cocycles with Z/m exponents (m prime) are cohomologous."""
    triv = GModule.trivial(G, m)
    diff = (np.asarray(omega1) - np.asarray(omega2)) % m
    return is_coboundary(Cochain(triv, 3, diff[..., None]))


def sylow_normalizer(G, p, rng_seed=0, cap=10**6):
    """(sigma, elements of N_G(<sigma>)) for a Sylow p-subgroup of prime order p of a MatGroup."""
    import random
    order = G.order()
    if p_part(order, p) != p:
        raise UnsupportedError("normalizer route needs a Sylow subgroup of prime order")
    sigma = G.element_of_order(p, random.Random(rng_seed))
    powers = {(sigma ** i).key() for i in range(p)}
    normalizer = [g for g in G.elements(cap) if (g @ sigma @ g.inverse()).key() in powers]
    return sigma, normalizer


def h2_natural(G, memory_budget=DEFAULT_BUDGET, cap=5000):
    """dim H^2(G, natural module) with the cheapest applicable method.

    Returns (dim or None, method).  Methods tried in order: coprime order, -id in G
    (Lyndon-Hochschild-Serre), stable elements on a cyclic Sylow subgroup, the
    normalizer of a Sylow subgroup of prime order, and the bar complex.
    """
    p = G.p
    order = G.order()
    if order % p:
        return 0, "coprime"
    minus = FpMatrix.identity(G.dim, p).scale(-1)
    if G.contains(minus):
        if all(cyclic_h_n(minus, i, 2).dim == 0 for i in range(3)):
            return 0, "lhs(-id)"
    if order <= cap:
        FG = FiniteGroup.from_matgroup(G, cap)
        try:
            return h2_stable_elements(GModule.natural(FG)).dim, "stable"
        except UnsupportedError:
            pass
        M = GModule.natural(FG)
        if bar_memory_estimate(M, 2) <= memory_budget:
            return bar_h_n(M, 2, memory_budget).dim, "bar"
        return None, "unresolved"
    try:
        _sigma, norm = sylow_normalizer(G, p)
    except UnsupportedError:
        return None, "unresolved"
    if len(norm) > cap:
        return None, "unresolved"
    NF = FiniteGroup(norm)
    return h2_stable_elements(GModule.natural(NF)).dim, "stable(normalizer)"


@dataclass
class SylowSquare:
    sigma: FpMatrix
    fixed_basis: np.ndarray
    form_on_fixed_zero: bool
    h2_sylow_dim: int
    verdicts: list


def sylow_cup_squares(G, space, memory_budget=DEFAULT_BUDGET):
    """Cup squares of the H^2 classes of a Sylow subgroup of prime order p.

    The classes come from vectors fixed by a generator sigma; each square is paired
    with the bilinear form of ``space`` and tested for being a coboundary.
    """
    import random
    p = G.p
    if p_part(G.order(), p) != p:
        raise UnsupportedError("needs a Sylow subgroup of prime order")
    sigma = G.element_of_order(p, random.Random(0))
    C = FiniteGroup([sigma ** i for i in range(p)], [sigma])
    M = GModule.natural(C)
    fixed = kernel_array((np.eye(G.dim, dtype=np.int64) - sigma.a) % p, p)
    beta = beta_from_q(space)
    zero = not (fixed @ beta.a @ fixed.T % p).any()
    base = cyclic_h_n(sigma, 2, p)
    verdicts = [cup_square(cyclic_cocycle(M, 1, v, 2), beta, memory_budget).verdict
                for v in base.representatives]
    return SylowSquare(sigma, fixed, zero, base.dim, verdicts)
