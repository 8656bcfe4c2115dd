"""Matrix groups over F_p via a Schreier-Sims stabilizer chain.

The group acts on column vectors of F_p^n; base points are standard basis
vectors, so orbits are sets of vectors keyed by their bytes.
"""
import random
from collections import deque

import numpy as np

from .errors import DomainError, ResourceError, StructuralError
from .ff import factorize
from .linalg import FpMatrix
from .quadspace import discriminant, is_isometry, projective_points, reflection


def _key(v):
    return v.tobytes()


class _Level:
    __slots__ = ("point", "gens", "gens_inv", "orbit", "trans", "trans_inv", "checked")

    def __init__(self, point, n):
        self.point = point
        self.gens = []
        self.gens_inv = []
        k = _key(point)
        self.orbit = {k: point}
        eye = np.eye(n, dtype=np.int64)
        self.trans = {k: eye}
        self.trans_inv = {k: eye}
        self.checked = set()

    def add_gen(self, g, ginv, p):
        self.gens.append(g)
        self.gens_inv.append(ginv)
        queue = deque(self.orbit)
        while queue:
            k = queue.popleft()
            v = self.orbit[k]
            for s, sinv in zip(self.gens, self.gens_inv):
                w = s @ v % p
                kw = _key(w)
                if kw not in self.orbit:
                    self.orbit[kw] = w
                    self.trans[kw] = s @ self.trans[k] % p
                    self.trans_inv[kw] = self.trans_inv[k] @ sinv % p
                    queue.append(kw)


class MatGroup:
    """Subgroup of GL_n(F_p) generated by a list of FpMatrix."""

    def __init__(self, generators, p=None, dim=None, space=None):
        gens = list(generators)
        if gens:
            p = gens[0].p if p is None else p
            dim = gens[0].rows if dim is None else dim
        if p is None or dim is None:
            raise StructuralError("p and dim are needed for a group without generators")
        for g in gens:
            if g.p != p or g.shape != (dim, dim):
                raise StructuralError("generators must be square matrices over one field")
            if g.det() == 0:
                raise DomainError("generator is singular")
        self.p = p
        self.dim = dim
        self.generators = tuple(gens)
        self.space = space
        self._levels = []
        self._inv_cache = {}
        self._build()

    # chain construction

    def _inverse(self, a):
        return FpMatrix._wrap(a, self.p).inverse().a

    def _new_level(self, g):
        """Append a level whose base point is the first standard vector moved by g."""
        n, p = self.dim, self.p
        for i in range(n):
            e = np.zeros(n, dtype=np.int64)
            e[i] = 1
            if not np.array_equal(g @ e % p, e):
                lvl = _Level(e, n)
                self._levels.append(lvl)
                return lvl
        raise AssertionError("identity passed as a new strong generator")

    def _strip(self, h, start=0):
        p = self.p
        for j in range(start, len(self._levels)):
            lvl = self._levels[j]
            k = _key(h @ lvl.point % p)
            if k not in lvl.orbit:
                return h, j
            h = lvl.trans_inv[k] @ h % p
        return h, len(self._levels)

    def _is_id(self, h):
        return np.array_equal(h, np.eye(self.dim, dtype=np.int64))

    def _build(self):
        p = self.p
        for g in self.generators:
            a = g.a
            if self._is_id(a):
                continue
            if all(self._is_id(a) or np.array_equal(a @ l.point % p, l.point) for l in self._levels):
                self._new_level(a)
        # initial strong generators at each level
        for g in self.generators:
            a = g.a
            if self._is_id(a):
                continue
            ainv = self._inverse(a)
            for lvl in self._levels:
                lvl.add_gen(a, ainv, p)
                if not np.array_equal(a @ lvl.point % p, lvl.point):
                    break
        i = len(self._levels) - 1
        while i >= 0:
            lvl = self._levels[i]
            jump = None
            for k in list(lvl.orbit):
                for gi in range(len(lvl.gens)):
                    if (k, gi) in lvl.checked:
                        continue
                    s = lvl.gens[gi]
                    sb = s @ lvl.orbit[k] % p
                    h = lvl.trans_inv[_key(sb)] @ s % p @ lvl.trans[k] % p
                    res, j = self._strip(h, i + 1)
                    if j < len(self._levels) or not self._is_id(res):
                        if j == len(self._levels):
                            self._new_level(res)
                        rinv = self._inverse(res)
                        for l in range(i + 1, j + 1):
                            self._levels[l].add_gen(res, rinv, p)
                        jump = j
                        break
                    lvl.checked.add((k, gi))
                if jump is not None:
                    break
            if jump is not None:
                i = jump
            else:
                i -= 1

    # queries

    def order(self):
        n = 1
        for lvl in self._levels:
            n *= len(lvl.orbit)
        return n

    def base(self):
        return [lvl.point.copy() for lvl in self._levels]

    def orbit_sizes(self):
        return [len(lvl.orbit) for lvl in self._levels]

    def contains(self, M):
        if M.p != self.p or M.shape != (self.dim, self.dim):
            return False
        res, j = self._strip(M.a)
        return j == len(self._levels) and self._is_id(res)

    def __contains__(self, M):
        return self.contains(M)

    def identity(self):
        return FpMatrix.identity(self.dim, self.p)

    def elements(self, cap=10**6):
        """All elements, identity first, in a deterministic order."""
        if self.order() > cap:
            raise ResourceError(f"group of order {self.order()} exceeds enumeration cap {cap}", estimate=self.order())
        p = self.p
        out = [np.eye(self.dim, dtype=np.int64)]
        for lvl in reversed(self._levels):
            ts = list(lvl.trans.values())
            out = [t @ g % p for t in ts for g in out]
        return [FpMatrix._wrap(a, p) for a in out]

    def random_element(self, rng=None):
        rng = rng or random.Random()
        a = np.eye(self.dim, dtype=np.int64)
        for lvl in self._levels:
            ts = list(lvl.trans.values())
            a = a @ ts[rng.randrange(len(ts))] % self.p
        return FpMatrix._wrap(a, self.p)

    def contains_minus_identity(self):
        return self.contains(FpMatrix.identity(self.dim, self.p).scale(-1))

    def subgroup(self, gens):
        return MatGroup(gens, p=self.p, dim=self.dim, space=self.space)

    def is_normal_subgroup(self, H):
        return all(H.contains(g @ h @ g.inverse()) for g in self.generators for h in H.generators)

    def normal_closure(self, gens):
        H = self.subgroup(gens)
        changed = True
        while changed:
            changed = False
            for g in self.generators:
                ginv = g.inverse()
                for h in list(H.generators):
                    c = g @ h @ ginv
                    if not H.contains(c):
                        H = self.subgroup(list(H.generators) + [c])
                        changed = True
        return H

    def derived_subgroup(self):
        comms = []
        gs = self.generators
        for a in gs:
            for b in gs:
                c = a.inverse() @ b.inverse() @ a @ b
                if not c.is_identity():
                    comms.append(c)
        return self.normal_closure(comms)

    def element_of_order(self, k, rng=None, tries=2000):
        """Some element of order exactly k (random search, then exhaustive for small groups)."""
        rng = rng or random.Random(0)
        if self.order() % k:
            return None
        for _ in range(tries):
            g = self.random_element(rng)
            o = element_order(g, self.order())
            if o % k == 0:
                return g ** (o // k)
        if self.order() <= 10**5:
            for g in self.elements():
                if element_order(g, self.order()) == k:
                    return g
        return None

    def to_json(self):
        return {"p": self.p, "dim": self.dim, "generators": [g.tolist() for g in self.generators],
                "order": self.order()}

    @classmethod
    def from_json(cls, obj):
        try:
            p, dim = obj["p"], obj["dim"]
            gens = [FpMatrix(g, p) for g in obj["generators"]]
        except (KeyError, TypeError) as e:
            raise StructuralError(f"bad group JSON: {e}") from None
        G = cls(gens, p=p, dim=dim)
        if "order" in obj and obj["order"] is not None and obj["order"] != G.order():
            raise StructuralError(f"stated order {obj['order']} disagrees with computed {G.order()}")
        return G


def element_order(g, bound):
    """Order of g, given a multiple-of-order bound such as |G|."""
    n = bound
    for q in factorize(bound):
        while n % q == 0 and (g ** (n // q)).is_identity():
            n //= q
    if not (g ** n).is_identity():
        raise DomainError("bound is not a multiple of the element order")
    return n


def closure_elements(generators, cap=10**5):
    """Brute-force closure under multiplication; an independent order oracle."""
    gens = list(generators)
    if not gens:
        return []
    p, n = gens[0].p, gens[0].rows
    ident = FpMatrix.identity(n, p)
    seen = {ident.key(): ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g @ x
            k = y.key()
            if k not in seen:
                seen[k] = y
                if len(seen) > cap:
                    raise ResourceError("closure exceeds cap", estimate=len(seen))
                queue.append(y)
    return list(seen.values())


def reflections_in(space, axis_class="all", cap=10**6):
    """All reflections of the space, one per anisotropic line.

    axis_class: 'all', 'square' or 'nonsquare' (square class of Q on the axis).
    Returns (axes, matrices).
    """
    pts = projective_points(space.dim, space.p, cap)
    q = space.Q_many(pts)
    sq = np.array([pow(int(x), (space.p - 1) // 2, space.p) == 1 if x else False for x in q])
    if axis_class == "all":
        keep = q != 0
    elif axis_class == "square":
        keep = (q != 0) & sq
    elif axis_class == "nonsquare":
        keep = (q != 0) & ~sq
    else:
        raise DomainError(f"unknown axis class {axis_class!r}")
    axes = pts[keep]
    return axes, [reflection(space, a) for a in axes]


def generated_by(reflections, space=None):
    """Group generated by a list of matrices, adding generators only when they enlarge it."""
    mats = list(reflections)
    if not mats:
        raise DomainError("no generators")
    G = MatGroup(mats[:1], space=space)
    for r in mats[1:]:
        if not G.contains(r):
            G = MatGroup(list(G.generators) + [r], space=space)
    return G


def check_isometries(space, G):
    return all(is_isometry(space, g) for g in G.generators)


def space_discriminant(G):
    return discriminant(G.space) if G.space is not None else None
