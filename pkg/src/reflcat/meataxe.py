"""Irreducibility of matrix representations over F_p (Norton's criterion)."""
import random
from dataclasses import dataclass

import numpy as np
from sympy import ZZ
from sympy.polys.galoistools import gf_factor

from .errors import ResourceError
from .linalg import FpMatrix, kernel_array, rref_array
from .quadspace import projective_points


@dataclass
class IrreducibilityResult:
    irreducible: bool
    witness: object = None
    method: str = "norton"

    def __bool__(self):
        return self.irreducible


def spin(vectors, gens, p):
    """RREF basis of the smallest subspace containing vectors and stable under gens."""
    n = gens[0].shape[0] if len(gens) else np.asarray(vectors).shape[-1]
    basis, _ = rref_array(np.asarray(vectors, dtype=np.int64).reshape(-1, n), p)
    frontier = basis
    while frontier.shape[0]:
        imgs = np.concatenate([frontier @ g.T % p for g in gens]) if len(gens) else frontier[:0]
        new, _ = rref_array(np.concatenate([basis, imgs]), p)
        if new.shape[0] == basis.shape[0]:
            break
        frontier = imgs
        basis = new
    return basis


def char_poly(M, p):
    """Characteristic polynomial det(xI - M), coefficients high to low, via Hessenberg form."""
    a = np.array(M, dtype=np.int64) % p
    n = a.shape[0]
    for m in range(1, n - 1):
        nz = np.flatnonzero(a[m:, m - 1])
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            a[[i, m]] = a[[m, i]]
            a[:, [i, m]] = a[:, [m, i]]
        t = pow(int(a[m, m - 1]), -1, p)
        for i in range(m + 1, n):
            u = int(a[i, m - 1]) * t % p
            if u:
                a[i] = (a[i] - u * a[m]) % p
                a[:, m] = (a[:, m] + u * a[:, i]) % p
    # recurrence on leading principal submatrices of the Hessenberg matrix
    polys = [[1]]
    for m in range(1, n + 1):
        h = a[m - 1, m - 1]
        prev = polys[-1]
        cur = [0] * (m + 1)
        for k, c in enumerate(prev):
            cur[k] = (cur[k] + c) % p
            cur[k + 1] = (cur[k + 1] - h * c) % p
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = prod * int(a[i, i - 1]) % p
            coef = prod * int(a[i - 1, m - 1]) % p
            if coef:
                q = polys[i - 1]
                off = m + 1 - len(q)
                for k, c in enumerate(q):
                    cur[off + k] = (cur[off + k] - coef * c) % p
        polys.append(cur)
    return [int(c) for c in polys[-1]]


def poly_eval(f, M, p):
    n = M.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in f:
        out = (out @ M + c * np.eye(n, dtype=np.int64)) % p
    return out


def _annihilator(basis, n, p):
    """Orthogonal complement under the standard dot product."""
    return kernel_array(basis, p) if basis.shape[0] else np.eye(n, dtype=np.int64)


def _random_element(gens, p, rng):
    n = gens[0].shape[0]
    words = list(gens)
    for _ in range(3):
        a, b = rng.choice(words), rng.choice(words)
        words.append(a @ b % p)
    theta = np.zeros((n, n), dtype=np.int64)
    for w in words:
        theta = (theta + rng.randrange(p) * w) % p
    return theta


def is_irreducible(gens, p, seed=0, max_tries=60, exhaustive_cap=2 * 10**5):
    """Decide irreducibility of the module F_p^n under matrices gens.

    A reducible verdict carries an invariant proper subspace (RREF rows).
    """
    gens = [g.a if isinstance(g, FpMatrix) else np.asarray(g, dtype=np.int64) % p for g in gens]
    n = gens[0].shape[0]
    if n == 1:
        return IrreducibilityResult(True, None, "dimension-one")
    gens_t = [g.T.copy() for g in gens]
    rng = random.Random(seed)
    for _ in range(max_tries):
        theta = _random_element(gens, p, rng)
        _, factors = gf_factor(char_poly(theta, p), p, ZZ)
        for f, _mult in sorted(factors, key=lambda fm: len(fm[0])):
            f = [int(c) % p for c in f]
            fa = poly_eval(f, theta, p)
            null = kernel_array(fa, p)
            sub = spin(null[:1], gens, p)
            if sub.shape[0] < n:
                return IrreducibilityResult(False, sub, "norton")
            if null.shape[0] == len(f) - 1:
                null_t = kernel_array(fa.T, p)
                sub_t = spin(null_t[:1], gens_t, p)
                if sub_t.shape[0] == n:
                    return IrreducibilityResult(True, None, "norton")
                return IrreducibilityResult(False, _annihilator(sub_t, n, p), "norton")
    if p ** n > exhaustive_cap:
        raise ResourceError("irreducibility undecided and exhaustive spinning is too large", estimate=p ** n)
    for v in projective_points(n, p):
        sub = spin(v[None, :], gens, p)
        if sub.shape[0] < n:
            return IrreducibilityResult(False, sub, "exhaustive")
    return IrreducibilityResult(True, None, "exhaustive")


def is_invariant_subspace(basis, gens, p):
    basis = np.asarray(basis, dtype=np.int64)
    r = rref_array(basis, p)[0].shape[0]
    for g in gens:
        a = g.a if isinstance(g, FpMatrix) else g
        if rref_array(np.concatenate([basis, basis @ a.T % p]), p)[0].shape[0] != r:
            return False
    return True


def endo_algebra_dim(gens, p):
    """dim_{F_p} of {X : X g = g X for all generators g}."""
    gens = [g.a if isinstance(g, FpMatrix) else np.asarray(g, dtype=np.int64) for g in gens]
    n = gens[0].shape[0]
    eye = np.eye(n, dtype=np.int64)
    # row-major vec: vec(X M) = (I kron M^T) vec X,  vec(M X) = (M kron I) vec X
    rows = [(np.kron(eye, g.T) - np.kron(g, eye)) % p for g in gens]
    return kernel_array(np.concatenate(rows), p).shape[0]


def is_absolutely_irreducible(gens, p, seed=0):
    return bool(is_irreducible(gens, p, seed)) and endo_algebra_dim(gens, p) == 1
