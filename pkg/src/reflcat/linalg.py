"""Exact linear algebra over F_p on top of int64 numpy arrays.

Entries stay in [0, p) and every product is reduced immediately, so for the
primes used here (p < 2^20) no intermediate overflows int64 as long as the
inner dimension of a product stays below 2^23.
"""
import json

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, StructuralError
from .ff import check_odd_prime, inv


def _as_array(entries, p):
    a = np.array(entries, dtype=np.int64)
    if a.ndim != 2:
        if a.size == 0:
            a = a.reshape(0, 0)
        else:
            raise StructuralError(f"expected a 2-d array, got shape {a.shape}")
    return np.mod(a, p)


class FpMatrix:
    """Immutable matrix over F_p; acts on column vectors."""

    __slots__ = ("a", "p", "_key")

    def __init__(self, entries, p):
        check_odd_prime(p)
        a = entries % p if isinstance(entries, np.ndarray) and entries.ndim == 2 else _as_array(entries, p)
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.setflags(write=False)
        self.a = a
        self.p = p
        self._key = None

    @classmethod
    def _wrap(cls, a, p):
        m = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.setflags(write=False)
        m.a, m.p, m._key = a, p, None
        return m

    @classmethod
    def identity(cls, n, p):
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @classmethod
    def zeros(cls, rows, cols, p):
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @property
    def shape(self):
        return self.a.shape

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def T(self):
        return FpMatrix._wrap(self.a.T.copy(), self.p)

    def key(self):
        if self._key is None:
            self._key = (self.a.shape, self.a.tobytes())
        return self._key

    def __hash__(self):
        return hash((self.p,) + self.key())

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.key() == other.key()

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.a.tolist()})"

    def _check(self, other):
        if other.p != self.p:
            raise StructuralError(f"characteristic mismatch: {self.p} vs {other.p}")

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            self._check(other)
            if self.cols != other.rows:
                raise StructuralError(f"shape mismatch {self.shape} @ {other.shape}")
            return FpMatrix._wrap(self.a @ other.a % self.p, self.p)
        v = np.asarray(other, dtype=np.int64)
        return self.a @ v % self.p

    def __add__(self, other):
        self._check(other)
        return FpMatrix._wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other):
        self._check(other)
        return FpMatrix._wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self):
        return FpMatrix._wrap(-self.a % self.p, self.p)

    def scale(self, c):
        return FpMatrix._wrap(self.a * (c % self.p) % self.p, self.p)

    def __pow__(self, k):
        if self.rows != self.cols:
            raise StructuralError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        out = np.eye(self.rows, dtype=np.int64)
        base = self.a
        while k:
            if k & 1:
                out = out @ base % self.p
            base = base @ base % self.p
            k >>= 1
        return FpMatrix._wrap(out, self.p)

    def is_identity(self):
        return self.rows == self.cols and np.array_equal(self.a, np.eye(self.rows, dtype=np.int64))

    def is_zero(self):
        return not self.a.any()

    def tolist(self):
        return self.a.tolist()

    def rank(self):
        return rref(self)[1]

    def det(self):
        return det_array(self.a, self.p)

    def inverse(self):
        n = self.rows
        if n != self.cols:
            raise StructuralError("inverse of a non-square matrix")
        aug = np.concatenate([self.a, np.eye(n, dtype=np.int64)], axis=1)
        r, piv = _rref_inplace(aug, self.p)
        if piv[:n] != list(range(n)):
            raise DomainError("matrix is singular")
        return FpMatrix._wrap(aug[:, n:].copy(), self.p)

    def to_json(self):
        return {"p": self.p, "rows": self.rows, "cols": self.cols, "entries": self.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            p, rows, cols, entries = obj["p"], obj["rows"], obj["cols"], obj["entries"]
        except (KeyError, TypeError) as e:
            raise StructuralError(f"bad matrix JSON: {e}") from None
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise StructuralError("matrix JSON entries do not match rows/cols")
        if rows == 0:
            return cls.zeros(0, cols, p)
        return cls(entries, p)


def _rref_inplace(a, p):
    """Reduce a (int64, entries in [0,p)) to reduced row echelon form in place."""
    rows, cols = a.shape
    r = 0
    piv = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * inv(int(a[r, c]), p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.flatnonzero(col)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        piv.append(c)
        r += 1
    return r, piv


def rref_array(a, p):
    """RREF of an int array; returns (nonzero rows, pivot columns)."""
    b = np.array(a, dtype=np.int64) % p
    if b.ndim != 2:
        raise StructuralError("rref needs a 2-d array")
    r, piv = _rref_inplace(b, p)
    return b[:r], piv


def rref(M):
    """(RREF matrix, rank, pivot columns)."""
    b = M.a.copy()
    r, piv = _rref_inplace(b, M.p)
    return FpMatrix._wrap(b, M.p), r, tuple(piv)


def det_array(a, p):
    n = a.shape[0]
    if a.shape != (n, n):
        raise StructuralError("determinant of a non-square matrix")
    b = np.array(a, dtype=np.int64) % p
    d = 1
    for c in range(n):
        nz = np.flatnonzero(b[c:, c])
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            b[[c, i]] = b[[i, c]]
            d = -d
        piv = int(b[c, c])
        d = d * piv % p
        f = b[c + 1:, c] * inv(piv, p) % p
        b[c + 1:] = (b[c + 1:] - np.outer(f, b[c])) % p
    return d % p


def kernel_array(a, p):
    """Basis of {x : a x = 0} as the rows of a (k, cols) array."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    red, piv = rref_array(a, p) if a.shape[0] else (np.zeros((0, cols), dtype=np.int64), [])
    free = [c for c in range(cols) if c not in set(piv)]
    k = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        k[np.arange(len(free)), free] = 1
        if piv:
            k[:, piv] = (-red[:, free]).T % p
    return k


def kernel_basis(M):
    """Right kernel basis of M, one vector per row of the returned matrix."""
    return FpMatrix._wrap(kernel_array(M.a, M.p), M.p)


def image_basis(M):
    """Basis of the column space of M (canonical RREF rows)."""
    red, _ = rref_array(M.a.T, M.p)
    return FpMatrix._wrap(red, M.p)


def solve(M, b):
    """One solution x of M x = b, or None when the system is inconsistent."""
    p = M.p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    if b.shape[0] != M.rows:
        raise StructuralError("right-hand side has the wrong length")
    aug = np.concatenate([M.a, b], axis=1)
    red, piv = rref_array(aug, p)
    if M.cols in piv:
        return None
    x = np.zeros(M.cols, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = red[i, -1]
    return x


def span_basis(vectors, p, n):
    """RREF basis of the span of some vectors of length n."""
    v = np.asarray(vectors, dtype=np.int64).reshape(-1, n)
    return rref_array(v, p)[0] if v.shape[0] else np.zeros((0, n), dtype=np.int64)


class StreamingRank:
    """Incremental row space over F_p, kept in reduced row echelon form.

    Rows arrive in dense or sparse batches; each batch is reduced against the
    current basis with one sparse-by-dense product, so memory is bounded by
    ncols^2 regardless of how many rows are streamed.
    """

    def __init__(self, ncols, p):
        self.ncols = ncols
        self.p = p
        self.basis = np.zeros((0, ncols), dtype=np.int64)
        self.pivots = []

    @property
    def rank(self):
        return len(self.pivots)

    def _absorb(self, resid):
        p = self.p
        resid = resid[resid.any(axis=1)]
        if resid.shape[0] == 0:
            return 0
        new, newpiv = rref_array(resid, p)
        if not newpiv:
            return 0
        if self.pivots:
            coeff = self.basis[:, newpiv]
            if coeff.any():
                self.basis = (self.basis - coeff @ new % p) % p
        self.basis = np.concatenate([self.basis, new])
        self.pivots.extend(newpiv)
        return len(newpiv)

    def reduce(self, rows):
        """Residues of dense rows modulo the current span."""
        rows = np.atleast_2d(np.asarray(rows, dtype=np.int64)) % self.p
        if not self.pivots:
            return rows
        return (rows - rows[:, self.pivots] @ self.basis % self.p) % self.p

    def add_dense(self, rows):
        """Add rows; returns how much the rank grew."""
        return self._absorb(self.reduce(rows))

    def add_sparse(self, m, chunk=128):
        """Add the rows of a scipy sparse matrix with entries already reduced mod p."""
        m = sp.csr_matrix(m, dtype=np.int64)
        m.data %= self.p
        grown = 0
        # small chunks: once the basis fills up, most later rows reduce to zero cheaply
        for s in range(0, m.shape[0], chunk):
            part = m[s:s + chunk]
            dense = part.toarray()
            if self.pivots:
                proj = part[:, self.pivots] @ self.basis
                dense = (dense - np.asarray(proj) % self.p) % self.p
            grown += self._absorb(dense)
        return grown

    def contains(self, v):
        return not self.reduce(v).any()

    def rref(self):
        order = np.argsort(self.pivots, kind="stable")
        return self.basis[order], [self.pivots[i] for i in order]

    def kernel(self):
        """Basis of the right kernel of the streamed rows (as rows)."""
        red, piv = self.rref()
        pset = set(piv)
        free = [c for c in range(self.ncols) if c not in pset]
        k = np.zeros((len(free), self.ncols), dtype=np.int64)
        if free:
            k[np.arange(len(free)), free] = 1
            if piv:
                k[:, piv] = (-red[:, free]).T % self.p
        return k


def sparse_rank(rows, ncols, p, batch=2048):
    """Rank of a sparse matrix given as an iterable of {col: value} rows."""
    check_odd_prime(p)
    tracker = StreamingRank(ncols, p)
    buf = []

    def flush():
        if not buf:
            return
        indptr, idx, data = [0], [], []
        for row in buf:
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise StructuralError(f"column {c} out of range")
                idx.append(c)
                data.append(v % p)
            indptr.append(len(idx))
        m = sp.csr_matrix((np.array(data, dtype=np.int64), np.array(idx, dtype=np.int64), indptr),
                          shape=(len(buf), ncols))
        m.sum_duplicates()
        tracker.add_sparse(m)
        buf.clear()

    for row in rows:
        buf.append(dict(row))
        if len(buf) >= batch:
            flush()
    flush()
    return tracker.rank


def all_vectors(p, k):
    """Every vector of F_p^k as the rows of a (p^k, k) array, lexicographic order."""
    return np.indices((p,) * k, dtype=np.int64).reshape(k, p ** k).T
