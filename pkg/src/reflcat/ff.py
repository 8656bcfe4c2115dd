"""Scalar arithmetic in F_p and F_{p^2}.

Scalars in F_p are plain ints reduced into [0, p).  F_{p^2} is modelled as
F_p(sqrt(gamma)) with gamma the least quadratic non-residue.
"""
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

_SCAN_LIMIT = 10**4


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_odd_prime(p):
    if not isinstance(p, int) or p == 2 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p!r}")
    return p


def factorize(n):
    """Prime factorization as a dict {prime: exponent}."""
    out = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def p_part(n, p):
    k = 1
    while n % p == 0:
        n //= p
        k *= p
    return k


def inv(x, p):
    x %= p
    if x == 0:
        raise DomainError("zero has no inverse")
    return pow(x, -1, p)


def legendre(x, p):
    """1, -1 or 0."""
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def is_square(x, p):
    """Euler criterion.  Zero is rejected since it has no square class."""
    x %= p
    if x == 0:
        raise DomainError("0 has no square class")
    return pow(x, (p - 1) // 2, p) == 1


@lru_cache(maxsize=None)
def nonsquare(p):
    """Least positive quadratic non-residue mod p."""
    check_odd_prime(p)
    x = 2
    while legendre(x, p) != -1:
        x += 1
    return x


def _tonelli_shanks(a, p):
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = nonsquare(p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod_p(x, p):
    """Smaller square root of x in [0, p), or None for non-residues."""
    x %= p
    if x == 0:
        return 0
    if legendre(x, p) != 1:
        return None
    if p < _SCAN_LIMIT:
        r = next(r for r in range(1, p) if r * r % p == x)
    else:
        r = _tonelli_shanks(x, p)
    return min(r, p - r)


def multiplicative_order(x, p):
    x %= p
    if x == 0:
        raise DomainError("zero has no multiplicative order")
    n = p - 1
    for q in factorize(p - 1):
        while n % q == 0 and pow(x, n // q, p) == 1:
            n //= q
    return n


@lru_cache(maxsize=None)
def primitive_root(p):
    g = 2 if p > 2 else 1
    while multiplicative_order(g, p) != p - 1:
        g += 1
    return g


def root_of_unity(m, p):
    """An element of exact order m in F_p^*, chosen as a power of the least primitive root."""
    if (p - 1) % m:
        raise DomainError(f"F_{p} has no primitive {m}-th root of unity")
    return pow(primitive_root(p), (p - 1) // m, p)


@dataclass(frozen=True)
class Fp2:
    """a + b*sqrt(gamma) with gamma = nonsquare(p)."""

    a: int
    b: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)

    @property
    def gamma(self):
        return nonsquare(self.p)

    def __add__(self, o):
        return Fp2(self.a + o.a, self.b + o.b, self.p)

    def __sub__(self, o):
        return Fp2(self.a - o.a, self.b - o.b, self.p)

    def __neg__(self):
        return Fp2(-self.a, -self.b, self.p)

    def __mul__(self, o):
        if isinstance(o, int):
            return Fp2(self.a * o, self.b * o, self.p)
        g = self.gamma
        return Fp2(self.a * o.a + g * self.b * o.b, self.a * o.b + self.b * o.a, self.p)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Fp2(1, 0, self.p), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self):
        return Fp2(self.a, -self.b, self.p)

    def norm(self):
        return (self.a * self.a - self.gamma * self.b * self.b) % self.p

    def trace(self):
        return 2 * self.a % self.p

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise DomainError("zero has no inverse")
        return self.conj() * inv(n, self.p)

    def order(self):
        if self.is_zero():
            raise DomainError("zero has no multiplicative order")
        q = self.p * self.p - 1
        n = q
        one = Fp2(1, 0, self.p)
        for r in factorize(q):
            while n % r == 0 and self ** (n // r) == one:
                n //= r
        return n

    def mult_matrix(self):
        """Matrix of multiplication by self on the basis (1, sqrt(gamma))."""
        return [[self.a, self.gamma * self.b % self.p], [self.b, self.a]]


@lru_cache(maxsize=None)
def fp2_generator(p):
    """First element of order p^2 - 1 in the order (a, b) lexicographic, b >= 1."""
    check_odd_prime(p)
    for b in range(1, p):
        for a in range(p):
            x = Fp2(a, b, p)
            if x.order() == p * p - 1:
                return x
    raise AssertionError("no generator found")
