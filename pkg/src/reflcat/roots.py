"""Crystallographic root systems in their standard Euclidean realizations."""
import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import DomainError


@lru_cache(maxsize=None)
def _table():
    return json.loads(resources.files("reflcat").joinpath("data/roots.json").read_text())


def _unit(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def simple_roots(family, n=None):
    """Simple roots as tuples of Fractions in the ambient Euclidean space."""
    if family == "A":
        if n is None or n < 1:
            raise DomainError("A_n needs n >= 1")
        return [tuple(a - b for a, b in zip(_unit(n + 1, i), _unit(n + 1, i + 1))) for i in range(n)]
    if family == "B":
        if n is None or n < 2:
            raise DomainError("B_n needs n >= 2")
        out = [tuple(a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))) for i in range(n - 1)]
        return out + [tuple(_unit(n, n - 1))]
    if family == "D":
        if n is None or n < 4:
            raise DomainError("D_n needs n >= 4")
        out = [tuple(a - b for a, b in zip(_unit(n, i), _unit(n, i + 1))) for i in range(n - 1)]
        return out + [tuple(a + b for a, b in zip(_unit(n, n - 2), _unit(n, n - 1)))]
    if family in ("E6", "E7", "E8", "F4"):
        entry = _table()[family]
        return [tuple(Fraction(x, r["den"]) for x in r["num"]) for r in entry["simple_roots"]]
    raise DomainError(f"unknown crystallographic family {family!r}")


def rank(family, n=None):
    return len(simple_roots(family, n))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def reflect(v, a):
    c = 2 * dot(v, a) / dot(a, a)
    return tuple(x - c * y for x, y in zip(v, a))


def root_system(family, n=None):
    """All roots: the orbit of the simple roots under the simple reflections."""
    simple = simple_roots(family, n)
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for a in simple:
                w = reflect(v, a)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)


def gram(family, n=None):
    """Rational Gram matrix B(alpha_i, alpha_j) of the simple roots."""
    s = simple_roots(family, n)
    return [[dot(a, b) for b in s] for a in s]


def integral_gram(family, n=None):
    """Gram matrix scaled by the least positive integer making it integral."""
    g = gram(family, n)
    scale = 1
    for row in g:
        for x in row:
            scale = scale * x.denominator // _gcd(scale, x.denominator)
    return [[int(x * scale) for x in row] for row in g], scale


def cartan(family, n=None):
    s = simple_roots(family, n)
    return [[int(2 * dot(a, b) / dot(b, b)) for b in s] for a in s]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


WEYL_ORDERS = {"E6": 51840, "E7": 2903040, "E8": 696729600, "F4": 1152}


def weyl_order(family, n=None):
    from math import factorial
    if family == "A":
        return factorial(n + 1)
    if family == "B":
        return 2 ** n * factorial(n)
    if family == "D":
        return 2 ** (n - 1) * factorial(n)
    return WEYL_ORDERS[family]
