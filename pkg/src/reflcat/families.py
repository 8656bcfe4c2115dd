"""Constructors for the irreducible orthogonal reflection groups over F_p."""
import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StructuralError
from .ff import check_odd_prime, fp2_generator, inv, is_square, nonsquare, root_of_unity, sqrt_mod_p
from .linalg import FpMatrix
from .matgroup import MatGroup, closure_elements, element_order, generated_by, reflections_in
from .meataxe import is_irreducible
from .quadspace import (QuadraticSpace, SquareClass, anisotropic_plane, discriminant, gram_det_class,
                        hyperbolic_plane, is_isometric, is_isometry, is_reflection, reflection,
                        standard_space, twist)
from . import roots

FAMILIES = ("A", "B", "D", "E6", "E7", "E8", "F4", "H3", "H4", "Abar", "I2", "O_full", "O1", "O2")
_ALIASES = {"O": "O_full"}


@dataclass(frozen=True)
class FamilySpec:
    family: str
    p: int
    n: int = None
    variant: tuple = ()

    def get(self, key, default=None):
        return dict(self.variant).get(key, default)

    def __str__(self):
        parts = []
        if self.n is not None:
            parts.append(("dim" if self.family in ("O_full", "O1", "O2") else "n", self.n))
        parts.append(("p", self.p))
        parts.extend(self.variant)
        return self.family + ":" + ",".join(f"{k}={v}" for k, v in parts)

    def label(self):
        """Short human-readable name such as A_{3,5} or O_2^-(2,5)."""
        f, p, n = self.family, self.p, self.n
        if f in ("A", "B", "D"):
            return f"{f}_{{{n},{p}}}"
        if f in ("E6", "E7", "E8", "F4"):
            return f"{f[0]}_{{{f[1]},{p}}}"
        if f in ("H3", "H4"):
            z = self.get("zeta")
            return f"H_{{{f[1]},{p}}}" + (f"^{z}" if z is not None else "")
        if f == "Abar":
            return f"Abar_{{{n},{p}}}"
        if f == "I2":
            return f"I_{{2,{p}}}({self.get('d')})^{self.get('sign')}"
        sign = ""
        if n % 2 == 0:
            sign = "^" + _witt_sign_of_spec(self)
        sub = {"O_full": "", "O1": "_1", "O2": "_2"}[f]
        return f"O{sub}{sign}({n},{p})"


def _witt_sign_of_spec(spec):
    return witt_sign_from_disc(spec.n, spec.p, spec.get("disc", "+"))


def witt_sign_from_disc(n, p, disc):
    """Witt type of the standard form of dimension n whose determinant has class disc."""
    d = 1 if disc == "+" else nonsquare(p)
    return "+" if is_square((-1) ** (n // 2) * d, p) else "-"


def disc_from_witt_sign(n, p, sign):
    for disc in "+-":
        if witt_sign_from_disc(n, p, disc) == sign:
            return disc


_SPEC_RE = re.compile(r"^([A-Za-z_0-9]+):(.*)$")


def parse_family_spec(text):
    """Parse strings like 'A:n=4,p=7', 'H3:p=11,zeta=4', 'I2:p=7,d=8,sign=-', 'O2:dim=3,p=5,disc=+'."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise StructuralError(f"cannot parse family spec {text!r}")
    family = _ALIASES.get(m.group(1), m.group(1))
    if family not in FAMILIES:
        raise StructuralError(f"unknown family {m.group(1)!r}")
    params = {}
    for part in filter(None, m.group(2).split(",")):
        if "=" not in part:
            raise StructuralError(f"bad parameter {part!r} in {text!r}")
        k, v = part.split("=", 1)
        params[k.strip()] = v.strip()
    try:
        p = int(params.pop("p"))
    except (KeyError, ValueError):
        raise StructuralError(f"family spec {text!r} needs an integer p") from None
    n = params.pop("n", params.pop("dim", None))
    n = int(n) if n is not None else None
    variant = {}
    for k, v in params.items():
        if k in ("zeta", "d"):
            variant[k] = int(v)
        elif k in ("sign", "disc", "witt"):
            if v not in "+-" or len(v) != 1:
                raise StructuralError(f"{k} must be + or -")
            variant[k] = v
        else:
            raise StructuralError(f"unknown parameter {k!r}")
    if family in ("O_full", "O1", "O2") and "witt" in variant:
        if n is None or n % 2:
            raise StructuralError("witt sign only applies in even dimension")
        variant["disc"] = disc_from_witt_sign(n, p, variant.pop("witt"))
    return FamilySpec(family, p, n, tuple(sorted(variant.items())))


@dataclass
class ConstructedGroup:
    spec: FamilySpec
    space: QuadraticSpace
    group: MatGroup
    expected_order: int = None
    expected_discriminant: SquareClass = None
    expected_irreducible: bool = True
    notes: dict = field(default_factory=dict)

    @property
    def generators(self):
        return self.group.generators

    def order(self):
        return self.group.order()


def _expected_orthogonal_order(n, p, sign=None):
    if n % 2:
        k = n // 2
        return 2 * p ** (k * k) * math.prod(p ** (2 * i) - 1 for i in range(1, k + 1))
    k = n // 2
    eps = 1 if sign == "+" else -1
    return 2 * p ** (k * (k - 1)) * (p ** k - eps) * math.prod(p ** (2 * i) - 1 for i in range(1, k))


def orthogonal_group_order(n, p, sign=None):
    """|O(n, p)| for odd n, |O^sign(n, p)| for even n."""
    return _expected_orthogonal_order(n, p, sign)


def _reduce_vec(v, p):
    return np.array([(x.numerator * inv(x.denominator, p)) % p for x in v], dtype=np.int64)


def build_coxeter(family, n, p):
    check_odd_prime(p)
    if family == "A" and n is not None and (n + 1) % p == 0:
        raise DomainError(f"A_{n} mod {p} is reducible since p | n+1; use Abar_{{{n - 1},{p}}} (needs p | n+2)")
    if family == "E6" and p == 3:
        raise DomainError("E6 mod 3 is reducible; its 5-dimensional quotient is O_2(5,3), build it as O2:dim=5,p=3")
    if family in ("E6", "E7", "E8", "F4"):
        n = None
    g, _scale = roots.integral_gram(family, n)
    space = QuadraticSpace(g, p)
    rk = len(g)
    gens = []
    for j in range(rk):
        e = np.zeros(rk, dtype=np.int64)
        e[j] = 1
        gens.append(reflection(space, e))
    spec = FamilySpec(family, p, rk if family in ("A", "B", "D") else None)
    det_q = _rational_det(roots.gram(family, n)) * _scale ** rk
    expected_disc = SquareClass.of(det_q.numerator * inv(det_q.denominator, p), p)
    return ConstructedGroup(spec, space, MatGroup(gens, space=space), roots.weyl_order(family, n if family in ("A", "B", "D") else None),
                            expected_disc)


def _rational_det(m):
    from fractions import Fraction
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        r = next((i for i in range(c, n) if a[i][c] != 0), None)
        if r is None:
            return Fraction(0)
        if r != c:
            a[c], a[r] = a[r], a[c]
            d = -d
        d *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def build_abar(n, p):
    """S_{n+2} on the quotient of the sum-zero hyperplane by the all-ones line."""
    check_odd_prime(p)
    if n <= 2:
        raise DomainError("Abar_{n,p} needs n > 2")
    if (n + 2) % p:
        raise DomainError(f"Abar_{{{n},{p}}} needs p | n+2")
    cart = np.array(roots.cartan("A", n), dtype=np.int64)
    space = QuadraticSpace(cart, p)
    axes = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    # v_{n+1} = -(n+1)^{-1} sum i v_i modulo the all-ones vector
    c = -inv(n + 1, p) % p
    last = np.array([c * (i + 1) % p for i in range(n)], dtype=np.int64)
    if space.Q(last) != 2 % p:
        raise AssertionError("induced norm of the last root should be 2")
    axes.append(last)
    gens = [reflection(space, a) for a in axes]
    spec = FamilySpec("Abar", p, n)
    return ConstructedGroup(spec, space, MatGroup(gens, space=space), math.factorial(n + 2),
                            SquareClass.of(n + 1, p))


def h_realizable(p):
    """Whether x^2 - 3x + 1 (the minimal polynomial of the golden-ratio root) splits over F_p."""
    return any((x * x - 3 * x + 1) % p == 0 for x in range(p))


def build_h(family, p, zeta=None):
    check_odd_prime(p)
    if family not in ("H3", "H4"):
        raise DomainError(f"unknown H family {family!r}")
    if not (p == 5 or (p > 5 and (p * p - 1) % 5 == 0)):
        raise DomainError(f"{family} is not realizable over F_{p}: need p = 5 or p^2 = 1 mod 5")
    if zeta is None:
        zeta = sqrt_mod_p(5, p)
    zeta %= p
    if zeta * zeta % p != 5 % p:
        raise DomainError(f"zeta={zeta} is not a square root of 5 mod {p}")
    a = (3 + zeta) * inv(2, p) % p
    assert (a * a - 3 * a + 1) % p == 0
    vecs = [(a, a - 1, -1), (-a, a - 1, 1), (1, -a, a - 1)]
    if family == "H4":
        vecs = [v + (0,) for v in vecs] + [(1, 0, -a, a - 1)]
    n = len(vecs[0])
    space = standard_space(n, p)
    R = np.array(vecs, dtype=np.int64) % p
    gens = [reflection(space, v) for v in R]
    # Gram of the generating roots rescaled so each root has norm 2
    q = space.Q(R[0])
    cox = R @ space.gram.a @ R.T % p * (2 * inv(q, p)) % p
    formula = (3 - zeta) % p if family == "H3" else (7 - 3 * zeta) * inv(2, p) % p
    notes = {
        "alpha": a,
        "zeta": zeta,
        "root_norm": q,
        "disc_ambient": discriminant(space).value,
        "disc_root_gram": gram_det_class(cox, p).value if np.any(cox) and _det_nonzero(cox, p) else "degenerate",
        "disc_formula_value": formula,
        "disc_formula": SquareClass.of(formula, p).value if formula else "degenerate",
        "root_gram": cox.tolist(),
    }
    spec = FamilySpec(family, p, None, (("zeta", zeta),))
    return ConstructedGroup(spec, space, MatGroup(gens, space=space), 120 if family == "H3" else 14400,
                            None, notes=notes)


def _det_nonzero(m, p):
    from .linalg import det_array
    return det_array(m, p) != 0


def h_discriminant(C):
    """Discriminant class of an H-family group under the root-Gram normalization."""
    return C.notes["disc_root_gram"]


def build_i2(p, d, sign):
    """Dihedral group of order 2d acting on the hyperbolic (+) or anisotropic (-) plane."""
    check_odd_prime(p)
    if sign not in ("+", "-", "plus", "minus"):
        raise DomainError(f"sign must be + or -, got {sign!r}")
    sign = "+" if sign in ("+", "plus") else "-"
    if d < 2:
        raise DomainError("d must be at least 2")
    if sign == "+":
        if (p - 1) % d:
            raise DomainError(f"d={d} must divide p-1={p - 1} on the hyperbolic plane")
        space = hyperbolic_plane(p)
        t = root_of_unity(d, p)
        rot = FpMatrix([[t, 0], [0, inv(t, p)]], p)
        tau = FpMatrix([[0, 1], [1, 0]], p)
    else:
        if (p + 1) % d:
            raise DomainError(f"d={d} must divide p+1={p + 1} on the anisotropic plane")
        space = anisotropic_plane(p)
        c = fp2_generator(p) ** ((p - 1) * (p + 1) // d)
        rot = FpMatrix(c.mult_matrix(), p)
        tau = FpMatrix([[1, 0], [0, -1]], p)
    gens = [tau, tau @ rot]
    spec = FamilySpec("I2", p, 2, (("d", d), ("sign", sign)))
    return ConstructedGroup(spec, space, MatGroup(gens, space=space), 2 * d, None,
                            expected_irreducible=d > 2)


def build_orthogonal(space, variant="full", cap=10**6):
    """O(V,Q) (all reflections) or the subgroup generated by reflections whose axis has
    square ('class1') or nonsquare ('class2') norm."""
    cls = {"full": "all", "class1": "square", "class2": "nonsquare"}.get(variant)
    if cls is None:
        raise DomainError(f"unknown orthogonal variant {variant!r}")
    _axes, refl = reflections_in(space, cls, cap)
    if not refl:
        raise DomainError("no reflections of the requested class")
    return generated_by(refl, space=space)


def orthogonal_space(n, p, disc="+"):
    return standard_space(n, p, "plus" if disc == "+" else "minus")


def build_orthogonal_family(family, n, p, disc="+"):
    """O_full, O1 or O2 on the standard form of dimension n and determinant class disc.

    In odd dimension O1 is the reflection-class subgroup containing -id; in even
    dimension O1 uses square-norm axes and O2 nonsquare-norm axes.
    """
    check_odd_prime(p)
    if n < 2:
        raise DomainError("orthogonal families need dimension >= 2")
    space = orthogonal_space(n, p, disc)
    sign = None if n % 2 else witt_sign_from_disc(n, p, disc)
    spec = FamilySpec(family, p, n, (("disc", disc),))
    if family == "O_full":
        G = build_orthogonal(space, "full")
        return ConstructedGroup(spec, space, G, orthogonal_group_order(n, p, sign), discriminant(space))
    if n % 2 == 0:
        G = build_orthogonal(space, "class1" if family == "O1" else "class2")
    else:
        g1 = build_orthogonal(space, "class1")
        g2 = build_orthogonal(space, "class2")
        if g1.contains_minus_identity() == g2.contains_minus_identity():
            raise AssertionError("exactly one reflection class should contain -id")
        with_center = g1 if g1.contains_minus_identity() else g2
        G = with_center if family == "O1" else (g2 if with_center is g1 else g1)
    return ConstructedGroup(spec, space, G, None, discriminant(space), expected_irreducible=None)


def build(spec):
    """Construct a group from a FamilySpec."""
    if isinstance(spec, str):
        spec = parse_family_spec(spec)
    f, p, n = spec.family, spec.p, spec.n
    check_odd_prime(p)
    if f in ("A", "B", "D"):
        if n is None:
            raise StructuralError(f"{f} needs n")
        return build_coxeter(f, n, p)
    if f in ("E6", "E7", "E8", "F4"):
        return build_coxeter(f, None, p)
    if f in ("H3", "H4"):
        return build_h(f, p, spec.get("zeta"))
    if f == "Abar":
        if n is None:
            raise StructuralError("Abar needs n")
        return build_abar(n, p)
    if f == "I2":
        if spec.get("d") is None or spec.get("sign") is None:
            raise StructuralError("I2 needs d and sign")
        return build_i2(p, spec.get("d"), spec.get("sign"))
    if n is None:
        raise StructuralError(f"{f} needs dim")
    return build_orthogonal_family(f, n, p, spec.get("disc", "+"))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    spec: str
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        return {"spec": self.spec, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks]}


def verify_family(C, seed=0):
    space, G = C.space, C.group
    checks = []
    bad = [i for i, g in enumerate(G.generators) if not is_reflection(space, g)]
    checks.append(Check("reflection_generators", not bad,
                        "all generators are reflective isometries" if not bad else f"generators {bad} fail"))
    irr = is_irreducible(G.generators, G.p, seed=seed)
    if C.expected_irreducible is None:
        checks.append(Check("irreducible", True, f"irreducible={irr.irreducible} (not predicted)"))
    else:
        checks.append(Check("irreducible", irr.irreducible == C.expected_irreducible,
                            f"irreducible={irr.irreducible}, expected {C.expected_irreducible}"))
    order = G.order()
    if C.expected_order is not None:
        checks.append(Check("order", order == C.expected_order, f"order {order}, expected {C.expected_order}"))
    else:
        checks.append(Check("order", True, f"order {order}"))
    disc = discriminant(space)
    if C.expected_discriminant is not None:
        checks.append(Check("discriminant", disc == C.expected_discriminant,
                            f"{disc.value}, expected {C.expected_discriminant.value}"))
    else:
        checks.append(Check("discriminant", True, disc.value))
    ok = True
    for s in G.generators:
        for t in G.generators:
            c = t @ s @ t.inverse()
            if not (is_reflection(space, c) and G.contains(c)):
                ok = False
    checks.append(Check("reflection_closure", ok, "conjugates of generators are reflections in G"))
    return VerificationReport(str(C.spec), checks)


def twisted_form(C, seed=0):
    """Same matrices on the form alpha*Q with alpha the least nonsquare."""
    if not is_irreducible(C.group.generators, C.group.p, seed=seed):
        raise DomainError("twisted forms are only defined for irreducible groups")
    alpha = nonsquare(C.space.p)
    space = twist(C.space, alpha)
    G = MatGroup(C.group.generators, space=space)
    exp_disc = None
    if C.expected_discriminant is not None:
        exp_disc = C.expected_discriminant * (SquareClass.NONSQUARE if space.dim % 2 else SquareClass.SQUARE)
    notes = dict(C.notes)
    notes["twist"] = alpha
    return ConstructedGroup(C.spec, space, G, C.expected_order, exp_disc, C.expected_irreducible, notes)


def equivariantly_isometric_to_twist(C, seed=0):
    """Whether the representation on (V,Q) is isometric, via a G-map, to (V, alpha Q).

    For absolutely irreducible G the only G-maps are scalars b, and b^2 Q = alpha Q
    has no solution for a nonsquare alpha.
    """
    from .meataxe import endo_algebra_dim
    if endo_algebra_dim(C.group.generators, C.group.p) != 1:
        raise DomainError("representation is not absolutely irreducible")
    return is_square(nonsquare(C.space.p), C.space.p)


def reflections_of_group(space, G):
    """Reflections of the ambient space that lie in G."""
    _axes, refl = reflections_in(space, "all")
    return [r for r in refl if G.contains(r)]


def order_fingerprint(elements, bound):
    return tuple(sorted(Counter(element_order(g, bound) for g in elements).items()))


def classify_rank2_bruteforce(p, sign):
    """All subgroups of O(2) generated by reflections, up to order fingerprint.

    Returns sorted tuples (order, is_irreducible, d) where d = order/2, after checking
    every irreducible one is dihedral with d dividing p-1 (+) or p+1 (-).
    """
    check_odd_prime(p)
    if p > 13:
        raise DomainError("brute-force rank-2 classification is limited to p <= 13")
    space = hyperbolic_plane(p) if sign in ("+", "plus") else anisotropic_plane(p)
    target = p - 1 if sign in ("+", "plus") else p + 1
    _axes, refl = reflections_in(space, "all")
    seen = {}
    frontier = []
    for r in refl:
        els = closure_elements([r])
        k = frozenset(e.key() for e in els)
        if k not in seen:
            seen[k] = ([r], els)
            frontier.append(k)
    while frontier:
        nxt = []
        for k in frontier:
            gens, _els = seen[k]
            for r in refl:
                if r.key() in k:
                    continue
                els = closure_elements(gens + [r])
                k2 = frozenset(e.key() for e in els)
                if k2 not in seen:
                    seen[k2] = (gens + [r], els)
                    nxt.append(k2)
        frontier = nxt
    out = {}
    for gens, els in seen.values():
        order = len(els)
        irr = bool(is_irreducible(gens, p))
        d = order // 2
        if irr:
            rots = [g for g in els if g.det() == 1]
            cyclic = any(element_order(g, order) == d for g in rots)
            if not (order % 2 == 0 and len(rots) == d and cyclic and target % d == 0):
                raise AssertionError(f"irreducible reflection subgroup of order {order} is not dihedral as predicted")
        fp = order_fingerprint(els, 2 * target)
        out[(fp, irr)] = (order, irr, d)
    return sorted(out.values())
