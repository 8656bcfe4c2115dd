"""Tables of reflection groups, their H^2 and the resulting reflection fusion categories.

Every row records where its numbers came from: ``chain`` (Schreier-Sims order),
``formula`` (closed-form order), and the cohomology method returned by
:func:`reflcat.cohomology.h2_natural`.  Rows outside the requested tier are
filled from formulas and published lemmas only.
"""
import json
import math

from .cohomology import DEFAULT_BUDGET, h2_natural
from .errors import StructuralError
from .families import FamilySpec, build, parse_family_spec, h_realizable, orthogonal_group_order, witt_sign_from_disc
from .ff import check_odd_prime, is_prime, sqrt_mod_p
from .meataxe import is_irreducible
from . import roots

SCHEMA_VERSION = 1
TIERS = ("fast", "full", "stretch")
TABLES = ("classification", "coxeter", "h2", "families")

# published non-trivial H^2(G, V): (family, dim, p or None for any p > 3, disc) -> dim of H^2
PUBLISHED_H2 = {
    ("O2", 3, None): 1,
    ("O2", 5, 3): 1,
    ("O2", 7, 3): 1,
    ("O2", 8, 3): 2,
}

_COXETER_ORDER = ("A", "B", "D", "E6", "E7", "E8", "F4", "H3", "H4", "I2", "Abar", "O_full", "O1", "O2")


def in_tier(p, dim, tier):
    if tier not in TIERS:
        raise StructuralError(f"unknown tier {tier!r}")
    if tier == "fast":
        return p <= 7 and dim <= 3
    if tier == "full":
        return p <= 13 and dim <= 4
    return True


def parse_primes(text):
    """'5', '3,5,7' or '3-13' to a sorted list of odd primes."""
    out = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.update(q for q in range(max(lo, 3), hi + 1) if is_prime(q))
            else:
                q = int(part)
                check_odd_prime(q)
                out.add(q)
        except ValueError as exc:
            raise StructuralError(f"bad prime list {text!r}: {exc}") from None
    if not out:
        raise StructuralError(f"no odd primes in {text!r}")
    return sorted(out)


def _spec(family, p, n=None, **variant):
    return FamilySpec(family, p, n, tuple(sorted(variant.items())))


def _dim_of(spec):
    f = spec.family
    if f in ("E6", "E7", "E8"):
        return int(f[1])
    if f == "F4":
        return 4
    if f in ("H3", "H4"):
        return int(f[1])
    if f == "I2":
        return 2
    return spec.n


def admissible_specs(p, max_dim):
    """Families from the final classification whose conditions hold at p, dim <= max_dim."""
    specs = []
    for n in range(1, max_dim + 1):
        if (n + 1) % p:
            specs.append(_spec("A", p, n))
    specs += [_spec("B", p, n) for n in range(3, max_dim + 1)]
    specs += [_spec("D", p, n) for n in range(4, max_dim + 1)]
    for fam, dim in (("E6", 6), ("E7", 7), ("E8", 8), ("F4", 4)):
        if dim <= max_dim and not (fam == "E6" and p == 3):
            specs.append(_spec(fam, p))
    if max_dim >= 2:
        for sign, m in (("+", p - 1), ("-", p + 1)):
            specs += [_spec("I2", p, None, d=d, sign=sign) for d in range(3, m + 1) if m % d == 0]
    if p > 5 and h_realizable(p):
        z = sqrt_mod_p(5, p)
        for fam, dim in (("H3", 3), ("H4", 4)):
            if dim <= max_dim:
                specs += [_spec(fam, p, None, zeta=zz) for zz in sorted({z, p - z})]
    specs += [_spec("Abar", p, n) for n in range(3, max_dim + 1) if (n + 2) % p == 0]
    for n in range(2, max_dim + 1):
        discs = ("+",) if n % 2 else ("+", "-")
        for fam in ("O_full", "O1", "O2"):
            for disc in discs:
                specs.append(_spec(fam, p, n, disc=disc))
    return specs


def _formula_order(spec):
    f, p, n = spec.family, spec.p, spec.n
    if f in ("A", "B", "D"):
        return roots.weyl_order(f, n)
    if f in ("E6", "E7", "E8", "F4"):
        return roots.weyl_order(f)
    if f == "H3":
        return 120
    if f == "H4":
        return 14400
    if f == "I2":
        return 2 * spec.get("d")
    if f == "Abar":
        return math.factorial(n + 2)
    sign = None if n % 2 else witt_sign_from_disc(n, p, spec.get("disc", "+"))
    full = orthogonal_group_order(n, p, sign)
    if f == "O_full":
        return full
    if n == 2:
        return p - 1 if sign == "+" else p + 1
    return full // 2


def _formula_irreducible(spec):
    f, p, n = spec.family, spec.p, spec.n
    if n == 2 and f in ("O_full", "O1", "O2"):
        sign = witt_sign_from_disc(n, p, spec.get("disc", "+"))
        d = (p - 1 if sign == "+" else p + 1) // (1 if f == "O_full" else 2)
        return d >= 3
    if f in ("O1", "O2") and n == 3 and p == 3:
        # one class generates the diagonal (C_2)^3
        return None
    return True


def _published_h2(spec):
    f, p, n = spec.family, spec.p, spec.n
    if f != "O2":
        return 0
    if n == 3 and p > 3:
        return PUBLISHED_H2[("O2", 3, None)]
    if p == 3 and n in (5, 7):
        return PUBLISHED_H2[("O2", n, 3)]
    if p == 3 and n == 8 and witt_sign_from_disc(n, p, spec.get("disc", "+")) == "-":
        return PUBLISHED_H2[("O2", 8, 3)]
    return 0


def _h2_text(dim, p):
    if dim is None:
        return "unresolved"
    if dim == 0:
        return "0"
    return f"F_{p}" if dim == 1 else f"F_{p}^{dim}"


def _extensions(h2dim, p):
    if h2dim is None:
        return "unresolved"
    if h2dim == 0:
        return "unique up to twisting"
    return f"torsor over {_h2_text(h2dim, p)}"


def _note(spec, computed, published):
    if computed is None:
        return f"no desk-scale method applies; published H^2 = {_h2_text(published, spec.p)}"
    if computed == published:
        return ""
    return f"published H^2 = {_h2_text(published, spec.p)}; computed {_h2_text(computed, spec.p)}"


def group_row(spec, tier="fast", seed=0, memory_budget=DEFAULT_BUDGET):
    """One classification row, or None when the group is reducible."""
    p = spec.p
    dim = _dim_of(spec)
    published = _published_h2(spec)
    if in_tier(p, dim, tier):
        C = build(spec)
        G = C.group
        order = G.order()
        if C.expected_order is not None and order != C.expected_order:
            status, order_source = "failed", "chain"
        else:
            status, order_source = "verified", "chain"
        irr = bool(is_irreducible(G.generators, p, seed=seed))
        if not irr:
            return None
        h2, method = h2_natural(G, memory_budget=memory_budget)
        if h2 is None and status == "verified":
            status = "unresolved"
    else:
        irr = _formula_irreducible(spec)
        if irr is False:
            return None
        order, order_source = _formula_order(spec), "formula"
        h2, method = published, "published"
        status = "formula-only"
        note = f"published value, not recomputed in tier {tier}"
        if (spec.family, dim, p) in (("O2", 5, 3), ("O2", 7, 3), ("O2", 8, 3)) and published:
            status = "unresolved"
    label = spec.label()
    ext = _extensions(h2, p)
    if status == "unresolved" and method == "published":
        ext = "unresolved"
    return {
        "family": label,
        "spec": str(spec),
        "p": p,
        "dim": dim,
        "order": order,
        "order_source": order_source,
        "irreducible": irr,
        "h2": _h2_text(h2, p),
        "h2_published": _h2_text(published, p),
        "h2_method": method,
        "extensions": ext,
        "status": status,
        "note": note if method == "published" else _note(spec, h2, published),
    }


def _sort_key(row):
    spec = parse_family_spec(row["spec"])
    params = tuple((k, (0, v) if isinstance(v, int) else (1, v)) for k, v in spec.variant)
    return (row["p"], row["dim"], _COXETER_ORDER.index(spec.family), spec.n or 0, params)


def classification_report(p, max_dim, tier="fast", seed=0, memory_budget=DEFAULT_BUDGET):
    """Rows of the classification of irreducible reflection fusion categories up to twisting."""
    primes = p if isinstance(p, (list, tuple)) else [p]
    rows = []
    for q in primes:
        check_odd_prime(q)
        for spec in admissible_specs(q, max_dim):
            row = group_row(spec, tier, seed, memory_budget)
            if row is not None:
                rows.append(row)
    rows.sort(key=_sort_key)
    return _report("classification", primes, max_dim, tier, seed, rows)


def coxeter_table(p, max_dim, tier="fast", seed=0):
    """Coxeter-type rows (reductions of finite Coxeter groups) with their conditions at p."""
    primes = p if isinstance(p, (list, tuple)) else [p]
    rows = []
    for q in primes:
        for spec in admissible_specs(q, max_dim):
            if spec.family in ("Abar", "O_full", "O1", "O2"):
                continue
            dim = _dim_of(spec)
            if in_tier(q, dim, tier):
                C = build(spec)
                order, src = C.group.order(), "chain"
                status = "verified" if order == C.expected_order else "failed"
            else:
                order, src, status = _formula_order(spec), "formula", "formula-only"
            rows.append({
                "family": spec.label(), "spec": str(spec), "p": q, "dim": dim,
                "condition": _condition(spec), "order": order, "order_source": src,
                "coprime": order % q != 0, "status": status,
            })
    rows.sort(key=_sort_key)
    return _report("coxeter", primes, max_dim, tier, seed, rows)


def _condition(spec):
    f, p, n = spec.family, spec.p, spec.n
    if f == "A":
        return f"p does not divide n+1 = {n + 1}"
    if f == "E6":
        return "p != 3"
    if f in ("H3", "H4"):
        return f"p > 5 and p^2-1 = {p * p - 1} = 0 mod 5"
    if f == "I2":
        d, s = spec.get("d"), spec.get("sign")
        return f"d = {d} divides p{'-' if s == '+' else '+'}1 = {p - 1 if s == '+' else p + 1}"
    return "none"


def h2_table(p, max_dim, tier="fast", seed=0, memory_budget=DEFAULT_BUDGET):
    """Groups with a published non-trivial H^2(G, V), next to the computed value."""
    primes = p if isinstance(p, (list, tuple)) else [p]
    rows = []
    for q in primes:
        cands = []
        if q > 3 and max_dim >= 3:
            cands.append(_spec("O2", q, 3, disc="+"))
        if q == 3:
            cands += [_spec("O2", 3, n, disc="+") for n in (5, 7) if n <= max_dim]
            if max_dim >= 8:
                from .families import disc_from_witt_sign
                cands.append(_spec("O2", 3, 8, disc=disc_from_witt_sign(8, 3, "-")))
        for spec in cands:
            published = _published_h2(spec)
            dim = spec.n
            if in_tier(q, dim, tier):
                h2, method = h2_natural(build(spec).group, memory_budget=memory_budget)
                status = "unresolved" if h2 is None else "verified"
            else:
                h2, method, status = None, "not computed", "unresolved"
            rows.append({
                "family": spec.label(), "spec": str(spec), "p": q, "dim": dim,
                "h2_published": _h2_text(published, q), "h2_computed": _h2_text(h2, q),
                "h2_method": method, "agrees": None if h2 is None else h2 == published,
                "status": status,
            })
    rows.sort(key=_sort_key)
    return _report("h2", primes, max_dim, tier, seed, rows)


def families_table(p, max_dim, tier="fast", seed=0):
    """Every family parameter in range with its admissibility verdict, including rejections."""
    primes = p if isinstance(p, (list, tuple)) else [p]
    rows = []
    for q in primes:
        cands = [_spec("A", q, n) for n in range(1, max_dim + 1)]
        cands += [_spec("Abar", q, n) for n in range(3, max_dim + 1)]
        cands += [_spec(f, q) for f, d in (("E6", 6), ("E7", 7), ("E8", 8), ("F4", 4)) if d <= max_dim]
        cands += [_spec(f, q) for f, d in (("H3", 3), ("H4", 4)) if d <= max_dim]
        cands += [_spec("B", q, n) for n in range(3, max_dim + 1)]
        cands += [_spec("D", q, n) for n in range(4, max_dim + 1)]
        for spec in cands:
            ok, reason = _admissibility(spec)
            rows.append({"family": spec.label(), "spec": str(spec), "p": q, "dim": _dim_of(spec),
                         "admissible": ok, "reason": reason,
                         "status": "formula-only"})
    rows.sort(key=_sort_key)
    return _report("families", primes, max_dim, tier, seed, rows)


def _admissibility(spec):
    f, p, n = spec.family, spec.p, spec.n
    if f == "A":
        if (n + 1) % p == 0:
            return False, f"p = {p} divides n+1 = {n + 1}"
        return True, f"p = {p} does not divide n+1 = {n + 1}"
    if f == "Abar":
        if (n + 2) % p:
            return False, f"p = {p} does not divide n+2 = {n + 2}"
        return True, f"p = {p} divides n+2 = {n + 2}"
    if f == "E6" and p == 3:
        return False, "E6 mod 3 is reducible"
    if f in ("H3", "H4"):
        r = (p * p - 1) % 5
        if p <= 5:
            return False, f"p = {p} is not > 5"
        if r:
            return False, f"{p}^2-1 = {p * p - 1} is {r} mod 5, not 0"
        return True, f"{p}^2-1 = {p * p - 1} = 0 mod 5"
    return True, "no condition"


def _report(table, primes, max_dim, tier, seed, rows):
    return {
        "schema_version": SCHEMA_VERSION,
        "table": table,
        "inputs": {"p": list(primes), "max_dim": max_dim, "tier": tier, "seed": seed},
        "rows": rows,
    }


def emit_tables(which, p, max_dim, tier="fast", seed=0, memory_budget=DEFAULT_BUDGET):
    if which == "classification":
        return classification_report(p, max_dim, tier, seed, memory_budget)
    if which == "coxeter":
        return coxeter_table(p, max_dim, tier, seed)
    if which == "h2":
        return h2_table(p, max_dim, tier, seed, memory_budget)
    if which == "families":
        return families_table(p, max_dim, tier, seed)
    raise StructuralError(f"unknown table {which!r}")


def to_json(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


_COLUMNS = {
    "classification": ("family", "dim", "order", "order_source", "irreducible", "h2", "h2_method",
                       "extensions", "status", "note"),
    "coxeter": ("family", "dim", "condition", "order", "order_source", "coprime", "status"),
    "h2": ("family", "dim", "h2_published", "h2_computed", "h2_method", "agrees", "status"),
    "families": ("family", "dim", "admissible", "reason", "status"),
}


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v).replace("|", "\\|")


def to_markdown(report):
    cols = _COLUMNS[report["table"]]
    inp = report["inputs"]
    primes = ",".join(str(q) for q in inp["p"])
    lines = [f"# {report['table']} (p = {primes}, max dim {inp['max_dim']}, tier {inp['tier']})", ""]
    lines.append("| " + " | ".join(cols) + " |")
    lines.append("|" + "|".join("---" for _ in cols) + "|")
    for row in report["rows"]:
        lines.append("| " + " | ".join(_cell(row.get(c)) for c in cols) + " |")
    return "\n".join(lines) + "\n"
