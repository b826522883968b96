"""Irreducible restriction characters, Levi reduction, the degree-one
character families, tensor factorization, and the fully-decomposable scan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .lattice import FormalCharacter, QuasiLattice, Weight, vec
from .linalg import mat, solve
from .quasi import (DiagramAutomorphism, QuasiRootSystem, diagram_automorphisms,
                    from_diagram_automorphism, restriction_data)
from .rootsys import RootSystem, build_root_system, disjoint_union


@dataclass(frozen=True)
class RestrictionJob:
    base: RootSystem
    theta: DiagramAutomorphism
    lam: tuple

    def __post_init__(self):
        if not self.base.is_dominant_integral(tuple(vec(self.lam))):
            raise ValueError("highest weight is not dominant integral")


def restriction_character(job: RestrictionJob, dim_cap: int | None = None) -> FormalCharacter:
    """Restriction of the irreducible character to the fixed subtorus."""
    base, theta = job.base, job.theta
    ch = base.irreducible_character(tuple(vec(job.lam)), dim_cap=dim_cap)
    orbits, r, gram = restriction_data(theta)
    lat = QuasiLattice(len(orbits), 1, gram)
    terms: dict[Weight, Fraction] = {}
    for w, c in ch.terms.items():
        key = lat.weight(r(w.free))
        terms[key] = terms.get(key, Fraction(0)) + c
    return FormalCharacter(lat, terms)


def restricted_simple_system(job: RestrictionJob):
    """Simple system of the non-divisible restricted roots, in the positivity
    induced by the base positive system."""
    base, theta = job.base, job.theta
    orbits, r, gram = restriction_data(theta)
    zero = tuple(Fraction(0) for _ in orbits)
    r_pos = {tuple(r(a)) for a in base.positive}
    r_pos.discard(zero)
    nd_pos = [a for a in r_pos if tuple(x / 2 for x in a) not in r_pos]
    simple = []
    nd_set = set(nd_pos)
    for a in nd_pos:
        if not any(
            tuple(x - y for x, y in zip(a, b)) in nd_set for b in nd_pos if b != a
        ):
            simple.append(a)
    return sorted(simple)


def levi_reduce(job: RestrictionJob, index_set, dim_cap: int | None = None):
    """Both sides of the Levi reduction equality.

    Returns (filtered, levi) where `filtered` keeps the terms of the full
    restriction character whose depth support lies in the chosen simple
    restricted roots, and `levi` is the independently computed restriction
    character of the Levi subsystem.
    """
    base, theta = job.base, job.theta
    orbits, r, gram = restriction_data(theta)
    lat = QuasiLattice(len(orbits), 1, gram)
    simple = restricted_simple_system(job)
    chosen = set(index_set)
    full = restriction_character(job, dim_cap=dim_cap)
    lam_bar = tuple(r(tuple(vec(job.lam))))
    basis = mat([[s[i] for s in simple] for i in range(len(orbits))])

    def support(weight: Weight):
        diff = [l - x for l, x in zip(lam_bar, weight.free)]
        sol = solve(basis, diff)
        if sol is None:
            return None
        return {i for i, c in enumerate(sol) if c != 0}

    filtered_terms = {}
    for w, c in full.terms.items():
        sup = support(w)
        if sup is not None and sup <= chosen:
            filtered_terms[w] = c
    filtered = FormalCharacter(lat, filtered_terms)

    # independent side: the character of the base Levi subsystem with the same
    # highest weight, restricted
    span_idx = [simple[i] for i in sorted(chosen)]
    levi_roots = set()
    for a in base.roots:
        ra = tuple(r(a))
        if all(x == 0 for x in ra):
            continue
        sol = solve(basis, list(ra))
        if sol is None:
            continue
        sup = {i for i, c in enumerate(sol) if c != 0}
        if sup <= chosen:
            levi_roots.add(a)
    if not levi_roots:
        levi = FormalCharacter.monomial(lat, lat.weight(lam_bar))
    else:
        sub = RootSystem(levi_roots)
        ch = sub.irreducible_character(tuple(vec(job.lam)), dim_cap=dim_cap)
        terms: dict[Weight, Fraction] = {}
        for w, c in ch.terms.items():
            key = lat.weight(r(w.free))
            terms[key] = terms.get(key, Fraction(0)) + c
        levi = FormalCharacter(lat, terms)
    return filtered, levi


# ---------------------------------------------------------------------------
# the degree one family
# ---------------------------------------------------------------------------


def tau(a: int, lattice: QuasiLattice | None = None) -> FormalCharacter:
    """String character of length a+1 with weights a/2 - j."""
    if a < 0:
        raise ValueError("nonnegative parameter required")
    lat = lattice or QuasiLattice.standard(1)
    return FormalCharacter(
        lat, {lat.weight([Fraction(a, 2) - j]): Fraction(1) for j in range(a + 1)}
    )


def tau_ab(a: int, b: int, lattice: QuasiLattice | None = None) -> FormalCharacter:
    lat = lattice or QuasiLattice.standard(1)
    return tau(a, lat) * tau(b, lat)


def _mk(a: int, b: int, k: int) -> int:
    """Multiplicity of the (2a+2b-2k)-string in the two-parameter character."""
    if a < b:
        a, b = b, a
    if k < 0 or k > a + b:
        return 0
    if k % 2 == 0:
        j = k // 2
        fb, fa = b // 2, a // 2
        if 0 <= j <= fb:
            return j + 1
        if fb <= j <= fa:
            return fb + 1
        if fa <= j <= fa + fb:
            return fa + fb - j + 1
        return 0
    i = (k - 1) // 2
    fb, fa = (b - 1) // 2, (a - 1) // 2
    if fb < 0 or fa < 0:
        return 0
    if 0 <= i <= fb:
        return i + 1
    if fb <= i <= fa:
        return fb + 1
    if fa <= i <= fa + fb:
        return fa + fb - i + 1
    return 0


def tau_prime(a: int, b: int, lattice: QuasiLattice | None = None) -> FormalCharacter:
    """Closed-form expansion sum_k m_k tau_{2a+2b-2k}."""
    if a < 0 or b < 0:
        raise ValueError("nonnegative parameters required")
    lat = lattice or QuasiLattice.standard(1)
    out = FormalCharacter.zero(lat)
    for k in range(a + b + 1):
        m = _mk(a, b, k)
        if m:
            out = out + tau(2 * a + 2 * b - 2 * k, lat).scale(m)
    return out


def tau_family(kind: str, *params, lattice: QuasiLattice | None = None) -> FormalCharacter:
    if kind == "tau":
        return tau(int(params[0]), lattice)
    if kind == "tau_ab":
        return tau_ab(int(params[0]), int(params[1]), lattice)
    if kind == "tau_prime":
        return tau_prime(int(params[0]), int(params[1]), lattice)
    raise ValueError(f"unknown family {kind!r}")


def tau_prime_bruteforce(a: int, b: int) -> FormalCharacter:
    """Independent route: restrict the rank-two unitary character directly."""
    base = build_root_system("A", 2)
    flip = next(p for p in diagram_automorphisms(base) if p != (0, 1))
    theta = DiagramAutomorphism(base, flip, 2)
    lam = base.dominantize((Fraction(a), Fraction(0), Fraction(-b)))
    return restriction_character(RestrictionJob(base, theta, lam))


# ---------------------------------------------------------------------------
# tensor factorization
# ---------------------------------------------------------------------------


def char_support(ch: FormalCharacter) -> tuple[int, ...]:
    """Indices of coordinates on which the character actually depends."""
    idx = set()
    for w in ch.terms:
        for i, x in enumerate(w.free):
            if x != 0:
                idx.add(i)
    return tuple(sorted(idx))


def _project(w: Weight, idx) -> tuple:
    return tuple(w.free[i] for i in idx)


def _rank_one_split(chunk: dict, left: tuple[int, ...], right: tuple[int, ...]):
    """Factor the coefficient table across the index bipartition, or None.

    chunk maps full coordinate tuples to coefficients; left/right hold the
    positions within those tuples.
    """
    rows: dict[tuple, dict[tuple, Fraction]] = {}
    for coords, c in chunk.items():
        lkey = tuple(coords[i] for i in left)
        rkey = tuple(coords[i] for i in right)
        rows.setdefault(lkey, {})[rkey] = c
    row_keys = sorted(rows)
    base_row = rows[row_keys[0]]
    for rk in row_keys:
        if set(rows[rk]) != set(base_row):
            return None
    pivot = sorted(base_row)[0]
    base_val = base_row[pivot]
    left_coeffs = {}
    for rk in row_keys:
        ratio = rows[rk][pivot] / base_val
        left_coeffs[rk] = rows[rk][pivot]
        for ck, v in base_row.items():
            if rows[rk][ck] != ratio * v:
                return None
    return left_coeffs, dict(base_row)


def maximal_decomposition(ch: FormalCharacter):
    """Finest tensor factorization over the coordinate support.

    Returns (scalar, factors) with factors a list of (index tuple, character
    on a standard lattice of that rank); each factor is normalized to have
    canonically-leading coefficient one and the global scalar carries the
    rest.  Unique up to scalars: the support partition is determined by which
    bipartition coefficient tables have rank one.
    """
    support = char_support(ch)
    if not support:
        raise ValueError("no decomposition of a scalar")

    def rec(idx: tuple[int, ...], chunk: dict) -> list[tuple[tuple[int, ...], dict]]:
        n = len(idx)
        if n == 1:
            return [(idx, chunk)]
        for mask in range(0, 1 << (n - 1)):
            # position 0 always goes left; other positions by mask bits
            left_pos = tuple([0] + [i for i in range(1, n) if (mask >> (i - 1)) & 1])
            right_pos = tuple(i for i in range(n) if i not in left_pos)
            if not right_pos:
                continue
            split = _rank_one_split(chunk, left_pos, right_pos)
            if split is None:
                continue
            lc, rc = split
            return rec(tuple(idx[i] for i in left_pos), lc) + rec(
                tuple(idx[i] for i in right_pos), rc
            )
        return [(idx, chunk)]

    chunk0 = {_project(w, support): c for w, c in ch.terms.items()}
    raw = rec(support, chunk0)
    scalar = Fraction(1)
    factors = []
    for idx, assignments in raw:
        lat = QuasiLattice.standard(len(idx))
        f = FormalCharacter(lat, {lat.weight(list(k)): v for k, v in assignments.items()})
        lead = f.sorted_terms()[-1][1]
        factors.append((idx, f.scale(Fraction(1) / lead)))
    # the global scalar is fixed by any single term of ch
    probe_w, probe_c = next(iter(ch.terms.items()))
    prod = Fraction(1)
    for idx, f in factors:
        key = _project(probe_w, idx)
        prod *= {tuple(w.free): c for w, c in f.terms.items()}[key]
    scalar = probe_c / prod
    return scalar, factors


# ---------------------------------------------------------------------------
# fully decomposable scan
# ---------------------------------------------------------------------------


def _nonincreasing_tuples(k: int, bound: Fraction, half: bool):
    """Dominant coordinate tuples for a length-k fixed-spin family."""
    values = []
    top = int(2 * bound)
    for twice in range(top, -1, -1):
        if half and twice % 2 == 1:
            values.append(Fraction(twice, 2))
        if not half and twice % 2 == 0:
            values.append(Fraction(twice, 2))

    def rec(i, prev):
        if i == k:
            yield ()
            return
        for v in values:
            if v <= prev:
                for rest in rec(i + 1, v):
                    yield (v,) + rest

    yield from rec(0, Fraction(top, 2) + 1)


def _factor_candidates(kind: str, k: int, bound: int):
    """(label, highest-weight choices, restriction map) per irreducible factor type.

    The restriction maps land in the standard coordinates of the ambient block.
    """
    B = Fraction(bound)
    if kind == "B":
        rs = build_root_system("B", k)
        lams = []
        for half in (False, True):
            for t in _nonincreasing_tuples(k, B, half):
                lams.append(t)
        return rs, lams, (lambda mu: mu), None
    if kind == "B2x":  # two commuting copies folded: B_k^{(2)}
        rs = disjoint_union([build_root_system("B", k), build_root_system("B", k)])
        lams = []
        for half1 in (False, True):
            for t1 in _nonincreasing_tuples(k, B, half1):
                for half2 in (False, True):
                    for t2 in _nonincreasing_tuples(k, B, half2):
                        lams.append(t1 + t2)
        return rs, lams, (lambda mu: tuple(mu[i] + mu[k + i] for i in range(k))), None
    if kind == "B21":  # B_k^{(2,1)} from the rank-(k+1) even orthogonal flip
        rs = build_root_system("D", k + 1)
        lams = []
        for half in (False, True):
            for t in _nonincreasing_tuples(k + 1, B, half):
                lams.append(t)
                if t[-1] != 0:
                    lams.append(t[:-1] + (-t[-1],))
        return rs, lams, (lambda mu: mu[:k]), None
    if kind == "BC":  # BC_k^{(2,2,1)} from the odd unitary flip
        n = 2 * k + 1
        rs = build_root_system("A", n - 1)
        lams = []
        for t in _tuples_a(n, bound):
            lams.append(tuple(Fraction(x) for x in t))
        return rs, lams, (lambda mu: tuple(mu[i] - mu[n - 1 - i] for i in range(k))), None
    raise ValueError(kind)


def _tuples_a(n: int, bound: int):
    """Nonincreasing integer tuples in [-bound, bound]^n, centered reps."""
    rng = list(range(bound, -bound - 1, -1))

    def rec(i, prev):
        if i == n:
            yield ()
            return
        for v in rng:
            if v <= prev:
                for rest in rec(i + 1, v):
                    yield (v,) + rest

    for t in rec(0, bound + 1):
        # normalize the central shift: fix the sum into [0, n)
        s = sum(t)
        if 0 <= s < n:
            yield t


def _theta_for(kind: str, rs: RootSystem, k: int) -> DiagramAutomorphism:
    if kind == "B":
        return DiagramAutomorphism(rs, tuple(range(len(rs.simple))), 1)
    if kind == "B2x":
        perm = [None] * len(rs.simple)
        for i, a in enumerate(rs.simple):
            if any(a[:k]):
                partner = tuple(Fraction(0) for _ in range(k)) + a[:k]
            else:
                partner = a[k:] + tuple(Fraction(0) for _ in range(k))
            perm[i] = rs.simple.index(partner)
        return DiagramAutomorphism(rs, tuple(perm), 2)
    if kind == "B21":
        # the coordinate involution negating the last coordinate swaps the
        # two fork simple roots and fixes the rest
        perm = []
        for a in rs.simple:
            img = tuple(list(a[:-1]) + [-a[-1]])
            perm.append(rs.simple.index(img))
        return DiagramAutomorphism(rs, tuple(perm), 2)
    if kind == "BC":
        # the unitary flip e_i -> -e_{n+1-i} reverses the simple chain
        n = rs.dim
        perm = []
        for a in rs.simple:
            img = tuple(-a[n - 1 - i] for i in range(n))
            perm.append(rs.simple.index(img))
        return DiagramAutomorphism(rs, tuple(perm), 2)
    raise ValueError(kind)


def _self_dual(kind: str, rs: RootSystem, theta: DiagramAutomorphism, lam) -> bool:
    """theta lambda = -w_l lambda, evaluated per family.

    Odd orthogonal and unitary-flip representations are automatically
    self-dual in the required sense; the doubled family needs equal halves
    and the even orthogonal flip needs an even block or zero last coordinate.
    """
    lam = tuple(vec(lam))
    if kind in ("B", "BC"):
        return True
    if kind == "B2x":
        k = len(lam) // 2
        return lam[:k] == lam[k:]
    if kind == "B21":
        k = len(lam) - 1
        return (k % 2 == 0) or lam[-1] == 0
    raise ValueError(kind)


FACTOR_KINDS = {
    "B": ("B", lambda k: f"B{k}"),
    "B2x": ("B2x", lambda k: f"B{k}^(2)"),
    "B21": ("B21", lambda k: f"B{k}^(2,1)"),
    "BC": ("BC", lambda k: f"BC{k}^(2,2,1)" if k > 1 else "BC1^(2,1)"),
}


def fully_decomposable_scan(psi_type: str, m: int, bound: int,
                            require_self_dual: bool = False,
                            require_odd_dim: bool = False,
                            dim_cap: int = 200000) -> list[dict]:
    """Scan quasi subsystems and bounded highest weights for tensor-power
    restriction characters chi = chi_0^{(x) m} with a degree-one chi_0.

    psi_type "B" scans inside the doubled odd orthogonal ambient system,
    "BC" inside the reduced doubled non-reduced ambient.  Filters implement
    the self-duality and odd-dimension side conditions.
    """
    if psi_type not in ("B", "BC"):
        raise ValueError("psi_type must be 'B' or 'BC'")
    if m > 3 or bound > 4:
        raise ValueError("scan caps exceeded (m <= 3, bound <= 4)")
    allowed = ["B", "B2x", "B21"] + (["BC"] if psi_type == "BC" else [])
    results = []
    seen = set()
    for partition in _partitions(list(range(m))):
        sizes = [len(b) for b in partition]
        for kinds in iproduct(allowed, repeat=len(partition)):
            factor_data = []
            ok = True
            for kind, k in zip(kinds, sizes):
                if kind == "B21" and k == 1:
                    ok = False  # rank-one even orthogonal fold duplicates B1^(2)
                    break
                rs, lams, rmap, _ = _factor_candidates(kind, k, bound)
                theta = _theta_for(kind, rs, k)
                factor_data.append((kind, k, rs, lams, rmap, theta))
            if not ok:
                continue
            for lam_choice in iproduct(*[fd[3] for fd in factor_data]):
                entry = _assemble_scan_entry(
                    partition, factor_data, lam_choice, m,
                    require_self_dual, require_odd_dim, dim_cap,
                )
                if entry is None:
                    continue
                key = entry["key"]
                if key not in seen:
                    seen.add(key)
                    results.append(entry)
    return sorted(results, key=lambda e: e["key"])


def _integer_root(n: int, k: int) -> int | None:
    if n <= 0:
        return None
    c = round(n ** (1.0 / k))
    for cand in (c - 1, c, c + 1):
        if cand > 0 and cand ** k == n:
            return cand
    return None


def _assemble_scan_entry(partition, factor_data, lam_choice, m,
                         require_self_dual, require_odd_dim, dim_cap):
    lat_m = QuasiLattice.standard(m)
    # cheap necessary conditions first: the leading restricted weight must be
    # a constant vector and every block dimension a perfect power of one base
    chi0_dim = None
    lead = None
    for block, (kind, k, rs, _, rmap, theta), lam in zip(partition, factor_data, lam_choice):
        lam = tuple(Fraction(x) for x in lam)
        if not rs.is_dominant_integral(lam):
            return None
        if require_self_dual and not _self_dual(kind, rs, theta, lam):
            return None
        lamr = [abs(x) for x in rmap(lam)]
        if len(set(lamr)) > 1:
            return None
        if lead is None:
            lead = lamr[0] if lamr else None
        elif lamr and lamr[0] != lead:
            return None
        d = rs.weyl_dim(lam)
        if d > dim_cap:
            return None
        base = _integer_root(d, k)
        if base is None:
            return None
        if chi0_dim is None:
            chi0_dim = base
        elif chi0_dim != base:
            return None
    total = FormalCharacter.one(lat_m)
    labels = []
    lam_desc = []
    for block, (kind, k, rs, _, rmap, theta), lam in zip(partition, factor_data, lam_choice):
        lam = tuple(Fraction(x) for x in lam)
        try:
            ch = rs.irreducible_character(lam, dim_cap=dim_cap)
        except ValueError:
            return None
        terms: dict[Weight, Fraction] = {}
        for w, c in ch.terms.items():
            coords = [Fraction(0)] * m
            for bi, x in zip(block, rmap(w.free)):
                coords[bi] = x
            key = lat_m.weight(coords)
            terms[key] = terms.get(key, Fraction(0)) + c
        total = total * FormalCharacter(lat_m, terms)
        labels.append(FACTOR_KINDS[kind][1](k))
        lam_desc.append(tuple(str(x) for x in lam))
    # non-scalar requirement
    if len(total.terms) <= 1:
        return None
    try:
        scalar, factors = maximal_decomposition(total)
    except ValueError:
        return None
    if len(factors) != m or any(len(idx) != 1 for idx, _ in factors):
        return None
    base_terms = {tuple(w.free): c for w, c in factors[0][1].terms.items()}
    for _, f in factors[1:]:
        if {tuple(w.free): c for w, c in f.terms.items()} != base_terms:
            return None
    if scalar != 1:
        return None
    chi0 = factors[0][1]
    if require_odd_dim and int(chi0.mass()) % 2 == 0:
        return None
    key = (
        tuple(sorted(labels)),
        tuple(sorted(map(tuple, lam_desc))),
        tuple(sorted((tuple(map(str, w.free)), str(c)) for w, c in chi0.terms.items())),
    )
    return {
        "labels": tuple(sorted(labels)),
        "weights": lam_desc,
        "chi0": chi0,
        "key": key,
    }


def _partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions(rest):
        yield [[first]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1:]
