"""Characters attached to reduced quasi root systems.

The alternating character and its group averages are the character-side
avatars of dimension data: pinned points, the weighted half-sum, the
alternating sum over the small Weyl group, orbit averages, exact density
identities, leading weights, and the linear-relation checker.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import gcd

from .cyclo import Cyc, cyclotomic_product  # re-exported: cyclotomic_product
from .lattice import FormalCharacter, LatticeMap, QuasiLattice, Weight, pairing, reflection, vec
from .linalg import det, identity, mat, smith_normal_form
from .quasi import QuasiRootSystem, folding_index
from .rootsys import RootSystem

__all__ = [
    "PinnedPoint", "ExplicitWGroup", "BCModelGroup", "pinned_element", "phi_s",
    "a_phi", "f_phi", "f_phi_orbit", "density_eval", "actual_leading_weight",
    "leading_weight_closed_form", "fixed_point_count", "cyclotomic_product",
    "relation_check", "evaluate_character", "restrict_to_component",
    "OrbitCharacter", "torsion_translation",
]


@dataclass(frozen=True)
class PinnedPoint:
    """A point of the generating component, as Q/Z coordinates over x0."""

    coords: tuple[Fraction, ...]
    torsion_order: int

    def value_qz(self, w: Weight) -> Fraction:
        """alpha(s) as an element of Q/Z (exponent of e^{2 pi i .})."""
        v = sum((w.free[i] * self.coords[i] for i in range(len(self.coords))),
                Fraction(0))
        return (v + Fraction(w.tor, self.torsion_order)) % 1

    def takes_value_one(self, w: Weight) -> bool:
        return self.value_qz(w) == 0


class ExplicitWGroup:
    """Finite subgroup of Aut(lattice) given by generators."""

    def __init__(self, rank: int, mod: int, generators):
        self.rank = rank
        self.mod = mod
        self.generators = list(generators)
        self._elements: list[LatticeMap] | None = None

    def elements(self) -> list[LatticeMap]:
        if self._elements is None:
            ident = LatticeMap.identity(self.rank, self.mod)
            seen = {_map_key(ident): ident}
            frontier = [ident]
            while frontier:
                new = []
                for g in frontier:
                    for h in self.generators:
                        gh = h.compose(g)
                        k = _map_key(gh)
                        if k not in seen:
                            seen[k] = gh
                            new.append(gh)
                frontier = new
            self._elements = list(seen.values())
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def orbit(self, w: Weight) -> set[Weight]:
        seen = {w}
        frontier = [w]
        while frontier:
            new = []
            for v in frontier:
                for g in self.generators:
                    img = g(v)
                    if img not in seen:
                        seen.add(img)
                        new.append(img)
            frontier = new
        return seen

    def contains(self, m: LatticeMap) -> bool:
        return _map_key(m) in {_map_key(g) for g in self.elements()}


def _map_key(m: LatticeMap):
    return (m.free_matrix, m.tor_shift, m.tor_unit)


@dataclass(frozen=True)
class BCModelGroup:
    """W(B_n) with optional torsion translations on the rank-n, Z/d lattice.

    translations: "none" for the plain hyperoctahedral group, "full" for all
    homomorphisms of the component group into the torus (every coordinate
    pattern), "even2" for the even-support two-torsion translations (d = 2).
    """

    n: int
    d: int
    translations: str = "none"

    def __post_init__(self):
        if self.translations not in ("none", "full", "even2"):
            raise ValueError("unknown translation family")
        if self.translations == "even2" and self.d != 2:
            raise ValueError("even-support translations require torsion order 2")


def torsion_translation(lattice: QuasiLattice, pattern) -> LatticeMap:
    """t_y for y given by integer pattern: shifts torsion by sum(pattern.v)*(d/2)."""
    d = lattice.torsion_order
    if d % 2 != 0:
        raise ValueError("two-torsion translation needs even torsion order")
    shift = tuple((int(p) * (d // 2)) % d for p in pattern)
    return LatticeMap(tuple(tuple(int(i == j) for j in range(lattice.rank))
                            for i in range(lattice.rank)), shift, 1, d)


# ---------------------------------------------------------------------------
# pinned elements
# ---------------------------------------------------------------------------


def _nd_restricted(phi: QuasiRootSystem) -> RootSystem:
    frees = {w.free for w in phi.roots}
    nd = {f for f in frees if tuple(x / 2 for x in f) not in frees}
    return RootSystem(nd, gram=phi.lattice.gram)


def simple_lifts(phi: QuasiRootSystem) -> list[Weight]:
    """Minimal-torsion lifts of a simple system of the nd restricted system."""
    nd = _nd_restricted(phi)
    out = []
    for a in nd.simple:
        fiber = sorted(phi.fiber(a), key=lambda w: w.tor)
        out.append(fiber[0])
    return out


def pinned_element(phi: QuasiRootSystem, lifts=None) -> PinnedPoint:
    """Solve alpha_i(s) = 1 over Q/Z for a simple system of lifts."""
    if not phi.reduced:
        raise ValueError("pinned elements are defined for reduced quasi root systems")
    lat = phi.lattice
    d = lat.torsion_order
    n = lat.rank
    lifts = list(lifts) if lifts is not None else simple_lifts(phi)
    if not lifts:
        return PinnedPoint((Fraction(0),) * n, d)
    A = [[int(w.free[j]) for j in range(n)] for w in lifts]
    b = [Fraction(-w.tor, d) for w in lifts]
    U, D, V = smith_normal_form(A)
    ub = [sum(Fraction(U[i][j]) * b[j] for j in range(len(b))) for i in range(len(b))]
    diag = [D[i][i] if i < len(D[0]) else 0 for i in range(len(D))]
    # enumerate canonical solutions y_i of d_i y_i = ub_i (mod 1)
    choice_sets = []
    for i in range(n):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if i < len(ub) and ub[i] % 1 != 0:
                raise AssertionError("inconsistent pinned-element system on a valid system")
            choice_sets.append([Fraction(0)])
        else:
            base = (ub[i] % 1) if i < len(ub) else Fraction(0)
            choice_sets.append([((base + t) / di) % 1 for t in range(di)])
    best = None
    for ys in iproduct(*choice_sets):
        u = [Fraction(0)] * n
        for j in range(n):
            u[j] = sum(Fraction(V[j][i]) * ys[i] for i in range(n)) % 1
        den = 1
        for x in u:
            den = den * x.denominator // gcd(den, x.denominator)
        key = (den, tuple(u))
        if best is None or key < best[0]:
            best = (key, tuple(u))
    s = PinnedPoint(best[1], d)
    # Definitional check: the roots taking value one realize the non-divisible
    # restricted system exactly.
    frees = {w.free for w in phi.roots}
    nd = {f for f in frees if tuple(x / 2 for x in f) not in frees}
    realized = {w.free for w in phi.roots if s.takes_value_one(w)}
    if realized != nd:
        raise AssertionError("pinned-element check failed on a valid quasi root system")
    return s


def phi_s(phi: QuasiRootSystem, s: PinnedPoint) -> set[Weight]:
    return {w for w in phi.roots if s.takes_value_one(w)}


# ---------------------------------------------------------------------------
# the alternating character and its averages
# ---------------------------------------------------------------------------


def _weights_m(phi: QuasiRootSystem):
    """m_alpha per non-divisible restricted root: fiber + twice doubled fiber."""
    frees = {w.free for w in phi.roots}
    out = {}
    for f in frees:
        if tuple(x / 2 for x in f) in frees:
            continue
        m = folding_index(phi, f)[0]
        dbl = tuple(2 * x for x in f)
        if dbl in frees:
            m += 2 * folding_index(phi, dbl)[0]
        out[f] = m
    return out


def a_phi(phi: QuasiRootSystem, mu: Weight | None = None,
          pinned: PinnedPoint | None = None) -> FormalCharacter:
    """Alternating character: signed sum of [mu + delta - w delta] over W_{Phi_s}.

    Each delta - w delta is accumulated as the inversion-set sum of the
    weighted roots, so every term is an honest lattice weight.
    """
    if not phi.reduced:
        raise ValueError("the alternating character needs a reduced system")
    lat = phi.lattice
    s = pinned or pinned_element(phi)
    ps = phi_s(phi, s)
    mweights = _weights_m(phi)
    nd = _nd_restricted(phi)
    lift = {}
    for w in ps:
        lift[w.free] = w
    positives = list(nd.positive)
    pos_set = set(positives)
    # delta - w delta is the sum of the weighted roots m_alpha alpha over the
    # inversion set of w, so every term is an honest lattice weight
    terms: dict[Weight, Fraction] = {}
    mu = mu if mu is not None else lat.zero()
    for word, sgn in nd.weyl_elements_with_sign():
        inv_sum = mu
        winv = tuple(reversed(word))
        for a in positives:
            if nd.apply_word(winv, a) not in pos_set:
                inv_sum = inv_sum + lift[a].scale(mweights[a])
        c = Fraction(sgn)
        if inv_sum in terms:
            terms[inv_sum] += c
            if terms[inv_sum] == 0:
                del terms[inv_sum]
        else:
            terms[inv_sum] = c
    return FormalCharacter(lat, terms)


def chi_star(lattice: QuasiLattice, w: Weight, group) -> FormalCharacter:
    """Orbit average of a single weight."""
    orbit = group.orbit(w) if isinstance(group, ExplicitWGroup) else set(group(w))
    c = Fraction(1, len(orbit))
    return FormalCharacter(lattice, {v: c for v in orbit})


def f_phi(phi: QuasiRootSystem, group: ExplicitWGroup,
          mu: Weight | None = None, check_contains: bool = True) -> FormalCharacter:
    """Group average of the alternating character, term by term over orbits.

    The group must contain the reflections of the pinned part (those define
    the alternating sum); the torsion-twisted reflections need not belong.
    """
    if check_contains:
        s = pinned_element(phi)
        for w in sorted(phi_s(phi, s), key=phi.lattice.key):
            if not group.contains(reflection(phi.lattice, w)):
                raise ValueError("averaging group does not contain a needed reflection")
    a = a_phi(phi, mu=mu)
    out = FormalCharacter.zero(phi.lattice)
    for w, c in a.terms.items():
        orbit = group.orbit(w)
        out = out + FormalCharacter(phi.lattice, {v: c / len(orbit) for v in orbit})
    return out


def f_phi_orbit(phi: QuasiRootSystem, group: ExplicitWGroup) -> list[tuple[Weight, Fraction]]:
    """F expressed in the orbit basis: (canonically-least orbit member, coefficient)."""
    f = f_phi(phi, group)
    seen: set[Weight] = set()
    out = []
    for w, c in f.sorted_terms():
        if w in seen:
            continue
        orbit = group.orbit(w)
        seen |= orbit
        rep = max(orbit, key=phi.lattice.key)
        out.append((rep, c * len(orbit)))
    return out


# ---------------------------------------------------------------------------
# evaluation and density identities
# ---------------------------------------------------------------------------


def evaluate_character(ch: FormalCharacter, coords) -> Cyc:
    """Exact value at the point of S with the given Q/Z coordinates."""
    lat = ch.lattice
    d = lat.torsion_order
    u = [Fraction(x) for x in coords]
    total = Cyc.zero()
    for w, c in ch.terms.items():
        e = sum((w.free[i] * u[i] for i in range(lat.rank)), Fraction(0))
        e = (e + Fraction(w.tor, d)) % 1
        total = total + Cyc.exp_qz(e) * c
    return total


def density_eval(phi: QuasiRootSystem, coords) -> dict:
    """Both sides of the product identities at one exact point.

    Returns the per-root-class factor identities (product over a fiber equals
    1 - alpha(x)^m) and the global identity (normalized full product equals
    the averaged character value).
    """
    lat = phi.lattice
    d = lat.torsion_order
    u = tuple(Fraction(x) for x in coords)
    s = pinned_element(phi)
    ps = phi_s(phi, s)
    mweights = _weights_m(phi)

    def root_value(w: Weight) -> Cyc:
        e = sum((w.free[i] * u[i] for i in range(lat.rank)), Fraction(0))
        return Cyc.exp_qz((e + Fraction(w.tor, d)) % 1)

    one = Cyc.from_fraction(1)
    report: dict = {"factors": [], "coords": u}
    frees = {w.free for w in phi.roots}
    factor_ok = True
    for w in sorted(ps, key=lat.key):
        f = w.free
        if tuple(x / 2 for x in f) in frees:
            continue
        fiber = set(phi.fiber(f))
        dbl = tuple(2 * x for x in f)
        if dbl in frees:
            fiber |= phi.fiber(dbl)
        lhs = one
        for b in fiber:
            lhs = lhs * (one - root_value(b))
        m = mweights[f]
        val = root_value(w)
        rhs = one
        for _ in range(m):
            rhs = rhs * val
        rhs = one - rhs
        ok = lhs == rhs
        factor_ok &= ok
        report["factors"].append((w.to_json(), ok))
    # global identity
    wgroup = ExplicitWGroup(lat.rank, d, [reflection(lat, w) for w in ps])
    lhs = one
    for b in phi.roots:
        lhs = lhs * (one - root_value(b))
    lhs = lhs * Fraction(1, wgroup.order)
    rhs = evaluate_character(f_phi(phi, wgroup, check_contains=False), u)
    report["factor_identities_hold"] = factor_ok
    report["global_lhs"] = lhs
    report["global_rhs"] = rhs
    report["global_identity_holds"] = lhs == rhs
    return report


# ---------------------------------------------------------------------------
# actual leading weight
# ---------------------------------------------------------------------------


def actual_leading_weight(phi: QuasiRootSystem):
    """Search W_{Phi_s} for the longest doubled-lattice element of the form
    delta + w delta; returns (word, dominant restricted weight)."""
    frees = {w.free for w in phi.roots}
    for f in frees:
        m = folding_index(phi, f)[0]
        if m not in (1, 2):
            raise ValueError("leading-weight search requires folding indices 1 or 2")
    s = pinned_element(phi)
    ps = phi_s(phi, s)
    mweights = _weights_m(phi)
    nd = _nd_restricted(phi)
    delta = tuple(
        sum((Fraction(mweights[a]) * a[i] for a in nd.positive), Fraction(0)) / 2
        for i in range(nd.dim)
    )
    # membership in 2 * (Z-span of the pinned-part roots), via one Smith
    # reduction: v in span(A)  iff  (U v)_i is divisible by d_i row by row
    span_scale = 1
    for a in nd.positive:
        for x in a:
            span_scale = span_scale * x.denominator // gcd(span_scale, x.denominator)
    cols = [[int(a[i] * span_scale) for a in nd.positive]
            for i in range(nd.dim)]
    U, D, _ = smith_normal_form(cols)
    diag = [D[i][i] if i < len(D[0]) else 0 for i in range(len(D))]

    s, orbit = nd.orbit_with_words_int(delta)
    delta_i = tuple(int(x * s) for x in delta)
    # integer gram for norms
    if nd.gram is None:
        gram_i = None
    else:
        gden = 1
        for row in nd.gram:
            for x in row:
                gden = gden * x.denominator // gcd(gden, x.denominator)
        gram_i = [[int(x * gden) for x in row] for row in nd.gram]

    def norm_i(v) -> int:
        if gram_i is None:
            return sum(x * x for x in v)
        return sum(v[i] * sum(gram_i[i][j] * v[j] for j in range(len(v)))
                   for i in range(len(v)))

    def in_two_span_scaled(v) -> bool:
        # v is span_scale * s * (true vector); need true vector in 2*span
        for i in range(len(U)):
            w = sum(U[i][j] * v[j] for j in range(len(v)))
            di = diag[i] if i < len(diag) else 0
            if di == 0:
                if w != 0:
                    return False
            elif w % (2 * di * s) != 0:
                return False
        return True

    best = None
    for u, word in orbit.items():
        cand = tuple((x + y) * span_scale for x, y in zip(delta_i, u))
        if not in_two_span_scaled(cand):
            continue
        norm = norm_i(cand)
        if best is None or norm > best[0]:
            best = (norm, word, cand)
    assert best is not None, "w0 = longest element always qualifies"
    _, word, cand = best
    true_cand = tuple(Fraction(x, span_scale * s) for x in cand)
    return word, nd.dominantize(true_cand)


def leading_weight_closed_form(kind: str, n: int) -> tuple[Fraction, ...]:
    """Case table of leading weights, in standard coordinates."""
    F_ = Fraction
    if kind == "A":  # A_{n-1} inside Z^n
        if n % 2 == 1:
            delta = [F_(n - 1, 2) - j for j in range(n)]
            return tuple(2 * x for x in delta)
        out = []
        for i in range(n // 2):
            v = n - 2 - 4 * i
            out.extend([v, v])
        return tuple(F_(x) for x in out)
    if kind == "B":
        out = []
        k = n
        while k >= 2:
            out.extend([2 * k - 2, 2 * k - 2])
            k -= 2
        if n % 2 == 1:
            out.append(0)
        return tuple(F_(x) for x in out)
    if kind == "C":
        if n * (n + 1) % 4 == 0:
            return tuple(F_(2 * (n - j)) for j in range(n))
        return tuple(F_(x) for x in list(range(2 * n, 2, -2)) + [0])
    if kind == "C21":  # C_n^{(2,1)}
        if n % 2 == 0:
            return tuple(F_(2 * (2 * (n - j) - 1)) for j in range(n))
        return tuple(F_(x) for x in [4 * n - 2 - 4 * j for j in range(n - 1)] + [0])
    if kind == "D":
        if (n * (n - 1)) % 4 == 0:
            return tuple(F_(2 * (n - 1 - j)) for j in range(n))
        return tuple(F_(x) for x in [2 * n - 2 - 2 * j for j in range(n - 2)] + [0, 0])
    raise ValueError(f"no closed form stored for {kind}")


# ---------------------------------------------------------------------------
# fixed points of torus automorphisms
# ---------------------------------------------------------------------------


def fixed_point_count(m) -> int:
    """Number of fixed points of the torus automorphism with matrix m."""
    mm = mat(m)
    n = len(mm)
    im = tuple(
        tuple(Fraction(int(i == j)) - mm[i][j] for j in range(n)) for i in range(n)
    )
    dd = det(im)
    if dd == 0:
        raise ValueError("automorphism has positive-dimensional fixed locus")
    return abs(int(dd))


# ---------------------------------------------------------------------------
# relation checking
# ---------------------------------------------------------------------------


def restrict_to_component(ch: FormalCharacter) -> dict[tuple, Cyc]:
    """Collapse torsion onto the generating component: [v + k b0] -> zeta^k [v]."""
    d = ch.lattice.torsion_order
    out: dict[tuple, Cyc] = {}
    for w, c in ch.terms.items():
        z = Cyc.root_of_unity(w.tor, d) * c
        key = w.free
        out[key] = out.get(key, Cyc.zero()) + z
    return {k: v for k, v in out.items() if not v.is_zero()}


class OrbitCharacter:
    """W(B_n)-invariant character on the component, in the orbit basis.

    Keys are (sorted-descending absolute coordinate tuple); values are exact
    cyclotomic coefficients (the torsion class is already folded in).
    Multiplication is the disjoint-support product: multiset union of keys.
    """

    def __init__(self, d: int, terms=None):
        self.d = d
        self.terms: dict[tuple[int, ...], Cyc] = {}
        if terms:
            for k, v in terms.items():
                self._add(k, v)

    def _add(self, k, v):
        cur = self.terms.get(k)
        tot = v if cur is None else cur + v
        if tot.is_zero():
            self.terms.pop(k, None)
        else:
            self.terms[k] = tot

    @staticmethod
    def one(d: int) -> "OrbitCharacter":
        return OrbitCharacter(d, {(): Cyc.from_fraction(1)})

    def __add__(self, other: "OrbitCharacter") -> "OrbitCharacter":
        out = OrbitCharacter(self.d, dict(self.terms))
        for k, v in other.terms.items():
            out._add(k, v)
        return out

    def scale(self, c) -> "OrbitCharacter":
        out = OrbitCharacter(self.d)
        for k, v in self.terms.items():
            out._add(k, v * c if isinstance(c, (int, Fraction)) else c * v)
        return out

    def __mul__(self, other: "OrbitCharacter") -> "OrbitCharacter":
        out = OrbitCharacter(self.d)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple(sorted(k1 + k2, reverse=True))
                out._add(key, v1 * v2)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def filter_keys(self, pred) -> "OrbitCharacter":
        return OrbitCharacter(self.d, {k: v for k, v in self.terms.items() if pred(k)})


def component_orbit_character(phi: QuasiRootSystem) -> OrbitCharacter:
    """F_{Phi, W(B_n)} restricted to the component, in the orbit basis.

    Computed from the alternating character: every term is replaced by its
    hyperoctahedral dominant representative with the torsion folded into a
    root of unity.
    """
    lat = phi.lattice
    d = lat.torsion_order
    a = a_phi(phi)
    out = OrbitCharacter(d)
    for w, c in a.terms.items():
        key = tuple(sorted((abs(int(x)) for x in w.free), reverse=True))
        out._add(key, Cyc.root_of_unity(w.tor, d) * c)
    return out


def _blocks_of(phi: QuasiRootSystem) -> list[tuple[tuple[int, ...], QuasiRootSystem]]:
    """Split a quasi root system into factors along disjoint coordinate blocks."""
    lat = phi.lattice
    comps: list[set[Weight]] = []
    remaining = set(phi.roots)
    while remaining:
        seed = remaining.pop()
        comp = {seed}
        support = {i for i, x in enumerate(seed.free) if x}
        changed = True
        while changed:
            changed = False
            for w in list(remaining):
                sup = {i for i, x in enumerate(w.free) if x}
                if sup & support:
                    support |= sup
                    comp.add(w)
                    remaining.discard(w)
                    changed = True
        comps.append(comp)
    out = []
    for comp in comps:
        support = sorted({i for w in comp for i, x in enumerate(w.free) if x})
        sub_lat = QuasiLattice(
            len(support), lat.torsion_order,
            tuple(tuple(lat.gram[i][j] for j in support) for i in support),
        )
        sub_roots = {
            sub_lat.weight([w.free[i] for i in support], w.tor) for w in comp
        }
        out.append((tuple(support), QuasiRootSystem(sub_lat, sub_roots)))
    return out


def f_phi_component_model(phi: QuasiRootSystem, group: BCModelGroup) -> OrbitCharacter:
    """F_{Phi, group} on the component for the hyperoctahedral model groups.

    Factor characters merge multiplicatively in the orbit basis; the optional
    torsion translations act as a parity filter on the dominant keys.
    """
    d = phi.lattice.torsion_order
    assert d == group.d
    total = OrbitCharacter.one(d)
    used = 0
    for support, factor in _blocks_of(phi):
        total = total * component_orbit_character(factor)
        used += len(support)
    # coordinates untouched by any root contribute x_0 factors
    for _ in range(group.n - used):
        total = total * OrbitCharacter(d, {(0,): Cyc.from_fraction(1)})
    if group.translations == "full":
        total = total.filter_keys(lambda k: all(x % group.d == 0 for x in k))
    elif group.translations == "even2":
        total = total.filter_keys(
            lambda k: all(x % 2 == 0 for x in k) or all(x % 2 == 1 for x in k)
        )
    return total


def relation_check(entries, group):
    """Exact test of sum_i c_i t_i / m_i * F_{Phi_i, group} = 0 on the component.

    entries: iterable of (phi, c, m, t).  group: ExplicitWGroup on the common
    lattice, or a BCModelGroup for the hyperoctahedral models.  Returns
    (is_zero, residual) where the residual is a dict (explicit groups) or an
    OrbitCharacter (model groups).
    """
    entries = list(entries)
    if not entries:
        raise ValueError("no entries")
    lat = entries[0][0].lattice
    for phi, _, _, _ in entries:
        if phi.lattice != lat:
            raise ValueError("entries live on different quasi-lattices")
    if isinstance(group, BCModelGroup):
        total = OrbitCharacter(group.d)
        for phi, c, m, t in entries:
            contrib = f_phi_component_model(phi, group).scale(Fraction(c) * t / m)
            total = total + contrib
        return total.is_zero(), total
    total: dict[tuple, Cyc] = {}
    for phi, c, m, t in entries:
        f = f_phi(phi, group).scale(Fraction(c) * t / m)
        for k, v in restrict_to_component(f).items():
            cur = total.get(k)
            val = v if cur is None else cur + v
            if val.is_zero():
                total.pop(k, None)
            else:
                total[k] = val
    return (not total), total
