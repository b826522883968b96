"""Quasi-lattices, weights with torsion, lattice automorphisms, and the
formal character algebra.

A quasi-lattice is a free lattice Z^n carrying an exact positive definite
gram matrix, extended by a finite cyclic torsion factor Z/d.  Weights are
pairs (free part, torsion class); the free part is a vector of Fractions so
that half-integral weights are exact.  All values are immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .linalg import det, mat, mat_inv, mat_vec, mat_mul, transpose, is_integral_matrix

Vec = tuple[Fraction, ...]


def vec(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class QuasiLattice:
    """Z^rank (+) Z/torsion_order with a positive definite pairing on the free part."""

    rank: int
    torsion_order: int
    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.torsion_order < 1:
            raise ValueError("torsion_order must be >= 1")
        g = mat(self.gram)
        object.__setattr__(self, "gram", g)
        if len(g) != self.rank or any(len(row) != self.rank for row in g):
            raise ValueError("gram matrix shape does not match rank")
        if g != transpose(g):
            raise ValueError("gram matrix must be symmetric")
        for k in range(1, self.rank + 1):
            minor = tuple(row[:k] for row in g[:k])
            if det(minor) <= 0:
                raise ValueError("gram matrix must be positive definite")

    @staticmethod
    def standard(rank: int, torsion_order: int = 1) -> "QuasiLattice":
        from .linalg import identity

        return QuasiLattice(rank, torsion_order, identity(rank))

    def weight(self, free, tor: int = 0) -> "Weight":
        return Weight(vec(free), tor % self.torsion_order, self.torsion_order)

    def zero(self) -> "Weight":
        return self.weight([0] * self.rank)

    def beta0(self) -> "Weight":
        """Generator of the torsion subgroup."""
        return self.weight([0] * self.rank, 1)

    def inner(self, a: "Weight", b: "Weight") -> Fraction:
        return sum(
            (a.free[i] * sum(self.gram[i][j] * b.free[j] for j in range(self.rank))
             for i in range(self.rank)),
            Fraction(0),
        )

    def norm2(self, a: "Weight") -> Fraction:
        return self.inner(a, a)

    def key(self, a: "Weight"):
        """Canonical ordering key: (norm, free coordinates, torsion class)."""
        return (self.norm2(a), a.free, a.tor)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "torsion_order": self.torsion_order,
            "gram": [[str(x) for x in row] for row in self.gram],
        }

    @staticmethod
    def from_json(obj: Mapping) -> "QuasiLattice":
        return QuasiLattice(
            int(obj["rank"]),
            int(obj["torsion_order"]),
            tuple(tuple(Fraction(x) for x in row) for row in obj["gram"]),
        )


@dataclass(frozen=True)
class Weight:
    """An element of a quasi-lattice (tensored with Q on the free part)."""

    free: Vec
    tor: int
    mod: int

    def __post_init__(self):
        object.__setattr__(self, "free", vec(self.free))
        object.__setattr__(self, "tor", self.tor % self.mod)

    def __add__(self, other: "Weight") -> "Weight":
        assert self.mod == other.mod
        return Weight(tuple(a + b for a, b in zip(self.free, other.free)),
                      self.tor + other.tor, self.mod)

    def __sub__(self, other: "Weight") -> "Weight":
        assert self.mod == other.mod
        return Weight(tuple(a - b for a, b in zip(self.free, other.free)),
                      self.tor - other.tor, self.mod)

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.free), -self.tor, self.mod)

    def scale(self, c) -> "Weight":
        """Integer scaling; keeps torsion exact."""
        c = int(c)
        return Weight(tuple(a * c for a in self.free), self.tor * c, self.mod)

    def half(self) -> "Weight":
        """Exact halving; requires an even torsion class (or none)."""
        if self.tor % 2 != 0 and self.mod > 1:
            raise ValueError("cannot halve an odd torsion class")
        return Weight(tuple(a / 2 for a in self.free),
                      (self.tor // 2) % self.mod if self.mod > 1 else 0, self.mod)

    def is_zero(self) -> bool:
        return self.tor == 0 and all(a == 0 for a in self.free)

    def free_is_zero(self) -> bool:
        return all(a == 0 for a in self.free)

    def to_json(self) -> dict:
        return {"free": [str(x) for x in self.free], "tor": self.tor}

    @staticmethod
    def from_json(obj: Mapping, lattice: QuasiLattice) -> "Weight":
        return lattice.weight([Fraction(x) for x in obj["free"]], int(obj["tor"]))


def pairing(lattice: QuasiLattice, alpha: Weight, lam: Weight) -> Fraction:
    """2(lam, alpha)/(alpha, alpha); integrality is the caller's concern."""
    if alpha.free_is_zero():
        raise ValueError("torsion element has no coroot")
    return 2 * lattice.inner(lam, alpha) / lattice.inner(alpha, alpha)


@dataclass(frozen=True)
class LatticeMap:
    """Invertible affine-on-torsion automorphism of a quasi-lattice.

    Acts by (v, k) -> (M v, u*k + s.v mod d) with M in GL_n(Z), u a unit
    of Z/d and s an integer row vector mod d.
    """

    free_matrix: tuple[tuple[int, ...], ...]
    tor_shift: tuple[int, ...]
    tor_unit: int
    mod: int

    def __post_init__(self):
        m = mat(self.free_matrix)
        if not is_integral_matrix(m):
            raise ValueError("free_matrix must be integral")
        d = det(m)
        if d not in (1, -1):
            raise ValueError("free_matrix must be invertible over Z")
        object.__setattr__(self, "free_matrix",
                           tuple(tuple(int(x) for x in row) for row in m))
        from math import gcd

        if gcd(self.tor_unit % self.mod, self.mod) != 1:
            raise ValueError("tor_unit must be a unit mod d")
        object.__setattr__(self, "tor_unit", self.tor_unit % self.mod)
        object.__setattr__(self, "tor_shift",
                           tuple(int(x) % self.mod for x in self.tor_shift))

    @staticmethod
    def identity(rank: int, mod: int) -> "LatticeMap":
        return LatticeMap(tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank)),
                          (0,) * rank, 1, mod)

    def __call__(self, w: Weight) -> Weight:
        assert w.mod == self.mod and len(w.free) == len(self.free_matrix)
        free = tuple(
            sum((Fraction(self.free_matrix[i][j]) * w.free[j] for j in range(len(w.free))),
                Fraction(0))
            for i in range(len(self.free_matrix))
        )
        # The torsion shift is a homomorphism on the free part; it only takes
        # integer values on lattice vectors, which is all we apply it to for
        # torsion bookkeeping.  Rational free parts (e.g. delta-shifts) keep a
        # rational shift contribution only if it is integral.
        shift = sum(Fraction(self.tor_shift[j]) * w.free[j] for j in range(len(w.free)))
        if shift.denominator != 1:
            raise ValueError("torsion shift non-integral on this vector")
        tor = self.tor_unit * w.tor + int(shift)
        return Weight(free, tor % self.mod, self.mod)

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self after other."""
        assert self.mod == other.mod
        m1 = mat(self.free_matrix)
        m2 = mat(other.free_matrix)
        m = mat_mul(m1, m2)
        # torsion part: k -> u1*(u2*k + s2.v) + s1.(M2 v)
        unit = (self.tor_unit * other.tor_unit) % self.mod
        s2 = other.tor_shift
        s1_m2 = tuple(
            int(sum(Fraction(self.tor_shift[i]) * m2[i][j] for i in range(len(s2))))
            for j in range(len(s2))
        )
        shift = tuple((self.tor_unit * s2[j] + s1_m2[j]) % self.mod for j in range(len(s2)))
        return LatticeMap(tuple(tuple(int(x) for x in row) for row in m), shift, unit, self.mod)

    def inverse(self) -> "LatticeMap":
        minv = mat_inv(mat(self.free_matrix))
        uinv = pow(self.tor_unit, -1, self.mod) if self.mod > 1 else 1
        # (v,k) = (M w, u l + s.w)  =>  w = M^-1 v, l = uinv*(k - s.M^-1 v)
        s_minv = tuple(
            int(sum(Fraction(self.tor_shift[i]) * minv[i][j] for i in range(len(self.tor_shift))))
            for j in range(len(self.tor_shift))
        )
        shift = tuple((-uinv * x) % self.mod for x in s_minv)
        return LatticeMap(tuple(tuple(int(x) for x in row) for row in minv), shift, uinv, self.mod)

    def is_gram_orthogonal(self, lattice: QuasiLattice) -> bool:
        m = mat(self.free_matrix)
        return mat_mul(mat_mul(transpose(m), lattice.gram), m) == lattice.gram


def reflection(lattice: QuasiLattice, alpha: Weight) -> LatticeMap:
    """The reflection s_alpha as a LatticeMap.

    Requires the coroot pairing to be integral on the lattice basis, which is
    exactly condition (QRS1) for alpha.
    """
    n = lattice.rank
    d = lattice.torsion_order
    cols = []
    shifts = []
    for j in range(n):
        e_j = lattice.weight([int(i == j) for i in range(n)])
        c = pairing(lattice, alpha, e_j)
        if c.denominator != 1:
            raise ValueError("reflection is not defined over this lattice (QRS1 fails)")
        c = int(c)
        cols.append(tuple(int(e_j.free[i] - c * alpha.free[i]) if (e_j.free[i] - c * alpha.free[i]).denominator == 1
                          else None for i in range(n)))
        if any(x is None for x in cols[-1]):
            raise ValueError("reflection does not preserve the lattice")
        shifts.append((-c * alpha.tor) % d)
    matrix = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    return LatticeMap(matrix, tuple(shifts), 1, d)


def apply_map(m: LatticeMap, w: Weight) -> Weight:
    return m(w)


class FormalCharacter:
    """Finite Q-linear combination of weights; the group algebra Q[X*(S)].

    Zero coefficients are never stored; equality is equality of term maps.
    """

    __slots__ = ("lattice", "terms")

    def __init__(self, lattice: QuasiLattice, terms: Mapping[Weight, Fraction] | None = None):
        self.lattice = lattice
        clean: dict[Weight, Fraction] = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    clean[w] = clean.get(w, Fraction(0)) + c
                    if clean[w] == 0:
                        del clean[w]
        self.terms = clean

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(lattice: QuasiLattice) -> "FormalCharacter":
        return FormalCharacter(lattice)

    @staticmethod
    def monomial(lattice: QuasiLattice, w: Weight, c=1) -> "FormalCharacter":
        return FormalCharacter(lattice, {w: Fraction(c)})

    @staticmethod
    def one(lattice: QuasiLattice) -> "FormalCharacter":
        return FormalCharacter.monomial(lattice, lattice.zero())

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: "FormalCharacter") -> "FormalCharacter":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
            if out[w] == 0:
                del out[w]
        return FormalCharacter(self.lattice, out)

    def __sub__(self, other: "FormalCharacter") -> "FormalCharacter":
        return self + other.scale(-1)

    def scale(self, c) -> "FormalCharacter":
        c = Fraction(c)
        if c == 0:
            return FormalCharacter(self.lattice)
        return FormalCharacter(self.lattice, {w: x * c for w, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return char_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FormalCharacter):
            return NotImplemented
        return self.lattice == other.lattice and self.terms == other.terms

    def __hash__(self):
        return hash((self.lattice, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def apply(self, m: LatticeMap) -> "FormalCharacter":
        return FormalCharacter(self.lattice, {m(w): c for w, c in self.terms.items()})

    def coefficient(self, w: Weight) -> Fraction:
        return self.terms.get(w, Fraction(0))

    def mass(self) -> Fraction:
        """Sum of all coefficients (dimension, for a character of a rep)."""
        return sum(self.terms.values(), Fraction(0))

    def sorted_terms(self) -> list[tuple[Weight, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: self.lattice.key(t[0]))

    def support(self) -> set[Weight]:
        return set(self.terms)

    def __repr__(self):
        parts = [f"{c}*[{tuple(map(str, w.free))};{w.tor}]" for w, c in self.sorted_terms()]
        return "FormalCharacter(" + " + ".join(parts[:12]) + (" + ..." if len(parts) > 12 else "") + ")"

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "terms": [
                {"weight": w.to_json(), "coeff": str(c)} for w, c in self.sorted_terms()
            ],
        }

    @staticmethod
    def from_json(obj: Mapping) -> "FormalCharacter":
        lattice = QuasiLattice.from_json(obj["lattice"])
        terms = {
            Weight.from_json(t["weight"], lattice): Fraction(t["coeff"])
            for t in obj["terms"]
        }
        return FormalCharacter(lattice, terms)

    def _check(self, other: "FormalCharacter"):
        if self.lattice != other.lattice:
            raise ValueError("characters live on different quasi-lattices")


def char_mul(a: FormalCharacter, b: FormalCharacter) -> FormalCharacter:
    """Convolution product: [lam]*[mu] = [lam+mu], extended bilinearly."""
    a._check(b)
    out: dict[Weight, Fraction] = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            w = w1 + w2
            c = c1 * c2
            if w in out:
                out[w] += c
                if out[w] == 0:
                    del out[w]
            else:
                out[w] = c
    return FormalCharacter(a.lattice, out)


def char_to_json_str(ch: FormalCharacter) -> str:
    return json.dumps(ch.to_json(), separators=(",", ":"))


def char_from_json_str(s: str) -> FormalCharacter:
    return FormalCharacter.from_json(json.loads(s))
