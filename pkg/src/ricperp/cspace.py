"""Kähler C-spaces ``(g, alpha_i)`` with ``b_2 = 1``: roots, dimensions, verdicts.

Simple roots use Bourbaki numbering.  Everything here is integer arithmetic.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import OutOfTheoremRange, UnsupportedFamilyRank

FAMILIES = ("A", "B", "C", "D", "E6", "E7", "E8", "F4", "G2")
CLASSICAL = ("A", "B", "C", "D")
EXCEPTIONAL_RANK = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}
MIN_RANK = {"A": 1, "B": 2, "C": 3, "D": 4}

# exceptional nodes inside the QB classification range with QB > 0
EXCEPTIONAL_QB_POSITIVE = {
    "G2": (2,),
    "F4": (1, 2, 4),
    "E6": (2, 3, 5),
    "E7": (1, 2, 5),
    "E8": (1, 2, 8),
}
E0 = {"F4": (3,), "E6": (4,), "E7": (3, 4, 6), "E8": (3, 4, 5, 6, 7)}
EXCEPTIONAL_HSS = {("E6", 1): 12, ("E6", 6): 12, ("E7", 7): 18}
NU_UNSTATED = "unstated"


@dataclass(frozen=True, order=True)
class CSpaceDescriptor:
    family: str
    rank: int
    node: int

    def __post_init__(self):
        fam = str(self.family).upper()
        if fam not in FAMILIES:
            raise UnsupportedFamilyRank(f"unknown family {self.family!r}")
        r, i = int(self.rank), int(self.node)
        if fam in EXCEPTIONAL_RANK:
            if r != EXCEPTIONAL_RANK[fam]:
                raise UnsupportedFamilyRank(f"{fam} has rank {EXCEPTIONAL_RANK[fam]}, got {r}")
        elif r < MIN_RANK[fam]:
            raise UnsupportedFamilyRank(f"{fam} needs rank >= {MIN_RANK[fam]}, got {r}")
        if not 1 <= i <= r:
            raise UnsupportedFamilyRank(f"node {i} outside 1..{r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "rank", r)
        object.__setattr__(self, "node", i)

    @property
    def label(self):
        return f"({self.family}{self.rank if self.family in CLASSICAL else ''}, a{self.node})"


# ---------------------------------------------------------------------------
# root systems


def _gram(family, r):
    """Twice the inner products ``(alpha_i, alpha_j)`` of the simple roots."""
    G = np.zeros((r, r), dtype=int)
    if family == "A":
        G += 4 * np.eye(r, dtype=int)
        for k in range(r - 1):
            G[k, k + 1] = G[k + 1, k] = -2
    elif family == "B":
        G += 4 * np.eye(r, dtype=int)
        G[r - 1, r - 1] = 2
        for k in range(r - 1):
            G[k, k + 1] = G[k + 1, k] = -2
    elif family == "C":
        G += 2 * np.eye(r, dtype=int)
        G[r - 1, r - 1] = 4
        for k in range(r - 2):
            G[k, k + 1] = G[k + 1, k] = -1
        G[r - 2, r - 1] = G[r - 1, r - 2] = -2
    elif family == "D":
        G += 4 * np.eye(r, dtype=int)
        for k in range(r - 2):
            G[k, k + 1] = G[k + 1, k] = -2
        G[r - 3, r - 1] = G[r - 1, r - 3] = -2
    elif family in ("E6", "E7", "E8"):
        G += 4 * np.eye(r, dtype=int)
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)] + [(k, k + 1) for k in range(5, r)]
        for a, b in edges:
            G[a - 1, b - 1] = G[b - 1, a - 1] = -2
    elif family == "F4":
        G[:] = [[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    elif family == "G2":
        G[:] = [[2, -3], [-3, 6]]
    return G


def _check_family_rank(family, r):
    family = str(family).upper()
    if family not in FAMILIES:
        raise UnsupportedFamilyRank(f"unknown family {family!r}")
    if family in EXCEPTIONAL_RANK:
        if r != EXCEPTIONAL_RANK[family]:
            raise UnsupportedFamilyRank(f"{family} has rank {EXCEPTIONAL_RANK[family]}")
    elif r < MIN_RANK[family]:
        raise UnsupportedFamilyRank(f"{family} needs rank >= {MIN_RANK[family]}")
    return family


@lru_cache(maxsize=None)
def _positive_roots(family, r):
    G = _gram(family, r)
    simple = [tuple(int(k == j) for k in range(r)) for j in range(r)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            b = np.array(beta)
            for j in range(r):
                # alpha_j-string through beta: p steps down, q steps up
                p = 0
                down = b.copy()
                while True:
                    down[j] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                pairing = 2 * int(b @ G[:, j]) // int(G[j, j])
                q = p - pairing
                if q > 0:
                    up = b.copy()
                    up[j] += 1
                    t = tuple(int(x) for x in up)
                    if t not in roots:
                        roots.add(t)
                        nxt.append(t)
        layer = nxt
    return tuple(sorted(roots, key=lambda v: (sum(v), v)))


def positive_roots(family, r):
    """Positive roots as coefficient tuples in the simple-root basis."""
    family = _check_family_rank(family, int(r))
    return list(_positive_roots(family, int(r)))


def delta_plus_k(desc, k):
    """Positive roots whose coefficient on ``alpha_i`` equals ``k``."""
    i = desc.node - 1
    return [a for a in positive_roots(desc.family, desc.rank) if a[i] == k]


def cspace_dimension(desc):
    i = desc.node - 1
    return sum(1 for a in positive_roots(desc.family, desc.rank) if a[i] > 0)


def max_coefficient(desc):
    i = desc.node - 1
    return max(a[i] for a in positive_roots(desc.family, desc.rank))


# ---------------------------------------------------------------------------
# Hermitian symmetric identifications


def hermitian_symmetric_type(desc):
    """Name of the compact Hermitian symmetric space, or ``None``."""
    f, r, i = desc.family, desc.rank, desc.node
    if f == "A":
        return "projective" if i in (1, r) else "grassmannian"
    if f == "B":
        if i == 1:
            return "quadric"
        if r == 2 and i == 2:
            return "projective"
    if f == "C":
        if i == 1:
            return "projective"
        if i == r:
            return "type_III"
    if f == "D":
        if i == 1:
            return "quadric"
        if i in (r - 1, r):
            return "type_II"
    if f == "G2" and i == 1:
        return "quadric"
    if (f, i) in EXCEPTIONAL_HSS:
        return "exceptional"
    return None


def einstein_constant(desc):
    """Stated Einstein constant ``mu`` (Fraction) or ``"unstated"``."""
    f, r, i = desc.family, desc.rank, desc.node
    hss = hermitian_symmetric_type(desc)
    if f == "A":
        return Fraction(r + 1)
    if f == "B":
        if r == 2:
            # B2 a1 is the quadric Q^3, B2 a2 is P^3
            return Fraction(3) if i == 1 else Fraction(4)
        return Fraction(2 * r - i)
    if f == "C":
        return Fraction(2 * r - i + 1)
    if f == "D":
        return Fraction(2 * r - i - 1)
    if (f, i) in EXCEPTIONAL_HSS:
        return Fraction(EXCEPTIONAL_HSS[(f, i)])
    if hss == "quadric":
        return Fraction(cspace_dimension(desc))
    return NU_UNSTATED


def nu_bound(desc):
    """Stated upper bound for ``nu`` or ``"unstated"``."""
    f, r, i = desc.family, desc.rank, desc.node
    if f == "B" and r >= 3:
        return Fraction(2)
    if f == "C":
        return Fraction(4) if i == r else Fraction(2)
    if f == "D":
        return Fraction(2)
    if (f, i) in EXCEPTIONAL_HSS:
        return Fraction(2)
    return NU_UNSTATED


# ---------------------------------------------------------------------------
# verdicts


def in_qb_range(desc):
    f, r, i = desc.family, desc.rank, desc.node
    if f in ("B", "C"):
        return r >= 3 and 1 < i < r
    if f == "D":
        return r >= 4 and 1 < i < r - 1
    if f in EXCEPTIONAL_QB_POSITIVE:
        return i in EXCEPTIONAL_QB_POSITIVE[f] or i in E0.get(f, ())
    return False


def qb_verdict(desc):
    """QB sign from the frame-weight classification of non-symmetric spaces."""
    if not in_qb_range(desc):
        raise OutOfTheoremRange(f"{desc.label} is outside the QB classification range")
    f, r, i = desc.family, desc.rank, desc.node
    if f in CLASSICAL:
        lhs = {"B": 5 * i + 1, "C": 5 * i - 3, "D": 5 * i + 3}[f]
        rhs = 4 * r
        if lhs < rhs:
            return "positive"
        return "nonneg_boundary" if lhs == rhs else "fails"
    if i in EXCEPTIONAL_QB_POSITIVE[f]:
        return "positive"
    return "fails"


def ricperp_verdict(desc):
    """``(verdict, reason)`` for ``Ric^perp > 0`` of the Kähler-Einstein metric."""
    f, r, i = desc.family, desc.rank, desc.node
    if cspace_dimension(desc) == 1:
        return "excluded_P1", "dimension one"
    if i in E0.get(f, ()):
        return "unknown_E0", "not covered by the available curvature tables"
    hss = hermitian_symmetric_type(desc)
    if hss in ("projective", "quadric", "grassmannian"):
        return "positive", "hermitian_symmetric_bound"
    if (f, r, i) == ("C", 3, 3):
        return "positive", "special_C3a3"
    mu, nu = einstein_constant(desc), nu_bound(desc)
    if mu != NU_UNSTATED and nu != NU_UNSTATED and nu < mu:
        return "positive", "nu_lt_mu"
    if f in EXCEPTIONAL_QB_POSITIVE and i in EXCEPTIONAL_QB_POSITIVE[f]:
        return "positive", "qb_positive"
    raise OutOfTheoremRange(f"no verdict available for {desc.label}")


@dataclass(frozen=True)
class ClassificationRecord:
    descriptor: CSpaceDescriptor
    dimension: int
    mu: object
    nu: object
    qb_verdict: str
    ricperp_verdict: str
    ricperp_reason: str
    hermitian_symmetric: str = None

    def to_dict(self):
        d = asdict(self)
        d["descriptor"] = {"family": self.descriptor.family, "rank": self.descriptor.rank, "node": self.descriptor.node}
        for key in ("mu", "nu"):
            v = d[key]
            d[key] = v if isinstance(v, str) else (int(v) if v.denominator == 1 else str(v))
        return d


def classify(desc):
    try:
        qb = qb_verdict(desc)
    except OutOfTheoremRange:
        qb = "not_applicable"
    rv, reason = ricperp_verdict(desc)
    return ClassificationRecord(
        descriptor=desc,
        dimension=cspace_dimension(desc),
        mu=einstein_constant(desc),
        nu=nu_bound(desc),
        qb_verdict=qb,
        ricperp_verdict=rv,
        ricperp_reason=reason,
        hermitian_symmetric=hermitian_symmetric_type(desc),
    )


def descriptors(families, r_max):
    out = []
    for fam in families:
        fam = str(fam).upper()
        if fam not in FAMILIES:
            raise UnsupportedFamilyRank(f"unknown family {fam!r}")
        if fam in EXCEPTIONAL_RANK:
            ranks = [EXCEPTIONAL_RANK[fam]] if EXCEPTIONAL_RANK[fam] <= r_max else []
        else:
            ranks = range(MIN_RANK[fam], r_max + 1)
        for r in ranks:
            for i in range(1, r + 1):
                out.append(CSpaceDescriptor(fam, r, i))
    order = {f: k for k, f in enumerate(FAMILIES)}
    return sorted(set(out), key=lambda d: (order[d.family], d.rank, d.node))


def classify_range(families, r_max):
    return [classify(d) for d in descriptors(families, r_max)]
