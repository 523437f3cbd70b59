"""Cell complexes of the genus-one sections and symbolic homology transport.

Transport rules are stored as data: the image of each source loop as an
integer combination of loops on the target surface, plus the linear
relations that hold on the target. :func:`transport_matrix` substitutes
the relations and reads off the column-convention matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from .retmap import family_of, step_factors, step_product
from .sl2z import Mat2


class ImageOutsideSpan(ValueError):
    pass


# ---------------------------------------------------------------------------
# cell complexes


@dataclass(frozen=True)
class CWModel:
    family: str
    faces: int
    edges: int
    vertices: int
    boundary_components: int

    @property
    def euler_characteristic(self) -> int:
        return self.faces - self.edges + self.vertices

    @property
    def genus(self) -> int:
        twice = 2 - self.euler_characteristic - self.boundary_components
        if twice < 0 or twice % 2:
            raise ValueError(f"inconsistent cell counts for {self.family}")
        return twice // 2

    def to_json(self) -> dict:
        return {"family": self.family, "faces": self.faces, "edges": self.edges,
                "vertices": self.vertices, "boundaryComponents": self.boundary_components,
                "chi": self.euler_characteristic, "genus": self.genus}


# one rectangle glued by the rotation at P; two orthic triangles; two quadrangles
_CW = {
    "2qr": (1, 4, 2, 1),
    "pqr": (2, 6 + 3, 6, 1),
    "pqrs": (2, 8 + 4, 8, 2),
}


def cw_model(family: str, signature: Sequence[int] | None = None) -> CWModel:
    """Cell counts of a section; the signature does not change them."""
    if family not in _CW:
        raise ValueError(f"unknown family {family!r}")
    if signature is not None and family_of(signature) != family:
        raise ValueError(f"signature {tuple(signature)} is not in family {family}")
    return CWModel(family, *_CW[family])


# ---------------------------------------------------------------------------
# homology classes


@dataclass(frozen=True)
class HomologyClass:
    """Integer combination of named loops; zero coefficients dropped."""

    coeffs: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, terms: Mapping[str, int] | None = None, **kw) -> "HomologyClass":
        d: dict[str, int] = {}
        for k, v in list((terms or {}).items()) + list(kw.items()):
            d[k] = d.get(k, 0) + int(v)
        return cls(tuple(sorted((k, v) for k, v in d.items() if v)))

    @classmethod
    def gen(cls, name: str) -> "HomologyClass":
        return cls(((name, 1),))

    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return HomologyClass(tuple(sorted((k, v) for k, v in d.items() if v)))

    def __neg__(self) -> "HomologyClass":
        return HomologyClass(tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        return self + (-other)

    def __rmul__(self, n: int) -> "HomologyClass":
        n = int(n)
        return HomologyClass(tuple((k, n * v) for k, v in self.coeffs) if n else ())

    def __getitem__(self, name: str) -> int:
        return self.as_dict().get(name, 0)

    def substitute(self, relations: Mapping[str, "HomologyClass"]) -> "HomologyClass":
        d: dict[str, int] = {}
        for k, v in self.coeffs:
            if k in relations:
                for j, w in relations[k].coeffs:
                    d[j] = d.get(j, 0) + v * w
            else:
                d[k] = d.get(k, 0) + v
        return HomologyClass(tuple(sorted((k, v) for k, v in d.items() if v)))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.coeffs:
            parts.append(k if v == 1 else f"-{k}" if v == -1 else f"{v}{k}")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class TransportRule:
    name: str
    source_basis: tuple[str, str]
    target_basis: tuple[str, str]
    images: Mapping[str, HomologyClass]
    relations: Mapping[str, HomologyClass] = field(default_factory=dict)
    t: int | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sourceBasis": list(self.source_basis),
            "targetBasis": list(self.target_basis),
            "images": {k: str(v) for k, v in self.images.items()},
            "relations": {k: str(v) for k, v in self.relations.items()},
        }


def transport_matrix(rule: TransportRule) -> Mat2:
    """Column-convention matrix: column j is the image of source loop j."""
    cols = []
    for g in rule.source_basis:
        img = rule.images[g]
        # relations may chain; substitute until no related loop is left
        for _ in range(len(rule.relations) + 1):
            if not any(k in rule.relations for k, _ in img.coeffs):
                break
            img = img.substitute(rule.relations)
        d = img.as_dict()
        extra = set(d) - set(rule.target_basis)
        if extra:
            raise ImageOutsideSpan(f"{rule.name}: image of {g} involves {sorted(extra)}")
        cols.append([d.get(b, 0) for b in rule.target_basis])
    return Mat2(cols[0][0], cols[1][0], cols[0][1], cols[1][1])


H = HomologyClass.gen


def _swap_step(name, src, tgt, fixed_to, t):
    """``src[0] -> fixed_to``, ``src[1] -> -tgt[0] + t*tgt[1]``."""
    return TransportRule(name, src, tgt, {src[0]: H(fixed_to), src[1]: -H(tgt[0]) + t * H(tgt[1])},
                         t=t)


def rules_2qr(q: int, r: int) -> list[TransportRule]:
    return [
        _swap_step("phi^Q", ("c^Q_+", "c^R_-"), ("c^R_+", "c^Q_-"), "c^Q_-", q - 2),
        _swap_step("phi^R", ("c^R_+", "c^Q_-"), ("c^Q_+", "c^R_-"), "c^R_-", r - 2),
    ]


def rules_pqr(p: int, q: int, r: int, prime: str = "") -> list[TransportRule]:
    """Route A -> C -> B -> A for the cyclic ordering ``(p, q, r)``."""
    a, b, c = f"A{prime}", f"B{prime}", f"C{prime}"
    return [
        _swap_step(f"phi^{a}", ("c^Q_+", "c^R_-"), ("c^P_+", "c^Q_-"), "c^Q_-", q - 1),
        _swap_step(f"phi^{c}", ("c^P_+", "c^Q_-"), ("c^R_+", "c^P_-"), "c^P_-", p - 1),
        _swap_step(f"phi^{b}", ("c^R_+", "c^P_-"), ("c^Q_+", "c^R_-"), "c^R_-", r - 1),
    ]


PQRS_ROUTE = ("A", "D", "C", "B")


def relations_pqrs(section: str) -> dict[str, HomologyClass]:
    """The single relation ``c^{X,opp} = c^{X,prev} - c^{X,next}`` on S^X."""
    return dict(_relations_pqrs(section))


@lru_cache(maxsize=None)
def _relations_pqrs(section: str) -> dict[str, HomologyClass]:
    i = PQRS_ROUTE.index(section)
    nxt, opp, prv = (PQRS_ROUTE[(i + k) % 4] for k in (1, 2, 3))
    x = section
    return {f"c^{x}{opp}": H(f"c^{x}{prv}") - H(f"c^{x}{nxt}")}


@lru_cache(maxsize=None)
def basis_pqrs(section: str) -> tuple[str, str]:
    i = PQRS_ROUTE.index(section)
    return f"c^{section}{PQRS_ROUTE[(i + 1) % 4]}", f"c^{section}{PQRS_ROUTE[(i + 3) % 4]}"


def rules_pqrs(p: int, q: int, r: int, s: int) -> list[TransportRule]:
    """Route A -> D -> C -> B -> A for the cyclic ordering ``(p, q, r, s)``."""
    ts = {"A": p, "D": s, "C": r, "B": q}
    rules = []
    for i, x in enumerate(PQRS_ROUTE):
        y = PQRS_ROUTE[(i + 1) % 4]
        prv = PQRS_ROUTE[(i + 3) % 4]
        t = ts[x]
        images = {
            f"c^{x}{y}": H(f"c^{y}{x}"),
            f"c^{x}{prv}": H(f"c^{y}{prv}") + (t - 1) * H(f"c^{y}{x}"),
        }
        rules.append(TransportRule(f"phi^{x}", basis_pqrs(x), basis_pqrs(y), images,
                                   relations_pqrs(y), t))
    return rules


def route_rules(signature: Sequence[int], ordering: Sequence[int] | None = None) -> list[TransportRule]:
    o = tuple(ordering) if ordering is not None else tuple(signature)
    fam = family_of(signature)
    if fam == "2qr":
        i = o.index(2)
        _, q, r = o[i:] + o[:i]
        return rules_2qr(q, r)
    if fam == "pqr":
        return rules_pqr(*o)
    return rules_pqrs(*o)


def compose_route(signature: Sequence[int], ordering: Sequence[int] | None = None) -> Mat2:
    """Product of transport matrices along the section route."""
    m = Mat2.identity()
    for rule in route_rules(signature, ordering):
        m = transport_matrix(rule) @ m
    return m


def route_matches_step_factors(signature, ordering=None) -> bool:
    return compose_route(signature, ordering) == step_product(step_factors(signature, ordering))
