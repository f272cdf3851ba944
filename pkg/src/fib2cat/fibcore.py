"""Prefibrations over finite data.

A prefibration is a validated functor between finite categories.  This
module decides cartesianness by the hom-set bijection criterion, decides
cocartesianness by duality, constructs cleavages and their pullback
functors, and implements the factorization calculus through chosen lifts
(the induced-morphism and co-induced-morphism operations).

Cartesianness is decided by the bijection form of the universal property:
it quantifies over the same data as the lifting definition but produces a
counterexample (the hom-pair failing injectivity or surjectivity), which is
what the verdict machinery wants.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .choice import Chooser
from .errors import (
    NoFactorization,
    NonUniqueFactorization,
    NotAFibration,
    NotAnOpFibration,
    UnknownMorphism,
    UnknownObject,
)
from .fincat import FinCategory, FinFunctor, opposite, validate_functor


@dataclass(frozen=True)
class Prefibration:
    total: FinCategory
    base: FinCategory
    proj: FinFunctor

    def __post_init__(self):
        if self.proj.source is not self.total or self.proj.target is not self.base:
            raise UnknownObject(
                f"projection {self.proj.name} does not match total/base", ()
            )

    def over_obj(self, P: str) -> str:
        return self.proj.on_obj(P)

    def over(self, p: str) -> str:
        return self.proj.on_mor(p)

    def objects_over(self, A: str) -> tuple[str, ...]:
        return self._obj_index.get(A, ())

    def morphisms_over(self, f: str) -> tuple[str, ...]:
        return self._mor_index.get(f, ())

    def hom_over(self, f: str, P: str, Q: str) -> tuple[str, ...]:
        """Morphisms P -> Q lying over the base morphism f."""
        return self._hom_over_index.get((f, P, Q), ())

    def is_vertical(self, p: str) -> bool:
        return self.base.is_identity(self.over(p))

    @cached_property
    def _obj_index(self) -> dict[str, tuple[str, ...]]:
        idx: dict[str, list[str]] = {}
        for P in self.total.objects:
            idx.setdefault(self.over_obj(P), []).append(P)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _mor_index(self) -> dict[str, tuple[str, ...]]:
        idx: dict[str, list[str]] = {}
        for p in self.total.morphisms:
            idx.setdefault(self.over(p), []).append(p)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _hom_over_index(self) -> dict[tuple[str, str, str], tuple[str, ...]]:
        idx: dict[tuple[str, str, str], list[str]] = {}
        for p in self.total.morphisms:
            key = (self.over(p), self.total.src[p], self.total.tgt[p])
            idx.setdefault(key, []).append(p)
        return {k: tuple(v) for k, v in idx.items()}

    def __repr__(self) -> str:
        return f"Prefibration({self.proj.name}: {self.total.name} -> {self.base.name})"


@dataclass(frozen=True)
class CartesianWitness:
    morphism: str
    over: str
    kind: str  # "cartesian" | "cocartesian"


def prefibration(name: str, total: FinCategory, base: FinCategory,
                 obj_map: Mapping[str, str], mor_map: Mapping[str, str]) -> Prefibration:
    return Prefibration(total, base, validate_functor(name, total, base, obj_map, mor_map))


def fiber(F: Prefibration, A: str) -> FinCategory:
    """Subcategory of the total category on objects over ``A`` and morphisms
    over ``id_A``, materialized as a fresh table (a copy, not a view)."""
    if A not in set(F.base.objects):
        raise UnknownObject(f"{F.base.name}: unknown object {A}", (A,))
    ida = F.base.identity[A]
    objs = F.objects_over(A)
    mors = F.morphisms_over(ida)
    T = F.total
    src = {m: T.src[m] for m in mors}
    tgt = {m: T.tgt[m] for m in mors}
    identity = {x: T.identity[x] for x in objs}
    mor_set = set(mors)
    comp = {
        (g, f): T.comp[(g, f)]
        for g in mors
        for f in mors
        if T.src[g] == T.tgt[f]
    }
    assert all(h in mor_set for h in comp.values())
    return FinCategory(f"{T.name}^{A}", objs, mors, src, tgt, identity, comp)


def cartesian_failure(F: Prefibration, q: str) -> tuple | None:
    """None if ``q`` is cartesian, else a witness tuple.

    ``q`` over ``g: B -> C`` is cartesian iff for every ``f: A -> B`` and
    every ``P`` over ``A``, post-composition with ``q`` bijects the morphisms
    ``P -> src(q)`` over ``f`` onto the morphisms ``P -> tgt(q)`` over ``g.f``.
    """
    if q not in F.total.src:
        raise UnknownMorphism(f"{F.total.name}: unknown morphism {q}", (q,))
    T, B = F.total, F.base
    g = F.over(q)
    Q, R = T.src[q], T.tgt[q]
    for f in B.morphisms_into(B.src[g]):
        gf = B.compose(g, f)
        for P in F.objects_over(B.src[f]):
            dom = F.hom_over(f, P, Q)
            cod = set(F.hom_over(gf, P, R))
            image = [T.compose(q, p) for p in dom]
            if len(set(image)) != len(image):
                return ("injectivity", q, f, P)
            if set(image) != cod:
                return ("surjectivity", q, f, P)
    return None


def is_cartesian(F: Prefibration, q: str) -> bool:
    return cartesian_failure(F, q) is None


def opposite_prefibration(F: Prefibration) -> Prefibration:
    top = opposite(F.total)
    bop = opposite(F.base)
    proj = FinFunctor(
        F.proj.name + "_op", top, bop, dict(F.proj.obj_map), dict(F.proj.mor_map)
    )
    return Prefibration(top, bop, proj)


def is_cocartesian(F: Prefibration, p: str) -> bool:
    """Dual of is_cartesian, decided on the opposite prefibration."""
    return is_cartesian(_op_cache(F), p)


def cocartesian_failure(F: Prefibration, p: str) -> tuple | None:
    return cartesian_failure(_op_cache(F), p)


_OP_CACHE: dict[int, Prefibration] = {}


def _op_cache(F: Prefibration) -> Prefibration:
    key = id(F)
    if key not in _OP_CACHE:
        _OP_CACHE[key] = opposite_prefibration(F)
    return _OP_CACHE[key]


def weak_cocartesian(F: Prefibration, p: str) -> bool:
    """The fiberwise criterion: composition with ``p`` bijects vertical
    hom-sets out of ``tgt(p)`` onto hom-sets over ``proj(p)`` out of ``src(p)``.

    Agrees with is_cocartesian on fibrations; used as a cross-check oracle.
    """
    T, B = F.total, F.base
    f = F.over(p)
    P, Q = T.src[p], T.tgt[p]
    idb = B.identity[B.tgt[f]]
    for R in F.objects_over(B.tgt[f]):
        dom = F.hom_over(idb, Q, R)
        cod = set(F.hom_over(f, P, R))
        image = [T.compose(r, p) for r in dom]
        if len(set(image)) != len(image) or set(image) != cod:
            return False
    return True


def find_cartesian_lifts(F: Prefibration, f: str, Q: str) -> list[str]:
    """All cartesian morphisms over ``f`` with codomain ``Q``, input order."""
    if F.over_obj(Q) != F.base.tgt[f]:
        raise UnknownObject(
            f"{Q} does not lie over the target of {f}", (f, Q)
        )
    return [
        q
        for q in F.morphisms_over(f)
        if F.total.tgt[q] == Q and is_cartesian(F, q)
    ]


def find_cocartesian_lifts(F: Prefibration, f: str, P: str) -> list[str]:
    if F.over_obj(P) != F.base.src[f]:
        raise UnknownObject(f"{P} does not lie over the source of {f}", (f, P))
    return [
        p
        for p in F.morphisms_over(f)
        if F.total.src[p] == P and is_cocartesian(F, p)
    ]


def is_fibration(F: Prefibration) -> bool:
    return fibration_failure(F) is None


def fibration_failure(F: Prefibration) -> tuple | None:
    for f in F.base.morphisms:
        for Q in F.objects_over(F.base.tgt[f]):
            if not find_cartesian_lifts(F, f, Q):
                return (f, Q)
    return None


@dataclass(frozen=True)
class Cleavage:
    """A chosen cartesian lift per (base morphism, object over its target),
    with the induced pullback functor per base morphism.

    Lifts over identity morphisms are normalized to identities whenever an
    identity lift exists, so pullback along an identity is the identity
    functor where possible.
    """

    F: Prefibration
    lifts: Mapping[tuple[str, str], str]
    pullback_functors: Mapping[str, FinFunctor]

    def lift(self, f: str, Q: str) -> str:
        return self.lifts[(f, Q)]

    def pullback_obj(self, f: str, Q: str) -> str:
        return self.F.total.src[self.lifts[(f, Q)]]

    def pullback_mor(self, f: str, p: str) -> str:
        return self.pullback_functors[f].on_mor(p)


def build_cleavage(F: Prefibration, seed: int | None = None) -> Cleavage:
    """Choose lifts (seeded-first among candidates) and derive pullback functors.

    Raises NotAFibration with the first (f, Q) lacking a cartesian lift.
    """
    chooser = Chooser(seed)
    lifts: dict[tuple[str, str], str] = {}
    for f in F.base.morphisms:
        is_id = F.base.is_identity(f)
        for Q in F.objects_over(F.base.tgt[f]):
            if is_id:
                # identity morphisms are cartesian lifts of identities
                lifts[(f, Q)] = F.total.identity[Q]
                continue
            cands = find_cartesian_lifts(F, f, Q)
            if not cands:
                raise NotAFibration(
                    f"no cartesian lift of {f} with codomain {Q}", (f, Q)
                )
            lifts[(f, Q)] = chooser.first(cands, f"lift:{f}:{Q}")
    functors = {
        f: _pullback_functor(F, lifts, f) for f in F.base.morphisms
    }
    return Cleavage(F, lifts, functors)


def _pullback_functor(F: Prefibration, lifts: Mapping[tuple[str, str], str], f: str) -> FinFunctor:
    T, B = F.total, F.base
    A, Bo = B.src[f], B.tgt[f]
    ida = B.identity[A]
    obj_map = {Q: T.src[lifts[(f, Q)]] for Q in F.objects_over(Bo)}
    mor_map = {}
    for p in F.morphisms_over(B.identity[Bo]):
        P, Q = T.src[p], T.tgt[p]
        target_over = T.compose(p, lifts[(f, P)])
        sols = [
            u
            for u in F.hom_over(ida, obj_map[P], obj_map[Q])
            if T.compose(lifts[(f, Q)], u) == target_over
        ]
        if len(sols) != 1:
            raise NonUniqueFactorization(
                f"pullback of {p} along {f} has {len(sols)} solutions", (f, p)
            )
        mor_map[p] = sols[0]
    fib_src = fiber(F, Bo)
    fib_tgt = fiber(F, A)
    return validate_functor(f"{f}^*", fib_src, fib_tgt, obj_map, mor_map)


def cartesian_factor(F: Prefibration, t: str, r: str, f: str) -> str:
    """The unique ``x`` over ``f`` with ``t . x == r`` (``t`` cartesian).

    Uniqueness is re-verified by search even though the theory guarantees
    it; a count other than one indicates an invalid stored witness.
    """
    T, B = F.total, F.base
    if B.tgt[f] != B.src[F.over(t)] or B.compose(F.over(t), f) != F.over(r):
        raise NoFactorization(
            f"base of {r} does not factor through {f} then {F.over(t)}", (t, r, f)
        )
    if T.tgt[t] != T.tgt[r]:
        raise NoFactorization(f"{t} and {r} have different codomains", (t, r))
    sols = [
        x for x in F.hom_over(f, T.src[r], T.src[t]) if T.compose(t, x) == r
    ]
    if not sols:
        raise NoFactorization(f"no factorization of {r} through {t} over {f}", (t, r, f))
    if len(sols) > 1:
        raise NonUniqueFactorization(
            f"{len(sols)} factorizations of {r} through {t} over {f}", (t, r, f)
        )
    return sols[0]


def cind(F: Prefibration, cl: Cleavage, p: str, g: str, f: str) -> str:
    """Factor ``p`` (over ``g . f``) through the chosen lift of ``g``.

    Returns the unique morphism over ``f`` whose composite with
    ``cl.lift(g, cod p)`` is ``p``.
    """
    Q = F.total.tgt[p]
    return cartesian_factor(F, cl.lift(g, Q), p, f)


def cocartesian_factor(F: Prefibration, q: str, r: str, g: str) -> str:
    """The unique ``s`` over ``g`` with ``s . q == r`` (``q`` cocartesian)."""
    T, B = F.total, F.base
    if B.src[g] != B.tgt[F.over(q)] or B.compose(g, F.over(q)) != F.over(r):
        raise NoFactorization(
            f"base of {r} does not factor as {g} after {F.over(q)}", (q, r, g)
        )
    if T.src[q] != T.src[r]:
        raise NoFactorization(f"{q} and {r} have different domains", (q, r))
    sols = [
        s for s in F.hom_over(g, T.tgt[q], T.tgt[r]) if T.compose(s, q) == r
    ]
    if not sols:
        raise NoFactorization(f"no factorization of {r} along {q} over {g}", (q, r, g))
    if len(sols) > 1:
        raise NonUniqueFactorization(
            f"{len(sols)} factorizations of {r} along {q} over {g}", (q, r, g)
        )
    return sols[0]


cofactor = cocartesian_factor


@dataclass(frozen=True)
class OpCleavage:
    """Chosen cocartesian lift per (base morphism, object over its source)."""

    F: Prefibration
    colifts: Mapping[tuple[str, str], str]
    split: bool

    def colift(self, f: str, P: str) -> str:
        return self.colifts[(f, P)]


def build_op_cleavage(F: Prefibration, seed: int | None = None) -> OpCleavage:
    chooser = Chooser(seed)
    colifts: dict[tuple[str, str], str] = {}
    for f in F.base.morphisms:
        is_id = F.base.is_identity(f)
        for P in F.objects_over(F.base.src[f]):
            if is_id:
                colifts[(f, P)] = F.total.identity[P]
                continue
            cands = find_cocartesian_lifts(F, f, P)
            if not cands:
                raise NotAnOpFibration(
                    f"no cocartesian lift of {f} with domain {P}", (f, P)
                )
            colifts[(f, P)] = chooser.first(cands, f"colift:{f}:{P}")
    split = True
    T, B = F.total, F.base
    for f in B.morphisms:
        for g in B.morphisms_from(B.tgt[f]):
            gf = B.compose(g, f)
            for P in F.objects_over(B.src[f]):
                down_f = colifts[(f, P)]
                down_g = colifts[(g, T.tgt[down_f])]
                if T.compose(down_g, down_f) != colifts[(gf, P)]:
                    split = False
    return OpCleavage(F, colifts, split)
