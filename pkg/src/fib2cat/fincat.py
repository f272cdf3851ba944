"""Finite-category kernel.

Categories are explicit tables: object/morphism identifier sequences, total
src/tgt/identity maps and a composition table keyed by composable pairs.
Every predicate here decides its universal property by exhaustive
enumeration, which is the point: these are the trusted primitives the rest
of the engine is checked against.

Ordering convention: ``objects`` and ``morphisms`` keep their input order,
and every search iterates in that order, so "first found" is reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    AssociativityViolation,
    CompositionDomainError,
    IdentityViolation,
    MissingComposite,
    SizeBudgetExceeded,
    UnknownMorphism,
    UnknownObject,
)

DEFAULT_MORPHISM_CAP = 10_000


@dataclass(frozen=True)
class FinCategory:
    """A finite category as explicit tables.

    ``comp`` is keyed by ``(g, f)`` with ``src(g) == tgt(f)`` and stores
    ``g after f``.  Lookups on non-composable pairs are programming errors.
    """

    name: str
    objects: tuple[str, ...]
    morphisms: tuple[str, ...]
    src: Mapping[str, str]
    tgt: Mapping[str, str]
    identity: Mapping[str, str]
    comp: Mapping[tuple[str, str], str]

    def compose(self, g: str, f: str) -> str:
        try:
            return self.comp[(g, f)]
        except KeyError:
            raise CompositionDomainError(
                f"{self.name}: pair ({g}, {f}) is not composable", (g, f)
            ) from None

    def compose_path(self, *path: str) -> str:
        """Compose ``path`` written outermost-first: compose_path(h, g, f) = h(g(f))."""
        out = path[-1]
        for m in reversed(path[:-1]):
            out = self.compose(m, out)
        return out

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return self._hom_index.get((x, y), ())

    def is_identity(self, m: str) -> bool:
        return self.identity.get(self.src[m]) == m

    def morphisms_into(self, y: str) -> tuple[str, ...]:
        return self._into_index.get(y, ())

    def morphisms_from(self, x: str) -> tuple[str, ...]:
        return self._from_index.get(x, ())

    def inverse(self, m: str) -> str | None:
        """The two-sided inverse of ``m`` if one exists (unique if so)."""
        x, y = self.src[m], self.tgt[m]
        for n in self.hom(y, x):
            if (
                self.compose(n, m) == self.identity[x]
                and self.compose(m, n) == self.identity[y]
            ):
                return n
        return None

    def is_iso(self, m: str) -> bool:
        return self.inverse(m) is not None

    @cached_property
    def _hom_index(self) -> dict[tuple[str, str], tuple[str, ...]]:
        idx: dict[tuple[str, str], list[str]] = {}
        for m in self.morphisms:
            idx.setdefault((self.src[m], self.tgt[m]), []).append(m)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _into_index(self) -> dict[str, tuple[str, ...]]:
        idx: dict[str, list[str]] = {}
        for m in self.morphisms:
            idx.setdefault(self.tgt[m], []).append(m)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _from_index(self) -> dict[str, tuple[str, ...]]:
        idx: dict[str, list[str]] = {}
        for m in self.morphisms:
            idx.setdefault(self.src[m], []).append(m)
        return {k: tuple(v) for k, v in idx.items()}

    def __repr__(self) -> str:
        return (
            f"FinCategory({self.name!r}, {len(self.objects)} objects, "
            f"{len(self.morphisms)} morphisms)"
        )


@dataclass(frozen=True)
class FinFunctor:
    """A functor given by total object and morphism maps; validated on build."""

    name: str
    source: FinCategory
    target: FinCategory
    obj_map: Mapping[str, str]
    mor_map: Mapping[str, str]

    def on_obj(self, x: str) -> str:
        return self.obj_map[x]

    def on_mor(self, m: str) -> str:
        return self.mor_map[m]

    @cached_property
    def key(self) -> tuple:
        return (
            self.source.name,
            self.target.name,
            tuple(sorted(self.obj_map.items())),
            tuple(sorted(self.mor_map.items())),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinFunctor) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"FinFunctor({self.name!r}: {self.source.name} -> {self.target.name})"


@dataclass(frozen=True)
class NatTransform:
    """Natural transformation; components indexed by source-category objects."""

    source_functor: FinFunctor
    target_functor: FinFunctor
    components: Mapping[str, str]

    def validate(self) -> "NatTransform":
        F, G = self.source_functor, self.target_functor
        C, D = F.source, F.target
        for x in C.objects:
            c = self.components[x]
            if D.src[c] != F.on_obj(x) or D.tgt[c] != G.on_obj(x):
                raise UnknownMorphism(
                    f"component at {x} has wrong endpoints", (x, c)
                )
        for m in C.morphisms:
            x, y = C.src[m], C.tgt[m]
            left = D.compose(self.components[y], F.on_mor(m))
            right = D.compose(G.on_mor(m), self.components[x])
            if left != right:
                raise UnknownMorphism(f"naturality fails at {m}", (m, left, right))
        return self


@dataclass(frozen=True)
class ProductDiagram:
    left: str
    vertex: str
    right: str
    proj1: str
    proj2: str


@dataclass(frozen=True)
class PullbackSquare:
    """Commuting square over the cospan ``left --f--> corner <--g-- right``.

    ``apex`` comes with projections ``p1: apex -> left`` and
    ``p2: apex -> right``; ``f . p1 == g . p2``.
    """

    apex: str
    left: str
    right: str
    corner: str
    p1: str
    p2: str
    f: str
    g: str


@dataclass(frozen=True)
class TerminalWitness:
    object: str


def validate_category(
    name: str,
    objects: Sequence[str],
    morphisms: Sequence[tuple[str, str, str]],
    identities: Mapping[str, str],
    composites: Mapping[tuple[str, str], str],
    max_morphisms: int = DEFAULT_MORPHISM_CAP,
) -> FinCategory:
    """Build a FinCategory from raw tables, or fail naming the offender.

    ``morphisms`` lists ``(id, src, tgt)`` triples; ``composites`` is keyed by
    ``(g, f)`` meaning ``g after f``.  Checks identifier sanity, totality of
    composition on composable pairs, endpoint coherence, both identity laws
    and full associativity.
    """
    if len(morphisms) > max_morphisms:
        raise SizeBudgetExceeded(
            f"{name}: {len(morphisms)} morphisms exceed the cap {max_morphisms}",
            (name, str(len(morphisms))),
        )
    objs = tuple(objects)
    obj_set = set(objs)
    if len(obj_set) != len(objs):
        raise UnknownObject(f"{name}: duplicate object identifiers", (name,))
    mors = tuple(m for m, _, _ in morphisms)
    if len(set(mors)) != len(mors):
        raise UnknownMorphism(f"{name}: duplicate morphism identifiers", (name,))
    src = {m: s for m, s, _ in morphisms}
    tgt = {m: t for m, _, t in morphisms}
    for m, s, t in morphisms:
        if s not in obj_set:
            raise UnknownObject(f"{name}: morphism {m} has unknown source {s}", (m, s))
        if t not in obj_set:
            raise UnknownObject(f"{name}: morphism {m} has unknown target {t}", (m, t))

    identity = dict(identities)
    for x in objs:
        if x not in identity:
            raise IdentityViolation(f"{name}: object {x} has no identity", (x,))
        i = identity[x]
        if i not in src or src[i] != x or tgt[i] != x:
            raise IdentityViolation(
                f"{name}: identity of {x} is not an endomorphism of {x}", (x, i)
            )

    comp = dict(composites)
    mor_set = set(mors)
    for (g, f), h in comp.items():
        if g not in mor_set or f not in mor_set:
            raise UnknownMorphism(
                f"{name}: composite entry on unknown morphisms ({g}, {f})", (g, f)
            )
        if src[g] != tgt[f]:
            raise CompositionDomainError(
                f"{name}: table entry ({g}, {f}) is not a composable pair", (g, f)
            )
        if h not in mor_set:
            raise UnknownMorphism(
                f"{name}: composite of ({g}, {f}) is unknown morphism {h}", (g, f, h)
            )
        if src[h] != src[f] or tgt[h] != tgt[g]:
            raise MissingComposite(
                f"{name}: composite {h} of ({g}, {f}) has wrong endpoints",
                (g, f, h),
            )
    for f in mors:
        for g in mors:
            if src[g] == tgt[f] and (g, f) not in comp:
                raise MissingComposite(
                    f"{name}: no composite recorded for ({g}, {f})", (g, f)
                )

    by_src: dict[str, list[str]] = {}
    for m in mors:
        by_src.setdefault(src[m], []).append(m)

    for f in mors:
        left = comp[(identity[tgt[f]], f)]
        if left != f:
            raise IdentityViolation(
                f"{name}: id . {f} = {left} != {f}", (identity[tgt[f]], f)
            )
        right = comp[(f, identity[src[f]])]
        if right != f:
            raise IdentityViolation(
                f"{name}: {f} . id = {right} != {f}", (f, identity[src[f]])
            )

    for f in mors:
        for g in by_src.get(tgt[f], ()):
            gf = comp[(g, f)]
            for h in by_src.get(tgt[g], ()):
                if comp[(h, gf)] != comp[(comp[(h, g)], f)]:
                    raise AssociativityViolation(
                        f"{name}: ({h} . {g}) . {f} != {h} . ({g} . {f})",
                        (h, g, f),
                    )

    return FinCategory(name, objs, mors, src, tgt, identity, comp)


def _require_object(C: FinCategory, x: str) -> None:
    if x not in C.src and x not in set(C.objects):
        raise UnknownObject(f"{C.name}: unknown object {x}", (x,))


def _require_morphism(C: FinCategory, m: str) -> None:
    if m not in C.src:
        raise UnknownMorphism(f"{C.name}: unknown morphism {m}", (m,))


def is_terminal(C: FinCategory, a: str) -> bool:
    """True iff every hom-set into ``a`` is a singleton."""
    if a not in set(C.objects):
        raise UnknownObject(f"{C.name}: unknown object {a}", (a,))
    return all(len(C.hom(x, a)) == 1 for x in C.objects)


def find_terminals(C: FinCategory) -> list[str]:
    return [a for a in C.objects if is_terminal(C, a)]


def mediators(
    C: FinCategory, x: str, vertex: str, proj1: str, proj2: str, p: str, q: str
) -> list[str]:
    """All m: x -> vertex with proj1 . m == p and proj2 . m == q."""
    return [
        m
        for m in C.hom(x, vertex)
        if C.compose(proj1, m) == p and C.compose(proj2, m) == q
    ]


def is_product_diagram(C: FinCategory, d: ProductDiagram) -> bool:
    """Exhaustive unique-mediator check over every cone."""
    for m in (d.proj1, d.proj2):
        _require_morphism(C, m)
    if C.src[d.proj1] != d.vertex or C.tgt[d.proj1] != d.left:
        raise UnknownMorphism(
            f"{C.name}: proj1 endpoints do not match the diagram", (d.proj1,)
        )
    if C.src[d.proj2] != d.vertex or C.tgt[d.proj2] != d.right:
        raise UnknownMorphism(
            f"{C.name}: proj2 endpoints do not match the diagram", (d.proj2,)
        )
    for x in C.objects:
        for p in C.hom(x, d.left):
            for q in C.hom(x, d.right):
                if len(mediators(C, x, d.vertex, d.proj1, d.proj2, p, q)) != 1:
                    return False
    return True


def find_products(C: FinCategory, a: str, b: str) -> list[ProductDiagram]:
    """All product diagrams over ``(a, b)``, in deterministic order."""
    for x in (a, b):
        if x not in set(C.objects):
            raise UnknownObject(f"{C.name}: unknown object {x}", (x,))
    found = []
    for v in C.objects:
        for p1 in C.hom(v, a):
            for p2 in C.hom(v, b):
                d = ProductDiagram(a, v, b, p1, p2)
                if is_product_diagram(C, d):
                    found.append(d)
    return found


def is_pullback_square(C: FinCategory, s: PullbackSquare) -> bool:
    """Commutes, and every commuting cone has exactly one mediator."""
    for m in (s.p1, s.p2, s.f, s.g):
        _require_morphism(C, m)
    if (
        C.src[s.p1] != s.apex
        or C.tgt[s.p1] != s.left
        or C.src[s.p2] != s.apex
        or C.tgt[s.p2] != s.right
        or C.src[s.f] != s.left
        or C.tgt[s.f] != s.corner
        or C.src[s.g] != s.right
        or C.tgt[s.g] != s.corner
    ):
        raise UnknownMorphism(f"{C.name}: square endpoints do not match", (s.apex,))
    if C.compose(s.f, s.p1) != C.compose(s.g, s.p2):
        return False
    for x in C.objects:
        for q1 in C.hom(x, s.left):
            for q2 in C.hom(x, s.right):
                if C.compose(s.f, q1) != C.compose(s.g, q2):
                    continue
                if len(mediators(C, x, s.apex, s.p1, s.p2, q1, q2)) != 1:
                    return False
    return True


def find_pullbacks(C: FinCategory, f: str, g: str) -> list[PullbackSquare]:
    """All pullback squares over the cospan ``f, g`` (must share a target)."""
    for m in (f, g):
        _require_morphism(C, m)
    if C.tgt[f] != C.tgt[g]:
        raise UnknownMorphism(
            f"{C.name}: {f} and {g} do not form a cospan", (f, g)
        )
    left, right, corner = C.src[f], C.src[g], C.tgt[f]
    found = []
    for v in C.objects:
        for p1 in C.hom(v, left):
            for p2 in C.hom(v, right):
                s = PullbackSquare(v, left, right, corner, p1, p2, f, g)
                if is_pullback_square(C, s):
                    found.append(s)
    return found


def square_id(p: str, f: str, x: str, y: str) -> str:
    """Identifier of the commuting square ``(p, f): x -> y`` in an arrow category.

    Identical pairs ``(p, f)`` can connect distinct objects, so the identifier
    carries its endpoints.
    """
    return f"[{p};{f}]@{x}>{y}"


@dataclass(frozen=True)
class ArrowCategoryData:
    """An arrow category together with the pair decoding of its morphism ids."""

    category: FinCategory
    parts: Mapping[str, tuple[str, str]]  # morphism id -> (p, f)


def arrow_data(C: FinCategory, max_morphisms: int = DEFAULT_MORPHISM_CAP) -> ArrowCategoryData:
    """The category of morphisms of ``C`` and commuting squares, plus decoding.

    An object is a morphism ``x`` of ``C`` (standing for the triple
    ``(src x, tgt x, x)``); a morphism ``x -> y`` is a pair ``(p, f)`` with
    ``y . p == f . x``.  Composition is componentwise.
    """
    objs = tuple(C.morphisms)
    mors: list[tuple[str, str, str]] = []
    parts: dict[str, tuple[str, str]] = {}
    for x in objs:
        for y in objs:
            for p in C.hom(C.src[x], C.src[y]):
                for f in C.hom(C.tgt[x], C.tgt[y]):
                    if C.compose(y, p) == C.compose(f, x):
                        mid = square_id(p, f, x, y)
                        mors.append((mid, x, y))
                        parts[mid] = (p, f)
    if len(mors) > max_morphisms:
        raise SizeBudgetExceeded(
            f"arrow category of {C.name}: {len(mors)} morphisms exceed cap",
            (C.name, str(len(mors))),
        )
    identity = {
        x: square_id(C.identity[C.src[x]], C.identity[C.tgt[x]], x, x) for x in objs
    }
    src = {m: s for m, s, _ in mors}
    tgt = {m: t for m, _, t in mors}
    comp = {}
    by_src: dict[str, list[str]] = {}
    for m, s, _ in mors:
        by_src.setdefault(s, []).append(m)
    for m, s, t in mors:
        p, f = parts[m]
        for n in by_src.get(t, ()):
            q, g = parts[n]
            comp[(n, m)] = square_id(C.compose(q, p), C.compose(g, f), s, tgt[n])
    cat = FinCategory(
        f"{C.name}->", objs, tuple(m for m, _, _ in mors), src, tgt, identity, comp
    )
    return ArrowCategoryData(cat, parts)


def arrow_category(C: FinCategory, max_morphisms: int = DEFAULT_MORPHISM_CAP) -> FinCategory:
    return arrow_data(C, max_morphisms).category


def slice_category(C: FinCategory, a: str) -> FinCategory:
    """The slice of ``C`` over ``a``: the fiber of the codomain functor.

    Tables equal the corresponding fiber of ``arrow_category(C)`` on the nose.
    """
    if a not in set(C.objects):
        raise UnknownObject(f"{C.name}: unknown object {a}", (a,))
    ida = C.identity[a]
    objs = tuple(x for x in C.morphisms if C.tgt[x] == a)
    mors = []
    src = {}
    tgt = {}
    parts = {}
    for x in objs:
        for y in objs:
            for p in C.hom(C.src[x], C.src[y]):
                if C.compose(y, p) == x:
                    mid = square_id(p, ida, x, y)
                    mors.append(mid)
                    src[mid] = x
                    tgt[mid] = y
                    parts[mid] = p
    identity = {x: square_id(C.identity[C.src[x]], ida, x, x) for x in objs}
    comp = {}
    for m in mors:
        for n in mors:
            if src[n] == tgt[m]:
                comp[(n, m)] = square_id(
                    C.compose(parts[n], parts[m]), ida, src[m], tgt[n]
                )
    return FinCategory(f"{C.name}/{a}", objs, tuple(mors), src, tgt, identity, comp)


def opposite(C: FinCategory) -> FinCategory:
    """Reverse src/tgt and flip composition arguments; an involution on tables."""
    name = C.name[:-3] if C.name.endswith("_op") else C.name + "_op"
    comp = {(f, g): h for (g, f), h in C.comp.items()}
    return FinCategory(name, C.objects, C.morphisms, dict(C.tgt), dict(C.src), dict(C.identity), comp)


def category_from_poset(
    name: str, elements: Sequence[str], leq: Iterable[tuple[str, str]]
) -> FinCategory:
    """The category of a finite poset (or preorder): at most one morphism x -> y.

    ``leq`` lists the generating relation; reflexive-transitive closure is
    taken here.  Morphism ``x -> y`` is named ``x<=y`` (identity ``x<=x``).
    """
    els = tuple(elements)
    rel = {(x, x) for x in els}
    rel.update(leq)
    changed = True
    while changed:
        changed = False
        for (x, y), (y2, z) in itertools.product(list(rel), list(rel)):
            if y == y2 and (x, z) not in rel:
                rel.add((x, z))
                changed = True
    mors = [(f"{x}<={y}", x, y) for x in els for y in els if (x, y) in rel]
    identities = {x: f"{x}<={x}" for x in els}
    comp = {}
    for mid, x, y in mors:
        for nid, y2, z in mors:
            if y2 == y:
                comp[(nid, mid)] = f"{x}<={z}"
    return validate_category(name, els, mors, identities, comp)


def finset_skeleton(max_size: int, name: str | None = None) -> FinCategory:
    """Full subcategory of finite sets on sizes ``0..max_size``.

    Objects are ``N0..Nk``; a function f: Nm -> Nn is named by its value
    tuple, e.g. ``f01`` maps 0 to 0 and 1 to 1.
    """
    name = name or f"finset{max_size}"
    sizes = range(max_size + 1)
    objs = [f"N{n}" for n in sizes]
    mors = []
    maps: dict[str, tuple[int, ...]] = {}
    for m in sizes:
        for n in sizes:
            for vals in itertools.product(range(n), repeat=m):
                mid = f"f{''.join(str(v) for v in vals)}_{m}to{n}"
                mors.append((mid, f"N{m}", f"N{n}"))
                maps[mid] = vals
    def mor_id(vals: tuple[int, ...], m: int, n: int) -> str:
        return f"f{''.join(str(v) for v in vals)}_{m}to{n}"
    identities = {
        f"N{n}": mor_id(tuple(range(n)), n, n) for n in sizes
    }
    comp = {}
    for mid, msrc, mtgt in mors:
        m_card = int(msrc[1:])
        for nid, nsrc, ntgt in mors:
            if nsrc != mtgt:
                continue
            vals = tuple(maps[nid][v] for v in maps[mid])
            comp[(nid, mid)] = mor_id(vals, m_card, int(ntgt[1:]))
    return validate_category(name, objs, mors, identities, comp)


def check_finite_limits(C: FinCategory) -> tuple[bool, tuple]:
    """Terminal object, all binary products, all pullbacks; witness on failure."""
    if not find_terminals(C):
        return False, ("terminal",)
    for a in C.objects:
        for b in C.objects:
            if not find_products(C, a, b):
                return False, ("product", a, b)
    for f in C.morphisms:
        for g in C.morphisms:
            if C.tgt[f] == C.tgt[g] and not find_pullbacks(C, f, g):
                return False, ("pullback", f, g)
    return True, ()


def validate_functor(
    name: str,
    source: FinCategory,
    target: FinCategory,
    obj_map: Mapping[str, str],
    mor_map: Mapping[str, str],
) -> FinFunctor:
    """Check totality, endpoint/identity/composite preservation exhaustively."""
    tgt_objs = set(target.objects)
    for x in source.objects:
        if x not in obj_map:
            raise UnknownObject(f"functor {name}: no image for object {x}", (x,))
        if obj_map[x] not in tgt_objs:
            raise UnknownObject(
                f"functor {name}: image {obj_map[x]} of {x} unknown", (x, obj_map[x])
            )
    for m in source.morphisms:
        if m not in mor_map:
            raise UnknownMorphism(f"functor {name}: no image for morphism {m}", (m,))
        fm = mor_map[m]
        if fm not in target.src:
            raise UnknownMorphism(f"functor {name}: image {fm} of {m} unknown", (m, fm))
        if target.src[fm] != obj_map[source.src[m]] or target.tgt[fm] != obj_map[source.tgt[m]]:
            raise UnknownMorphism(
                f"functor {name}: image of {m} has wrong endpoints", (m, fm)
            )
    for x in source.objects:
        if mor_map[source.identity[x]] != target.identity[obj_map[x]]:
            raise IdentityViolation(
                f"functor {name}: identity of {x} not preserved", (x,)
            )
    for (g, f), h in source.comp.items():
        if target.compose(mor_map[g], mor_map[f]) != mor_map[h]:
            raise AssociativityViolation(
                f"functor {name}: composite ({g}, {f}) not preserved", (g, f)
            )
    return FinFunctor(name, source, target, dict(obj_map), dict(mor_map))


def identity_functor(C: FinCategory) -> FinFunctor:
    return FinFunctor(
        f"id_{C.name}", C, C, {x: x for x in C.objects}, {m: m for m in C.morphisms}
    )
