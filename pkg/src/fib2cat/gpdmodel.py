"""Finite groupoids as a right-proper homotopical playground.

Groupoids here come in two flavours: table-backed ones (family members,
validated from explicit tables) and structural ones (products, pullbacks,
path objects) whose composition is computed componentwise instead of being
stored, which keeps the constructions over power objects cheap.

On top of them: the folk model-structure predicates (equivalences,
isofibrations, object-injective functors), mapping-path factorizations,
fiberwise-homotopy classes with canonical representatives, and a lazy
oracle presenting the homotopy fibration of a finite family of groupoids
to the 2-category synthesizer.  Morphisms at the homotopy level are
equivalence classes; all equality is canonical-representative equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    ClosureBudgetExceeded,
    CorrespondenceFailure,
    EndpointMismatch,
    FamilyNotClosed,
    IllFormedInstance,
    OracleContractViolation,
    UnknownMorphism,
)
from .fincat import FinCategory


def skey(v):
    """Total order on object/morphism values (strings and nested tuples)."""
    if isinstance(v, str):
        return (0, v)
    return (1, len(v), tuple(skey(x) for x in v))


# ---------------------------------------------------------------------------
# groupoids
# ---------------------------------------------------------------------------


class Gpd:
    """Minimal groupoid interface; subclasses fix the object/morphism model."""

    name: str

    def objects(self) -> tuple: ...
    def hom(self, a, b) -> tuple: ...
    def src(self, m): ...
    def tgt(self, m): ...
    def ident(self, a): ...
    def comp(self, g, f): ...
    def inv(self, m): ...

    def morphisms(self) -> Iterable:
        for a in self.objects():
            for b in self.objects():
                yield from self.hom(a, b)

    def is_identity(self, m) -> bool:
        return m == self.ident(self.src(m))

    def n_morphisms(self) -> int:
        return sum(len(self.hom(a, b)) for a in self.objects() for b in self.objects())

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class FinGroupoid(Gpd):
    """Table-backed groupoid: a finite category with every morphism invertible."""

    def __init__(self, cat: FinCategory):
        self.cat = cat
        self.name = cat.name
        self._inv: dict[str, str] = {}
        for m in cat.morphisms:
            i = cat.inverse(m)
            if i is None:
                raise UnknownMorphism(
                    f"{cat.name}: morphism {m} has no inverse", (m,)
                )
            self._inv[m] = i

    def objects(self):
        return self.cat.objects

    def hom(self, a, b):
        return self.cat.hom(a, b)

    def src(self, m):
        return self.cat.src[m]

    def tgt(self, m):
        return self.cat.tgt[m]

    def ident(self, a):
        return self.cat.identity[a]

    def comp(self, g, f):
        return self.cat.compose(g, f)

    def inv(self, m):
        return self._inv[m]


def as_groupoid(cat: FinCategory) -> FinGroupoid:
    return FinGroupoid(cat)


class ProductGpd(Gpd):
    """Componentwise product; objects and morphisms are pairs."""

    def __init__(self, A: Gpd, B: Gpd, name: str | None = None):
        self.A, self.B = A, B
        self.name = name or f"({A.name}*{B.name})"

    @cached_property
    def _objects(self):
        return tuple(itertools.product(self.A.objects(), self.B.objects()))

    def objects(self):
        return self._objects

    def hom(self, a, b):
        return tuple(
            (m, n)
            for m in self.A.hom(a[0], b[0])
            for n in self.B.hom(a[1], b[1])
        )

    def src(self, m):
        return (self.A.src(m[0]), self.B.src(m[1]))

    def tgt(self, m):
        return (self.A.tgt(m[0]), self.B.tgt(m[1]))

    def ident(self, a):
        return (self.A.ident(a[0]), self.B.ident(a[1]))

    def comp(self, g, f):
        return (self.A.comp(g[0], f[0]), self.B.comp(g[1], f[1]))

    def inv(self, m):
        return (self.A.inv(m[0]), self.B.inv(m[1]))


class PathGpd(Gpd):
    """Objects are the morphisms of ``B``; a morphism ``w -> w'`` is the
    source-side component ``u`` of a commuting square (the target side is
    forced).  Values are triples ``(w, w', u)``."""

    def __init__(self, B: Gpd):
        self.B = B
        self.name = f"path({B.name})"

    @cached_property
    def _objects(self):
        return tuple(self.B.morphisms())

    def objects(self):
        return self._objects

    def second(self, m):
        """The target-side component of the square."""
        w, w2, u = m
        return self.B.comp(w2, self.B.comp(u, self.B.inv(w)))

    def hom(self, a, b):
        return tuple((a, b, u) for u in self.B.hom(self.B.src(a), self.B.src(b)))

    def src(self, m):
        return m[0]

    def tgt(self, m):
        return m[1]

    def ident(self, a):
        return (a, a, self.B.ident(self.B.src(a)))

    def comp(self, g, f):
        return (f[0], g[1], self.B.comp(g[2], f[2]))

    def inv(self, m):
        return (m[1], m[0], self.B.inv(m[2]))


class PullbackGpd(Gpd):
    """Strict pullback of two functors with common target; pairs that agree
    in the target.  Hom-sets are computed by an indexed join and cached."""

    def __init__(self, x: "GFun", y: "GFun", name: str | None = None):
        if x.dst is not y.dst:
            raise EndpointMismatch("pullback legs have different targets", ())
        self.x, self.y = x, y
        self.name = name or f"pb({x.name};{y.name})"
        self._hom_cache: dict = {}

    @cached_property
    def _objects(self):
        return tuple(
            (a, b)
            for a in self.x.src.objects()
            for b in self.y.src.objects()
            if self.x.ob(a) == self.y.ob(b)
        )

    def objects(self):
        return self._objects

    def hom(self, a, b):
        key = (a, b)
        got = self._hom_cache.get(key)
        if got is not None:
            return got
        index: dict = {}
        for n in self.y.src.hom(a[1], b[1]):
            index.setdefault(self.y.mor(n), []).append(n)
        out = []
        for m in self.x.src.hom(a[0], b[0]):
            for n in index.get(self.x.mor(m), ()):
                out.append((m, n))
        out = tuple(out)
        self._hom_cache[key] = out
        return out

    def src(self, m):
        return (self.x.src.src(m[0]), self.y.src.src(m[1]))

    def tgt(self, m):
        return (self.x.src.tgt(m[0]), self.y.src.tgt(m[1]))

    def ident(self, a):
        return (self.x.src.ident(a[0]), self.y.src.ident(a[1]))

    def comp(self, g, f):
        return (self.x.src.comp(g[0], f[0]), self.y.src.comp(g[1], f[1]))

    def inv(self, m):
        return (self.x.src.inv(m[0]), self.y.src.inv(m[1]))


class GFun:
    """Functor between groupoids, stored extensionally; equality and hashing
    go through a canonical key."""

    __slots__ = ("name", "src", "dst", "obj_map", "mor_map", "_key", "_hash")

    def __init__(self, name: str, src: Gpd, dst: Gpd, obj_map: Mapping, mor_map: Mapping):
        self.name = name
        self.src = src
        self.dst = dst
        self.obj_map = obj_map
        self.mor_map = mor_map
        self._key = None
        self._hash = None

    def ob(self, o):
        return self.obj_map[o]

    def mor(self, m):
        return self.mor_map[m]

    @property
    def key(self):
        # totality over the canonical source enumeration makes sorting
        # unnecessary for a well-defined equality key
        if self._key is None:
            self._key = (
                self.src.name,
                self.dst.name,
                tuple(self.obj_map[o] for o in self.src.objects()),
                tuple(self.mor_map[m] for m in self.src.morphisms()),
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, GFun) and self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __repr__(self):
        return f"GFun({self.name!r}: {self.src.name} -> {self.dst.name})"


def gfun(name: str, src: Gpd, dst: Gpd, obj_map: Mapping, mor_map: Mapping,
         check: bool = True) -> GFun:
    F = GFun(name, src, dst, dict(obj_map), dict(mor_map))
    if check:
        validate_gfun(F)
    return F


def validate_gfun(F: GFun) -> GFun:
    S, T = F.src, F.dst
    for o in S.objects():
        if F.ob(o) not in set(T.objects()):
            raise UnknownMorphism(f"{F.name}: bad object image at {o}", (str(o),))
        if F.mor(S.ident(o)) != T.ident(F.ob(o)):
            raise UnknownMorphism(f"{F.name}: identity not preserved at {o}", (str(o),))
    for m in S.morphisms():
        fm = F.mor(m)
        if T.src(fm) != F.ob(S.src(m)) or T.tgt(fm) != F.ob(S.tgt(m)):
            raise UnknownMorphism(f"{F.name}: endpoints broken at {m}", (str(m),))
    for a in S.objects():
        for b in S.objects():
            for m in S.hom(a, b):
                for c in S.objects():
                    for n in S.hom(b, c):
                        if F.mor(S.comp(n, m)) != T.comp(F.mor(n), F.mor(m)):
                            raise UnknownMorphism(
                                f"{F.name}: composite not preserved", (str(m), str(n))
                            )
    return F


def gfun_id(G: Gpd) -> GFun:
    return GFun(
        f"id[{G.name}]", G, G,
        {o: o for o in G.objects()},
        {m: m for m in G.morphisms()},
    )


def gfun_comp(g: GFun, f: GFun) -> GFun:
    if f.dst is not g.src:
        raise EndpointMismatch(f"cannot compose {g.name} after {f.name}", ())
    return GFun(
        f"({g.name}.{f.name})", f.src, g.dst,
        {o: g.ob(f.ob(o)) for o in f.src.objects()},
        {m: g.mor(f.mor(m)) for m in f.src.morphisms()},
    )


def constant_gfun(src: Gpd, dst: Gpd, obj) -> GFun:
    return GFun(
        f"const[{obj}]", src, dst,
        {o: obj for o in src.objects()},
        {m: dst.ident(obj) for m in src.morphisms()},
    )


# ---------------------------------------------------------------------------
# model structure predicates
# ---------------------------------------------------------------------------


def is_inj_on_objects(F: GFun) -> bool:
    imgs = [F.ob(o) for o in F.src.objects()]
    return len(set(map(skey, imgs))) == len(imgs)


def is_isofibration(F: GFun) -> bool:
    """Every morphism of the target starting at an image object lifts."""
    for a in F.src.objects():
        fa = F.ob(a)
        for t in F.dst.objects():
            for u in F.dst.hom(fa, t):
                if not any(
                    F.mor(m) == u
                    for b in F.src.objects()
                    for m in F.src.hom(a, b)
                ):
                    return False
    return True


def is_equivalence(F: GFun) -> bool:
    """Fully faithful and essentially surjective, checked exhaustively."""
    S, T = F.src, F.dst
    for a in S.objects():
        for b in S.objects():
            image = [F.mor(m) for m in S.hom(a, b)]
            target = T.hom(F.ob(a), F.ob(b))
            if len(set(map(skey, image))) != len(image) or len(image) != len(target):
                return False
    for t in T.objects():
        if not any(T.hom(F.ob(a), t) for a in S.objects()):
            return False
    return True


def connected_components(G: Gpd) -> list[list]:
    objs = list(G.objects())
    seen = set()
    comps = []
    for o in objs:
        if o in seen:
            continue
        comp = [o]
        seen.add(o)
        queue = [o]
        while queue:
            cur = queue.pop()
            for o2 in objs:
                if o2 in seen:
                    continue
                if G.hom(cur, o2) or G.hom(o2, cur):
                    seen.add(o2)
                    comp.append(o2)
        comps.append(comp)
    return comps


def quasi_inverse(F: GFun) -> tuple[GFun, dict, dict]:
    """An adjoint quasi-inverse of an equivalence.

    Returns (k, eta, xi) with eta[t]: F(k(t)) -> t, xi[a]: k(F(a)) -> a and
    the triangle F(xi[a]) == eta[F(a)] holding by construction.  Choices are
    the first candidates in enumeration order.
    """
    S, T = F.src, F.dst
    k_obj = {}
    eta = {}
    for t in T.objects():
        found = None
        for a in S.objects():
            homs = T.hom(F.ob(a), t)
            if homs:
                found = (a, homs[0])
                break
        if found is None:
            raise IllFormedInstance(f"{F.name} is not essentially surjective", (str(t),))
        k_obj[t], eta[t] = found

    def preimage(a, b, u):
        for m in S.hom(a, b):
            if F.mor(m) == u:
                return m
        raise IllFormedInstance(f"{F.name} is not full", (str(u),))

    k_mor = {}
    for v in T.morphisms():
        t, t2 = T.src(v), T.tgt(v)
        w = T.comp(T.inv(eta[t2]), T.comp(v, eta[t]))
        k_mor[v] = preimage(k_obj[t], k_obj[t2], w)
    k = GFun(f"qinv[{F.name}]", T, S, k_obj, k_mor)
    xi = {a: preimage(k_obj[F.ob(a)], a, eta[F.ob(a)]) for a in S.objects()}
    return k, eta, xi


def iso_lift(F: GFun, a, u):
    """A chosen lift through an isofibration: a morphism from ``a`` mapping
    to ``u`` (first in enumeration order)."""
    for b in F.src.objects():
        for m in F.src.hom(a, b):
            if F.mor(m) == u:
                return m
    raise IllFormedInstance(f"{F.name}: no lift of {u} at {a}", (str(u),))


# ---------------------------------------------------------------------------
# functor enumeration
# ---------------------------------------------------------------------------


def _comp_triples(G: Gpd):
    triples = []
    for a in G.objects():
        for b in G.objects():
            for m in G.hom(a, b):
                for c in G.objects():
                    for n in G.hom(b, c):
                        triples.append((n, m, G.comp(n, m)))
    return triples


_TRIPLE_CACHE: dict[str, list] = {}


def functors_over(X: Gpd, Y: Gpd, yfun: GFun | None = None, base: GFun | None = None):
    """All functors X -> Y, optionally constrained to lie strictly over
    ``base`` through ``yfun`` (i.e. yfun . F == base).  Deterministic order;
    backtracking checks only the composition triples the new assignment
    touches."""
    objs = list(X.objects())
    if X.name not in _TRIPLE_CACHE:
        triples = _comp_triples(X)
        by_mor: dict = {}
        for t in triples:
            for part in set(t):
                by_mor.setdefault(part, []).append(t)
        _TRIPLE_CACHE[X.name] = by_mor
    triples_by_mor = _TRIPLE_CACHE[X.name]
    y_objects = list(Y.objects())

    def obj_candidates(o):
        if yfun is None:
            return y_objects
        want = base.ob(o)
        return [t for t in y_objects if yfun.ob(t) == want]

    mor_list = [
        m for m in X.morphisms() if not X.is_identity(m)
    ]
    results = []

    def mor_candidates(m, obj_assign):
        a, b = X.src(m), X.tgt(m)
        cands = Y.hom(obj_assign[a], obj_assign[b])
        if yfun is None:
            return cands
        want = base.mor(m)
        return [u for u in cands if yfun.mor(u) == want]

    def backtrack_mors(obj_assign, idx, mor_assign):
        if idx == len(mor_list):
            obj_map = {o: obj_assign[o] for o in objs}
            mor_map = {}
            for o in objs:
                mor_map[X.ident(o)] = Y.ident(obj_map[o])
            mor_map.update(mor_assign)
            results.append(GFun(f"enum{len(results)}", X, Y, obj_map, mor_map))
            return
        m = mor_list[idx]
        for u in mor_candidates(m, obj_assign):
            mor_assign[m] = u

            def value(mm):
                if X.is_identity(mm):
                    return Y.ident(obj_assign[X.src(mm)])
                return mor_assign.get(mm)

            ok = True
            for (n, m1, c) in triples_by_mor.get(m, ()):
                vn, vm, vc = value(n), value(m1), value(c)
                if vn is not None and vm is not None and vc is not None:
                    if Y.comp(vn, vm) != vc:
                        ok = False
                        break
            if ok:
                backtrack_mors(obj_assign, idx + 1, mor_assign)
            del mor_assign[m]

    def backtrack_objs(i, obj_assign):
        if i == len(objs):
            backtrack_mors(obj_assign, 0, {})
            return
        o = objs[i]
        for t in obj_candidates(o):
            obj_assign[o] = t
            backtrack_objs(i + 1, obj_assign)
            del obj_assign[o]

    backtrack_objs(0, {})
    return results


def natural_isos(F: GFun, G: GFun):
    """All natural isomorphisms F => G, as component dicts, by propagation
    along connected components."""
    if F.src is not G.src or F.dst is not G.dst:
        raise EndpointMismatch("natural_isos needs parallel functors", ())
    X, Y = F.src, F.dst
    comps = connected_components(X)
    per_comp: list[list[dict]] = []
    for comp in comps:
        root = comp[0]
        assignments = []
        for h0 in Y.hom(F.ob(root), G.ob(root)):
            eta = {root: h0}
            ok = True
            queue = [root]
            visited = {root}
            while queue and ok:
                cur = queue.pop()
                for o2 in comp:
                    if o2 in visited:
                        continue
                    links = X.hom(cur, o2) or tuple(
                        X.inv(m) for m in X.hom(o2, cur)
                    )
                    if not links:
                        continue
                    m = links[0]
                    eta[o2] = Y.comp(G.mor(m), Y.comp(eta[cur], Y.inv(F.mor(m))))
                    visited.add(o2)
                    queue.append(o2)
            # verify naturality on every morphism of the component
            for a in comp:
                for b in comp:
                    for m in X.hom(a, b):
                        if Y.comp(eta[b], F.mor(m)) != Y.comp(G.mor(m), eta[a]):
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                assignments.append(eta)
        per_comp.append(assignments)
    out = []
    for combo in itertools.product(*per_comp):
        eta = {}
        for part in combo:
            eta.update(part)
        out.append(eta)
    return out


# ---------------------------------------------------------------------------
# slice objects and homotopy classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GpdSliceObject:
    """An object of the homotopy fibration: a functor into a base groupoid,
    fibrant when the functor is an isofibration."""

    gpd: Gpd
    base: Gpd
    x: GFun

    @cached_property
    def key(self):
        return ("slice", self.x.key)

    def __eq__(self, other):
        return isinstance(other, GpdSliceObject) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


_VERT_CACHE: dict = {}


def vertical_isos(slice_obj: GpdSliceObject, t):
    """Morphisms out of ``t`` whose image under the structure map is an
    identity, i.e. the gauge moves of fiberwise homotopy at ``t``."""
    ck = (slice_obj.key, t)
    if ck in _VERT_CACHE:
        return _VERT_CACHE[ck]
    Y, y = slice_obj.gpd, slice_obj.x
    out = []
    for t2 in Y.objects():
        for m in Y.hom(t, t2):
            fm = y.mor(m)
            if fm == y.dst.ident(y.dst.src(fm)):
                out.append(m)
    _VERT_CACHE[ck] = tuple(out)
    return _VERT_CACHE[ck]


def canonical_square(tgt_slice: GpdSliceObject, p: GFun) -> GFun:
    """The least member of the fiberwise-homotopy class of ``p``.

    A class member is a gauge transform o -> h_o with every h_o vertical; the
    data vector (object images in order, then morphism images grouped by the
    latest endpoint) is minimized greedily, which yields the global
    lexicographic minimum because block k depends only on the first k gauge
    choices.
    """
    X, Y = p.src, p.dst
    objs = list(X.objects())
    verts = {o: vertical_isos(tgt_slice, p.ob(o)) for o in objs}
    if all(len(v) == 1 for v in verts.values()):
        return p
    chosen: dict = {}

    def entries_for(o, h, upto):
        # morphism images whose latest endpoint is o, given gauges chosen so far
        data = []
        hs = dict(chosen)
        hs[o] = h
        for o2 in upto:
            for m in X.hom(o2, o):
                q = Y.comp(h, Y.comp(p.mor(m), Y.inv(hs[o2])))
                data.append(skey(q))
            if o2 != o:
                for m in X.hom(o, o2):
                    q = Y.comp(hs[o2], Y.comp(p.mor(m), Y.inv(h)))
                    data.append(skey(q))
        return data

    processed: list = []
    for o in objs:
        processed.append(o)
        best = None
        best_h = None
        for h in verts[o]:
            vec = (skey(Y.tgt(h)), entries_for(o, h, processed))
            if best is None or vec < best:
                best = vec
                best_h = h
        chosen[o] = best_h

    obj_map = {o: Y.tgt(chosen[o]) for o in objs}
    mor_map = {}
    for o in objs:
        for o2 in objs:
            for m in X.hom(o, o2):
                mor_map[m] = Y.comp(
                    chosen[o2], Y.comp(p.mor(m), Y.inv(chosen[o]))
                )
    return GFun(f"canon[{p.name}]", X, Y, obj_map, mor_map)


@dataclass(frozen=True)
class HoMorphism:
    """A fiberwise-homotopy class of strict squares, identified by the
    canonical representative."""

    src_obj: GpdSliceObject
    tgt_obj: GpdSliceObject
    over: GFun
    rep: GFun  # canonical member

    @cached_property
    def key(self):
        return (self.src_obj.key, self.tgt_obj.key, self.over.key, self.rep.key)

    def __eq__(self, other):
        return isinstance(other, HoMorphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"HoMorphism(over {self.over.name})"


def ho_morphism(src_obj: GpdSliceObject, tgt_obj: GpdSliceObject, over: GFun,
                rep: GFun, check: bool = True) -> HoMorphism:
    if check:
        left = gfun_comp(tgt_obj.x, rep)
        right = gfun_comp(over, src_obj.x)
        if left.obj_map != right.obj_map or left.mor_map != right.mor_map:
            raise EndpointMismatch("representative square does not commute", ())
    return HoMorphism(src_obj, tgt_obj, over, canonical_square(tgt_obj, rep))


def fiberwise_homotopic(tgt_slice: GpdSliceObject, p: GFun, q: GFun) -> bool:
    """Same endpoints assumed; equality of canonical representatives."""
    if p.src is not q.src or p.dst is not q.dst:
        raise EndpointMismatch("fiberwise homotopy needs parallel squares", ())
    return canonical_square(tgt_slice, p).key == canonical_square(tgt_slice, q).key


def squares_over(P: GpdSliceObject, Q: GpdSliceObject, f: GFun):
    """All strict squares P -> Q over f, in enumeration order."""
    return functors_over(P.gpd, Q.gpd, Q.x, gfun_comp(f, P.x))


def pi_f_classes(P: GpdSliceObject, Q: GpdSliceObject, f: GFun) -> list[list[GFun]]:
    """Partition of the strict squares over f into fiberwise-homotopy classes."""
    buckets: dict = {}
    for s in squares_over(P, Q, f):
        c = canonical_square(Q, s)
        buckets.setdefault(c.key, []).append(s)
    return list(buckets.values())


# ---------------------------------------------------------------------------
# path/cylinder objects and factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathObjectGpd:
    """Factorization of the diagonal of a groupoid through its path object."""

    space: PathGpd
    s: GFun          # B -> B^I, identity paths
    d1: GFun         # source endpoint
    d2: GFun         # target endpoint


def path_object(B: Gpd) -> PathObjectGpd:
    BI = PathGpd(B)
    s = GFun(
        f"s[{B.name}]", B, BI,
        {o: B.ident(o) for o in B.objects()},
        {m: (B.ident(B.src(m)), B.ident(B.tgt(m)), m) for m in B.morphisms()},
    )
    d1 = GFun(
        f"d1[{B.name}]", BI, B,
        {w: B.src(w) for w in BI.objects()},
        {m: m[2] for m in BI.morphisms()},
    )
    d2 = GFun(
        f"d2[{B.name}]", BI, B,
        {w: B.tgt(w) for w in BI.objects()},
        {m: BI.second(m) for m in BI.morphisms()},
    )
    return PathObjectGpd(BI, s, d1, d2)


def walking_iso_gpd() -> FinGroupoid:
    from .fincat import validate_category

    cat = validate_category(
        "I", ["0", "1"],
        [("id0", "0", "0"), ("id1", "1", "1"), ("up", "0", "1"), ("dn", "1", "0")],
        {"0": "id0", "1": "id1"},
        {
            ("id0", "id0"): "id0", ("id1", "id1"): "id1",
            ("up", "id0"): "up", ("id1", "up"): "up",
            ("dn", "id1"): "dn", ("id0", "dn"): "dn",
            ("dn", "up"): "id0", ("up", "dn"): "id1",
        },
    )
    return FinGroupoid(cat)


@dataclass(frozen=True)
class CylinderGpd:
    """Factorization of the fold map of a groupoid through its cylinder."""

    space: ProductGpd
    in1: GFun
    in2: GFun
    collapse: GFun


def cylinder_object(A: Gpd) -> CylinderGpd:
    I = walking_iso_gpd()
    AI = ProductGpd(A, I, name=f"cyl({A.name})")
    def endpoint(tag, obj):
        return GFun(
            f"in{tag}[{A.name}]", A, AI,
            {o: (o, obj) for o in A.objects()},
            {m: (m, I.ident(obj)) for m in A.morphisms()},
        )
    collapse = GFun(
        f"collapse[{A.name}]", AI, A,
        {o: o[0] for o in AI.objects()},
        {m: m[0] for m in AI.morphisms()},
    )
    return CylinderGpd(AI, endpoint("1", "0"), endpoint("2", "1"), collapse)


def factor_we_fib(f: GFun) -> tuple[GFun, GFun, GpdSliceObject]:
    """Mapping-path factorization: an object-injective equivalence followed
    by an isofibration.  The middle object stores pairs (x, iso into f(x))."""
    X, Y = f.src, f.dst
    po = path_object(Y)
    M = PullbackGpd(f, po.d2, name=f"mpath({f.name})")
    w = GFun(
        f"w[{f.name}]", X, M,
        {o: (o, Y.ident(f.ob(o))) for o in X.objects()},
        {m: (m, (Y.ident(f.ob(X.src(m))), Y.ident(f.ob(X.tgt(m))), f.mor(m)))
         for m in X.morphisms()},
    )
    p = GFun(
        f"p[{f.name}]", M, Y,
        {o: Y.src(o[1]) for o in M.objects()},
        {m: m[1][2] for m in M.morphisms()},
    )
    left = gfun_comp(p, w)
    if left.obj_map != {o: f.ob(o) for o in X.objects()}:
        raise IllFormedInstance("mapping-path factorization broken", (f.name,))
    middle = GpdSliceObject(M, Y, p)
    return w, p, middle


# ---------------------------------------------------------------------------
# groupoid builders and families
# ---------------------------------------------------------------------------


def group_gpd(name: str, elements: Sequence[str], mult: Mapping[tuple[str, str], str],
              unit: str) -> FinGroupoid:
    """One-object groupoid of a finite group given by its multiplication table."""
    from .fincat import validate_category

    mors = [(e, "pt", "pt") for e in elements]
    comp = {(g, f): mult[(g, f)] for g in elements for f in elements}
    cat = validate_category(name, ["pt"], mors, {"pt": unit}, comp)
    return FinGroupoid(cat)


def bz2() -> FinGroupoid:
    mult = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    return group_gpd("Z2", ["e", "s"], mult, "e")


def bs3() -> FinGroupoid:
    import itertools as it

    perms = list(it.permutations(range(3)))
    name = {p: "".join(str(i) for i in p) for p in perms}
    mult = {}
    for p in perms:
        for q in perms:
            comp = tuple(p[q[i]] for i in range(3))
            mult[(name[p], name[q])] = name[comp]
    return group_gpd("S3", [name[p] for p in perms], mult, "012")


def terminal_gpd() -> FinGroupoid:
    from .fincat import validate_category

    cat = validate_category(
        "T", ["pt"], [("e", "pt", "pt")], {"pt": "e"}, {("e", "e"): "e"}
    )
    return FinGroupoid(cat)


def contractible_gpd(name: str, objects: Sequence[str]) -> FinGroupoid:
    """Indiscrete groupoid: exactly one morphism between any two objects."""
    from .fincat import validate_category

    mors = [(f"{x}>{y}", x, y) for x in objects for y in objects]
    comp = {}
    for x in objects:
        for y in objects:
            for z in objects:
                comp[(f"{y}>{z}", f"{x}>{y}")] = f"{x}>{z}"
    cat = validate_category(
        name, list(objects), mors, {x: f"{x}>{x}" for x in objects}, comp
    )
    return FinGroupoid(cat)


def table_product(name: str, A: FinGroupoid, B: FinGroupoid) -> tuple[FinGroupoid, GFun, GFun]:
    """Materialize the product of two table groupoids as a table groupoid,
    with its projection functors."""
    from .fincat import validate_category

    def oid(a, b):
        return f"({a},{b})"

    objs = [oid(a, b) for a in A.objects() for b in B.objects()]
    mors = []
    parts = {}
    for m in A.morphisms():
        for n in B.morphisms():
            mid = oid(m, n)
            mors.append((mid, oid(A.src(m), B.src(n)), oid(A.tgt(m), B.tgt(n))))
            parts[mid] = (m, n)
    identities = {
        oid(a, b): oid(A.ident(a), B.ident(b))
        for a in A.objects()
        for b in B.objects()
    }
    comp = {}
    for mid, s, _ in mors:
        m, n = parts[mid]
        for nid, s2, _ in mors:
            m2, n2 = parts[nid]
            if s2 == mors_tgt(A, B, m, n):
                comp[(nid, mid)] = oid(A.comp(m2, m), B.comp(n2, n))
    cat = validate_category(name, objs, mors, identities, comp)
    G = FinGroupoid(cat)
    p1 = GFun(
        f"pr1[{name}]", G, A,
        {oid(a, b): a for a in A.objects() for b in B.objects()},
        {mid: parts[mid][0] for mid, _, _ in mors},
    )
    p2 = GFun(
        f"pr2[{name}]", G, B,
        {oid(a, b): b for a in A.objects() for b in B.objects()},
        {mid: parts[mid][1] for mid, _, _ in mors},
    )
    return G, p1, p2


def mors_tgt(A: Gpd, B: Gpd, m, n) -> str:
    return f"({A.tgt(m)},{B.tgt(n)})"


@dataclass(frozen=True)
class ProductCone:
    vertex: Gpd
    p1: GFun
    p2: GFun


@dataclass(frozen=True)
class GpdFamily:
    """A finite list of groupoids with a chosen terminal member and chosen
    product cones among members."""

    members: tuple[FinGroupoid, ...]
    terminal: FinGroupoid
    cones: Mapping[tuple[str, str], ProductCone]

    def member(self, name: str) -> FinGroupoid:
        for m in self.members:
            if m.name == name:
                return m
        raise FamilyNotClosed(f"no member named {name}", (name,))


def _comparison_to_product(cone: ProductCone) -> GFun:
    V = cone.vertex
    prod = ProductGpd(cone.p1.dst, cone.p2.dst)
    return GFun(
        f"cmp[{V.name}]", V, prod,
        {t: (cone.p1.ob(t), cone.p2.ob(t)) for t in V.objects()},
        {m: (cone.p1.mor(m), cone.p2.mor(m)) for m in V.morphisms()},
    )


def _gfun_iso_inverse(F: GFun) -> GFun:
    obj_inv = {}
    for o in F.src.objects():
        t = F.ob(o)
        if skey(t) in {skey(k) for k in obj_inv}:
            raise FamilyNotClosed(f"{F.name} is not injective on objects", ())
        obj_inv[t] = o
    mor_inv = {}
    for m in F.src.morphisms():
        mor_inv[F.mor(m)] = m
    if len(obj_inv) != len(list(F.dst.objects())) or len(mor_inv) != sum(
        1 for _ in F.dst.morphisms()
    ):
        raise FamilyNotClosed(f"{F.name} is not bijective", ())
    return GFun(f"inv[{F.name}]", F.dst, F.src, obj_inv, mor_inv)


def validate_family(family: GpdFamily) -> None:
    names = [m.name for m in family.members]
    if len(set(names)) != len(names):
        raise FamilyNotClosed("duplicate member names", tuple(names))
    t = family.terminal
    if t.name not in names:
        raise FamilyNotClosed("terminal is not a member", (t.name,))
    if len(t.objects()) != 1 or t.n_morphisms() != 1:
        raise FamilyNotClosed("terminal member is not the trivial groupoid", (t.name,))
    for (a, b), cone in family.cones.items():
        if cone.vertex.name not in names:
            raise FamilyNotClosed(
                f"cone vertex {cone.vertex.name} for ({a}, {b}) is not a member",
                (a, b, cone.vertex.name),
            )
        if cone.p1.dst.name != a or cone.p2.dst.name != b:
            raise FamilyNotClosed(f"cone for ({a}, {b}) has wrong legs", (a, b))
        cmp_iso = _comparison_to_product(cone)
        _gfun_iso_inverse(cmp_iso)  # raises if the cone is not a product


def standard_family() -> GpdFamily:
    """The shipped family: the trivial groupoid, the cyclic group of order
    two, the symmetric group on three letters, a two-object contractible
    groupoid, and two chosen product members."""
    T = terminal_gpd()
    Z2 = bz2()
    S3 = bs3()
    E = contractible_gpd("E", ["u", "v"])
    K4, k1, k2 = table_product("K4", Z2, Z2)
    M, m1, m2 = table_product("M", Z2, E)
    cones: dict[tuple[str, str], ProductCone] = {}
    for X in (T, Z2, S3, E, K4, M):
        cones[("T", X.name)] = ProductCone(
            X, constant_gfun(X, T, "pt"), gfun_id(X)
        )
        cones[(X.name, "T")] = ProductCone(
            X, gfun_id(X), constant_gfun(X, T, "pt")
        )
    cones[("T", "T")] = ProductCone(T, gfun_id(T), gfun_id(T))
    cones[("Z2", "Z2")] = ProductCone(K4, k1, k2)
    cones[("Z2", "E")] = ProductCone(M, m1, m2)
    cones[("E", "Z2")] = ProductCone(M, m2, m1)
    return GpdFamily((T, Z2, S3, E, K4, M), T, cones)


# ---------------------------------------------------------------------------
# the lazy oracle
# ---------------------------------------------------------------------------

DEFAULT_CLOSURE_BUDGET = 5_000


class HoOracle:
    """Homotopy fibration of a groupoid family, presented lazily.

    Fiber objects over a base groupoid are isofibrations into it drawn from
    a bounded constructible closure (terminals, path objects, pullbacks,
    fiber products); morphisms are fiberwise-homotopy classes with canonical
    representatives; all the factorization operations are constructive.

    A nonzero seed flips the orientation of infrastructure products and of
    the chosen path objects, giving a genuinely different equality cleavage
    over the same fibration for transport tests.
    """

    def __init__(self, family: GpdFamily, seed: int | None = None,
                 closure_budget: int = DEFAULT_CLOSURE_BUDGET):
        validate_family(family)
        self.family = family
        self.flip = bool(seed)
        self.closure_budget = closure_budget
        self._members = {m.name: m for m in family.members}
        self._cones: dict[tuple[str, str], ProductCone] = dict(family.cones)
        self._ids: dict[str, GFun] = {}
        self._hom_cache: dict = {}
        self._comp_cache: dict = {}
        self._pair_cache: dict = {}
        self._fibers: dict[str, dict] = {}
        self._objects_total = 0
        self._eq_cache: dict = {}
        self._lift_cache: dict = {}
        self._fprod_cache: dict = {}
        self._tcomp_cache: dict = {}
        self._over_cache: dict = {}
        self._cofactor_cache: dict = {}
        self._cind_cache: dict = {}
        self._ex_cache: dict = {}
        self._pairm_cache: dict = {}
        self._top_cache: dict = {}
        self._cmp_inverse: dict = {}
        self._path_cache: dict[str, PathObjectGpd] = {}

    def _path_object(self, B: Gpd) -> PathObjectGpd:
        # construction is canonicalized: everything downstream compares
        # groupoid instances by identity
        if B.name not in self._path_cache:
            self._path_cache[B.name] = path_object(B)
        return self._path_cache[B.name]

    # -- registry ---------------------------------------------------------

    def _register(self, slice_obj: GpdSliceObject) -> GpdSliceObject:
        base_name = slice_obj.base.name
        per = self._fibers.setdefault(base_name, {})
        if slice_obj.key in per:
            return per[slice_obj.key]
        self._objects_total += len(slice_obj.gpd.objects())
        if self._objects_total > self.closure_budget:
            raise ClosureBudgetExceeded(
                f"fiber closure exceeds {self.closure_budget} groupoid objects",
                (str(self._objects_total),),
            )
        per[slice_obj.key] = slice_obj
        return slice_obj

    # -- base category ------------------------------------------------------

    def base_objects(self):
        return tuple(self._members.values())

    def base_hom(self, A: Gpd, B: Gpd):
        key = (A.name, B.name)
        if key not in self._hom_cache:
            self._hom_cache[key] = tuple(functors_over(A, B))
        return self._hom_cache[key]

    def base_id(self, A: Gpd) -> GFun:
        if A.name not in self._ids:
            self._ids[A.name] = gfun_id(A)
        return self._ids[A.name]

    def base_comp(self, g: GFun, f: GFun) -> GFun:
        key = (g.key, f.key)
        if key not in self._comp_cache:
            self._comp_cache[key] = gfun_comp(g, f)
        return self._comp_cache[key]

    def base_src(self, f: GFun):
        return f.src

    def base_tgt(self, f: GFun):
        return f.dst

    def base_terminal(self):
        return self.family.terminal

    def _cone(self, A: Gpd, B: Gpd) -> ProductCone:
        key = (A.name, B.name)
        if key in self._cones:
            return self._cones[key]
        if self.flip:
            V = ProductGpd(B, A, name=f"({B.name}*{A.name})")
            p1 = GFun(
                f"pr2[{V.name}]", V, A,
                {o: o[1] for o in V.objects()}, {m: m[1] for m in V.morphisms()},
            )
            p2 = GFun(
                f"pr1[{V.name}]", V, B,
                {o: o[0] for o in V.objects()}, {m: m[0] for m in V.morphisms()},
            )
        else:
            V = ProductGpd(A, B)
            p1 = GFun(
                f"pr1[{V.name}]", V, A,
                {o: o[0] for o in V.objects()}, {m: m[0] for m in V.morphisms()},
            )
            p2 = GFun(
                f"pr2[{V.name}]", V, B,
                {o: o[1] for o in V.objects()}, {m: m[1] for m in V.morphisms()},
            )
        cone = ProductCone(V, p1, p2)
        self._cones[key] = cone
        return cone

    def base_product(self, A: Gpd, B: Gpd):
        cone = self._cone(A, B)
        return cone.vertex, cone.p1, cone.p2

    def base_pair(self, f: GFun, g: GFun) -> GFun:
        key = (f.key, g.key)
        if key in self._pair_cache:
            return self._pair_cache[key]
        if f.src is not g.src:
            raise EndpointMismatch("pairing needs a common source", ())
        cone = self._cone(f.dst, g.dst)
        cmp_key = cone.vertex.name
        if cmp_key not in self._cmp_inverse:
            cmp_iso = _comparison_to_product(cone)
            self._cmp_inverse[cmp_key] = (_gfun_iso_inverse(cmp_iso), cmp_iso.dst)
        inv, prod = self._cmp_inverse[cmp_key]
        direct = GFun(
            f"<{f.name},{g.name}>", f.src, prod,
            {o: (f.ob(o), g.ob(o)) for o in f.src.objects()},
            {m: (f.mor(m), g.mor(m)) for m in f.src.morphisms()},
        )
        out = gfun_comp(inv, direct)
        self._pair_cache[key] = out
        return out

    # -- total category -------------------------------------------------------

    def top(self, A: Gpd) -> GpdSliceObject:
        if A.name not in self._top_cache:
            s = GpdSliceObject(A, A, self.base_id(A))
            self._top_cache[A.name] = self._register(s)
        return self._top_cache[A.name]

    def eq(self, B: Gpd):
        if B.name not in self._eq_cache:
            po = self._path_object(B)
            cone = self._cone(B, B)
            if self.flip:
                u = self.base_pair(po.d2, po.d1)
            else:
                u = self.base_pair(po.d1, po.d2)
            eq_slice = self._register(GpdSliceObject(po.space, cone.vertex, u))
            delta = self.base_pair(self.base_id(B), self.base_id(B))
            rho = ho_morphism(self.top(B), eq_slice, delta, po.s)
            self._eq_cache[B.name] = (eq_slice, rho, po)
        eq_slice, rho, _ = self._eq_cache[B.name]
        return eq_slice, rho

    def path_data(self, B: Gpd) -> PathObjectGpd:
        self.eq(B)
        return self._eq_cache[B.name][2]

    def seed_fibers(self) -> None:
        """Register a nontrivial fiber object per member so naturality checks
        quantify over more than the terminal."""
        for B in self.family.members:
            po = self._path_object(B)
            self._register(GpdSliceObject(po.space, B, po.d1))

    def fiber_objects(self, A: Gpd):
        return tuple(self._fibers.get(A.name, {}).values())

    def obj_over(self, P: GpdSliceObject):
        return P.base

    def mor_over(self, p: HoMorphism):
        return p.over

    def tsrc(self, p: HoMorphism):
        return p.src_obj

    def ttgt(self, p: HoMorphism):
        return p.tgt_obj

    def tid(self, P: GpdSliceObject) -> HoMorphism:
        return HoMorphism(P, P, self.base_id(P.base), canonical_square(P, gfun_id(P.gpd)))

    def tcomp(self, q: HoMorphism, p: HoMorphism) -> HoMorphism:
        key = (q.key, p.key)
        if key not in self._tcomp_cache:
            if p.tgt_obj != q.src_obj:
                raise EndpointMismatch("composition endpoint mismatch", ())
            rep = gfun_comp(q.rep, p.rep)
            over = self.base_comp(q.over, p.over)
            self._tcomp_cache[key] = HoMorphism(
                p.src_obj, q.tgt_obj, over, canonical_square(q.tgt_obj, rep)
            )
        return self._tcomp_cache[key]

    def hom_over(self, f: GFun, P: GpdSliceObject, Q: GpdSliceObject):
        key = (f.key, P.key, Q.key)
        if key not in self._over_cache:
            seen = set()
            out = []
            for s in squares_over(P, Q, f):
                hm = HoMorphism(P, Q, f, canonical_square(Q, s))
                if hm.key not in seen:
                    seen.add(hm.key)
                    out.append(hm)
            self._over_cache[key] = tuple(out)
        return self._over_cache[key]

    def fiber_product(self, P: GpdSliceObject, Q: GpdSliceObject):
        key = (P.key, Q.key)
        if key not in self._fprod_cache:
            if P.base is not Q.base:
                raise EndpointMismatch("fiber product needs a common base", ())
            PB = PullbackGpd(P.x, Q.x, name=_hash_name("fprod", P.key, Q.key))
            pr1f = GFun(
                f"fp1[{PB.name}]", PB, P.gpd,
                {o: o[0] for o in PB.objects()}, {m: m[0] for m in PB.morphisms()},
            )
            pr2f = GFun(
                f"fp2[{PB.name}]", PB, Q.gpd,
                {o: o[1] for o in PB.objects()}, {m: m[1] for m in PB.morphisms()},
            )
            vertex = self._register(
                GpdSliceObject(PB, P.base, gfun_comp(P.x, pr1f))
            )
            idb = self.base_id(P.base)
            pr1 = ho_morphism(vertex, P, idb, pr1f, check=False)
            pr2 = ho_morphism(vertex, Q, idb, pr2f, check=False)
            self._fprod_cache[key] = (vertex, pr1, pr2)
        return self._fprod_cache[key]

    def pair(self, q: HoMorphism, r: HoMorphism) -> HoMorphism:
        memo = (q.key, r.key)
        if memo in self._pairm_cache:
            return self._pairm_cache[memo]
        if q.src_obj != r.src_obj or q.over.key != r.over.key:
            raise EndpointMismatch("pairing needs a common source and base", ())
        vertex, pr1, pr2 = self.fiber_product(q.tgt_obj, r.tgt_obj)
        X = q.src_obj.gpd
        rep = GFun(
            _hash_name("pairrep", q.key, r.key), X, vertex.gpd,
            {o: (q.rep.ob(o), r.rep.ob(o)) for o in X.objects()},
            {m: (q.rep.mor(m), r.rep.mor(m)) for m in X.morphisms()},
        )
        out = HoMorphism(q.src_obj, vertex, q.over, canonical_square(vertex, rep))
        if self.tcomp(pr1, out) != q or self.tcomp(pr2, out) != r:
            raise OracleContractViolation("pairing projections do not recover legs", ())
        self._pairm_cache[memo] = out
        return out

    def cart_lift(self, f: GFun, Q: GpdSliceObject) -> HoMorphism:
        key = (f.key, Q.key)
        if key not in self._lift_cache:
            if f.dst is not Q.base:
                raise EndpointMismatch("lift codomain does not match", ())
            if f.key == self.base_id(f.src).key:
                self._lift_cache[key] = self.tid(Q)
            else:
                PB = PullbackGpd(f, Q.x, name=_hash_name("lift", f.key, Q.key))
                prA = GFun(
                    f"base[{PB.name}]", PB, f.src,
                    {o: o[0] for o in PB.objects()}, {m: m[0] for m in PB.morphisms()},
                )
                prY = GFun(
                    f"total[{PB.name}]", PB, Q.gpd,
                    {o: o[1] for o in PB.objects()}, {m: m[1] for m in PB.morphisms()},
                )
                src = self._register(GpdSliceObject(PB, f.src, prA))
                self._lift_cache[key] = ho_morphism(src, Q, f, prY, check=False)
        return self._lift_cache[key]

    def cind(self, p: HoMorphism, g: GFun, f: GFun) -> HoMorphism:
        memo = (p.key, g.key, f.key)
        if memo in self._cind_cache:
            return self._cind_cache[memo]
        crt = self.cart_lift(g, p.tgt_obj)
        if self.base_comp(g, f).key != p.over.key:
            raise OracleContractViolation("base does not factor for cind", ())
        if g.key == self.base_id(g.src).key:
            return p
        X = p.src_obj.gpd
        fx = gfun_comp(f, p.src_obj.x)
        rep = GFun(
            _hash_name("cind", p.key, g.key, f.key), X, crt.src_obj.gpd,
            {o: (fx.ob(o), p.rep.ob(o)) for o in X.objects()},
            {m: (fx.mor(m), p.rep.mor(m)) for m in X.morphisms()},
        )
        out = HoMorphism(p.src_obj, crt.src_obj, f, canonical_square(crt.src_obj, rep))
        if self.tcomp(crt, out) != p:
            raise OracleContractViolation("cind does not recover its input", ())
        self._cind_cache[memo] = out
        return out

    def cofactor(self, q: HoMorphism, r: HoMorphism, g: GFun) -> HoMorphism:
        key = (q.key, r.key, g.key)
        if key in self._cofactor_cache:
            return self._cofactor_cache[key]
        self.assert_cocartesian(q)
        if q.src_obj != r.src_obj:
            raise OracleContractViolation("cofactor domains differ", ())
        if self.base_comp(g, q.over).key != r.over.key:
            raise OracleContractViolation("base does not factor for cofactor", ())
        k, eta, _ = quasi_inverse(q.rep)
        w = gfun_comp(r.rep, k)
        y = q.tgt_obj.x
        z = r.tgt_obj.x
        Z = r.tgt_obj.gpd
        nu = {}
        for t in q.tgt_obj.gpd.objects():
            mu = g.mor(y.mor(eta[t]))
            nu[skey(t)] = iso_lift(z, w.ob(t), mu)
        obj_map = {t: Z.tgt(nu[skey(t)]) for t in q.tgt_obj.gpd.objects()}
        mor_map = {}
        for m in q.tgt_obj.gpd.morphisms():
            a, b = q.tgt_obj.gpd.src(m), q.tgt_obj.gpd.tgt(m)
            mor_map[m] = Z.comp(nu[skey(b)], Z.comp(w.mor(m), Z.inv(nu[skey(a)])))
        s_hat = GFun(_hash_name("cofac", q.key, r.key, g.key),
                     q.tgt_obj.gpd, Z, obj_map, mor_map)
        out = ho_morphism(q.tgt_obj, r.tgt_obj, g, s_hat, check=True)
        if self.tcomp(out, q) != r:
            raise OracleContractViolation("cofactor does not recover its input", ())
        self._cofactor_cache[key] = out
        return out

    def ex(self, g: GFun, P: GpdSliceObject) -> HoMorphism:
        memo = (g.key, P.key)
        if memo not in self._ex_cache:
            rep = gfun_comp(g, P.x)
            self._ex_cache[memo] = HoMorphism(
                P, self.top(g.dst), g, canonical_square(self.top(g.dst), rep)
            )
        return self._ex_cache[memo]

    def assert_cocartesian(self, q: HoMorphism) -> None:
        if not is_equivalence(q.rep):
            raise OracleContractViolation(
                "asserted cocartesian class has non-equivalence representative", ()
            )

    def is_vertical_iso(self, v: HoMorphism) -> bool:
        return v.over.key == self.base_id(v.over.src).key and is_equivalence(v.rep)

    def same_fibration(self, other) -> bool:
        if not isinstance(other, HoOracle):
            return False
        if tuple(self._members) != tuple(other._members):
            return False
        for name, m in self._members.items():
            if m is not other._members[name]:
                return False
        return True

    def is_cocartesian(self, q: HoMorphism) -> bool:
        return is_equivalence(q.rep)

    def cocartesian_behavioral(self, q: HoMorphism) -> bool:
        """The fiberwise bijection criterion against the registered closure."""
        B = q.tgt_obj.base
        idb = self.base_id(B)
        for R in self.fiber_objects(B):
            dom = self.hom_over(idb, q.tgt_obj, R)
            cod = set(self.hom_over(q.over, q.src_obj, R))
            image = [self.tcomp(s, q) for s in dom]
            if len(set(image)) != len(image) or set(image) != cod:
                return False
        return True


def _hash_name(tag: str, *keys) -> str:
    import hashlib

    h = hashlib.blake2b(repr(keys).encode(), digest_size=6).hexdigest()
    return f"{tag}#{h}"


def ho_oracle(family: GpdFamily, seed: int | None = None,
              closure_budget: int = DEFAULT_CLOSURE_BUDGET) -> HoOracle:
    oracle = HoOracle(family, seed, closure_budget)
    oracle.seed_fibers()
    return oracle


# ---------------------------------------------------------------------------
# verdicts: properness, conformance, classical correspondence
# ---------------------------------------------------------------------------


def check_right_properness_samples(oracle: HoOracle) -> tuple | None:
    """Pull each registered isofibration back along sample equivalences into
    its base (cylinder collapses and path endpoints); the pulled-back leg
    must stay an equivalence."""
    for B in oracle.family.members:
        po = path_object(B)
        cyl = cylinder_object(B)
        weqs = [cyl.collapse, po.d1, po.d2]
        for e in weqs:
            if not is_equivalence(e):
                return (B.name, e.name, "sample not an equivalence")
        for P in oracle.fiber_objects(B):
            if not is_isofibration(P.x):
                return (B.name, "registered structure map not an isofibration")
            for e in weqs:
                PB = PullbackGpd(e, P.x)
                pulled = GFun(
                    f"pulled[{e.name}]", PB, P.gpd,
                    {o: o[1] for o in PB.objects()},
                    {m: m[1] for m in PB.morphisms()},
                )
                if not is_equivalence(pulled):
                    return (B.name, e.name, "pulled-back equivalence fails")
    return None


def conformance(oracle: HoOracle) -> tuple | None:
    """Spot-check the oracle contract: the equality data is a genuine
    cocartesian lift of the diagonal, its factorizations are unique among
    enumerable solutions, and the cocartesian criterion matches behavior."""
    for B in oracle.family.members:
        eq_slice, rho = oracle.eq(B)
        po = oracle.path_data(B)
        if not (is_equivalence(po.s) and is_inj_on_objects(po.s)):
            return (B.name, "path unit not an object-injective equivalence")
        if not is_isofibration(eq_slice.x):
            return (B.name, "equality structure map not an isofibration")
        oracle.assert_cocartesian(rho)
        if not oracle.cocartesian_behavioral(rho):
            return (B.name, "reflexivity fails the behavioral criterion")
        # cofactor uniqueness among enumerable solutions: the symmetry case
        swap_pair = oracle.base_pair(
            oracle.base_product(B, B)[2], oracle.base_product(B, B)[1]
        )
        sols = [
            s
            for s in oracle.hom_over(swap_pair, eq_slice, eq_slice)
            if oracle.tcomp(s, rho) == rho
        ]
        if len(sols) != 1:
            return (B.name, f"{len(sols)} symmetry factorizations")
        if oracle.cofactor(rho, rho, swap_pair) != sols[0]:
            return (B.name, "cofactor disagrees with the enumerated solution")
        # criterion vs behavior on sample non-cocartesian morphisms
        idb = oracle.base_id(B)
        for s in oracle.hom_over(idb, eq_slice, eq_slice)[:4]:
            if oracle.is_cocartesian(s) != oracle.cocartesian_behavioral(s):
                return (B.name, "criterion and behavior disagree")
    return None


def left_homotopy_classes_out_of_pushforward(
    oracle: HoOracle, P: GpdSliceObject, Q: GpdSliceObject, f: GFun
) -> int:
    """Classes of vertical morphisms out of the pushforward of P along f:
    the slice object with the same total groupoid over the target base."""
    moved = GpdSliceObject(P.gpd, f.dst, gfun_comp(f, P.x))
    return len(pi_f_classes(moved, Q, oracle.base_id(f.dst)))


def pushforward_bridge_holds(
    oracle: HoOracle, P: GpdSliceObject, Q: GpdSliceObject, f: GFun
) -> bool:
    """Fiberwise classes over f biject with vertical classes out of the
    pushforward (compared by cardinality of the two enumerations)."""
    direct = len(pi_f_classes(P, Q, f))
    via = left_homotopy_classes_out_of_pushforward(oracle, P, Q, f)
    return direct == via


def read_off_natural_iso(oracle: HoOracle, cell) -> dict:
    """A 2-cell body over a groupoid family is literally a natural iso read
    off objectwise; returns the component dict keyed by skey(object).

    With a flipped path orientation the stored object is the reverse
    isomorphism, so it is inverted on the way out.
    """
    base = oracle.base_tgt(cell.source)
    comp = {}
    for a in cell.body.src_obj.gpd.objects():
        w = cell.body.rep.ob(a)
        if oracle.flip:
            w = base.inv(w)
        comp[a] = w
    return comp


def classical_correspondence(oracle: HoOracle, A: Gpd, B: Gpd, f: GFun, g: GFun) -> tuple | None:
    """The synthesized 2-cells f => g biject with the natural isomorphisms,
    and the bijection intertwines vertical and horizontal composition."""
    from .htpy2cat import Synthesizer

    synth = Synthesizer(oracle)
    cells = synth.two_cells(f, g)
    isos = natural_isos(f, g)
    got = []
    for c in cells:
        eta = read_off_natural_iso(oracle, c)
        got.append(tuple(sorted(eta.items(), key=lambda kv: skey(kv[0]))))
    want = [
        tuple(sorted(eta.items(), key=lambda kv: skey(kv[0]))) for eta in isos
    ]
    if len(set(got)) != len(got) or set(got) != set(want):
        return (f.name, g.name, "cell/natural-iso bijection fails")
    return None


def classical_correspondence_family(oracle: HoOracle) -> tuple | None:
    """Correspondence over every parallel pair in the family, plus the
    intertwining of both compositions with the classical formulas."""
    from .htpy2cat import Synthesizer

    synth = Synthesizer(oracle)
    members = oracle.family.members
    for A in members:
        for B in members:
            for f in oracle.base_hom(A, B):
                for g in oracle.base_hom(A, B):
                    bad = classical_correspondence(oracle, A, B, f, g)
                    if bad is not None:
                        return bad
    # vertical composition = componentwise composition of natural isos
    for A in members:
        for B in members:
            homs = oracle.base_hom(A, B)
            for f in homs:
                for g in homs:
                    for alpha in synth.two_cells(f, g):
                        ra = read_off_natural_iso(oracle, alpha)
                        for h in homs:
                            for beta in synth.two_cells(g, h):
                                rb = read_off_natural_iso(oracle, beta)
                                rc = read_off_natural_iso(
                                    oracle, synth.vcomp(beta, alpha)
                                )
                                for a in A.objects():
                                    wanted = B.comp(rb[a], ra[a])
                                    if rc[a] != wanted:
                                        return (f.name, g.name, h.name,
                                                "vertical composition mismatch")
    # horizontal composition = the diagonal/whiskered classical composite
    for A in members:
        for B in members:
            for C in members:
                for f in oracle.base_hom(A, B):
                    for g in oracle.base_hom(A, B):
                        for alpha in synth.two_cells(f, g):
                            ra = read_off_natural_iso(oracle, alpha)
                            for h in oracle.base_hom(B, C):
                                for k in oracle.base_hom(B, C):
                                    for beta in synth.two_cells(h, k):
                                        rb = read_off_natural_iso(oracle, beta)
                                        rc = read_off_natural_iso(
                                            oracle, synth.hcomp(beta, alpha)
                                        )
                                        for a in A.objects():
                                            left = C.comp(
                                                k.mor(ra[a]),
                                                rb[f.ob(a)],
                                            )
                                            right = C.comp(
                                                rb[g.ob(a)],
                                                h.mor(ra[a]),
                                            )
                                            if left != right or rc[a] != left:
                                                return (
                                                    f.name, h.name,
                                                    "horizontal composition mismatch",
                                                )
    return None
