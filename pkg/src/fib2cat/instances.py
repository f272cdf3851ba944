"""Concrete oracle builders backed by materialized finite data.

Codomain fibrations of finite lex categories, the subobject fibration of
small finite sets, and hand-authored fibrations loaded from files.  Each
builder validates its structure and wraps the result in the oracle contract
the synthesizer consumes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .choice import Chooser
from .errors import (
    FibError,
    IllFormedInstance,
    NoFiniteLimits,
    OracleContractViolation,
    UnknownObject,
)
from .fibcore import (
    Cleavage,
    OpCleavage,
    Prefibration,
    build_cleavage,
    build_op_cleavage,
    cind as fib_cind,
    cocartesian_factor,
    fiber,
    is_cartesian,
    is_cocartesian,
)
from .fincat import (
    ArrowCategoryData,
    FinCategory,
    FinFunctor,
    arrow_data,
    check_finite_limits,
    finset_skeleton,
    identity_functor,
    square_id,
    validate_category,
    validate_functor,
)
from .wedgeq import (
    BaseFP,
    WedgeCleavage,
    WedgeqCleavage,
    check_wedge,
    check_wedgeq,
    choose_base_products,
    pair_over,
)


def identity_prefibration(C: FinCategory) -> Prefibration:
    return Prefibration(C, C, identity_functor(C))


def codomain_prefibration(C: FinCategory) -> tuple[Prefibration, ArrowCategoryData]:
    """The codomain functor from the arrow category of ``C`` to ``C``."""
    data = arrow_data(C)
    A = data.category
    obj_map = {x: C.tgt[x] for x in A.objects}
    mor_map = {m: data.parts[m][1] for m in A.morphisms}
    proj = validate_functor(f"cod_{C.name}", A, C, obj_map, mor_map)
    return Prefibration(A, C, proj), data


@dataclass(frozen=True)
class CodomainInstance:
    base: FinCategory
    arrows: ArrowCategoryData
    F: Prefibration
    cleavage: Cleavage
    op_cleavage: OpCleavage
    wedgeq: WedgeqCleavage

    @property
    def total(self) -> FinCategory:
        return self.F.total


def build_codomain(C: FinCategory, seed: int | None = None) -> CodomainInstance:
    """Materialize the codomain fibration of a finite lex category.

    Precondition: ``C`` has finite limits; the missing cospan or pair is the
    witness otherwise.
    """
    ok, witness = check_finite_limits(C)
    if not ok:
        raise NoFiniteLimits(f"{C.name} lacks finite limits", witness)
    F, data = codomain_prefibration(C)
    cl = build_cleavage(F, seed)
    op = build_op_cleavage(F, seed)
    wc = check_wedge(F, cl, seed)
    base_fp = choose_base_products(C, seed, require_all=True)
    wq = check_wedgeq(F, wc, base_fp, seed)
    return CodomainInstance(C, data, F, cl, op, wq)


class MaterializedOracle:
    """Oracle contract over a fully materialized wedge-equality cleavage.

    Every operation is table search plus the uniqueness verification the
    contract demands; identifiers are the plain strings of the tables.
    ``zero_cells`` restricts the 0-cells of the synthesized structure (the
    full base by default); equality data must cover all of them.
    """

    def __init__(
        self,
        F: Prefibration,
        wq: WedgeqCleavage,
        zero_cells: Sequence[str] | None = None,
    ):
        self.F = F
        self.wq = wq
        self.wc = wq.wedge
        self.base_fp = wq.base_fp
        self._zero = tuple(zero_cells) if zero_cells is not None else F.base.objects
        for b in self._zero:
            if b not in wq.eq:
                raise IllFormedInstance(
                    f"no equality data over 0-cell {b}", (b,)
                )

    # base side
    def base_objects(self):
        return self._zero

    def base_hom(self, A, B):
        return self.F.base.hom(A, B)

    def base_id(self, A):
        return self.F.base.identity[A]

    def base_comp(self, g, f):
        return self.F.base.compose(g, f)

    def base_src(self, f):
        return self.F.base.src[f]

    def base_tgt(self, f):
        return self.F.base.tgt[f]

    def base_terminal(self):
        if self.base_fp.terminal is None:
            raise IllFormedInstance("base has no chosen terminal", ())
        return self.base_fp.terminal

    def base_product(self, A, B):
        d = self.base_fp.product(A, B)
        if d is None:
            raise IllFormedInstance(f"no chosen base product of ({A}, {B})", (A, B))
        return d.vertex, d.proj1, d.proj2

    def base_pair(self, f, g):
        return self.base_fp.pair(f, g)

    # total side
    def top(self, A):
        return self.wc.top[A]

    def eq(self, B):
        return self.wq.eq[B]

    def fiber_objects(self, A):
        return self.wc.fiber_of(A).objects

    def hom_over(self, f, P, Q):
        return self.F.hom_over(f, P, Q)

    def obj_over(self, P):
        return self.F.over_obj(P)

    def mor_over(self, p):
        return self.F.over(p)

    def tsrc(self, p):
        return self.F.total.src[p]

    def ttgt(self, p):
        return self.F.total.tgt[p]

    def tid(self, P):
        return self.F.total.identity[P]

    def tcomp(self, q, p):
        return self.F.total.compose(q, p)

    def fiber_product(self, P, Q):
        d = self.wc.product_span(P, Q)
        return d.vertex, d.proj1, d.proj2

    def pair(self, q, r):
        return pair_over(self.F, self.wc, q, r)

    def cart_lift(self, f, Q):
        return self.wc.cleavage.lift(f, Q)

    def cind(self, p, g, f):
        return fib_cind(self.F, self.wc.cleavage, p, g, f)

    def cofactor(self, q, r, g):
        try:
            return cocartesian_factor(self.F, q, r, g)
        except FibError as exc:
            raise OracleContractViolation(str(exc), exc.witness) from exc

    def ex(self, g, P):
        sols = self.F.hom_over(g, P, self.wc.top[self.F.base.tgt[g]])
        if len(sols) != 1:
            raise OracleContractViolation(
                f"{len(sols)} morphisms to the fiber terminal over {g}", (g, P)
            )
        return sols[0]

    def assert_cocartesian(self, q):
        if not is_cocartesian(self.F, q):
            raise OracleContractViolation(
                f"required cocartesian morphism is not cocartesian: {q}", (q,)
            )

    def is_vertical_iso(self, v):
        return self.F.total.is_iso(v)

    def same_fibration(self, other) -> bool:
        return (
            isinstance(other, MaterializedOracle)
            and self.F.total == other.F.total
            and self.F.base == other.F.base
            and self.F.proj.key == other.F.proj.key
        )


def codomain_oracle(inst: CodomainInstance) -> MaterializedOracle:
    return MaterializedOracle(inst.F, inst.wedgeq)


def verify_codomain_triviality(inst: CodomainInstance) -> tuple | None:
    """Every 2-cell of a codomain instance has equal endpoints and each
    endo hom-groupoid is a singleton; a violating pair is returned."""
    from .htpy2cat import Synthesizer

    synth = Synthesizer(codomain_oracle(inst))
    C = inst.base
    for A in C.objects:
        for B in C.objects:
            for f in C.hom(A, B):
                for g in C.hom(A, B):
                    n = len(synth.two_cells(f, g))
                    expected = 1 if f == g else 0
                    if n != expected:
                        return (f, g, str(n))
    return None


# -- subobject fibration -------------------------------------------------------


def _subset_id(obj: str, bits: tuple[int, ...]) -> str:
    return f"{obj}{{{''.join(str(b) for b in bits)}}}"


@dataclass(frozen=True)
class SubobjectInstance:
    base: FinCategory
    F: Prefibration
    wedgeq: WedgeqCleavage
    eq_capable: tuple[str, ...]

    def oracle(self, zero_cells: Sequence[str] | None = None) -> MaterializedOracle:
        if zero_cells is None:
            zero_cells = [
                b for b in self.eq_capable
                if self.wedgeq.base_fp.product(b, b) is not None
            ]
        return MaterializedOracle(self.F, self.wedgeq, zero_cells)


def build_subobject(k: int, seed: int | None = None) -> SubobjectInstance:
    """Subset fibration over the skeleton of finite sets of sizes 0..k.

    Fibers are powerset preorders (a subset is a characteristic bit tuple),
    reindexing is preimage.  Equality data exists over the objects whose
    self-product lies within the size bound; those are the eq-capable
    objects recorded on the instance.
    """
    if k > 4:
        raise IllFormedInstance("subobject instance supports sizes up to 4", (str(k),))
    base = finset_skeleton(k, name=f"finset{k}")
    card = {f"N{n}": n for n in range(k + 1)}
    fmap: dict[str, tuple[int, ...]] = {}
    for m in base.morphisms:
        digits = m[1:].split("_", 1)[0]
        fmap[m] = tuple(int(c) for c in digits)

    objs: list[str] = []
    subsets: dict[str, tuple[str, tuple[int, ...]]] = {}
    for A in base.objects:
        n = card[A]
        for bits in itertools.product((0, 1), repeat=n):
            oid = _subset_id(A, bits)
            objs.append(oid)
            subsets[oid] = (A, bits)

    def preimage(f: str, tbits: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(tbits[v] for v in fmap[f])

    mors: list[tuple[str, str, str]] = []
    over: dict[str, str] = {}
    for f in base.morphisms:
        A, B = base.src[f], base.tgt[f]
        for S in objs:
            if subsets[S][0] != A:
                continue
            sbits = subsets[S][1]
            for T in objs:
                if subsets[T][0] != B:
                    continue
                pre = preimage(f, subsets[T][1])
                if all(s <= p for s, p in zip(sbits, pre)):
                    mid = f"{f}:{S}>{T}"
                    mors.append((mid, S, T))
                    over[mid] = f

    identities = {
        S: f"{base.identity[subsets[S][0]]}:{S}>{S}" for S in objs
    }
    comp = {}
    by_src: dict[str, list[tuple[str, str, str]]] = {}
    for row in mors:
        by_src.setdefault(row[1], []).append(row)
    for mid, S, T in mors:
        for nid, _, U in by_src.get(T, ()):
            comp[(nid, mid)] = f"{base.compose(over[nid], over[mid])}:{S}>{U}"
    total = validate_category(
        f"sub{k}", objs, mors, identities, comp, max_morphisms=60_000
    )
    proj = validate_functor(
        f"sub{k}_proj", total, base,
        {S: subsets[S][0] for S in objs}, dict(over),
    )
    F = Prefibration(total, base, proj)
    cl = build_cleavage(F, seed)
    wc = check_wedge(F, cl, seed)
    base_fp = choose_base_products(base, seed)
    eq_capable = tuple(
        b for b in base.objects if base_fp.product(b, b) is not None
    )
    wq = check_wedgeq(F, wc, base_fp, seed, objects=eq_capable)
    return SubobjectInstance(base, F, wq, eq_capable)
