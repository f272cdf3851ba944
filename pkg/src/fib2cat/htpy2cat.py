"""Synthesis of the 2-category of fibration homotopies.

Any value implementing the ``FibrationOracle`` contract (the data of an
equality-equipped product cleavage with decidable equality) can be fed to
``synthesize``:  2-cells between parallel base morphisms f, g are the total
morphisms from the fiber terminal into the equality object lying over
``<f, g>``; vertical composition is transitivity of equality, inversion is
its symmetry, and horizontal composition acts through the induced endomap
of equality objects.  Every law of the resulting structure is then checked
by decidable morphism equality in ``verify_axioms`` and friends.

The synthesizer never searches hom-sets for the structural morphisms it
needs; it always routes through the oracle's factorization operations, so
the same code runs on lazily generated oracles (finite groupoids) and fully
materialized ones.  Composite morphisms that the construction needs to be
cocartesian are re-asserted through ``assert_cocartesian``, which lazy
oracles implement by their own decidable criterion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Protocol, Sequence

from .errors import (
    AxiomFailure,
    CellBudgetExceeded,
    NoTransport,
    NotComposable,
    NotParallel,
    OracleContractViolation,
)

DEFAULT_CELL_BUDGET = 100_000


class FibrationOracle(Protocol):
    """Capability contract for synthesis.

    Base-category values (objects, morphisms) and total-category values are
    opaque hashable tokens; all structure is accessed through the methods.
    ``fiber_objects`` may enumerate only what the oracle has materialized so
    far; every factorization method must verify its own uniqueness contract
    and raise OracleContractViolation on violation.
    """

    # base category with chosen finite products
    def base_objects(self) -> Sequence[Hashable]: ...
    def base_hom(self, A, B) -> Sequence[Hashable]: ...
    def base_id(self, A) -> Hashable: ...
    def base_comp(self, g, f) -> Hashable: ...
    def base_src(self, f) -> Hashable: ...
    def base_tgt(self, f) -> Hashable: ...
    def base_terminal(self) -> Hashable: ...
    def base_product(self, A, B) -> tuple[Hashable, Hashable, Hashable]: ...
    def base_pair(self, f, g) -> Hashable: ...

    # total category over it
    def top(self, A) -> Hashable: ...
    def eq(self, B) -> tuple[Hashable, Hashable]: ...
    def fiber_objects(self, A) -> Sequence[Hashable]: ...
    def hom_over(self, f, P, Q) -> Sequence[Hashable]: ...
    def obj_over(self, P) -> Hashable: ...
    def mor_over(self, p) -> Hashable: ...
    def tsrc(self, p) -> Hashable: ...
    def ttgt(self, p) -> Hashable: ...
    def tid(self, P) -> Hashable: ...
    def tcomp(self, q, p) -> Hashable: ...
    def fiber_product(self, P, Q) -> tuple[Hashable, Hashable, Hashable]: ...
    def pair(self, q, r) -> Hashable: ...
    def cart_lift(self, f, Q) -> Hashable: ...
    def cind(self, p, g, f) -> Hashable: ...
    def cofactor(self, q, r, g) -> Hashable: ...
    def ex(self, g, P) -> Hashable: ...
    def assert_cocartesian(self, q) -> None: ...
    def is_vertical_iso(self, v) -> bool: ...
    def same_fibration(self, other) -> bool: ...


@dataclass(frozen=True)
class TwoCell:
    """A homotopy between parallel base morphisms: its body is a total
    morphism from the fiber terminal to the equality object over <f, g>."""

    source: Any
    target: Any
    body: Any

    def __repr__(self) -> str:
        return f"TwoCell({self.source!r} => {self.target!r})"


@dataclass(frozen=True)
class EqFamily:
    """Pullbacks of the equality object along coordinate pairs of a power,
    with their reflexivity lifts and the transitivity/symmetry morphisms."""

    B: Any
    n: int
    eq_obj: Mapping[tuple[int, int], Any]
    rho: Mapping[tuple[int, int], Any]
    trans: Any  # Eq^12 /\ Eq^23 -> Eq^13 in the fiber over B^3
    sym: Any    # Eq -> Eq over the swap of B x B


class Synthesizer:
    """Builds and memoizes the 2-categorical structure over one oracle.

    All memo tables are write-once: repeated queries must return equal
    values (tested by cold/warm double runs).
    """

    def __init__(self, oracle: FibrationOracle, cell_budget: int = DEFAULT_CELL_BUDGET):
        self.o = oracle
        self.cell_budget = cell_budget
        self._cells: dict[tuple, tuple[TwoCell, ...]] = {}
        self._family: dict[tuple, EqFamily] = {}
        self._beta: dict[TwoCell, Any] = {}
        self._vcomp: dict[tuple[TwoCell, TwoCell], TwoCell] = {}
        self._hcomp: dict[tuple[TwoCell, TwoCell], TwoCell] = {}
        self._hid: dict[Any, TwoCell] = {}
        self._nat: dict[tuple, Any] = {}
        self._action: dict[TwoCell, dict] = {}
        self._smor: dict[tuple, Any] = {}

    # -- base product / power helpers ------------------------------------

    def power_vertex(self, B, n: int):
        v = B
        for _ in range(n - 1):
            v = self.o.base_product(v, B)[0]
        return v

    def power_proj(self, B, n: int, i: int):
        """Coordinate projection of the left-associated chosen power."""
        o = self.o
        if n == 1:
            return o.base_id(B)
        prev = self.power_vertex(B, n - 1)
        _, p1, p2 = o.base_product(prev, B)
        if i == n:
            return p2
        return o.base_comp(self.power_proj(B, n - 1, i), p1)

    def power_diag(self, B, n: int):
        o = self.o
        d = o.base_id(B)
        for _ in range(n - 1):
            d = o.base_pair(d, o.base_id(B))
        return d

    def pair_list(self, fs: Sequence) -> Any:
        """Left-associated <f1, ..., fk> through the chosen products."""
        out = fs[0]
        for f in fs[1:]:
            out = self.o.base_pair(out, f)
        return out

    def coord_pair(self, B, n: int, i: int, j: int):
        return self.o.base_pair(self.power_proj(B, n, i), self.power_proj(B, n, j))

    # -- 2-cell enumeration ------------------------------------------------

    def two_cells(self, f, g) -> tuple[TwoCell, ...]:
        o = self.o
        if o.base_src(f) != o.base_src(g) or o.base_tgt(f) != o.base_tgt(g):
            raise NotParallel("two_cells requires a parallel pair", (f, g))
        key = (f, g)
        if key not in self._cells:
            A, B = o.base_src(f), o.base_tgt(f)
            eq_obj, _ = o.eq(B)
            bodies = o.hom_over(o.base_pair(f, g), o.top(A), eq_obj)
            self._cells[key] = tuple(TwoCell(f, g, b) for b in bodies)
        return self._cells[key]

    # -- equality families --------------------------------------------------

    def eq_family(self, B, n: int) -> EqFamily:
        key = (B, n)
        if key in self._family:
            return self._family[key]
        o = self.o
        eq_obj_B, rho_B = o.eq(B)
        eq_obj: dict[tuple[int, int], Any] = {}
        rho: dict[tuple[int, int], Any] = {}
        diag_n = self.power_diag(B, n)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                pij = self.coord_pair(B, n, i, j)
                crt = o.cart_lift(pij, eq_obj_B)
                eq_obj[(i, j)] = o.tsrc(crt)
                rho[(i, j)] = o.cind(rho_B, pij, diag_n)
        trans = self._build_trans(B) if n >= 3 else None
        sym = self._build_sym(B)
        fam = EqFamily(B, n, eq_obj, rho, trans, sym)
        self._family[key] = fam
        return fam

    def _family3(self, B) -> EqFamily:
        return self.eq_family(B, 3)

    def _build_trans(self, B):
        """Transitivity: factor the reflexivity pair through the cocartesian
        <<rho12, rho23>> against rho13."""
        o = self.o
        _, rho_B = o.eq(B)
        diag3 = self.power_diag(B, 3)
        p12 = self.coord_pair(B, 3, 1, 2)
        p23 = self.coord_pair(B, 3, 2, 3)
        p13 = self.coord_pair(B, 3, 1, 3)
        rho12 = o.cind(rho_B, p12, diag3)
        rho23 = o.cind(rho_B, p23, diag3)
        rho13 = o.cind(rho_B, p13, diag3)
        pair_r = o.pair(rho12, rho23)
        o.assert_cocartesian(pair_r)
        v3 = self.power_vertex(B, 3)
        trans = o.cofactor(pair_r, rho13, o.base_id(v3))
        if o.tcomp(trans, pair_r) != rho13:
            raise OracleContractViolation(
                "transitivity triangle does not commute", (B,)
            )
        return trans

    def _build_sym(self, B):
        o = self.o
        eq_obj_B, rho_B = o.eq(B)
        v2, p1, p2 = o.base_product(B, B)
        swap = o.base_pair(p2, p1)
        sym = o.cofactor(rho_B, rho_B, swap)
        if o.tcomp(sym, rho_B) != rho_B:
            raise OracleContractViolation("symmetry triangle does not commute", (B,))
        return sym

    def trans_general(self, B, n: int, i: int, j: int, k: int):
        """The transitivity comparison on coordinates (i, j, k) of the n-th
        power, induced from the basic one through the chosen lifts."""
        key = ("trgen", B, n, i, j, k)
        if key in self._smor:
            return self._smor[key]
        o = self.o
        fam = self.eq_family(B, n)
        eq_obj_B, _ = o.eq(B)
        pijk = self.pair_list([
            self.power_proj(B, n, i), self.power_proj(B, n, j), self.power_proj(B, n, k)
        ])
        p12 = self.coord_pair(B, 3, 1, 2)
        p23 = self.coord_pair(B, 3, 2, 3)
        p13 = self.coord_pair(B, 3, 1, 3)
        pij = self.coord_pair(B, n, i, j)
        pjk = self.coord_pair(B, n, j, k)
        pik = self.coord_pair(B, n, i, k)
        # comparison maps into the cube coordinates, cartesian over pijk
        c12 = o.cind(o.cart_lift(pij, eq_obj_B), p12, pijk)
        c23 = o.cind(o.cart_lift(pjk, eq_obj_B), p23, pijk)
        _, pr1, pr2 = o.fiber_product(fam.eq_obj[(i, j)], fam.eq_obj[(j, k)])
        w = o.pair(o.tcomp(c12, pr1), o.tcomp(c23, pr2))
        trans3 = self._family3(B).trans
        z = o.tcomp(o.cart_lift(p13, eq_obj_B), o.tcomp(trans3, w))
        out = o.cind(z, pik, o.base_id(self.power_vertex(B, n)))
        # defining square: comparison after out equals trans3 after w
        c13 = o.cind(o.cart_lift(pik, eq_obj_B), p13, pijk)
        if o.tcomp(c13, out) != o.tcomp(trans3, w):
            raise OracleContractViolation(
                "general transitivity square does not commute", (B, i, j, k)
            )
        self._smor[key] = out
        return out

    # -- the four structure operations ----------------------------------------

    def hid(self, f) -> TwoCell:
        if f not in self._hid:
            o = self.o
            _, rho_B = o.eq(o.base_tgt(f))
            body = o.tcomp(rho_B, o.ex(f, o.top(o.base_src(f))))
            self._hid[f] = TwoCell(f, f, body)
        return self._hid[f]

    def vcomp(self, beta: TwoCell, alpha: TwoCell) -> TwoCell:
        if alpha.target != beta.source:
            raise NotComposable("vertical composite undefined", (alpha, beta))
        key = (beta, alpha)
        if key in self._vcomp:
            return self._vcomp[key]
        o = self.o
        f, g, h = alpha.source, alpha.target, beta.target
        B = o.base_tgt(f)
        eq_obj_B, _ = o.eq(B)
        fam = self._family3(B)
        triple = self.pair_list([f, g, h])
        p12 = self.coord_pair(B, 3, 1, 2)
        p23 = self.coord_pair(B, 3, 2, 3)
        p13 = self.coord_pair(B, 3, 1, 3)
        ca = o.cind(alpha.body, p12, triple)
        cb = o.cind(beta.body, p23, triple)
        body = o.tcomp(o.cart_lift(p13, eq_obj_B), o.tcomp(fam.trans, o.pair(ca, cb)))
        out = TwoCell(f, h, body)
        self._vcomp[key] = out
        return out

    def invert(self, alpha: TwoCell) -> TwoCell:
        o = self.o
        sym = self.eq_family(o.base_tgt(alpha.source), 2).sym
        return TwoCell(alpha.target, alpha.source, o.tcomp(sym, alpha.body))

    def beta_check(self, beta: TwoCell):
        """The unique endomap of equality objects over h x k induced by a
        2-cell h => k; implements horizontal composition."""
        if beta in self._beta:
            return self._beta[beta]
        o = self.o
        h, k = beta.source, beta.target
        B = o.base_src(h)
        _, rho_B = o.eq(B)
        _, p1, p2 = o.base_product(B, B)
        hk = o.base_pair(o.base_comp(h, p1), o.base_comp(k, p2))
        out = o.cofactor(rho_B, beta.body, hk)
        if o.tcomp(out, rho_B) != beta.body:
            raise OracleContractViolation("induced equality endomap triangle", (h, k))
        self._beta[beta] = out
        return out

    def hcomp(self, beta: TwoCell, alpha: TwoCell) -> TwoCell:
        o = self.o
        if o.base_tgt(alpha.source) != o.base_src(beta.source):
            raise NotComposable("horizontal composite undefined", (alpha, beta))
        key = (beta, alpha)
        if key in self._hcomp:
            return self._hcomp[key]
        body = o.tcomp(self.beta_check(beta), alpha.body)
        out = TwoCell(
            o.base_comp(beta.source, alpha.source),
            o.base_comp(beta.target, alpha.target),
            body,
        )
        self._hcomp[key] = out
        return out

    # -- pseudo-functor data -----------------------------------------------------

    def nat_morphism(self, B, P):
        """Transport of a fiber object across the equality object: the
        substitution map from (first-coordinate pullback and equality) to the
        second-coordinate pullback."""
        key = ("nat", B, P)
        if key in self._nat:
            return self._nat[key]
        o = self.o
        _, rho_B = o.eq(B)
        v2, p1, p2 = o.base_product(B, B)
        diag = o.base_pair(o.base_id(B), o.base_id(B))
        idP = o.tid(P)
        c1 = o.cind(idP, p1, diag)
        c2 = o.cind(idP, p2, diag)
        bang = o.ex(o.base_id(B), P)
        q0 = o.pair(c1, o.tcomp(rho_B, bang))
        o.assert_cocartesian(q0)
        out = o.cofactor(q0, c2, o.base_id(v2))
        if o.tcomp(out, q0) != c2:
            raise OracleContractViolation("transport triangle does not commute", (B,))
        self._nat[key] = out
        return out

    def nat_ij(self, B, P, i: int, j: int, n: int):
        """The coordinate (i, j) version of the transport map on the n-th power."""
        key = ("natij", B, P, i, j, n)
        if key in self._nat:
            return self._nat[key]
        o = self.o
        fam = self.eq_family(B, n)
        eq_obj_B, _ = o.eq(B)
        pij = self.coord_pair(B, n, i, j)
        pi = self.power_proj(B, n, i)
        pj = self.power_proj(B, n, j)
        v2, p1, p2 = o.base_product(B, B)
        ci = o.cind(o.cart_lift(pi, P), p1, pij)
        cj = o.cind(o.cart_lift(pj, P), p2, pij)
        crt_eq = o.cart_lift(pij, eq_obj_B)
        _, pr1, pr2 = o.fiber_product(o.tsrc(o.cart_lift(pi, P)), fam.eq_obj[(i, j)])
        w = o.pair(o.tcomp(ci, pr1), o.tcomp(crt_eq, pr2))
        nat = self.nat_morphism(B, P)
        z = o.tcomp(o.cart_lift(pj, P), o.tcomp(nat, w))
        out = o.cind(z, pj, o.base_id(self.power_vertex(B, n)))
        if o.tcomp(cj, out) != o.tcomp(nat, w):
            raise OracleContractViolation(
                "coordinate transport square does not commute", (B, i, j, n)
            )
        self._nat[key] = out
        return out

    def two_cell_action(self, alpha: TwoCell) -> dict:
        """The natural transformation between pullback functors induced by a
        2-cell; components indexed by the fiber objects over the target."""
        if alpha in self._action:
            return self._action[alpha]
        o = self.o
        f, g = alpha.source, alpha.target
        A, B = o.base_src(f), o.base_tgt(f)
        v2, p1, p2 = o.base_product(B, B)
        fg = o.base_pair(f, g)
        components: dict = {}
        for P in o.fiber_objects(B):
            ccind_f = o.cind(o.cart_lift(f, P), p1, fg)
            bang = o.ex(o.base_id(A), o.tsrc(o.cart_lift(f, P)))
            u = o.pair(ccind_f, o.tcomp(alpha.body, bang))
            y = o.tcomp(self.nat_morphism(B, P), u)
            comp = o.cind(o.tcomp(o.cart_lift(p2, P), y), g, o.base_id(A))
            ccind_g = o.cind(o.cart_lift(g, P), p2, fg)
            if o.tcomp(ccind_g, comp) != y:
                raise OracleContractViolation(
                    "2-cell action defining square does not commute", (f, g, P)
                )
            components[P] = comp
        self._action[alpha] = components
        return components

    def pullback_obj(self, f, Q):
        return self.o.tsrc(self.o.cart_lift(f, Q))

    def pullback_mor(self, f, p):
        """Action of the pullback functor along f on a vertical morphism."""
        o = self.o
        return o.cind(
            o.tcomp(p, o.cart_lift(f, o.tsrc(p))), f, o.base_id(o.base_src(f))
        )

    def smor(self, f, g, Q):
        """Comparison component f* g* Q -> (g f)* Q of the pseudo-functor."""
        key = ("smor", f, g, Q)
        if key in self._smor:
            return self._smor[key]
        o = self.o
        ct_g = o.cart_lift(g, Q)
        ct_f = o.cart_lift(f, o.tsrc(ct_g))
        out = o.cind(
            o.tcomp(ct_g, ct_f), o.base_comp(g, f), o.base_id(o.base_src(f))
        )
        self._smor[key] = out
        return out

    def unit_component(self, A, P):
        return self.o.cart_lift(self.o.base_id(A), P)


@dataclass(frozen=True)
class SynthesizedTwoCategory:
    """Materialized hom-categories and composition tables over one oracle."""

    synth: Synthesizer
    zero_cells: tuple
    one_cells: Mapping[tuple, tuple]
    two_cells: Mapping[tuple, tuple[TwoCell, ...]]
    total_cells: int

    @property
    def oracle(self):
        return self.synth.o

    def cells_between(self, f, g) -> tuple[TwoCell, ...]:
        return self.two_cells.get((f, g), ())

    def all_cells(self, A, B):
        for (f, g), cells in self.two_cells.items():
            if self.oracle.base_src(f) == A and self.oracle.base_tgt(f) == B:
                yield from cells


def synthesize(
    oracle: FibrationOracle, cell_budget: int = DEFAULT_CELL_BUDGET
) -> SynthesizedTwoCategory:
    """Enumerate every hom-category within the finite base, refusing to
    degrade silently once the configured total 2-cell budget is exceeded."""
    synth = Synthesizer(oracle, cell_budget)
    o = oracle
    zero = tuple(o.base_objects())
    one: dict[tuple, tuple] = {}
    two: dict[tuple, tuple[TwoCell, ...]] = {}
    total = 0
    for A in zero:
        for B in zero:
            hom = tuple(o.base_hom(A, B))
            one[(A, B)] = hom
            for f in hom:
                for g in hom:
                    cells = synth.two_cells(f, g)
                    two[(f, g)] = cells
                    total += len(cells)
                    if total > cell_budget:
                        raise CellBudgetExceeded(
                            f"2-cell budget {cell_budget} exceeded", (str(total),)
                        )
    return SynthesizedTwoCategory(synth, zero, one, two, total)


@dataclass
class LawReport:
    """Per-law verdicts; failures carry the offending cells."""

    results: dict[str, tuple | None] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(w is None for w in self.results.values())

    def failures(self) -> dict[str, tuple]:
        return {k: w for k, w in self.results.items() if w is not None}

    def raise_on_failure(self) -> None:
        for law, witness in self.results.items():
            if witness is not None:
                raise AxiomFailure(law, witness)


def _composable_vpairs(T: SynthesizedTwoCategory, A, B):
    o = T.oracle
    for f in T.one_cells[(A, B)]:
        for g in T.one_cells[(A, B)]:
            for alpha in T.cells_between(f, g):
                for h in T.one_cells[(A, B)]:
                    for beta in T.cells_between(g, h):
                        yield beta, alpha


def verify_axioms(T: SynthesizedTwoCategory) -> LawReport:
    """Exhaustive check of the 2-category laws on the synthesized tables.

    A failure indicates an oracle bug, not a mathematical possibility, and
    is reported with the offending cells.
    """
    synth = T.synth
    o = T.oracle
    report = LawReport()
    report.results["cells-closed-under-vcomp"] = None
    report.results["homcat-units"] = None
    report.results["homcat-assoc"] = None
    report.results["groupoid-inverses"] = None
    report.results["hcomp-units"] = None
    report.results["hcomp-assoc"] = None
    report.results["hid-bifunctor"] = None
    report.results["interchange"] = None

    zero = T.zero_cells

    for (f, g), cells in T.two_cells.items():
        cellset = set(T.cells_between(f, g))
        for alpha in cells:
            left = synth.vcomp(alpha, synth.hid(f))
            right = synth.vcomp(synth.hid(g), alpha)
            if left != alpha or right != alpha:
                report.results["homcat-units"] = (f, g, alpha.body)
            inv = synth.invert(alpha)
            if (
                synth.vcomp(inv, alpha) != synth.hid(f)
                or synth.vcomp(alpha, inv) != synth.hid(g)
            ):
                report.results["groupoid-inverses"] = (f, g, alpha.body)
        del cellset

    for A in zero:
        for B in zero:
            for beta, alpha in _composable_vpairs(T, A, B):
                got = synth.vcomp(beta, alpha)
                if got not in set(T.cells_between(alpha.source, beta.target)):
                    report.results["cells-closed-under-vcomp"] = (
                        alpha.body, beta.body,
                    )
                for gamma_tgt in T.one_cells[(A, B)]:
                    for gamma in T.cells_between(beta.target, gamma_tgt):
                        if synth.vcomp(gamma, got) != synth.vcomp(
                            synth.vcomp(gamma, beta), alpha
                        ):
                            report.results["homcat-assoc"] = (
                                alpha.body, beta.body, gamma.body,
                            )

    for (f, g), cells in T.two_cells.items():
        A, B = o.base_src(f), o.base_tgt(f)
        for alpha in cells:
            left = synth.hcomp(alpha, synth.hid(o.base_id(A)))
            right = synth.hcomp(synth.hid(o.base_id(B)), alpha)
            if left != alpha or right != alpha:
                report.results["hcomp-units"] = (f, g, alpha.body)

    for A in zero:
        for B in zero:
            for f in T.one_cells[(A, B)]:
                for C in zero:
                    for k in T.one_cells[(B, C)]:
                        if synth.hcomp(synth.hid(k), synth.hid(f)) != synth.hid(
                            o.base_comp(k, f)
                        ):
                            report.results["hid-bifunctor"] = (f, k)

    for A in zero:
        for B in zero:
            for C in zero:
                ab = [c for fg in _pairs(T, A, B) for c in T.cells_between(*fg)]
                bc = [c for fg in _pairs(T, B, C) for c in T.cells_between(*fg)]
                for beta in bc:
                    for alpha in ab:
                        got = synth.hcomp(beta, alpha)
                        expected_cells = set(
                            T.cells_between(got.source, got.target)
                        )
                        if got not in expected_cells:
                            report.results["cells-closed-under-vcomp"] = (
                                alpha.body, beta.body,
                            )
                for D in zero:
                    cd = [c for fg in _pairs(T, C, D) for c in T.cells_between(*fg)]
                    for gamma in cd:
                        for beta in bc:
                            for alpha in ab:
                                lhs = synth.hcomp(gamma, synth.hcomp(beta, alpha))
                                rhs = synth.hcomp(synth.hcomp(gamma, beta), alpha)
                                if lhs != rhs:
                                    report.results["hcomp-assoc"] = (
                                        alpha.body, beta.body, gamma.body,
                                    )

    for A in zero:
        for B in zero:
            for C in zero:
                for beta, alpha in _composable_vpairs(T, A, B):
                    for delta, gamma in _composable_vpairs(T, B, C):
                        lhs = synth.hcomp(
                            synth.vcomp(delta, gamma), synth.vcomp(beta, alpha)
                        )
                        rhs = synth.vcomp(
                            synth.hcomp(delta, beta), synth.hcomp(gamma, alpha)
                        )
                        if lhs != rhs:
                            report.results["interchange"] = (
                                alpha.body, beta.body, gamma.body, delta.body,
                            )
    return report


def _pairs(T: SynthesizedTwoCategory, A, B):
    for f in T.one_cells[(A, B)]:
        for g in T.one_cells[(A, B)]:
            yield (f, g)


@dataclass(frozen=True)
class PseudoFunctorData:
    """Comparison data of the fiber pseudo-functor over a synthesis."""

    T: SynthesizedTwoCategory

    @property
    def synth(self) -> Synthesizer:
        return self.T.synth


def assemble_pseudofunctor(T: SynthesizedTwoCategory) -> PseudoFunctorData:
    return PseudoFunctorData(T)


def verify_psf(P: PseudoFunctorData) -> LawReport:
    """Coherence of the fiber pseudo-functor and its extension to 2-cells:
    the associativity squares and unit triangles of the comparison maps, the
    functoriality of the 2-cell action, its naturality, invertibility, and
    the naturality of the comparison maps in 2-cells."""
    T = P.T
    synth = T.synth
    o = T.oracle
    report = LawReport()
    for law in (
        "comparison-iso",
        "coherence-square",
        "coherence-triangles",
        "action-identity",
        "action-functorial",
        "action-natural",
        "action-invertible",
        "comparison-natural",
    ):
        report.results[law] = None

    zero = T.zero_cells

    def fibers(B):
        return o.fiber_objects(B)

    # comparison maps are isomorphisms; coherence square for composable triples
    for A in zero:
        for B in zero:
            for f in T.one_cells[(A, B)]:
                for C in zero:
                    for g in T.one_cells[(B, C)]:
                        for Q in fibers(C):
                            c = synth.smor(f, g, Q)
                            if not o.is_vertical_iso(c):
                                report.results["comparison-iso"] = (f, g, Q)
                        for D in zero:
                            for h in T.one_cells[(C, D)]:
                                for Q in fibers(D):
                                    top = o.tcomp(
                                        synth.smor(f, o.base_comp(h, g), Q),
                                        synth.pullback_mor(f, synth.smor(g, h, Q)),
                                    )
                                    left = o.tcomp(
                                        synth.smor(o.base_comp(g, f), h, Q),
                                        synth.smor(f, g, synth.pullback_obj(h, Q)),
                                    )
                                    if top != left:
                                        report.results["coherence-square"] = (f, g, h, Q)

    # unit triangles
    for A in zero:
        for B in zero:
            for f in T.one_cells[(A, B)]:
                ida, idb = o.base_id(A), o.base_id(B)
                for Q in fibers(B):
                    tri1 = synth.smor(ida, f, Q)
                    unit = synth.unit_component(A, synth.pullback_obj(f, Q))
                    if tri1 != unit:
                        report.results["coherence-triangles"] = ("left", f, Q)
                    tri2 = synth.smor(f, idb, Q)
                    unit2 = synth.pullback_mor(f, synth.unit_component(B, Q))
                    if tri2 != unit2:
                        report.results["coherence-triangles"] = ("right", f, Q)

    # action on 2-cells: identity, functoriality, naturality, invertibility
    for (f, g), cells in T.two_cells.items():
        B = o.base_tgt(f)
        if f == g:
            act = synth.two_cell_action(synth.hid(f))
            for Pb, comp in act.items():
                if comp != o.tid(synth.pullback_obj(f, Pb)):
                    report.results["action-identity"] = (f, Pb)
        for alpha in cells:
            act_a = synth.two_cell_action(alpha)
            inv = synth.invert(alpha)
            act_inv = synth.two_cell_action(inv)
            for Pb in fibers(B):
                fwd = act_a[Pb]
                back = act_inv[Pb]
                if o.tcomp(back, fwd) != o.tid(o.tsrc(fwd)) or o.tcomp(
                    fwd, back
                ) != o.tid(o.ttgt(fwd)):
                    report.results["action-invertible"] = (alpha.body, Pb)
            # naturality in vertical morphisms of the fiber
            for Pb in fibers(B):
                for Qb in fibers(B):
                    for p in o.hom_over(o.base_id(B), Pb, Qb):
                        lhs = o.tcomp(act_a[Qb], synth.pullback_mor(f, p))
                        rhs = o.tcomp(synth.pullback_mor(g, p), act_a[Pb])
                        if lhs != rhs:
                            report.results["action-natural"] = (alpha.body, p)
        for h in {h for (f2, h) in T.two_cells if f2 == g}:
            for alpha in cells:
                for beta in T.cells_between(g, h):
                    act = synth.two_cell_action(synth.vcomp(beta, alpha))
                    act_a = synth.two_cell_action(alpha)
                    act_b = synth.two_cell_action(beta)
                    for Pb in fibers(B):
                        if act[Pb] != o.tcomp(act_b[Pb], act_a[Pb]):
                            report.results["action-functorial"] = (
                                alpha.body, beta.body, Pb,
                            )

    # naturality of the comparison maps in 2-cells
    for A in zero:
        for B in zero:
            for C in zero:
                for (f, h) in _pairs(T, A, B):
                    for alpha in T.cells_between(f, h):
                        for (g, k) in _pairs(T, B, C):
                            for beta in T.cells_between(g, k):
                                act_comp = synth.two_cell_action(
                                    synth.hcomp(beta, alpha)
                                )
                                act_a = synth.two_cell_action(alpha)
                                act_b = synth.two_cell_action(beta)
                                for Q in fibers(C):
                                    horiz = o.tcomp(
                                        act_a[synth.pullback_obj(k, Q)],
                                        synth.pullback_mor(f, act_b[Q]),
                                    )
                                    lhs = o.tcomp(act_comp[Q], synth.smor(f, g, Q))
                                    rhs = o.tcomp(synth.smor(h, k, Q), horiz)
                                    if lhs != rhs:
                                        report.results["comparison-natural"] = (
                                            alpha.body, beta.body, Q,
                                        )
    return report


def check_two_products(T: SynthesizedTwoCategory) -> LawReport:
    """2-categorical products: composing with the chosen projections is a
    bijection on 1-cells and on 2-cells for every pair whose chosen product
    vertex is itself a 0-cell, plus the singleton condition at the terminal."""
    synth = T.synth
    o = T.oracle
    report = LawReport()
    report.results["product-one-cells"] = None
    report.results["product-two-cells"] = None
    report.results["two-terminal"] = None

    zero = set(T.zero_cells)
    for A in T.zero_cells:
        for B in T.zero_cells:
            vertex, p1, p2 = o.base_product(A, B)
            if vertex not in zero:
                continue
            hid1, hid2 = synth.hid(p1), synth.hid(p2)
            for C in T.zero_cells:
                into = T.one_cells[(C, vertex)]
                image = [(o.base_comp(p1, u), o.base_comp(p2, u)) for u in into]
                if len(set(image)) != len(into) or set(image) != {
                    (x, y)
                    for x in T.one_cells[(C, A)]
                    for y in T.one_cells[(C, B)]
                }:
                    report.results["product-one-cells"] = (A, B, C)
                for u in into:
                    for v in into:
                        cells = T.cells_between(u, v)
                        mapped = [
                            (synth.hcomp(hid1, c), synth.hcomp(hid2, c))
                            for c in cells
                        ]
                        if len(set(mapped)) != len(cells):
                            report.results["product-two-cells"] = (A, B, C, u, v)
                            continue
                        expected = {
                            (x, y)
                            for x in T.cells_between(
                                o.base_comp(p1, u), o.base_comp(p1, v)
                            )
                            for y in T.cells_between(
                                o.base_comp(p2, u), o.base_comp(p2, v)
                            )
                        }
                        if set(mapped) != expected:
                            report.results["product-two-cells"] = (A, B, C, u, v)

    term = o.base_terminal()
    if term in zero:
        for C in T.zero_cells:
            bangs = T.one_cells[(C, term)]
            if len(bangs) != 1:
                report.results["two-terminal"] = (C, "one-cells")
                continue
            if len(T.cells_between(bangs[0], bangs[0])) != 1:
                report.results["two-terminal"] = (C, "two-cells")
    return report


@dataclass(frozen=True)
class Transport:
    """Choice-transport between two syntheses of the same fibration."""

    mapping: Mapping[TwoCell, TwoCell]


def cleavage_transport(
    T1: SynthesizedTwoCategory, T2: SynthesizedTwoCategory
) -> tuple[Transport, LawReport]:
    """The canonical bijection between 2-cell sets of two syntheses of the
    same underlying fibration under different structure choices, plus the
    verdict that both composition operations commute with it."""
    o1, o2 = T1.oracle, T2.oracle
    if not o1.same_fibration(o2):
        raise NoTransport("oracles do not present the same fibration", ())
    if T1.zero_cells != T2.zero_cells:
        raise NoTransport("different 0-cells", ())
    report = LawReport()
    report.results["transport-bijective"] = None
    report.results["transport-vcomp"] = None
    report.results["transport-hcomp"] = None

    # j per target object, u per source object
    j_cache: dict = {}
    u_cache: dict = {}

    def u_mor(A):
        # unique vertical morphism between the two chosen fiber terminals
        if A not in u_cache:
            cands = o1.hom_over(o1.base_id(A), o1.top(A), o2.top(A))
            if len(cands) != 1:
                raise NoTransport("fiber terminals not uniquely comparable", (A,))
            u_cache[A] = cands[0]
        return u_cache[A]

    def u_inv(A):
        cands = o1.hom_over(o1.base_id(A), o2.top(A), o1.top(A))
        if len(cands) != 1:
            raise NoTransport("fiber terminals not uniquely comparable", (A,))
        return cands[0]

    def j_mor(B):
        if B not in j_cache:
            _, q1_1, q2_1 = o1.base_product(B, B)
            i = o2.base_pair(q1_1, q2_1)
            _, rho1 = o1.eq(B)
            _, rho2 = o2.eq(B)
            r = o1.tcomp(rho2, u_mor(B))
            j = o1.cofactor(rho1, r, i)
            j_cache[B] = (i, j)
        return j_cache[B]

    def transport(cell: TwoCell) -> TwoCell:
        A = o1.base_src(cell.source)
        B = o1.base_tgt(cell.source)
        _, j = j_mor(B)
        body = o1.tcomp(j, o1.tcomp(cell.body, u_inv(A)))
        return TwoCell(cell.source, cell.target, body)

    mapping: dict[TwoCell, TwoCell] = {}
    for (f, g), cells in T1.two_cells.items():
        target_cells = set(T2.cells_between(f, g))
        image = []
        for c in cells:
            tc = transport(c)
            if tc not in target_cells:
                report.results["transport-bijective"] = (f, g, c.body)
                continue
            image.append(tc)
            mapping[c] = tc
        if len(set(image)) != len(cells) or set(image) != target_cells:
            report.results["transport-bijective"] = (f, g)

    s1, s2 = T1.synth, T2.synth
    for A in T1.zero_cells:
        for B in T1.zero_cells:
            for beta, alpha in _composable_vpairs(T1, A, B):
                lhs = mapping.get(s1.vcomp(beta, alpha))
                rhs = s2.vcomp(mapping[beta], mapping[alpha])
                if lhs != rhs:
                    report.results["transport-vcomp"] = (alpha.body, beta.body)
            for C in T1.zero_cells:
                ab = [c for fg in _pairs(T1, A, B) for c in T1.cells_between(*fg)]
                bc = [c for fg in _pairs(T1, B, C) for c in T1.cells_between(*fg)]
                for beta in bc:
                    for alpha in ab:
                        lhs = mapping.get(s1.hcomp(beta, alpha))
                        rhs = s2.hcomp(mapping[beta], mapping[alpha])
                        if lhs != rhs:
                            report.results["transport-hcomp"] = (
                                alpha.body, beta.body,
                            )
    return Transport(mapping), report


def enumerate_two_cells(oracle: FibrationOracle, f, g) -> tuple[TwoCell, ...]:
    """All 2-cells f => g, in the deterministic oracle enumeration order."""
    return Synthesizer(oracle).two_cells(f, g)
