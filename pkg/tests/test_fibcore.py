"""Fibration-core tests: fibers, (co)cartesianness, cleavages, factorization."""

import pytest

from fib2cat.errors import (
    NoFactorization,
    NotAFibration,
    UnknownMorphism,
)
from fib2cat.fibcore import (
    build_cleavage,
    build_op_cleavage,
    cartesian_factor,
    cind,
    cocartesian_factor,
    fiber,
    fibration_failure,
    find_cartesian_lifts,
    find_cocartesian_lifts,
    is_cartesian,
    is_cocartesian,
    is_fibration,
    opposite_prefibration,
    weak_cocartesian,
)
from fib2cat.fincat import PullbackSquare, is_pullback_square, slice_category
from fib2cat.instances import codomain_prefibration, identity_prefibration


@pytest.fixture(scope="module")
def cod_diamond(diamond):
    return codomain_prefibration(diamond)


@pytest.fixture(scope="module")
def cod_iso(walking_iso):
    return codomain_prefibration(walking_iso)


def test_fiber_of_identity_fibration(chain3):
    F = identity_prefibration(chain3)
    for A in chain3.objects:
        fib = fiber(F, A)
        assert fib.objects == (A,)
        assert len(fib.morphisms) == 1


def test_fiber_equals_slice(diamond, cod_diamond):
    F, _ = cod_diamond
    for A in diamond.objects:
        fib = fiber(F, A)
        sl = slice_category(diamond, A)
        assert fib.objects == sl.objects
        assert fib.morphisms == sl.morphisms
        assert dict(fib.comp) == dict(sl.comp)
        assert dict(fib.identity) == dict(sl.identity)


def test_fiber_count_walking_arrow(walking_arrow):
    F, _ = codomain_prefibration(walking_arrow)
    assert len(fiber(F, "1").objects) == 2  # id1 and the arrow itself


def test_isos_are_cartesian_and_cocartesian(walking_iso):
    F = identity_prefibration(walking_iso)
    for m in walking_iso.morphisms:
        assert is_cartesian(F, m)
        assert is_cocartesian(F, m)


def test_unknown_morphism_rejected(chain3):
    F = identity_prefibration(chain3)
    with pytest.raises(UnknownMorphism):
        is_cartesian(F, "nope")


def test_composite_of_cartesian_is_cartesian(cod_diamond):
    F, _ = cod_diamond
    T = F.total
    carts = [m for m in T.morphisms if is_cartesian(F, m)]
    cart_set = set(carts)
    for f in carts:
        for g in carts:
            if T.src[g] == T.tgt[f]:
                assert T.compose(g, f) in cart_set


def test_cartesian_iff_pullback_square(cod_diamond, diamond):
    """Codomain-fibration bridge: a square is cartesian iff it is a pullback."""
    F, data = cod_diamond
    T = F.total
    for m in T.morphisms:
        p, f = data.parts[m]
        x, y = T.src[m], T.tgt[m]
        square = PullbackSquare(
            apex=diamond.src[x], left=diamond.tgt[x], right=diamond.src[y],
            corner=diamond.tgt[y], p1=x, p2=p, f=f, g=y,
        )
        assert is_cartesian(F, m) == is_pullback_square(diamond, square)


def test_cocartesian_iff_top_iso(cod_iso, walking_iso):
    F, data = cod_iso
    for m in F.total.morphisms:
        p, _ = data.parts[m]
        assert is_cocartesian(F, m) == walking_iso.is_iso(p)


def test_cocartesian_via_opposite_matches_weak_criterion(cod_diamond):
    F, _ = cod_diamond
    for m in F.total.morphisms:
        assert is_cocartesian(F, m) == weak_cocartesian(F, m)


def test_duality_bridge(cod_diamond):
    F, _ = cod_diamond
    op = opposite_prefibration(F)
    for m in F.total.morphisms:
        assert is_cocartesian(F, m) == is_cartesian(op, m)


def test_find_cartesian_lifts_identity_base(cod_diamond, diamond):
    F, data = cod_diamond
    for Q in list(F.total.objects)[:4]:
        A = F.over_obj(Q)
        ida = diamond.identity[A]
        lifts = find_cartesian_lifts(F, ida, Q)
        assert F.total.identity[Q] in lifts
        for q in lifts:
            assert F.total.is_iso(q)


def test_lifts_pairwise_uniquely_isomorphic(cod_diamond):
    F, _ = cod_diamond
    T, B = F.total, F.base
    for f in B.morphisms:
        for Q in F.objects_over(B.tgt[f]):
            lifts = find_cartesian_lifts(F, f, Q)
            assert lifts, "codomain fibration of a lex base has all lifts"
            ida = B.identity[B.src[f]]
            for q1 in lifts:
                for q2 in lifts:
                    vert = [
                        i
                        for i in F.hom_over(ida, T.src[q1], T.src[q2])
                        if T.compose(q2, i) == q1
                    ]
                    assert len(vert) == 1
                    assert T.is_iso(vert[0])


def test_is_fibration(cod_diamond, discrete2, walking_arrow):
    F, _ = cod_diamond
    assert is_fibration(F)
    # a non-fibration: total discrete over the walking arrow
    from fib2cat.fincat import validate_category
    from fib2cat.fibcore import Prefibration
    from fib2cat.fincat import validate_functor
    total = validate_category(
        "twoobj", ["P", "Q"], [("idP", "P", "P"), ("idQ", "Q", "Q")],
        {"P": "idP", "Q": "idQ"}, {("idP", "idP"): "idP", ("idQ", "idQ"): "idQ"},
    )
    proj = validate_functor(
        "pr", total, walking_arrow, {"P": "0", "Q": "1"},
        {"idP": "0<=0", "idQ": "1<=1"},
    )
    G = Prefibration(total, walking_arrow, proj)
    assert not is_fibration(G)
    assert fibration_failure(G) == ("0<=1", "Q")
    with pytest.raises(NotAFibration):
        build_cleavage(G)


def test_cleavage_normalizes_identity_lifts(cod_diamond, diamond):
    F, _ = cod_diamond
    cl = build_cleavage(F)
    for A in diamond.objects:
        ida = diamond.identity[A]
        for Q in F.objects_over(A):
            assert cl.lift(ida, Q) == F.total.identity[Q]
            assert cl.pullback_obj(ida, Q) == Q


def test_pullback_functor_against_find_pullbacks(cod_diamond, diamond):
    """Cleavage pullback agrees with some pullback square apex for each input."""
    from fib2cat.fincat import find_pullbacks
    F, data = cod_diamond
    cl = build_cleavage(F)
    for f in diamond.morphisms:
        for Q in F.objects_over(diamond.tgt[f]):
            apexes = {s.apex for s in find_pullbacks(diamond, f, Q)}
            got = cl.pullback_obj(f, Q)  # an object of the arrow category = a morphism of base
            assert diamond.src[got] in apexes


def test_cind_equations(cod_iso, walking_iso):
    """ct . <p> = p;  <q> . p = <q p>;  f* p = <p . ct> on every instance."""
    F, _ = cod_iso
    cl = build_cleavage(F)
    T, B = F.total, F.base
    for p in T.morphisms:
        pf = F.over(p)
        # all factorizations of the base morphism
        for f in B.morphisms:
            for g in B.morphisms_from(B.tgt[f]):
                if B.compose(g, f) != pf or B.src[f] != B.src[pf]:
                    continue
                got = cind(F, cl, p, g, f)
                assert T.compose(cl.lift(g, T.tgt[p]), got) == p
    # <q> . p = <q p> whenever both sides make sense
    for q in T.morphisms:
        qf = F.over(q)
        for f in B.morphisms:
            for g in B.morphisms_from(B.tgt[f]):
                if B.compose(g, f) != qf:
                    continue
                cq = cind(F, cl, q, g, f)
                for p in T.morphisms:
                    if T.tgt[p] != T.src[q]:
                        continue
                    pf = F.over(p)
                    both = B.compose(f, pf)
                    assert cind(F, cl, T.compose(q, p), g, both) == T.compose(cq, p)
    # f* p = <p . ct>
    for f in B.morphisms:
        A = B.src[f]
        for p in F.morphisms_over(B.identity[B.tgt[f]]):
            left = cl.pullback_mor(f, p)
            right = cind(F, cl, T.compose(p, cl.lift(f, T.src[p])), f, B.identity[A])
            assert left == right


def test_cartesian_cancellation(cod_diamond):
    F, _ = cod_diamond
    T = F.total
    carts = [m for m in T.morphisms if is_cartesian(F, m)]
    for r in carts:
        X = T.src[r]
        for P in T.objects:
            seen = {}
            for p in T.hom(P, X):
                key = T.compose(r, p)
                assert key not in seen or seen[key] == p
                seen[key] = p


def test_cartesian_two_of_three(cod_iso):
    F, _ = cod_iso
    T = F.total
    for r in T.morphisms:
        if not is_cartesian(F, r):
            continue
        for q in T.morphisms:
            if T.tgt[q] != T.src[r]:
                continue
            assert is_cartesian(F, T.compose(r, q)) == is_cartesian(F, q)


def test_cartesian_over_iso_is_iso(cod_iso, walking_iso):
    F, _ = cod_iso
    T = F.total
    for q in T.morphisms:
        if walking_iso.is_iso(F.over(q)):
            assert is_cartesian(F, q) == T.is_iso(q)


def test_cofactor_identity_case(cod_diamond, diamond):
    F, _ = cod_diamond
    T, B = F.total, F.base
    for q in T.morphisms:
        if not is_cocartesian(F, q):
            continue
        g = B.identity[B.tgt[F.over(q)]]
        s = cocartesian_factor(F, q, q, g)
        assert s == T.identity[T.tgt[q]]


def test_cofactor_errors(cod_diamond):
    F, _ = cod_diamond
    T, B = F.total, F.base
    q = next(m for m in T.morphisms if is_cocartesian(F, m) and not T.is_identity(m))
    with pytest.raises(NoFactorization):
        cocartesian_factor(F, q, q, F.over(q))  # base does not factor


def test_op_cleavage_codomain_split(cod_diamond, diamond):
    """Codomain op-cleavage: colift of (f, (X, x)) is the square (id_X, f)."""
    F, data = cod_diamond
    op = build_op_cleavage(F)
    assert op.split
    T, B = F.total, F.base
    for f in B.morphisms:
        if B.is_identity(f):
            continue
        for P in F.objects_over(B.src[f]):
            got = op.colift(f, P)
            p_part, f_part = data.parts[got]
            assert f_part == f
            assert p_part == B.identity[B.src[P]]
            # codomain of the colift is f . x
            assert T.tgt[got] == B.compose(f, P)


def test_op_cleavage_identity_fibration(chain3):
    F = identity_prefibration(chain3)
    op = build_op_cleavage(F)
    assert op.split
    for (f, P), m in op.colifts.items():
        if chain3.is_identity(f):
            assert m == chain3.identity[P]


def test_dual_factorization_laws(cod_diamond):
    """cofactor(q r) . q = r, and the dual composite law, on all instances."""
    F, _ = cod_diamond
    T, B = F.total, F.base
    op = build_op_cleavage(F)
    for (f, P), down in op.colifts.items():
        for g in B.morphisms_from(B.tgt[f]):
            gf = B.compose(g, f)
            for r in F.morphisms_over(gf):
                if T.src[r] != P:
                    continue
                s = cocartesian_factor(F, down, r, g)
                assert T.compose(s, down) == r
