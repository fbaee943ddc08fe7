"""Chain complexes and projective spectra built on an instance."""

import itertools

import pytest

from stabex.constructions import (
    ChainCategory,
    SpectrumCategory,
    degreewise_stable_equiv,
    equivalence_sweep,
    kernel_cokernel_pairs,
    levelwise_stable_equiv,
)
from stabex.core import CategoryError, ShapeMismatch
from stabex.instances import parse_instance
from stabex.limits import CokernelCert, KernelCert, verify_universal
from stabex.stability import certify_stable_ses

F2 = parse_instance("zmod:2")
Z6 = parse_instance("zmod:6")
P2 = parse_instance("pairs:2")


def brute_homs(cat, X, Y):
    b = cat.base
    out = []
    for fs in itertools.product(*(b.homs(A, B) for A, B in zip(X.objs, Y.objs))):
        if cat.is_morphism(X, Y, fs):
            out.append(fs)
    return out


def test_chain_relations_enforced():
    C = ChainCategory(F2, 3)
    one = F2.identity(1)
    with pytest.raises(CategoryError):
        C.make([1, 1, 1], [one, one])
    with pytest.raises(ShapeMismatch):
        C.make([1, 1])
    for X in C.objects(1):
        assert C.relations_hold(X.arrows)


def test_chain_object_count():
    # F_2, ranks <= 1, three degrees: 8 rank patterns, differentials nonzero only between rank-1 spots,
    # never two consecutive nonzero ones
    C = ChainCategory(F2, 3)
    count = 0
    for objs in itertools.product(range(2), repeat=3):
        for a, b in itertools.product(range(2), repeat=2):
            arrows = (a * objs[0] * objs[1], b * objs[1] * objs[2])
            if (a and not (objs[0] and objs[1])) or (b and not (objs[1] and objs[2])):
                continue
            if a and b:
                continue
            count += 1
    assert len(C.objects(1)) == count


@pytest.mark.parametrize("kind", [ChainCategory, SpectrumCategory])
@pytest.mark.parametrize("base", [F2, Z6], ids=["F2", "zmod6"])
def test_homs_and_basis_match_brute_force(kind, base):
    cat = kind(base, 2)
    objs = cat.objects(1)
    for X in objs:
        for Y in objs:
            brute = brute_homs(cat, X, Y)
            homs = [f.data for f in cat.homs(X, Y)]
            assert len(homs) == len(set(homs)) and set(homs) == set(brute)
            span = {cat.zero(X, Y)}
            for v in cat.hom_basis(X, Y):
                span |= {cat.add(s, cat.scale(k, v)) for s in span for k in range(base.modulus)}
            assert {f.data for f in span} == set(brute)


@pytest.mark.parametrize("kind", [ChainCategory, SpectrumCategory])
def test_positionwise_kernels_pass_oracle(kind):
    cat = kind(F2, 2)
    objs = cat.objects(1)
    for X in objs:
        for Y in objs:
            for f in cat.reps(X, Y, "iso"):
                k, c = cat.kernel(f), cat.cokernel(f)
                assert verify_universal(KernelCert(cat, f, k), 1)
                assert verify_universal(CokernelCert(cat, f, c), 1)


def test_biproducts():
    cat = SpectrumCategory(Z6, 2)
    for X in cat.objects(1)[:6]:
        for Y in cat.objects(1)[:6]:
            bp = cat.biproduct(X, Y)
            assert cat.compose(bp.proj1, bp.inj1) == cat.identity(X)
            assert cat.add(cat.compose(bp.inj1, bp.proj1), cat.compose(bp.inj2, bp.proj2)) == cat.identity(bp.sum)


def test_concentrated_complex():
    C = ChainCategory(Z6, 3)
    X = C.concentrated(2, 1)
    assert X.objs == (0, 2, 0)
    with pytest.raises(IndexError):
        C.concentrated(1, 3)
    target = C.make([0, 1, 0])
    f = C.concentrated_map(Z6.mor([[1, 2]]), 1, target)
    assert C.at(f, 1) == Z6.mor([[1, 2]])


def test_spectrum_bonds():
    S = SpectrumCategory(Z6, 3)
    X = S.make([1, 1, 1], [Z6.mor([[2]]), Z6.mor([[5]])])
    assert S.bond(X, 2, 0) == Z6.mor([[4]])
    assert S.bond(X, 1, 1) == Z6.identity(1)
    assert S.coherent(X)
    with pytest.raises(ValueError):
        S.bond(X, 0, 1)
    c = S.constant_map(Z6.mor([[3]]))
    assert c.dom == S.constant(1)


@pytest.mark.parametrize("kind,fn", [(ChainCategory, degreewise_stable_equiv),
                                     (SpectrumCategory, levelwise_stable_equiv)])
@pytest.mark.parametrize("base", [F2, Z6], ids=["F2", "zmod6"])
def test_positionwise_equivalence_bound_one(kind, fn, base):
    cat = kind(base, 2)
    pairs = list(kernel_cokernel_pairs(cat, 1))
    assert pairs
    for i, d in pairs:
        assert fn(cat, i, d, 1).agree


def test_pairs_chain_equivalence():
    rep = equivalence_sweep(ChainCategory(P2, 2), 1)
    assert rep.passed and rep.total > 0


def test_length_one_collapses_to_base():
    S = SpectrumCategory(Z6, 1)
    base = [(i, d) for i, d in kernel_cokernel_pairs(Z6, 2)]
    diag = [(i, d) for i, d in kernel_cokernel_pairs(S, 2)]
    assert len(base) == len(diag)
    for (i, d), (I, D) in zip(base, diag):
        assert (I.data, D.data) == ((i,), (d,))
        assert certify_stable_ses(Z6, i, d, 2).stable == certify_stable_ses(S, I, D, 2).stable


def test_reduced_pairs_cover_all_pairs():
    cat = ChainCategory(Z6, 2)
    reduced = list(kernel_cokernel_pairs(cat, 1))
    everything = list(kernel_cokernel_pairs(cat, 1, up_to_iso=False))
    assert len(reduced) < len(everything)
    verdicts = {certify_stable_ses(cat, i, d, 1).stable for i, d in everything}
    assert verdicts == {certify_stable_ses(cat, i, d, 1).stable for i, d in reduced}


def test_length_validation():
    with pytest.raises(ValueError):
        ChainCategory(Z6, 0)
