"""The idempotent completion, the embedding H and transfer across it."""

import itertools
import math

import pytest

from stabex.core import Mor
from stabex.instances import parse_instance
from stabex.karoubi import (
    KaroubiCategory,
    NotIdempotent,
    fully_faithful,
    idempotents_split,
    image_class,
    in_essential_image,
    preserve_pullback,
    reflect_pullback,
    split_idempotent,
    transfer_semistable,
)
from stabex.limits import KernelCert, pullback, verify_universal
from stabex.ring import Matrix

from helpers import cospans, image_by_scan

Z6 = parse_instance("zmod:6")
K = KaroubiCategory(Z6)


def crt_ranks(e: Mor):
    """Ranks of the image of e over F_2 and F_3, by enumeration."""
    img = image_by_scan(e)
    two = {tuple(3 * x % 6 for x in v) for v in img}
    three = {tuple(2 * x % 6 for x in v) for v in img}
    return round(math.log(len(two), 2)), round(math.log(len(three), 3))


def test_idempotent_count_matches_scan():
    for k in range(3):
        scan = [M for M in Matrix.all(6, k, k) if M @ M == M]
        assert len(K.idempotents(k)) == len(scan)
    assert len(K.objects(2)) == 1 + 4 + len([M for M in Matrix.all(6, 2, 2) if M @ M == M])


def test_dedup_gives_nine_classes():
    assert len(K.objects(2, dedup=True)) == 9
    assert {crt_ranks(X.p) for X in K.objects(2, dedup=True)} == set(itertools.product(range(3), repeat=2))


def test_essential_image_is_balanced_ranks():
    for X in K.objects(2, dedup=True):
        a, b = crt_ranks(X.p)
        found = in_essential_image(K, X, 2)
        assert (found is not None) == (a == b)
        if found:
            B, f, g = found
            assert K.compose(g, f) == K.identity(X) and K.compose(f, g) == K.identity(K.H(B))


def test_r3_r4_outside_image():
    for c in (3, 4):
        X = K.obj(1, Z6.mor([[c]]))
        assert in_essential_image(K, X, 2) is None
        assert not image_class(K).contains(X)


def test_diag_3_4_is_h1():
    X = K.obj(2, Z6.mor([[3, 0], [0, 4]]))
    B, f, g = in_essential_image(K, X, 1)
    assert B == 1


def test_non_idempotent_rejected():
    with pytest.raises(NotIdempotent):
        K.obj(1, Z6.mor([[2]]))
    with pytest.raises(NotIdempotent):
        split_idempotent(K, Mor(K.H(1), K.H(1), Z6.mor([[2]])))


def test_idempotents_split_with_oracle():
    ok, n = idempotents_split(K, 1, 1)
    assert ok and n == 10


def test_split_idempotent_on_rank_two():
    X = K.H(2)
    for e in K.homs(X, X):
        if K.compose(e, e) == e:
            cert = split_idempotent(K, e)
            assert K.is_zero(K.compose(e, cert.k))
            assert verify_universal(cert, 1)


def test_fully_faithful():
    assert fully_faithful(K, 2)


def test_biproduct_in_completion():
    X, Y = K.obj(1, Z6.mor([[3]])), K.obj(1, Z6.mor([[4]]))
    bp = K.biproduct(X, Y)
    assert K.compose(bp.proj1, bp.inj1) == K.identity(X)
    assert K.add(K.compose(bp.inj1, bp.proj1), K.compose(bp.inj2, bp.proj2)) == K.identity(bp.sum)
    # (R,3) + (R,4) is isomorphic to H(1)
    assert in_essential_image(K, bp.sum, 1)[0] == 1


def test_kernels_in_completion_pass_oracle():
    objs = K.objects(1)
    for X in objs:
        for Y in objs:
            for f in K.reps(X, Y, "iso"):
                k = K.kernel(f)
                assert k is not None
                assert verify_universal(KernelCert(K, f, k), 1)


def test_pullbacks_preserved_and_reflected():
    n = 0
    for d, h in cospans(Z6, 1):
        sq = pullback(Z6, d, h)
        if not sq:
            continue
        img = preserve_pullback(K, sq)
        assert img.commutes() and verify_universal(img, 1)
        back = reflect_pullback(K, pullback(K, K.embed(d), K.embed(h)), 2)
        assert back is not None and verify_universal(back, 1)
        n += 1
    assert n > 10


def test_transfer_agreement():
    objs = Z6.objects(2)
    n = 0
    for B in objs:
        for C in objs:
            for d in Z6.reps(B, C, "iso"):
                if Z6.is_cokernel(d):
                    assert transfer_semistable(K, d, 2).agree
                    n += 1
    assert n >= 6


def test_completion_of_capped_route():
    # the capped instance: the completion still agrees with the base on cokernels under the cap
    cap = parse_instance("capped:2:2")
    KC = KaroubiCategory(cap)
    d = cap.mor([[1]])
    assert transfer_semistable(KC, d, 1).agree
