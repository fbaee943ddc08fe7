"""Shared brute-force oracles and sweep generators for the tests."""

import itertools
import math

from stabex.limits import pullback


def nullspace_by_scan(f):
    """All x with f x == 0 over Z/n, by enumeration (f is a free-module Mor)."""
    M = f.data
    n = M.n
    return [x for x in itertools.product(range(n), repeat=M.cols)
            if all(sum(a * b for a, b in zip(row, x)) % n == 0 for row in M.data)]


def image_by_scan(f):
    """The column module of f over Z/n, by enumeration."""
    M = f.data
    n = M.n
    return {tuple(sum(a * b for a, b in zip(row, x)) % n for row in M.data)
            for x in itertools.product(range(n), repeat=M.cols)}


def is_free_z6(vectors):
    """A submodule of (Z/6)^m is free iff its 2-part and 3-part have equal dimension."""
    two = {tuple(3 * x % 6 for x in v) for v in vectors}
    three = {tuple(2 * x % 6 for x in v) for v in vectors}
    return round(math.log(len(two), 2)) == round(math.log(len(three), 3))


def cospans(cat, bound):
    """Cospans ``(d, h)`` up to isomorphism of cospans.

    An automorphism ``b`` of the common target moves ``h`` within its two-sided
    orbit while turning ``d`` into ``b d``, so ``h`` may range over two-sided
    representatives provided ``d`` ranges over all one-sided ones.
    """
    objs = cat.objects(bound)
    for B in objs:
        for C in objs:
            ds = cat.reps(B, C, "right")
            for Cp in objs:
                for h in cat.reps(Cp, C, "iso"):
                    for d in ds:
                        yield d, h


def pullback_squares(cat, bound):
    for d, h in cospans(cat, bound):
        sq = pullback(cat, d, h)
        if sq:
            yield sq
