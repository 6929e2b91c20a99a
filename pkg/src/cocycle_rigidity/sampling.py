"""Seeded random constructions: generators, points, homoclinic samples.

Everything takes an explicit numpy Generator so that scenario runs are fully
deterministic given the seed.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from cocycle_rigidity.cocycles import Cocycle, WindowGenerator
from cocycle_rigidity.symbolic import Point


def random_invertible(rng, dim, scale):
    """exp(scale * standard normal matrix): near Id for small scale, always in GL."""
    return expm(scale * rng.standard_normal((dim, dim)))


def random_generator(space, rng, dim, radius, scale, identity_words=()):
    """Seeded near-identity window generator, optionally pinned to Id on some words."""
    identity_words = {tuple(w) for w in identity_words}
    table = {}
    for w in space.admissible_words(2 * radius + 1):
        if w in identity_words:
            table[w] = np.eye(dim)
        else:
            table[w] = random_invertible(rng, dim, scale)
    return WindowGenerator(dim, radius, table)


def random_cocycle(space, rng, dim, radius, scale, identity_words=()):
    return Cocycle(space, random_generator(space, rng, dim, radius, scale, identity_words))


def _random_walk(space, rng, start, length):
    w = [start]
    while len(w) < length:
        opts = space.successors(w[-1])
        w.append(opts[int(rng.integers(len(opts)))])
    return w


def random_point(space, rng, core_len=6):
    """Random eventually periodic admissible point.

    A forward walk from a random symbol supplies the core and, by walking until
    a symbol repeats, an admissible cycle for the right tail; the left tail
    comes from the same construction on the reversed graph.
    """
    k = space.alphabet_size
    start = int(rng.integers(k))
    core = _random_walk(space, rng, start, max(core_len, 1))
    # extend right until some symbol repeats; the loop becomes the right period
    seen = {core[-1]: len(core) - 1}
    walk = list(core)
    while True:
        opts = space.successors(walk[-1])
        walk.append(opts[int(rng.integers(len(opts)))])
        if walk[-1] in seen:
            i = seen[walk[-1]]
            right = tuple(walk[i:-1])
            core_right = walk[:i]
            break
        seen[walk[-1]] = len(walk) - 1
    # same on the left, walking backwards through predecessors
    seen = {core_right[0]: 0}
    back = [core_right[0]]
    while True:
        opts = space.predecessors(back[-1])
        back.append(opts[int(rng.integers(len(opts)))])
        if back[-1] in seen:
            i = seen[back[-1]]
            left = tuple(reversed(back[i:-1]))
            prefix = list(reversed(back[1:i]))
            break
        seen[back[-1]] = len(back) - 1
    word = tuple(prefix) + tuple(core_right)
    offset = int(rng.integers(-3, 4)) - len(prefix)
    return Point(left, word, right, offset)


def random_homoclinic(space, rng, anchor, max_radius=6, min_radius=1):
    """Random point agreeing with the anchor outside a bounded window."""
    r = int(rng.integers(min_radius, max_radius + 1))
    start = -int(rng.integers(0, r + 1))
    word = tuple(_random_walk(space, rng, int(rng.integers(space.alphabet_size)), r))
    return space.splice(anchor, word, start)


def random_stable_pair(space, rng, base, max_radius=5):
    """A point differing from `base` only at coordinates <= -1 (same stable class)."""
    r = int(rng.integers(1, max_radius + 1))
    hi = -1
    lo = hi - r + 1
    # resample an admissible word between the fixed endpoint symbols
    a = base.symbol_at(lo - 1)
    b = base.symbol_at(hi + 1)
    for _ in range(64):
        w = _random_walk(space, rng, int(rng.integers(space.alphabet_size)), r)
        if space.pair_ok(a, w[0]) and space.pair_ok(w[-1], b):
            core = base.window(min(base.offset, lo), lo) + tuple(w) + base.window(
                hi + 1, max(base.right_start, hi + 1)
            )
            lo2 = min(base.offset, lo)
            left = tuple(base.symbol_at(lo2 - len(base.left) + i) for i in range(len(base.left)))
            hi2 = max(base.right_start, hi + 1)
            right = tuple(base.symbol_at(hi2 + i) for i in range(len(base.right)))
            return Point(left, core, right, lo2)
    return base


def random_near_recurrent(space, rng, n, pad=5):
    """Point z with d(f^n z, z) small: n*step-periodic word, randomized far away.

    The periodic word occupies [-(pad + n*step), n*step + pad]; outside it the
    tails are random, so z is genuinely non-periodic but n-near-recurrent.
    """
    length = n * space.step
    for _ in range(64):
        w = _random_walk(space, rng, int(rng.integers(space.alphabet_size)), length)
        if space.pair_ok(w[-1], w[0]):
            p = Point(tuple(w), (), tuple(w), 0)
            break
    else:
        p = space.periodic_points(n)[0]
    z = random_point(space, rng)
    r = pad + length
    return space.splice(z, p.window(-r, r + 1), -r)
