"""Symbolic hyperbolic dynamics: the shift on eventually periodic bi-infinite
sequences.

A point is stored as (left period, core, right period, origin offset) in a
canonical form.  This class of sequences is closed under shifting, splicing
(bracket), orbit closing and homoclinic approximation, contains every periodic
point, is dense, and admits exact evaluation of the exponential metric
d(x, y) = sum_n e^(-lambda*|n|) * [x_n != y_n], since the disagreement set of
two eventually periodic sequences is a finite block plus two periodic tails.

Derived hyperbolicity constants (for metric rate lambda, one-step shift):
    C1 = 1, contraction e^(-lambda), epsilon = 1/2, tau = e^(-lambda),
    epsilon0 = e^(-lambda), C5 = e^(lambda) / (1 - e^(-lambda)).
The contraction bullet holds with equality: if two points agree on all
coordinates >= 0, every disagreement sits at some n <= -1 and shifting moves it
one step further out, scaling its weight by exactly e^(-lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYMBOL_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


class AdmissibilityError(ValueError):
    """A word or point violates the transition matrix."""


class EnumerationCapError(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


def _primitive_root(word):
    """Smallest word whose repetition equals `word` (KMP failure function)."""
    n = len(word)
    pi = [0] * n
    k = 0
    for i in range(1, n):
        while k and word[i] != word[k]:
            k = pi[k - 1]
        if word[i] == word[k]:
            k += 1
        pi[i] = k
    p = n - pi[-1]
    return word[:p] if n % p == 0 else word


def _rot_right(w):
    return w[-1:] + w[:-1]


def _rot_left(w):
    return w[1:] + w[:1]


def _canonical(left, core, right, offset):
    """Canonical representation: primitive tails, minimal core, pinned junction.

    The right tail starts at the least coordinate from which the sequence is
    eventually periodic with (a rotation of) the primitive right word; fully
    periodic sequences are pinned at offset 0.  Two sequences are equal iff
    their canonical tuples are equal.
    """
    if not left or not right:
        raise ValueError("period words must be nonempty")
    left = _primitive_root(left)
    right = _primitive_root(right)
    # absorb the core into the tails
    while core and core[-1] == right[-1]:
        core = core[:-1]
        right = _rot_right(right)
    while core and core[0] == left[0]:
        core = core[1:]
        left = _rot_left(left)
        offset += 1
    if core:
        return left, core, right, offset
    # empty core: move the junction left as far as possible
    cap = math.lcm(len(left), len(right))
    orig_right, orig_offset = right, offset
    moved = 0
    while moved < cap and left[-1] == right[-1]:
        left = _rot_right(left)
        right = _rot_right(right)
        offset -= 1
        moved += 1
    if moved == cap:
        # survived a full joint period: Fine-Wilf forces full periodicity
        r = len(orig_right)
        word = tuple(orig_right[(i - orig_offset) % r] for i in range(r))
        return word, (), word, 0
    return left, (), right, offset


class Point:
    """An eventually periodic bi-infinite symbol sequence.

    Coordinate n holds: core[n - offset] for offset <= n < offset + len(core),
    the right period for larger n, the left period for smaller n.  Instances
    are immutable and always canonical, so == and hash are structural.
    """

    __slots__ = ("left", "core", "right", "offset", "_hash")

    def __init__(self, left, core=(), right=None, offset=0):
        if right is None:
            right = left
        left, core, right, offset = _canonical(
            tuple(left), tuple(core), tuple(right), int(offset)
        )
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "_hash", hash((left, core, right, offset)))

    def __setattr__(self, name, value):
        raise AttributeError("Point is immutable")

    @property
    def right_start(self):
        return self.offset + len(self.core)

    def symbol_at(self, n):
        if n < self.offset:
            return self.left[(n - self.offset) % len(self.left)]
        if n < self.right_start:
            return self.core[n - self.offset]
        return self.right[(n - self.right_start) % len(self.right)]

    def window(self, lo, hi):
        """Symbols at coordinates lo, lo+1, ..., hi-1."""
        return tuple(self.symbol_at(n) for n in range(lo, hi))

    def shifted(self, k):
        """The sequence n -> self[n + k] (k applications of the left shift)."""
        if k == 0:
            return self
        return Point(self.left, self.core, self.right, self.offset - k)

    @property
    def fully_periodic(self):
        return not self.core and self.left == self.right and self.offset == 0

    @property
    def word_period(self):
        """Primitive period length if fully periodic, else None."""
        return len(self.right) if self.fully_periodic else None

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.left == other.left
            and self.core == other.core
            and self.right == other.right
            and self.offset == other.offset
        )

    def __hash__(self):
        return self._hash

    @classmethod
    def parse(cls, text):
        """Parse the literal syntax `(w_left)* core . core (w_right)*`.

        The dot marks the boundary between coordinates -1 and 0, e.g.
        `(0)*10.01(0)*` has symbol 1 at coordinate -2 and 0 at coordinate 0.
        """
        s = text.strip().replace(" ", "")
        if not (s.startswith("(") and s.endswith(")*")):
            raise ValueError(f"bad point literal: {text!r}")
        i = s.index(")*")
        left = s[1:i]
        rest = s[i + 2 : -2]
        j = rest.rindex("(")
        mid, right = rest[:j], rest[j + 1 :]
        if ")" in right or mid.count(".") != 1:
            raise ValueError(f"bad point literal: {text!r}")
        past, future = mid.split(".")
        to_sym = lambda w: tuple(SYMBOL_CHARS.index(c) for c in w)
        return cls(to_sym(left), to_sym(past + future), to_sym(right), -len(past))

    def __str__(self):
        lo = min(self.offset, 0)
        hi = max(self.right_start, 0)
        chars = lambda syms: "".join(SYMBOL_CHARS[v] for v in syms)
        lword = chars(self.window(lo - len(self.left), lo))
        rword = chars(self.window(hi, hi + len(self.right)))
        mid = chars(self.window(lo, hi))
        cut = -lo
        return f"({lword})*{mid[:cut]}.{mid[cut:]}({rword})*"

    def __repr__(self):
        return f"Point({self})"


@dataclass(frozen=True)
class Agreement:
    """Agreement ranges of two sequences.

    s_index: least N with x_n = y_n for all n >= N (+inf if none, -inf when the
    points are equal).  u_index: greatest N with x_n = y_n for all n <= N
    (-inf if none, +inf when equal).  Stable/unstable set membership is
    finiteness of the respective index.
    """

    s_index: float
    u_index: float

    @property
    def everywhere(self):
        return self.s_index == -math.inf

    @property
    def stable(self):
        return self.s_index < math.inf

    @property
    def unstable(self):
        return self.u_index > -math.inf

    @property
    def homoclinic(self):
        return self.stable and self.unstable


def agreement_range(x, y):
    if x == y:
        return Agreement(-math.inf, math.inf)
    lo = min(x.offset, y.offset, 0)
    hi = max(x.right_start, y.right_start, 0)
    rho_r = math.lcm(len(x.right), len(y.right))
    rho_l = math.lcm(len(x.left), len(y.left))
    right_bad = [j for j in range(rho_r) if x.symbol_at(hi + j) != y.symbol_at(hi + j)]
    left_bad = [j for j in range(1, rho_l + 1) if x.symbol_at(lo - j) != y.symbol_at(lo - j)]
    mid_bad = [n for n in range(lo, hi) if x.symbol_at(n) != y.symbol_at(n)]

    if right_bad:
        s_index = math.inf
    else:
        cands = list(mid_bad)
        if left_bad:
            cands.append(lo - min(left_bad))
        s_index = max(cands) + 1 if cands else -math.inf
    if left_bad:
        u_index = -math.inf
    else:
        cands = list(mid_bad)
        if right_bad:
            cands.append(hi + min(right_bad))
        u_index = min(cands) - 1 if cands else math.inf
    return Agreement(s_index, u_index)


def _parse_transition(transition, k):
    t = np.asarray(transition, dtype=np.int64)
    if t.shape != (k, k) or not np.isin(t, (0, 1)).all():
        raise ValueError("transition must be a k x k 0/1 matrix")
    return t


class ShiftSpace:
    """A full shift or mixing subshift of finite type with exponential metric.

    `step` reinterprets the dynamics as f^step on the same metric space (used
    by induced-power cocycles); the metric always uses the base rate `lam`,
    while per-application contraction is e^(-rate) with rate = step * lam.
    """

    def __init__(self, alphabet_size, lam, transition=None, step=1, enumeration_cap=500_000):
        if alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if not lam > 0:
            raise ValueError("lam must be positive")
        if step < 1:
            raise ValueError("step must be >= 1")
        self.alphabet_size = int(alphabet_size)
        self.lam = float(lam)
        self.step = int(step)
        self.enumeration_cap = int(enumeration_cap)
        k = self.alphabet_size
        if transition is None:
            self.transition = None
        else:
            t = _parse_transition(transition, k)
            if (t.sum(axis=1) == 0).any() or (t.sum(axis=0) == 0).any():
                raise ValueError("transition has a stranded symbol (empty row or column)")
            if not t.diagonal().any():
                raise ValueError("subshift has no fixed point (no diagonal 1)")
            b = t.astype(bool)
            power = b.copy()
            for _ in range(k * k):
                if power.all():
                    break
                power = power @ b
            else:
                if not power.all():
                    raise ValueError("subshift is not topologically mixing")
            self.transition = t
        self._succ = [
            tuple(
                s
                for s in range(k)
                if self.transition is None or self.transition[a, s]
            )
            for a in range(k)
        ]
        self._pred = [
            tuple(
                s
                for s in range(k)
                if self.transition is None or self.transition[s, a]
            )
            for a in range(k)
        ]

    # -- derived constants -------------------------------------------------

    @property
    def rate(self):
        """Contraction exponent per application of the dynamics."""
        return self.lam * self.step

    @property
    def contraction(self):
        return math.exp(-self.rate)

    @property
    def epsilon(self):
        return 0.5

    @property
    def tau(self):
        # d < tau forces agreement on |n| <= 1, which pins the bracket splice
        return math.exp(-self.lam)

    @property
    def epsilon0(self):
        # closing threshold; same agreement argument makes the cyclic word valid
        return math.exp(-self.lam)

    @property
    def c5(self):
        return math.exp(self.rate) / (1.0 - math.exp(-self.rate))

    def with_step(self, factor):
        return ShiftSpace(
            self.alphabet_size,
            self.lam,
            self.transition,
            step=self.step * factor,
            enumeration_cap=self.enumeration_cap,
        )

    def same_geometry(self, other):
        a = self.transition
        b = other.transition
        return (
            self.alphabet_size == other.alphabet_size
            and self.lam == other.lam
            and ((a is None) == (b is None))
            and (a is None or (a == b).all())
        )

    # -- admissibility -----------------------------------------------------

    def pair_ok(self, a, b):
        return self.transition is None or bool(self.transition[a, b])

    def successors(self, a):
        return self._succ[a]

    def predecessors(self, a):
        return self._pred[a]

    def word_admissible(self, word, cyclic=False):
        k = self.alphabet_size
        if any(not (0 <= s < k) for s in word):
            return False
        pairs = zip(word, word[1:])
        if not all(self.pair_ok(a, b) for a, b in pairs):
            return False
        if cyclic and len(word) >= 1 and not self.pair_ok(word[-1], word[0]):
            return False
        return True

    def is_admissible(self, p):
        lo = min(p.offset, 0) - len(p.left)
        hi = max(p.right_start, 0) + len(p.right) + 1
        w = p.window(lo, hi)
        return self.word_admissible(w) and all(s < self.alphabet_size for s in w)

    def require_admissible(self, p):
        if not self.is_admissible(p):
            raise AdmissibilityError(f"point {p} is not admissible in this space")

    def admissible_words(self, length, cap=None):
        """All admissible words of the given length, lexicographic order."""
        k = self.alphabet_size
        cap = self.enumeration_cap if cap is None else cap
        if k**length > cap and self.transition is None:
            raise EnumerationCapError(f"{k}^{length} words exceed cap {cap}")
        out = []
        stack = [((s,)) for s in range(k - 1, -1, -1)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                out.append(w)
                if len(out) > cap:
                    raise EnumerationCapError(f"admissible words exceed cap {cap}")
                continue
            for s in reversed(self._succ[w[-1]]):
                stack.append(w + (s,))
        return out

    # -- dynamics and metric -------------------------------------------------

    def shift(self, x, n=1):
        """n applications of the dynamics (each advances `step` symbols)."""
        return x.shifted(n * self.step)

    def metric(self, x, y):
        """Exact value of sum_n e^(-lam |n|) [x_n != y_n] via geometric tails."""
        if x == y:
            return 0.0
        lam = self.lam
        lo = min(x.offset, y.offset, 0)
        hi = max(x.right_start, y.right_start, 0)
        total = 0.0
        for n in range(lo, hi):
            if x.symbol_at(n) != y.symbol_at(n):
                total += math.exp(-lam * abs(n))
        rho_r = math.lcm(len(x.right), len(y.right))
        s = 0.0
        for j in range(rho_r):
            if x.symbol_at(hi + j) != y.symbol_at(hi + j):
                s += math.exp(-lam * (hi + j))
        total += s / (1.0 - math.exp(-lam * rho_r))
        rho_l = math.lcm(len(x.left), len(y.left))
        s = 0.0
        for j in range(1, rho_l + 1):
            if x.symbol_at(lo - j) != y.symbol_at(lo - j):
                s += math.exp(-lam * (j - lo))
        total += s / (1.0 - math.exp(-lam * rho_l))
        return total

    def in_stable_epsilon(self, x, y, eps=None):
        """Exact test of sup_{n>=0} d(f^n x, f^n y) <= eps.

        For points agreeing on coordinates >= 0 the sup is attained at n = 0,
        so membership is agreement plus a single metric evaluation.
        """
        eps = self.epsilon if eps is None else eps
        if agreement_range(x, y).s_index > 0:
            return False
        return self.metric(x, y) <= eps

    def in_unstable_epsilon(self, x, y, eps=None):
        eps = self.epsilon if eps is None else eps
        if agreement_range(x, y).u_index < 0:
            return False
        return self.metric(x, y) <= eps

    def bracket(self, x, y):
        """The unique point of W^s_eps(x) and W^u_eps(y): future of x, past of y."""
        d = self.metric(x, y)
        if not d < self.tau:
            raise ValueError(f"bracket undefined: d(x, y) = {d:.6g} >= tau = {self.tau:.6g}")
        cut_l = min(y.offset, 0)
        cut_r = max(x.right_start, 0)
        core = y.window(cut_l, 0) + x.window(0, cut_r)
        l = len(y.left)
        left = tuple(y.symbol_at(cut_l - l + i) for i in range(l))
        r = len(x.right)
        right = tuple(x.symbol_at(cut_r + i) for i in range(r))
        return Point(left, core, right, cut_l)

    def closing(self, z, n):
        """Periodic point from the first n dynamics-steps of a near-recurrent z.

        Requires d(f^n z, z) < epsilon0.  The returned p repeats the word
        z_0 ... z_{n*step-1} and satisfies the shadowing bound
        d(f^j z, f^j p) <= C5 e^(-rate*min(j, n-j)) d(f^n z, z), j = 0..n.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        gap = self.metric(self.shift(z, n), z)
        if not gap < self.epsilon0:
            raise ValueError(
                f"closing precondition failed: d(f^n z, z) = {gap:.6g} >= epsilon0 = {self.epsilon0:.6g}"
            )
        word = z.window(0, n * self.step)
        if not self.word_admissible(word, cyclic=True):
            raise AdmissibilityError(
                "inadmissible cyclic word; cannot occur when epsilon0 <= exp(-lambda)"
            )
        return Point(word, (), word, 0)

    def shadowing_bound(self, j, n, gap):
        return self.c5 * math.exp(-self.rate * min(j, n - j)) * gap

    def periodic_points(self, n):
        """All p with f^n(p) = p, i.e. cyclically admissible words of length n*step."""
        if n < 1:
            raise ValueError("n must be >= 1")
        length = n * self.step
        k = self.alphabet_size
        if self.transition is None:
            count = k**length
        else:
            count = int(np.linalg.matrix_power(self.transition, length).trace())
        if count > self.enumeration_cap:
            raise EnumerationCapError(
                f"{count} periodic points exceed cap {self.enumeration_cap}"
            )
        pts = []
        stack = [(s,) for s in range(k - 1, -1, -1)]
        while stack:
            w = stack.pop()
            if len(w) == length:
                if self.pair_ok(w[-1], w[0]):
                    pts.append(Point(w, (), w, 0))
                continue
            for s in reversed(self._succ[w[-1]]):
                stack.append(w + (s,))
        return pts

    def fixed_points(self):
        return self.periodic_points(1)

    def smallest_fixed_point(self):
        pts = self.fixed_points()
        return min(pts, key=lambda p: p.window(0, self.step))

    # -- homoclinic splicing -------------------------------------------------

    def _exact_path(self, a, b, t):
        """Least such word u_1..u_t with a -> u_1 -> ... -> u_t -> b admissible, or None."""
        if t == 0:
            return () if self.pair_ok(a, b) else None
        if self.transition is None:
            return (0,) * t
        reach = [None] * (t + 1)
        reach[t] = {b}
        bt = self.transition
        for i in range(t - 1, -1, -1):
            reach[i] = {
                s
                for s in range(self.alphabet_size)
                if any(bt[s, q] for q in reach[i + 1])
            }
        path = []
        cur = a
        for i in range(t):
            options = [s for s in self._succ[cur] if s in reach[i]]
            if not options:
                return None
            path.append(options[0])
            cur = options[0]
        return tuple(path) if self.pair_ok(cur, b) else None

    def splice(self, anchor, word, start):
        """Point equal to `word` on [start, start+len(word)) and to `anchor` outside.

        For subshifts, connecting words (guaranteed by mixing) are inserted just
        outside the window when the junction pairs are inadmissible.  A left
        connector of length t occupies [start-t, start), so its entry symbol
        depends on t; both junctions are searched over t up to the mixing cap.
        """
        end = start + len(word)
        if not self.word_admissible(word):
            raise AdmissibilityError("spliced word is not admissible")
        cap = self.alphabet_size**2 + 2
        conn_l = conn_r = None
        for t in range(cap):
            u = self._exact_path(anchor.symbol_at(start - t - 1), word[0], t)
            if u is not None:
                conn_l = u
                break
        for t in range(cap):
            u = self._exact_path(word[-1], anchor.symbol_at(end + t), t)
            if u is not None:
                conn_r = u
                break
        if conn_l is None or conn_r is None:
            raise AdmissibilityError("no connecting word within the mixing cap")
        core = conn_l + tuple(word) + conn_r
        lo = start - len(conn_l)
        hi = end + len(conn_r)
        l = len(anchor.left)
        left = tuple(anchor.symbol_at(lo - l + i) for i in range(l))
        r = len(anchor.right)
        right = tuple(anchor.symbol_at(hi + i) for i in range(r))
        return Point(left, core, right, lo)

    def homoclinic_approximant(self, z, x_fixed, radius):
        """Point agreeing with z on |n| <= radius and with the fixed point outside."""
        if self.shift(x_fixed, 1) != x_fixed:
            raise ValueError("x_fixed is not fixed by the dynamics")
        word = z.window(-radius, radius + 1)
        return self.splice(x_fixed, word, -radius)

    def __repr__(self):
        kind = "full" if self.transition is None else "sft"
        return (
            f"ShiftSpace(k={self.alphabet_size}, lam={self.lam:.6g}, "
            f"{kind}, step={self.step})"
        )
