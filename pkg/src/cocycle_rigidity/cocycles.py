"""Finite-window matrix cocycles over a shift space.

A generator is a locally constant map into GL(d, R): a lookup table over
symbol words of radius m.  Locally constant maps are Lipschitz in the shift
metric with a computable constant, their fiber-bunching suprema are exact
maxima over finitely many cylinders, and their invariant holonomies stabilize
at finite depth, which gives the holonomy module an exact internal oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cocycle_rigidity.symbolic import EnumerationCapError, agreement_range


def operator_norm(m):
    """Largest singular value."""
    return float(np.linalg.norm(m, 2))


class CocycleOverflowError(RuntimeError):
    """An intermediate product exceeded the configured norm cap."""


class WindowGenerator:
    """Lookup table word (length 2m+1) -> invertible d x d matrix."""

    def __init__(self, dim, radius, table, det_floor=1e-8):
        self.dim = int(dim)
        self.radius = int(radius)
        if self.dim < 1 or self.radius < 0:
            raise ValueError("dim must be >= 1 and radius >= 0")
        width = 2 * self.radius + 1
        entries = {}
        for word in sorted(table):
            w = tuple(word)
            if len(w) != width:
                raise ValueError(f"table word {w} has length {len(w)}, expected {width}")
            m = np.array(table[word], dtype=float)
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"entry for {w} has shape {m.shape}")
            if abs(np.linalg.det(m)) < det_floor:
                raise ValueError(f"entry for {w} is not invertible (|det| < {det_floor})")
            m.setflags(write=False)
            entries[w] = m
        self.table = entries

    def value(self, word):
        return self.table[tuple(word)]

    def words(self):
        return self.table.keys()

    def inverse(self):
        inv = {w: np.linalg.inv(m) for w, m in self.table.items()}
        return WindowGenerator(self.dim, self.radius, inv)

    @classmethod
    def constant(cls, alphabet_size, matrix):
        return cls(len(matrix), 0, {(s,): matrix for s in range(alphabet_size)})

    def __repr__(self):
        return f"WindowGenerator(d={self.dim}, m={self.radius}, {len(self.table)} words)"


def save_generator(gen, path):
    from cocycle_rigidity.symbolic import SYMBOL_CHARS

    lines = [f"dim {gen.dim}", f"radius {gen.radius}"]
    for w, m in gen.table.items():
        word = "".join(SYMBOL_CHARS[s] for s in w)
        entries = " ".join(f"{v:.17g}" for v in m.reshape(-1))
        lines.append(f"{word} {entries}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_generator(path):
    from cocycle_rigidity.symbolic import SYMBOL_CHARS

    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines[0].startswith("dim ") or not lines[1].startswith("radius "):
        raise ValueError("generator file must start with 'dim' and 'radius' lines")
    dim = int(lines[0].split()[1])
    radius = int(lines[1].split()[1])
    table = {}
    for ln in lines[2:]:
        parts = ln.split()
        word = tuple(SYMBOL_CHARS.index(c) for c in parts[0])
        vals = [float(v) for v in parts[1:]]
        if len(vals) != dim * dim:
            raise ValueError(f"record for {parts[0]} has {len(vals)} entries")
        table[word] = np.array(vals).reshape(dim, dim)
    return WindowGenerator(dim, radius, table)


class BunchingRow(NamedTuple):
    n: int
    sup_product: float  # sup over cylinders of |A^n(x)| * |A^n(x)^-1|
    sup_norm: float  # sup |A^n|
    sup_inverse: float  # sup |(A^n)^-1|


@dataclass(frozen=True)
class BunchingReport:
    horizon: int
    mode: str
    theta_hat: float
    c3_hat: float
    bunched: bool
    margin: float
    rate: float
    per_n: tuple

    def row(self, n):
        return self.per_n[n - 1]


@dataclass(frozen=True)
class LyapunovPair:
    lambda_plus: float
    lambda_minus: float
    period: int


class Cocycle:
    """A window generator paired with its shift space."""

    def __init__(self, space, generator, check_totality=True):
        self.space = space
        self.generator = generator
        if check_totality:
            width = 2 * generator.radius + 1
            for w in space.admissible_words(width):
                if w not in generator.table:
                    raise ValueError(f"generator table is missing admissible word {w}")

    @property
    def dim(self):
        return self.generator.dim

    @property
    def radius(self):
        return self.generator.radius

    def evaluate(self, x):
        m = self.radius
        return self.generator.value(x.window(-m, m + 1))

    def _factors(self, x, n):
        """Generator values along x, f(x), ..., f^(n-1)(x) without re-shifting."""
        m = self.radius
        s = self.space.step
        syms = x.window(-m, (n - 1) * s + m + 1)
        width = 2 * m + 1
        table = self.generator.table
        return [table[tuple(syms[j * s : j * s + width])] for j in range(n)]

    def iterate(self, x, n, norm_cap=1e100):
        """The product A^n(x): A(f^{n-1}x) ... A(x), Id at n = 0, inverse chain for n < 0."""
        d = self.dim
        if n == 0:
            return np.eye(d)
        if n < 0:
            forward = self.iterate(self.space.shift(x, n), -n, norm_cap=norm_cap)
            return np.linalg.inv(forward)
        out = np.eye(d)
        for f in self._factors(x, n):
            out = f @ out
            if np.abs(out).max() > norm_cap:
                raise CocycleOverflowError(f"norm cap {norm_cap:g} exceeded at step {n}")
        return out

    def cocycle_property_residual(self, x, p, q):
        lhs = self.iterate(x, p + q)
        rhs = self.iterate(self.space.shift(x, q), p) @ self.iterate(x, q)
        return operator_norm(lhs - rhs)

    def lipschitz_constant(self):
        """A certified Lipschitz constant: e^(lam*m) * max pairwise table gap.

        Two points with different generator values differ somewhere in the
        central window, hence are at distance >= e^(-lam*m).
        """
        mats = list(self.generator.table.values())
        worst = 0.0
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                worst = max(worst, operator_norm(mats[i] - mats[j]))
        return worst * math.exp(self.space.lam * self.radius)

    # -- fiber bunching ------------------------------------------------------

    def _extend_cylinders(self, words, prods, cap):
        """Every admissible step-length extension; one new cocycle factor each."""
        table = self.generator.table
        width = 2 * self.radius + 1
        s = self.space.step
        succ = self.space.successors
        new_words = []
        factors = []
        parents = []
        for i, w in enumerate(words):
            stack = [w]
            while stack:
                v = stack.pop()
                if len(v) == len(w) + s:
                    new_words.append(v)
                    factors.append(table[v[-width:]])
                    parents.append(i)
                    continue
                for a in succ(v[-1]):
                    stack.append(v + (a,))
        if len(new_words) > cap:
            raise EnumerationCapError(f"exhaustive bunching exceeded {cap} cylinders")
        new_prods = np.stack(factors) @ prods[np.array(parents)]
        return new_words, new_prods

    def bunching_report(
        self,
        horizon,
        mode="exhaustive",
        samples=200,
        seed=0,
        margin=0.0,
        cylinder_cap=200_000,
    ):
        """Per-n suprema of |A^n| |(A^n)^-1| over cylinders, with a fitted rate.

        Exhaustive mode maximizes over every admissible cylinder of length
        n*step + 2m (the product depends on nothing else), so the sup is exact;
        sampled mode evaluates seeded random cylinders and gives lower bounds.
        theta_hat / c3_hat come from least squares on the upper half of the
        horizon; the transient is absorbed into C3.  A single SVD per level
        provides |A^n| (largest singular value) and |(A^n)^-1| (reciprocal of
        the smallest).
        """
        if horizon < 2:
            raise ValueError("horizon must be >= 2")
        m = self.radius
        width = 2 * m + 1
        s = self.space.step
        table = self.generator.table
        rows = []
        if mode == "exhaustive":
            k = self.space.alphabet_size
            if k ** ((horizon - 1) * s + width) > cylinder_cap:
                raise EnumerationCapError(
                    f"exhaustive bunching needs more than {cylinder_cap} cylinders"
                )
            words = self.space.admissible_words(width, cap=cylinder_cap)
            prods = np.stack([table[w] for w in words])
            for n in range(1, horizon + 1):
                if n > 1:
                    words, prods = self._extend_cylinders(words, prods, cylinder_cap)
                rows.append(self._sup_row(n, prods))
        elif mode == "sampled":
            rng = np.random.default_rng(seed)
            length = width + (horizon - 1) * s
            words = [self._random_cylinder(rng, length) for _ in range(samples)]
            prods = np.stack([table[w[:width]] for w in words])
            for n in range(1, horizon + 1):
                if n > 1:
                    j = (n - 1) * s
                    facts = np.stack([table[w[j : j + width]] for w in words])
                    prods = facts @ prods
                rows.append(self._sup_row(n, prods))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        n0 = max(1, horizon // 2)
        xs = np.arange(n0, horizon + 1, dtype=float)
        ys = np.log([rows[int(n) - 1].sup_product for n in xs])
        slope, intercept = np.polyfit(xs, ys, 1)
        rate = self.space.rate
        return BunchingReport(
            horizon=horizon,
            mode=mode,
            theta_hat=float(slope),
            c3_hat=float(math.exp(intercept)),
            bunched=bool(slope < rate - margin),
            margin=margin,
            rate=rate,
            per_n=tuple(rows),
        )

    @staticmethod
    def _sup_row(n, prods):
        sv = np.linalg.svd(prods, compute_uv=False)
        return BunchingRow(
            n,
            float((sv[:, 0] / sv[:, -1]).max()),
            float(sv[:, 0].max()),
            float((1.0 / sv[:, -1]).max()),
        )

    def _random_cylinder(self, rng, length):
        succ = self.space.successors
        w = [int(rng.integers(self.space.alphabet_size))]
        while len(w) < length:
            opts = succ(w[-1])
            w.append(opts[int(rng.integers(len(opts)))])
        return tuple(w)

    # -- derived cocycles ------------------------------------------------------

    def twist(self, q):
        """The cocycle x -> Q(f(x)) A(x) Q(x)^(-1) as a window generator.

        Dependence is on coordinates [-max(mq, m), max(mq+1, m)], so the
        symmetric radius max(m, mq+1) suffices.
        """
        if q.dim != self.dim:
            raise ValueError("twist generator dimension mismatch")
        mq = q.radius
        m = self.radius
        s = self.space.step
        m2 = max(m, mq + s)
        q_inv = {w: np.linalg.inv(v) for w, v in q.table.items()}
        table = {}
        for w in self.space.admissible_words(2 * m2 + 1):
            c = m2
            q_next = q.value(w[c + s - mq : c + s + mq + 1])
            a_here = self.generator.value(w[c - m : c + m + 1])
            qi_here = q_inv[w[c - mq : c + mq + 1]]
            table[w] = q_next @ a_here @ qi_here
        return Cocycle(self.space, WindowGenerator(self.dim, m2, table), check_totality=False)

    def induced_power(self, k):
        """The cocycle x -> A^k(x) over the dynamics f^k (same points, bigger step)."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if k == 1:
            return self
        m = self.radius
        s = self.space.step
        m2 = m + (k - 1) * s
        width = 2 * m + 1
        table = {}
        for w in self.space.admissible_words(2 * m2 + 1):
            c = m2
            prod = self.generator.value(w[c - m : c + m + 1])
            for j in range(1, k):
                prod = self.generator.value(w[c + j * s - m : c + j * s + m + 1]) @ prod
            table[w] = prod
        space2 = self.space.with_step(k)
        return Cocycle(space2, WindowGenerator(self.dim, m2, table), check_totality=False)

    # -- periodic data ---------------------------------------------------------

    def lyapunov_at_periodic(self, p, n):
        """Extremal Lyapunov exponents from the period-return matrix.

        lambda+ = log(spectral radius(A^n(p)))/n and lambda- is the mirror via
        the inverse, i.e. log of the smallest eigenvalue modulus over n.
        """
        if self.space.shift(p, n) != p:
            raise ValueError(f"point is not {n}-periodic")
        mods = np.abs(np.linalg.eigvals(self.iterate(p, n)))
        return LyapunovPair(
            lambda_plus=float(np.log(mods.max()) / n),
            lambda_minus=float(np.log(mods.min()) / n),
            period=n,
        )


def stable_norm_product_check(c, x, y, z, horizon, report):
    """Growth check of |A^n(y)| |A^n(z)^-1| against e^(n*theta_hat) on a stable set.

    Returns (C, worst_ratio): the max over n <= horizon of the normalized
    product, and its value at n = horizon.  Bounded C certifies the stable-set
    norm-product bound at the fitted rate.
    """
    for w in (y, z):
        if agreement_range(w, x).s_index > 0:
            raise ValueError("y, z must agree with x on all coordinates >= 0")
    prod_y = np.eye(c.dim)
    prod_z = np.eye(c.dim)
    fy = c._factors(y, horizon)
    fz = c._factors(z, horizon)
    best = 0.0
    last = 0.0
    for n in range(1, horizon + 1):
        prod_y = fy[n - 1] @ prod_y
        prod_z = fz[n - 1] @ prod_z
        value = operator_norm(prod_y) * operator_norm(np.linalg.inv(prod_z))
        last = value / math.exp(n * report.theta_hat)
        best = max(best, last)
    return best, last
