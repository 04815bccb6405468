"""Entropy set functions for symbolic systems.

Topological: h(F) = log of the number of locally admissible patterns of a
subshift of finite type on F.  Measure-theoretic: the Shannon entropy of the
coordinate partition restricted to F, for Bernoulli and stationary Markov
measures.
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, ResourceError
from .semigroup import FinSubset, IntLattice, Semigroup, as_element
from .subadditive import SetFunction

DEFAULT_BUDGET = 10 ** 8


def default_budget() -> int:
    raw = os.environ.get("OWLAB_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"OWLAB_BUDGET={raw!r} is not an integer") from exc


# ---- subshifts of finite type ----------------------------------------------

@dataclass(frozen=True)
class Forbidden:
    """A forbidden pattern, translated so its lexicographically least cell is 0."""

    shape: Tuple[tuple, ...]
    pattern: Tuple[int, ...]

    @classmethod
    def make(cls, shape: Sequence, pattern: Sequence[int]) -> "Forbidden":
        cells = [as_element(c) for c in shape]
        if len(cells) != len(pattern) or not cells:
            raise DomainError("forbidden shape and pattern must be non-empty and of equal length")
        if len(set(cells)) != len(cells):
            raise DomainError(f"forbidden shape has repeated cells: {cells}")
        pairs = sorted(zip(cells, (int(p) for p in pattern)))
        origin = pairs[0][0]
        shape = tuple(tuple(x - o for x, o in zip(c, origin)) for c, _ in pairs)
        return cls(shape, tuple(p for _, p in pairs))


@dataclass(frozen=True)
class SftSpec:
    alphabet: int
    dim: int
    forbidden: Tuple[Forbidden, ...] = ()
    name: str = "sft"

    def __post_init__(self):
        if self.alphabet < 1 or self.dim < 1:
            raise DomainError("alphabet size and dimension must be positive")
        for f in self.forbidden:
            if any(len(c) != self.dim for c in f.shape):
                raise DomainError(f"forbidden shape {f.shape} is not in Z^{self.dim}")
            if any(not 0 <= p < self.alphabet for p in f.pattern):
                raise DomainError(f"forbidden pattern {f.pattern} uses symbols outside 0..{self.alphabet - 1}")

    @classmethod
    def from_dict(cls, data: dict, name: str = "sft") -> "SftSpec":
        forb = tuple(Forbidden.make(f["shape"], f["pattern"]) for f in data.get("forbidden", []))
        return cls(int(data["alphabet"]), int(data.get("dim", 1)), forb, name)

    @classmethod
    def from_json(cls, path) -> "SftSpec":
        return cls.from_dict(json.loads(Path(path).read_text()), name=str(path))

    def to_dict(self) -> dict:
        return {"alphabet": self.alphabet, "dim": self.dim,
                "forbidden": [{"shape": [list(c) for c in f.shape], "pattern": list(f.pattern)}
                              for f in self.forbidden]}

    def safe_symbol(self) -> Optional[int]:
        """A symbol occurring in no forbidden pattern, if there is one.

        With such a symbol every locally admissible pattern extends to any
        larger set, which makes the counts monotone and hence subadditive.
        """
        used = {p for f in self.forbidden for p in f.pattern}
        for a in range(self.alphabet):
            if a not in used:
                return a
        return None


def builtin_sft(name: str, dim: Optional[int] = None) -> SftSpec:
    """``full2`` (any dimension), ``golden`` (Z), ``hardsq`` (Z^2)."""
    if name == "full2":
        return SftSpec(2, dim or 1, (), "full2")
    if name == "golden":
        if dim not in (None, 1):
            raise DomainError("the golden-mean shift lives on Z")
        return SftSpec(2, 1, (Forbidden.make([(0,), (1,)], [1, 1]),), "golden")
    if name == "hardsq":
        if dim not in (None, 2):
            raise DomainError("hard squares live on Z^2")
        return SftSpec(2, 2, (Forbidden.make([(0, 0), (1, 0)], [1, 1]),
                              Forbidden.make([(0, 0), (0, 1)], [1, 1])), "hardsq")
    raise DomainError(f"unknown builtin SFT {name!r}; expected full2, golden or hardsq")


def _occurrences(sft: SftSpec, cells: frozenset) -> Dict[tuple, list]:
    """Forbidden occurrences fully inside ``cells``, keyed by their last cell."""
    ends = defaultdict(list)
    for f in sft.forbidden:
        last = f.shape[-1]
        for c in cells:
            t = tuple(x - y for x, y in zip(c, last))
            placed = [tuple(a + b for a, b in zip(s, t)) for s in f.shape]
            if all(p in cells for p in placed):
                ends[c].append((placed, f.pattern))
    return ends


def _check_cells(sft: SftSpec, F: FinSubset) -> None:
    for c in F.as_set():
        if len(c) != sft.dim:
            raise DomainError(f"{c} is not a cell of Z^{sft.dim}")


def pattern_count(sft: SftSpec, F: FinSubset, budget: Optional[int] = None, method: str = "auto") -> int:
    """Number of patterns on F containing no forbidden pattern fully inside F.

    ``transfer`` sweeps F in lexicographic order, carrying the symbols on a
    window of the most recent cells (a transfer recurrence on Z, a row-profile
    transfer on Z^2).  ``backtrack`` assigns cells one at a time and prunes
    as soon as a forbidden occurrence is completed.  Both stop with a
    ResourceError once ``budget`` elementary steps have been spent.
    """
    budget = default_budget() if budget is None else budget
    _check_cells(sft, F)
    if not F:
        return 1
    if not sft.forbidden:
        return sft.alphabet ** len(F)
    if method == "backtrack":
        return _count_backtrack(sft, F, budget)
    if method not in ("auto", "transfer"):
        raise DomainError(f"unknown counting method {method!r}")
    return _count_transfer(sft, F, budget)


def _raster(F: FinSubset):
    lo = [min(c[i] for c in F.as_set()) for i in range(len(F.min()))]
    hi = [max(c[i] for c in F.as_set()) for i in range(len(F.min()))]
    strides = [1] * len(lo)
    for i in range(len(lo) - 2, -1, -1):
        strides[i] = strides[i + 1] * (hi[i + 1] - lo[i + 1] + 1)
    return lambda c: sum((x - l) * s for x, l, s in zip(c, lo, strides))


def _count_transfer(sft: SftSpec, F: FinSubset, budget: int) -> int:
    index = _raster(F)
    ends = _occurrences(sft, F.as_set())
    width = 1
    checks = {}
    for c, occs in ends.items():
        ic = index(c)
        compiled = []
        for placed, pattern in occs:
            back = [ic - index(p) for p in placed]
            width = max(width, max(back) + 1)
            compiled.append(tuple(zip(back, pattern)))
        checks[c] = compiled
    cells = sorted(F.as_set(), key=index)
    k = sft.alphabet
    empty = (None,) * (width - 1)
    states = {empty: 1}
    prev = None
    work = 0
    for c in cells:
        ic = index(c)
        gap = 1 if prev is None else ic - prev
        prev = ic
        work += len(states) * k
        if work > budget:
            raise ResourceError(f"pattern count exceeds the work budget of {budget} steps")
        local = checks.get(c, ())
        nxt = defaultdict(int)
        for state, count in states.items():
            if gap >= width:
                base = empty
            else:
                base = state[gap - 1:] + (None,) * (gap - 1)
            for sym in range(k):
                window = base + (sym,)
                bad = False
                for occ in local:
                    if all(window[width - 1 - b] == p for b, p in occ):
                        bad = True
                        break
                if not bad:
                    nxt[window[1:]] += count
        states = nxt
    return sum(states.values())


def _count_backtrack(sft: SftSpec, F: FinSubset, budget: int) -> int:
    cells = list(F)
    pos = {c: i for i, c in enumerate(cells)}
    ends = _occurrences(sft, F.as_set())
    checks = [[[(pos[p], s) for p, s in zip(placed, pattern)] for placed, pattern in ends.get(c, ())]
              for c in cells]
    k = sft.alphabet
    assign = [0] * len(cells)
    work = 0

    def rec(i):
        nonlocal work
        if i == len(cells):
            return 1
        total = 0
        for sym in range(k):
            work += 1
            if work > budget:
                raise ResourceError(f"pattern count exceeds the work budget of {budget} steps")
            assign[i] = sym
            if any(all(assign[q] == s for q, s in occ) for occ in checks[i]):
                continue
            total += rec(i + 1)
        return total

    return rec(0)


def sft_entropy_h(sft: SftSpec, sg: Optional[Semigroup] = None, budget: Optional[int] = None) -> SetFunction:
    """h(F) = log pattern_count(F), bounded on singletons by log |alphabet|."""
    sg = sg or IntLattice(sft.dim)
    trusted = sft.safe_symbol() is not None

    def h(F):
        n = pattern_count(sft, F, budget)
        if n == 0:
            raise DomainError("no locally admissible pattern on F; log 0 is undefined")
        return math.log(n)
    return SetFunction(h, math.log(sft.alphabet), f"sft:{sft.name}", non_decreasing=True,
                       trusted=trusted, semigroup=sg)


# ---- measure entropy ---------------------------------------------------------

def shannon(p: Sequence) -> float:
    """-sum p_i log p_i with 0 log 0 = 0."""
    return -sum(float(x) * math.log(x) for x in p if x > 0)


def _as_probability(p: Sequence) -> list:
    p = [Fraction(x) if isinstance(x, (int, str, Fraction)) else x for x in p]
    if not p or any(x < 0 for x in p):
        raise DomainError("probabilities must be non-negative and non-empty")
    total = sum(p)
    exact = all(isinstance(x, Fraction) for x in p)
    if (exact and total != 1) or (not exact and abs(total - 1) > 1e-12):
        raise DomainError(f"probabilities sum to {total}, not 1")
    return p


def bernoulli_entropy_h(p: Sequence, sg: Optional[Semigroup] = None) -> SetFunction:
    """h(F) = |F| H(p) for the product measure with marginal p."""
    p = _as_probability(p)
    rate = shannon(p)
    return SetFunction(lambda F: len(F) * rate, rate, "bernoulli", non_decreasing=True,
                       trusted=True, semigroup=sg or IntLattice(1), rate=rate)


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def stationary_distribution(P) -> list:
    """Exact stationary row vector of an irreducible rational stochastic matrix."""
    k = len(P)
    # pi (P - I) = 0 together with sum pi = 1, as a k+1 by k system in pi
    rows = [[Fraction(P[i][j]) - (1 if i == j else 0) for i in range(k)] + [Fraction(0)] for j in range(k)]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    r = 0
    pivots = []
    for col in range(k):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if len(pivots) < k:
        raise DomainError("stationary distribution is not unique")
    return [rows[i][k] for i in range(k)]


@dataclass
class MarkovSpec:
    P: List[List[Fraction]]
    pi: List[Fraction]

    def __post_init__(self):
        self.P = [[Fraction(x) for x in row] for row in self.P]
        self.pi = [Fraction(x) for x in self.pi]
        k = len(self.P)
        if k == 0 or any(len(row) != k for row in self.P) or len(self.pi) != k:
            raise DomainError("transition matrix must be square and match pi")
        for row in self.P:
            if any(x < 0 for x in row) or sum(row) != 1:
                raise DomainError(f"row {row} is not a probability vector")
        if any(x < 0 for x in self.pi) or sum(self.pi) != 1:
            raise DomainError("pi is not a probability vector")
        if _matmul([self.pi], self.P)[0] != self.pi:
            raise DomainError("pi is not stationary: pi P != pi")

    @classmethod
    def from_matrix(cls, P) -> "MarkovSpec":
        P = [[Fraction(x) for x in row] for row in P]
        return cls(P, stationary_distribution(P))

    @classmethod
    def from_json(cls, path) -> "MarkovSpec":
        data = json.loads(Path(path).read_text())
        if "pi" in data:
            return cls(data["P"], data["pi"])
        return cls.from_matrix(data["P"])

    @property
    def states(self) -> int:
        return len(self.P)

    def entropy_rate(self) -> float:
        return self.conditional_entropy(self.P)

    def conditional_entropy(self, Q) -> float:
        # identical rows are merged first, so an i.i.d. chain gives exactly H(p)
        weights = {}
        for w, row in zip(self.pi, Q):
            key = tuple(row)
            weights[key] = weights.get(key, 0) + w
        return sum(float(w) * shannon(row) for row, w in weights.items())


def markov_entropy_h(m: MarkovSpec, sg: Optional[Semigroup] = None) -> SetFunction:
    """Entropy of the stationary chain observed at the times in F ⊂ Z.

    By the Markov property, for F = {a_1 < ... < a_m}
    h(F) = H(pi) + sum_j H(X_{a_{j+1}} | X_{a_j}), and the conditional term
    depends only on the gap through the matrix power P^gap.
    """
    powers = {1: m.P}
    cond = {}

    def power(g):
        if g not in powers:
            half = power(g // 2)
            sq = _matmul(half, half)
            powers[g] = _matmul(sq, m.P) if g % 2 else sq
        return powers[g]

    def cond_entropy(g):
        if g not in cond:
            cond[g] = m.conditional_entropy(power(g))
        return cond[g]

    base = shannon(m.pi)

    def h(F):
        times = [c[0] for c in F]
        if any(len(c) != 1 for c in F.as_set()):
            raise DomainError("Markov entropy is defined on subsets of Z")
        # equal terms are summed as multiples to keep the rounding small
        terms = Counter({base: 1})
        for a, b in zip(times, times[1:]):
            terms[cond_entropy(b - a)] += 1
        return sum(count * value for value, count in terms.items())
    return SetFunction(h, base, "markov", non_decreasing=True, trusted=True,
                       semigroup=sg or IntLattice(1))
