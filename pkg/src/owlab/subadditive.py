"""Subadditive right-subinvariant set functions and their Ornstein-Weiss limits."""

from __future__ import annotations

import json
import random
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional

from .errors import CertificateRefused, DomainError
from .filling import TilingResult
from .folner import FolnerSequence
from .semigroup import FinSubset, Semigroup

FLOAT_TOL = 1e-12


@dataclass
class SetFunction:
    """A map h from finite subsets to the reals.

    ``M`` bounds h on singletons.  The boolean flags are *declared* properties;
    ``trusted`` marks functions whose properties are known exactly, so that
    estimators can skip sampled spot checks.  ``exact`` means values are
    rationals and property checks use zero tolerance.
    """

    evaluate: Callable[[FinSubset], float]
    M: float
    name: str
    subadditive: bool = True
    right_subinvariant: bool = True
    non_decreasing: bool = False
    exact: bool = False
    trusted: bool = False
    semigroup: Optional[Semigroup] = None
    rate: Optional[float] = None  # set when h(A) = rate * |A| identically

    def __call__(self, A: FinSubset):
        if not A:
            return 0
        return self.evaluate(A)

    def ratio(self, A: FinSubset):
        """h(A)/|A|, taken from ``rate`` when h is a multiple of cardinality."""
        if not A:
            raise DomainError("h(A)/|A| is undefined for empty A")
        if self.rate is not None:
            return self.rate
        return self(A) / len(A)

    @property
    def tolerance(self) -> float:
        return 0 if self.exact else FLOAT_TOL


def cardinality_h(c=1, sg: Optional[Semigroup] = None) -> SetFunction:
    """h(A) = c|A|."""
    c = Fraction(c)
    if c < 0:
        raise DomainError("cardinality weight must be non-negative")
    return SetFunction(lambda A: c * len(A), c, f"card:{c}", non_decreasing=True,
                       exact=True, trusted=True, semigroup=sg, rate=c)


def inverse_max_h(sg: Optional[Semigroup] = None) -> SetFunction:
    """h(A) = |A| / (1 + max A) on finite subsets of N.

    Subadditive and right-subinvariant but not right-invariant: translating
    A = {0} by 1 halves h.
    """
    def h(A):
        return Fraction(len(A), 1 + A.max()[0])
    return SetFunction(h, 1, "invmax", exact=True, trusted=True, semigroup=sg)


def fekete_lift(u, check_upto: int = 64, sg: Optional[Semigroup] = None) -> SetFunction:
    """Lift a nondecreasing subadditive sequence to h(A) = u_{|A|}.

    ``u`` is either a callable ``n -> u_n`` or a sequence with ``u[n-1] = u_n``.
    Subadditivity and monotonicity are validated for indices up to
    ``check_upto`` (or the sequence length).
    """
    if callable(u):
        term = u
        top = check_upto
    else:
        values = list(u)
        term = lambda n: values[n - 1]  # noqa: E731
        top = len(values)
    if top < 1:
        raise DomainError("empty sequence")
    if term(1) < 0:
        raise DomainError("u_1 must be non-negative")
    for n in range(1, top):
        if term(n + 1) < term(n):
            raise DomainError(f"sequence decreases at n={n}: u_{n + 1} < u_{n}")
    for m in range(1, top):
        for n in range(m, top - m + 1):
            if term(m + n) > term(m) + term(n):
                raise DomainError(f"sequence is not subadditive: u_{m + n} > u_{m} + u_{n}")
    exact = all(isinstance(term(n), (int, Fraction)) for n in range(1, min(top, 4) + 1))
    return SetFunction(lambda A: term(len(A)), term(1), "fekete", non_decreasing=True,
                       exact=exact, trusted=True, semigroup=sg)


def command_h(command: str, M: float, sg: Optional[Semigroup] = None, timeout: float = 60) -> SetFunction:
    """h backed by an external program.

    The program reads a JSON list of elements on stdin and prints a decimal
    real on stdout.
    """
    argv = shlex.split(command)

    def h(A):
        out = subprocess.run(argv, input=json.dumps(A.to_json()), capture_output=True,
                             text=True, timeout=timeout, check=True)
        return float(out.stdout.strip())
    return SetFunction(h, M, f"cmd:{command}", semigroup=sg)


# ---- property checks --------------------------------------------------------

@dataclass
class PropertyReport:
    trials: int
    violations: list = field(default_factory=list)
    strict_drops: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_subadditive(h: SetFunction, sampler, trials: int, rng: Optional[random.Random] = None) -> PropertyReport:
    """Sample pairs (A, B) and look for ``h(A ∪ B) > h(A) + h(B)``."""
    rng = rng or random.Random(0)
    rep = PropertyReport(trials)
    for _ in range(trials):
        A, B = sampler(rng)
        lhs, rhs = h(A | B), h(A) + h(B)
        if lhs > rhs + h.tolerance:
            rep.violations.append((A, B, lhs, rhs))
    return rep


def check_right_subinvariant(h: SetFunction, sampler, trials: int, rng: Optional[random.Random] = None,
                             sg: Optional[Semigroup] = None) -> PropertyReport:
    """Sample (A, s) and look for ``h(As) > h(A)``; strict drops are recorded too."""
    sg = sg or h.semigroup
    if sg is None:
        raise DomainError("right-subinvariance needs a semigroup")
    rng = rng or random.Random(0)
    rep = PropertyReport(trials)
    for _ in range(trials):
        A, s = sampler(rng)
        before, after = h(A), h(sg.right_translate(A, s))
        if after > before + h.tolerance:
            rep.violations.append((A, s, after, before))
        elif after < before - h.tolerance:
            rep.strict_drops.append((A, s, after, before))
    return rep


def check_non_decreasing(h: SetFunction, sampler, trials: int, rng: Optional[random.Random] = None) -> PropertyReport:
    """Sample A ⊆ B (sampler returns (A, B); A ∩ B is used as the subset)."""
    rng = rng or random.Random(0)
    rep = PropertyReport(trials)
    for _ in range(trials):
        A, B = sampler(rng)
        small, big = h(A & B), h(B)
        if small > big + h.tolerance:
            rep.violations.append((A & B, B, small, big))
    return rep


# ---- Ornstein-Weiss estimator ------------------------------------------------

@dataclass(frozen=True)
class OWRow:
    n: int
    card: int
    h: float
    ratio: float


@dataclass
class OWEstimate:
    rows: List[OWRow]
    lambda_hat: float
    cauchy_gap: float
    window: int
    warnings: List[str] = field(default_factory=list)

    def ratios(self) -> list:
        return [r.ratio for r in self.rows]


def _spot_check(h: SetFunction, seq: FolnerSequence, max_index: int) -> List[str]:
    sg = seq.domain
    sets = [seq(n) for n in range(1, min(max_index, 6) + 1)]
    warnings = []
    if h.subadditive:
        for A in sets:
            for B in sets:
                B2 = sg.right_translate(B, max(A))
                if h(A | B2) > h(A) + h(B2) + h.tolerance:
                    warnings.append(f"subadditivity fails for |A|={len(A)}, |B|={len(B2)}")
    if h.right_subinvariant:
        for A in sets:
            for s in sets[-1].elements[:: max(1, len(sets[-1]) // 4)]:
                if h(sg.right_translate(A, s)) > h(A) + h.tolerance:
                    warnings.append(f"right-subinvariance fails for |A|={len(A)}, s={s}")
    return warnings


def ow_estimate(h: SetFunction, seq: FolnerSequence, max_index: int, window: int = 5,
                start: int = 1, jobs: int = 1) -> OWEstimate:
    """Tabulate h(F_n)/|F_n| for n = start..max_index.

    ``lambda_hat`` is the mean ratio over the trailing ``window`` rows and
    ``cauchy_gap`` their spread (max - min).  No extrapolation is attempted.
    """
    if not (max_index >= window >= 2):
        raise DomainError(f"need max_index >= window >= 2, got max_index={max_index}, window={window}")
    if start > max_index - window + 1:
        raise DomainError("window extends before the first index")
    warnings = [] if h.trusted else _spot_check(h, seq, max_index)

    def row(n):
        F = seq(n)
        return OWRow(n, len(F), h(F), h.ratio(F))

    indices = range(start, max_index + 1)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(row, indices))
    else:
        rows = [row(n) for n in indices]
    tail = [r.ratio for r in rows[-window:]]
    lam = sum(tail) / len(tail)
    return OWEstimate(rows, lam, max(tail) - min(tail), window, warnings)


# ---- certificate -------------------------------------------------------------

@dataclass(frozen=True)
class Link:
    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass
class Certificate:
    links: List[Link]
    final_bound: float
    normalized_h: float
    lambda_hat: float
    eps: Fraction
    M: float

    @property
    def passed(self) -> bool:
        return all(link.holds for link in self.links)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "final_bound": self.final_bound,
            "h_D_over_D": self.normalized_h,
            "lambda_hat": self.lambda_hat,
            "eps": str(self.eps),
            "M": self.M,
            "links": [{"name": l.name, "lhs": l.lhs, "rhs": l.rhs, "holds": l.holds} for l in self.links],
        }


def ow_certificate(h: SetFunction, tiling: TilingResult, lambda_hat: float, eps=None) -> Certificate:
    """Evaluate every inequality of the chain bounding h(D)/|D|.

    Preconditions: the tiling leaves at most an eps fraction of D uncovered,
    and each tile satisfies ``h(K_j)/|K_j| <= lambda_hat + eps``.
    """
    sg = tiling.semigroup
    eps = tiling.eps if eps is None else Fraction(eps)
    if eps != tiling.eps:
        raise DomainError(f"certificate eps {eps} differs from the tiling's eps {tiling.eps}")
    if not tiling.achieves_t3:
        raise CertificateRefused(f"residual |D'|/|D| = {tiling.residual_ratio} exceeds eps = {eps}")
    cache = {}

    def H(A):
        if A not in cache:
            cache[A] = h(A)
        return cache[A]

    for j, K in enumerate(tiling.Ks, 1):
        if H(K) / len(K) > lambda_hat + eps + h.tolerance:
            raise CertificateRefused(
                f"tile K_{j}: h(K_{j})/|K_{j}| = {float(H(K) / len(K)):.12g} > lambda_hat + eps = {float(lambda_hat + eps):.12g}")

    def leq(name, lhs, rhs):
        lhs, rhs = float(lhs), float(rhs)
        slack = 0 if h.exact else 1e-9 * max(1.0, abs(rhs))
        return Link(name, lhs, rhs, lhs <= rhs + slack)

    D, Dp = tiling.D, tiling.residual
    nD = len(D)
    factor = (float(lambda_hat) + float(eps)) / (1 - float(eps))
    tiles = tiling.tiles()
    links = []
    links.append(leq("h(D) <= sum_j h(K_j P_j) + h(D')", H(D), sum(H(T) for T in tiles) + H(Dp)))
    links.append(leq("h(D') <= M eps |D|", H(Dp), float(h.M) * float(eps) * nD))
    for j, (K, P, T) in enumerate(zip(tiling.Ks, tiling.patterns, tiles), 1):
        if not P:
            continue
        translates = sum(H(sg.right_translate(K, s)) for s in P)
        links.append(leq(f"h(K_{j}P_{j}) <= sum_s h(K_{j}s)", H(T), translates))
        links.append(leq(f"sum_s h(K_{j}s) <= |P_{j}| h(K_{j})", translates, len(P) * H(K)))
        links.append(leq(f"|P_{j}| h(K_{j}) <= (lambda+eps) sum_s |K_{j}s|",
                         len(P) * H(K), (float(lambda_hat) + float(eps)) * len(P) * len(K)))
        links.append(leq(f"h(K_{j}P_{j}) <= (lambda+eps)/(1-eps) |K_{j}P_{j}|", H(T), factor * len(T)))
    links.append(leq("sum_j h(K_j P_j) <= (lambda+eps)/(1-eps) |D|", sum(H(T) for T in tiles), factor * nD))
    final = factor + float(h.M) * float(eps)
    ratio = float(H(D)) / nD
    links.append(leq("h(D)/|D| <= (lambda+eps)/(1-eps) + M eps", ratio, final))
    return Certificate(links, final, ratio, float(lambda_hat), eps, float(h.M))
