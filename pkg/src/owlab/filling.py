"""epsilon-disjoint families, greedy filling patterns and the filling theorem.

All thresholds are compared with exact rationals; ``eps`` may be given as a
Fraction, an int or a string such as ``"1/2"``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from .boundary import Ratio, alpha, interior
from .errors import DomainError, HypothesisError
from .semigroup import FinSubset, Semigroup

log = logging.getLogger(__name__)

STRICT = "strict"
BEST_EFFORT = "best_effort"


def as_eps(eps) -> Fraction:
    try:
        return Fraction(eps)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"cannot read eps={eps!r} as a rational") from exc


@dataclass
class WitnessedFamily:
    """Sets ``A_j`` paired with disjoint witnesses ``B_j ⊆ A_j``."""

    members: List[Tuple[FinSubset, FinSubset]]
    eps: Fraction

    def sets(self) -> List[FinSubset]:
        return [a for a, _ in self.members]


def eps_disjoint_verify(fam: WitnessedFamily) -> bool:
    eps = as_eps(fam.eps)
    seen = set()
    total = 0
    for A, B in fam.members:
        if not B <= A:
            return False
        if not seen.isdisjoint(B.as_set()):
            return False
        if len(B) < (1 - eps) * len(A):
            return False
        seen.update(B.as_set())
        total += len(A)
    union = set()
    for A, _ in fam.members:
        union.update(A.as_set())
    # (1 - eps) sum |A_j| <= |union A_j| must follow from the witnesses
    if (1 - eps) * total > len(union):
        raise AssertionError("witnesses verified but the union bound fails")
    return True


@dataclass
class FillingPattern:
    P: FinSubset
    K: FinSubset
    Omega: FinSubset
    eps: Fraction
    witnesses: WitnessedFamily
    coverage: FinSubset

    def guarantee(self, sg: Semigroup) -> Fraction:
        """The lower bound ``eps (1 - alpha(Omega, K)) |Omega|`` on |KP|."""
        return self.eps * (1 - alpha(sg, self.Omega, self.K).value) * len(self.Omega)

    def to_json(self) -> dict:
        return {
            "eps": str(self.eps),
            "K": self.K.to_json(),
            "omega_size": len(self.Omega),
            "P": self.P.to_json(),
            "coverage_size": len(self.coverage),
            "coverage": self.coverage.to_json(),
            "witness_sizes": [len(b) for _, b in self.witnesses.members],
        }


def greedy_filling(sg: Semigroup, Omega: FinSubset, K: FinSubset, eps) -> FillingPattern:
    """Maximal (eps, K)-filling pattern of ``Omega`` built in one ascending pass.

    Each candidate ``s`` in ``int_K(Omega)`` is admitted iff the part of ``Ks``
    not yet covered has at least ``(1 - eps)|Ks|`` elements; that uncovered
    part is its witness.  Coverage only grows, so a rejected candidate can
    never become admissible later and the pattern is maximal.
    """
    eps = as_eps(eps)
    if not Omega or not K:
        raise DomainError("greedy_filling needs non-empty Omega and K")
    if not 0 < eps <= 1:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    mul = sg._mul
    ks = K.elements
    covered = set()
    chosen = []
    members = []
    for s in interior(sg, Omega, K):
        Ks = {mul(k, s) for k in ks}
        fresh = Ks - covered
        if len(fresh) >= (1 - eps) * len(Ks):
            chosen.append(s)
            covered |= fresh
            members.append((FinSubset._wrap(frozenset(Ks)), FinSubset._wrap(frozenset(fresh))))
    P = FinSubset._wrap(frozenset(chosen), tuple(chosen))
    return FillingPattern(P, K, Omega, eps, WitnessedFamily(members, eps),
                          FinSubset._wrap(frozenset(covered)))


def compute_n0(eps) -> int:
    """Least r >= 1 with ``(2r+1) eps^(r+1) <= 1/2`` and ``(1 - eps/2)^r <= eps``.

    For eps <= 1/2 both left-hand sides decrease strictly in r, so the least
    such r also works for every larger r.
    """
    eps = as_eps(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise DomainError(f"n0 is defined for eps in (0, 1/2], got {eps}")
    half = Fraction(1, 2)
    r = 1
    while not ((2 * r + 1) * eps ** (r + 1) <= half and (1 - eps / 2) ** r <= eps):
        r += 1
    return r


@dataclass(frozen=True)
class HypothesisCheck:
    kind: str  # "tiles" for alpha(K_k, K_j), "domain" for alpha(D, K_j)
    k: int
    j: int
    alpha: Ratio
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.alpha <= self.bound

    def describe(self) -> str:
        lhs = f"alpha(K_{self.k}, K_{self.j})" if self.kind == "tiles" else f"alpha(D, K_{self.j})"
        rel = "<=" if self.holds else ">"
        return f"{lhs} = {self.alpha} {rel} {self.bound}"


@dataclass
class TilingResult:
    semigroup: Semigroup
    D: FinSubset
    Ks: List[FinSubset]
    eps: Fraction
    mode: str
    patterns: List[FinSubset]          # patterns[j-1] is P_j
    residual: FinSubset
    transcript: List[dict]
    hypothesis_report: List[HypothesisCheck] = field(default_factory=list)
    n0: int = 0

    @property
    def n(self) -> int:
        return len(self.Ks)

    def tiles(self) -> List[FinSubset]:
        """The sets ``K_j P_j``, j = 1..n."""
        return [self.semigroup.set_product(K, P) for K, P in zip(self.Ks, self.patterns)]

    @property
    def residual_ratio(self) -> Fraction:
        return Fraction(len(self.residual), len(self.D))

    @property
    def achieves_t3(self) -> bool:
        return self.residual_ratio <= self.eps

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "eps": str(self.eps),
            "n": self.n,
            "n0": self.n0,
            "D_size": len(self.D),
            "patterns": [{"j": j + 1, "K_size": len(K), "P": P.to_json()}
                         for j, (K, P) in enumerate(zip(self.Ks, self.patterns))],
            "residual_size": len(self.residual),
            "residual": self.residual.to_json(),
            "residual_ratio": {"num": len(self.residual), "den": len(self.D)},
            "achieves_t3": self.achieves_t3,
            "transcript": self.transcript,
            "hypotheses": [{"check": h.describe(), "holds": h.holds,
                            "alpha": h.alpha.to_json(), "bound": str(h.bound)}
                           for h in self.hypothesis_report],
        }


def hypothesis_report(sg: Semigroup, D: FinSubset, Ks: Sequence[FinSubset], eps) -> List[HypothesisCheck]:
    eps = as_eps(eps)
    n = len(Ks)
    small = eps ** (2 * n)
    checks = []
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            checks.append(HypothesisCheck("tiles", k, j, alpha(sg, Ks[k - 1], Ks[j - 1]),
                                          small / len(Ks[j - 1])))
    for j in range(1, n + 1):
        checks.append(HypothesisCheck("domain", 0, j, alpha(sg, D, Ks[j - 1]), small))
    return checks


def filling_theorem_run(sg: Semigroup, D: FinSubset, Ks: Sequence[FinSubset], eps,
                        mode: str = BEST_EFFORT) -> TilingResult:
    """Run the n-step filling process, largest tile first.

    Step k fills ``D_{k-1}`` greedily with ``K_{n-k+1}``; the process stops early
    (remaining patterns empty) once a step shrinks the leftover by at least the
    factor eps.  In strict mode, ``n >= n0(eps)`` and both hypothesis families
    are enforced up front, which guarantees ``|D'| <= eps |D|``.
    """
    eps = as_eps(eps)
    mode = mode.replace("-", "_")
    if mode not in (STRICT, BEST_EFFORT):
        raise DomainError(f"unknown mode {mode!r}")
    if not 0 < eps <= Fraction(1, 2):
        raise DomainError(f"eps must lie in (0, 1/2], got {eps}")
    Ks = list(Ks)
    n = len(Ks)
    if not D or n == 0 or any(not K for K in Ks):
        raise DomainError("D and every K_j must be non-empty, and at least one tile is needed")
    n0 = compute_n0(eps)
    if mode == STRICT and n < n0:
        raise HypothesisError(f"strict mode needs n >= n0({eps}) = {n0}, got n = {n}")
    report = hypothesis_report(sg, D, Ks, eps)
    if mode == STRICT:
        failing = [h for h in report if not h.holds]
        if failing:
            raise HypothesisError("hypothesis violated: " + "; ".join(h.describe() for h in failing))

    patterns: List[FinSubset] = [FinSubset() for _ in range(n)]
    current = D
    transcript = [{"step": 0, "size": len(D)}]
    for step in range(1, n + 1):
        j = n - step + 1
        pat = greedy_filling(sg, current, Ks[j - 1], eps)
        patterns[j - 1] = pat.P
        previous, current = current, current - pat.coverage
        transcript.append({"step": step, "tile": j, "P_size": len(pat.P),
                           "covered": len(pat.coverage), "size": len(current)})
        log.debug("step %d: |P_%d| = %d, |D_%d| = %d", step, j, len(pat.P), step, len(current))
        if step < n and len(current) <= eps * len(previous):
            transcript[-1]["stopped"] = True
            break

    result = TilingResult(sg, D, Ks, eps, mode, patterns, current, transcript, report, n0)
    if mode == STRICT and not result.achieves_t3:
        raise AssertionError("strict hypotheses held but |D'| > eps |D|")
    return result
