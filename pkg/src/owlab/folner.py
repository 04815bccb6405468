"""Standard Følner sequences and the quantities that measure them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List

from .boundary import Ratio, alpha
from .errors import DomainError
from .semigroup import FinSubset, Heisenberg, IntLattice, Semigroup

FOLNER_KINDS = ("boxes", "shifted_boxes", "heis_boxes")


@dataclass(frozen=True)
class FolnerSequence:
    generator: Callable[[int], FinSubset]
    description: str
    domain: Semigroup

    def __call__(self, n: int) -> FinSubset:
        if n < 1:
            raise DomainError(f"Følner index must be >= 1, got {n}")
        F = self.generator(n)
        if not F:
            raise DomainError(f"{self.description}: F_{n} is empty")
        return F


def builtin_folner(sg: Semigroup, kind: str = "boxes") -> FolnerSequence:
    """Box sequences for the builtin families.

    ``boxes``          F_n = [0, n)^d on Z^d / N^d; on the Heisenberg group the
                       same as ``heis_boxes``.
    ``shifted_boxes``  F_n = [n, 3n)^d on Z^d / N^d.
    ``heis_boxes``     F_n = {(a, b, c) : 0 <= a, b < n, 0 <= c < n^2}.
    """
    if isinstance(sg, Heisenberg) and kind in ("boxes", "heis_boxes"):
        return FolnerSequence(
            lambda n: FinSubset.box((0, 0, 0), (n, n, n * n)),
            "heisenberg boxes [0,n)x[0,n)x[0,n^2)", sg)
    if isinstance(sg, IntLattice):
        d = sg.dim
        if kind == "boxes":
            return FolnerSequence(lambda n: FinSubset.box((0,) * d, (n,) * d),
                                  f"boxes [0,n)^{d}", sg)
        if kind == "shifted_boxes":
            return FolnerSequence(lambda n: FinSubset.box((n,) * d, (3 * n,) * d),
                                  f"shifted boxes [n,3n)^{d}", sg)
    raise DomainError(f"no builtin Følner sequence of kind {kind!r} for {sg.spec_string}")


def defect(sg: Semigroup, F: FinSubset, s) -> Ratio:
    """``|sF \\ F| / |F|``."""
    if not F:
        raise DomainError("defect is undefined for empty F")
    return Ratio(len(sg.left_translate(s, F) - F), len(F))


@dataclass(frozen=True)
class FolnerRow:
    n: int
    card: int
    alpha: Ratio
    max_defect: Ratio


def folner_report(seq: FolnerSequence, K: FinSubset, indices: Iterable[int]) -> List[FolnerRow]:
    indices = list(indices)
    if not indices:
        raise DomainError("folner_report needs at least one index")
    sg = seq.domain
    rows = []
    for n in indices:
        F = seq(n)
        worst = Ratio(0, len(F))
        for k in K:
            d = defect(sg, F, k)
            if d > worst:
                worst = d
        rows.append(FolnerRow(n, len(F), alpha(sg, F, K), worst))
    return rows


def fc_witness_check(sg: Semigroup, F: FinSubset, K: FinSubset, eps) -> bool:
    """True iff ``|kF \\ F| <= eps |F|`` for every k in K."""
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    return all(defect(sg, F, k) <= eps for k in K)
