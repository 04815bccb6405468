"""Right K-interiors, right K-boundaries and amenability constants."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Rational

from .errors import DomainError
from .semigroup import FinSubset, FiniteTable, Semigroup


@total_ordering
class Ratio:
    """An exact ratio of two counts that remembers its unreduced form.

    ``Ratio(36, 100)`` compares equal to ``Fraction(9, 25)`` but still renders
    as ``{"num": 36, "den": 100}``.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int):
        if den <= 0:
            raise DomainError("ratio denominator must be positive")
        self.num = int(num)
        self.den = int(den)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    @staticmethod
    def _other(other):
        if isinstance(other, Ratio):
            return other.value
        if isinstance(other, (Rational, int)):
            return Fraction(other)
        if isinstance(other, float):
            return other
        return NotImplemented

    def __eq__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self.value == o

    def __lt__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self.value < o

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return self.num / self.den

    def to_json(self) -> dict:
        return {"num": self.num, "den": self.den}

    def __str__(self):
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"Ratio({self.num}, {self.den})"


# The amenability constant alpha(A, K) = |boundary| / |A|.
AmenabilityConstant = Ratio


def interior(sg: Semigroup, A: FinSubset, K: FinSubset) -> FinSubset:
    """Right K-interior: ``{s in A : k*s in A for every k in K}``.

    With ``K`` empty the condition is vacuous and the interior is ``A``.
    """
    members = A.as_set()
    mul = sg._mul
    inside = members
    # one k at a time, so later passes only see the survivors
    for k in K.elements:
        inside = frozenset(s for s in inside if mul(k, s) in members)
    return FinSubset._wrap(inside)


def boundary(sg: Semigroup, A: FinSubset, K: FinSubset) -> FinSubset:
    """Right K-boundary ``A \\ int_K(A)``, by a direct membership scan."""
    return A - interior(sg, A, K)


def boundary_from_translates(sg: Semigroup, A: FinSubset, K: FinSubset, intersect: bool = True) -> FinSubset:
    """``A ∩ ⋃_k L_k^{-1}(kA \\ A)``; drop the intersection with
    ``intersect=False`` (valid when every k is left-cancellable)."""
    out = set()
    for k in K:
        out.update(sg.preimage(k, sg.left_translate(k, A) - A).as_set())
    result = FinSubset._wrap(frozenset(out))
    return result & A if intersect else result


def alpha(sg: Semigroup, A: FinSubset, K: FinSubset) -> Ratio:
    """Amenability constant of ``A`` with respect to ``K`` as an exact ratio."""
    if not A:
        raise DomainError("alpha(A, K) is undefined for empty A")
    return Ratio(len(boundary(sg, A, K)), len(A))


def translate_sum(sg: Semigroup, A: FinSubset, B: FinSubset) -> int:
    """``sum over s in S of |As ∩ B|``.

    For a finite table every s in S is visited.  Otherwise only the s solving
    ``a*s = b`` for some (a, b) in A x B can contribute, and those are found by
    left division.
    """
    if isinstance(sg, FiniteTable):
        support = sg.elements()
    else:
        cands = set()
        for a in A:
            for b in B:
                cands.update(sg.left_solutions(a, b))
        support = FinSubset._wrap(frozenset(cands))
    bs = B.as_set()
    mul = sg._mul
    return sum(sum(1 for x in {mul(a, s) for a in A.as_set()} if x in bs) for s in support)
