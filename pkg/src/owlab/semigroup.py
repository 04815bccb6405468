"""Concrete semigroups, canonical finite subsets and translation.

Elements are tuples of Python ints (arbitrary precision).  Lattice and monoid
elements are coordinate vectors, Heisenberg elements are triples ``(a, b, c)``
and elements of a finite multiplication table are 1-tuples ``(i,)``.  Plain
ints are accepted wherever an element is expected and mean ``(i,)``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from .errors import DomainError, InvalidElementError, MultipleSolutionsError

Element = tuple


def as_element(x) -> Element:
    if isinstance(x, tuple):
        return x
    if isinstance(x, int):
        return (x,)
    return tuple(int(v) for v in x)


class FinSubset:
    """An immutable, duplicate-free finite set of elements.

    Iteration follows the canonical (lexicographic) order of the payloads, so
    two sets with the same members always iterate identically no matter how
    they were built.
    """

    __slots__ = ("_set", "_sorted")

    def __init__(self, elements: Iterable = ()):
        self._set = frozenset(as_element(e) for e in elements)
        self._sorted = None

    @classmethod
    def _wrap(cls, members: frozenset, ordered: Optional[tuple] = None) -> "FinSubset":
        obj = cls.__new__(cls)
        obj._set = members
        obj._sorted = ordered
        return obj

    @classmethod
    def box(cls, lo: Sequence[int], hi: Sequence[int]) -> "FinSubset":
        """Half-open box ``[lo_1, hi_1) x ... x [lo_d, hi_d)``."""
        if len(lo) != len(hi):
            raise DomainError(f"box corners differ in length: {lo} vs {hi}")
        ordered = tuple(itertools.product(*(range(a, b) for a, b in zip(lo, hi))))
        return cls._wrap(frozenset(ordered), ordered)

    @property
    def elements(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._set))
        return self._sorted

    def as_set(self) -> frozenset:
        return self._set

    def __len__(self) -> int:
        return len(self._set)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return as_element(x) in self._set

    def __bool__(self) -> bool:
        return bool(self._set)

    def __eq__(self, other) -> bool:
        if isinstance(other, FinSubset):
            return self._set == other._set
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._set)

    def __or__(self, other: "FinSubset") -> "FinSubset":
        return FinSubset._wrap(self._set | other._set)

    def __and__(self, other: "FinSubset") -> "FinSubset":
        return FinSubset._wrap(self._set & other._set)

    def __sub__(self, other: "FinSubset") -> "FinSubset":
        return FinSubset._wrap(self._set - other._set)

    def __le__(self, other: "FinSubset") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "FinSubset") -> bool:
        return self._set < other._set

    def isdisjoint(self, other: "FinSubset") -> bool:
        return self._set.isdisjoint(other._set)

    def min(self) -> Element:
        return self.elements[0]

    def max(self) -> Element:
        return self.elements[-1]

    def to_json(self) -> list:
        return [list(e) if len(e) != 1 else e[0] for e in self.elements]

    def __repr__(self) -> str:
        if len(self) > 8:
            head = ", ".join(map(str, self.elements[:4]))
            return f"FinSubset({{{head}, ...}}, size={len(self)})"
        return f"FinSubset({{{', '.join(map(str, self.elements))}}})"


class Semigroup:
    """Base class.  Subclasses implement ``_mul`` on validated payloads."""

    name = "semigroup"
    dim: int = 1
    cancellative = True
    finite = False

    # ---- element level ----------------------------------------------------
    def validate(self, x) -> Element:
        x = as_element(x)
        if len(x) != self.dim:
            raise InvalidElementError(f"{x} is not an element of {self.spec_string}")
        return x

    def _mul(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    def mul(self, a, b) -> Element:
        return self._mul(self.validate(a), self.validate(b))

    def left_divide(self, a, b) -> Optional[Element]:
        """The unique ``s`` with ``a*s = b``, or None if there is none."""
        raise NotImplementedError

    def left_solutions(self, a, b) -> list:
        s = self.left_divide(a, b)
        return [] if s is None else [s]

    @property
    def identity(self) -> Optional[Element]:
        return None

    def is_left_cancellable(self, a) -> bool:
        return self.cancellative

    def is_right_cancellable(self, a) -> bool:
        return self.cancellative

    # ---- set level ---------------------------------------------------------
    def check_set(self, A: FinSubset) -> FinSubset:
        for a in A.as_set():
            self.validate(a)
        return A

    def right_translate(self, A: FinSubset, s) -> FinSubset:
        """``As = {a*s : a in A}``."""
        s = self.validate(s)
        self.check_set(A)
        mul = self._mul
        return FinSubset._wrap(frozenset(mul(a, s) for a in A.as_set()))

    def left_translate(self, s, A: FinSubset) -> FinSubset:
        """``sA = {s*a : a in A}``."""
        s = self.validate(s)
        self.check_set(A)
        mul = self._mul
        return FinSubset._wrap(frozenset(mul(s, a) for a in A.as_set()))

    def set_product(self, K: FinSubset, P: FinSubset) -> FinSubset:
        """``KP = {k*p : k in K, p in P}``."""
        mul = self._mul
        return FinSubset._wrap(frozenset(mul(k, p) for p in P.as_set() for k in K.as_set()))

    def preimage(self, k, X: FinSubset) -> FinSubset:
        """``L_k^{-1}(X) = {t : k*t in X}`` (finite whenever L_k is injective)."""
        k = self.validate(k)
        out = set()
        for x in X.as_set():
            out.update(self.left_solutions(k, x))
        return FinSubset._wrap(frozenset(out))

    @property
    def spec_string(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec_string}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, Semigroup) and self.spec_string == other.spec_string

    def __hash__(self) -> int:
        return hash(self.spec_string)


class IntLattice(Semigroup):
    """The additive group Z^d."""

    name = "zd"

    def __init__(self, d: int = 1):
        if d < 1:
            raise DomainError("dimension must be positive")
        self.dim = d

    @property
    def spec_string(self) -> str:
        return f"zd:{self.dim}"

    def _mul(self, a, b):
        if self.dim == 1:
            return (a[0] + b[0],)
        if self.dim == 2:
            return (a[0] + b[0], a[1] + b[1])
        return tuple(x + y for x, y in zip(a, b))

    def left_divide(self, a, b):
        a, b = self.validate(a), self.validate(b)
        return tuple(y - x for x, y in zip(a, b))

    @property
    def identity(self):
        return (0,) * self.dim


class NatMonoid(IntLattice):
    """The additive monoid N^d of non-negative integer vectors."""

    name = "nat"

    @property
    def spec_string(self) -> str:
        return f"nat:{self.dim}"

    def validate(self, x):
        x = super().validate(x)
        if any(v < 0 for v in x):
            raise InvalidElementError(f"{x} has a negative coordinate; not in N^{self.dim}")
        return x

    def left_divide(self, a, b):
        s = super().left_divide(a, b)
        return None if any(v < 0 for v in s) else s


class Heisenberg(Semigroup):
    """Discrete Heisenberg group with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')."""

    name = "heis"
    dim = 3

    def _mul(self, x, y):
        return (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1])

    def left_divide(self, a, b):
        a, b = self.validate(a), self.validate(b)
        da, db = b[0] - a[0], b[1] - a[1]
        return (da, db, b[2] - a[2] - a[0] * db)

    @property
    def identity(self):
        return (0, 0, 0)


class FiniteTable(Semigroup):
    """A finite semigroup given by its multiplication table.

    ``table[i][j]`` is the index of ``s_i * s_j``.  Associativity is checked
    exhaustively on construction.
    """

    name = "table"
    dim = 1
    finite = True

    def __init__(self, table: Sequence[Sequence[int]], source: Optional[str] = None):
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise DomainError("multiplication table must be a non-empty square array")
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        for row in self.table:
            for v in row:
                if not 0 <= v < n:
                    raise DomainError(f"table entry {v} out of range 0..{n - 1}")
        self.n = n
        self.source = source
        t = self.table
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise DomainError(f"table is not associative at ({a}, {b}, {c})")
        self._left_ok = tuple(len(set(t[a])) == n for a in range(n))
        self._right_ok = tuple(len({t[x][a] for x in range(n)}) == n for a in range(n))
        self.cancellative = all(self._left_ok) and all(self._right_ok)

    @classmethod
    def from_json(cls, path) -> "FiniteTable":
        data = json.loads(Path(path).read_text())
        table = data["table"]
        if "n" in data and data["n"] != len(table):
            raise DomainError(f"declared n={data['n']} but table has {len(table)} rows")
        return cls(table, source=str(path))

    @property
    def spec_string(self) -> str:
        if self.source:
            return f"table:{self.source}"
        return "table:" + json.dumps({"n": self.n, "table": [list(r) for r in self.table]})

    def validate(self, x):
        x = super().validate(x)
        if not 0 <= x[0] < self.n:
            raise InvalidElementError(f"{x} is not an index of a {self.n}-element table")
        return x

    def elements(self) -> FinSubset:
        return FinSubset(range(self.n))

    def _mul(self, a, b):
        return (self.table[a[0]][b[0]],)

    def left_solutions(self, a, b):
        a, b = self.validate(a), self.validate(b)
        return [(j,) for j in range(self.n) if self.table[a[0]][j] == b[0]]

    def left_divide(self, a, b):
        a = self.validate(a)
        if not self._left_ok[a[0]]:
            raise MultipleSolutionsError(f"s_{a[0]} is not left-cancellable; enumerate left_solutions")
        sols = self.left_solutions(a, b)
        return sols[0] if sols else None

    @property
    def identity(self):
        for e in range(self.n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.n)):
                return (e,)
        return None

    def is_left_cancellable(self, a) -> bool:
        return self._left_ok[self.validate(a)[0]]

    def is_right_cancellable(self, a) -> bool:
        return self._right_ok[self.validate(a)[0]]

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteTable) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)


def parse_semigroup(text: str) -> Semigroup:
    """Parse ``zd:<d>``, ``nat:<d>``, ``heis`` or ``table:<path.json>``."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "zd":
            return IntLattice(int(arg or 1))
        if kind == "nat":
            return NatMonoid(int(arg or 1))
        if kind == "heis" and not arg:
            return Heisenberg()
        if kind == "table" and arg:
            if arg.lstrip().startswith("{"):
                return FiniteTable(json.loads(arg)["table"])
            return FiniteTable.from_json(arg)
    except (ValueError, KeyError, OSError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot parse semigroup {text!r}: {exc}") from exc
    raise DomainError(f"unknown semigroup {text!r}; expected zd:<d>, nat:<d>, heis or table:<path>")


@dataclass
class CancellativityReport:
    verdicts: dict = field(default_factory=dict)  # element -> (left, right)
    exhaustive: bool = False

    def all_cancellable(self) -> bool:
        return all(l and r for l, r in self.verdicts.values())


def cancellativity_probe(sg: Semigroup, sample: FinSubset) -> CancellativityReport:
    """Per-element left/right cancellability verdicts.

    Finite tables are decided exhaustively over the whole semigroup; for the
    infinite families injectivity of L_s and R_s is tested on ``sample``.
    """
    if not sample:
        raise DomainError("cancellativity probe needs a non-empty sample")
    if isinstance(sg, FiniteTable):
        verdicts = {(i,): (sg.is_left_cancellable(i), sg.is_right_cancellable(i)) for i in range(sg.n)}
        return CancellativityReport(verdicts, exhaustive=True)
    sg.check_set(sample)
    verdicts = {}
    for s in sample:
        left = len(sg.left_translate(s, sample)) == len(sample)
        right = len(sg.right_translate(sample, s)) == len(sample)
        verdicts[s] = (left, right)
    return CancellativityReport(verdicts, exhaustive=False)
