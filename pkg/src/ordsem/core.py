"""Data model for finite ordered semigroups.

An ordered semigroup is a finite set with an associative multiplication
table and a partial order compatible with multiplication on both sides
(a <= b implies xa <= xb and ax <= bx).  `validate` turns raw input into
an immutable `OrderedSemigroup` or, when any axiom fails, a
`ValidationReport` listing every violation with a witness.

Elements are indexed 0..n-1 internally.  Subsets of the carrier are bit
masks wrapped in `Subset`; the mask-level helpers (`closure_mask`,
`product_mask`, ...) are the fast path shared by the other modules.

This module also owns the `.osg` text format (see `parse_osg` /
`emit_osg`).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "GuardExceeded",
    "OrderedSemigroup",
    "OsgParseError",
    "RawStructure",
    "Subset",
    "ValidationReport",
    "Violation",
    "check_axioms",
    "closure_mask",
    "downward_closure",
    "emit_osg",
    "is_subsemigroup",
    "parse_osg",
    "product_mask",
    "structure_from_parts",
    "subset_product",
    "validate",
]


class OsgParseError(Exception):
    """Raised when `.osg` text cannot be parsed."""


class GuardExceeded(Exception):
    """Raised when an operation would exceed a configured size guard."""


def guard_limit(default: int) -> int:
    """Size guard default, overridable through the OSG_MAX_N env var."""
    raw = os.environ.get("OSG_MAX_N")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of `mask`, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class RawStructure:
    """Unvalidated input: labels, a label-valued table, order generator pairs.

    `order_pairs` lists (x, y) meaning x <= y; the reflexive-transitive
    closure is computed by `validate`, never by the caller.
    """

    names: tuple[str, ...]
    mul: tuple[tuple[str, ...], ...]
    order_pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Violation:
    """One axiom or format failure with a minimal witness tuple."""

    kind: str  # associativity | reflexivity | antisymmetry | transitivity | compatibility | format
    witness: tuple
    detail: str


@dataclass
class ValidationReport:
    """All violations found in one validation pass; empty means valid."""

    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


class OrderedSemigroup:
    """Immutable finite ordered semigroup.

    mul[x][y] is the index of the product x*y.  leq_rows[x] has bit y set
    iff x <= y; below[y] has bit x set iff x <= y (the column view used by
    downward closures).  `_cache` memoizes derived data (principal ideals,
    partitions, ...) computed by the other modules; it never affects
    observable behaviour.
    """

    __slots__ = ("n", "names", "mul", "leq_rows", "below", "full", "_cache")

    def __init__(
        self,
        names: Sequence[str],
        mul: Sequence[Sequence[int]],
        leq_rows: Sequence[int],
    ):
        self.n = len(names)
        self.names = tuple(names)
        self.mul = tuple(tuple(row) for row in mul)
        self.leq_rows = tuple(leq_rows)
        below = [0] * self.n
        for x in range(self.n):
            row = self.leq_rows[x]
            bit = 1 << x
            for y in iter_bits(row):
                below[y] |= bit
        self.below = tuple(below)
        self.full = (1 << self.n) - 1
        self._cache: dict = {}

    def leq(self, x: int, y: int) -> bool:
        return bool(self.leq_rows[x] >> y & 1)

    def index(self, label: str) -> int:
        try:
            return self.names.index(label)
        except ValueError:
            raise KeyError(f"unknown element label {label!r}") from None

    def subset(self, members: Iterable[int] = ()) -> Subset:
        mask = 0
        for i in members:
            if not 0 <= i < self.n:
                raise ValueError(f"element index {i} out of range 0..{self.n - 1}")
            mask |= 1 << i
        return Subset(self, mask)

    def subset_from_mask(self, mask: int) -> Subset:
        if mask & ~self.full:
            raise ValueError("mask has bits outside the carrier")
        return Subset(self, mask)

    def subset_from_labels(self, labels: Iterable[str]) -> Subset:
        return self.subset(self.index(lbl) for lbl in labels)

    def elements(self) -> Subset:
        return Subset(self, self.full)

    # -- cached product images ------------------------------------------

    def right_images(self) -> tuple[int, ...]:
        """Masks aS = {a*s : s in S} for each a."""
        got = self._cache.get("aS")
        if got is None:
            got = tuple(
                _or_bits(self.mul[a][s] for s in range(self.n)) for a in range(self.n)
            )
            self._cache["aS"] = got
        return got

    def left_images(self) -> tuple[int, ...]:
        """Masks Sa = {s*a : s in S} for each a."""
        got = self._cache.get("Sa")
        if got is None:
            got = tuple(
                _or_bits(self.mul[s][a] for s in range(self.n)) for a in range(self.n)
            )
            self._cache["Sa"] = got
        return got

    def sandwich_images(self) -> tuple[int, ...]:
        """Masks aSa = {a*s*a : s in S} for each a."""
        got = self._cache.get("aSa")
        if got is None:
            mul = self.mul
            out = []
            for a in range(self.n):
                out.append(_or_bits(mul[t][a] for t in iter_bits(self.right_images()[a])))
            got = tuple(out)
            self._cache["aSa"] = got
        return got

    def __repr__(self) -> str:
        return f"OrderedSemigroup(n={self.n}, names={self.names!r})"


def _or_bits(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class Subset:
    """A subset of one structure's carrier, stored as a bitmask.

    Operations that combine subsets insist the operands share the same
    parent object (identity, not structural equality).
    """

    parent: OrderedSemigroup
    mask: int

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.mask))

    @property
    def labels(self) -> tuple[str, ...]:
        names = self.parent.names
        return tuple(names[i] for i in iter_bits(self.mask))

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def _same_parent(self, other: Subset) -> None:
        if self.parent is not other.parent:
            raise ValueError("subsets belong to different structures")

    def __or__(self, other: Subset) -> Subset:
        self._same_parent(other)
        return Subset(self.parent, self.mask | other.mask)

    def __and__(self, other: Subset) -> Subset:
        self._same_parent(other)
        return Subset(self.parent, self.mask & other.mask)

    def __sub__(self, other: Subset) -> Subset:
        self._same_parent(other)
        return Subset(self.parent, self.mask & ~other.mask)

    def __le__(self, other: Subset) -> bool:
        self._same_parent(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: Subset) -> bool:
        self._same_parent(other)
        return self.mask != other.mask and self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        return "{" + ",".join(self.labels) + "}"


# -- axiom checking ------------------------------------------------------


def check_axioms(
    names: Sequence[str],
    mul: Sequence[Sequence[int]],
    leq_rows: Sequence[int],
) -> list[Violation]:
    """Brute-force scan of every axiom over a full (table, order) pair.

    Returns every violation, not just the first; witnesses are in
    lexicographic element order so they are reproducible.
    """
    n = len(names)
    out: list[Violation] = []
    rng = range(n)
    for x in rng:
        row_x = mul[x]
        for y in rng:
            xy = row_x[y]
            row_xy = mul[xy]
            row_y = mul[y]
            for z in rng:
                if row_xy[z] != row_x[row_y[z]]:
                    out.append(
                        Violation(
                            "associativity",
                            (names[x], names[y], names[z]),
                            f"({names[x]}*{names[y]})*{names[z]} = "
                            f"{names[row_xy[z]]} but {names[x]}*({names[y]}*{names[z]}) = "
                            f"{names[row_x[row_y[z]]]}",
                        )
                    )
    for x in rng:
        if not leq_rows[x] >> x & 1:
            out.append(Violation("reflexivity", (names[x],), f"{names[x]} <= {names[x]} missing"))
    for x in rng:
        for y in range(x + 1, n):
            if leq_rows[x] >> y & 1 and leq_rows[y] >> x & 1:
                out.append(
                    Violation(
                        "antisymmetry",
                        (names[x], names[y]),
                        f"{names[x]} <= {names[y]} and {names[y]} <= {names[x]}",
                    )
                )
    for x in rng:
        row = leq_rows[x]
        for y in iter_bits(row):
            if leq_rows[y] & ~row:
                for z in iter_bits(leq_rows[y] & ~row):
                    out.append(
                        Violation(
                            "transitivity",
                            (names[x], names[y], names[z]),
                            f"{names[x]} <= {names[y]} <= {names[z]} but not "
                            f"{names[x]} <= {names[z]}",
                        )
                    )
    for a in rng:
        for b in iter_bits(leq_rows[a]):
            if b == a:
                continue
            for x in rng:
                if not leq_rows[mul[x][a]] >> mul[x][b] & 1:
                    out.append(
                        Violation(
                            "compatibility",
                            (names[a], names[b], names[x]),
                            f"{names[a]} <= {names[b]} but not "
                            f"{names[x]}*{names[a]} <= {names[x]}*{names[b]}",
                        )
                    )
                if not leq_rows[mul[a][x]] >> mul[b][x] & 1:
                    out.append(
                        Violation(
                            "compatibility",
                            (names[a], names[b], names[x]),
                            f"{names[a]} <= {names[b]} but not "
                            f"{names[a]}*{names[x]} <= {names[b]}*{names[x]}",
                        )
                    )
    return out


def _format_violations(raw: RawStructure) -> tuple[list[Violation], dict[str, int]]:
    out: list[Violation] = []
    index: dict[str, int] = {}
    for i, nm in enumerate(raw.names):
        if nm in index:
            out.append(Violation("format", (nm,), f"duplicate element label {nm!r}"))
        else:
            index[nm] = i
    n = len(raw.names)
    if n == 0:
        out.append(Violation("format", (), "no elements declared"))
        return out, index
    if len(raw.mul) != n:
        out.append(
            Violation("format", (), f"table has {len(raw.mul)} rows, expected {n}")
        )
    for r, row in enumerate(raw.mul):
        if len(row) != n:
            out.append(
                Violation(
                    "format",
                    (raw.names[r] if r < n else str(r),),
                    f"table row {r} has {len(row)} entries, expected {n}",
                )
            )
        for lbl in row:
            if lbl not in index:
                out.append(Violation("format", (lbl,), f"unknown label {lbl!r} in table"))
    for x, y in raw.order_pairs:
        for lbl in (x, y):
            if lbl not in index:
                out.append(
                    Violation("format", (lbl,), f"unknown label {lbl!r} in order pair")
                )
    return out, index


def validate(raw: RawStructure) -> OrderedSemigroup | ValidationReport:
    """Validate raw input and build the structure.

    Format problems (unknown labels, ragged table) are reported before any
    axiom check.  The order is the reflexive-transitive closure of the
    input pairs; antisymmetry is checked on the closure.  On success every
    axiom has been verified by exhaustive scan.
    """
    format_violations, index = _format_violations(raw)
    if format_violations:
        return ValidationReport(format_violations)
    n = len(raw.names)
    mul = tuple(tuple(index[lbl] for lbl in row) for row in raw.mul)
    leq_rows = [1 << x for x in range(n)]
    for x, y in raw.order_pairs:
        leq_rows[index[x]] |= 1 << index[y]
    # reflexive-transitive closure, Warshall on row masks
    for k in range(n):
        bit = 1 << k
        row_k = leq_rows[k]
        for i in range(n):
            if leq_rows[i] & bit:
                leq_rows[i] |= row_k
                row_k = leq_rows[k]
    violations = check_axioms(raw.names, mul, leq_rows)
    if violations:
        return ValidationReport(violations)
    return OrderedSemigroup(raw.names, mul, leq_rows)


def structure_from_parts(
    names: Sequence[str],
    mul: Sequence[Sequence[int]],
    leq_rows: Sequence[int],
    check: bool = True,
) -> OrderedSemigroup:
    """Build a structure from index-level parts, optionally re-verifying axioms.

    Used where the order matrix is already explicit (powerset construction,
    enumeration).  With check=True any axiom failure raises ValueError.
    """
    if check:
        violations = check_axioms(names, mul, leq_rows)
        if violations:
            first = violations[0]
            raise ValueError(
                f"invalid structure: {len(violations)} violation(s), first: "
                f"{first.kind} {first.detail}"
            )
    return OrderedSemigroup(names, mul, leq_rows)


# -- subset algebra ------------------------------------------------------


def closure_mask(S: OrderedSemigroup, mask: int) -> int:
    """Downward closure (H] as a mask: everything below some member of H."""
    below = S.below
    out = 0
    for h in iter_bits(mask):
        out |= below[h]
    return out


def product_mask(S: OrderedSemigroup, a_mask: int, b_mask: int) -> int:
    """Elementwise product set {a*b} as a mask."""
    mul = S.mul
    out = 0
    for a in iter_bits(a_mask):
        row = mul[a]
        for b in iter_bits(b_mask):
            out |= 1 << row[b]
    return out


def _check_parent(S: OrderedSemigroup, A: Subset) -> None:
    if A.parent is not S:
        raise ValueError("subset does not belong to this structure")


def downward_closure(S: OrderedSemigroup, H: Subset) -> Subset:
    """(H] = {t : t <= h for some h in H}.  Extensive, monotone, idempotent."""
    _check_parent(S, H)
    return Subset(S, closure_mask(S, H.mask))


def subset_product(S: OrderedSemigroup, A: Subset, B: Subset) -> Subset:
    """{a*b : a in A, b in B}; empty iff either operand is empty."""
    _check_parent(S, A)
    _check_parent(S, B)
    return Subset(S, product_mask(S, A.mask, B.mask))


def is_subsemigroup(S: OrderedSemigroup, A: Subset) -> bool:
    """True iff A*A is contained in A.  A must be nonempty."""
    _check_parent(S, A)
    if A.mask == 0:
        raise ValueError("subsemigroup test requires a nonempty subset")
    return product_mask(S, A.mask, A.mask) & ~A.mask == 0


# -- .osg text format ----------------------------------------------------
#
# osg 1
# elements a b c
# table
# a a c
# ...          (n rows, row x lists x*y for each y in element order)
# order
# a b          (zero or more lines: first <= second)
#
# '#' starts a comment, blank lines are ignored, labels are whitespace-free
# ASCII tokens.


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            out.append((lineno, body))
    return out


def parse_osg(text: str) -> RawStructure:
    """Parse one `.osg` document into a RawStructure (labels unresolved)."""
    lines = _content_lines(text)
    pos = 0

    def take(what: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            raise OsgParseError(f"unexpected end of input, expected {what}")
        item = lines[pos]
        pos += 1
        return item

    lineno, header = take("'osg 1' header")
    if header.split() != ["osg", "1"]:
        raise OsgParseError(f"line {lineno}: expected 'osg 1' header, got {header!r}")
    lineno, elems = take("'elements' line")
    parts = elems.split()
    if parts[0] != "elements" or len(parts) < 2:
        raise OsgParseError(f"line {lineno}: expected 'elements <label>...'")
    names = tuple(parts[1:])
    n = len(names)
    lineno, kw = take("'table' keyword")
    if kw != "table":
        raise OsgParseError(f"line {lineno}: expected 'table', got {kw!r}")
    rows = []
    for _ in range(n):
        lineno, row = take(f"table row ({n} expected)")
        if row == "order":
            raise OsgParseError(f"line {lineno}: table has fewer than {n} rows")
        rows.append(tuple(row.split()))
    lineno, kw = take("'order' keyword")
    if kw != "order":
        raise OsgParseError(f"line {lineno}: expected 'order', got {kw!r}")
    pairs = []
    while pos < len(lines):
        lineno, pair = take("order pair")
        parts = pair.split()
        if len(parts) != 2:
            raise OsgParseError(
                f"line {lineno}: order line needs exactly two labels, got {pair!r}"
            )
        pairs.append((parts[0], parts[1]))
    return RawStructure(names, tuple(rows), tuple(pairs))


def emit_osg(S: OrderedSemigroup) -> str:
    """Serialize in normalized form: sorted strict order pairs, single spaces.

    emit(parse(emit(S))) == emit(S) byte for byte.
    """
    names = S.names
    out = ["osg 1", "elements " + " ".join(names), "table"]
    for x in range(S.n):
        out.append(" ".join(names[S.mul[x][y]] for y in range(S.n)))
    out.append("order")
    for x in range(S.n):
        for y in range(S.n):
            if x != y and S.leq_rows[x] >> y & 1:
                out.append(f"{names[x]} {names[y]}")
    return "\n".join(out) + "\n"


def load_structure(text: str) -> OrderedSemigroup:
    """parse + validate; raises OsgParseError or ValueError on bad input."""
    result = validate(parse_osg(text))
    if isinstance(result, ValidationReport):
        kinds = ", ".join(sorted(result.kinds()))
        raise ValueError(f"structure fails validation ({kinds})")
    return result
