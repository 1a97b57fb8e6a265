"""Subsets of [n], set families, interval chains, and their counting functions.

Sets are subsets of the ground set [n] = {1, ..., n} stored as bitmasks:
bit i-1 of the mask is element i, matching the indicator-vector convention
b_1 b_2 ... b_n read left to right in element order. All counts and Lubell
values are exact (ints and Fractions); this module never touches floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Sequence, TextIO

from .errors import OutOfRange


@dataclass(frozen=True)
class Subset:
    """A subset of [n] with indicator-vector semantics."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"ground set size must be >= 0, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#b} does not fit in [{self.n}]")

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[int]) -> "Subset":
        mask = 0
        for e in elements:
            if not 1 <= e <= n:
                raise ValueError(f"element {e} outside [{n}]")
            mask |= 1 << (e - 1)
        return cls(n, mask)

    @classmethod
    def from_indicator(cls, bits: Sequence[int]) -> "Subset":
        mask = 0
        for i, b in enumerate(bits):
            if b:
                mask |= 1 << i
        return cls(len(bits), mask)

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def elements(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    def indicator(self) -> tuple[int, ...]:
        return tuple(self.mask >> i & 1 for i in range(self.n))

    def issubset(self, other: "Subset") -> bool:
        return self.mask & other.mask == self.mask

    def is_proper_subset(self, other: "Subset") -> bool:
        return self.mask != other.mask and self.issubset(other)

    def related(self, other: "Subset") -> bool:
        """True if one of the two sets contains the other (including equality)."""
        return self.issubset(other) or other.issubset(self)

    def permuted(self, perm: Sequence[int]) -> "Subset":
        """Image under a permutation of [n] given as perm[i-1] = pi(i)."""
        mask = 0
        for i in range(self.n):
            if self.mask >> i & 1:
                mask |= 1 << (perm[i] - 1)
        return Subset(self.n, mask)

    def __or__(self, other: "Subset") -> "Subset":
        if self.n != other.n:
            raise ValueError("ground sets differ")
        return Subset(self.n, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        if self.n != other.n:
            raise ValueError("ground sets differ")
        return Subset(self.n, self.mask & other.mask)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Canonical order: by weight, then lexicographically by indicator vector."""
        return (self.weight, self.indicator())

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements()) + "}"

    def __repr__(self) -> str:
        return f"Subset({self.n}, {self.elements()})"


class SetFamily:
    """A duplicate-free collection of subsets of [n] in canonical order.

    Canonical order sorts by weight, then by indicator vector; every
    constructor (and every operation returning a family) maintains it.
    """

    __slots__ = ("n", "sets", "_mask_set")

    def __init__(self, n: int, sets: Iterable[Subset] = ()):
        unique: dict[int, Subset] = {}
        for s in sets:
            if s.n != n:
                raise ValueError(f"set over [{s.n}] mixed into family over [{n}]")
            unique[s.mask] = s
        object.__setattr__(self, "n", n)
        object.__setattr__(
            self, "sets", tuple(sorted(unique.values(), key=Subset.sort_key))
        )
        object.__setattr__(self, "_mask_set", frozenset(unique))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("SetFamily is immutable")

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "SetFamily":
        return cls(n, (Subset(n, m) for m in masks))

    @classmethod
    def power_set(cls, n: int) -> "SetFamily":
        return cls.from_masks(n, range(1 << n))

    @classmethod
    def levels(cls, n: int, sizes: Iterable[int]) -> "SetFamily":
        """All subsets of [n] whose size lies in `sizes`."""
        wanted = set(sizes)
        return cls.from_masks(
            n, (m for m in range(1 << n) if m.bit_count() in wanted)
        )

    def masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s in self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.sets)

    def __contains__(self, s: Subset) -> bool:
        return s.mask in self._mask_set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.n == other.n and self._mask_set == other._mask_set

    def __hash__(self) -> int:
        return hash((self.n, self._mask_set))

    def count_of_size(self, m: int) -> int:
        return sum(1 for s in self.sets if s.weight == m)

    def restrict_sizes(self, lo: int, hi: int) -> "SetFamily":
        return SetFamily(self.n, (s for s in self.sets if lo <= s.weight <= hi))

    def union(self, other: "SetFamily") -> "SetFamily":
        if self.n != other.n:
            raise ValueError("ground sets differ")
        return SetFamily(self.n, itertools.chain(self.sets, other.sets))

    def without(self, drop: Iterable[Subset]) -> "SetFamily":
        gone = {s.mask for s in drop}
        return SetFamily(self.n, (s for s in self.sets if s.mask not in gone))

    def __repr__(self) -> str:
        inner = ", ".join(str(s) for s in self.sets)
        return f"SetFamily(n={self.n}, [{inner}])"


def lubell(fam: SetFamily) -> Fraction:
    """Sum of 1/binom(n, |A|) over the family: the fraction of each level used."""
    total = Fraction(0)
    for s in fam:
        total += Fraction(1, comb(fam.n, s.weight))
    return total


def _check_permutation(n: int, perm: Sequence[int]) -> None:
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of [{n}]: {perm!r}")


def apply_permutation(fam: SetFamily, perm: Sequence[int]) -> SetFamily:
    """Pointwise image family {A^pi : A in fam} for pi given as perm[i-1] = pi(i)."""
    _check_permutation(fam.n, perm)
    return SetFamily(fam.n, (s.permuted(perm) for s in fam))


@dataclass(frozen=True)
class IntervalChainSpec:
    """Parameters of a k-interval chain: the union of intervals [A_i, A_{i+k}]
    along a maximal chain A_0 c A_1 c ... c A_n with |A_i| = i.

    The canonical base A_i = [i] gives the chain whose members are exactly the
    masks of the form (initial 1-run, then k free bits, then zeros).
    """

    n: int
    k: int
    base: tuple[Subset, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if len(self.base) != self.n + 1:
            raise ValueError("base must be a maximal chain with n+1 sets")
        for i, s in enumerate(self.base):
            if s.n != self.n or s.weight != i:
                raise ValueError(f"base set {i} must have size {i} over [{self.n}]")
            if i and not self.base[i - 1].is_proper_subset(s):
                raise ValueError("base chain is not nested")

    @classmethod
    def canonical(cls, n: int, k: int) -> "IntervalChainSpec":
        base = tuple(Subset(n, (1 << i) - 1) for i in range(n + 1))
        return cls(n, k, base)

    @property
    def is_canonical(self) -> bool:
        return all(s.mask == (1 << i) - 1 for i, s in enumerate(self.base))

    def base_permutation(self) -> tuple[int, ...]:
        """The permutation carrying this base onto the canonical one.

        pi maps the element added at base step i to i, so A_i^pi = [i].
        """
        perm = [0] * self.n
        for i in range(1, self.n + 1):
            added = self.base[i].mask & ~self.base[i - 1].mask
            perm[added.bit_length() - 1] = i
        return tuple(perm)

    def contains(self, s: Subset) -> bool:
        """Membership test for the chain."""
        if s.n != self.n:
            return False
        if self.is_canonical:
            # Initial 1-run of length r, then everything past position r+k is 0.
            mask = s.mask
            run = 0
            while mask >> run & 1:
                run += 1
            return mask >> (run + self.k) == 0
        return any(
            self.base[i].issubset(s) and s.issubset(self.base[i + self.k])
            for i in range(self.n - self.k + 1)
        )


def interval_chain(spec: IntervalChainSpec) -> SetFamily:
    """Enumerate the chain as a family: union of the n-k+1 intervals."""
    masks: set[int] = set()
    for i in range(spec.n - spec.k + 1):
        lo = spec.base[i].mask
        free = spec.base[i + spec.k].mask & ~lo
        free_bits = [b for b in range(spec.n) if free >> b & 1]
        for choice in range(1 << len(free_bits)):
            m = lo
            for j, b in enumerate(free_bits):
                if choice >> j & 1:
                    m |= 1 << b
            masks.add(m)
    return SetFamily.from_masks(spec.n, masks)


def level_count(spec: IntervalChainSpec, m: int) -> int:
    """Number of size-m sets in the chain: 2^(k-1) for k <= m <= n-k,
    enumerated outside that window."""
    if not 0 <= m <= spec.n:
        raise ValueError(f"level {m} outside 0..{spec.n}")
    if spec.k <= m <= spec.n - spec.k:
        return 1 << (spec.k - 1)
    return interval_chain(spec).count_of_size(m)

def count_trailing_zero_profile(spec: IntervalChainSpec, m: int, j: int) -> int:
    """Number of size-m chain sets with at least j zeros before their last 1.

    Valid for k <= m <= n-k, where the size-m sets biject with the k-1 bits
    preceding the final 1; the count is sum_{h=j}^{k-1} binom(k-1, h).
    """
    if not spec.k <= m <= spec.n - spec.k:
        raise OutOfRange(f"m={m} outside [{spec.k}, {spec.n - spec.k}]")
    if not 0 <= j <= spec.k - 1:
        raise OutOfRange(f"j={j} outside [0, {spec.k - 1}]")
    return sum(comb(spec.k - 1, h) for h in range(j, spec.k))


def unrelated_below_count(k: int) -> int:
    """Closed form (3k-5) * 2^(k-2) for the collection computed by unrelated_below."""
    if k < 2:
        raise OutOfRange(f"need k >= 2, got {k}")
    return (3 * k - 5) * (1 << (k - 2))


def unrelated_below(spec: IntervalChainSpec, m: int) -> SetFamily:
    """Chain sets of size <= m-1 unrelated to at least one chain set of size >= m.

    Enumerated directly; for 3k-3 <= m <= n-k+1 its cardinality is the closed
    form unrelated_below_count(k), independent of m and n.
    """
    if spec.k < 2:
        raise OutOfRange(f"need k >= 2, got {spec.k}")
    if not 3 * spec.k - 3 <= m <= spec.n - spec.k + 1:
        raise OutOfRange(
            f"m={m} outside [{3 * spec.k - 3}, {spec.n - spec.k + 1}]"
        )
    chain = interval_chain(spec)
    big = [s for s in chain if s.weight >= m]
    return SetFamily(
        spec.n,
        (
            s
            for s in chain
            if s.weight <= m - 1 and any(not s.related(b) for b in big)
        ),
    )


def worst_set(spec: IntervalChainSpec, m: int) -> Subset:
    """The unique size-m chain set with indicator 1^(m-k+1) 0 1^(k-1) 0...

    For a canonical-base chain this is the only size-m member unrelated to
    certain smaller members that are related to everything of size m+1.
    """
    if not spec.is_canonical:
        raise ValueError("worst_set is defined for the canonical base only")
    if not spec.k <= m <= spec.n - 1:
        raise OutOfRange(f"m={m} outside [{spec.k}, {spec.n - 1}]")
    ones_head = (1 << (m - spec.k + 1)) - 1
    ones_tail = ((1 << (spec.k - 1)) - 1) << (m - spec.k + 2)
    return Subset(spec.n, ones_head | ones_tail)


def permutation_hit_count(fam: SetFamily, a: Subset) -> int:
    """Number of permutations pi of [n] with a in {S^pi : S in fam}.

    Closed form N_w * w! * (n-w)! where w = |a| and N_w counts size-w members:
    each size-w member is carried onto `a` by exactly w!(n-w)! permutations,
    and no permutation carries two distinct members onto the same set.
    """
    if fam.n != a.n:
        raise ValueError("ground sets differ")
    w = a.weight
    return fam.count_of_size(w) * factorial(w) * factorial(fam.n - w)


def permutation_hit_count_exhaustive(fam: SetFamily, a: Subset) -> int:
    """Count the same permutations by brute force over all n! of them."""
    if fam.n != a.n:
        raise ValueError("ground sets differ")
    if fam.n > 8:
        raise ValueError("exhaustive count is factorial; keep n <= 8")
    n = fam.n
    hits = 0
    for images in itertools.permutations(range(1, n + 1)):
        pi_of = {i + 1: images[i] for i in range(n)}
        moved = {
            frozenset(pi_of[e] for e in s.elements()) for s in fam
        }
        if frozenset(a.elements()) in moved:
            hits += 1
    return hits


# --- family file format -----------------------------------------------------
#
# First line `n=<N>`, then one set per line as comma-separated elements, with
# `{}` denoting the empty set. Written in canonical order.


def family_to_text(fam: SetFamily) -> str:
    lines = [f"n={fam.n}"]
    for s in fam:
        lines.append(",".join(str(e) for e in s.elements()) if s.weight else "{}")
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> SetFamily:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("family file must start with an 'n=<N>' line")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise ValueError(f"bad ground set size: {lines[0]!r}") from exc
    sets = []
    for ln in lines[1:]:
        if ln == "{}":
            sets.append(Subset.empty(n))
        else:
            sets.append(Subset.from_elements(n, (int(tok) for tok in ln.split(","))))
    return SetFamily(n, sets)


def write_family(fam: SetFamily, fp: TextIO) -> None:
    fp.write(family_to_text(fam))


def read_family(fp: TextIO) -> SetFamily:
    return family_from_text(fp.read())
