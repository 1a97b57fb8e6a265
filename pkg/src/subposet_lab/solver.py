"""Exact extremal computations over set families at desk scale.

alpha() maximizes cardinality or Lubell mass over pattern-free subfamilies of
a fixed family by depth-first branch and bound in canonical order; it is the
brute-force oracle against which every closed-form bound is checked. The
n-guard on whole-cube searches reflects that 2^(2^n) subfamily spaces are only
reachable through pruning.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Union

from .errors import GuardRefused, PFreenessViolated
from .families import SetFamily, permutation_hit_count
from .posets import EmbeddingSearch, Poset, find_subposet

N_GUARD = 7


@dataclass(frozen=True)
class ExtremalResult:
    """Outcome of an exact search: the optimum, a witness family attaining it,
    and whether the search ran to completion."""

    value: Union[int, Fraction]
    witness: SetFamily
    mode: str
    objective: str
    exhaustive: bool
    nodes_explored: int

    def as_dict(self) -> dict:
        return {
            "schema": 1,
            "value": str(self.value) if isinstance(self.value, Fraction) else self.value,
            "objective": self.objective,
            "mode": self.mode,
            "exhaustive": self.exhaustive,
            "witness": [list(s.elements()) for s in self.witness],
            "nodes_explored": self.nodes_explored,
        }


class _BudgetExhausted(Exception):
    pass


def alpha(
    H: SetFamily,
    P: Poset,
    mode: str = "weak",
    objective: str = "cardinality",
    node_budget: int | None = None,
) -> ExtremalResult:
    """Exact optimum over P-free subfamilies of H.

    Branches include-first through H in canonical order, pruning when the
    current value plus everything still ahead cannot beat the incumbent and
    when adding a set would complete a copy of P (freeness is closed under
    removal, so a completed copy kills the whole include branch). Include-first
    order with strict improvement makes the witness the lexicographically
    least optimum over canonical indices. Hitting the node budget returns the
    incumbent flagged non-exhaustive (a valid lower bound).
    """
    if P.size < 1:
        raise ValueError("pattern must have at least one element")
    if objective not in ("cardinality", "lubell"):
        raise ValueError(f"unknown objective {objective!r}")
    search = EmbeddingSearch(H, P, mode)
    members = H.sets
    m = len(members)

    if objective == "cardinality":
        values: list = [1] * m
        zero: Union[int, Fraction] = 0
    else:
        values = [Fraction(1, comb(H.n, s.weight)) for s in members]
        zero = Fraction(0)
    suffix = [zero] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + values[i]

    best_value: Union[int, Fraction] = zero - 1
    best_mask = 0
    nodes = 0

    def dfs(idx: int, cur_mask: int, cur_val) -> None:
        nonlocal best_value, best_mask, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _BudgetExhausted
        if idx == m:
            if cur_val > best_value:
                best_value = cur_val
                best_mask = cur_mask
            return
        if cur_val + suffix[idx] <= best_value:
            return
        if not search.embeds_using(cur_mask | (1 << idx), idx):
            dfs(idx + 1, cur_mask | (1 << idx), cur_val + values[idx])
        dfs(idx + 1, cur_mask, cur_val)

    exhaustive = True
    try:
        dfs(0, 0, zero)
    except _BudgetExhausted:
        exhaustive = False

    if best_mask == 0 and best_value < zero:
        # Budget died before reaching any leaf; the empty family is always valid.
        best_value = zero
    witness = SetFamily(H.n, (members[i] for i in range(m) if best_mask >> i & 1))
    return ExtremalResult(best_value, witness, mode, objective, exhaustive, nodes)


def _guard(n: int, override: bool) -> None:
    if n > N_GUARD and not override:
        raise GuardRefused(
            f"n={n} exceeds the exhaustive-search guard ({N_GUARD}); "
            "pass override=True (CLI: --override-guard) to search anyway"
        )


def la_exact(
    n: int,
    P: Poset,
    mode: str = "weak",
    override: bool = False,
    node_budget: int | None = None,
) -> ExtremalResult:
    """Largest P-free family in 2^[n], exactly."""
    _guard(n, override)
    return alpha(SetFamily.power_set(n), P, mode, "cardinality", node_budget)


def lubell_max(
    n: int,
    P: Poset,
    mode: str = "induced",
    override: bool = False,
    node_budget: int | None = None,
) -> ExtremalResult:
    """Maximum Lubell mass of a P-free family in 2^[n], exactly."""
    _guard(n, override)
    return alpha(SetFamily.power_set(n), P, mode, "lubell", node_budget)


@dataclass(frozen=True)
class DoubleCountingReport:
    """Both sides of the permutation double count for a P-free family.

    lhs is sum over the family of N_|A| / binom(n, |A|); it can never exceed
    alpha(H, P) because each of the n! permuted copies of H meets a P-free
    family in at most alpha(H, P) sets. In exhaustive mode the pair count
    (A, pi) with A in H^pi is computed both per-set (closed form) and
    per-permutation, and the two must agree.
    """

    lhs: Fraction
    alpha_value: int
    holds: bool
    mode: str
    exhaustive: bool
    pairs_by_sets: int | None = None
    pairs_by_permutations: int | None = None

    @property
    def identity_holds(self) -> bool:
        if not self.exhaustive:
            return True
        return self.pairs_by_sets == self.pairs_by_permutations


def verify_double_counting(
    H: SetFamily,
    P: Poset,
    A_family: SetFamily,
    mode: str = "weak",
    exhaustive: bool | None = None,
) -> DoubleCountingReport:
    """Check the double-counting inequality for a concrete P-free family."""
    if H.n != A_family.n:
        raise ValueError("H and the family live over different ground sets")
    if find_subposet(A_family, P, mode) is not None:
        raise PFreenessViolated("the candidate family contains the pattern")
    n = H.n
    lhs = Fraction(0)
    for a in A_family:
        lhs += Fraction(H.count_of_size(a.weight), comb(n, a.weight))
    alpha_res = alpha(H, P, mode)
    if exhaustive is None:
        exhaustive = n <= 6
    pairs_by_sets = pairs_by_perms = None
    if exhaustive:
        if n > 8:
            raise ValueError("exhaustive permutation mode is factorial; keep n <= 8")
        pairs_by_sets = sum(permutation_hit_count(H, a) for a in A_family)
        fam_masks = frozenset(s.mask for s in A_family)
        pairs_by_perms = 0
        for images in itertools.permutations(range(n)):
            moved = set()
            for s in H:
                m2 = 0
                sm = s.mask
                while sm:
                    low = sm & -sm
                    sm ^= low
                    m2 |= 1 << images[low.bit_length() - 1]
                moved.add(m2)
            pairs_by_perms += len(fam_masks & moved)
        assert pairs_by_sets <= alpha_res.value * factorial(n)
    return DoubleCountingReport(
        lhs=lhs,
        alpha_value=alpha_res.value,
        holds=lhs <= alpha_res.value,
        mode=mode,
        exhaustive=exhaustive,
        pairs_by_sets=pairs_by_sets,
        pairs_by_permutations=pairs_by_perms,
    )
