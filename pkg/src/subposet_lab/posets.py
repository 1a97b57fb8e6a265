"""Finite strict partial orders, standard constructors, and subposet search.

A Poset stores its full transitive closure as per-element bitmask rows
(bit j of row i means i < j), so embedding checks are O(1) lookups. Sizes
stay small (<= ~20 elements) throughout, which keeps every decomposition
and search here exact and cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    CycleDetected,
    InvalidEmbedding,
    InvalidSpec,
    NotUniqueExtremum,
    ParseError,
    SearchBudgetExceeded,
)
from .families import SetFamily, Subset


class Poset:
    """Immutable finite strict partial order on elements 0..size-1."""

    __slots__ = ("size", "rows", "_cols")

    def __init__(self, rows: Sequence[int]):
        rows = tuple(rows)
        n = len(rows)
        cols = [0] * n
        for i, row in enumerate(rows):
            if not 0 <= row < (1 << n):
                raise ValueError(f"row {i} references elements outside 0..{n - 1}")
            if row >> i & 1:
                raise ValueError(f"relation is not irreflexive at {i}")
            for j in range(n):
                if row >> j & 1:
                    cols[j] |= 1 << i
        for i in range(n):
            if rows[i] & cols[i]:
                raise ValueError(f"relation is not antisymmetric at {i}")
            for j in range(n):
                if rows[i] >> j & 1 and rows[j] & ~rows[i]:
                    raise ValueError("relation is not transitively closed")
        object.__setattr__(self, "size", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_cols", tuple(cols))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Poset is immutable")

    def __len__(self) -> int:
        return self.size

    def less(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def related(self, i: int, j: int) -> bool:
        return self.less(i, j) or self.less(j, i)

    def above_mask(self, i: int) -> int:
        """Bitmask of elements strictly above i."""
        return self.rows[i]

    def below_mask(self, i: int) -> int:
        """Bitmask of elements strictly below i."""
        return self._cols[i]

    def degree(self, i: int) -> int:
        return (self.rows[i] | self._cols[i]).bit_count()

    def relations(self) -> Iterator[tuple[int, int]]:
        for i in range(self.size):
            for j in range(self.size):
                if self.rows[i] >> j & 1:
                    yield (i, j)

    def maximal_elements(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.size) if not self.rows[i])

    def minimal_elements(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.size) if not self._cols[i])

    def chain_heights(self) -> tuple[int, ...]:
        """For each element, the number of elements in a longest chain ending at it."""
        order = sorted(range(self.size), key=lambda i: self._cols[i].bit_count())
        label = [0] * self.size
        for i in order:
            below = self._cols[i]
            label[i] = 1 + max(
                (label[j] for j in range(self.size) if below >> j & 1), default=0
            )
        return tuple(label)

    def height(self) -> int:
        """Number of elements in a longest chain."""
        if self.size == 0:
            return 0
        return max(self.chain_heights())

    def mirsky_decomposition(self) -> "AntichainDecomposition":
        """Partition into height() antichains by longest-chain labeling.

        Layer i collects the elements whose longest chain ending at them has
        exactly i elements, so elements of higher layers are never below
        elements of lower ones.
        """
        label = self.chain_heights()
        layers = [
            tuple(i for i in range(self.size) if label[i] == lv)
            for lv in range(1, self.height() + 1)
        ]
        return AntichainDecomposition(tuple(layers))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Poset(size={self.size}, relations={list(self.relations())})"


@dataclass(frozen=True)
class AntichainDecomposition:
    """Ordered antichain layers A_1..A_h partitioning a poset bottom-up."""

    layers: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)


@dataclass(frozen=True)
class Embedding:
    """An injection of pattern elements into a target poset or set family.

    images[e] is the image of pattern element e: an element id for
    poset-to-poset embeddings, a Subset for poset-to-family ones.
    """

    mode: str  # 'weak' | 'induced'
    target_kind: str  # 'poset' | 'family'
    images: tuple[Union[int, Subset], ...]


def poset_from_relations(pairs: Iterable[tuple[int, int]], size: int) -> Poset:
    """Transitive closure of the given (below, above) pairs; rejects cycles."""
    rows = [0] * size
    for lo, hi in pairs:
        if not (0 <= lo < size and 0 <= hi < size):
            raise ValueError(f"pair ({lo}, {hi}) references ids outside 0..{size - 1}")
        rows[lo] |= 1 << hi
    # Warshall closure over the bitmask rows.
    for j in range(size):
        bit = 1 << j
        for i in range(size):
            if rows[i] & bit:
                rows[i] |= rows[j]
    for i in range(size):
        if rows[i] >> i & 1:
            raise CycleDetected(f"element {i} would lie below itself")
    return Poset(rows)


def complete_multilevel(sizes: Sequence[int]) -> Poset:
    """The complete h-level poset: every element below all elements of higher levels.

    Elements are numbered level by level from the bottom; level i gets the ids
    sum(sizes[:i]) .. sum(sizes[:i+1]) - 1.
    """
    sizes = tuple(sizes)
    if not sizes or any(a < 1 for a in sizes):
        raise InvalidSpec(f"level sizes must all be >= 1, got {sizes}")
    total = sum(sizes)
    rows = [0] * total
    start = 0
    for a in sizes:
        above = ((1 << total) - 1) & ~((1 << (start + a)) - 1)
        for i in range(start, start + a):
            rows[i] = above
        start += a
    return Poset(rows)


def chain(k: int) -> Poset:
    if k < 1:
        raise InvalidSpec(f"chain length must be >= 1, got {k}")
    return complete_multilevel((1,) * k)


def antichain(k: int) -> Poset:
    if k < 1:
        raise InvalidSpec(f"antichain size must be >= 1, got {k}")
    return complete_multilevel((k,))


def diamond(k: int) -> Poset:
    """D_k: one bottom below k incomparable middles below one top (k+2 elements)."""
    if k < 1:
        raise InvalidSpec(f"diamond width must be >= 1, got {k}")
    return complete_multilevel((1, k, 1))


def product(p: Poset, q: Poset) -> Poset:
    """Glue q on top of p, identifying p's unique maximum with q's unique minimum."""
    p_max = p.maximal_elements()
    q_min = q.minimal_elements()
    if len(p_max) != 1:
        raise NotUniqueExtremum(f"left factor has maximal elements {p_max}")
    if len(q_min) != 1:
        raise NotUniqueExtremum(f"right factor has minimal elements {q_min}")
    w = p_max[0]
    qm = q_min[0]
    size = p.size + q.size - 1

    def q_id(e: int) -> int:
        if e == qm:
            return w
        return p.size + e - (1 if e > qm else 0)

    pairs = list(p.relations())
    pairs += [(q_id(a), q_id(b)) for a, b in q.relations()]
    pairs += [
        (x, q_id(y))
        for x in range(p.size)
        if x != w
        for y in range(q.size)
        if y != qm
    ]
    return poset_from_relations(pairs, size)


def are_isomorphic(p: Poset, q: Poset) -> bool:
    """Brute-force isomorphism over all permutations; test-scale sizes only."""
    if p.size != q.size:
        return False
    if p.size > 8:
        raise ValueError("brute-force isomorphism is limited to size <= 8")
    if sorted(p.degree(i) for i in range(p.size)) != sorted(
        q.degree(i) for i in range(q.size)
    ):
        return False
    n = p.size
    for perm in itertools.permutations(range(n)):
        if all(p.less(i, j) == q.less(perm[i], perm[j]) for i in range(n) for j in range(n)):
            return True
    return False


def inclusion_poset(fam: SetFamily) -> Poset:
    """The family ordered by strict containment, elements in canonical order."""
    masks = fam.masks()
    rows = []
    for a in masks:
        row = 0
        for j, b in enumerate(masks):
            if a != b and a & b == a:
                row |= 1 << j
        rows.append(row)
    return Poset(rows)


# --- subposet embedding search ----------------------------------------------

_NONE, _BELOW, _ABOVE, _INCOMP = 0, 1, 2, 3


class _HostView:
    """Comparability bitmasks of a host poset or set family."""

    __slots__ = ("size", "above", "below", "labels")

    def __init__(self, host: Union[Poset, SetFamily]):
        if isinstance(host, Poset):
            self.size = host.size
            self.above = [host.above_mask(i) for i in range(host.size)]
            self.below = [host.below_mask(i) for i in range(host.size)]
            self.labels = None
        else:
            masks = host.masks()
            self.size = len(masks)
            self.above = [0] * self.size
            self.below = [0] * self.size
            for i, a in enumerate(masks):
                for j, b in enumerate(masks):
                    if a != b and a & b == a:
                        self.above[i] |= 1 << j
                        self.below[j] |= 1 << i
            self.labels = tuple(host)


class EmbeddingSearch:
    """Backtracking search for order-preserving injections of a pattern.

    Pattern elements are assigned in descending-degree order (ties by id).
    Candidate sets are propagated forward after each assignment, so branches
    that starve a later element are cut immediately. The search is exhaustive:
    a None result is a proof that no embedding exists.
    """

    __slots__ = (
        "host",
        "pattern",
        "mode",
        "order",
        "rel",
        "full_mask",
        "_forced_orders",
        "_twin_reps",
        "_need_above",
        "_need_below",
    )

    def __init__(self, host: Union[Poset, SetFamily], pattern: Poset, mode: str):
        if mode not in ("weak", "induced"):
            raise ValueError(f"mode must be 'weak' or 'induced', got {mode!r}")
        self.host = _HostView(host)
        self.pattern = pattern
        self.mode = mode
        self.order = sorted(
            range(pattern.size), key=lambda e: (-pattern.degree(e), e)
        )
        q = pattern.size
        rel = [[_NONE] * q for _ in range(q)]
        for a in range(q):
            for b in range(q):
                if a == b:
                    continue
                if pattern.less(a, b):
                    rel[a][b] = _BELOW
                elif pattern.less(b, a):
                    rel[a][b] = _ABOVE
                else:
                    rel[a][b] = _INCOMP
        self.rel = rel
        self.full_mask = (1 << self.host.size) - 1
        self._forced_orders = [
            [e] + [x for x in self.order if x != e] for e in range(q)
        ]
        # Elements with identical up- and down-sets are swappable, so a copy
        # through one exists iff a copy through any of its twins does.
        seen: dict[tuple[int, int], int] = {}
        reps = []
        for e in range(q):
            key = (pattern.above_mask(e), pattern.below_mask(e))
            if key not in seen:
                seen[key] = e
                reps.append(e)
        self._twin_reps = reps
        self._need_above = [pattern.above_mask(e).bit_count() for e in range(q)]
        self._need_below = [pattern.below_mask(e).bit_count() for e in range(q)]

    def _constraint_mask(self, kind: int, host_idx: int) -> int:
        # Candidates for an element in relation `kind` to one imaged at host_idx.
        if kind == _BELOW:
            # pattern element sits below: its image must be below host_idx.
            return self.host.below[host_idx]
        if kind == _ABOVE:
            return self.host.above[host_idx]
        if kind == _INCOMP and self.mode == "induced":
            return self.full_mask & ~(
                self.host.above[host_idx]
                | self.host.below[host_idx]
                | (1 << host_idx)
            )
        return self.full_mask

    def run(
        self,
        allowed_mask: int | None = None,
        forced: tuple[int, int] | None = None,
        node_budget: int | None = None,
    ) -> Iterator[tuple[int, ...]]:
        """Yield image tuples (indexed by pattern element id).

        `allowed_mask` restricts host candidates; `forced` pins pattern
        element e to host index z before the search starts.
        """
        allowed = self.full_mask if allowed_mask is None else allowed_mask
        q = self.pattern.size
        if q == 0:
            yield ()
            return
        order = self.order
        images = [-1] * q
        cand = [allowed] * q
        used = 0
        nodes = 0

        if forced is not None:
            e, z = forced
            if not cand[e] >> z & 1:
                return
            images[e] = z
            used = 1 << z
            for u in range(q):
                if u != e:
                    cand[u] &= self._constraint_mask(self.rel[u][e], z)
            order = [e] + [x for x in order if x != e]

        start = 1 if forced is not None else 0

        def assign(depth: int) -> Iterator[tuple[int, ...]]:
            nonlocal used, nodes
            if depth == len(order):
                yield tuple(images)
                return
            elem = order[depth]
            choices = cand[elem] & ~used
            while choices:
                z = choices & -choices
                choices ^= z
                zi = z.bit_length() - 1
                nodes += 1
                if node_budget is not None and nodes > node_budget:
                    raise SearchBudgetExceeded(
                        f"embedding search exceeded {node_budget} nodes"
                    )
                saved = [cand[u] for u in range(q)]
                ok = True
                for u in range(q):
                    if images[u] == -1 and u != elem:
                        cand[u] &= self._constraint_mask(self.rel[u][elem], zi)
                        if cand[u] & ~(used | z) == 0:
                            ok = False
                if ok:
                    images[elem] = zi
                    used |= z
                    yield from assign(depth + 1)
                    images[elem] = -1
                    used &= ~z
                for u in range(q):
                    cand[u] = saved[u]

        yield from assign(start)

    def embeds_using(self, allowed_mask: int, host_idx: int) -> bool:
        """Is there a copy of the pattern inside `allowed_mask` whose image
        includes host_idx? Boolean fast path for incremental freeness checks."""
        above = self.host.above[host_idx] & allowed_mask
        below = self.host.below[host_idx] & allowed_mask
        n_above = above.bit_count()
        n_below = below.bit_count()
        for e in self._twin_reps:
            if n_above < self._need_above[e] or n_below < self._need_below[e]:
                continue
            if self._forced_search(allowed_mask, e, host_idx):
                return True
        return False

    def _forced_search(self, allowed: int, e: int, z: int) -> bool:
        q = self.pattern.size
        rel = self.rel
        order = self._forced_orders[e]
        images = [-1] * q
        cand = [allowed] * q
        images[e] = z
        for u in range(q):
            if u != e:
                cand[u] &= self._constraint_mask(rel[u][e], z)

        def assign(depth: int, used: int) -> bool:
            if depth == q:
                return True
            elem = order[depth]
            choices = cand[elem] & ~used
            while choices:
                zbit = choices & -choices
                choices ^= zbit
                zi = zbit.bit_length() - 1
                saved = cand.copy()
                ok = True
                for u in range(q):
                    if images[u] == -1 and u != elem:
                        cand[u] &= self._constraint_mask(rel[u][elem], zi)
                        if cand[u] & ~(used | zbit) == 0:
                            ok = False
                if ok:
                    images[elem] = zi
                    if assign(depth + 1, used | zbit):
                        return True
                    images[elem] = -1
                cand[:] = saved
            return False

        return assign(1, 1 << z)


def iter_subposet_embeddings(
    host: Union[Poset, SetFamily],
    pattern: Poset,
    mode: str = "weak",
    node_budget: int | None = None,
) -> Iterator[Embedding]:
    """All order-preserving injections of `pattern` into `host`, lazily."""
    search = EmbeddingSearch(host, pattern, mode)
    kind = "poset" if isinstance(host, Poset) else "family"
    for images in search.run(node_budget=node_budget):
        if kind == "family":
            yield Embedding(mode, kind, tuple(search.host.labels[i] for i in images))
        else:
            yield Embedding(mode, kind, images)


def find_subposet(
    host: Union[Poset, SetFamily],
    pattern: Poset,
    mode: str = "weak",
    node_budget: int | None = None,
) -> Embedding | None:
    """First embedding of `pattern` in `host`, or None (exhaustively verified)."""
    return next(iter_subposet_embeddings(host, pattern, mode, node_budget), None)


def check_embedding(
    pattern: Poset, emb: Embedding, host: Poset | None = None
) -> None:
    """Validate injectivity and order preservation; raises InvalidEmbedding."""
    images = emb.images
    if len(images) != pattern.size:
        raise InvalidEmbedding("image count differs from pattern size")
    if len(set(images)) != len(images):
        raise InvalidEmbedding("assignment is not injective")

    def img_less(a: int, b: int) -> bool:
        x, y = images[a], images[b]
        if emb.target_kind == "family":
            return x.is_proper_subset(y)
        if host is None:
            raise InvalidEmbedding("poset-target validation needs the host poset")
        return host.less(x, y)

    for a in range(pattern.size):
        for b in range(pattern.size):
            if a == b:
                continue
            if pattern.less(a, b) and not img_less(a, b):
                raise InvalidEmbedding(f"relation {a} < {b} not preserved")
            if emb.mode == "induced" and not pattern.less(a, b) and img_less(a, b):
                raise InvalidEmbedding(f"spurious image relation under {a}, {b}")


@dataclass(frozen=True)
class DiamondProductEmbedding:
    """A poset embedded into the chained product of diamonds built from its layers."""

    embedding: Embedding
    target: Poset
    layer_sizes: tuple[int, ...]


def embed_into_diamond_product(p: Poset) -> DiamondProductEmbedding:
    """Weak-embed p into D_{a_1} x ... x D_{a_h} for its antichain layer sizes.

    Layer i of the Mirsky decomposition maps onto the middle elements of the
    i-th diamond; the glued bottoms/tops force every cross-layer relation.
    """
    decomp = p.mirsky_decomposition()
    sizes = decomp.sizes
    target = diamond(sizes[0])
    middles: list[list[int]] = [list(range(1, sizes[0] + 1))]
    for a in sizes[1:]:
        offset = target.size
        target = product(target, diamond(a))
        middles.append(list(range(offset, offset + a)))
    images: list[int] = [0] * p.size
    for layer, mids in zip(decomp.layers, middles):
        for elem, mid in zip(sorted(layer), mids):
            images[elem] = mid
    emb = Embedding("weak", "poset", tuple(images))
    check_embedding(p, emb, target)
    return DiamondProductEmbedding(emb, target, sizes)


# --- poset spec DSL -----------------------------------------------------------
#
# chain:3 | diamond:2 | K:2,2,2 | antichain:4 | product:(spec,spec,...) |
# edges:path (a file with a `size N` header and `u < v` lines).


def _split_top_level(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {text!r}")
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise ParseError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def parse_edge_list(text: str) -> Poset:
    size = None
    pairs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("size"):
            try:
                size = int(line.split()[1])
            except (IndexError, ValueError) as exc:
                raise ParseError(f"bad size header: {raw!r}") from exc
        else:
            try:
                lo, hi = (tok.strip() for tok in line.split("<"))
                pairs.append((int(lo), int(hi)))
            except ValueError as exc:
                raise ParseError(f"bad edge line (want 'u < v'): {raw!r}") from exc
    if size is None:
        raise ParseError("edge list needs a 'size N' header line")
    try:
        return poset_from_relations(pairs, size)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_poset_spec(spec: str) -> Poset:
    """Parse the poset DSL used by the CLI and file loaders."""
    spec = spec.strip()
    head, sep, rest = spec.partition(":")
    head = head.strip().lower()
    if not sep:
        raise ParseError(f"poset spec needs a ':', got {spec!r}")
    try:
        if head == "chain":
            return chain(int(rest))
        if head == "antichain":
            return antichain(int(rest))
        if head == "diamond":
            return diamond(int(rest))
        if head == "k":
            return complete_multilevel(tuple(int(t) for t in rest.split(",")))
        if head == "product":
            rest = rest.strip()
            if not (rest.startswith("(") and rest.endswith(")")):
                raise ParseError(f"product spec needs parentheses: {spec!r}")
            parts = _split_top_level(rest[1:-1])
            if len(parts) < 2:
                raise ParseError("product needs at least two factors")
            posets = [parse_poset_spec(part) for part in parts]
            result = posets[0]
            for nxt in posets[1:]:
                result = product(result, nxt)
            return result
        if head == "edges":
            return parse_edge_list(Path(rest.strip()).read_text())
    except InvalidSpec as exc:
        raise ParseError(str(exc)) from exc
    except (ValueError, OSError) as exc:
        raise ParseError(f"cannot parse poset spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown poset kind {head!r}")
