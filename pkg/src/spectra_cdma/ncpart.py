"""Exact combinatorics of noncrossing partitions.

Everything here is integer-exact: enumeration of noncrossing partitions,
Kreweras complementation, the ring-graph ("K-graph") built from a partition,
and the Narayana / class-size-profile counting formulas that weight all the
asymptotic-moment sums in :mod:`spectra_cdma.aem`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence, Tuple


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..n} into disjoint classes, ordered by class minimum."""

    n: int
    classes: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set must be non-empty")
        seen = set()
        for cls in self.classes:
            if not cls:
                raise ValueError("empty class")
            if list(cls) != sorted(cls):
                raise ValueError("class elements must be sorted")
            seen.update(cls)
        if seen != set(range(1, self.n + 1)):
            raise ValueError("classes must partition {1..n}")
        if sum(len(c) for c in self.classes) != self.n:
            raise ValueError("classes overlap")
        mins = [c[0] for c in self.classes]
        if mins != sorted(mins):
            raise ValueError("classes must be ordered by minimum element")

    @classmethod
    def from_classes(cls, n: int, classes: Sequence[Sequence[int]]) -> "SetPartition":
        """Build from unordered classes, normalizing order."""
        norm = sorted((tuple(sorted(c)) for c in classes), key=lambda c: c[0])
        return cls(n, tuple(norm))

    def num_classes(self) -> int:
        return len(self.classes)

    def class_of(self) -> dict:
        """Map element -> index of the class containing it."""
        return {x: i for i, cls in enumerate(self.classes) for x in cls}

    def profile(self) -> "ClassSizeProfile":
        sizes = tuple(sorted((len(c) for c in self.classes), reverse=True))
        return ClassSizeProfile(self.n, sizes)


@dataclass(frozen=True)
class ClassSizeProfile:
    """Non-ascending tuple of positive class sizes summing to n."""

    n: int
    sizes: Tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or sum(self.sizes) != self.n:
            raise ValueError("sizes must be positive and sum to n")
        if any(s < 1 for s in self.sizes):
            raise ValueError("sizes must be positive")
        if any(self.sizes[i] < self.sizes[i + 1] for i in range(len(self.sizes) - 1)):
            raise ValueError("sizes must be non-ascending")

    def num_parts(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class KGraph:
    """Ring graph of a partition: one vertex per class, one edge per ring step.

    Edge r (r = 1..n) joins the classes containing r and r+1 (cyclically,
    n+1 := 1).  ``edge_cycles`` partitions the edge indices {1..n} into the
    edge sets of the graph's cycles; for a noncrossing source partition this
    partition coincides with the Kreweras complement.
    """

    vertex_count: int
    edges: Tuple[Tuple[int, int], ...]
    edge_cycles: Tuple[Tuple[int, ...], ...]

    def cycle_count(self) -> int:
        return len(self.edge_cycles)


def is_noncrossing(p: SetPartition) -> bool:
    """True iff no p1<q1<p2<q2 has p1,p2 in one class and q1,q2 in another."""
    for a, b in combinations(p.classes, 2):
        # merge-scan the two sorted classes; a crossing is exactly an
        # a,b,a,b (or b,a,b,a) label alternation, i.e. >= 4 label switches
        merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
        switches = 0
        last = None
        for _, lab in merged:
            if lab != last:
                switches += 1
                last = lab
        if switches >= 4:
            return False
    return True


def enumerate_nc(n: int) -> Iterator[SetPartition]:
    """Yield every noncrossing partition of {1..n} exactly once.

    Recursive block construction: the class of the smallest free element is
    chosen first (subsets in lexicographic order), then the gaps between its
    consecutive elements are partitioned independently.  Deterministic order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    for classes in _nc_blocks(tuple(range(1, n + 1))):
        yield SetPartition.from_classes(n, classes)


def _nc_blocks(elements: Tuple[int, ...]):
    """All noncrossing partitions of an ordered tuple, as lists of classes."""
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    m = len(rest)
    # choose which of the remaining elements join the first element's class
    for k in range(m + 1):
        for picks in combinations(range(m), k):
            cls = (first,) + tuple(rest[i] for i in picks)
            # gaps between consecutive chosen elements are independent
            gaps = []
            prev = -1
            for i in picks:
                gaps.append(rest[prev + 1 : i])
                prev = i
            gaps.append(rest[prev + 1 :])
            yield from _combine_gaps(cls, gaps, 0, [])


def _combine_gaps(cls, gaps, gi, acc):
    if gi == len(gaps):
        yield [cls] + [c for part in acc for c in part]
        return
    for sub in _nc_blocks(gaps[gi]):
        yield from _combine_gaps(cls, gaps, gi + 1, acc + [sub])


def kreweras(p: SetPartition) -> SetPartition:
    """Kreweras complement of a noncrossing partition, re-indexed to {1..n}.

    Uses the permutation identity: if ring(i) maps each element to the next
    element of its class (cyclically within the class) and shift(i) = i+1
    (mod n), the complement's classes are the cycles of ring^{-1} o shift.
    """
    if not is_noncrossing(p):
        raise ValueError("Kreweras complement is defined only on noncrossing partitions")
    n = p.n
    ring_inv = {}
    for cls in p.classes:
        for i, x in enumerate(cls):
            nxt = cls[(i + 1) % len(cls)]
            ring_inv[nxt] = x
    succ = {i: ring_inv[i % n + 1] for i in range(1, n + 1)}
    classes = []
    seen = set()
    for start in range(1, n + 1):
        if start in seen:
            continue
        cyc = []
        x = start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = succ[x]
        classes.append(cyc)
    return SetPartition.from_classes(n, classes)


def build_kgraph(p: SetPartition) -> KGraph:
    """Ring graph of a partition with its edge partition into cycles.

    The cycles are recovered as the biconnected components of the multigraph
    (self-loops are their own component); for a noncrossing partition every
    component is a cycle and the edge partition equals ``kreweras(p)``.
    """
    n = p.n
    cls_of = p.class_of()
    edges = tuple(
        (cls_of[r], cls_of[r % n + 1]) for r in range(1, n + 1)
    )
    cycles = _biconnected_edge_components(p.num_classes(), edges)
    ordered = sorted((tuple(sorted(c)) for c in cycles), key=lambda c: c[0])
    return KGraph(p.num_classes(), edges, tuple(ordered))


def _biconnected_edge_components(nv: int, edges):
    """Partition edge indices 1..n of a connected multigraph into blocks."""
    loops = [r + 1 for r, (u, v) in enumerate(edges) if u == v]
    comps = [[e] for e in loops]
    adj = [[] for _ in range(nv)]
    for r, (u, v) in enumerate(edges):
        if u != v:
            adj[u].append((v, r + 1))
            adj[v].append((u, r + 1))
    if not any(adj):
        return comps
    # iterative Hopcroft-Tarjan; the graph has no bridges (every edge lies on
    # the closed ring walk), so every non-loop block is a cycle
    disc = [-1] * nv
    low = [0] * nv
    stack = []
    used = set()
    root = next(i for i in range(nv) if adj[i])
    timer = 0
    call = [(root, -1, iter(adj[root]))]
    disc[root] = low[root] = timer
    timer += 1
    while call:
        v, pedge, it = call[-1]
        advanced = False
        for w, eid in it:
            if eid in used:
                continue
            used.add(eid)
            stack.append(eid)
            if disc[w] == -1:
                disc[w] = low[w] = timer
                timer += 1
                call.append((w, eid, iter(adj[w])))
                advanced = True
                break
            low[v] = min(low[v], disc[w])
        if advanced:
            continue
        call.pop()
        if call:
            u = call[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= disc[u]:
                comp = []
                while True:
                    eid = stack.pop()
                    comp.append(eid)
                    if eid == pedge:
                        break
                comps.append(comp)
    return comps


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def narayana(n: int, j: int) -> int:
    """Number of noncrossing partitions of an n-set with exactly j classes."""
    if not 1 <= j <= n:
        raise ValueError(f"class count {j} out of range [1, {n}]")
    return math.comb(n, j) * math.comb(n, j - 1) // n


def multiplicity_f(profile: ClassSizeProfile) -> int:
    """Product over distinct sizes k of (multiplicity of k)!."""
    out = 1
    for mult in Counter(profile.sizes).values():
        out *= math.factorial(mult)
    return out


def count_by_profile(profile: ClassSizeProfile) -> int:
    """Number of noncrossing partitions with the given class-size profile.

    Equals n(n-1)...(n-j+2) / f(sizes) with j parts; summed over all j-part
    profiles this reproduces the Narayana number.
    """
    n, j = profile.n, profile.num_parts()
    num = math.perm(n, j - 1)
    f = multiplicity_f(profile)
    assert num % f == 0
    return num // f


def count_by_profile_pair(
    pi_profile: ClassSizeProfile, kc_profile: ClassSizeProfile
) -> int:
    """Noncrossing partitions with class profile ``pi_profile`` whose Kreweras
    complement has profile ``kc_profile``.

    A j-part partition of an n-set pairs with an (n-j+1)-part complement;
    the count is n (n-j)! (j-1)! / (f(pi) f(kc)).
    """
    n = pi_profile.n
    if kc_profile.n != n:
        raise ValueError("profiles must partition the same n")
    j = pi_profile.num_parts()
    if kc_profile.num_parts() != n - j + 1:
        raise ValueError(
            f"complement of a {j}-part partition has {n - j + 1} parts, "
            f"got {kc_profile.num_parts()}"
        )
    num = n * math.factorial(n - j) * math.factorial(j - 1)
    den = multiplicity_f(pi_profile) * multiplicity_f(kc_profile)
    assert num % den == 0
    return num // den


def profiles(n: int, parts: int) -> Iterator[ClassSizeProfile]:
    """All non-ascending positive integer tuples of given length summing to n,
    in decreasing lexicographic order."""
    if not 1 <= parts <= n:
        raise ValueError(f"part count {parts} out of range [1, {n}]")
    for sizes in _partitions_desc(n, parts, n):
        yield ClassSizeProfile(n, sizes)


def _partitions_desc(n: int, parts: int, cap: int):
    if parts == 1:
        if 1 <= n <= cap:
            yield (n,)
        return
    # first part large enough that the rest can still be filled
    lo = -(-n // parts)  # ceil(n / parts)
    for first in range(min(cap, n - parts + 1), lo - 1, -1):
        for rest in _partitions_desc(n - first, parts - 1, first):
            yield (first,) + rest
