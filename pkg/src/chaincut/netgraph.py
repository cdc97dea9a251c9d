"""Directed capacitated graphs: cuts, max-flow, and round min-cuts.

A :class:`Network` is a directed multigraph with exact fixed-point edge
capacities (integer micro-units, one micro-unit = 10^-6 capacity units).
The module provides the cut value of a node set, exact max-flow between
node pairs, the super-source ("EN") auxiliary construction that reduces a
transmission round to single-source multicast, and the resulting round
min-cut quantity ``mincut(sources; targets)`` — the minimum cut value over
all node sets containing every source and missing at least one target.

All values are immutable after construction and all operations are pure
functions, so concurrent use against a shared :class:`Network` is safe.
"""

from __future__ import annotations

import decimal
from decimal import Decimal
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from ._dinic import batch_maxflow

MICRO = 10**6

CapacityLike = Union["Capacity", int, float, str, Fraction, Decimal]


def _round_half_even(x: Fraction) -> int:
    """Round an exact rational to the nearest integer, ties to even."""
    q, r = divmod(x.numerator, x.denominator)
    twice = 2 * r
    if twice > x.denominator or (twice == x.denominator and q % 2 != 0):
        q += 1
    return q


def to_micro(value: CapacityLike) -> int:
    """Convert a scalar to an exact micro-unit count (round-half-even).

    Accepts int, float, numeric str, Decimal, Fraction, or a finite
    Capacity.  Raises ValueError for negative or non-finite input.
    """
    if isinstance(value, Capacity):
        if value.is_infinite:
            raise ValueError("cannot convert infinite capacity to micro-units")
        return value.micro  # type: ignore[return-value]
    if isinstance(value, str):
        try:
            value = Decimal(value)
        except decimal.InvalidOperation:
            raise ValueError(f"not a numeric string: {value!r}") from None
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value: {value!r}")
        frac = Fraction(value)
    elif isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value: {value!r}")
        frac = Fraction(value)
    elif isinstance(value, (int, np.integer)):
        frac = Fraction(int(value))
    elif isinstance(value, Fraction):
        frac = value
    else:
        raise TypeError(f"cannot interpret {value!r} as a capacity value")
    if frac < 0:
        raise ValueError(f"negative value: {value!r}")
    return _round_half_even(frac * MICRO)


@total_ordering
class Capacity:
    """A nonnegative capacity in exact fixed point, or the infinite value.

    Finite capacities are stored as an integer count of micro-units so cut
    sums and flow arithmetic stay exact.  ``Capacity.INFINITE`` absorbs
    addition and compares greater than every finite capacity.
    """

    __slots__ = ("micro",)

    INFINITE: "Capacity"

    def __init__(self, micro: Optional[int]):
        if micro is not None:
            if not isinstance(micro, (int, np.integer)):
                raise TypeError(f"micro must be an int or None, got {micro!r}")
            micro = int(micro)
            if micro < 0:
                raise ValueError(f"capacity must be nonnegative, got {micro} micro")
        object.__setattr__(self, "micro", micro)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Capacity is immutable")

    @classmethod
    def of(cls, value: CapacityLike) -> "Capacity":
        """Coerce a scalar (or pass through a Capacity) to a Capacity."""
        if isinstance(value, Capacity):
            return value
        if isinstance(value, float) and value == float("inf"):
            return cls.INFINITE
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "infinite"):
            return cls.INFINITE
        return cls(to_micro(value))

    @classmethod
    def from_micro(cls, micro: int) -> "Capacity":
        return cls(micro)

    @property
    def is_infinite(self) -> bool:
        return self.micro is None

    @property
    def is_zero(self) -> bool:
        return self.micro == 0

    def as_fraction(self) -> Fraction:
        """Exact value in capacity units; raises on the infinite value."""
        if self.micro is None:
            raise ValueError("infinite capacity has no finite value")
        return Fraction(self.micro, MICRO)

    def __float__(self) -> float:
        return float("inf") if self.micro is None else self.micro / MICRO

    def __add__(self, other: "Capacity") -> "Capacity":
        if not isinstance(other, Capacity):
            return NotImplemented
        if self.micro is None or other.micro is None:
            return Capacity.INFINITE
        return Capacity(self.micro + other.micro)

    def __radd__(self, other: object) -> "Capacity":
        if other == 0:  # support sum()
            return self
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Capacity):
            return self.micro == other.micro
        return NotImplemented

    def __lt__(self, other: "Capacity") -> bool:
        if not isinstance(other, Capacity):
            return NotImplemented
        if self.micro is None:
            return False
        if other.micro is None:
            return True
        return self.micro < other.micro

    def __hash__(self) -> int:
        return hash(("Capacity", self.micro))

    def __repr__(self) -> str:
        if self.micro is None:
            return "Capacity.INFINITE"
        return f"Capacity({self.micro} micro = {self.micro / MICRO:g})"


Capacity.INFINITE = Capacity.__new__(Capacity)
object.__setattr__(Capacity.INFINITE, "micro", None)


class NodeSet:
    """An immutable set of node indices stored as a bitmask.

    Set algebra (union, intersection, difference, subset tests) is exact
    integer bit arithmetic; iteration yields indices in ascending order.
    """

    __slots__ = ("mask",)

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise ValueError("mask must be nonnegative")
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("NodeSet is immutable")

    @classmethod
    def of(cls, *nodes: int) -> "NodeSet":
        return cls.from_iterable(nodes)

    @classmethod
    def from_iterable(cls, nodes: Iterable[int]) -> "NodeSet":
        mask = 0
        for n in nodes:
            n = int(n)
            if n < 0:
                raise ValueError(f"negative node index: {n}")
            mask |= 1 << n
        return cls(mask)

    def __contains__(self, node: int) -> bool:
        return node >= 0 and (self.mask >> node) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(self.mask | other.mask)

    def __and__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(self.mask & other.mask)

    def __sub__(self, other: "NodeSet") -> "NodeSet":
        return NodeSet(self.mask & ~other.mask)

    def __le__(self, other: "NodeSet") -> bool:
        return self.mask & ~other.mask == 0

    def add(self, node: int) -> "NodeSet":
        return NodeSet(self.mask | (1 << node))

    def max_node(self) -> int:
        if self.mask == 0:
            raise ValueError("empty NodeSet has no maximum")
        return self.mask.bit_length() - 1

    def nodes(self) -> tuple[int, ...]:
        return tuple(self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NodeSet):
            return self.mask == other.mask
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("NodeSet", self.mask))

    def __repr__(self) -> str:
        return "NodeSet{" + ", ".join(str(n) for n in self) + "}"


NodeSetLike = Union[NodeSet, Iterable[int]]


def _as_nodeset(value: NodeSetLike) -> NodeSet:
    if isinstance(value, NodeSet):
        return value
    return NodeSet.from_iterable(value)


class Edge(NamedTuple):
    tail: int
    head: int
    capacity: Capacity


class Network:
    """A directed multigraph with exact fixed-point capacities.

    Parallel edges are permitted (they sum in cuts and flows); self-loops
    are not.  Zero-capacity edges are allowed and behave as absent for
    flow purposes.  Instances are immutable; the internal flow engine is a
    lazily built, idempotent cache, so sharing across threads is safe.
    """

    __slots__ = ("node_count", "node_labels", "edges", "_engine")

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple],
        node_labels: Optional[Sequence[str]] = None,
    ):
        if node_count <= 0:
            raise ValueError(f"node_count must be positive, got {node_count}")
        built = []
        for e in edges:
            tail, head, cap = e
            tail = int(tail)
            head = int(head)
            if not (0 <= tail < node_count) or not (0 <= head < node_count):
                raise ValueError(f"edge ({tail},{head}) has node index outside [0,{node_count})")
            if tail == head:
                raise ValueError(f"self-loop at node {tail} not allowed")
            built.append(Edge(tail, head, Capacity.of(cap)))
        labels: Optional[tuple[str, ...]] = None
        if node_labels is not None:
            labels = tuple(str(x) for x in node_labels)
            if len(labels) != node_count:
                raise ValueError(
                    f"node_labels has {len(labels)} entries for {node_count} nodes"
                )
            if len(set(labels)) != node_count:
                raise ValueError("node_labels must be unique")
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "node_labels", labels)
        object.__setattr__(self, "edges", tuple(built))
        object.__setattr__(self, "_engine", None)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Network is immutable")

    def label_of(self, node: int) -> str:
        if self.node_labels is not None:
            return self.node_labels[node]
        return str(node)

    def index_of(self, label: str) -> int:
        """Node index for a label (or a stringified index when unlabeled)."""
        if self.node_labels is not None:
            try:
                return self.node_labels.index(label)
            except ValueError:
                raise KeyError(f"unknown node label {label!r}") from None
        try:
            idx = int(label)
        except ValueError:
            raise KeyError(f"unknown node label {label!r}") from None
        if not (0 <= idx < self.node_count):
            raise KeyError(f"node index {idx} outside [0,{self.node_count})")
        return idx

    def all_nodes(self) -> NodeSet:
        return NodeSet((1 << self.node_count) - 1)

    def finite_capacity_sum(self) -> int:
        """Sum of all finite edge capacities in micro-units."""
        return sum(e.capacity.micro for e in self.edges if not e.capacity.is_infinite)

    def engine(self) -> "FlowEngine":
        """The (lazily built, cached) max-flow engine for this network."""
        eng = self._engine
        if eng is None:
            eng = FlowEngine(self)
            object.__setattr__(self, "_engine", eng)
        return eng

    def __repr__(self) -> str:
        return f"Network(nodes={self.node_count}, edges={len(self.edges)})"


class FlowEngine:
    """Prebuilt residual arrays for repeated exact max-flow queries.

    The residual graph contains every network arc with its reverse, plus a
    reserved super-source node EN with a (normally closed) arc to every
    network node.  A query opens the EN arcs for a chosen source set at the
    sentinel capacity and runs Dinic to each requested sink.  Results are
    micro-unit flow values; values exceeding the sum of finite capacities
    mean "infinite" (only possible through infinite-capacity edges).
    """

    def __init__(self, net: Network):
        n = net.node_count
        self.net = net
        self.en = n
        self.finite_sum = net.finite_capacity_sum()
        self.sentinel = self.finite_sum + 1

        arc_tail = []
        arc_head = []
        arc_cap = []

        def push(t: int, h: int, c: int) -> None:
            arc_tail.append(t)
            arc_head.append(h)
            arc_cap.append(c)

        for e in net.edges:
            c = self.sentinel if e.capacity.is_infinite else e.capacity.micro
            push(e.tail, e.head, c)
            push(e.head, e.tail, 0)
        en_arc_original = np.empty(n, dtype=np.int64)
        for u in range(n):
            en_arc_original[u] = len(arc_tail)
            push(self.en, u, 0)
            push(u, self.en, 0)

        tails = np.asarray(arc_tail, dtype=np.int64)
        order = np.argsort(tails, kind="stable")
        pos = np.empty_like(order)
        pos[order] = np.arange(order.size)

        self.arc_to = np.asarray(arc_head, dtype=np.int64)[order]
        self.base_cap = np.asarray(arc_cap, dtype=np.int64)[order]
        pair_original = np.arange(order.size, dtype=np.int64) ^ 1
        self.arc_pair = pos[pair_original][order]
        counts = np.bincount(tails, minlength=n + 1)
        self.indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        self.en_arc = pos[en_arc_original]

    def flows_from_set(self, source_mask: int, targets: Sequence[int]) -> list[int]:
        """Max-flow micro-values from the source set to each target node.

        The source set is attached through the super-source EN, so a value
        is the round min-cut contribution mincut(sources; {target}).
        """
        if source_mask <= 0:
            raise ValueError("source set must be nonempty")
        if source_mask >> self.net.node_count:
            raise ValueError("source set contains out-of-range nodes")
        sel = [self.en_arc[u] for u in NodeSet(source_mask)]
        targets_arr = np.asarray(list(targets), dtype=np.int64)
        if targets_arr.size == 0:
            return []
        out = batch_maxflow(
            self.indptr,
            self.arc_to,
            self.arc_pair,
            self.base_cap,
            np.asarray(sel, dtype=np.int64),
            np.int64(self.sentinel),
            np.int64(self.en),
            targets_arr,
        )
        return [int(v) for v in out]

    def classify(self, micro: int) -> Capacity:
        """Map a raw flow value to a Capacity (infinite above finite sum)."""
        if micro > self.finite_sum:
            return Capacity.INFINITE
        return Capacity(micro)


def cut_value(net: Network, s: NodeSetLike) -> Capacity:
    """Total capacity of edges leaving node set `s`.

    Args:
        net: the network.
        s: the node set (NodeSet or iterable of indices) whose outgoing
            edge capacities are summed.

    Returns:
        The exact sum of w(e) over edges e=(u,v) with u in s, v not in s;
        ``Capacity.INFINITE`` if any such edge is infinite.

    Raises:
        ValueError: if `s` contains an out-of-range node index.
    """
    s = _as_nodeset(s)
    if s.mask >> net.node_count:
        raise ValueError(
            f"node set {s!r} contains indices outside [0,{net.node_count})"
        )
    mask = s.mask
    total = 0
    for e in net.edges:
        if (mask >> e.tail) & 1 and not (mask >> e.head) & 1:
            if e.capacity.is_infinite:
                return Capacity.INFINITE
            total += e.capacity.micro
    return Capacity(total)


def max_flow(net: Network, source: int, sink: int) -> Capacity:
    """Exact max-flow value from `source` to `sink`.

    Equals the minimum of cut_value over all node sets containing `source`
    but not `sink`.  Infinite-capacity edges are handled with a sentinel
    exceeding the sum of finite capacities; the result is reported
    ``Capacity.INFINITE`` iff it exceeds that sum.

    Raises:
        ValueError: if source == sink or either index is out of range.
    """
    if source == sink:
        raise ValueError("source and sink must differ")
    for name, v in (("source", source), ("sink", sink)):
        if not (0 <= v < net.node_count):
            raise ValueError(f"{name} index {v} outside [0,{net.node_count})")
    eng = net.engine()
    value = eng.flows_from_set(1 << source, [sink])[0]
    return eng.classify(value)


def build_auxiliary_multicast(net: Network, sources: NodeSetLike) -> tuple[Network, int]:
    """Attach the super-source EN with infinite-capacity edges to `sources`.

    Returns a copy of `net` with one extra node EN (the new last index) and
    one infinite-capacity edge EN→u per source node u; original node
    indices are preserved.

    Raises:
        ValueError: if `sources` is empty or out of range.
    """
    sources = _as_nodeset(sources)
    if not sources:
        raise ValueError("sources must be nonempty")
    if sources.mask >> net.node_count:
        raise ValueError("sources contain out-of-range nodes")
    en = net.node_count
    edges = [(e.tail, e.head, e.capacity) for e in net.edges]
    edges.extend((en, u, Capacity.INFINITE) for u in sources)
    labels = None
    if net.node_labels is not None:
        en_label = "EN"
        suffix = 0
        while en_label in net.node_labels:
            en_label = f"EN{suffix}"
            suffix += 1
        labels = list(net.node_labels) + [en_label]
    return Network(net.node_count + 1, edges, labels), en


def multicast_mincut(net: Network, sources: NodeSetLike, targets: NodeSetLike) -> Capacity:
    """The round min-cut mincut(sources; targets).

    Equals the minimum of cut_value(S) over all S with sources ⊆ S and
    targets ⊄ S — computed as the minimum single-sink max-flow from the
    super-source attachment over targets outside the sources.  Targets
    already inside `sources` are delivered at zero cost and contribute
    infinity, so if targets ⊆ sources the result is ``Capacity.INFINITE``.
    A result of 0 signals an infeasible round (no path), not an error.

    Raises:
        ValueError: if either set is empty or out of range.
    """
    sources = _as_nodeset(sources)
    targets = _as_nodeset(targets)
    if not sources or not targets:
        raise ValueError("sources and targets must be nonempty")
    for name, s in (("sources", sources), ("targets", targets)):
        if s.mask >> net.node_count:
            raise ValueError(f"{name} contain out-of-range nodes")
    remaining = targets - sources
    if not remaining:
        return Capacity.INFINITE
    eng = net.engine()
    values = eng.flows_from_set(sources.mask, list(remaining))
    return eng.classify(min(values))


def mincut_bruteforce(net: Network, sources: NodeSetLike, targets: NodeSetLike) -> Capacity:
    """Round min-cut by exhaustive enumeration of all node sets.

    Independent oracle for :func:`multicast_mincut`: scans every S ⊆ V with
    sources ⊆ S and targets ⊄ S and returns the minimum cut_value(S).

    Raises:
        ValueError: if net.node_count > 20 (exponential enumeration), or
            empty/out-of-range sets.
    """
    if net.node_count > 20:
        raise ValueError(
            f"mincut_bruteforce refuses networks with more than 20 nodes "
            f"(got {net.node_count}): 2^n enumeration"
        )
    sources = _as_nodeset(sources)
    targets = _as_nodeset(targets)
    if not sources or not targets:
        raise ValueError("sources and targets must be nonempty")
    for name, s in (("sources", sources), ("targets", targets)):
        if s.mask >> net.node_count:
            raise ValueError(f"{name} contain out-of-range nodes")

    finite_sum = net.finite_capacity_sum()
    sentinel = finite_sum + 1
    tails = np.asarray([e.tail for e in net.edges], dtype=np.int64)
    heads = np.asarray([e.head for e in net.edges], dtype=np.int64)
    caps = np.asarray(
        [sentinel if e.capacity.is_infinite else e.capacity.micro for e in net.edges],
        dtype=np.int64,
    )

    src = sources.mask
    tgt = targets.mask
    best: Optional[int] = None
    for mask in range(1 << net.node_count):
        if mask & src != src or mask & tgt == tgt:
            continue
        if len(tails):
            tin = (mask >> tails) & 1
            hin = (mask >> heads) & 1
            cut = int(caps[(tin == 1) & (hin == 0)].sum())
        else:
            cut = 0
        if best is None or cut < best:
            best = cut
    if best is None or best > finite_sum:
        return Capacity.INFINITE
    return Capacity(best)
