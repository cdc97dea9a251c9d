"""Service-chain requests, placements, and exact delay evaluation.

A :class:`ChainRequest` is the tuple (source, dest, payload sizes
L_0..L_K, candidate placement sets for the K chain functions).  A
:class:`Placement` selects the computation sets S_1..S_K; the boundary
sets S_0 = {source} and S_{K+1} = {dest} are implicit.  Delivering round
k moves the round payload from every node of S_{k-1} to every node of
S_k, which takes exactly L_{k-1} / mincut(S_{k-1}; S_k) time slots; the
end-to-end delay is the sum over the K+1 rounds.

Delays are exact rationals (`fractions.Fraction` under the hood); the
distinguished :data:`Delay.INFEASIBLE` marks a disconnected round and
absorbs addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Optional, Sequence, Union

from .netgraph import (
    MICRO,
    CapacityLike,
    Network,
    NodeSet,
    NodeSetLike,
    _as_nodeset,
    multicast_mincut,
    to_micro,
)


@total_ordering
class Delay:
    """An exact nonnegative delay in time slots, or the infeasible value.

    Finite delays are exact rationals; ``Delay.INFEASIBLE`` absorbs
    addition and compares greater than every finite delay.
    """

    __slots__ = ("value",)

    INFEASIBLE: "Delay"

    def __init__(self, value: Optional[Union[Fraction, int]]):
        if value is not None:
            value = Fraction(value)
            if value < 0:
                raise ValueError(f"delay must be nonnegative, got {value}")
        object.__setattr__(self, "value", value)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Delay is immutable")

    @classmethod
    def of_ratio(cls, size_micro: int, capacity_micro: int) -> "Delay":
        """Delay of moving `size_micro` payload at `capacity_micro` rate.

        Both arguments are micro-unit counts; the 10^6 scale cancels.  A
        zero capacity yields INFEASIBLE.
        """
        if capacity_micro == 0:
            return cls.INFEASIBLE
        return cls(Fraction(size_micro, capacity_micro))

    @property
    def is_infeasible(self) -> bool:
        return self.value is None

    @property
    def fraction(self) -> Fraction:
        """Exact finite value; raises on INFEASIBLE."""
        if self.value is None:
            raise ValueError("infeasible delay has no finite value")
        return self.value

    def __add__(self, other: "Delay") -> "Delay":
        if not isinstance(other, Delay):
            return NotImplemented
        if self.value is None or other.value is None:
            return Delay.INFEASIBLE
        return Delay(self.value + other.value)

    def __radd__(self, other: object) -> "Delay":
        if other == 0:  # support sum()
            return self
        return NotImplemented

    def __mul__(self, scalar: Union[int, Fraction]) -> "Delay":
        if self.value is None:
            return Delay.INFEASIBLE
        return Delay(self.value * Fraction(scalar))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Delay):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Delay(other)
        if not isinstance(other, Delay):
            return NotImplemented
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __hash__(self) -> int:
        return hash(("Delay", self.value))

    def __float__(self) -> float:
        return float("inf") if self.value is None else float(self.value)

    def __str__(self) -> str:
        if self.value is None:
            return "infeasible"
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self) -> str:
        if self.value is None:
            return "Delay.INFEASIBLE"
        return f"Delay({self.value!r})"


Delay.INFEASIBLE = Delay.__new__(Delay)
object.__setattr__(Delay.INFEASIBLE, "value", None)


class ChainRequest:
    """A chained-function request (s, d, L_0..L_K, candidate sets).

    Args:
        source: index of the source node s.
        dest: index of the destination node d.
        sizes: the K+1 payload sizes L_0..L_K (positive; accepted as any
            exact scalar, stored in micro-units).
        placements: the K candidate node sets, one per chain function;
            each nonempty.  K = len(placements) = len(sizes) - 1; K = 0
            (a plain unicast) is allowed.

    Structural violations (overlapping candidate sets, sets touching
    source/dest) are reported by :func:`validate` as warnings, not raised
    here: delays are evaluated correctly regardless.
    """

    __slots__ = ("source", "dest", "sizes_micro", "placements")

    def __init__(
        self,
        source: int,
        dest: int,
        sizes: Sequence[CapacityLike],
        placements: Sequence[NodeSetLike],
    ):
        source = int(source)
        dest = int(dest)
        if source < 0 or dest < 0:
            raise ValueError("source and dest must be nonnegative node indices")
        if source == dest:
            raise ValueError("source and dest must differ")
        sizes_micro = tuple(to_micro(x) for x in sizes)
        if not sizes_micro:
            raise ValueError("sizes must contain at least L_0")
        if any(x <= 0 for x in sizes_micro):
            raise ValueError("payload sizes must be positive")
        psets = tuple(_as_nodeset(p) for p in placements)
        if len(psets) != len(sizes_micro) - 1:
            raise ValueError(
                f"{len(psets)} placement sets for {len(sizes_micro)} sizes; "
                f"need len(sizes) == K+1 == len(placements)+1"
            )
        if any(not p for p in psets):
            raise ValueError("every candidate placement set must be nonempty")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "dest", dest)
        object.__setattr__(self, "sizes_micro", sizes_micro)
        object.__setattr__(self, "placements", psets)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("ChainRequest is immutable")

    @property
    def chain_length(self) -> int:
        """K, the number of chain functions."""
        return len(self.placements)

    def size_fraction(self, k: int) -> Fraction:
        """L_k in payload units."""
        return Fraction(self.sizes_micro[k], MICRO)

    def __repr__(self) -> str:
        return (
            f"ChainRequest(s={self.source}, d={self.dest}, K={self.chain_length})"
        )


class Placement:
    """Chosen computation sets S_1..S_K for a request."""

    __slots__ = ("sets",)

    def __init__(self, sets: Iterable[NodeSetLike]):
        built = tuple(_as_nodeset(s) for s in sets)
        if any(not s for s in built):
            raise ValueError("every chosen set S_k must be nonempty")
        object.__setattr__(self, "sets", built)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Placement is immutable")

    def with_boundaries(self, req: ChainRequest) -> tuple[NodeSet, ...]:
        """S_0={s}, S_1..S_K, S_{K+1}={d} as one sequence."""
        return (NodeSet.of(req.source),) + self.sets + (NodeSet.of(req.dest),)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Placement):
            return self.sets == other.sets
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Placement", self.sets))

    def __iter__(self):
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, s)) + "}" for s in self.sets)
        return f"Placement({inner})"


def _check_placement(req: ChainRequest, p: Placement) -> None:
    if len(p.sets) != req.chain_length:
        raise ValueError(
            f"placement has {len(p.sets)} sets for a chain of length {req.chain_length}"
        )
    for k, (chosen, allowed) in enumerate(zip(p.sets, req.placements), start=1):
        if not chosen <= allowed:
            raise ValueError(
                f"S_{k} = {chosen!r} is not a subset of the candidate set {allowed!r}"
            )


def round_delay(net: Network, req: ChainRequest, p: Placement, k: int) -> Delay:
    """Delay of transmission round k (1-based, k in 1..K+1).

    Round k delivers the round payload L_{k-1} from S_{k-1} to every node
    of S_k at the round min-cut rate: exactly
    L_{k-1} / mincut(S_{k-1}; S_k) time slots.  Returns INFEASIBLE when
    the min-cut is 0 and a zero delay when it is infinite (targets already
    hold the payload).

    Raises:
        ValueError: if k is out of range or `p` is invalid for `req`.
    """
    _check_placement(req, p)
    if not (1 <= k <= req.chain_length + 1):
        raise ValueError(f"round index {k} outside [1,{req.chain_length + 1}]")
    sets = p.with_boundaries(req)
    mc = multicast_mincut(net, sets[k - 1], sets[k])
    if mc.is_infinite:
        return Delay(0)
    return Delay.of_ratio(req.sizes_micro[k - 1], mc.micro)


def end_to_end_delay(net: Network, req: ChainRequest, p: Placement) -> Delay:
    """Total delay: the exact sum of all K+1 round delays."""
    _check_placement(req, p)
    total = Delay(0)
    for k in range(1, req.chain_length + 2):
        total = total + round_delay(net, req, p, k)
        if total.is_infeasible:
            return Delay.INFEASIBLE
    return total


@dataclass(frozen=True)
class ValidationReport:
    """Findings from :func:`validate`: hard errors and advisory warnings."""

    errors: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(net: Network, req: ChainRequest) -> ValidationReport:
    """Check a request against a network.

    Hard errors (the request cannot be evaluated): node indices out of
    range.  Warnings (delays still evaluate correctly): candidate sets
    overlapping each other or touching source/dest — the one-function-per
    -node assumption is expected to be pre-applied by node splitting — and
    stages unreachable from the source (everything will be infeasible).
    """
    errors: list[str] = []
    warnings: list[str] = []
    n = net.node_count

    for name, v in (("source", req.source), ("dest", req.dest)):
        if not (0 <= v < n):
            errors.append(f"{name} index {v} outside [0,{n})")
    for k, pset in enumerate(req.placements, start=1):
        if pset.mask >> n:
            errors.append(f"candidate set {k} contains node indices outside [0,{n})")
    if errors:
        return ValidationReport(tuple(errors), tuple(warnings))

    sd = NodeSet.of(req.source, req.dest)
    for k, pset in enumerate(req.placements, start=1):
        if pset & sd:
            warnings.append(
                f"candidate set {k} contains source/dest node(s) "
                f"{sorted(pset & sd)}"
            )
    for i in range(len(req.placements)):
        for j in range(i + 1, len(req.placements)):
            both = req.placements[i] & req.placements[j]
            if both:
                warnings.append(
                    f"candidate sets {i + 1} and {j + 1} overlap on {sorted(both)} "
                    f"(node splitting assumed pre-applied)"
                )

    # Reachability: can each stage (and the destination) be fed at all?
    reach = _reachable_from(net, req.source)
    for k, pset in enumerate(req.placements, start=1):
        if not (pset & reach):
            warnings.append(
                f"no node of candidate set {k} is reachable from the source; "
                f"all placements will be infeasible"
            )
    if req.dest not in reach:
        warnings.append("destination is not reachable from the source")
    return ValidationReport(tuple(errors), tuple(warnings))


def _reachable_from(net: Network, start: int) -> NodeSet:
    """Nodes reachable from `start` along positive-capacity edges."""
    adj: dict[int, list[int]] = {}
    for e in net.edges:
        if e.capacity.is_infinite or e.capacity.micro > 0:
            adj.setdefault(e.tail, []).append(e.head)
    seen = 1 << start
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if not (seen >> v) & 1:
                seen |= 1 << v
                stack.append(v)
    return NodeSet(seen)
