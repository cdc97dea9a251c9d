"""Random-linear-coding achievability certificates for transmission rounds.

A round delivers one payload from a set of holders to a set of receivers.
This module reduces it to single-source multicast through the
super-source EN, time-expands every capacity into unit-capacity edges
over a block of T slots, draws uniformly random linear coding
coefficients over GF(2^8) at every node, and checks that the global
coding vectors arriving at each receiver span the full message space.
The resulting certificate is an exact rank statement about the drawn
coefficients, regardless of how the randomness was produced; failed
draws are retried independently.

Certification happens at the coding-vector level: packet lengths and
bit-level delivery are abstracted away.  Only acyclic (restricted)
instances are supported; cyclic instances are refused with a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .chain import ChainRequest, Placement, _check_placement
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

GF_POLY = 0x11B  # x^8 + x^4 + x^3 + x + 1

MAX_BLOCK_LENGTH = 2**20
# refuse expansions whose coding-vector matrix (unit edges x h symbols)
# would be absurdly large — certification is for reasonably grained
# capacities, not arbitrary micro-unit soup
MAX_EXPANSION_CELLS = 2**26


def _build_mul_table() -> np.ndarray:
    """The full 256x256 GF(2^8) multiplication table (peasant method)."""
    a = np.arange(256, dtype=np.uint16)
    lhs, rhs = np.meshgrid(a, a, indexing="ij")
    lhs = lhs.copy()
    rhs = rhs.copy()
    out = np.zeros_like(lhs)
    for _ in range(8):
        out ^= np.where(rhs & 1 == 1, lhs, 0)
        carry = lhs & 0x80
        lhs = (lhs << 1) & 0x1FF
        lhs = np.where(carry != 0, lhs ^ GF_POLY, lhs)
        rhs >>= 1
    return out.astype(np.uint8)


GF_MUL = _build_mul_table()
GF_INV = np.argmax(GF_MUL == 1, axis=1).astype(np.uint8)  # GF_INV[0] unused


def gf256_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2^8) (XOR-accumulated table lookups)."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"incompatible shapes {a.shape} x {b.shape}")
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    return np.bitwise_xor.reduce(GF_MUL[a[:, :, None], b[None, :, :]], axis=1)


def gf256_rank(rows: np.ndarray) -> int:
    """Rank of a matrix over GF(2^8) by Gaussian elimination."""
    m = np.array(rows, dtype=np.uint8, copy=True, ndmin=2)
    n_rows, n_cols = m.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        nz = np.nonzero(m[rank:, col])[0]
        if nz.size == 0:
            continue
        pivot = rank + int(nz[0])
        if pivot != rank:
            m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = GF_MUL[GF_INV[m[rank, col]], m[rank]]
        below = rank + 1 + np.nonzero(m[rank + 1 :, col])[0]
        if below.size:
            m[below] ^= GF_MUL[m[below, col][:, None], m[rank][None, :]]
        rank += 1
    return rank


class UnitDag:
    """Time-expanded unit-capacity multigraph of one transmission round.

    Node indices are those of the round network plus the super-source EN
    as the last index.  Each unit edge carries exactly one field symbol
    per block of `block_length` slots; `origin` maps a unit edge back to
    the network edge it expands (None for an EN attachment).  The graph
    is acyclic by construction and `topo_order` lists the participating
    nodes source-first.
    """

    __slots__ = (
        "node_count",
        "en",
        "tails",
        "heads",
        "origin",
        "topo_order",
        "block_length",
        "h_symbols",
        "_in",
        "_out",
    )

    def __init__(
        self,
        node_count: int,
        en: int,
        tails: Sequence[int],
        heads: Sequence[int],
        origin: Sequence[Optional[int]],
        topo_order: Sequence[int],
        block_length: int,
        h_symbols: int,
    ):
        if not len(tails) == len(heads) == len(origin):
            raise ValueError("tails, heads and origin must have equal length")
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "en", en)
        object.__setattr__(self, "tails", tuple(int(t) for t in tails))
        object.__setattr__(self, "heads", tuple(int(h) for h in heads))
        object.__setattr__(self, "origin", tuple(origin))
        object.__setattr__(self, "topo_order", tuple(int(u) for u in topo_order))
        object.__setattr__(self, "block_length", int(block_length))
        object.__setattr__(self, "h_symbols", int(h_symbols))
        ins: list[list[int]] = [[] for _ in range(node_count)]
        outs: list[list[int]] = [[] for _ in range(node_count)]
        for i, (t, h) in enumerate(zip(self.tails, self.heads)):
            outs[t].append(i)
            ins[h].append(i)
        object.__setattr__(self, "_in", tuple(tuple(x) for x in ins))
        object.__setattr__(self, "_out", tuple(tuple(x) for x in outs))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("UnitDag is immutable")

    @property
    def unit_edge_count(self) -> int:
        return len(self.tails)

    def in_unit_edges(self, node: int) -> tuple[int, ...]:
        return self._in[node]

    def out_unit_edges(self, node: int) -> tuple[int, ...]:
        return self._out[node]

    def __repr__(self) -> str:
        return (
            f"UnitDag(nodes={len(self.topo_order)}, units={self.unit_edge_count}, "
            f"T={self.block_length}, h={self.h_symbols})"
        )


def _rate_micro(rate: CapacityLike) -> int:
    micro = to_micro(rate)
    if micro <= 0:
        raise ValueError(f"rate must be positive, got {rate!r}")
    return micro


def build_unit_dag(
    net: Network, sources: NodeSetLike, targets: NodeSetLike, rate: CapacityLike
) -> UnitDag:
    """The auxiliary multicast instance of a round, expanded to unit edges.

    Attaches EN to every source, keeps only positive-capacity edges lying
    on some EN-to-target path, and picks the least block length T that
    turns every kept capacity into a whole number of unit edges.  A
    finite edge of capacity c expands to c*T unit edges; EN attachments
    and infinite edges expand to h*T unit edges so they never bottleneck
    the message.

    Args:
        net: the round network.
        sources: nodes already holding the payload.
        targets: nodes that must receive it.
        rate: target rate h in capacity units (exact scalar).

    Returns:
        The restricted, expanded DAG with message dimension h*T.

    Raises:
        ValueError: if the restricted instance contains a cycle, if T
            would exceed 2^20, if h*T is not an integer, if the expanded
            coding-vector matrix would be impractically large, or if the
            sets are empty or out of range.
    """
    sources = _as_nodeset(sources)
    targets = _as_nodeset(targets)
    if not sources or not targets:
        raise ValueError("sources and targets must be nonempty")
    for name, s in (("sources", sources), ("targets", targets)):
        if s.mask >> net.node_count:
            raise ValueError(f"{name} contain out-of-range nodes")
    rate_micro = _rate_micro(rate)

    en = net.node_count
    # Auxiliary edge list: positive network edges plus one infinite EN
    # attachment per source (capacity None marks infinite).
    aux: list[tuple[int, int, Optional[int], Optional[int]]] = []
    for idx, e in enumerate(net.edges):
        if e.capacity.is_infinite:
            aux.append((e.tail, e.head, None, idx))
        elif e.capacity.micro > 0:
            aux.append((e.tail, e.head, e.capacity.micro, idx))
    aux.extend((en, u, None, None) for u in sources)

    forward: list[list[int]] = [[] for _ in range(en + 1)]
    backward: list[list[int]] = [[] for _ in range(en + 1)]
    for t, h, _, _ in aux:
        forward[t].append(h)
        backward[h].append(t)

    def _bfs(starts: list[int], adj: list[list[int]]) -> set[int]:
        seen = set(starts)
        queue = list(starts)
        while queue:
            u = queue.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    reach = _bfs([en], forward)
    coreach = _bfs(list(targets), backward)
    kept = [a for a in aux if a[0] in reach and a[1] in coreach]

    nodes = sorted({a[0] for a in kept} | {a[1] for a in kept})
    indeg = {u: 0 for u in nodes}
    out_adj: dict[int, list[int]] = {u: [] for u in nodes}
    for t, h, _, _ in kept:
        indeg[h] += 1
        out_adj[t].append(h)
    ready = sorted(u for u in nodes if indeg[u] == 0)
    topo: list[int] = []
    while ready:
        u = ready.pop()
        topo.append(u)
        for v in out_adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if len(topo) != len(nodes):
        cyclic = sorted(u for u in nodes if indeg[u] > 0)
        names = ", ".join(net.label_of(u) for u in cyclic[:6])
        raise ValueError(
            f"round instance is cyclic: {len(cyclic)} nodes in or behind "
            f"directed cycles ({names}{', ...' if len(cyclic) > 6 else ''}); "
            f"only acyclic rounds can be certified"
        )

    finite_caps = [c for _, _, c, _ in kept if c is not None]
    gcd = math.gcd(MICRO, *finite_caps) if finite_caps else MICRO
    block = MICRO // gcd
    if block > MAX_BLOCK_LENGTH:
        raise ValueError(
            f"block length {block} exceeds the cap {MAX_BLOCK_LENGTH}; "
            f"capacities are too finely grained to time-expand"
        )
    if rate_micro * block % MICRO != 0:
        raise ValueError(
            f"rate {Fraction(rate_micro, MICRO)} is not a whole number of "
            f"symbols for block length {block}"
        )
    h_symbols = rate_micro * block // MICRO

    total_units = sum(
        h_symbols if c is None else c * block // MICRO for _, _, c, _ in kept
    )
    if total_units * max(h_symbols, 1) > MAX_EXPANSION_CELLS:
        raise ValueError(
            f"expansion too large: {total_units} unit edges with "
            f"{h_symbols}-symbol vectors; capacities with micro-scale "
            f"denominators make time-expansion impractical"
        )

    tails: list[int] = []
    heads: list[int] = []
    origin: list[Optional[int]] = []
    for t, h, c, idx in kept:
        n_units = h_symbols if c is None else c * block // MICRO
        tails.extend([t] * n_units)
        heads.extend([h] * n_units)
        origin.extend([idx] * n_units)
    return UnitDag(en + 1, en, tails, heads, origin, topo, block, h_symbols)


@dataclass(frozen=True, eq=False)
class CodingAssignment:
    """One seeded draw of coding coefficients on a UnitDag.

    `global_vectors[i]` is the h-dimensional GF(2^8) coding vector
    carried by unit edge i.  EN attachment units carry the identity basis
    (every source holds the whole payload); every other unit edge carries
    the combination of its tail's in-edge vectors with the uniformly
    random local coefficients in `local_coeffs[i]` (aligned with
    `dag.in_unit_edges(tail)`, None for EN units).
    """

    dag: UnitDag
    seed: int
    attempt: int
    global_vectors: np.ndarray
    local_coeffs: tuple[Optional[np.ndarray], ...]


def draw_assignment(dag: UnitDag, seed: int, attempt: int = 1) -> CodingAssignment:
    """Draw one complete coding assignment (deterministic in seed/attempt)."""
    if seed < 0 or attempt < 0:
        raise ValueError("seed and attempt must be nonnegative")
    rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
    h = dag.h_symbols
    vectors = np.zeros((dag.unit_edge_count, h), dtype=np.uint8)
    coeffs: list[Optional[np.ndarray]] = [None] * dag.unit_edge_count

    for bundle_pos, i in enumerate(dag.out_unit_edges(dag.en)):
        vectors[i, bundle_pos % h] = 1
    for u in dag.topo_order:
        if u == dag.en:
            continue
        in_edges = list(dag.in_unit_edges(u))
        out_edges = list(dag.out_unit_edges(u))
        if not out_edges:
            continue
        local = rng.integers(0, 256, size=(len(out_edges), len(in_edges)), dtype=np.uint8)
        vectors[out_edges] = gf256_matmul(local, vectors[in_edges])
        for row, i in enumerate(out_edges):
            coeffs[i] = local[row]
    return CodingAssignment(dag, seed, attempt, vectors, tuple(coeffs))


def target_rank(assignment: CodingAssignment, target: int) -> int:
    """Rank of the coding vectors on the target's incoming unit edges."""
    in_edges = assignment.dag.in_unit_edges(target)
    if not in_edges:
        return 0
    return gf256_rank(assignment.global_vectors[list(in_edges)])


@dataclass(frozen=True)
class RoundCertificate:
    """Outcome of certifying one round at a fixed rate.

    `h` is the certified message dimension in symbols per block (rate x
    block_length); `target_ranks` reports the last attempt's rank at
    every target.  `applicable` is False for rounds that cannot be
    certified at all (zero min-cut); such rounds count as not achieved.
    """

    h: int
    rate: Optional[Fraction]
    block_length: int
    achieved: bool
    attempts: int
    target_ranks: dict[int, int]
    applicable: bool = True
    note: str = ""


@dataclass(frozen=True)
class PlacementCertificate:
    """Per-round certificates for a placement; achieved iff every round is."""

    rounds: tuple[RoundCertificate, ...]
    achieved: bool


def certify_round(
    net: Network,
    sources: NodeSetLike,
    targets: NodeSetLike,
    h: CapacityLike,
    *,
    seed: int = 0,
    retries: int = 8,
) -> RoundCertificate:
    """Certify that rate `h` from `sources` to `targets` is achievable.

    Draws up to `retries` independent coefficient assignments on the
    expanded round DAG; the round is achieved as soon as one draw gives
    every target full rank h*T.

    Args:
        net: the round network.
        sources: nodes already holding the payload.
        targets: nodes that must receive it.
        h: target rate in capacity units (exact scalar).
        seed: nonnegative base seed; draws use (seed, attempt).
        retries: maximum number of independent draws (>= 1).

    Returns:
        A RoundCertificate with the last attempt's per-target ranks.

    Raises:
        ValueError: if h exceeds the round min-cut (no code can beat the
            cut bound), the restricted instance is cyclic, or the block
            expansion is refused; also for invalid sets or parameters.
    """
    if retries < 1:
        raise ValueError(f"retries must be >= 1, got {retries}")
    sources = _as_nodeset(sources)
    targets = _as_nodeset(targets)
    rate_micro = _rate_micro(h)
    mincut = multicast_mincut(net, sources, targets)
    if not mincut.is_infinite and rate_micro > mincut.micro:
        raise ValueError(
            f"rate {Fraction(rate_micro, MICRO)} exceeds the round min-cut "
            f"{mincut.as_fraction()}; no coding scheme can beat the cut bound"
        )
    dag = build_unit_dag(net, sources, targets, h)

    ranks: dict[int, int] = {}
    achieved = False
    attempt = 0
    for attempt in range(1, retries + 1):
        assignment = draw_assignment(dag, seed, attempt)
        ranks = {t: target_rank(assignment, t) for t in targets}
        if all(r >= dag.h_symbols for r in ranks.values()):
            achieved = True
            break
    return RoundCertificate(
        h=dag.h_symbols,
        rate=Fraction(rate_micro, MICRO),
        block_length=dag.block_length,
        achieved=achieved,
        attempts=attempt,
        target_ranks=ranks,
    )


def certify_placement(
    net: Network,
    req: ChainRequest,
    placement: Placement,
    *,
    seed: int = 0,
    retries: int = 8,
) -> PlacementCertificate:
    """Certify every round of a placement at its own min-cut rate.

    Round k is certified at rate h_k = mincut(S_{k-1}; S_k).  Rounds with
    zero min-cut are reported not applicable (and not achieved); rounds
    whose targets already hold the payload are trivially achieved with no
    transmission.  The placement is achieved iff all K+1 rounds are.

    Raises:
        ValueError: if the placement is invalid for the request, a round
            min-cut is unbounded with targets still to serve, or a round
            instance is refused (cyclic / block expansion).
    """
    _check_placement(req, placement)
    layers = placement.with_boundaries(req)
    rounds: list[RoundCertificate] = []
    for k in range(1, req.chain_length + 2):
        srcs, tgts = layers[k - 1], layers[k]
        mincut = multicast_mincut(net, srcs, tgts)
        if mincut.is_infinite:
            if tgts - srcs:
                raise ValueError(
                    f"round {k} has unbounded min-cut; cannot certify an "
                    f"infinite rate"
                )
            rounds.append(
                RoundCertificate(
                    h=0,
                    rate=None,
                    block_length=1,
                    achieved=True,
                    attempts=0,
                    target_ranks={},
                    note="targets already hold the payload; nothing to send",
                )
            )
            continue
        if mincut.is_zero:
            rounds.append(
                RoundCertificate(
                    h=0,
                    rate=None,
                    block_length=1,
                    achieved=False,
                    attempts=0,
                    target_ranks={},
                    applicable=False,
                    note=f"not applicable: round {k} min-cut is 0 (infeasible)",
                )
            )
            continue
        round_seed = int(np.random.SeedSequence((seed, k)).generate_state(1)[0])
        rounds.append(
            certify_round(
                net, srcs, tgts, mincut, seed=round_seed, retries=retries
            )
        )
    return PlacementCertificate(tuple(rounds), all(r.achieved for r in rounds))
