"""Closed-form fully connected model of redundant chain computation.

Construction: ``|V|`` nodes, every ordered pair an edge; ``K`` disjoint
compute layers of ``N`` nodes each plus at least ``N + 1`` relay nodes.
Edges leaving a compute node or the source carry a small capacity ε and
all other edges carry capacity 1.  On this family the round min-cut of
any candidate set of size ``m`` has the exact value ε·m·(|V|−m), which
yields closed-form optimal and no-redundancy delay curves and the
delay/processing-cost trade-off table.

These formulas hold only for this construction; the module is a fixture
family, not a general delay formula.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

from .chain import ChainRequest, Delay
from .netgraph import MICRO, Capacity, CapacityLike, Network, NodeSet, to_micro


@dataclass(frozen=True)
class CompleteGraphParams:
    """Parameters of the fully connected redundant-computation model.

    Attributes:
        total_nodes: |V|, the number of nodes.
        layer_size: N, the number of candidate compute nodes per function.
        chain_length: K, the number of chain functions (>= 1).
        epsilon_micro: ε in micro-units (>= 1), the capacity of every edge
            leaving a compute node or the source.
        payload_micro: L_0 = L_1 = ... = L_K in micro-units.

    Invariants (checked at construction):
        * total_nodes >= K·N + N + 3 — K·N compute nodes, at least N+1
          relays, plus source and destination;
        * ε·a·(|V|−a) < 1 for a in {N, |V|−1} — ε small enough that no
          candidate-set cut can reach the capacity of a single unit edge,
          which is what makes the closed-form min-cut exact.
    """

    total_nodes: int
    layer_size: int
    chain_length: int
    epsilon_micro: int
    payload_micro: int = MICRO

    def __post_init__(self) -> None:
        v, n, k = self.total_nodes, self.layer_size, self.chain_length
        if n < 1:
            raise ValueError(f"layer_size must be >= 1, got {n}")
        if k < 1:
            raise ValueError(f"chain_length must be >= 1, got {k}")
        if v < k * n + n + 3:
            raise ValueError(
                f"total_nodes={v} too small: need >= K*N + N + 3 = {k * n + n + 3} "
                f"(K*N compute nodes, N+1 relays, source, destination)"
            )
        if self.epsilon_micro < 1:
            raise ValueError(f"epsilon_micro must be >= 1, got {self.epsilon_micro}")
        if self.payload_micro < 1:
            raise ValueError(f"payload_micro must be >= 1, got {self.payload_micro}")
        for a in (n, v - 1):
            if self.epsilon_micro * a * (v - a) >= MICRO:
                raise ValueError(
                    f"epsilon too large: eps*{a}*({v}-{a}) = "
                    f"{self.epsilon_micro * a * (v - a)} micro >= 1 unit; "
                    f"the closed-form min-cut needs eps*a*(|V|-a) < 1"
                )

    @classmethod
    def of(
        cls,
        total_nodes: int,
        layer_size: int,
        chain_length: int,
        epsilon: CapacityLike,
        payload: CapacityLike = 1,
    ) -> "CompleteGraphParams":
        """Build params from unit-scale ε and payload scalars."""
        return cls(
            total_nodes=total_nodes,
            layer_size=layer_size,
            chain_length=chain_length,
            epsilon_micro=to_micro(epsilon),
            payload_micro=to_micro(payload),
        )

    @property
    def source(self) -> int:
        return 0

    @property
    def dest(self) -> int:
        return 1

    def layer(self, k: int) -> NodeSet:
        """Candidate node set of chain function k (1-based)."""
        if not 1 <= k <= self.chain_length:
            raise ValueError(f"layer index {k} outside [1,{self.chain_length}]")
        n = self.layer_size
        start = 2 + (k - 1) * n
        return NodeSet.from_iterable(range(start, start + n))

    def relays(self) -> NodeSet:
        """Relay nodes: everything after the compute layers."""
        return NodeSet.from_iterable(
            range(2 + self.chain_length * self.layer_size, self.total_nodes)
        )


def complete_graph_network(params: CompleteGraphParams) -> tuple[Network, ChainRequest]:
    """The fully connected network and its chain request.

    Layout: node 0 is the source, node 1 the destination, layer k occupies
    the next K blocks of N indices, relays fill the remainder.  Every
    ordered node pair is an edge; capacity is ε when the tail is a compute
    node or the source and 1 otherwise (edges into the source included,
    since cut values depend only on out-capacities).

    Returns:
        (network, request) with request sizes L_0..L_K all equal and
        candidate sets the K compute layers.
    """
    v = params.total_nodes
    eps = Capacity(params.epsilon_micro)
    one = Capacity(MICRO)
    layers = [params.layer(k) for k in range(1, params.chain_length + 1)]
    compute_mask = 0
    for layer in layers:
        compute_mask |= layer.mask

    labels = ["s", "d"]
    for k in range(1, params.chain_length + 1):
        labels.extend(f"v{k}_{i}" for i in range(1, params.layer_size + 1))
    labels.extend(f"r{j}" for j in range(1, v - len(labels) + 1))

    edges = []
    for u in range(v):
        cap = eps if u == params.source or (compute_mask >> u) & 1 else one
        for w in range(v):
            if w != u:
                edges.append((u, w, cap))
    net = Network(v, edges, labels)

    payload = Fraction(params.payload_micro, MICRO)
    req = ChainRequest(
        params.source,
        params.dest,
        [payload] * (params.chain_length + 1),
        layers,
    )
    return net, req


def closed_form_mincut(params: CompleteGraphParams, m: int) -> Capacity:
    """Round min-cut attained by any candidate set of size m.

    On this construction, for any candidate set S of m compute nodes (or
    the source alone, m = 1) and any following layer, the minimum cut
    separating them equals the cut of S itself: every edge out of S
    carries ε, so cut(S) = ε·m·(|V|−m), and the ε-smallness invariant
    keeps every competing cut that crosses a unit edge at least as large.

    Args:
        params: model parameters.
        m: candidate set size, 1 <= m <= N.

    Returns:
        The exact capacity ε·m·(|V|−m).

    Raises:
        ValueError: if m is outside [1, N].
    """
    if not 1 <= m <= params.layer_size:
        raise ValueError(f"set size {m} outside [1,{params.layer_size}]")
    return Capacity(params.epsilon_micro * m * (params.total_nodes - m))


def normalized_curves(
    total_nodes: int, chain_length: int, alpha: int
) -> tuple[Fraction, Fraction]:
    """Normalized delay curves D·ε/L_0 as a pure rational identity.

    Returns (optimal, no_redundancy) =
    (1/(|V|−1) + K/(alpha·(|V|−alpha)), (K+1)/(|V|−1)).  Defined for any
    |V| >= 3, K >= 1, 1 <= alpha <= |V|//2 — unlike the constructed
    network, which additionally needs |V| >= K·N + N + 3.  Useful for
    evaluating the large-|V|, large-K asymptotics of the curves.

    Raises:
        ValueError: if any argument is out of range.
    """
    if total_nodes < 3:
        raise ValueError(f"total_nodes must be >= 3, got {total_nodes}")
    if chain_length < 1:
        raise ValueError(f"chain_length must be >= 1, got {chain_length}")
    if not 1 <= alpha <= total_nodes // 2:
        raise ValueError(f"alpha {alpha} outside [1,{total_nodes // 2}]")
    optimal = Fraction(1, total_nodes - 1) + Fraction(
        chain_length, alpha * (total_nodes - alpha)
    )
    no_red = Fraction(chain_length + 1, total_nodes - 1)
    return optimal, no_red


class CompleteGraphDelays(NamedTuple):
    optimal: Delay
    no_redundancy: Delay
    ratio: Fraction


def complete_graph_delays(params: CompleteGraphParams, alpha: int) -> CompleteGraphDelays:
    """Closed-form delays under a processing-cost cap of alpha nodes.

    With every candidate set capped at alpha nodes, the best placement
    uses alpha nodes in every layer (x·(|V|−x) is increasing for
    x <= |V|/2), so

        optimal·ε/L_0       = 1/(|V|−1) + K/(alpha·(|V|−alpha)),
        no_redundancy·ε/L_0 = (K+1)/(|V|−1),

    both exact rationals.  The ratio no_redundancy/optimal approaches
    alpha when K is large and alpha ≪ |V|.

    Args:
        params: model parameters.
        alpha: per-layer node cap, 1 <= alpha <= min(N, |V|//2).

    Returns:
        CompleteGraphDelays(optimal, no_redundancy, ratio) with the two
        delays exact and ratio = no_redundancy/optimal.

    Raises:
        ValueError: if alpha is out of range.
    """
    v, k = params.total_nodes, params.chain_length
    limit = min(params.layer_size, v // 2)
    if not 1 <= alpha <= limit:
        raise ValueError(f"alpha {alpha} outside [1,{limit}]")
    opt_norm, no_red_norm = normalized_curves(v, k, alpha)
    scale = Fraction(params.payload_micro, params.epsilon_micro)  # L_0 / eps
    optimal = scale * opt_norm
    no_red = scale * no_red_norm
    return CompleteGraphDelays(Delay(optimal), Delay(no_red), no_red / optimal)


def tradeoff_rows(
    params: CompleteGraphParams, alphas: Optional[Iterable[int]] = None
) -> list[dict[str, object]]:
    """The delay/processing-cost trade-off table, one row per alpha.

    Columns: ``alpha``, ``optimal_normalized`` (optimal·ε/L_0),
    ``noredundancy_normalized`` ((K+1)/(|V|−1), constant), and ``ratio``.
    Normalized values are exact Fractions; CSV formatting is left to the
    caller.

    Args:
        params: model parameters.
        alphas: cap values to tabulate; defaults to 1..min(N, |V|//2).
    """
    if alphas is None:
        alphas = range(1, min(params.layer_size, params.total_nodes // 2) + 1)
    norm = Fraction(params.epsilon_micro, params.payload_micro)  # eps / L_0
    rows = []
    for alpha in alphas:
        d = complete_graph_delays(params, alpha)
        rows.append(
            {
                "alpha": int(alpha),
                "optimal_normalized": d.optimal.fraction * norm,
                "noredundancy_normalized": d.no_redundancy.fraction * norm,
                "ratio": d.ratio,
            }
        )
    return rows
