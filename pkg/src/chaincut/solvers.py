"""Placement optimizers for chained-function requests.

Five solvers over a shared layered dynamic program:

* :func:`solve_exhaustive` — exact global optimum by depth-first
  enumeration of every placement sequence (the oracle; refuses large
  state spaces).
* :func:`solve_no_redundancy` — optimal singleton placements (the
  baseline; equals the α-optimal solver at α=1).
* :func:`solve_alpha_optimal` — exact optimum over placements with
  |S_k| ≤ α via one DP pass over all ≤α-subsets per layer.
* :func:`solve_greedy` — iterated DP over families that grow by one node
  per layer per iteration, until the delay stops strictly decreasing.
* :func:`solve_alpha_greedy` — the greedy iteration, but a layer whose
  chosen set has reached α elements keeps its family, so every returned
  set has at most α nodes.

The DP evaluates each transition cost C(T) + L_{k-1}/mincut(T; S) with a
vectorized float pre-pass and resolves the argmin (and ties) in exact
rational arithmetic over the float shortlist, so results are exact and
deterministic: ties prefer the smaller-cardinality set, then the
lexicographically smallest sorted node tuple.

Per-target max-flow values are memoized in a :class:`MincutCache` keyed by
(source-set mask, target node); a cache may be shared across solver calls
on the same network (inserts are idempotent), which the α-sweep and the
greedy iterations exploit heavily.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .chain import ChainRequest, Delay, Placement, validate
from .netgraph import Network, NodeSet

#: Relative width of the float shortlist around the float minimum.  Float
#: costs are correctly-rounded images of exact rationals, so the true
#: argmin lies within a few ulp (~1e-16 relative) of the float minimum;
#: 1e-9 leaves six orders of magnitude of slack.
_SHORTLIST_MARGIN = 1e-9


@dataclass
class SolveStats:
    """Instrumentation counters for one solve call."""

    mincut_evals: int = 0
    flow_calls: int = 0
    dp_states: int = 0
    greedy_iterations: int = 0


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solver run.

    `delay` always equals the end-to-end delay of `placement`; `per_round`
    holds the K+1 round delays and sums to `delay`.  For an infeasible
    instance the placement is still populated (the tie-break choice among
    the evaluated candidates) and `note` explains which round failed.
    """

    algorithm: str
    placement: Placement
    delay: Delay
    per_round: tuple[Delay, ...]
    stats: SolveStats
    note: str = ""


class MincutCache:
    """Memo table of per-target max-flow values on one network.

    Keys are (source-set bitmask, target node); values are raw micro-unit
    flows (values above the finite capacity sum mean "infinite").  Safe to
    share between solver calls: inserts are idempotent pure memo writes.
    """

    def __init__(self, net: Network):
        self.net = net
        self.engine = net.engine()
        self._flow: dict[tuple[int, int], int] = {}

    @property
    def finite_sum(self) -> int:
        return self.engine.finite_sum

    def flows(self, source_mask: int, targets: Sequence[int], stats: Optional[SolveStats] = None) -> list[int]:
        """Flow values from the source set to each target, memoized."""
        table = self._flow
        missing = [v for v in targets if (source_mask, v) not in table]
        if missing:
            values = self.engine.flows_from_set(source_mask, missing)
            for v, val in zip(missing, values):
                table[(source_mask, v)] = val
            if stats is not None:
                stats.flow_calls += len(missing)
        return [table[(source_mask, v)] for v in targets]

    def mincut_micro(self, source_mask: int, target_mask: int, stats: Optional[SolveStats] = None) -> int:
        """Round min-cut in micro-units; > finite_sum encodes infinite."""
        remaining = target_mask & ~source_mask
        if remaining == 0:
            return self.finite_sum + 1
        return min(self.flows(source_mask, list(NodeSet(remaining)), stats))


def _nodes_tuple(mask: int) -> tuple[int, ...]:
    return tuple(NodeSet(mask))


def _canonical(masks) -> list[int]:
    """Deduplicate and order set masks by (cardinality, node tuple)."""
    return sorted(set(masks), key=lambda m: (m.bit_count(), _nodes_tuple(m)))


def _subsets_upto(nodes: tuple[int, ...], alpha: int) -> list[int]:
    """All nonempty subsets of `nodes` with ≤ alpha elements, canonical order."""
    out = []
    for size in range(1, min(alpha, len(nodes)) + 1):
        for combo in combinations(nodes, size):
            mask = 0
            for v in combo:
                mask |= 1 << v
            out.append(mask)
    return out


@dataclass
class _DpOutcome:
    delay: Delay
    placement: Placement
    failed_round: Optional[int]  # first 1-based round where every candidate was infeasible


def _layer_nodes(req: ChainRequest) -> list[tuple[int, ...]]:
    """Sorted candidate nodes per layer 0..K+1 (boundaries are {s},{d})."""
    layers = [(req.source,)]
    layers.extend(tuple(p) for p in req.placements)
    layers.append((req.dest,))
    return layers


def _run_dp(
    cache: MincutCache,
    req: ChainRequest,
    families: list[list[int]],
    stats: SolveStats,
) -> _DpOutcome:
    """One layered DP pass over the given per-layer families of set masks.

    families[k] lists candidate S_k masks in canonical order for layers
    0..K+1 (families[0] = [{s}], families[K+1] = [{d}]).  Returns the
    optimum C({d}) with its arg placement under the deterministic
    tie-break.
    """
    layers = _layer_nodes(req)
    finite_sum = cache.finite_sum
    n_layers = len(families)

    # DP state for the previous layer.
    prev_masks = families[0]
    prev_exact: list[Optional[Fraction]] = [Fraction(0)]
    prev_float = np.zeros(1)
    backptr: list[list[int]] = [[-1]]
    failed_round: Optional[int] = None
    stats.dp_states += 1

    for k in range(1, n_layers):
        cur_masks = families[k]
        cols = layers[k]
        col_of = {v: j for j, v in enumerate(cols)}
        n_prev = len(prev_masks)
        n_cur = len(cur_masks)
        L_micro = req.sizes_micro[k - 1]
        stats.dp_states += n_cur
        stats.mincut_evals += n_prev * n_cur

        # Per-target flow matrix for every useful predecessor set.
        M = np.ones((n_prev, len(cols)), dtype=np.int64)
        for i, tmask in enumerate(prev_masks):
            if prev_exact[i] is None:
                continue  # infeasible predecessor: row never selected
            inside = [v for v in cols if (tmask >> v) & 1]
            outside = [v for v in cols if not (tmask >> v) & 1]
            if outside:
                vals = cache.flows(tmask, outside, stats)
                for v, val in zip(outside, vals):
                    M[i, col_of[v]] = val
            for v in inside:
                M[i, col_of[v]] = finite_sum + 1

        cur_exact: list[Optional[Fraction]] = []
        cur_float = np.empty(n_cur)
        cur_back: list[int] = []
        Lf = float(L_micro)

        for j, smask in enumerate(cur_masks):
            sel = [col_of[v] for v in _nodes_tuple(smask)]
            mvec = M[:, sel].min(axis=1) if len(sel) > 1 else M[:, sel[0]]
            with np.errstate(divide="ignore"):
                round_f = np.where(mvec > finite_sum, 0.0, Lf / mvec)
            total_f = prev_float + round_f
            best_f = total_f.min()
            if np.isinf(best_f):
                # Every predecessor chain is infeasible for this set.
                cur_exact.append(None)
                cur_float[j] = np.inf
                cur_back.append(0)
                continue
            margin = abs(best_f) * _SHORTLIST_MARGIN + 1e-300
            shortlist = np.nonzero(total_f <= best_f + margin)[0]
            best_val: Optional[Fraction] = None
            best_i = -1
            for i in shortlist:
                i = int(i)
                base = prev_exact[i]
                if base is None:
                    continue
                m = int(mvec[i])
                if m == 0:
                    continue
                cost = base if m > finite_sum else base + Fraction(L_micro, m)
                if best_val is None or cost < best_val:
                    best_val = cost
                    best_i = i
            if best_val is None:  # defensive: resolve without the float filter
                for i in range(n_prev):
                    base = prev_exact[i]
                    m = int(mvec[i])
                    if base is None or m == 0:
                        continue
                    cost = base if m > finite_sum else base + Fraction(L_micro, m)
                    if best_val is None or cost < best_val:
                        best_val = cost
                        best_i = i
            if best_val is None:
                cur_exact.append(None)
                cur_float[j] = np.inf
                cur_back.append(0)
                continue
            cur_exact.append(best_val)
            cur_float[j] = float(best_val)
            cur_back.append(best_i)

        if all(x is None for x in cur_exact) and failed_round is None:
            failed_round = k
        prev_masks = cur_masks
        prev_exact = cur_exact
        prev_float = cur_float
        backptr.append(cur_back)

    # Reconstruct the chosen sequence from the destination layer.
    final = prev_exact[0]
    chosen: list[int] = []
    idx = 0
    for k in range(n_layers - 1, 0, -1):
        chosen.append(families[k][idx])
        idx = backptr[k][idx]
        if idx < 0:
            idx = 0
    chosen.reverse()
    placement = Placement(NodeSet(m) for m in chosen[:-1])  # drop {d}
    delay = Delay.INFEASIBLE if final is None else Delay(final)
    return _DpOutcome(delay=delay, placement=placement, failed_round=failed_round)


def _per_round_delays(
    cache: MincutCache, req: ChainRequest, placement: Placement, stats: SolveStats
) -> tuple[Delay, ...]:
    sets = placement.with_boundaries(req)
    out = []
    for k in range(1, len(sets)):
        m = cache.mincut_micro(sets[k - 1].mask, sets[k].mask, stats)
        if m > cache.finite_sum:
            out.append(Delay(0))
        elif m == 0:
            out.append(Delay.INFEASIBLE)
        else:
            out.append(Delay.of_ratio(req.sizes_micro[k - 1], m))
    return tuple(out)


def _prepare(net: Network, req: ChainRequest, cache: Optional[MincutCache]) -> MincutCache:
    report = validate(net, req)
    if not report.ok:
        raise ValueError("invalid request: " + "; ".join(report.errors))
    if cache is None:
        cache = MincutCache(net)
    elif cache.net is not net:
        raise ValueError("cache was built for a different network")
    return cache


def _finish(
    algorithm: str,
    cache: MincutCache,
    req: ChainRequest,
    outcome: _DpOutcome,
    stats: SolveStats,
) -> SolveResult:
    per_round = _per_round_delays(cache, req, outcome.placement, stats)
    note = ""
    if outcome.delay.is_infeasible:
        if outcome.failed_round is not None:
            note = (
                f"infeasible: round {outcome.failed_round} has min-cut 0 for "
                f"every candidate set pair"
            )
        else:
            note = "infeasible: some round has min-cut 0 along every candidate chain"
    return SolveResult(
        algorithm=algorithm,
        placement=outcome.placement,
        delay=outcome.delay,
        per_round=per_round,
        stats=stats,
        note=note,
    )


def _boundary_families(req: ChainRequest, middle: list[list[int]]) -> list[list[int]]:
    return [[1 << req.source]] + middle + [[1 << req.dest]]


def solve_alpha_optimal(
    net: Network,
    req: ChainRequest,
    alpha: int,
    *,
    cache: Optional[MincutCache] = None,
) -> SolveResult:
    """Exact minimum delay over placements with |S_k| ≤ alpha.

    One DP pass over every nonempty ≤alpha-subset of each candidate layer
    (the per-layer family count grows like C(|V_f|, alpha), so large alpha
    on large layers is expensive — by design, this is the optimal
    polynomial-in-|V| algorithm for fixed alpha).

    Raises:
        ValueError: if alpha < 1 or the request fails hard validation.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    cache = _prepare(net, req, cache)
    stats = SolveStats()
    layers = _layer_nodes(req)
    middle = [_subsets_upto(layers[k], alpha) for k in range(1, len(layers) - 1)]
    outcome = _run_dp(cache, req, _boundary_families(req, middle), stats)
    return _finish(f"alpha_optimal({alpha})", cache, req, outcome, stats)


def solve_no_redundancy(
    net: Network, req: ChainRequest, *, cache: Optional[MincutCache] = None
) -> SolveResult:
    """Optimal singleton placements (the no-redundancy baseline, α = 1)."""
    result = solve_alpha_optimal(net, req, 1, cache=cache)
    return replace(result, algorithm="no_redundancy")


def _greedy_loop(
    net: Network,
    req: ChainRequest,
    *,
    alpha: Optional[int],
    cache: Optional[MincutCache],
    algorithm: str,
) -> SolveResult:
    """Shared iteration for the greedy and α-greedy solvers."""
    cache = _prepare(net, req, cache)
    stats = SolveStats()
    layers = _layer_nodes(req)
    K = req.chain_length
    middle = [_canonical(1 << v for v in layers[k]) for k in range(1, K + 1)]

    best: Optional[_DpOutcome] = None
    while True:
        stats.greedy_iterations += 1
        outcome = _run_dp(cache, req, _boundary_families(req, middle), stats)
        if best is not None and not (outcome.delay < best.delay):
            break
        best = outcome
        chosen = best.placement.sets
        rebuilt = False
        for k in range(K):
            pk = chosen[k].mask
            if alpha is not None and pk.bit_count() >= alpha:
                continue  # layer at capacity keeps its family
            middle[k] = _canonical(pk | (1 << v) for v in layers[k + 1])
            rebuilt = True
        if not rebuilt:
            break  # no layer can change: the DP would repeat itself

    assert best is not None
    return _finish(algorithm, cache, req, best, stats)


def solve_greedy(
    net: Network, req: ChainRequest, *, cache: Optional[MincutCache] = None
) -> SolveResult:
    """Greedy set enlargement.

    Starts from the optimal singleton DP, then repeatedly rebuilds each
    layer's family to every one-node extension {v} ∪ P_k of the incumbent
    placement and re-runs the DP, stopping when the delay fails to
    strictly decrease.  Never worse than :func:`solve_no_redundancy` (the
    first iteration *is* the singleton DP); not optimal in general.
    """
    return _greedy_loop(net, req, alpha=None, cache=cache, algorithm="greedy")


def solve_alpha_greedy(
    net: Network,
    req: ChainRequest,
    alpha: int,
    *,
    cache: Optional[MincutCache] = None,
) -> SolveResult:
    """Greedy enlargement with the per-set cap |S_k| ≤ alpha.

    Identical to :func:`solve_greedy` except a layer whose incumbent set
    has reached alpha elements keeps its current family instead of being
    rebuilt, so every returned set has at most alpha nodes.

    Raises:
        ValueError: if alpha < 1 or the request fails hard validation.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return _greedy_loop(net, req, alpha=alpha, cache=cache, algorithm=f"alpha_greedy({alpha})")


def solve_exhaustive(
    net: Network,
    req: ChainRequest,
    *,
    cache: Optional[MincutCache] = None,
    state_bound: int = 10**7,
) -> SolveResult:
    """Exact global optimum by enumerating every placement sequence.

    Depth-first search over all nonempty S_k ⊆ V_{f_k} with exact
    prefix-cost pruning of strictly worse prefixes.  Equal-cost prefixes
    are kept so ties resolve under the shared deterministic contract:
    among minimum-delay sequences, the one with the fewest total nodes
    wins, then the lexicographically smallest sequence of sorted node
    tuples.

    Raises:
        ValueError: if the sequence count Π_k (2^{|V_fk|} − 1) exceeds
            `state_bound` (default 10^7), or on hard validation errors.
    """
    cache = _prepare(net, req, cache)
    total = 1
    for p in req.placements:
        total *= (1 << len(p)) - 1
        if total > state_bound:
            raise ValueError(
                f"exhaustive search needs {total}+ placement sequences, "
                f"above the bound {state_bound}"
            )
    stats = SolveStats()
    K = req.chain_length
    layers = _layer_nodes(req)
    finite_sum = cache.finite_sum

    # Nonempty subsets of each layer in lexicographic tuple order:
    # (a) < (a,b) < (a,b,c) < (a,c) < (b) < ...
    def lex_subsets(nodes: tuple[int, ...]) -> list[int]:
        out: list[int] = []

        def rec(mask: int, start: int) -> None:
            for i in range(start, len(nodes)):
                m2 = mask | (1 << nodes[i])
                out.append(m2)
                rec(m2, i + 1)

        rec(0, 0)
        return out

    per_layer = [lex_subsets(layers[k]) for k in range(1, K + 1)]

    best_cost: Optional[Fraction] = None
    best_key: Optional[tuple] = None
    best_seq: Optional[list[int]] = None
    seq: list[int] = [0] * K

    def seq_key(s: list[int]) -> tuple:
        return (
            sum(m.bit_count() for m in s),
            tuple(_nodes_tuple(m) for m in s),
        )

    def step_cost(prev_mask: int, next_mask: int, L_micro: int) -> Optional[Fraction]:
        stats.mincut_evals += 1
        m = cache.mincut_micro(prev_mask, next_mask, stats)
        if m == 0:
            return None
        if m > finite_sum:
            return Fraction(0)
        return Fraction(L_micro, m)

    def dfs(k: int, prev_mask: int, prefix: Fraction) -> None:
        nonlocal best_cost, best_key, best_seq
        if k == K:
            tail = step_cost(prev_mask, 1 << req.dest, req.sizes_micro[K])
            if tail is None:
                return
            total_cost = prefix + tail
            if best_cost is not None and total_cost > best_cost:
                return
            key = seq_key(seq)
            if best_cost is None or total_cost < best_cost or key < best_key:
                best_cost = total_cost
                best_key = key
                best_seq = seq.copy()
            return
        for mask in per_layer[k]:
            c = step_cost(prev_mask, mask, req.sizes_micro[k])
            if c is None:
                continue
            cost = prefix + c
            if best_cost is not None and cost > best_cost:
                continue
            seq[k] = mask
            dfs(k + 1, mask, cost)

    dfs(0, 1 << req.source, Fraction(0))

    if best_seq is None:
        # Everything infeasible: report the tie-break-first sequence.
        fallback = [per_layer[k][0] if per_layer[k] else 0 for k in range(K)]
        outcome = _DpOutcome(
            delay=Delay.INFEASIBLE,
            placement=Placement(NodeSet(m) for m in fallback),
            failed_round=None,
        )
    else:
        outcome = _DpOutcome(
            delay=Delay(best_cost),
            placement=Placement(NodeSet(m) for m in best_seq),
            failed_round=None,
        )
    return _finish("exhaustive", cache, req, outcome, stats)
