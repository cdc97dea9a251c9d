"""Low-level integer max-flow kernel (Dinic) compiled with numba.

The kernel works on a prebuilt CSR residual graph whose arcs come in
adjacent pairs (arc and its reverse).  Capacities are int64 micro-units;
"infinite" capacities are encoded by the caller as a sentinel value larger
than the sum of all finite capacities.  One call computes max-flow from a
fixed super-source to a batch of sink nodes, restoring capacities between
sinks, so the (small) call overhead is paid once per batch.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_UNREACHED = np.int32(-1)
_HUGE = np.int64(1) << np.int64(62)


@njit(cache=True)
def batch_maxflow(indptr, arc_to, arc_pair, base_cap, en_arcs, sentinel, source, targets):
    """Max-flow values from `source` to each node in `targets`.

    `base_cap` is the pristine arc-capacity array; arcs listed in `en_arcs`
    are raised to `sentinel` before each run (the super-source attachment).
    Returns an int64 array of flow values, one per target.
    """
    n = indptr.size - 1
    cap = np.empty_like(base_cap)
    level = np.empty(n, np.int32)
    cur = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    stack_node = np.empty(n + 1, np.int64)
    stack_arc = np.empty(n + 1, np.int64)
    out = np.empty(targets.size, np.int64)

    for ti in range(targets.size):
        sink = targets[ti]
        cap[:] = base_cap
        for j in range(en_arcs.size):
            cap[en_arcs[j]] = sentinel
        flow = np.int64(0)

        while True:
            # BFS: build level graph on residual arcs.
            for i in range(n):
                level[i] = _UNREACHED
            head = 0
            tail = 0
            queue[tail] = source
            tail += 1
            level[source] = 0
            while head < tail:
                u = queue[head]
                head += 1
                for a in range(indptr[u], indptr[u + 1]):
                    if cap[a] > 0:
                        v = arc_to[a]
                        if level[v] == _UNREACHED:
                            level[v] = level[u] + 1
                            queue[tail] = v
                            tail += 1
            if level[sink] == _UNREACHED:
                break

            # Blocking flow: iterative DFS with current-arc pointers.
            for i in range(n):
                cur[i] = indptr[i]
            depth = 0
            u = source
            while True:
                if u == sink:
                    aug = _HUGE
                    for i in range(depth):
                        a = stack_arc[i]
                        if cap[a] < aug:
                            aug = cap[a]
                    for i in range(depth):
                        a = stack_arc[i]
                        cap[a] -= aug
                        cap[arc_pair[a]] += aug
                    flow += aug
                    # Retreat to the shallowest saturated arc on the path.
                    back = 0
                    while back < depth and cap[stack_arc[back]] > 0:
                        back += 1
                    depth = back
                    u = stack_node[depth]
                    continue
                advanced = False
                while cur[u] < indptr[u + 1]:
                    a = cur[u]
                    if cap[a] > 0:
                        v = arc_to[a]
                        if level[v] == level[u] + 1:
                            stack_node[depth] = u
                            stack_arc[depth] = a
                            depth += 1
                            u = v
                            advanced = True
                            break
                    cur[u] += 1
                if not advanced:
                    if u == source:
                        break
                    level[u] = _UNREACHED
                    depth -= 1
                    u = stack_node[depth]
                    cur[u] += 1
        out[ti] = flow
    return out
