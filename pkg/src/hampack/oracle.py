"""Exact Hamilton-cycle decision for small graphs (bitmask dynamic program).

Independent test oracle for the rotation-based engine; kept free of any
engine code on purpose.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import SizeLimitError

MAX_ORACLE_N = 20


def brute_force_hamilton(adjacency: Sequence[Sequence[int]],
                         ) -> tuple[bool, Optional[list[int]]]:
    """Decide Hamiltonicity of an undirected graph given as adjacency lists.

    Returns (exists, cycle) where cycle is a witness vertex sequence of
    length n (closed by the implicit wrap-around edge) when one exists.

    Subset DP over paths anchored at vertex 0: dp[mask] is the bitmask of
    endpoints v reachable from 0 along a simple path covering exactly mask.
    O(2^n * n) time with bit-parallel endpoint sets; n <= 20 enforced.
    """
    n = len(adjacency)
    if n > MAX_ORACLE_N:
        raise SizeLimitError(f"oracle limited to n <= {MAX_ORACLE_N}, got {n}")
    if n < 3:
        return False, None

    nbr = [0] * n
    for u, nbrs in enumerate(adjacency):
        for v in nbrs:
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
    for u in range(n):
        nbr[u] &= ~(1 << u)

    full = (1 << n) - 1
    dp = [0] * (1 << n)
    dp[1] = 1  # path = (0,), endpoint 0
    for mask in range(1, 1 << n):
        ends = dp[mask]
        if not ends:
            continue
        m = ends
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            ext = nbr[v] & ~mask
            while ext:
                u = (ext & -ext).bit_length() - 1
                ext &= ext - 1
                dp[mask | (1 << u)] |= 1 << u

    closers = dp[full] & nbr[0]
    if not closers:
        return False, None

    # Reconstruct one witness cycle by walking the DP backwards.
    v = (closers & -closers).bit_length() - 1
    mask = full
    cycle = [v]
    while v != 0:
        prev_mask = mask & ~(1 << v)
        cand = dp[prev_mask] & nbr[v]
        u = (cand & -cand).bit_length() - 1
        cycle.append(u)
        mask, v = prev_mask, u
    cycle.reverse()  # starts at 0, ends at the vertex adjacent to 0
    return True, cycle
