# ipcondense/dynamics/rate_tree.py
# Aggregate sum tree over per-site rates: O(log L) update and proportional selection.

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def tree_size(n):
    size = 1
    while size < n:
        size *= 2
    return size


@njit(cache=True)
def tree_build(rates):
    """Flat heap layout: root at 1, node i has children 2i and 2i+1, leaves at size..size+n-1."""
    n = rates.size
    size = tree_size(n)
    tree = np.zeros(2 * size)
    for i in range(n):
        tree[size + i] = rates[i]
    for i in range(size - 1, 0, -1):
        tree[i] = tree[2 * i] + tree[2 * i + 1]
    return tree


@njit(cache=True)
def tree_update(tree, pos, rate):
    # parents are recomputed from their children so sums never accumulate drift
    size = tree.size // 2
    i = size + pos
    tree[i] = rate
    i //= 2
    while i >= 1:
        tree[i] = tree[2 * i] + tree[2 * i + 1]
        i //= 2


@njit(cache=True)
def tree_select(tree, target):
    """Leaf index x with cumulative rate before x <= target < cumulative rate through x."""
    size = tree.size // 2
    i = 1
    while i < size:
        left = tree[2 * i]
        if target < left or tree[2 * i + 1] <= 0.0:
            i = 2 * i
        else:
            target -= left
            i = 2 * i + 1
    return i - size

