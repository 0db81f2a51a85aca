"""Metropolis single-edge-toggle sampler for edge/triangle exponential models.

The adjacency matrix lives in packed uint64 rows so the triangle change of
a toggle (the common-neighbor count of the dyad) is a handful of AND +
popcount word operations. The jitted kernel consumes pre-generated
proposal arrays, so all randomness flows from the caller's stream.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U2 = np.uint64(2)
_U4 = np.uint64(4)
_U56 = np.uint64(56)
_U63 = np.uint64(63)


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> _U1) & _M1)
    x = (x & _M2) + ((x >> _U2) & _M2)
    x = (x + (x >> _U4)) & _M4
    return (x * _H01) >> _U56


@njit(cache=True)
def _run_toggles(bits, words, edges, theta_edge, theta_triangle,
                 ii, jj, logu, track_from):
    """Apply a batch of proposals in place; returns (edges, edge_count_sum).

    ``edge_count_sum`` accumulates the post-toggle edge count for proposal
    indices >= track_from, giving a time-average of the density.
    """
    edge_sum = 0.0
    for k in range(ii.shape[0]):
        i = ii[k]
        j = jj[k]
        wj = j >> 6
        bj = _U1 << (np.uint64(j) & _U63)
        present = (bits[i, wj] & bj) != _U0
        common = _U0
        for t in range(words):
            common += _popcount64(bits[i, t] & bits[j, t])
        delta = theta_edge + theta_triangle * np.float64(common)
        if present:
            delta = -delta
        if delta >= 0.0 or logu[k] < delta:
            wi = i >> 6
            bi = _U1 << (np.uint64(i) & _U63)
            bits[i, wj] ^= bj
            bits[j, wi] ^= bi
            if present:
                edges -= 1
            else:
                edges += 1
        if k >= track_from:
            edge_sum += edges
    return edges, edge_sum


class EdgeTriangleChain:
    """A running Metropolis chain over simple graphs on ``n_nodes`` vertices."""

    CHUNK = 1_000_000

    def __init__(self, n_nodes: int, start_u: np.ndarray, start_v: np.ndarray,
                 theta_edge: float, theta_triangle: float,
                 gen: np.random.Generator):
        self.n_nodes = int(n_nodes)
        self.words = (self.n_nodes + 63) // 64
        self.bits = np.zeros((self.n_nodes, self.words), dtype=np.uint64)
        if start_u.size:
            np.bitwise_or.at(self.bits, (start_u, start_v >> 6),
                             np.uint64(1) << (start_v.astype(np.uint64) & np.uint64(63)))
            np.bitwise_or.at(self.bits, (start_v, start_u >> 6),
                             np.uint64(1) << (start_u.astype(np.uint64) & np.uint64(63)))
        self.edges = int(start_u.size)
        self.theta_edge = float(theta_edge)
        self.theta_triangle = float(theta_triangle)
        self._gen = gen

    def advance(self, n_toggles: int, track: bool = False) -> float | None:
        """Run ``n_toggles`` proposals; with ``track``, return mean density."""
        remaining = int(n_toggles)
        total = 0.0
        tracked = 0
        m = self.n_nodes
        while remaining > 0:
            batch = min(self.CHUNK, remaining)
            ii = self._gen.integers(0, m, size=batch, dtype=np.int64)
            jj = self._gen.integers(0, m - 1, size=batch, dtype=np.int64)
            jj = jj + (jj >= ii)
            logu = np.log(self._gen.random(batch))
            track_from = 0 if track else batch
            self.edges, edge_sum = _run_toggles(
                self.bits, self.words, self.edges,
                self.theta_edge, self.theta_triangle, ii, jj, logu, track_from)
            if track:
                total += edge_sum
                tracked += batch
            remaining -= batch
        if track:
            pairs = m * (m - 1) / 2
            return (total / tracked) / pairs
        return None

    @property
    def density(self) -> float:
        return self.edges / (self.n_nodes * (self.n_nodes - 1) / 2)

    def snapshot_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Current state as canonical (u < v) edge arrays."""
        flat = np.unpackbits(self.bits.view(np.uint8), axis=1, bitorder="little")
        adj = flat[:, :self.n_nodes].astype(bool)
        u, v = np.nonzero(np.triu(adj, k=1))
        return u.astype(np.int64), v.astype(np.int64)
