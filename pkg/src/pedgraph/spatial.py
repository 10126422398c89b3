"""Uniform-grid point index with exact radius and nearest-neighbor queries.

Small, dependency-free, and supports incremental inserts, which the node
merge step needs. Query results are exact (a candidate is returned iff its
true distance qualifies), so brute-force cross-checks must agree bit for bit.
"""

from __future__ import annotations

import math
from typing import Hashable, Iterable, Optional

from .geometry import LocalPoint


class GridIndex:
    """Maps hashable ids to points; cells are ``cell_size`` squares."""

    def __init__(self, cell_size: float = 50.0):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell_size = float(cell_size)
        self._cells: dict[tuple[int, int], list[tuple[Hashable, float, float]]] = {}
        self._count = 0
        self._kmin: Optional[tuple[int, int]] = None
        self._kmax: Optional[tuple[int, int]] = None

    def __len__(self) -> int:
        return self._count

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return (math.floor(x / self.cell_size), math.floor(y / self.cell_size))

    def insert(self, item_id: Hashable, p: LocalPoint) -> None:
        key = self._key(p[0], p[1])
        self._cells.setdefault(key, []).append((item_id, p[0], p[1]))
        self._count += 1
        if self._kmin is None:
            self._kmin = key
            self._kmax = key
        else:
            self._kmin = (min(self._kmin[0], key[0]), min(self._kmin[1], key[1]))
            self._kmax = (max(self._kmax[0], key[0]), max(self._kmax[1], key[1]))

    def extend(self, items: Iterable[tuple[Hashable, LocalPoint]]) -> None:
        for item_id, p in items:
            self.insert(item_id, p)

    def within(self, p: LocalPoint, radius: float) -> list[tuple[Hashable, float]]:
        """All (id, distance) with distance <= radius, sorted by (distance, id repr)."""
        cs = self.cell_size
        kx0 = math.floor((p[0] - radius) / cs)
        kx1 = math.floor((p[0] + radius) / cs)
        ky0 = math.floor((p[1] - radius) / cs)
        ky1 = math.floor((p[1] + radius) / cs)
        out = []
        for kx in range(kx0, kx1 + 1):
            for ky in range(ky0, ky1 + 1):
                for item_id, x, y in self._cells.get((kx, ky), ()):
                    d = math.hypot(x - p[0], y - p[1])
                    if d <= radius:
                        out.append((item_id, d))
        out.sort(key=lambda t: (t[1], t[0]))
        return out

    def _ring_cells(self, ckx: int, cky: int, ring: int):
        if ring == 0:
            yield (ckx, cky)
            return
        for kx in range(ckx - ring, ckx + ring + 1):
            yield (kx, cky - ring)
            yield (kx, cky + ring)
        for ky in range(cky - ring + 1, cky + ring):
            yield (ckx - ring, ky)
            yield (ckx + ring, ky)

    def nearest(
        self, p: LocalPoint, max_radius: Optional[float] = None
    ) -> Optional[tuple[Hashable, float]]:
        """Nearest item within max_radius; exact-distance ties go to the smaller id."""
        if self._count == 0:
            return None
        cs = self.cell_size
        ckx, cky = self._key(p[0], p[1])
        # No stored cell lies beyond this Chebyshev ring.
        last_ring = max(
            abs(self._kmin[0] - ckx), abs(self._kmax[0] - ckx),
            abs(self._kmin[1] - cky), abs(self._kmax[1] - cky),
        )
        # Jump straight to the first ring that can contain a stored cell.
        dx_gap = max(0, self._kmin[0] - ckx, ckx - self._kmax[0])
        dy_gap = max(0, self._kmin[1] - cky, cky - self._kmax[1])
        best: Optional[tuple[Hashable, float]] = None
        ring = max(dx_gap, dy_gap)
        while ring <= last_ring:
            # Any point in a ring-k cell is at least (k-1)*cell_size away.
            if best is not None and (ring - 1) * cs > best[1]:
                break
            if max_radius is not None and (ring - 1) * cs > max_radius:
                break
            for key in self._ring_cells(ckx, cky, ring):
                cell = self._cells.get(key)
                if not cell:
                    continue
                for item_id, x, y in cell:
                    d = math.hypot(x - p[0], y - p[1])
                    if max_radius is not None and d > max_radius:
                        continue
                    if best is None or d < best[1] or (d == best[1] and item_id < best[0]):
                        best = (item_id, d)
            ring += 1
        return best
