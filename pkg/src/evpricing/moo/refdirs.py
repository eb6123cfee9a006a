"""Das-Dennis simplex-lattice reference directions."""
from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np


class ReferencePointSet:
    def __init__(self, points, partitions):
        self.points = np.asarray(points, dtype=float)
        self.partitions = int(partitions)

    def __len__(self):
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return self.points.shape[1]


def das_dennis(partitions: int, dims: int = 3) -> ReferencePointSet:
    """All points with coordinates in ``{0, 1/p, ..., 1}`` summing to one.

    Enumerated by stars and bars: choosing ``dims - 1`` bar positions among
    ``p + dims - 1`` slots fixes one lattice point.
    """
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    if dims < 1:
        raise ValueError("dims must be >= 1")
    p = int(partitions)
    rows = []
    for bars in combinations(range(p + dims - 1), dims - 1):
        edges = (-1, *bars, p + dims - 1)
        rows.append([edges[k + 1] - edges[k] - 1 for k in range(dims)])
    pts = np.asarray(rows, dtype=float) / p
    assert pts.shape[0] == comb(p + dims - 1, dims - 1)
    return ReferencePointSet(pts, p)
