from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNASSIGNED = -1


@dataclass(frozen=True, eq=False)
class Solution:
    """A decision point with its cached objective value.

    ``id`` is handed out by the engine in creation order; line-search
    candidates carry ``UNASSIGNED`` until they are accepted.
    """

    point: np.ndarray
    value: float
    id: int = UNASSIGNED

    def __post_init__(self):
        p = np.array(self.point, dtype=float).reshape(-1)
        p.flags.writeable = False
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "value", float(self.value))

    def __repr__(self):
        coords = ", ".join(f"{c:.6g}" for c in self.point)
        return f"Solution(id={self.id}, point=({coords}), value={self.value:.6g})"
