"""Coordinate charts and immutable state vectors.

Five chart families cover every coordinate system used by the lattices:

* ``qp``           -- canonical positions/momenta, split index = number of q's
* ``flaschka_ab``  -- Flaschka-type (a, b) variables, split index = number of a's
* ``volterra_u``   -- Volterra chain variables u_i
* ``volterra_v``   -- rescaled Volterra D variables v_i
* ``c_vars``       -- Cartan-type variables c_j

Coordinates are stored as complex scalars throughout; real systems simply
stay on the real slice.  Indexing in docstrings follows the 1-based
convention of the underlying formulas; code uses 0-based numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartMismatch, DimensionError, DomainError

QP = "qp"
FLASCHKA_AB = "flaschka_ab"
VOLTERRA_U = "volterra_u"
VOLTERRA_V = "volterra_v"
C_VARS = "c_vars"

CHARTS = (QP, FLASCHKA_AB, VOLTERRA_U, VOLTERRA_V, C_VARS)

_SPLIT_CHARTS = (QP, FLASCHKA_AB)


@dataclass(frozen=True)
class State:
    """A labeled coordinate vector in one of the five charts.

    ``split`` separates the two coordinate groups for the split charts:
    number of q's for ``qp``, number of a's for ``flaschka_ab``.
    """

    chart: str
    coords: tuple[complex, ...]
    split: int | None = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ChartMismatch(f"unknown chart {self.chart!r}")
        object.__setattr__(self, "coords", tuple(complex(z) for z in self.coords))
        if self.chart in _SPLIT_CHARTS:
            if self.split is None:
                raise DimensionError(f"chart {self.chart!r} requires a split index")
            if not 0 <= self.split <= len(self.coords):
                raise DimensionError(
                    f"split {self.split} out of range for {len(self.coords)} coordinates"
                )
        elif self.split is not None:
            raise DimensionError(f"chart {self.chart!r} takes no split index")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=complex)

    def first(self) -> np.ndarray:
        """First coordinate group (q's or a's) of a split chart."""
        self._require_split()
        return self.array[: self.split]

    def second(self) -> np.ndarray:
        """Second coordinate group (p's or b's) of a split chart."""
        self._require_split()
        return self.array[self.split :]

    def replace_coords(self, coords) -> "State":
        return State(self.chart, tuple(coords), self.split)

    def _require_split(self):
        if self.chart not in _SPLIT_CHARTS:
            raise ChartMismatch(f"chart {self.chart!r} has no coordinate groups")

    def require_chart(self, chart: str, what: str = "operation"):
        if self.chart != chart:
            raise ChartMismatch(f"{what} expects chart {chart!r}, got {self.chart!r}")


def qp_state(q, p) -> State:
    """Canonical (q, p) state; q and p must have equal length."""
    q = tuple(q)
    p = tuple(p)
    if len(q) != len(p):
        raise DimensionError(f"q has {len(q)} entries, p has {len(p)}")
    return State(QP, q + p, split=len(q))


def ab_state(a, b) -> State:
    """Flaschka-type (a, b) state; the a/b length pattern is system specific."""
    a = tuple(a)
    b = tuple(b)
    return State(FLASCHKA_AB, a + b, split=len(a))


def u_state(u) -> State:
    return State(VOLTERRA_U, tuple(u))


def v_state(v) -> State:
    return State(VOLTERRA_V, tuple(v))


def c_state(c) -> State:
    return State(C_VARS, tuple(c))


def require_positive_real(values, what: str):
    """Check the strict-positivity precondition on a coordinate group.

    The positivity-constrained charts demand strictly positive real part
    wherever square roots or reciprocals of the coordinates are taken.
    """
    arr = np.asarray(values, dtype=complex)
    if arr.size and np.min(arr.real) <= 0.0:
        raise DomainError(f"{what} requires coordinates with positive real part")
    return arr
