"""Spectra of exponential-interaction systems and their combinatorics.

A spectrum is a finite list of nonzero vectors in R^n.  From it we derive
the Gram matrix, a Dynkin-type multigraph (edge multiplicities from the
angle formula), the Kozlov-Treshchev integrability condition on pairwise
ratios, and null combinations of the vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NonIntegerMultiplicity

#: Default tolerance when an expression must sit on an integer.
INTEGER_TOL = 1e-9

#: Two vectors count as sharing a direction below this residual.
DIRECTION_TOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    """A list of nonzero vectors in R^n, optionally labeled."""

    dimension: int
    vectors: tuple[tuple[float, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        vecs = tuple(tuple(float(x) for x in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if self.dimension < 1:
            raise DimensionError("spectrum dimension must be positive")
        if not vecs:
            raise DimensionError("spectrum must contain at least one vector")
        for v in vecs:
            if len(v) != self.dimension:
                raise DimensionError(f"vector {v} does not live in R^{self.dimension}")
            if not any(x != 0.0 for x in v):
                raise DimensionError("spectrum vectors must be nonzero")
        if self.labels is not None and len(self.labels) != len(vecs):
            raise DimensionError("one label per vector required")

    @property
    def count(self) -> int:
        return len(self.vectors)

    @property
    def matrix(self) -> np.ndarray:
        """Vectors as rows of an (N, n) array."""
        return np.asarray(self.vectors, dtype=float)


@dataclass(frozen=True)
class DynkinTypeDiagram:
    """Vertex weights (min-normalized squared lengths) and edge multiplicities."""

    weights: tuple[float, ...]
    multiplicities: tuple[tuple[int, ...], ...]

    def edges(self) -> list[tuple[int, int, int]]:
        """Edges as (i, j, multiplicity) with i < j and multiplicity > 0."""
        out = []
        n = len(self.weights)
        for i in range(n):
            for j in range(i + 1, n):
                m = self.multiplicities[i][j]
                if m:
                    out.append((i, j, m))
        return out


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the Kozlov-Treshchev pairwise-ratio check."""

    passed: bool
    violations: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)


def gram_matrix(spectrum: Spectrum) -> np.ndarray:
    """Gram matrix M_ij = (v_i, v_j); each unordered pair computed once."""
    vecs = spectrum.matrix
    n = spectrum.count
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = float(np.dot(vecs[i], vecs[j]))
    return m


def build_diagram(spectrum: Spectrum, tol: float = INTEGER_TOL) -> DynkinTypeDiagram:
    """Dynkin-type diagram: 4 (v_i, v_j)^2 / ((v_i, v_i)(v_j, v_j)) edges per pair.

    Vertex weights are the squared lengths rescaled so the minimum is 1.
    Raises NonIntegerMultiplicity when an edge count strays from an integer
    by more than ``tol``, which signals a spectrum outside this family.
    """
    m = gram_matrix(spectrum)
    norms = np.diag(m)
    n = spectrum.count
    mult = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            raw = 4.0 * m[i, j] ** 2 / (norms[i] * norms[j])
            k = round(raw)
            if abs(raw - k) > tol:
                raise NonIntegerMultiplicity(
                    f"edge count {raw!r} between vertices {i} and {j} is not an integer"
                )
            mult[i][j] = mult[j][i] = int(k)
    weights = tuple(norms / norms.min())
    return DynkinTypeDiagram(weights, tuple(tuple(row) for row in mult))


def _direction_groups(vecs: np.ndarray) -> list[list[int]]:
    """Group vector indices sharing a direction (positive ray)."""
    units = vecs / np.linalg.norm(vecs, axis=1)[:, None]
    groups: list[list[int]] = []
    for i, u in enumerate(units):
        for g in groups:
            if np.linalg.norm(u - units[g[0]]) < DIRECTION_TOL:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def kozlov_treshchev_check(spectrum: Spectrum, tol: float = INTEGER_TOL) -> ConditionReport:
    """Check the necessary integrability condition on a spectrum.

    For every maximal vector v_i (greatest length within its direction) and
    every v_j linearly independent of v_i, the ratio 2 (v_i, v_j) / (v_i, v_i)
    must lie within ``tol`` of a nonpositive integer.
    """
    vecs = spectrum.matrix
    norms = np.linalg.norm(vecs, axis=1)
    units = vecs / norms[:, None]
    maximal = set()
    for g in _direction_groups(vecs):
        maximal.add(max(g, key=lambda i: norms[i]))
    violations = []
    for i in sorted(maximal):
        for j in range(spectrum.count):
            if j == i:
                continue
            collinear = (
                np.linalg.norm(units[j] - units[i]) < DIRECTION_TOL
                or np.linalg.norm(units[j] + units[i]) < DIRECTION_TOL
            )
            if collinear:
                continue
            ratio = 2.0 * float(np.dot(vecs[i], vecs[j])) / float(np.dot(vecs[i], vecs[i]))
            nearest = round(ratio)
            if abs(ratio - nearest) > tol or nearest > 0:
                violations.append((i, j, ratio))
    return ConditionReport(passed=not violations, violations=tuple(violations))


def null_combination(spectrum: Spectrum) -> list[np.ndarray]:
    """Basis of {lambda : sum_i lambda_i v_i = 0} by elimination with partial pivoting.

    Each basis vector is scaled so its first nonzero entry equals 1; the empty
    list signals independent vectors.
    """
    a = spectrum.matrix.T.copy()  # n x N, columns are the vectors
    rows, cols = a.shape
    pivot_cols: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[pivot, c]) < 1e-12:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        a[r] = a[r] / a[r, c]
        for rr in range(rows):
            if rr != r and a[rr, c] != 0.0:
                a[rr] -= a[rr, c] * a[r]
        pivot_cols.append(c)
        r += 1
    free_cols = [c for c in range(cols) if c not in pivot_cols]
    basis = []
    for fc in free_cols:
        lam = np.zeros(cols)
        lam[fc] = 1.0
        for row, pc in enumerate(pivot_cols):
            lam[pc] = -a[row, fc]
        first = lam[np.nonzero(lam)[0][0]]
        basis.append(lam / first)
    return basis


def sklyanin_spectrum(n: int) -> Spectrum:
    """Spectrum of the doubly boundary-perturbed Toda chain in R^n.

    The n+1 vectors are e_1 - e_2, ..., e_{n-1} - e_n, -2 e_1, 2 e_n.
    """
    if n < 2:
        raise DimensionError("sklyanin_spectrum requires n >= 2")
    vecs = []
    for i in range(n - 1):
        v = [0.0] * n
        v[i] = 1.0
        v[i + 1] = -1.0
        vecs.append(tuple(v))
    left = [0.0] * n
    left[0] = -2.0
    right = [0.0] * n
    right[-1] = 2.0
    vecs.append(tuple(left))
    vecs.append(tuple(right))
    return Spectrum(dimension=n, vectors=tuple(vecs))


def spectrum_from_json(text: str) -> Spectrum:
    """Parse a spectrum document: {"dimension": n, "vectors": [[...], ...]}."""
    obj = json.loads(text)
    labels = tuple(obj["labels"]) if "labels" in obj else None
    return Spectrum(
        dimension=int(obj["dimension"]),
        vectors=tuple(tuple(row) for row in obj["vectors"]),
        labels=labels,
    )


def spectrum_to_json(spectrum: Spectrum) -> str:
    obj = {"dimension": spectrum.dimension, "vectors": [list(v) for v in spectrum.vectors]}
    if spectrum.labels is not None:
        obj["labels"] = list(spectrum.labels)
    return json.dumps(obj)
