"""Lax pairs for the four concrete systems, trace invariants, and Casimirs.

Each builder stores its numerically certified commutator convention in
``sign``: +1 means dL/dt = [B, L], -1 means dL/dt = [L, B].  The derivative
dL/dt used by the residual is assembled analytically from the closed-form
entries (chain rule through square roots), never by finite differences.

Matrix layout notes (0-based):

* km    -- n chain variables u_i > 0, L is (n+1) x (n+1) tridiagonal with
           zero diagonal and off-diagonal a_i = sqrt(u_i / 2).
* toda  -- n-1 a's and n b's, L is the n x n Jacobi matrix (diag b, off a).
* ab    -- m+1 a's and m b's with m >= 2, L is 2m x 2m: diagonal pairs
           (b_j, -b_j), a_1 at (0,1), interior a_j coupling +(2j-4, 2j-2)
           and -(2j-3, 2j-1), a_{m+1} at (2m-2, 2m-1).
* vd    -- n >= 4 positive v's, L is (2n-1) x (2n-1): a scalar slot bordered
           by n-1 two-by-two blocks; couplings carry sqrt(v_k) and
           i*sqrt(v_k) entries, the scalar ties to the last block through
           (sqrt(v_1), i*sqrt(v_1)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UnsupportedDimension
from .states import FLASCHKA_AB, VOLTERRA_U, VOLTERRA_V, State, require_positive_real


@dataclass(frozen=True)
class LaxPair:
    """Two square matrices bound to a state, with a commutator sign convention."""

    system: str
    L: np.ndarray
    B: np.ndarray
    sign: int

    def __post_init__(self):
        if self.L.shape != self.B.shape or self.L.shape[0] != self.L.shape[1]:
            raise DimensionError("L and B must be square matrices of equal size")
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 ([B,L]) or -1 ([L,B])")

    @property
    def dimension(self) -> int:
        return self.L.shape[0]


def build_lax(system: str, state: State) -> LaxPair:
    """Assemble the Lax pair of km | toda | vd | ab at the given state."""
    builder = _BUILDERS.get(system)
    if builder is None:
        raise ValueError(f"no Lax builder for system {system!r}")
    L, B, sign, _ = builder(state, None)
    return LaxPair(system, L, B, sign)


def lax_dL(system: str, state: State, ds) -> np.ndarray:
    """Entrywise directional derivative of L along the state velocity ds."""
    builder = _BUILDERS.get(system)
    if builder is None:
        raise ValueError(f"no Lax builder for system {system!r}")
    _, _, _, dL = builder(state, np.asarray(ds, dtype=complex))
    return dL


def lax_residual(pair: LaxPair, field_value, state: State) -> float:
    """Frobenius norm of dL/dt - sign * [B, L] along the given field value."""
    dL = lax_dL(pair.system, state, field_value)
    comm = pair.B @ pair.L - pair.L @ pair.B
    return float(np.linalg.norm(dL - pair.sign * comm))


def trace_invariants(pair: LaxPair, orders) -> list[complex]:
    """H_k = tr(L^k) / k via repeated matrix multiplication."""
    orders = list(orders)
    if any(k < 1 for k in orders):
        raise ValueError("orders must be positive integers")
    top = max(orders)
    out = {}
    power = np.eye(pair.dimension, dtype=complex)
    for k in range(1, top + 1):
        power = power @ pair.L
        if k in orders:
            out[k] = complex(np.trace(power)) / k
    return [out[k] for k in orders]


def grad_trace_invariant(system: str, state: State, order: int) -> np.ndarray:
    """Analytic gradient of tr(L^order)/order: component j is tr(L^{order-1} dL/dx_j)."""
    pair = build_lax(system, state)
    power = np.linalg.matrix_power(pair.L, order - 1)
    grad = np.zeros(state.dim, dtype=complex)
    for j in range(state.dim):
        unit = np.zeros(state.dim)
        unit[j] = 1.0
        grad[j] = np.trace(power @ lax_dL(system, state, unit))
    return grad


# ---------------------------------------------------------------------------
# closed-form invariants in the (a, b) and v charts
# ---------------------------------------------------------------------------

def h2_ab(state: State) -> complex:
    """Quadratic invariant sum(b^2) + a_1^2 + 2 sum(a_2..a_m)^2 + a_{m+1}^2."""
    a, b = _ab_coords(state)
    return complex(np.sum(b**2) + a[0] ** 2 + 2 * np.sum(a[1:-1] ** 2) + a[-1] ** 2)


def casimir_C(state: State) -> complex:
    """Casimir a_1 a_2^2 ... a_m^2 a_{m+1} of the linear (a, b) bracket."""
    a, _ = _ab_coords(state)
    return complex(a[0] * np.prod(a[1:-1] ** 2) * a[-1])


def grad_casimir_C(state: State) -> np.ndarray:
    """Analytic gradient of casimir_C with respect to (a_1..a_{m+1}, b_1..b_m)."""
    a, b = _ab_coords(state)
    m = len(b)
    grad = np.zeros(2 * m + 1, dtype=complex)
    for i in range(m + 1):
        rest = np.delete(np.arange(m + 1), i)
        expo = np.array([1 if j in (0, m) else 2 for j in rest])
        own = 1 if i in (0, m) else 2
        grad[i] = own * a[i] ** (own - 1) * np.prod(a[rest] ** expo)
    return grad


def casimir_F(state: State) -> complex:
    """Casimir (v_n - v_{n-1}) * prod(v_1..v_{n-2}) of the v-chart tau bracket."""
    v = _v_coords(state)
    return complex((v[-1] - v[-2]) * np.prod(v[:-2]))


def grad_casimir_F(state: State) -> np.ndarray:
    """Analytic gradient of casimir_F."""
    v = _v_coords(state)
    n = len(v)
    head = np.prod(v[: n - 2])
    grad = np.zeros(n, dtype=complex)
    for i in range(n - 2):
        grad[i] = (v[-1] - v[-2]) * np.prod(np.delete(v[: n - 2], i))
    grad[n - 2] = -head
    grad[n - 1] = head
    return grad


def _ab_coords(state: State):
    state.require_chart(FLASCHKA_AB, "ab invariant")
    a = state.first()
    b = state.second()
    if len(a) != len(b) + 1:
        raise DimensionError("expected m+1 a's and m b's")
    return a, b


def _v_coords(state: State):
    state.require_chart(VOLTERRA_V, "v invariant")
    v = state.array
    if len(v) < 4:
        raise UnsupportedDimension("v-chart invariants need n >= 4")
    return v


# ---------------------------------------------------------------------------
# builders; each returns (L, B, sign, dL) with dL = None when ds is None
# ---------------------------------------------------------------------------

def _km_builder(state: State, ds):
    state.require_chart(VOLTERRA_U, "km Lax")
    u = require_positive_real(state.array, "km Lax builder")
    n = len(u)
    a = np.sqrt(u / 2)
    T = n + 1
    L = np.zeros((T, T), dtype=complex)
    B = np.zeros((T, T), dtype=complex)
    for i in range(n):
        L[i, i + 1] = L[i + 1, i] = a[i]
    for i in range(n - 1):
        B[i, i + 2] = a[i] * a[i + 1]
        B[i + 2, i] = -B[i, i + 2]
    dL = None
    if ds is not None:
        da = ds / (4 * a)
        dL = np.zeros((T, T), dtype=complex)
        for i in range(n):
            dL[i, i + 1] = dL[i + 1, i] = da[i]
    return L, B, +1, dL


def _toda_builder(state: State, ds):
    state.require_chart(FLASCHKA_AB, "toda Lax")
    a = state.first()
    b = state.second()
    if len(b) != len(a) + 1 or len(b) < 2:
        raise DimensionError("toda Lax expects n-1 a's and n b's")

    def assemble(av, bv):
        n = len(bv)
        L = np.diag(bv.astype(complex))
        for i in range(n - 1):
            L[i, i + 1] = L[i + 1, i] = av[i]
        return L

    n = len(b)
    L = assemble(a, b)
    B = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        B[i, i + 1] = a[i]
        B[i + 1, i] = -a[i]
    dL = None
    if ds is not None:
        dL = assemble(ds[: n - 1], ds[n - 1 :])
    return L, B, +1, dL


def _ab_builder(state: State, ds):
    state.require_chart(FLASCHKA_AB, "ab Lax")
    a = state.first()
    b = state.second()
    m = len(b)
    if len(a) != m + 1:
        raise DimensionError("ab Lax expects m+1 a's and m b's")
    if m < 2:
        raise UnsupportedDimension("the 2m x 2m ab Lax needs m >= 2; both end couplings collide at m = 1")

    def assemble_L(av, bv):
        T = 2 * m
        L = np.zeros((T, T), dtype=complex)
        for j in range(m):
            L[2 * j, 2 * j] = bv[j]
            L[2 * j + 1, 2 * j + 1] = -bv[j]
        L[0, 1] = L[1, 0] = av[0]
        for j in range(2, m + 1):
            r1, c1 = 2 * j - 4, 2 * j - 2
            r2, c2 = 2 * j - 3, 2 * j - 1
            L[r1, c1] = L[c1, r1] = av[j - 1]
            L[r2, c2] = L[c2, r2] = -av[j - 1]
        L[T - 2, T - 1] = L[T - 1, T - 2] = av[m]
        return L

    L = assemble_L(a, b)
    T = 2 * m
    B = np.zeros((T, T), dtype=complex)
    B[0, 1] = -a[0]
    for j in range(2, m + 1):
        B[2 * j - 4, 2 * j - 2] = a[j - 1]
        B[2 * j - 3, 2 * j - 1] = a[j - 1]
    B[T - 2, T - 1] = a[m]
    B -= B.T.copy()
    dL = None
    if ds is not None:
        dL = assemble_L(ds[: m + 1], ds[m + 1 :])
    return L, B, +1, dL


def _vd_builder(state: State, ds):
    state.require_chart(VOLTERRA_V, "vd Lax")
    v = require_positive_real(state.array, "vd Lax builder")
    n = len(v)
    if n < 4:
        raise UnsupportedDimension("vd Lax requires n >= 4")
    sq = np.sqrt(v)
    dv = np.asarray(ds, dtype=complex) if ds is not None else None
    dsq = dv / (2 * sq) if dv is not None else None
    T = 2 * n - 1
    L = np.zeros((T, T), dtype=complex)
    dL = np.zeros((T, T), dtype=complex) if dv is not None else None

    def put(i, j, val, dval):
        L[i, j] = L[j, i] = val
        if dL is not None:
            dL[i, j] = dL[j, i] = dval

    # block (1,2) is the non-diagonal coupling mixing v_n and v_{n-1}
    put(1, 3, sq[n - 1], dsq[n - 1] if dv is not None else 0)
    put(1, 4, 1j * sq[n - 1], 1j * dsq[n - 1] if dv is not None else 0)
    put(2, 3, -sq[n - 2], -dsq[n - 2] if dv is not None else 0)
    put(2, 4, 1j * sq[n - 2], 1j * dsq[n - 2] if dv is not None else 0)
    # diagonal couplings sqrt(v_k), i*sqrt(v_k) for k = n-2 ... 2
    for j in range(2, n - 1):
        k = n - j - 1  # 0-based index of v_{n-j}
        put(2 * j - 1, 2 * j + 1, sq[k], dsq[k] if dv is not None else 0)
        put(2 * j, 2 * j + 2, 1j * sq[k], 1j * dsq[k] if dv is not None else 0)
    # scalar border ties v_1 to the last block
    put(0, T - 2, sq[0], dsq[0] if dv is not None else 0)
    put(0, T - 1, 1j * sq[0], 1j * dsq[0] if dv is not None else 0)

    def halfroot(i, j):
        return 0.5 * sq[i] * sq[j]

    B = np.zeros((T, T), dtype=complex)
    B[0, 2 * n - 5] = -halfroot(0, 1)
    B[0, 2 * n - 4] = -halfroot(0, 1)
    # block (1,3): mixes v_{n-2} with v_n and v_{n-1}
    B[1, 5] = halfroot(n - 3, n - 1)
    B[1, 6] = halfroot(n - 3, n - 1)
    B[2, 5] = -halfroot(n - 3, n - 2)
    B[2, 6] = halfroot(n - 3, n - 2)
    # blocks (j, j+2): half-root ladder down the chain
    for j in range(2, n - 2):
        k = n - j - 2  # 0-based index of v_{n-1-j}
        B[2 * j - 1, 2 * j + 3] = halfroot(k, k + 1)
        B[2 * j, 2 * j + 4] = halfroot(k, k + 1)
    # diagonal blocks
    B[3, 4] = 0.5j * (v[n - 2] - v[n - 1])
    B[T - 2, T - 1] = 0.5j * v[0]
    B -= B.T.copy()
    return L, B, -1, dL


_BUILDERS = {
    "km": _km_builder,
    "toda": _toda_builder,
    "ab": _ab_builder,
    "vd": _vd_builder,
}


# ---------------------------------------------------------------------------
# JSON serialization of complex matrices as nested [re, im] pairs
# ---------------------------------------------------------------------------

def matrix_to_json(m) -> str:
    arr = np.asarray(m, dtype=complex)
    return json.dumps([[[z.real, z.imag] for z in row] for row in arr])


def matrix_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    return np.array([[complex(re, im) for re, im in row] for row in data])
