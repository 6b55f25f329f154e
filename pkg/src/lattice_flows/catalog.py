"""Identified systems: chart dispatch, named invariants, Lax builders.

The catalog maps the public system identifiers (km, bv-a..bv-d, c-a..c-d,
vd, ab, spectrum, toda, sklyanin, sklyanin-full) to vector fields, the
charts they accept, positivity constraints, and the invariants the CLI can
track along trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lax, systems
from .errors import ChartMismatch, DimensionError
from .rootdata import Spectrum, null_combination
from .states import C_VARS, FLASCHKA_AB, QP, VOLTERRA_U, VOLTERRA_V, State, ab_state, c_state, qp_state, u_state, v_state

_POSITIVE_CHARTS = (VOLTERRA_U, VOLTERRA_V, C_VARS)


@dataclass(frozen=True)
class LatticeSystem:
    """An identified vector field with its charts, invariants, and Lax builder.

    Dimension is carried by the states themselves; every entry accepts any
    admissible size of its charts.
    """

    key: str
    charts: tuple[str, ...]
    fields: dict
    lax_system: str | None = None
    spectrum: Spectrum | None = None
    poisson_structures: tuple[str, ...] = ()

    def field(self, state: State) -> np.ndarray:
        fn = self.fields.get(state.chart)
        if fn is None:
            raise ChartMismatch(f"system {self.key!r} has no field on chart {state.chart!r}")
        return fn(state)

    @property
    def positive(self) -> bool:
        return all(ch in _POSITIVE_CHARTS for ch in self.charts)

    def invariants(self, state: State) -> dict[str, Callable[[State], complex]]:
        """Named invariants available for this system on the state's chart."""
        return _invariants_for(self, state)

    def build_lax(self, state: State) -> lax.LaxPair:
        if self.lax_system is None:
            raise ValueError(f"system {self.key!r} has no Lax builder")
        return lax.build_lax(self.lax_system, state)


def _trace_inv(lax_system: str, order: int):
    def fn(state: State) -> complex:
        pair = lax.build_lax(lax_system, state)
        return lax.trace_invariants(pair, [order])[0]

    return fn


def _invariants_for(system: LatticeSystem, state: State):
    out: dict[str, Callable[[State], complex]] = {}
    key = system.key
    if key == "km":
        size = state.dim + 1
        for k in range(2, size + 1, 2):
            out[f"H{k}"] = _trace_inv("km", k)
    elif key == "toda" and state.chart == FLASCHKA_AB:
        size = state.dim // 2 + 1
        for k in range(1, size + 1):
            out[f"H{k}"] = _trace_inv("toda", k)
    elif key == "ab" and state.chart == FLASCHKA_AB:
        m = state.dim // 2
        for k in range(1, m + 1):
            out[f"H{2*k}"] = _trace_inv("ab", 2 * k)
        out["C"] = lax.casimir_C
    elif key == "vd":
        # v-degree grading: H_k = tr(L^{2k}) / k, odd-power traces vanish
        n = state.dim
        for k in range(2, n, 2):

            def fn(s, kk=k):
                pair = lax.build_lax("vd", s)
                return complex(np.trace(np.linalg.matrix_power(pair.L, 2 * kk))) / kk

            out[f"H{k}"] = fn
        out["F"] = lax.casimir_F
    elif key in ("toda", "sklyanin", "sklyanin-full") and state.chart == QP:
        name = {"sklyanin-full": "sklyanin_full"}.get(key, key)
        out["H"] = lambda s: systems.hamiltonian_eval(name, s)
    elif key == "spectrum" and system.spectrum is not None:
        basis = null_combination(system.spectrum)
        if basis:
            lam = basis[0]
            out["F1"] = lambda s: systems.integrals_F1_F2(s, lam)[0]
            out["F2"] = lambda s: systems.integrals_F1_F2(s, lam)[1]
    return out


def get_system(key: str, spectrum: Spectrum | None = None) -> LatticeSystem:
    """Look up a system by its public identifier."""
    if key == "km":
        return LatticeSystem("km", (VOLTERRA_U,), {VOLTERRA_U: systems.km_field}, lax_system="km")
    if key.startswith("bv-") and key[3:] in ("a", "b", "c", "d"):
        fam = key[3:].upper()
        return LatticeSystem(key, (VOLTERRA_U,), {VOLTERRA_U: lambda s, f=fam: systems.bv_field(f, s)})
    if key.startswith("c-") and key[2:] in ("a", "b", "c", "d"):
        fam = key[2:].upper()
        structures = ("c-bracket",) if fam == "D" else ()
        return LatticeSystem(
            key, (C_VARS,), {C_VARS: lambda s, f=fam: systems.c_field(f, s)},
            poisson_structures=structures,
        )
    if key == "vd":
        return LatticeSystem(
            "vd",
            (VOLTERRA_V,),
            {VOLTERRA_V: systems.vd_field},
            lax_system="vd",
            poisson_structures=("pi1-v", "pi3-v"),
        )
    if key == "ab":
        return LatticeSystem(
            "ab",
            (FLASCHKA_AB,),
            {FLASCHKA_AB: systems.ab_field},
            lax_system="ab",
            poisson_structures=("pi1-ab", "pi3-ab"),
        )
    if key == "spectrum":
        if spectrum is None:
            raise ValueError("system 'spectrum' requires a spectrum")
        return LatticeSystem(
            "spectrum",
            (FLASCHKA_AB,),
            {FLASCHKA_AB: lambda s, sp=spectrum: systems.spectrum_field(sp, s)},
            spectrum=spectrum,
        )
    if key == "toda":
        return LatticeSystem(
            "toda",
            (QP, FLASCHKA_AB),
            {QP: lambda s: systems.qp_field("toda", s), FLASCHKA_AB: systems.toda_ab_field},
            lax_system="toda",
        )
    if key == "sklyanin":
        return LatticeSystem("sklyanin", (QP,), {QP: lambda s: systems.qp_field("sklyanin", s)})
    if key == "sklyanin-full":
        return LatticeSystem(
            "sklyanin-full", (QP,), {QP: lambda s: systems.qp_field("sklyanin_full", s)}
        )
    raise ValueError(f"unknown system {key!r}")


SYSTEM_KEYS = (
    "km",
    "bv-a",
    "bv-b",
    "bv-c",
    "bv-d",
    "c-a",
    "c-b",
    "c-c",
    "c-d",
    "vd",
    "ab",
    "spectrum",
    "toda",
    "sklyanin",
    "sklyanin-full",
)


def state_from_dict(obj: dict) -> State:
    """Build a State from a JSON-style dict keyed by coordinate-group names.

    Accepted forms: {"q": [...], "p": [...]}, {"a": [...], "b": [...]},
    {"u": [...]}, {"v": [...]}, {"c": [...]}.  Entries may be numbers or
    [re, im] pairs.
    """

    def scal(x):
        if isinstance(x, (list, tuple)):
            re, im = x
            return complex(re, im)
        return complex(x)

    keys = set(obj)
    if keys == {"q", "p"}:
        return qp_state([scal(x) for x in obj["q"]], [scal(x) for x in obj["p"]])
    if keys == {"a", "b"}:
        return ab_state([scal(x) for x in obj["a"]], [scal(x) for x in obj["b"]])
    if keys == {"u"}:
        return u_state([scal(x) for x in obj["u"]])
    if keys == {"v"}:
        return v_state([scal(x) for x in obj["v"]])
    if keys == {"c"}:
        return c_state([scal(x) for x in obj["c"]])
    raise DimensionError(f"unrecognized state document keys {sorted(keys)}")
