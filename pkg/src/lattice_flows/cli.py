"""Command-line front end: simulate any system, run any verification suite.

Exit codes: 0 = success / all checks pass, 1 = verification failure or a
domain/step failure during simulation, 2 = usage errors.  Reports are JSON
documents with a top-level schema version; given the same seed they are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import lax, poisson, systems, transforms
from .catalog import SYSTEM_KEYS, get_system, state_from_dict
from .errors import DomainExit, LatticeError, StepFailure
from .integrate import AdaptiveStep, FixedStep, integrate, trajectory_csv
from .rootdata import kozlov_treshchev_check, sklyanin_spectrum, spectrum_from_json
from .states import FLASCHKA_AB, QP, VOLTERRA_U, VOLTERRA_V, C_VARS, ab_state, c_state, qp_state, u_state, v_state

RNG_NAME = "numpy-pcg64"

TOLERANCES = {
    "lax": 1e-10,
    "jacobi": 1e-6,
    "compat": 1e-6,
    "casimir": 1e-10,
    "lenard": 1e-7,
    "transform": 1e-8,
    "involution": 1e-9,
    "spectrum": 1e-9,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return _run_simulate(args)
        return _run_verify(args)
    except (LatticeError, ValueError, KeyError, json.JSONDecodeError) as exc:
        if isinstance(exc, (DomainExit, StepFailure)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lattice-flows", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a system and emit a trajectory CSV")
    sim.add_argument("--system", required=True, choices=SYSTEM_KEYS)
    sim.add_argument("--state", required=True, help="inline JSON state or @file")
    sim.add_argument("--t", type=float, required=True, help="end time")
    sim.add_argument("--dt", type=float, default=None, help="fixed RK4 step")
    sim.add_argument("--adaptive", action="store_true", help="embedded 4(5) stepping")
    sim.add_argument("--rtol", type=float, default=1e-9)
    sim.add_argument("--atol", type=float, default=1e-12)
    sim.add_argument("--invariants", default="", help="comma-separated invariant columns")
    sim.add_argument("--m", type=int, default=None, help="expected number of b's (validation)")
    sim.add_argument("--n", type=int, default=None, help="expected chain length (validation)")
    sim.add_argument("--spectrum", default=None, help="spectrum JSON file (system 'spectrum')")
    sim.add_argument("--out", default=None, help="CSV output path (default stdout)")

    ver = sub.add_parser("verify", help="run a residual verification suite")
    vsub = ver.add_subparsers(dest="suite", required=True)

    def common(p, states=50):
        p.add_argument("--states", type=int, default=states)
        p.add_argument("--seed", type=int, default=0)

    p = vsub.add_parser("lax")
    p.add_argument("--system", required=True, choices=("km", "toda", "vd", "ab"))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p, states=100)

    p = vsub.add_parser("jacobi")
    p.add_argument("--structure", required=True, choices=tuple(poisson.STRUCTURES))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p)

    p = vsub.add_parser("compat")
    p.add_argument("--chart", required=True, choices=("v", "ab"))
    p.add_argument("--lambdas", default="1,2.5")
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p)

    p = vsub.add_parser("casimir")
    p.add_argument("--structure", required=True, choices=("pi1-v", "pi1-ab"))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p)

    p = vsub.add_parser("lenard")
    p.add_argument("--chart", required=True, choices=("v", "ab"))
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p)

    p = vsub.add_parser("transform")
    p.add_argument(
        "--map",
        required=True,
        dest="map_name",
        choices=("henon", "d-map", "flaschka-sklyanin", "flaschka-toda", "flaschka-general", "c-to-v"),
    )
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--m", type=int, default=3)
    common(p, states=100)

    p = vsub.add_parser("involution")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--pairs", default="H2:H4,H2:H6")
    common(p)

    p = vsub.add_parser("spectrum")
    p.add_argument("--file", default=None, help="spectrum JSON document")
    p.add_argument("--sklyanin", type=int, default=None, help="use the built-in spectrum of this size")
    p.add_argument("--tol", type=float, default=TOLERANCES["spectrum"])

    return parser


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _run_simulate(args) -> int:
    text = args.state
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    state = state_from_dict(json.loads(text))

    spectrum = None
    if args.spectrum is not None:
        with open(args.spectrum) as fh:
            spectrum = spectrum_from_json(fh.read())
    system = get_system(args.system, spectrum=spectrum)
    if state.chart not in system.charts:
        raise ValueError(f"system {args.system!r} does not accept chart {state.chart!r}")
    if args.m is not None and state.chart == FLASCHKA_AB and state.dim - state.split != args.m:
        raise ValueError(f"--m {args.m} does not match the supplied state")
    if args.n is not None and state.chart != FLASCHKA_AB and state.dim != args.n and not (
        state.chart == QP and state.split == args.n
    ):
        raise ValueError(f"--n {args.n} does not match the supplied state")

    available = system.invariants(state)
    names = [s for s in args.invariants.split(",") if s]
    unknown = [s for s in names if s not in available]
    if unknown:
        raise ValueError(f"unknown invariants {unknown}; available: {sorted(available)}")
    chosen = {name: available[name] for name in names}

    if args.adaptive:
        policy = AdaptiveStep(rtol=args.rtol, atol=args.atol)
    else:
        if args.dt is None and args.t > 0:
            raise ValueError("--dt is required unless --adaptive is given")
        policy = FixedStep(args.dt if args.dt is not None else 1e-3)

    traj = integrate(system, state, args.t, policy)
    csv_text = trajectory_csv(traj, chosen)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _thread_cap() -> int:
    """Honored as an upper bound on suite parallelism; evaluation is serial."""
    raw = os.environ.get("LATTICE_FLOWS_THREADS")
    if raw is None:
        return 1
    cap = int(raw)
    if cap < 1:
        raise ValueError("LATTICE_FLOWS_THREADS must be a positive integer")
    return cap


def _random_state(rng, chart, sizes):
    if chart == VOLTERRA_U:
        return u_state(rng.uniform(0.1, 2.0, sizes["n"]))
    if chart == VOLTERRA_V:
        return v_state(rng.uniform(0.1, 2.0, sizes["n"]))
    if chart == C_VARS:
        return c_state(rng.uniform(0.1, 2.0, sizes["n"] + 1))
    if chart == FLASCHKA_AB:
        m = sizes["m"]
        return ab_state(rng.uniform(-1.0, 1.0, m + 1), rng.uniform(-1.0, 1.0, m))
    if chart == QP:
        m = sizes["m"]
        return qp_state(rng.uniform(-1.0, 1.0, m), rng.uniform(-1.0, 1.0, m))
    raise ValueError(chart)


def _record(structure, check, n_states, max_residual, tolerance):
    return {
        "structure": structure,
        "check": check,
        "n_states": n_states,
        "max_residual": max_residual,
        "tolerance": tolerance,
        "pass": bool(max_residual <= tolerance),
    }


def _suite_max(rng, chart, sizes, n_states, fn) -> float:
    worst = 0.0
    for _ in range(n_states):
        worst = max(worst, fn(_random_state(rng, chart, sizes)))
    return worst


def _run_verify(args) -> int:
    _thread_cap()
    suite = args.suite
    if suite == "spectrum":
        return _verify_spectrum(args)

    rng = np.random.default_rng(args.seed)
    sizes = {"n": getattr(args, "n", 7), "m": getattr(args, "m", 3)}
    records = []

    if suite == "lax":
        tol = TOLERANCES["lax"]
        system = args.system
        chart = {"km": VOLTERRA_U, "vd": VOLTERRA_V, "toda": FLASCHKA_AB, "ab": FLASCHKA_AB}[system]
        entry = get_system(system)

        def one(state):
            pair = lax.build_lax(system, state)
            return lax.lax_residual(pair, entry.field(state), state)

        def sample(rng):
            if system == "toda":
                n = sizes["n"]
                return ab_state(rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n))
            if system == "ab":
                return _random_state(rng, FLASCHKA_AB, sizes)
            return _random_state(rng, chart, sizes)

        worst = max(one(sample(rng)) for _ in range(args.states))
        records.append(_record(system, "lax-residual", args.states, worst, tol))

    elif suite == "jacobi":
        tol = TOLERANCES["jacobi"]
        struct = poisson.STRUCTURES[args.structure]
        worst = _suite_max(
            rng, struct.chart, sizes, args.states, lambda s: poisson.jacobi_residual(struct, s)
        )
        records.append(_record(args.structure, "jacobi", args.states, worst, tol))

    elif suite == "compat":
        tol = TOLERANCES["compat"]
        pair_names = ("pi1-v", "pi3-v") if args.chart == "v" else ("pi1-ab", "pi3-ab")
        chart = VOLTERRA_V if args.chart == "v" else FLASCHKA_AB
        for lam in [float(x) for x in args.lambdas.split(",")]:
            worst = _suite_max(
                rng,
                chart,
                sizes,
                args.states,
                lambda s: poisson.compatibility_residual(*pair_names, lam, s),
            )
            records.append(
                _record(f"{pair_names[0]}+{lam}*{pair_names[1]}", "compatibility", args.states, worst, tol)
            )

    elif suite == "casimir":
        tol = TOLERANCES["casimir"]
        if args.structure == "pi1-v":
            worst = _suite_max(
                rng,
                VOLTERRA_V,
                sizes,
                args.states,
                lambda s: poisson.casimir_residual("pi1-v", lax.grad_casimir_F, s),
            )
            records.append(_record("pi1-v", "casimir-F", args.states, worst, tol))
        else:
            worst = _suite_max(
                rng,
                FLASCHKA_AB,
                sizes,
                args.states,
                lambda s: poisson.casimir_residual("pi1-ab", lax.grad_casimir_C, s),
            )
            records.append(_record("pi1-ab", "casimir-C", args.states, worst, tol))

    elif suite == "lenard":
        tol = TOLERANCES["lenard"]
        chart = VOLTERRA_V if args.chart == "v" else FLASCHKA_AB
        worst = _suite_max(
            rng, chart, sizes, args.states, lambda s: poisson.lenard_residual(args.chart, s)
        )
        records.append(_record(f"lenard-{args.chart}", "lenard", args.states, worst, tol))

    elif suite == "transform":
        tol = TOLERANCES["transform"]
        worst = _transform_suite(rng, args.map_name, sizes, args.states)
        records.append(_record(args.map_name, "pushforward", args.states, worst, tol))

    elif suite == "involution":
        tol = TOLERANCES["involution"]
        m = sizes["m"]
        for spec_pair in args.pairs.split(","):
            left, right = spec_pair.split(":")
            k1, k2 = int(left[1:]), int(right[1:])

            def one(state, k1=k1, k2=k2):
                g1 = lax.grad_trace_invariant("ab", state, k1)
                g2 = lax.grad_trace_invariant("ab", state, k2)
                pi = poisson.poisson_matrix("pi1-ab", state)
                return abs(complex(g1 @ pi @ g2))

            worst = _suite_max(rng, FLASCHKA_AB, {"m": m}, args.states, one)
            records.append(_record("pi1-ab", f"involution-{left}-{right}", args.states, worst, tol))

    else:
        raise ValueError(f"unknown suite {suite!r}")

    report = {
        "schema": 1,
        "suite": suite,
        "seed": args.seed,
        "rng": RNG_NAME,
        "records": records,
        "pass": all(r["pass"] for r in records),
    }
    print(json.dumps(report, sort_keys=True))
    return 0 if report["pass"] else 1


def _transform_suite(rng, map_name, sizes, n_states) -> float:
    from .rootdata import Spectrum

    n, m = sizes["n"], sizes["m"]
    worst = 0.0
    for _ in range(n_states):
        if map_name == "henon":
            s = u_state(rng.uniform(0.1, 2.0, n))
            r = transforms.pushforward_residual(
                transforms.henon_map, systems.km_field, systems.toda_ab_field, s
            )
        elif map_name == "d-map":
            s = v_state(rng.uniform(0.1, 2.0, n))
            r = transforms.pushforward_residual(
                transforms.d_transform, systems.vd_field, systems.ab_field, s
            )
        elif map_name == "flaschka-sklyanin":
            s = qp_state(rng.uniform(-1, 1, m), rng.uniform(-1, 1, m))
            r = transforms.pushforward_residual(
                transforms.sklyanin_flaschka,
                lambda st: systems.qp_field("sklyanin", st),
                systems.ab_field,
                s,
            )
        elif map_name == "flaschka-toda":
            chain = Spectrum(
                n, tuple(tuple(float(j == i) - float(j == i + 1) for j in range(n)) for i in range(n - 1))
            )
            s = qp_state(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))
            r = transforms.pushforward_residual(
                lambda st: transforms.toda_flaschka(st, chain),
                lambda st: systems.qp_field("toda", st),
                systems.toda_ab_field,
                s,
            )
        elif map_name == "flaschka-general":
            spec = sklyanin_spectrum(n)
            s = qp_state(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))
            r = transforms.pushforward_residual(
                lambda st: transforms.generalized_flaschka(st, spec),
                lambda st: systems.qp_field("sklyanin", st),
                lambda st: systems.spectrum_field(spec, st),
                s,
            )
        elif map_name == "c-to-v":
            s = c_state(rng.uniform(0.1, 2.0, n + 1))
            r = transforms.pushforward_residual(
                transforms.c_to_v,
                lambda st: systems.c_field("D", st),
                systems.vd_field,
                s,
                jacobian=transforms.c_to_v_jacobian,
            )
        else:
            raise ValueError(f"unknown map {map_name!r}")
        worst = max(worst, r)
    return worst


def _verify_spectrum(args) -> int:
    if (args.file is None) == (args.sklyanin is None):
        raise ValueError("provide exactly one of --file or --sklyanin N")
    if args.file:
        with open(args.file) as fh:
            spec = spectrum_from_json(fh.read())
        source = args.file
    else:
        spec = sklyanin_spectrum(args.sklyanin)
        source = f"sklyanin({args.sklyanin})"
    report_obj = kozlov_treshchev_check(spec, tol=args.tol)
    vecs = spec.matrix
    ratios = []
    for i in range(spec.count):
        for j in range(spec.count):
            if i != j:
                ratios.append(
                    [i, j, float(2 * np.dot(vecs[i], vecs[j]) / np.dot(vecs[i], vecs[i]))]
                )
    report = {
        "schema": 1,
        "suite": "spectrum",
        "source": source,
        "tolerance": args.tol,
        "pass": report_obj.passed,
        "violations": [[i, j, r] for i, j, r in report_obj.violations],
        "ratios": ratios,
    }
    print(json.dumps(report, sort_keys=True))
    return 0 if report_obj.passed else 1


if __name__ == "__main__":
    sys.exit(main())
