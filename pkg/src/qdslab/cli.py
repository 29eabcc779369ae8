"""Command-line harness.

    qdslab certify  SCENARIO [--n-max N] [--tol T] [--seed S] [--out FILE]
    qdslab evolve   SCENARIO --t-grid a:b:step --observable LABEL [--out FILE]
    qdslab lattice  SCENARIO [--out FILE]
    qdslab gns      SCENARIO [--n-max N] [--out FILE]

Exit codes: 0 all checks pass, 1 a violation was found (witness in the
report), 2 invalid input. Reports are JSON with sorted keys and no
timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile

from . import __version__
from .algebra import operator_norm
from .dissipativity import _jsonable, certify_completely_dissipative
from .errors import HypothesisViolation, ScenarioError
from .gns import implementation_report
from .lattice import (
    LatticeRegion,
    convergence_diagnostic,
    derivative_check,
    embed_observable,
    finite_volume_dynamics,
    local_hamiltonian,
    ruelle_bound,
)
from .scenario import Scenario, parse_scenario, parse_t_grid
from .semigroup import cp_grid, evolve, write_trajectory_csv

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2
TOOL = "qdslab"


def _clean(value):
    """JSON-safe: NaN/inf become None, numpy scalars become Python numbers."""
    value = _jsonable(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clean(v) for v in value]
    return value


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _report(command: str, sc: Scenario, body: dict, verdict: str) -> str:
    doc = {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "seed": sc.seed,
        "scenario": sc.to_json(),
        "verdict": verdict,
        **body,
    }
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _load(args) -> Scenario:
    sc = parse_scenario(args.scenario)
    return sc.with_overrides(
        seed=args.seed, tol=args.tol, n_max=getattr(args, "n_max", None)
    )


def cmd_certify(args) -> int:
    sc = _load(args)
    if sc.kind != "generator":
        raise ScenarioError("certify needs a generator scenario", "generator")
    delta = sc.generator()
    run = sc.run
    rep = certify_completely_dissipative(
        delta,
        n_max=run["n_max"],
        sample_count=run["sample_count"],
        alpha_grid=run.get("alpha_grid"),
        t_grid=run["t_grid"],
        seed=run["seed"],
        tol=run["tol"],
    )
    cp = cp_grid(delta, run["t_grid"], tol=run["tol"])
    ok = rep.ok and cp["pass"]
    _emit(_report("certify", sc, {"dissipativity": rep.to_json(), "cp_grid": cp}, "pass" if ok else "fail"), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_evolve(args) -> int:
    sc = _load(args)
    times = parse_t_grid(args.t_grid)
    x, support = sc.observable(args.observable)
    if sc.kind == "generator":
        traj = evolve(sc.generator(), x, times)
    else:
        region = sc.region()
        phi = sc.interaction()
        xa = embed_observable(x, support, region)
        traj = [finite_volume_dynamics(phi, region, t, xa) for t in times]
    buf = io.StringIO()
    write_trajectory_csv(buf, args.observable, times, traj)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _lattice_body(sc: Scenario) -> tuple[dict, bool]:
    lat = sc.data["lattice"]
    run = sc.run
    tol = run["tol"]
    phi = sc.interaction()
    region = sc.region()
    H = local_hamiltonian(phi, region)
    herm = operator_norm(H - H.adjoint())
    body = {"region": [region.lo, region.hi], "hamiltonian_hermiticity_defect": herm}
    ok = herm <= 1e-12
    if phi.translation_invariant:
        rb = ruelle_bound(phi, lat.get("lambda", 1.0), n_max=max((len(o) for o, _ in phi.terms), default=1))
        body["ruelle_bound"] = {"lambda": lat.get("lambda", 1.0), "value": rb.value,
                                "contributions": list(rb.contributions), "exact": rb.exact, "tail": rb.tail}
    t = run.get("t", 0.2)
    t_small = run.get("t_small", 0.01)
    obs = {}
    for label in sorted(sc.data["observables"]):
        a, support = sc.observable(label)
        entry = {}
        if "volumes" in lat:
            volumes = [LatticeRegion(lo, hi, region.q) for lo, hi in lat["volumes"]]
        else:
            volumes = [v for v in (LatticeRegion(support.lo - r, support.hi + r, region.q) for r in (1, 2, 3))
                       if region.contains(v)]
        if len(volumes) >= 2:
            cd = convergence_diagnostic(phi, a, support, t, volumes)
            inner = cd.strictly_decreasing or max(cd.gaps) <= tol
            entry["convergence"] = {"t": t, "volumes": [[v.lo, v.hi] for v in volumes], "gaps": list(cd.gaps),
                                    "strictly_decreasing": cd.strictly_decreasing,
                                    "approximately_inner_at_tested_scale": inner}
            ok &= inner
        xa = embed_observable(a, support, region)
        r1 = derivative_check(phi, region, xa, t_small)
        r2 = derivative_check(phi, region, xa, t_small / 2)
        ratio = r1 / r2 if r2 > 0 else None
        d_ok = (r1 <= tol) or (ratio is not None and 1.7 <= ratio <= 2.3)
        entry["derivative"] = {"t_small": t_small, "residual": r1, "residual_half": r2, "ratio": ratio, "ok": d_ok}
        at = finite_volume_dynamics(phi, region, t, xa)
        iso = abs(operator_norm(at) - operator_norm(xa))
        entry["isometry_defect"] = iso
        ok &= d_ok and iso <= 1e-10
        obs[label] = entry
    body["observables"] = obs
    return body, ok


def cmd_lattice(args) -> int:
    sc = _load(args)
    if sc.kind != "lattice":
        raise ScenarioError("lattice command needs a lattice scenario", "lattice")
    body, ok = _lattice_body(sc)
    _emit(_report("lattice", sc, body, "pass" if ok else "fail"), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_gns(args) -> int:
    sc = _load(args)
    if sc.kind != "generator":
        raise ScenarioError("gns needs a generator scenario", "generator")
    delta = sc.generator()
    omega = sc.state()
    run = sc.run
    tol = max(run["tol"], 1e-8)
    try:
        rep = implementation_report(delta, omega, n_max=min(run["n_max"], 3), tol=tol, seed=run["seed"])
        body = {"gns": rep.to_json()}
        ok = rep.ok
    except HypothesisViolation as exc:
        partial = exc.report.to_json() if exc.report is not None else None
        body = {"gns": partial, "finding": str(exc)}
        ok = False
    _emit(_report("gns", sc, body, "pass" if ok else "fail"), args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Dissipative generators and quantum dynamical semigroups")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--n-max", type=int, default=None, dest="n_max")
        p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("certify", help="complete dissipativity and CP of the semigroup")
    common(p)
    p.set_defaults(func=cmd_certify)
    p = sub.add_parser("evolve", help="trajectory CSV of an observable")
    common(p)
    p.add_argument("--t-grid", required=True, help="start:stop:step (stop inclusive)")
    p.add_argument("--observable", required=True)
    p.set_defaults(func=cmd_evolve)
    p = sub.add_parser("lattice", help="local Hamiltonian, summability bound and finite-volume convergence")
    common(p)
    p.set_defaults(func=cmd_lattice)
    p = sub.add_parser("gns", help="implementing operator in the GNS representation")
    common(p)
    p.set_defaults(func=cmd_gns)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
