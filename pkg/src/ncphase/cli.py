"""Command-line front end.

Subcommands: simulate (trajectory file), orbit (orbit-structure dump),
verify (machine-readable property report), couple (one-shot coordinate
transform).  Options may come from a flat key=value config file with
command-line flags taking precedence.

Exit codes: 0 success, 1 validation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .lie import AlgebraParams
from .orbit import (
    DualPoint,
    OrbitParams,
    casimir_u,
    orbit_structure_2d,
    orbit_structure_3d,
)
from .ncps import PhasePoint, PoissonStructure, couple, decouple, invertibility_margin
from .dynamics import ScenarioParams, build_scenario, integrate
from .verify import run_verification

SCENARIOS = ("electron", "spring", "pendulum", "anh1d", "anh2d", "anh3d")
FLOAT_KEYS = (
    "m", "h", "omega", "c", "r", "e", "B", "estar", "Bstar", "k", "t_end", "dt"
)
VECTOR_KEYS = ("E", "Estar", "z0")


def _fmt(x: float) -> str:
    return "%.17g" % x


def read_config(path: str) -> dict:
    """Flat key=value file; blank lines and #-comments ignored."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ncphase",
        description="Noncommutative phase-space simulation and verification.",
    )
    ap.add_argument("command", choices=("simulate", "orbit", "verify", "couple"))
    ap.add_argument("config", nargs="?", help="optional key=value config file")
    ap.add_argument("--scenario", choices=SCENARIOS)
    ap.add_argument("--sign", choices=("plus", "minus"))
    for key in FLOAT_KEYS:
        flag = "--t-end" if key == "t_end" else f"--{key}"
        ap.add_argument(flag, dest=key, type=float)
    for key in VECTOR_KEYS:
        ap.add_argument(f"--{key}", dest=key, help="comma-separated components")
    ap.add_argument("--method", choices=("rk4", "darboux_exactified"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--output")
    ap.add_argument("--format", dest="fmt", choices=("csv", "json"))
    return ap


def merge_options(args: argparse.Namespace) -> dict:
    """Config-file values with flag overrides (flags win)."""
    opts: dict = {}
    if args.config:
        raw = read_config(args.config)
        for key, val in raw.items():
            if key in FLOAT_KEYS:
                opts[key] = float(val)
            elif key in VECTOR_KEYS:
                opts[key] = val
            elif key == "seed":
                opts[key] = int(val)
            elif key == "format":
                opts["fmt"] = val
            elif key in ("scenario", "sign", "method", "output"):
                opts[key] = val
            else:
                raise ValueError(f"unknown config key {key!r}")
    for key in (
        list(FLOAT_KEYS) + list(VECTOR_KEYS)
        + ["scenario", "sign", "method", "seed", "output", "fmt"]
    ):
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    return opts


def _vector(opts: dict, key: str, n: int | None = None) -> np.ndarray | None:
    if key not in opts or opts[key] is None:
        return None
    v = np.array([float(tok) for tok in str(opts[key]).split(",")])
    if n is not None and v.size != n:
        raise ValueError(f"{key} must have {n} components, got {v.size}")
    return v


def _algebra_from(opts: dict) -> AlgebraParams:
    dim = int(opts["scenario"][-2])  # anh1d/anh2d/anh3d
    return AlgebraParams(
        dim=dim,
        sign=opts.get("sign", "minus"),
        omega=opts.get("omega", 1.0),
        c=opts.get("c", 1.0) if dim >= 2 else None,
        r=opts.get("r", 1.0) if dim >= 2 else None,
    )


def _dual_from(opts: dict, dim: int) -> DualPoint:
    z0 = _vector(opts, "z0")
    if z0 is not None and z0.size != 2 * dim:
        raise ValueError(f"z0 must have {2 * dim} components (p then k)")
    p = z0[:dim] if z0 is not None else np.zeros(dim)
    k = z0[dim:] if z0 is not None else np.zeros(dim)
    h = opts.get("h")
    if dim == 3 and h is not None:
        h = np.array([0.0, 0.0, h])
    return DualPoint(m=opts.get("m", 1.0), k=k, p=p, e=opts.get("e", 0.0), h=h)


def _scenario_from(opts: dict):
    name = opts.get("scenario")
    if name is None:
        raise ValueError("missing required option: scenario")
    if name.startswith("anh"):
        alg = _algebra_from(opts)
        xi = _dual_from(opts, alg.dim)
        return build_scenario(name, algebra=alg, xi=xi)
    sp = ScenarioParams(
        m=opts.get("m", 1.0),
        e=opts.get("e", 0.0),
        B=opts.get("B", 0.0),
        Evec=_vector(opts, "E", 2),
        estar=opts.get("estar", 0.0),
        Bstar=opts.get("Bstar", 0.0),
        Estar=_vector(opts, "Estar", 2),
        k=opts.get("k", 0.0),
        omega=opts.get("omega"),
    )
    return build_scenario(name, sp)


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_ready(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def cmd_simulate(opts: dict) -> int:
    scenario = _scenario_from(opts)
    n = scenario.n
    t_end = opts.get("t_end", 10.0)
    dt = opts.get("dt", 1e-3)
    if not dt < t_end:
        raise ValueError("dt must be smaller than t_end")
    z0v = _vector(opts, "z0", 2 * n)
    if z0v is None:
        # zero momenta, unit displacement along the first axis
        z0v = np.zeros(2 * n)
        z0v[n] = 1.0
    z0 = PhasePoint(p=z0v[:n], q=z0v[n:], chart=scenario.chart)
    traj = integrate(
        scenario.ps, scenario.hamiltonian, z0, t_end=t_end, dt=dt,
        method=opts.get("method", "rk4"), casimir=scenario.casimir,
    )

    coupled = scenario.name in ("electron", "spring", "pendulum")
    rows_pq, rows_pix = [], []
    for z in traj.states:
        if coupled:
            p, q = decouple(scenario.ps, z.p, z.q)
            rows_pq.append((p, q))
            rows_pix.append((z.p, z.q))
        else:
            rows_pq.append((z.p, z.q))
            rows_pix.append((None, None))

    if opts.get("fmt", "csv") == "json":
        doc = {
            "scenario": scenario.name,
            "t": traj.times,
            "p": [pq[0] for pq in rows_pq],
            "q": [pq[1] for pq in rows_pq],
            "pi": [px[0] for px in rows_pix] if coupled else None,
            "x": [px[1] for px in rows_pix] if coupled else None,
            "H": traj.energy,
            "U": traj.casimir,
            "L": traj.angular_momentum,
        }
        _write(json.dumps(_json_ready(doc), indent=2) + "\n", opts.get("output"))
        return 0

    header = (
        ["t"]
        + [f"p{i+1}" for i in range(n)]
        + [f"q{i+1}" for i in range(n)]
        + [f"pi{i+1}" for i in range(n)]
        + [f"x{i+1}" for i in range(n)]
        + ["H", "U", "L"]
    )
    lines = [",".join(header)]
    for i, t in enumerate(traj.times):
        p, q = rows_pq[i]
        pi, x = rows_pix[i]
        cells = [_fmt(t)]
        cells += [_fmt(v) for v in p] + [_fmt(v) for v in q]
        cells += [_fmt(v) for v in pi] + [_fmt(v) for v in x] if coupled else [""] * (2 * n)
        cells.append(_fmt(traj.energy[i]))
        cells.append(_fmt(traj.casimir[i]) if traj.casimir is not None else "")
        cells.append(
            _fmt(traj.angular_momentum[i]) if traj.angular_momentum is not None else ""
        )
        lines.append(",".join(cells))
    _write("\n".join(lines) + "\n", opts.get("output"))
    return 0


def cmd_orbit(opts: dict) -> int:
    name = opts.get("scenario")
    if name not in ("anh1d", "anh2d", "anh3d"):
        raise ValueError("orbit command requires scenario anh1d, anh2d or anh3d")
    alg = _algebra_from(opts)
    xi = _dual_from(opts, alg.dim)
    doc: dict = {
        "scenario": name,
        "sign": alg.sign,
        "casimir_u": casimir_u(alg, xi),
    }
    if alg.dim == 1:
        doc["note"] = "1D orbit is canonical; see casimir_u"
    else:
        op = OrbitParams(algebra=alg, xi=xi)
        orbit = orbit_structure_2d(op) if alg.dim == 2 else orbit_structure_3d(op)
        doc.update(
            {
                "omega_matrix": orbit.omega_matrix,
                "poisson_matrix": orbit.poisson_matrix,
                "F": orbit.F,
                "G": orbit.G,
                "pairing": orbit.pairing,
                "degenerate": orbit.degenerate,
                "det": orbit.det,
                "mu_e": orbit.mu_e,
                "A": orbit.A,
                "closed_form": orbit.closed_form,
            }
        )
    _write(json.dumps(_json_ready(doc), indent=2) + "\n", opts.get("output"))
    return 0


def cmd_couple(opts: dict) -> int:
    from .lie import EPS2

    eB = opts.get("e", 0.0) * opts.get("B", 0.0)
    estarBstar = opts.get("estar", 0.0) * opts.get("Bstar", 0.0)
    # pairing is irrelevant to the transform itself; identity keeps the
    # structure constructible even when the mixed gamma vanishes
    ps = PoissonStructure(n=2, F=-eB * EPS2, G=-estarBstar * EPS2, pairing=np.eye(2))
    z0 = _vector(opts, "z0", 4)
    if z0 is None:
        z0 = np.zeros(4)
    p, q = z0[:2], z0[2:]
    pi, x = couple(ps, p, q)
    doc = {
        "p": p, "q": q, "pi": pi, "x": x,
        "invertibility_margin": invertibility_margin(ps),
    }
    _write(json.dumps(_json_ready(doc), indent=2) + "\n", opts.get("output"))
    return 0


def cmd_verify(opts: dict) -> int:
    report = run_verification(seed=opts.get("seed", 0))
    _write(json.dumps(_json_ready(report), indent=2) + "\n", opts.get("output"))
    return 0 if report["status"] == "pass" else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = merge_options(args)
        if args.command == "simulate":
            return cmd_simulate(opts)
        if args.command == "orbit":
            return cmd_orbit(opts)
        if args.command == "couple":
            return cmd_couple(opts)
        return cmd_verify(opts)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
