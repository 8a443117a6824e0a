"""Command-line entry point.

Exit codes: 0 certificate/verdict/target met, 1 clean negative result,
2 input error, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import serialization as io
from .beta_saturation import (
    RANK_TOL,
    STEADY_TOL,
    saturate,
    saturate_constrained,
    theorem1_seeds,
    verify_multiplication_table,
)
from .bracket_calculus import bracket_generating_rank
from .dynamics_steering import ERROR_TARGET, ControlledSystem, integrate, steer
from .errors import DivergenceError, MRBError, ResourceError
from .lie_so_n import index_pairs
from .rigid_body import is_principal_axis, is_steady, steady_residual

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
TABLE_TOL = 1e-9

DEFAULT_TOL = {
    "table": TABLE_TOL,
    "saturate": RANK_TOL,
    "rank": RANK_TOL,
    "steady": STEADY_TOL,
    "steer": ERROR_TARGET,
    "simulate": None,
}


@dataclass
class RunConfig:
    command: str
    body: str
    out: str | None = None
    seed: int = 0
    tol: float | None = None
    paths: dict[str, str] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def tolerance(self) -> float | None:
        return self.tol if self.tol is not None else DEFAULT_TOL[self.command]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--body", required=True, help="body JSON: {'eigenvalues': [...]} or {'C': [[...]]}")
    common.add_argument("--out", help="write the artifact here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--tol", type=float, help="main tolerance of the subcommand")

    p = argparse.ArgumentParser(prog="mrbctl", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("table", parents=[common], help="check beta against the closed-form table")

    s = sub.add_parser("saturate", parents=[common], help="beta-closure of seed directions")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--seeds", help="JSON list of seed directions (optional 'steady' flag each)")
    g.add_argument("--theorem1", action="store_true", help="use Omega^12 and the consecutive-axis sum")
    s.add_argument("--constrained", action="store_true", help="require a steady argument in every pair")
    s.add_argument("--max-rounds", type=int, default=10)
    s.add_argument("--steady-tol", type=float, default=STEADY_TOL)

    r = sub.add_parser("rank", parents=[common], help="bracket-generating rank test")
    r.add_argument("--dirs", required=True)
    r.add_argument("--nu", type=float, default=0.0)
    r.add_argument("--depth", type=int, default=4)
    r.add_argument("--points", type=int, default=5)

    m = sub.add_parser("simulate", parents=[common], help="RK4 trajectory as CSV")
    m.add_argument("--omega0", required=True)
    m.add_argument("--nu", type=float, default=0.0)
    m.add_argument("--T", type=float, required=True)
    m.add_argument("--dt", type=float, default=1e-3)
    m.add_argument("--dirs", help="controlled directions, required with --controls")
    m.add_argument("--controls", help="JSON {'values': r x segments}")

    t = sub.add_parser("steer", parents=[common], help="two-point steering by direct shooting")
    t.add_argument("--dirs", required=True)
    t.add_argument("--from", dest="start", required=True)
    t.add_argument("--to", dest="goal", required=True)
    t.add_argument("--nu", type=float, default=0.0)
    t.add_argument("--T", type=float, default=6.0)
    t.add_argument("--segments", type=int, default=12)
    t.add_argument("--max-iter", type=int, default=100)
    t.add_argument("--restarts", type=int, default=5)
    t.add_argument("--dt", type=float, default=1e-2)

    y = sub.add_parser("steady", parents=[common], help="steady-state and principal-axis test")
    y.add_argument("--g", required=True)
    return p


_PATH_ARGS = ("seeds", "dirs", "omega0", "controls", "start", "goal", "g")
_COMMON = ("command", "body", "out", "seed", "tol")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns)
    paths = {k: d[k] for k in _PATH_ARGS if d.get(k)}
    params = {k: v for k, v in d.items() if k not in _COMMON and k not in _PATH_ARGS}
    return RunConfig(ns.command, ns.body, ns.out, ns.seed, ns.tol, paths, params)


def _load_inputs(cfg: RunConfig) -> dict:
    """Parse every input file before any computation."""
    out = {"body": io.load_body(cfg.body)}
    body = out["body"]
    for key, path in cfg.paths.items():
        if key in ("seeds", "dirs"):
            dirs, raw = io.skew_list_from_json(io.load_json(path), path, key="seeds" if key == "seeds" else "directions")
            out[key] = dirs
            if key == "seeds":
                out["steady_flags"] = [
                    bool(item.get("steady")) if isinstance(item, dict) and "steady" in item else None
                    for item in raw
                ]
        elif key == "controls":
            out[key] = io.load_schedule(path)
        else:
            out[key] = io.load_skew(path)
    for key, val in out.items():
        if key in ("body", "steady_flags", "controls"):
            continue
        for x in val if isinstance(val, list) else [val]:
            body.check(x)
    if "controls" in out:
        if "dirs" not in out:
            raise io.InputError("--controls requires --dirs")
        if out["controls"].shape[0] != len(out["dirs"]):
            raise io.InputError(
                f"{cfg.paths['controls']}: {out['controls'].shape[0]} control rows for {len(out['dirs'])} directions"
            )
    return out


def _emit(cfg: RunConfig, obj: dict) -> None:
    io.write_text(io.dumps(obj) + "\n", cfg.out)


def _cmd_table(cfg, inp) -> int:
    rep = verify_multiplication_table(inp["body"])
    tol = cfg.tolerance
    _emit(cfg, {
        "max_deviation": rep.max_deviation,
        "worst_pair": [list(rep.worst_pair[0]), list(rep.worst_pair[1])],
        "pairs_checked": rep.n_pairs,
        "threshold": tol,
        "pass": rep.max_deviation < tol,
    })
    return EXIT_OK if rep.max_deviation < tol else EXIT_NEGATIVE


def _cmd_saturate(cfg, inp) -> int:
    body, p = inp["body"], cfg.params
    if p["theorem1"]:
        seeds, labels, flags = list(theorem1_seeds(body)), ["G1=Omega^12", "G2=sum Omega^{i,i+1}"], [True, False]
    else:
        seeds = inp["seeds"]
        labels = [f"{cfg.paths['seeds']}[{i}]" for i in range(len(seeds))]
        flags = [
            f if f is not None else is_steady(body, g, p["steady_tol"])
            for f, g in zip(inp["steady_flags"], seeds)
        ]
    if p["constrained"]:
        res = saturate_constrained(
            body, seeds, flags, p["max_rounds"], cfg.tolerance, p["steady_tol"], seed_labels=labels
        )
    else:
        res = saturate(body, seeds, p["max_rounds"], cfg.tolerance, seed_labels=labels)
    _emit(cfg, res.to_json())
    return EXIT_OK if res.certificate else EXIT_NEGATIVE


def _cmd_rank(cfg, inp) -> int:
    p = cfg.params
    rep = bracket_generating_rank(
        inp["body"], inp["dirs"], p["nu"], depth=p["depth"], seed=cfg.seed,
        n_points=p["points"], rank_tol=cfg.tolerance,
    )
    _emit(cfg, rep.to_json())
    return EXIT_OK if rep.verdict else EXIT_NEGATIVE


def _cmd_simulate(cfg, inp) -> int:
    body, p = inp["body"], cfg.params
    system = ControlledSystem(body, p["nu"], inp.get("dirs", ()), inp.get("controls"))
    traj = integrate(system, inp["omega0"], p["T"], p["dt"])
    header = ["t"] + [f"coord_{r}_{s}" for r, s in index_pairs(body.n)]
    rows = np.column_stack([traj.times, traj.coords])
    lines = [",".join(header)] + [",".join(format(v, ".17g") for v in row) for row in rows]
    io.write_text("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _cmd_steer(cfg, inp) -> int:
    p = cfg.params
    system = ControlledSystem(inp["body"], p["nu"], inp["dirs"])
    res = steer(
        system, inp["start"], inp["goal"], p["T"], p["segments"], p["max_iter"], cfg.seed,
        n_starts=p["restarts"], error_target=cfg.tolerance, dt=p["dt"],
    )
    _emit(cfg, res.to_json())
    return EXIT_OK if res.success else EXIT_NEGATIVE


def _cmd_steady(cfg, inp) -> int:
    body, g = inp["body"], inp["g"]
    tol = cfg.tolerance
    resid = steady_residual(body, g)
    steady = is_steady(body, g, tol)
    principal, mu = is_principal_axis(body, g, tol) if g.norm() > 0 else (False, float("nan"))
    _emit(cfg, {"residual": resid, "steady": bool(steady), "principal_axis": principal, "mu": mu})
    return EXIT_OK if steady else EXIT_NEGATIVE


COMMANDS = {
    "table": _cmd_table,
    "saturate": _cmd_saturate,
    "rank": _cmd_rank,
    "simulate": _cmd_simulate,
    "steer": _cmd_steer,
    "steady": _cmd_steady,
}


def run(cfg: RunConfig) -> int:
    try:
        if cfg.out and not Path(cfg.out).resolve().parent.is_dir():
            raise io.InputError(f"{cfg.out}: output directory does not exist")
        inputs = _load_inputs(cfg)
        return COMMANDS[cfg.command](cfg, inputs)
    except ResourceError as e:
        print(f"error: resource cap '{e.cap}' hit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    except MRBError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
