"""Command-line front end: path generation, solves, and estimate reports.

Exit codes: 0 success, 2 configuration/validation failure, 3 numerical
failure (blow-up or non-convergence, with a diagnostic JSON on stderr),
64 unknown subcommand.

Thread handling: --threads (fallback: the YNLS_THREADS environment
variable, then all cores) is resolved before any numerical module is
imported, so the BLAS thread variables set here actually take effect;
the same count drives the FFT worker pool. Library code imported
directly, without the CLI, stays single-threaded by default.

This module deliberately imports only the standard library at the top
level; numpy-heavy modules load inside the subcommand handlers.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import BlowUpError, ConfigError, NonConvergenceError, NumericsError

_COMMANDS = ("gen-path", "irregularity", "solve", "converge",
             "verify-estimates", "xnorm")
_USAGE = ("usage: modnls {gen-path|irregularity|solve|converge|"
          "verify-estimates|xnorm} [--threads N] [options]\n")


def _resolve_threads(argv) -> int:
    val = None
    for i, tok in enumerate(argv):
        if tok == "--threads" and i + 1 < len(argv):
            val = argv[i + 1]
        elif tok.startswith("--threads="):
            val = tok.split("=", 1)[1]
    if val is None:
        val = os.environ.get("YNLS_THREADS")
    if val is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(val))
    except ValueError:
        raise ConfigError(f"--threads expects an integer, got {val!r}")


def _setup_threads(n: int) -> None:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    from . import _runtime
    _runtime.set_workers(n)


def _write_json(obj, filename) -> None:
    with open(filename, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _diag(exc) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("step", "norm", "limit", "iterations", "residuals", "tol"):
        if hasattr(exc, attr):
            v = getattr(exc, attr)
            out[attr] = list(v) if isinstance(v, (list, tuple)) else v
    return out


def _parser(cmd: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"modnls {cmd}")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (already applied; listed for --help)")
    return p


def _cmd_gen_path(rest) -> int:
    p = _parser("gen-path")
    p.add_argument("--kind", required=True,
                   choices=["linear", "constant", "fbm", "modulated"])
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--H", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--profile", default=None)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    import numpy as np

    from . import paths
    if args.kind == "linear":
        path = paths.make_linear_path(args.T, args.M)
    elif args.kind == "constant":
        if args.c is None:
            raise ConfigError("--kind constant needs --c")
        path = paths.make_constant_path(args.c, args.T, args.M)
    elif args.kind == "fbm":
        if args.H is None or args.seed is None:
            raise ConfigError("--kind fbm needs --H and --seed")
        path = paths.make_fbm_path(args.H, args.T, args.M, args.seed)
    else:
        if args.eps is None or args.profile is None:
            raise ConfigError("--kind modulated needs --eps and --profile")
        prof = np.loadtxt(args.profile, delimiter=",").ravel()
        path = paths.make_modulated_path(prof, args.eps, args.T, args.M)
    paths.save_path_csv(path, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_irregularity(rest) -> int:
    p = _parser("irregularity")
    p.add_argument("--path", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--amax", type=float, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    from . import paths, phi
    path = paths.load_path_csv(args.path)
    n_scales = max(1, int(math.floor(math.log2(max(2, path.M)))) - 1)
    per_scale = max(1, round(args.pairs / n_scales))
    pairs = phi.default_pairs(path, per_scale=per_scale)
    a_grid = phi.default_a_grid(args.amax)
    rep = phi.irregularity_norm(path, args.rho, args.gamma, a_grid, pairs)
    _write_json(rep.to_json_dict(), args.out)
    print(f"wrote {args.out}")
    return 0


def _path_from_spec(spec):
    from . import paths
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("path spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "linear":
            return paths.make_linear_path(spec["T"], spec["M"])
        if kind == "constant":
            return paths.make_constant_path(spec["c"], spec["T"], spec["M"])
        if kind == "fbm":
            return paths.make_fbm_path(spec["H"], spec["T"], spec["M"],
                                       spec["seed"])
        if kind == "file":
            return paths.load_path_csv(spec["file"])
    except KeyError as e:
        raise ConfigError(f"path spec is missing {e}")
    raise ConfigError(f"unknown path kind {kind!r}")


def _init_from_spec(spec, d: int, k: int, N: int):
    from . import solver, spectral
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("init spec must be an object with a 'type'")
    try:
        if spec["type"] == "file":
            return spectral.load_state_csv(spec["file"])
        if spec["type"] == "plane_wave":
            c = spec["c"]
            c = complex(c[0], c[1]) if isinstance(c, list) else complex(c)
            return solver.plane_wave_exact(c, spec["m"], None, 0.0, k, N)
        if spec["type"] == "random":
            return spectral.random_state(d, N, spec["s"], spec["seed"],
                                         scale=spec.get("scale", 1.0))
    except KeyError as e:
        raise ConfigError(f"init spec is missing {e}")
    raise ConfigError(f"unknown init type {spec['type']!r}")


def _load_experiment(args):
    from . import paths, phi, solver, spectral
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {args.config}: {e}")
    if getattr(args, "path", None):
        path = paths.load_path_csv(args.path)
    elif "path" in raw:
        path = _path_from_spec(raw["path"])
    else:
        raise ConfigError("no modulation path: pass --path or a config path spec")
    try:
        lam = raw["lambda"] if "lambda" in raw else raw["lam"]
        cfg = solver.SolverConfig(
            d=raw["d"], k=raw["k"], N=raw["N"], s=raw["s"],
            gamma=raw["gamma"], lam=lam, rho=raw["rho"], T=raw["T"],
            partition=solver.uniform_partition(raw["T"], raw["M"]),
            scheme=raw.get("scheme", "picard"), tol=raw.get("tol", 1e-10),
            max_iter=raw.get("max_iter", 50),
            allow_large=raw.get("allow_large", False))
    except KeyError as e:
        raise ConfigError(f"config is missing key {e}")
    if abs(path.T - cfg.T) > 1e-12 * max(1.0, cfg.T):
        raise ConfigError(f"path horizon {path.T} differs from config T {cfg.T}")
    if getattr(args, "init", None):
        phi0 = spectral.load_state_csv(args.init)
    elif "init" in raw:
        phi0 = _init_from_spec(raw["init"], cfg.d, cfg.k, cfg.N)
    else:
        raise ConfigError("no initial data: pass --init or a config init spec")
    if (phi0.d, phi0.N) != (cfg.d, cfg.N):
        raise ConfigError(
            f"initial data box ({phi0.d}, {phi0.N}) does not match the "
            f"config ({cfg.d}, {cfg.N})")
    mu_max = (2 * cfg.k + 2) * cfg.d * cfg.N * cfg.N
    table = phi.build_phi_table(path, mu_max)
    return cfg, path, phi0, table


def _run_scheme(cfg, phi0, table):
    from . import solver
    if cfg.scheme == "euler_young":
        return solver.solve_euler_young(cfg, phi0, table)
    return solver.solve_picard(cfg, phi0, table)


def _trajectory_report(cfg, traj) -> dict:
    from . import spectral
    norms = [spectral.hs_norm(st, cfg.s) for st in traj.states]
    mass = [spectral.hs_norm(st, 0.0) for st in traj.states]
    drift = 0.0
    if mass[0] > 0:
        drift = max(abs(m - mass[0]) for m in mass) / mass[0]
    return {
        "scheme": traj.meta.get("scheme", cfg.scheme),
        "iterations": traj.meta.get("iterations"),
        "residuals": traj.meta.get("residuals", []),
        "times": [float(t) for t in traj.times],
        "norms": norms,
        "mass": mass,
        "mass_drift": drift,
    }


def _cmd_solve(rest) -> int:
    p = _parser("solve")
    p.add_argument("--config", required=True)
    p.add_argument("--path", default=None)
    p.add_argument("--init", default=None)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    from . import spectral
    cfg, path, phi0, table = _load_experiment(args)
    traj = _run_scheme(cfg, phi0, table)
    os.makedirs(args.out, exist_ok=True)
    width = max(4, len(str(len(traj.states) - 1)))
    for i, st in enumerate(traj.states):
        spectral.save_state_csv(st, os.path.join(args.out,
                                                 f"state_{i:0{width}d}.csv"))
    report = _trajectory_report(cfg, traj)
    _write_json(report, os.path.join(args.out, "report.json"))
    print(f"wrote {args.out}/report.json")
    return 0


def _cmd_converge(rest) -> int:
    p = _parser("converge")
    p.add_argument("--config", required=True)
    p.add_argument("--path", default=None)
    p.add_argument("--init", default=None)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    from dataclasses import replace

    from . import solver, spectral
    if args.levels < 2:
        raise ConfigError("--levels must be at least 2")
    cfg, path, phi0, table = _load_experiment(args)
    M = cfg.partition.size - 1
    if M % (1 << (args.levels - 1)):
        raise ConfigError(
            f"M={M} is not divisible by 2^{args.levels - 1}; "
            "choose M with enough factors of two for the levels")
    trajs = []
    meshes = []
    for lev in range(args.levels):
        Ml = M >> lev
        c = replace(cfg, partition=solver.uniform_partition(cfg.T, Ml))
        trajs.append(_run_scheme(c, phi0, table))
        meshes.append(cfg.T / Ml)
    finest = trajs[0].states[-1]
    errors = []
    ref = spectral.hs_norm(finest, cfg.s)
    for lev in range(1, args.levels):
        diff = spectral.SpectralState(
            cfg.d, cfg.N, trajs[lev].states[-1].coeffs - finest.coeffs)
        e = spectral.hs_norm(diff, cfg.s)
        errors.append(e / ref if ref > 0 else e)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "convergence.csv")
    with open(csv_path, "w") as fh:
        fh.write("mesh,error,order\n")
        # coarsest first; order compares against the next finer level
        for i in range(args.levels - 1, 0, -1):
            if i > 1 and errors[i - 1] > 0 and errors[i - 2] > 0:
                order = f"{math.log2(errors[i - 1] / errors[i - 2]):.17g}"
            else:
                order = ""
            fh.write(f"{meshes[i]:.17g},{errors[i - 1]:.17g},{order}\n")
    print(f"wrote {csv_path}")
    return 0


def _cmd_verify_estimates(rest) -> int:
    p = _parser("verify-estimates")
    p.add_argument("--which", required=True,
                   choices=["eq21", "eq26", "eq27", "counting"])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--sprime", type=float, default=0.0)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", default=None,
                   help="comma-separated dyadic blocks for eq26/eq27 "
                        "(default: N for every slot)")
    p.add_argument("--mu", type=int, default=0, help="eq26 class offset")
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    from . import resonance
    if args.which == "counting":
        rep = resonance.verify_counting_partition(args.N, args.d, args.k)
        payload = {"which": "counting", **rep.to_json_dict()}
    elif args.which == "eq21":
        s = args.s
        if s is None:
            s = args.d / 2 - args.rho / args.k + 0.1
        rep = resonance.estimate_ratio_eq21(
            args.d, args.k, args.rho, s, args.sprime, args.q, args.N,
            args.trials, args.seed)
        payload = rep.to_json_dict()
    else:
        if args.blocks:
            blocks = tuple(int(b) for b in args.blocks.split(","))
        else:
            blocks = (args.N,) * (2 * args.k + 2)
        s = args.s if args.s is not None else 0.1
        mu = args.mu if args.which == "eq26" else None
        rep = resonance.dyadic_block_ratio(args.which, blocks, mu, args.d,
                                           args.k, s, args.trials, args.seed)
        payload = rep.to_json_dict()
    _write_json(payload, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_xnorm(rest) -> int:
    p = _parser("xnorm")
    p.add_argument("--path", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    args = p.parse_args(rest)
    from . import paths, phi, young
    path = paths.load_path_csv(args.path)
    mu_max = (2 * args.k + 2) * args.d * args.N * args.N
    table = phi.build_phi_table(path, mu_max)
    cfg = young.YoungKernelConfig(args.d, args.k, args.N, table)
    val = young.x_norm_estimate(cfg, args.gamma, args.s, args.trials,
                                args.seed)
    payload = {"norm_estimate": val, "gamma": args.gamma, "s": args.s,
               "d": args.d, "k": args.k, "N": args.N,
               "trials": args.trials, "seed": args.seed}
    _write_json(payload, args.out)
    print(f"wrote {args.out}")
    return 0


_HANDLERS = {
    "gen-path": _cmd_gen_path,
    "irregularity": _cmd_irregularity,
    "solve": _cmd_solve,
    "converge": _cmd_converge,
    "verify-estimates": _cmd_verify_estimates,
    "xnorm": _cmd_xnorm,
}


def run_command(argv) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    argv = list(argv)
    if argv and argv[0] in ("-h", "--help"):
        sys.stdout.write(_USAGE)
        return 0
    if not argv or argv[0] not in _COMMANDS:
        sys.stderr.write(_USAGE)
        return 64
    try:
        _setup_threads(_resolve_threads(argv))
        return _HANDLERS[argv[0]](argv[1:])
    except ConfigError as e:
        sys.stderr.write(json.dumps(_diag(e)) + "\n")
        return 2
    except (BlowUpError, NonConvergenceError, NumericsError) as e:
        sys.stderr.write(json.dumps(_diag(e)) + "\n")
        return 3
    except SystemExit as e:
        code = e.code
        if code in (0, None):
            return 0
        return 2
    except ValueError as e:
        # bad numeric input surfaced below the config layer
        sys.stderr.write(json.dumps(_diag(e)) + "\n")
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
