"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
import time
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .discord import MeasurementSearch, discord
from .gates import CartanCoordinates, canonical_coordinates, gate_from_coords, named_gate, NAMED_MATRICES
from .mdms import BoundarySearch, boundary_curve
from .power import PowerSearchConfig, angle_sweep, power_curve
from .states import RandomStateConfig, load_matrix, load_state, purity, sample_random_states
from .verification import run_all

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "DISCPOWER_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_ANGLE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*(\*?\s*pi)?\s*$")


def parse_angle(text: str) -> float:
    """'0.25pi', '0.25*pi', 'pi' or plain radians."""
    m = _ANGLE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise UsageError(f"cannot parse angle {text!r}")
    value = float(m.group(1)) if m.group(1) is not None else 1.0
    return value * np.pi if m.group(2) else value


def parse_coords(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("--coords needs three comma-separated angles")
    return tuple(parse_angle(p) for p in parts)


def parse_grid(text: str) -> list[float]:
    """'start:stop:step' (inclusive) or a comma list."""
    if ":" in text:
        try:
            start, stop, step = (float(x) for x in text.split(":"))
        except ValueError:
            raise UsageError(f"bad grid {text!r}") from None
        if step <= 0:
            raise UsageError("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(n)]
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.15g}"


def fmt_pi(x: float) -> str:
    if abs(x) < 1e-12:
        return "0"
    return f"{x / np.pi:.6g}π"


def _jsonable(obj):
    if is_dataclass(obj):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_csv(path, header, rows, manifest: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    if manifest is not None:
        Path(str(path) + ".manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")


def _manifest(args, config: dict, seed, t0) -> dict:
    argv = {k: v for k, v in vars(args).items() if k not in ("func", "argv")}
    return {
        "subcommand": args.command,
        "argv": args.argv,
        "arguments": argv,
        "config": config,
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }


def write_gnuplot(csv_path, header) -> Path:
    gp = Path(str(csv_path) + ".gp")
    gp.write_text(
        "set datafile separator ','\n"
        f"set xlabel '{header[0]}'\nset ylabel '{header[1]}'\n"
        f"plot '{Path(csv_path).name}' every ::1 using 1:2 with linespoints title '{header[1]}'\n"
    )
    return gp


def _emit(args, header, rows, config, seed, t0):
    rows = list(rows)
    if args.out:
        write_csv(args.out, header, rows, _manifest(args, config, seed, t0))
        if getattr(args, "gnuplot", False):
            write_gnuplot(args.out, header)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _search_from(args) -> MeasurementSearch:
    return MeasurementSearch(n_theta=args.n_theta, n_phi=args.n_phi, refine=not args.no_refine)


def _gate_coords(args) -> CartanCoordinates:
    if getattr(args, "named", None):
        return named_gate(args.named).coords
    if getattr(args, "coords", None):
        return gate_from_coords(parse_coords(args.coords)).coords.normalized()
    if getattr(args, "file", None):
        return canonical_coordinates(load_matrix(args.file))
    raise UsageError("give one of --named, --coords or --file")


def _power_config(args, mu: float) -> PowerSearchConfig:
    make = PowerSearchConfig.full if args.preset == "full" else PowerSearchConfig
    kw = {"seed": args.seed, "refine": not args.no_refine}
    if args.budget is not None:
        kw["budget"] = args.budget
    if args.prob_samples is not None:
        kw["prob_samples"] = args.prob_samples
    if args.angle_step is not None:
        kw["angle_step"] = parse_angle(args.angle_step)
    return make(mu=mu, **kw)


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    return int(os.environ.get(THREADS_ENV, "1"))


# -- subcommands -----------------------------------------------------------


def cmd_discord(args) -> int:
    rho = load_state(args.state)
    rep = discord(rho, _search_from(args))
    for k, v in asdict(rep).items():
        if isinstance(v, tuple):
            print(f"{k} = ({v[0]:.9f}, {v[1]:.9f})")
        else:
            print(f"{k} = {v:.9f}")
    print(f"delta = {rep.symmetric:.6f}")
    return EXIT_OK


def cmd_power(args) -> int:
    t0 = time.perf_counter()
    coords = _gate_coords(args)
    if args.purity is None and args.purity_grid is None:
        raise UsageError("give --purity or --purity-grid")
    mus = [args.purity] if args.purity is not None else parse_grid(args.purity_grid)
    cfg = _power_config(args, mus[0])
    results = power_curve(coords, mus, cfg, workers=_workers(args))
    rows = [(r.mu, r.dp, *r.coords, r.n_evals) for r in results]
    _emit(args, ["mu", "dp", "theta_x", "theta_y", "theta_z", "n_evals"], rows,
          {"coords": list(coords), "search": {k: v for k, v in asdict(cfg).items() if k != "mu"}}, args.seed, t0)
    return EXIT_OK


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    if args.alpha_grid:
        alphas = [parse_angle(a) for a in args.alpha_grid.split(",")]
    else:
        alphas = list(np.linspace(0, np.pi / 4, args.points))
    cfg = _power_config(args, args.purity)
    res = angle_sweep(args.family, args.purity, alphas, cfg, workers=_workers(args))
    _emit(args, ["alpha", "dp"], [(a, r.dp) for a, r in res], {"family": args.family, "search": cfg}, args.seed, t0)
    return EXIT_OK


def cmd_boundary(args) -> int:
    t0 = time.perf_counter()
    mus = parse_grid(args.purity_grid) if args.purity_grid else list(np.linspace(0.25, 1, args.points))
    pts = boundary_curve(mus, BoundarySearch())
    rows = [(p.mu, p.delta_max, p.branch, p.a, p.b, p.w) for p in pts]
    _emit(args, ["mu", "delta_max", "branch", "a", "b", "w"], rows, {"search": BoundarySearch()}, None, t0)
    return EXIT_OK


def cmd_cloud(args) -> int:
    from .discord import symmetric_discord

    t0 = time.perf_counter()
    cfg = RandomStateConfig(args.rank, args.samples, args.seed)
    rhos = sample_random_states(cfg)
    search = MeasurementSearch(n_theta=args.n_theta, n_phi=args.n_phi, refine=not args.no_refine)
    d = symmetric_discord(rhos, search)
    mu = purity(rhos)
    _emit(args, ["purity", "delta"], zip(mu, d), {"states": cfg, "search": search}, args.seed, t0)
    return EXIT_OK


def cmd_gate_info(args) -> int:
    if args.file:
        u = load_matrix(args.file)
        c = canonical_coordinates(u)
    else:
        c = _gate_coords(args)
    print(f"theta = ({fmt_pi(c[0])}, {fmt_pi(c[1])}, {fmt_pi(c[2])})")
    print(f"theta_rad = ({c[0]:.12f}, {c[1]:.12f}, {c[2]:.12f})")
    return EXIT_OK


def cmd_verify(args) -> int:
    def report(chk):
        status = "PASS" if chk.passed else "FAIL"
        print(f"{status}  {chk.name}  (value {chk.value:.3e}, tol {chk.tol:.0e})")

    ok = run_all(report)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_replay(args) -> int:
    """Re-run the command recorded in a manifest, optionally to a new output path."""
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        argv = list(manifest["argv"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed manifest {args.manifest}: {exc}") from None
    if args.out:
        if "--out" in argv:
            argv[argv.index("--out") + 1] = args.out
        else:
            argv += ["--out", args.out]
    return main(argv)


def _add_search_flags(p):
    p.add_argument("--n-theta", type=int, default=24, help="polar grid size (default 24)")
    p.add_argument("--n-phi", type=int, default=48, help="azimuth grid size (default 48)")
    p.add_argument("--no-refine", action="store_true", help="grid only, no Nelder-Mead polish")


def _add_power_flags(p):
    p.add_argument("--preset", choices=["desk", "full"], default="desk")
    p.add_argument("--budget", type=int, help="candidate states screened per purity")
    p.add_argument("--prob-samples", type=int, help="random probability vectors per purity")
    p.add_argument("--angle-step", help="basis grid step, e.g. 0.1pi")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--workers", type=int, help=f"parallel processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--out", help="CSV output path (a .manifest.json is written next to it)")
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script next to the CSV")


def _add_gate_flags(p, file_ok=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--named", choices=sorted(NAMED_MATRICES))
    g.add_argument("--coords", help="theta_x,theta_y,theta_z in radians or with a pi suffix")
    if file_ok:
        g.add_argument("--file", help="JSON 4x4 unitary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discpower", description="Two-qubit discord and discording power of gates.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("discord", help="discord report for a JSON state file")
    p.add_argument("state")
    _add_search_flags(p)
    p.set_defaults(func=cmd_discord)

    p = sub.add_parser("power", help="discording power versus purity")
    _add_gate_flags(p)
    p.add_argument("--purity", type=float)
    p.add_argument("--purity-grid", help="start:stop:step or comma list")
    _add_power_flags(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("sweep", help="discording power of U_c(a,0,0) or U_c(a,a,0) versus a")
    p.add_argument("--family", choices=["a00", "aa0"], required=True)
    p.add_argument("--purity", type=float, default=0.7)
    p.add_argument("--points", type=int, default=26)
    p.add_argument("--alpha-grid", help="comma list of angles (overrides --points)")
    _add_power_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="maximal discord versus purity")
    p.add_argument("--points", type=int, default=40)
    p.add_argument("--purity-grid")
    p.add_argument("--out")
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("cloud", help="purity and discord of random states of fixed rank")
    p.add_argument("--rank", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--gnuplot", action="store_true")
    _add_search_flags(p)
    p.set_defaults(func=cmd_cloud)

    p = sub.add_parser("gate-info", help="canonical Cartan coordinates of a gate")
    _add_gate_flags(p)
    p.set_defaults(func=cmd_gate_info)

    p = sub.add_parser("verify", help="gate identities and quick property checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="re-run the command recorded in a .manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", help="write to this path instead of the recorded one")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"discpower: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, KeyError) as exc:
        print(f"discpower: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
