"""Command-line front end.

Subcommands generate benchmark systems, bootstrap witness sets, move them
between slicing planes in either coordinate regime, compare the regimes
over repeated moves, and run the companion-matrix conditioning experiment.
Every output file starts with `#` manifest lines recording the command,
flags, seed, timestamp, and tool version, so artifacts are self-describing;
identical command and seed reproduce identical files up to the timestamp
line (and wall-clock columns, which measure the machine, not the math).

Exit codes: 0 success, 1 usage error, 2 numerical failure (path tracking
or validation), 3 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from . import __version__, polysys
from .conditioning import run_condition_experiment
from .errors import DegeneracyError, ParseError, PathFailureError
from .solver import witness_generate
from .tracker import (TrackerConfig, _parallel_map, _track_one,
                      endpoint_conditions, move_witness, track_global)
from .witness import format_witness, load_witness, random_plane

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class _UsageError(Exception):
    """Bad flags or parameter values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class RunManifest:
    """Provenance block embedded as comment lines in every output file."""

    command: str
    flags: dict
    seed: int | None
    timestamp: str
    version: str

    def header_lines(self):
        flag_text = " ".join("%s=%s" % (key, self.flags[key])
                             for key in sorted(self.flags))
        return [
            "# command: %s" % self.command,
            "# flags: %s" % flag_text,
            "# seed: %s" % ("-" if self.seed is None else self.seed),
            "# timestamp: %s" % self.timestamp,
            "# version: %s" % self.version,
        ]


def _manifest(args, command):
    skip = {"func", "command", "system_kind"}
    flags = {key: value for key, value in vars(args).items()
             if key not in skip and value is not None}
    return RunManifest(command=command, flags=flags,
                       seed=getattr(args, "seed", None),
                       timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ",
                                               time.gmtime()),
                       version=__version__)


def _write_lines(path, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_text(path):
    with open(path) as fh:
        return fh.read()


def _parse_int_list(text, flag):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _UsageError("%s expects comma-separated integers, got %r"
                          % (flag, text))
    if not values:
        raise _UsageError("%s is empty" % flag)
    return values


def cmd_generate(args):
    if args.system_kind == "minors":
        if args.cols < 2:
            raise _UsageError("--cols must be at least 2")
        f = polysys.adjacent_minors(args.cols)
        extra = "expected witness degree %d" % 2 ** (args.cols - 1)
    elif args.system_kind == "cyclic":
        if args.n < 2:
            raise _UsageError("--n must be at least 2")
        f = polysys.cyclic_roots(args.n)
        extra = None
    else:
        if args.n < 1 or args.d < 1 or args.t < 1:
            raise _UsageError("--n, --d, --t must be positive")
        f = polysys.random_sparse_hypersurface(args.n, args.d, args.t,
                                               args.seed)
        extra = None
    manifest = _manifest(args, "generate %s" % args.system_kind)
    _write_lines(args.out, manifest.header_lines()
                 + polysys.format_system(f).rstrip("\n").split("\n"))
    print("n=%d m=%d" % (f.n, f.m))
    if extra is not None:
        print(extra)
    return EXIT_OK


def cmd_witness(args):
    f = polysys.parse_system(_read_text(args.system))
    k = args.codim if args.codim is not None else f.m
    if not 1 <= k <= min(f.m, f.n - 1):
        raise _UsageError("--codim must be in 1..%d for this system"
                          % min(f.m, f.n - 1))
    report = []
    wset = witness_generate(f, k, args.seed, TrackerConfig(), report=report)
    manifest = _manifest(args, "witness")
    _write_lines(args.out, manifest.header_lines()
                 + format_witness(wset).rstrip("\n").split("\n"))
    counts = {}
    for entry in report:
        counts[entry["status"]] = counts.get(entry["status"], 0) + 1
    print("degree %d" % wset.degree)
    print("paths: %d tracked, %s"
          % (len(report),
             ", ".join("%d %s" % (counts[s], s) for s in sorted(counts))))
    return EXIT_OK


def cmd_sample(args):
    wset = load_witness(args.witness)
    cfg = TrackerConfig(h0=args.h, eps=args.eps, delta=args.delta,
                        rho=args.rho)
    target = random_plane(wset.plane.n, wset.plane.k, args.seed)
    moved, stats = move_witness(wset, target, cfg, mode=args.mode)
    manifest = _manifest(args, "sample")
    _write_lines(args.out, manifest.header_lines()
                 + format_witness(moved).rstrip("\n").split("\n"))
    if args.stats is not None:
        rows = ["path,newton_iters,steps,rejected,final_residual,"
                "kappa_B,kappa_E"]
        for i, (z, s) in enumerate(zip(moved.points, stats)):
            kappa_b, kappa_e = endpoint_conditions(moved.system,
                                                   moved.plane, z)
            rows.append("%d,%d,%d,%d,%.17g,%.17g,%.17g"
                        % (i, s.newton_iterations, s.steps_taken,
                           s.steps_rejected, s.final_residual,
                           kappa_b, kappa_e))
        _write_lines(args.stats, manifest.header_lines() + rows)
    print("moved %d points (mode=%s)" % (moved.degree, args.mode))
    return EXIT_OK


def cmd_compare(args):
    if args.moves < 0:
        raise _UsageError("--moves must be nonnegative")
    wset = load_witness(args.witness)
    cfg = TrackerConfig()
    f = wset.system
    n, k = wset.plane.n, wset.plane.k
    totals = {mode: {"iters": 0, "steps": 0, "ok": 0, "failures": 0,
                     "wall": 0.0} for mode in ("local", "global")}
    for move in range(args.moves):
        # Both modes get the same target so the comparison is paired.
        target = random_plane(n, k, args.seed + 7919 * move)
        for mode in ("local", "global"):
            t0 = time.perf_counter()
            if mode == "local":
                outcomes = _parallel_map(
                    lambda z: _track_one(f, wset.plane, z, target, cfg,
                                         "local"),
                    list(wset.points))
            else:
                points, path_stats = track_global(f, wset, target, cfg)
                outcomes = list(zip(points, path_stats))
            bucket = totals[mode]
            bucket["wall"] += time.perf_counter() - t0
            for point, s in outcomes:
                if point is None or not s.success:
                    bucket["failures"] += 1
                    continue
                bucket["ok"] += 1
                bucket["iters"] += s.newton_iterations
                bucket["steps"] += s.steps_taken
    manifest = _manifest(args, "compare")
    rows = ["mode,mean_newton_iters,mean_steps,failures,wall_time"]
    if args.moves > 0:
        for mode in ("local", "global"):
            bucket = totals[mode]
            paths = max(bucket["ok"], 1)
            rows.append("%s,%.17g,%.17g,%d,%.3f"
                        % (mode, bucket["iters"] / paths,
                           bucket["steps"] / paths, bucket["failures"],
                           bucket["wall"]))
    _write_lines(args.out, manifest.header_lines() + rows)
    for line in rows[1:]:
        print(line)
    return EXIT_OK


def cmd_condition(args):
    degrees = _parse_int_list(args.degrees, "--degrees")
    seeds = _parse_int_list(args.seeds, "--seeds")
    if args.n < 1 or args.t < 1:
        raise _UsageError("--n and --t must be positive")
    rows = ["degree,regime,largest_inv_cond,smallest_inv_cond"]
    sums = {}
    for seed in seeds:
        for d in degrees:
            try:
                reports, _ = run_condition_experiment(
                    n=args.n, degrees=[d], t=args.t, seed=seed,
                    include_local_shift=True)
            except DegeneracyError as exc:
                rows.append("# degenerate: seed %d degree %d: %s"
                            % (seed, d, exc))
                continue
            for rep in reports:
                rows.append("%d,%s,%.17g,%.17g"
                            % (rep.degree, rep.regime,
                               rep.largest_inverse_cond,
                               rep.smallest_inverse_cond))
                if rep.regime in ("offset", "origin"):
                    cell = sums.setdefault((d, rep.regime), [0.0, 0.0, 0])
                    cell[0] += rep.largest_inverse_cond
                    cell[1] += rep.smallest_inverse_cond
                    cell[2] += 1
    manifest = _manifest(args, "condition")
    _write_lines(args.out, manifest.header_lines() + rows)
    ratio_rows = ["degree,offset_largest_inv,offset_smallest_inv,"
                  "origin_largest_inv,origin_smallest_inv,"
                  "ratio_largest_inv,ratio_smallest_inv"]
    for d in degrees:
        off = sums.get((d, "offset"))
        org = sums.get((d, "origin"))
        if off is None or org is None:
            continue
        off_l, off_s = off[0] / off[2], off[1] / off[2]
        org_l, org_s = org[0] / org[2], org[1] / org[2]
        ratio_rows.append(
            "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g"
            % (d, off_l, off_s, org_l, org_s,
               org_l / max(off_l, 1e-300), org_s / max(off_s, 1e-300)))
    stem, dot, suffix = args.out.rpartition(".")
    ratios_path = (stem + "_ratios." + suffix) if dot else \
        (args.out + "_ratios")
    _write_lines(ratios_path, manifest.header_lines() + ratio_rows)
    print("wrote %d value rows, %d ratio rows"
          % (len(rows) - 1, len(ratio_rows) - 1))
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="witness-sampler",
                     description="Sample positive-dimensional polynomial "
                                 "solution sets by homotopy continuation.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a benchmark system file")
    gen_sub = gen.add_subparsers(dest="system_kind", required=True)
    gen_minors = gen_sub.add_parser("minors",
                                    help="adjacent 2x2 minors of a 2xc "
                                         "matrix of variables")
    gen_minors.add_argument("--cols", type=int, required=True)
    gen_minors.add_argument("--out", required=True)
    gen_minors.set_defaults(func=cmd_generate)
    gen_cyclic = gen_sub.add_parser("cyclic", help="cyclic n-roots system")
    gen_cyclic.add_argument("--n", type=int, required=True)
    gen_cyclic.add_argument("--out", required=True)
    gen_cyclic.set_defaults(func=cmd_generate)
    gen_hyper = gen_sub.add_parser("hypersurface",
                                   help="random sparse hypersurface")
    gen_hyper.add_argument("--n", type=int, default=10)
    gen_hyper.add_argument("--d", type=int, default=10)
    gen_hyper.add_argument("--t", type=int, default=5)
    gen_hyper.add_argument("--seed", type=int, default=0)
    gen_hyper.add_argument("--out", required=True)
    gen_hyper.set_defaults(func=cmd_generate)

    wit = sub.add_parser("witness",
                         help="bootstrap a witness set by total-degree "
                              "continuation")
    wit.add_argument("--system", required=True)
    wit.add_argument("--codim", type=int, default=None,
                     help="variety codimension (default: number of "
                          "equations)")
    wit.add_argument("--seed", type=int, default=0)
    wit.add_argument("--out", required=True)
    wit.set_defaults(func=cmd_witness)

    samp = sub.add_parser("sample",
                          help="move a witness set to a random target "
                               "plane")
    samp.add_argument("--witness", required=True)
    samp.add_argument("--seed", type=int, default=0)
    samp.add_argument("--mode", choices=("local", "global"),
                      default="local")
    samp.add_argument("--h", type=float, default=0.1)
    samp.add_argument("--eps", type=float, default=1e-10)
    samp.add_argument("--delta", type=float, default=1.0)
    samp.add_argument("--rho", type=float, default=0.5)
    samp.add_argument("--out", required=True)
    samp.add_argument("--stats", default=None,
                      help="per-path statistics CSV")
    samp.set_defaults(func=cmd_sample)

    comp = sub.add_parser("compare",
                          help="repeated paired moves in both regimes")
    comp.add_argument("--witness", required=True)
    comp.add_argument("--moves", type=int, default=5)
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--out", required=True)
    comp.set_defaults(func=cmd_compare)

    cond = sub.add_parser("condition",
                          help="companion-matrix conditioning experiment")
    cond.add_argument("--n", type=int, default=10)
    cond.add_argument("--degrees", default="10,20,30,40")
    cond.add_argument("--t", type=int, default=5)
    cond.add_argument("--seeds", default="0")
    cond.add_argument("--out", required=True)
    cond.set_defaults(func=cmd_condition)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError) as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
