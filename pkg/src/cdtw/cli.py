"""Batch command line front end.

Subcommands: compute (one distance), matrix (all-pairs over a directory),
oracle-check (grid convergence report against the exact solver), heatmap
(parameter-space dumps for external plotting).  Series files are CSV (one
value per line, optional second timestamp column ignored) or JSON (flat
numeric array).
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

from . import piecewise as pw
from .baselines import GridConfig, cdtw_grid, discrete_frechet, dtw
from .curves import Curve, build_curve, cell_info, point_at
from .engine import EngineConfig, cdtw_exact, reconstruct_path
from .errors import CdtwError, InsufficientVertices, ResolutionZero

EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_SANDWICH = 4

_warned_files = set()


class _UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _round(v: float) -> float:
    # 12 significant digits: below solver tolerance, above float noise
    return float(_fmt(v))


def load_series(path: str, warn: bool = True) -> List[float]:
    """Parse one series file; raises _UsageError naming file and line."""
    if not os.path.exists(path):
        raise _UsageError(f"{path}: no such file")
    if path.endswith(".json"):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise _UsageError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}")
        if not isinstance(data, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
        ):
            raise _UsageError(f"{path}: expected a flat numeric array")
        return [float(v) for v in data]

    values: List[float] = []
    saw_timestamp = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) > 2:
                raise _UsageError(
                    f"{path}:{lineno}: expected 1 or 2 columns, got {len(fields)}"
                )
            if len(fields) == 2:
                saw_timestamp = True
            try:
                values.append(float(fields[0]))
            except ValueError:
                raise _UsageError(
                    f"{path}:{lineno}: could not parse value {fields[0]!r}"
                )
    if saw_timestamp and warn and path not in _warned_files:
        _warned_files.add(path)
        print(f"warning: {path}: ignoring second column (timestamp)", file=sys.stderr)
    return values


def _curve_from(path: str, values: Sequence[float]) -> Curve:
    try:
        return build_curve(values)
    except InsufficientVertices as exc:
        raise _UsageError(f"{path}: {exc}")


def _one_distance(
    measure: str, resolution: Optional[float], a: Sequence[float], b: Sequence[float],
    pa: str, pb: str,
) -> float:
    if measure == "dtw":
        return dtw(a, b)
    if measure == "dfrechet":
        return discrete_frechet(a, b)
    P = _curve_from(pa, a)
    Q = _curve_from(pb, b)
    if measure == "cdtw-grid":
        try:
            return cdtw_grid(P, Q, GridConfig(resolution=resolution))
        except ResolutionZero as exc:
            raise _UsageError(str(exc))
    return cdtw_exact(P, Q, config=EngineConfig(record_path=False)).value


# module level so matrix workers can be pickled
def _matrix_task(args: Tuple[str, Optional[float], str, str]) -> float:
    measure, resolution, pa, pb = args
    a = load_series(pa, warn=False)
    b = load_series(pb, warn=False)
    return _one_distance(measure, resolution, a, b, pa, pb)


def cmd_compute(args: argparse.Namespace) -> int:
    if args.measure == "cdtw-grid" and args.resolution is None:
        raise _UsageError("--measure cdtw-grid requires --resolution")
    if args.measure != "cdtw" and (args.stats or args.path):
        raise _UsageError("--stats and --path are only available with --measure cdtw")
    a = load_series(args.a)
    b = load_series(args.b)

    out = {"measure": args.measure, "n": len(a), "m": len(b)}
    stats = path = None
    if args.measure == "cdtw":
        P = _curve_from(args.a, a)
        Q = _curve_from(args.b, b)
        res = cdtw_exact(P, Q, config=EngineConfig(record_path=bool(args.path)))
        out["value"] = _round(res.value)
        if args.stats:
            stats = res.stats.to_json()
            stats["wall_time"] = _round(stats["wall_time"])
            out["stats"] = stats
        if args.path:
            path = reconstruct_path(res).to_json()
            out["path"] = args.path
            with open(args.path, "w") as fh:
                json.dump(path, fh)
    else:
        out["value"] = _round(
            _one_distance(args.measure, args.resolution, a, b, args.a, args.b)
        )

    if args.format == "json":
        print(json.dumps(out))
    else:
        cols = ["measure", "value", "n", "m"]
        row = [out["measure"], _fmt(out["value"]), str(out["n"]), str(out["m"])]
        if stats is not None:
            cols += ["cells_solved", "total_pieces", "wall_time"]
            row += [
                str(stats["cells_solved"]),
                str(stats["total_pieces"]),
                _fmt(stats["wall_time"]),
            ]
        if args.path:
            cols.append("path")
            row.append(args.path)
        print(",".join(cols))
        print(",".join(row))
    return 0


def cmd_matrix(args: argparse.Namespace) -> int:
    if args.measure == "cdtw-grid" and args.resolution is None:
        raise _UsageError("--measure cdtw-grid requires --resolution")
    try:
        entries = sorted(os.listdir(args.dir))
    except OSError as exc:
        raise _UsageError(f"{args.dir}: {exc.strerror or exc}")
    files = [
        os.path.join(args.dir, name)
        for name in entries
        if name.endswith(".csv") or name.endswith(".json")
    ]
    if len(files) < 2:
        raise _UsageError(f"{args.dir}: need at least 2 series files, found {len(files)}")
    for path in files:
        load_series(path)  # validate up front, warn once here

    pairs = [
        (args.measure, args.resolution, files[i], files[j])
        for i in range(len(files))
        for j in range(i + 1, len(files))
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            values = list(pool.map(_matrix_task, pairs))
    else:
        values = [_matrix_task(task) for task in pairs]

    n = len(files)
    cells = [["0"] * n for _ in range(n)]
    it = iter(values)
    for i in range(n):
        for j in range(i + 1, n):
            cells[i][j] = cells[j][i] = _fmt(next(it))
    names = [os.path.basename(f) for f in files]
    lines = ["," + ",".join(names)]
    for name, row in zip(names, cells):
        lines.append(name + "," + ",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise _UsageError(f"{args.out}: {exc.strerror or exc}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    resolutions = args.resolutions
    if not resolutions or any(r <= 0 for r in resolutions):
        raise _UsageError("resolutions must be positive")
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise _UsageError("resolutions must be strictly ascending")
    a = load_series(args.a)
    b = load_series(args.b)
    P = _curve_from(args.a, a)
    Q = _curve_from(args.b, b)
    exact = cdtw_exact(P, Q, config=EngineConfig(record_path=False)).value
    tol = args.tol if args.tol is not None else 0.02 * exact + 0.01

    print("resolution,grid,gap")
    ok = True
    gap = 0.0
    for r in resolutions:
        grid = cdtw_grid(P, Q, GridConfig(resolution=r))
        gap = grid - exact
        print(f"{_fmt(r)},{_fmt(grid)},{_fmt(gap)}")
        if gap < -1e-9 * (1 + abs(exact)):
            ok = False
    if gap > tol:
        ok = False
    print(f"exact,{_fmt(exact)},")
    if not ok:
        print(
            f"sandwich violation: final gap {_fmt(gap)} vs tol {_fmt(tol)}",
            file=sys.stderr,
        )
        return EXIT_SANDWICH
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    if args.samples <= 0:
        raise _UsageError("--samples must be positive")
    a = load_series(args.a)
    b = load_series(args.b)
    P = _curve_from(args.a, a)
    Q = _curve_from(args.b, b)

    try:
        os.makedirs(args.out, exist_ok=True)
    except OSError as exc:
        raise _UsageError(f"{args.out}: {exc.strerror or exc}")

    def write(name: str, lines: List[str]) -> None:
        target = os.path.join(args.out, name)
        try:
            with open(target, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        except OSError as exc:
            raise _UsageError(f"{target}: {exc.strerror or exc}")

    n = args.samples
    xs = [P.length * k / (n - 1) if n > 1 else 0.0 for k in range(n)]
    ys = [Q.length * k / (n - 1) if n > 1 else 0.0 for k in range(n)]
    pv = [point_at(P, x) for x in xs]
    qv = [point_at(Q, y) for y in ys]
    lines = ["x,y,h"]
    for x, p in zip(xs, pv):
        for y, q in zip(ys, qv):
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(abs(p - q))}")
    write("heatmap.csv", lines)

    res = cdtw_exact(P, Q)
    path = reconstruct_path(res)
    lines = ["x,y"]
    for x, y in path.points:
        lines.append(f"{_fmt(x)},{_fmt(y)}")
    write("path.csv", lines)

    lines = ["i,j,x0,y0,x1,y1"]
    for i in range(1, P.num_segments + 1):
        for j in range(1, Q.num_segments + 1):
            cell = cell_info(P, Q, i, j)
            if cell.valley is None:
                continue
            (x0, y0), (x1, y1) = cell.valley
            lines.append(
                f"{i},{j},{_fmt(x0)},{_fmt(y0)},{_fmt(x1)},{_fmt(y1)}"
            )
    write("valleys.csv", lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdtw",
        description="continuous dynamic time warping distances for 1D series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_measure_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--measure",
            choices=["cdtw", "dtw", "dfrechet", "cdtw-grid"],
            default="cdtw",
        )
        p.add_argument("--resolution", type=float, default=None)
        p.add_argument("--epsilon", type=float, default=1e-9)

    p = sub.add_parser("compute", help="distance between two series files")
    p.add_argument("a")
    p.add_argument("b")
    add_measure_flags(p)
    p.add_argument("--stats", action="store_true")
    p.add_argument("--path", default=None, metavar="OUT.json")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("matrix", help="all-pairs distance matrix for a directory")
    p.add_argument("dir")
    add_measure_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("oracle-check", help="grid convergence report vs exact value")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument(
        "--resolutions",
        type=float,
        nargs="+",
        default=[4, 16, 64, 256],
    )
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("heatmap", help="dump height grid, path, and valleys as CSV")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("out")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_heatmap)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "epsilon", None) is not None:
        if args.epsilon <= 0:
            print("error: --epsilon must be positive", file=sys.stderr)
            return EXIT_USAGE
        pw.set_tolerance(args.epsilon)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CdtwError as exc:
        print(f"solver invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
