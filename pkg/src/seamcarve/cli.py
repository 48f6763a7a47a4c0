"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import bench, carver, energy, raster
from .errors import CarveError, InvalidConfig, InvalidTarget
from .solvers import SolverKind

SOLVER_NAMES = [k.value for k in SolverKind]
ENERGY_NAMES = list(energy.ENERGY_FUNCTIONS)

log = logging.getLogger("seamcarve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _scale(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value <= 2:
        raise argparse.ArgumentTypeError(f"scale must be in (0, 2], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _size_list(text: str) -> list[int]:
    return [_positive_int(part) for part in text.split(",") if part.strip()]


def _solver_list(text: str) -> list[SolverKind]:
    try:
        return [SolverKind.parse(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_carve_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=SOLVER_NAMES, default=SolverKind.PARALLEL_DYNAMIC.value)
    p.add_argument("--energy", choices=ENERGY_NAMES, default="e1")
    p.add_argument("--forward", action="store_true", help="add forward-energy transition costs (dp/pardp only)")


def _add_target_options(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--scale", type=_scale, help="output width as a fraction of the input width")
    group.add_argument("--width", type=_positive_int)
    p.add_argument("--height", type=_positive_int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seamcarve", description="Content-aware image resizing by seam carving.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("resize", help="carve (or widen) to a target size")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_target_options(p)
    _add_carve_options(p)

    p = sub.add_parser("enlarge", help="widen by seam insertion")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_target_options(p)
    _add_carve_options(p)

    p = sub.add_parser("remove-object", help="carve out the pixels marked in a mask")
    p.add_argument("--input", required=True)
    p.add_argument("--mask", required=True, help="grayscale image; pixels >= 128 are removed")
    p.add_argument("--output", required=True)
    p.add_argument("--no-restore", action="store_true", help="keep the reduced size")
    _add_carve_options(p)

    p = sub.add_parser("energy", help="write a normalised energy map")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--energy", choices=ENERGY_NAMES, default="e1")

    p = sub.add_parser("seams", help="draw the next N minimum seams in red")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--count", type=_positive_int, required=True)
    _add_carve_options(p)

    p = sub.add_parser("bench", help="time solvers across image sizes")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--suite", choices=("fast", "brute"))
    which.add_argument("--sizes", type=_size_list)
    p.add_argument("--solvers", type=_solver_list)
    p.add_argument("--scale", type=_scale, default=bench.DEFAULT_SCALE)
    p.add_argument("--reps", type=_positive_int, default=1)
    p.add_argument("--energy", choices=ENERGY_NAMES, default="e1")
    p.add_argument("--input", help="source image (default: generated test pattern)")
    p.add_argument("--csv", required=True)
    p.add_argument("--plot")
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    """Parse and validate ``argv``; raises UsageError on any problem."""
    args = build_parser().parse_args(argv)
    if args.command in ("resize", "enlarge") and args.scale is None and args.width is None and args.height is None:
        raise UsageError(f"{args.command}: give --scale, --width or --height")
    if args.command == "bench":
        if args.suite == "fast":
            args.sizes = list(bench.FAST_SIZES)
        elif args.suite == "brute":
            args.sizes = list(bench.BRUTE_SIZES)
        if args.solvers is None:
            args.solvers = [SolverKind.BRUTE_FORCE] if args.suite == "brute" else list(bench.FAST_SOLVERS)
        if args.scale > 1:
            raise UsageError("bench: --scale must be in (0, 1]")
    if hasattr(args, "solver"):
        try:
            args.config = carver.CarveConfig(solver=args.solver, energy_fn=args.energy, forward=args.forward)
        except InvalidConfig as exc:
            raise UsageError(f"{args.command}: {exc}") from None
    return args


def cmd_resize(args) -> None:
    img = raster.load_image(args.input)
    width = args.width
    if args.scale is not None:
        width = max(1, round(args.scale * img.shape[1]))
    if args.command == "enlarge":
        for name, want, have in (("width", width, img.shape[1]), ("height", args.height, img.shape[0])):
            if want is not None and want < have:
                raise InvalidTarget(f"enlarge: target {name} {want} is smaller than the input ({have})")
    out, report = carver.resize(img, width=width, height=args.height, cfg=args.config)
    raster.save_image(out, args.output)
    log.info("%d seams in %.3fs -> %dx%d", report.seams, report.total_time, out.shape[1], out.shape[0])


def cmd_remove_object(args) -> None:
    img = raster.load_image(args.input)
    mask = energy.load_mask(args.mask, img.shape[:2])
    out, report = carver.remove_object(img, mask, args.config, restore=not args.no_restore)
    raster.save_image(out, args.output)
    log.info("removed %d, inserted %d seams in %.3fs", report.seams_removed, report.seams_inserted, report.total_time)


def cmd_energy(input, output, fn: str = "e1") -> None:
    energy.save_energy_png(energy.compute_energy(raster.load_image(input), fn), output)


def cmd_seams(input, output, count: int, cfg: carver.CarveConfig | None = None) -> None:
    img = raster.load_image(input)
    seams, _ = carver.record_seams(img, count, cfg)
    raster.save_image(carver.draw_seams(img, seams), output)


def cmd_bench(args) -> None:
    source = raster.load_image(args.input) if args.input else None
    records = bench.run_suite(args.sizes, args.solvers, args.scale, source, args.reps, args.energy)
    bench.emit_csv(records, args.csv)
    if args.plot:
        bench.emit_plot(records, args.plot)
    for kind in args.solvers:
        for phase in bench.Phase:
            try:
                fit = bench.fit_scaling(records, kind, phase)
            except CarveError:
                continue
            print(f"{kind.value:10s} {phase.value:12s} slope={fit.slope:.3f} r2={fit.r_squared:.4f}")
    if SolverKind.BRUTE_FORCE in args.solvers:
        try:
            print(f"bruteforce per-row growth ratio={bench.exp_growth_ratio(records):.3f}")
        except CarveError:
            pass


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command in ("resize", "enlarge"):
            cmd_resize(args)
        elif args.command == "remove-object":
            cmd_remove_object(args)
        elif args.command == "energy":
            cmd_energy(args.input, args.output, args.energy)
        elif args.command == "seams":
            cmd_seams(args.input, args.output, args.count, args.config)
        elif args.command == "bench":
            cmd_bench(args)
    except (CarveError, OSError, ValueError) as exc:
        print(f"seamcarve {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
