"""Command-line entry point: ``pinch-aoi <command> [options]``.

Exit codes: 0 success, 1 configuration or usage error, 2 infeasible
scenario, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict

from . import bench
from .analytic import ModelVariant, average_aoi, renewal_moments
from .config import config_digest, default_config, dumps_config, load_config
from .errors import ConfigError, InfeasibleLinkError, PinchAoIError
from .model import link_budget
from .placement import Objective, PlacementSpec, fixed_antenna_baseline, optimize_position
from .sim import SimMode, SimSpec, simulate

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _variants(name):
    if name == "both":
        return tuple(ModelVariant)
    return (ModelVariant(name),)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(args):
    return load_config(args.config) if args.config else default_config()


def _device(config, index):
    if not 0 <= index < len(config.devices):
        raise ConfigError(f"device index {index} out of range (config has {len(config.devices)})")
    return config.devices[index]


def _x_p(config, device, x_p):
    if x_p is not None:
        return x_p
    return min(max(device.x_m, 0.0), config.geometry.waveguide_length_m)


def _sim_spec(args, mode):
    return SimSpec(mode=mode, target_cycles=args.cycles, seed=args.seed,
                   replications=args.replications, max_slots=getattr(args, "max_slots", None))


def cmd_analyze(args):
    config = _load(args)
    device = _device(config, args.device)
    x_p = _x_p(config, device, args.x_p)
    link = link_budget(config, device, x_p)
    record = {"x_p_m": x_p, "link": asdict(link), "variants": {}}
    for v in _variants(args.variant):
        m = renewal_moments(link, v)
        record["variants"][v.label] = {
            "e_t": m.e_t, "e_t2": m.e_t2, "e_m": m.e_m, "e_m2": m.e_m2,
            "e_s": m.e_s, "e_s2": m.e_s2,
            "aoi_s": average_aoi(link, config.energy.slot_s, v),
        }
    _emit(bench.dumps_record(record), args.out)


def cmd_sweep(args):
    config = _load(args)
    variants = _variants(args.variant)
    sim = None
    if args.simulate:
        sim = _sim_spec(args, SimMode(args.simulate))
    if args.preset:
        if args.out is None:
            raise ConfigError("--preset writes several files and needs --out")
        written = bench.run_preset(args.preset, config, args.out, sim, variants, args.jobs)
        for path, rows in written.items():
            print(f"{path}: {rows} rows")
        return
    if args.axis is None:
        raise ConfigError("sweep needs --preset or --axis")
    values = _axis_values(args.range, args.values, "--range/--values")
    secondary = None
    if args.secondary_axis:
        secondary = _axis_values(args.secondary_range, args.secondary_values,
                                 "--secondary-range/--secondary-values")
    try:
        spec = bench.SweepSpec(args.axis, values, args.secondary_axis, secondary or (), sim,
                               args.x_p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = bench.sweep_rows(config, spec, variants, args.jobs)
    if args.out is None:
        bench.write_csv(rows, sys.stdout)
    else:
        bench.write_rows(rows, args.out)
        print(f"{args.out}: {len(rows)} rows")


def _axis_values(rng, values, flag):
    if (rng is None) == (values is None):
        raise ConfigError(f"give exactly one of {flag}")
    if rng is not None:
        start, stop, count = rng
        return bench.axis_range(float(start), float(stop), int(count))
    return tuple(float(v) for v in values.split(","))


def cmd_simulate(args):
    config = _load(args)
    device = _device(config, args.device)
    x_p = _x_p(config, device, args.x_p)
    res = simulate(config, device, x_p, _sim_spec(args, SimMode(args.mode)), args.jobs)
    record = {"config_digest": config_digest(config), "x_p_m": x_p, "mode": args.mode,
              **res.to_dict()}
    _emit(bench.dumps_record(record), args.out)


def cmd_optimize(args):
    config = _load(args)
    objective = args.objective or ("single" if len(config.devices) == 1 else "sum")
    record = {"objective": objective, "variants": {}}
    for v in _variants(args.variant):
        spec = PlacementSpec(args.grid_step, args.refine_rounds, objective, v)
        best = optimize_position(config, spec, args.jobs)
        base = fixed_antenna_baseline(config, args.baseline, objective, v)
        record["variants"][v.label] = {
            "x_p_star_m": best.x_p_star_m,
            "aoi_star_s": best.aoi_star_s,
            "per_device_aoi_s": list(best.per_device_aoi_s),
            "evaluations": best.evaluations,
            "baseline_x_m": args.baseline,
            "baseline_aoi_s": base.aoi_star_s,
            "baseline_ratio": base.aoi_star_s / best.aoi_star_s,
        }
    _emit(bench.dumps_record(record), args.out)


def cmd_compare(args):
    config = _load(args)
    device = _device(config, args.device)
    x_p = _x_p(config, device, args.x_p)
    record = bench.compare(config, x_p, _sim_spec(args, SimMode(args.mode)), None, device,
                           args.jobs)
    _emit(bench.dumps_record(record), args.out)


def cmd_config(args):
    _emit(dumps_config(_load(args)), args.out)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file (default: bundled defaults)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--variant", choices=["paper", "corrected", "both"], default="both")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common.add_argument("--device", type=int, default=0, help="device index")

    simflags = argparse.ArgumentParser(add_help=False)
    simflags.add_argument("--cycles", type=int, default=10_000, help="renewals per replication")
    simflags.add_argument("--seed", type=int, default=0)
    simflags.add_argument("--replications", type=int, default=1)

    parser = _Parser(prog="pinch-aoi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="link budget and average AoI at one PA position")
    p.add_argument("--x-p", type=float)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", parents=[common, simflags], help="write a parameter sweep CSV")
    p.add_argument("--preset", choices=["fig3", "fig4", "fig5"])
    p.add_argument("--axis", choices=[a.value for a in bench.Axis])
    p.add_argument("--range", nargs=3, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--values", help="comma-separated increasing values")
    p.add_argument("--secondary-axis", choices=[a.value for a in bench.Axis])
    p.add_argument("--secondary-range", nargs=3, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--secondary-values")
    p.add_argument("--x-p", type=float, help="PA position when no axis sweeps it")
    p.add_argument("--simulate", choices=["exact", "fast"], help="co-run Monte Carlo per point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common, simflags], help="Monte-Carlo estimate at one PA position")
    p.add_argument("--x-p", type=float)
    p.add_argument("--mode", choices=["exact", "fast"], default="fast")
    p.add_argument("--max-slots", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", parents=[common], help="search the AoI-optimal PA position")
    p.add_argument("--objective", choices=[o.value for o in Objective])
    p.add_argument("--grid-step", type=float)
    p.add_argument("--refine-rounds", type=int, default=2)
    p.add_argument("--baseline", type=float, default=0.0, help="fixed-antenna position")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", parents=[common, simflags], help="analytic variants vs simulation")
    p.add_argument("--x-p", type=float)
    p.add_argument("--mode", choices=["exact", "fast"], default="fast")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("config", parents=[common], help="print the resolved configuration")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InfeasibleLinkError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PinchAoIError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
