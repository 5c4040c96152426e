"""Command-line entry point: ``dcfsim run | sweep | validate``."""

import argparse
import sys

from .config import ConfigError, ScenarioConfig, load_config
from .engine import SimulationError
from .experiment import PRESETS, SweepSpec, format_csv, parse_vary, preset, sweep, write_outputs, RunResult
from .simulation import Simulation

EXIT_OK, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="dcfsim", description="802.11b DCF infrastructure WLAN simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("--config", required=True, help="key = value scenario file")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--csv", help="write the result row here instead of stdout")
    run.add_argument("--trace", help="per-transmission trace output")
    run.add_argument("--mac-trace", help="per-station MAC phase transitions")

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    what = sw.add_mutually_exclusive_group(required=True)
    what.add_argument("--preset", choices=sorted(PRESETS))
    what.add_argument("--vary", help="KEY=V1,V2,...")
    sw.add_argument("--config", help="base scenario (defaults otherwise)")
    sw.add_argument("--hosts", type=_int_list, default=None, help="host counts, e.g. 5,10,30")
    sw.add_argument("--seeds", type=int, default=1, help="seeds per cell (1..K)")
    sw.add_argument("--jobs", type=int, default=1, help="worker processes")
    sw.add_argument("--out", required=True, help="output directory")

    va = sub.add_parser("validate", help="engine vs slot-oracle saturation throughput")
    va.add_argument("--config", help="base scenario (defaults otherwise)")
    va.add_argument("--hosts", type=_int_list, default=(2, 5, 10))
    va.add_argument("--tol", type=float, default=0.05)
    va.add_argument("--seed", type=int, default=1)
    va.add_argument("--sim-time", type=float, default=30.0, help="engine run length, s")
    va.add_argument("--horizon", type=int, default=1_000_000, help="oracle length, slots")
    return ap


def _base(path):
    return load_config(path) if path else ScenarioConfig()


def cmd_run(args):
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    trace_fh = open(args.trace, "w") if args.trace else None
    mac_fh = open(args.mac_trace, "w") if args.mac_trace else None
    trace = mac_trace = None
    if trace_fh:
        trace_fh.write("start_ns,end_ns,source,kind,outcome\n")
        trace = lambda tx, o: trace_fh.write(  # noqa: E731
            f"{tx.start},{tx.end},{tx.source},{tx.frame.kind.value},{o.value}\n")
    if mac_fh:
        mac_fh.write("t_ns,station,from,to\n")
        mac_trace = lambda t, a, old, new: mac_fh.write(f"{t},{a},{old.value},{new.value}\n")  # noqa: E731
    try:
        m = Simulation(cfg, seed=seed, trace=trace, mac_trace=mac_trace).run()
    finally:
        for fh in (trace_fh, mac_fh):
            if fh:
                fh.close()
    text = format_csv([RunResult(cfg, seed, m)])
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args):
    base = _base(args.config)
    if args.preset:
        kw = {} if args.hosts is None else {"hosts": args.hosts}
        spec = preset(args.preset, base, seeds=args.seeds, **kw)
        name = args.preset
    else:
        key, values = parse_vary(args.vary)
        hosts = args.hosts if args.hosts is not None else SweepSpec.__dataclass_fields__["hosts"].default
        spec = SweepSpec(base, key, values, tuple(hosts), args.seeds)
        name = f"vary_{key}"
    results = sweep(spec, jobs=args.jobs)
    csv_path, dat_path = write_outputs(results, spec.param, args.out, name)
    print(f"{len(results)} runs -> {csv_path}, {dat_path}")
    return EXIT_OK


def cmd_validate(args):
    from .oracle import validate

    rows = validate(_base(args.config), hosts=args.hosts, rel_tol=args.tol, seed=args.seed,
                    sim_time_s=args.sim_time, horizon=args.horizon)
    print(f"{'n':>3}  {'engine_bps':>12}  {'oracle_bps':>12}  {'rel_err':>8}  result")
    ok = True
    for n, c in rows:
        ok &= c.passed
        print(f"{n:>3}  {c.engine:>12.6g}  {c.oracle:>12.6g}  {c.rel_err:>8.4f}  "
              f"{'PASS' if c.passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CONFIG


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigError, OSError) as e:
        print(f"dcfsim: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as e:
        print(f"dcfsim: internal contract violation: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
