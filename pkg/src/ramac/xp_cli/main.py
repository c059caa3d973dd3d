"""``ramac`` command line.

    ramac analytic|simulate|sweep|plot --scenario <path|preset>
          [--sweep var=start:stop:step | var=v1,v2,...] [--set key=value ...]
          [--replications R] [--frames F] [--seed S] [--workers W]
          [--out DIR] [--with-sim]

analytic   analytic values only, written to ``<name>.csv``
simulate   analytic and simulated values, ``<name>.csv``
sweep      CSV plus one SVG per metric family (simulation with --with-sim)
plot       SVGs only

The default seed is ``$RAMAC_SEED`` if set, else the scenario's ``sim.seed``.
Exit status: 0 on success (non-converged points are reported but do not
fail the run), 2 on invalid input, 3 on I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from ramac.errors import RamacError
from ramac.mac_sim import RNG_ALGORITHM
from ramac.xp_cli.output import emit_csv, emit_metadata, emit_plots
from ramac.xp_cli.scenario import Scenario, ScenarioError, Sweep, load_scenario
from ramac.xp_cli.sweep import SimOptions, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3
COMMANDS = ("analytic", "simulate", "sweep", "plot")
SEED_ENV = "RAMAC_SEED"

log = logging.getLogger("ramac")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ramac", description="Random-access MAC performance models.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", required=True, help="preset name or scenario file")
    ap.add_argument("--sweep", help="var=start:stop:step or var=v1,v2,... (replaces the scenario's sweep)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a scalar parameter")
    ap.add_argument("--replications", type=int)
    ap.add_argument("--frames", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--with-sim", action="store_true", help="attach simulation estimates (sweep/plot)")
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def _resolve_seed(arg: int | None) -> int | None:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise ScenarioError(f"expected an integer, got {env!r}", SEED_ENV) from None


def prepare(args) -> tuple[Scenario, SimOptions]:
    sc = load_scenario(args.scenario)
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ScenarioError(f"expected KEY=VALUE, got {item!r}", "--set")
        sc = sc.with_value(key.strip(), value.strip())
    if args.sweep:
        sc = dataclasses.replace(sc, sweep=Sweep.parse(args.sweep))
    opts = SimOptions.for_scenario(
        sc, frames=args.frames, replications=args.replications, seed=_resolve_seed(args.seed)
    )
    for name in ("frames", "replications"):
        if getattr(opts, name) < 1:
            raise ScenarioError(f"must be >= 1, got {getattr(opts, name)}", f"--{name}")
    return sc, opts


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        sc, opts = prepare(args)
        with_sim = args.command == "simulate" or (args.command in ("sweep", "plot") and args.with_sim)
        rows = run_sweep(sc, with_simulation=with_sim, options=opts, workers=args.workers)
    except (RamacError, ValueError) as exc:
        print(f"ramac: error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    out = Path(args.out)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command != "plot":
            written.append(emit_csv(rows, out / f"{sc.name}.csv"))
        if args.command in ("sweep", "plot"):
            written += emit_plots(rows, out, sc.name)
        meta = {"scenario": sc.name, "model": sc.model, "points": len(rows)}
        if with_sim:
            meta.update(rng=RNG_ALGORITHM, seed=opts.seed, frames=opts.frames, replications=opts.replications)
        written.append(emit_metadata(out / f"{sc.name}.meta", meta))
    except OSError as exc:
        print(f"ramac: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO

    bad = [r for r in rows if r.status != "ok"]
    if bad:
        values = ", ".join(format(r.value, "g") for r in bad)
        print(f"ramac: warning: {len(bad)} of {len(rows)} points did not converge ({bad[0].var} = {values})", file=sys.stderr)
    if not args.quiet:
        for path in written:
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
