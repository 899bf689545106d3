#!/usr/bin/env python3
"""Run the colored-input tracking experiment through the library API.

Equivalent to the CLI with configs/block_balanced_tracking.cfg or
configs/colored_input_tracking.cfg, but handy for interactive tweaking:
pick the gain variant, sizes, and horizons from the command line and get
a per-phase summary on stdout plus the usual CSV/plot outputs.
"""

import argparse
import time
from pathlib import Path

from apsabench.cli import emit_csv, emit_plot_data, write_manifest
from apsabench.echo_path import PathSchedule, make_block_sparse
from apsabench.filters import FilterParams, GainVariant
from apsabench.harness import PATH_STREAM, ExperimentConfig, run_ensemble
from apsabench.signals import NoiseModel, SeededStream


def build_config(args):
    L = args.filter_length
    params = FilterParams(
        filter_length=L,
        projection_order=2,
        block_length=args.block_length,
        step_size=args.mu,
        gain_variant=GainVariant(args.variant),
    )
    cluster = (L // 4, L // 4)
    two = [(L // 8, L // 8), ((11 * L) // 16, L // 8)]
    schedule = PathSchedule(
        initial=make_block_sparse(L, [cluster], SeededStream(args.seed, PATH_STREAM), label="one-cluster"),
        switched=make_block_sparse(L, two, SeededStream(args.seed, PATH_STREAM + 4), label="two-cluster"),
        switch_iteration=args.iterations // 2,
    )
    return ExperimentConfig(
        params=params,
        schedule=schedule,
        input_kind="ar1",
        pole=0.8,
        noise=NoiseModel(snr_db=40.0, sir_db=0.0, impulse_probability=0.1),
        iterations=args.iterations,
        trials=args.trials,
        base_seed=args.seed,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--filter-length", type=int, default=128)
    parser.add_argument("--block-length", type=int, default=4)
    parser.add_argument("--mu", type=float, default=0.001)
    parser.add_argument("--variant", default="block_balanced",
                        choices=[v.value for v in GainVariant])
    parser.add_argument("--iterations", type=int, default=16000)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()

    config = build_config(args)
    started = time.perf_counter()
    trace = run_ensemble(config)
    elapsed = time.perf_counter() - started

    switch = config.schedule.switch_iteration
    print(f"{args.variant}, L={args.filter_length}, {args.trials} trials, {elapsed:.1f} s")
    print(f"{'algorithm':14s} {'pre-switch':>11s} {'final':>9s}")
    for name, t in trace.traces.items():
        print(f"{name:14s} {t[switch - 1]:9.2f} dB {t[-1]:6.2f} dB")

    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv(trace, args.out / "trace.csv")
    emit_plot_data(trace, args.out / "trace.dat")
    write_manifest(config, args.out / "manifest.txt", ["trace.csv", "trace.dat"])
    print(f"wrote {args.out}/trace.csv, trace.dat, manifest.txt")


if __name__ == "__main__":
    main()
