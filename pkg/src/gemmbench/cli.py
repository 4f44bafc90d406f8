"""Command line front end: gemm-sweep, counters, train-profile, grad-check.

Exit codes: 0 success, 1 a requested check failed, 2 runtime or data error,
3 bad command line. The base seed comes from --seed when given, else the
GEMMBENCH_SEED environment variable, else 0.

Data goes to --out as CSV or JSON (stdout with "-"). Passing --plot-dir
additionally renders the matching figure next to the data; the data itself is
identical with or without it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from gemmbench import __version__
from gemmbench.device import (
    ConfigError,
    DeviceProfile,
    SimulationError,
    load_profile,
    packaged_profile,
)
from gemmbench.idx import FormatError, load_idx
from gemmbench.kernels import (
    VARIANT_NAMES,
    KernelVariant,
    expected_counters,
    simulate_gemm,
)
from gemmbench.profiler import (
    DEFAULT_HOT_RUNS,
    DEFAULT_SWEEP_SIZES,
    DEFAULT_WARMUPS,
    MODEL_COMPUTE_FLOPS,
    profile_training_step,
    sweep,
)
from gemmbench.tensor import ShapeError, random_matrix
from gemmbench.training import grad_check, preset_models

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3

SEED_ENV = "GEMMBENCH_SEED"
DEFAULT_VARIANTS = "naive,vec4,tiled16,tiledvec16"
SIMULATE_SIZE_CAP = 128

SWEEP_HEADER = ("n", "variant", "backend", "avg_time_s", "gflops")
COUNTER_HEADER = ("n", "variant", "global_loads", "global_stores", "local_loads", "local_stores")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Common options resolved once per invocation."""

    seed: int
    out: str
    plot_dir: str | None


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _run_config(args) -> RunConfig:
    return RunConfig(
        seed=_resolve_seed(args),
        out=getattr(args, "out", "-"),
        plot_dir=getattr(args, "plot_dir", None),
    )


def _parse_sizes(text: str | None) -> tuple[int, ...]:
    if text is None:
        return DEFAULT_SWEEP_SIZES
    try:
        sizes = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"sizes must be comma-separated integers, got {text!r}") from None
    if not sizes:
        raise ConfigError("no sizes given")
    return sizes


def _parse_variants(text: str) -> list[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ConfigError("no variants given")
    return names


def _load_device(args) -> DeviceProfile:
    if args.profile:
        return load_profile(args.profile)
    return packaged_profile("calibrated")


def _write_text(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv_lines(header, rows) -> str:
    # repr keeps floats at shortest round-trip form; the sim and counter
    # paths are fully deterministic, so the emitted bytes are too.
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _plot_path(config: RunConfig, stem: str) -> Path:
    directory = Path(config.plot_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / f"{stem}.png"


def cmd_gemm_sweep(args) -> int:
    config = _run_config(args)
    records = sweep(
        _parse_variants(args.variants),
        _parse_sizes(args.sizes),
        backend=args.backend,
        warmups=args.warmups,
        hot_runs=args.hot,
        seed=config.seed,
    )
    rows = [(r.n, r.variant, r.backend, r.avg_time_s, r.gflops) for r in records]
    _write_text(config.out, _csv_lines(SWEEP_HEADER, rows))
    if config.plot_dir:
        from gemmbench import figures

        figures.save_sweep_figure(records, _plot_path(config, "gemm_sweep"))
    return EXIT_OK


def cmd_counters(args) -> int:
    config = _run_config(args)
    variants = [KernelVariant.from_name(name) for name in _parse_variants(args.variants)]
    sizes = _parse_sizes(args.sizes)
    if args.simulate and max(sizes) > SIMULATE_SIZE_CAP:
        raise ConfigError(
            f"--simulate runs every work item and is capped at n={SIMULATE_SIZE_CAP}; "
            f"got {max(sizes)}"
        )
    device = _load_device(args)
    rows = []
    for n in sizes:
        for variant in variants:
            if args.simulate:
                a = random_matrix(n, n, config.seed + 2 * n)
                b = random_matrix(n, n, config.seed + 2 * n + 1)
                _, counters = simulate_gemm(a, b, variant, device)
            else:
                counters = expected_counters(variant, n, n, n)
            rows.append(
                (
                    n,
                    variant.name,
                    counters.global_loads,
                    counters.global_stores,
                    counters.local_loads,
                    counters.local_stores,
                )
            )
    _write_text(config.out, _csv_lines(COUNTER_HEADER, rows))
    if config.plot_dir:
        from gemmbench import figures

        dict_rows = [dict(zip(COUNTER_HEADER, row)) for row in rows]
        figures.save_counters_figure(dict_rows, _plot_path(config, "counters"))
    return EXIT_OK


def cmd_train_profile(args) -> int:
    config = _run_config(args)
    device = _load_device(args)
    variant = KernelVariant.from_name(args.variant)
    presets = preset_models()
    names = [part.strip() for part in args.models.split(",") if part.strip()]
    unknown = [n for n in names if n not in presets]
    if unknown:
        raise ConfigError(f"unknown models: {', '.join(unknown)}; presets are {', '.join(presets)}")

    batch_for = {}
    if args.images or args.labels:
        if not (args.images and args.labels):
            raise ConfigError("--images and --labels must be given together")
        dataset = load_idx(args.images, args.labels)
        for name in names:
            spec = presets[name]
            if dataset.width != spec.layer_dims[0]:
                raise ConfigError(
                    f"dataset width {dataset.width} does not feed {name} "
                    f"(input width {spec.layer_dims[0]})"
                )
            batch_for[name] = dataset.batch(args.batch_size)

    reports = []
    for name in names:
        reports.append(
            profile_training_step(
                presets[name],
                device,
                variant=variant,
                batch=batch_for.get(name),
                batch_size=args.batch_size,
                seed=config.seed,
                compute_mode=args.compute,
                compute_rate=args.rate,
                warmups=args.warmups,
                hot_runs=args.hot,
            )
        )
    payload = {
        "seed": config.seed,
        "device_profile": json.loads(device.to_json()),
        "compute_rate": args.rate,
        "reports": [r.to_dict() for r in reports],
    }
    _write_text(config.out, json.dumps(payload, indent=2) + "\n")
    if config.plot_dir:
        from gemmbench import figures

        figures.save_profile_figure(reports, _plot_path(config, "train_profile"))
    return EXIT_OK


def cmd_grad_check(args) -> int:
    config = _run_config(args)
    presets = preset_models()
    names = [part.strip() for part in args.models.split(",") if part.strip()]
    unknown = [n for n in names if n not in presets]
    if unknown:
        raise ConfigError(f"unknown models: {', '.join(unknown)}; presets are {', '.join(presets)}")
    failed = False
    for name in names:
        result = grad_check(
            presets[name],
            seed=config.seed,
            batch_size=args.batch_size,
            epsilon=args.epsilon,
        )
        ok = result.max_rel_error < args.tolerance
        failed = failed or not ok
        print(f"{name} max_rel_error={result.max_rel_error:.3e} {'PASS' if ok else 'FAIL'}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="gemmbench", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep_p = sub.add_parser("gemm-sweep", help="throughput over square sizes", parents=[])
    sweep_p.add_argument("--variants", default=DEFAULT_VARIANTS, help=f"comma list from {VARIANT_NAMES} plus 'cpu' (host only)")
    sweep_p.add_argument("--sizes", default=None, help="comma list; default 32..512 step 32")
    sweep_p.add_argument("--backend", choices=("sim", "host"), default="sim")
    sweep_p.add_argument("--warmups", type=int, default=DEFAULT_WARMUPS)
    sweep_p.add_argument("--hot", type=int, default=DEFAULT_HOT_RUNS, help="hot runs per measurement")
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--out", default="-", help="CSV path, - for stdout")
    sweep_p.add_argument("--plot-dir", default=None, help="also render gemm_sweep.png here")
    sweep_p.set_defaults(func=cmd_gemm_sweep)

    counters_p = sub.add_parser("counters", help="memory transaction totals per product")
    counters_p.add_argument("--variants", default=DEFAULT_VARIANTS)
    counters_p.add_argument("--sizes", default=None)
    counters_p.add_argument(
        "--simulate",
        action="store_true",
        help=f"run the simulator instead of the closed form (n <= {SIMULATE_SIZE_CAP})",
    )
    counters_p.add_argument("--profile", default=None, help="device profile JSON")
    counters_p.add_argument("--seed", type=int, default=None)
    counters_p.add_argument("--out", default="-")
    counters_p.add_argument("--plot-dir", default=None)
    counters_p.set_defaults(func=cmd_counters)

    train_p = sub.add_parser("train-profile", help="copy/compute split of one training step")
    train_p.add_argument("--models", default="model1,model2,model3,model4")
    train_p.add_argument("--variant", default="tiledvec16")
    train_p.add_argument("--batch-size", type=int, default=32)
    train_p.add_argument("--compute", choices=("model", "host"), default="model")
    train_p.add_argument("--rate", type=float, default=MODEL_COMPUTE_FLOPS, help="modeled flops/s")
    train_p.add_argument("--profile", default=None, help="device profile JSON (default: calibrated)")
    train_p.add_argument("--images", default=None, help="IDX image file")
    train_p.add_argument("--labels", default=None, help="IDX label file")
    train_p.add_argument("--warmups", type=int, default=3)
    train_p.add_argument("--hot", type=int, default=10)
    train_p.add_argument("--seed", type=int, default=None)
    train_p.add_argument("--out", default="-", help="JSON path, - for stdout")
    train_p.add_argument("--plot-dir", default=None)
    train_p.set_defaults(func=cmd_train_profile)

    grad_p = sub.add_parser("grad-check", help="analytic gradients vs finite differences")
    grad_p.add_argument("--models", default="model1,model2,model3,model4")
    grad_p.add_argument("--batch-size", type=int, default=4)
    grad_p.add_argument("--epsilon", type=float, default=1e-3)
    grad_p.add_argument("--tolerance", type=float, default=1e-3)
    grad_p.add_argument("--seed", type=int, default=None)
    grad_p.set_defaults(func=cmd_grad_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ShapeError, FormatError, SimulationError, OSError, ValueError) as exc:
        print(f"gemmbench: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
