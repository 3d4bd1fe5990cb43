import argparse
import logging
import sys
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from evaluation.codeval import cli as eval_cli
from harness.ablation import PRESETS, ablation_table, evaluate_scenes, run_ablation, run_prompt_ablation
from harness.checks import CASES, run_checks
from harness.config import TOGGLES, RunConfig, load_config
from harness.formats import read_pgm, write_grid, write_pgm
from harness.pipeline import build_store, forward_pipeline
from harness.scenes import CLASS_NAMES, SHAPES, SceneSpec, generate_scene, make_dataset
from harness.trainer import train_toy, write_loss_csv
from semantic.encoders import PROMPT_TEMPLATES, render_prompt
from spectral.fft import cli as bench_cli
from tensor.errors import SFGError
from tensor.tape import ParamStore

console = Console(highlight=False)

# dest name -> flag, for every RunConfig key that takes a value
CONFIG_FLAGS = {
    "seed": ("--seed", int),
    "image_size": ("--image-size", int),
    "band_edges": ("--band-edges", str),
    "lam": ("--lambda", float),
    "learning_rate": ("--lr", float),
    "epochs": ("--epochs", int),
    "batch_size": ("--batch-size", int),
    "weight_decay": ("--weight-decay", float),
    "prompt": ("--prompt", str),
    "texture_freq_offset": ("--offset", float),
}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    )


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run configuration")
    group.add_argument(
        '--config',
        help="Config file of 'key = value' lines (or YAML when the name ends in .yml/.yaml)."
    )
    for dest, (flag, kind) in CONFIG_FLAGS.items():
        group.add_argument(flag, dest=dest, type=kind, default=None,
                           help=f"Override '{dest}' (default: {getattr(RunConfig(), dest)!r}).")
    for name in TOGGLES:
        group.add_argument(f'--{name}', dest=name, action=argparse.BooleanOptionalAction,
                           default=None, help=f"Enable or disable the {name.upper()} module.")


def build_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {k: getattr(args, k) for k in list(CONFIG_FLAGS) + list(TOGGLES)
                 if getattr(args, k, None) is not None}
    return config.updated(overrides)


def _add_scene_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--image', help="Input image as PGM; a synthetic scene is used when omitted.")
    parser.add_argument('--class', dest='class_name', default="cat", choices=CLASS_NAMES,
                        help="Class substituted into the prompt template (default: cat).")
    parser.add_argument('--shape', default="blob", choices=SHAPES,
                        help="Object shape of the synthetic scene (default: blob).")
    parser.add_argument('--scene-seed', type=int, default=None,
                        help="Seed of the synthetic scene (default: the run seed).")
    parser.add_argument('--params', help="Parameter checkpoint (.npz) written by 'train --out'.")


def _load_inputs(args: argparse.Namespace, config: RunConfig):
    prompt = render_prompt(config.prompt, args.class_name)
    if args.image:
        image = read_pgm(args.image)
        return image[None].repeat(3, axis=0), prompt
    spec = SceneSpec(
        seed=config.seed if args.scene_seed is None else args.scene_seed,
        size=config.image_size,
        class_name=args.class_name,
        texture_freq_offset=config.texture_freq_offset,
        object_shape=args.shape,
        template=config.prompt,
    )
    scene = generate_scene(spec)
    return scene.image, scene.prompt


def _load_store(args: argparse.Namespace, config: RunConfig) -> ParamStore:
    if args.params:
        return ParamStore.load(args.params)
    return build_store(config)


def dump_intermediates(intermediates, directory: Path) -> int:
    directory.mkdir(parents=True, exist_ok=True)
    for name, tensor in sorted(intermediates.items()):
        data = tensor.data
        if data.ndim == 1:
            data = data.reshape(-1, 1, 1)
        write_grid(directory / f"{name}.sfgr", data)
    return len(intermediates)


def cmd_run(args: argparse.Namespace) -> int:
    config = build_config(args)
    image, prompt = _load_inputs(args, config)
    store = _load_store(args, config)
    prediction, intermediates = forward_pipeline(image, prompt, config, store)
    write_pgm(args.out, prediction.data)
    print(f"prediction {args.out} ({prediction.shape[0]}x{prediction.shape[1]}) prompt {prompt!r}")
    if args.dump_dir:
        count = dump_intermediates(intermediates, Path(args.dump_dir))
        print(f"dumped {count} maps to {args.dump_dir}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = build_config(args)
    specs = make_dataset(args.scenes, seed=config.seed, size=config.image_size,
                         texture_freq_offset=config.texture_freq_offset, template=config.prompt)
    result = train_toy(config, specs, steps=args.steps)
    if args.out:
        result.store.save(args.out)
    if args.loss_csv:
        write_loss_csv(result.log, args.loss_csv)
    report = evaluate_scenes(specs, config, result.store)
    if result.log:
        print(f"steps {len(result.log)} loss {result.log[0].total:.6f} -> {result.log[-1].total:.6f}")
    print(f"train MAE {report.mae:.4f} S_m {report.s_measure:.4f}")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    reports = run_checks(args.cases, samples=args.samples, seed=args.seed)
    table = Table(title="Gradient check")
    table.add_column("case")
    table.add_column("samples", justify="right")
    table.add_column("max rel err", justify="right")
    table.add_column("status")
    for report in reports:
        status = "[green]pass[/green]" if report.passed else "[red]FAIL[/red]"
        table.add_row(report.case, str(len(report.samples)), f"{report.max_rel_error:.2e}", status)
    console.print(table)
    return 0 if all(r.passed for r in reports) else 3


def cmd_ablate(args: argparse.Namespace) -> int:
    config = build_config(args)
    seeds = [int(s) for s in args.seeds.split(',') if s.strip()]
    train = make_dataset(args.train_scenes, seed=config.seed, size=config.image_size,
                         texture_freq_offset=config.texture_freq_offset, template=config.prompt)
    test = make_dataset(args.test_scenes, seed=config.seed + 1, size=config.image_size,
                        texture_freq_offset=config.texture_freq_offset, template=config.prompt)
    if args.prompts:
        rows = run_prompt_ablation(config, train, test, seeds=seeds, steps=args.steps)
        title = "Prompt ablation"
    else:
        names = args.rows.split(',') if args.rows else list(PRESETS)
        rows = run_ablation(config, train, test, names=names, seeds=seeds, steps=args.steps)
        title = "Component ablation"
    console.print(ablation_table(rows, title=f"{title} (median over {len(seeds)} seeds)"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfgnet",
        description="Semantic-frequency guided camouflaged object detection at desk scale.",
        epilog="Exit status: 0 ok, 1 contract/shape/config error, 2 format error, 3 divergence or failed check."
    )
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="Log progress (-v) or every training step (-vv) to stderr.")
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help="Predict a mask for a synthetic scene or a PGM image.")
    _add_config_arguments(run)
    _add_scene_arguments(run)
    run.add_argument('--out', default="prediction.pgm", help="Prediction PGM (default: prediction.pgm).")
    run.add_argument('--dump-dir', help="Also write every intermediate map as a GridFile here.")
    run.set_defaults(handler=cmd_run)

    dump = sub.add_parser('dump', help="Like 'run', writing every intermediate map as a GridFile.")
    _add_config_arguments(dump)
    _add_scene_arguments(dump)
    dump.add_argument('dump_dir', help="Output directory for the GridFiles.")
    dump.add_argument('--out', default=None, help="Prediction PGM (default: <dump_dir>/prediction.pgm).")
    dump.set_defaults(handler=_cmd_dump)

    train = sub.add_parser('train', help="Train on synthetic scenes and save a checkpoint.")
    _add_config_arguments(train)
    train.add_argument('--scenes', type=int, default=8, help="Number of training scenes (default: 8).")
    train.add_argument('--steps', type=int, default=None, help="Optimizer steps (default: epochs).")
    train.add_argument('--out', help="Write the trained parameters (.npz) here.")
    train.add_argument('--loss-csv', help="Write the per-step loss log as CSV here.")
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser('eval', help="Score prediction PGMs against mask PGMs.")
    eval_cli.add_arguments(evaluate)
    evaluate.set_defaults(handler=eval_cli.run)

    check = sub.add_parser('gradcheck', help="Finite-difference gradient checks per module.")
    check.add_argument('cases', nargs='*', default=["all"],
                       help=f"Cases to run (default: all): {', '.join(CASES)}.")
    check.add_argument('--samples', type=int, default=10, help="Parameters sampled per case (default: 10).")
    check.add_argument('--seed', type=int, default=0, help="Sampling seed (default: 0).")
    check.set_defaults(handler=cmd_gradcheck)

    bench = sub.add_parser('bench', help="Time fft2d per grid size.")
    bench_cli.add_arguments(bench)
    bench.set_defaults(handler=bench_cli.run)

    ablate = sub.add_parser('ablate', help="Train and score the ablation rows.")
    _add_config_arguments(ablate)
    ablate.add_argument('--rows', help=f"Comma-separated presets (default: all): {', '.join(PRESETS)}.")
    ablate.add_argument('--prompts', action='store_true',
                        help=f"Compare prompt templates instead: {', '.join(PROMPT_TEMPLATES)}.")
    ablate.add_argument('--train-scenes', type=int, default=32, help="Training scenes (default: 32).")
    ablate.add_argument('--test-scenes', type=int, default=32, help="Held-out scenes (default: 32).")
    ablate.add_argument('--seeds', default="0,1,2", help="Comma-separated training seeds (default: 0,1,2).")
    ablate.add_argument('--steps', type=int, default=300, help="Optimizer steps per run (default: 300).")
    ablate.set_defaults(handler=cmd_ablate)
    return parser


def _cmd_dump(args: argparse.Namespace) -> int:
    if args.out is None:
        args.out = str(Path(args.dump_dir) / "prediction.pgm")
        Path(args.dump_dir).mkdir(parents=True, exist_ok=True)
    return cmd_run(args)


def main(argv=None):
    """The main entry point for the sfgnet command-line tool."""

    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        sys.exit(args.handler(args))
    except SFGError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except FileNotFoundError as e:
        print(f"Error: File not found - {e.filename}", file=sys.stderr)
        sys.exit(1)
    except Exception as e:
        print(f"An unexpected error occurred: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
