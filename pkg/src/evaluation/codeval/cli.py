import argparse
import sys

from tensor.errors import SFGError
from .core import evaluate_dataset, format_csv, format_text


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--pred',
        required=True,
        help="Directory of predicted maps (8-bit PGM)."
    )
    parser.add_argument(
        '--gt',
        required=True,
        help="Directory of ground-truth masks (8-bit PGM), matched by filename stem."
    )
    parser.add_argument(
        '--per-image',
        action='store_true',
        help="Print one row per image before the mean row."
    )
    parser.add_argument(
        '--format',
        choices=['text', 'csv'],
        default='text',
        help="Output format (default: text)."
    )


def run(args: argparse.Namespace) -> int:
    evaluation = evaluate_dataset(args.pred, args.gt)
    render = format_csv if args.format == 'csv' else format_text
    print(render(evaluation, per_image=args.per_image))
    if evaluation.missing:
        for entry in evaluation.missing:
            print(f"Missing counterpart: {entry}", file=sys.stderr)
        return 1
    return 0


def main():
    """The main entry point for the sfgeval command-line tool."""

    parser = argparse.ArgumentParser(
        prog="sfgeval",
        description="Score prediction maps against masks with S_m, F_beta_w, MAE and E_m.",
        epilog="Files without a counterpart are listed and skipped; the exit status is then 1."
    )
    add_arguments(parser)
    args = parser.parse_args()

    try:
        sys.exit(run(args))
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
