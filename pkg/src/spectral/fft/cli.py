import argparse
import sys

import numpy as np

from tensor.errors import SFGError
from .core import benchmark, fft2_complex, naive_dft2d


def add_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--sizes',
        default="16,32,64,128,256",
        help="Comma-separated square grid sizes, each a power of two (default: 16,32,64,128,256)."
    )
    parser.add_argument(
        '--repeats',
        type=int,
        default=5,
        help="Timed repetitions per size; the best is reported (default: 5)."
    )
    parser.add_argument(
        '--check',
        action='store_true',
        help="Also compare an 8x8 transform against the naive double-sum DFT."
    )


def run(args: argparse.Namespace) -> int:
    sizes = [int(s) for s in args.sizes.split(',') if s.strip()]
    for size, micros in benchmark(sizes, repeats=args.repeats):
        print(f"{size} {micros:.1f}")

    if args.check:
        grid = np.random.default_rng(0).standard_normal((8, 8))
        error = float(np.abs(fft2_complex(grid) - naive_dft2d(grid)).max())
        print(f"naive-dft-max-abs-error {error:.3e}")
        if error >= 1e-10:
            print("Error: FFT disagrees with the naive DFT.", file=sys.stderr)
            return 3
    return 0


def main():
    """The main entry point for the sfgbench command-line tool."""

    parser = argparse.ArgumentParser(
        prog="sfgbench",
        description="Time the radix-2 fft2d for a series of grid sizes.",
        epilog="Output is one 'size microseconds' line per size."
    )
    add_arguments(parser)
    args = parser.parse_args()

    try:
        sys.exit(run(args))
    except SFGError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
