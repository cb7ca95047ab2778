"""Timing comparison of the ridge-sum kernels behind generate_patch.

Runs the same patch synthesis through every available backend, checks the
outputs are bit-identical, and prints wall time per backend plus speedup.

Usage:
    python3 benchmarks/wm_kernel_benchmark.py [--grid 257] [--repeats 5]
"""

import argparse
import time

import numpy as np

from climbsim.terrain import TerrainParams, generate_patch
from climbsim.terrain import surface


def build_params() -> TerrainParams:
    return TerrainParams(
        fractal_dim=2.5,
        roughness_amp=3.0e-4,
        sample_length=1.0e-3,
        freq_scale=1.5,
        ridge_count=10,
        max_freq_index=11,
        phase_seed=7,
    )


def time_backend(name: str, params: TerrainParams, extent: float,
                 spacing: float, repeats: int):
    surface.set_backend(name)
    generate_patch(params, extent, spacing)  # warm up
    best = float("inf")
    heights = None
    for _ in range(repeats):
        start = time.perf_counter()
        patch = generate_patch(params, extent, spacing)
        best = min(best, time.perf_counter() - start)
        heights = patch.heights
    return best, heights


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=257,
                        help="points per side (default 257)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best of (default 5)")
    args = parser.parse_args()

    spacing = 8.0e-5
    extent = (args.grid - 1) * spacing
    params = build_params()
    backends = surface.available_backends()
    original = surface.active_backend()

    print(f"grid {args.grid}x{args.grid}, ridges {params.ridge_count}, "
          f"frequency ladder 0..{params.max_freq_index}, "
          f"best of {args.repeats}")
    results = {}
    fields = {}
    try:
        for name in backends:
            seconds, heights = time_backend(
                name, params, extent, spacing, args.repeats
            )
            results[name] = seconds
            fields[name] = heights
            print(f"  {name:10s} {seconds * 1e3:9.2f} ms")
    finally:
        surface.set_backend(original)

    if len(fields) == 2:
        a, b = (fields[n] for n in backends)
        identical = np.array_equal(a, b)
        print(f"outputs bit-identical: {identical}")
        if "compiled" in results and "python" in results:
            print(f"speedup (python/compiled): "
                  f"{results['python'] / results['compiled']:.1f}x")
        if not identical:
            raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
