"""Time the compiled and numpy window-maximum kernels on the same inputs.

    python3 benchmarks/bench_kernels.py --sizes 64,256,1024 --repeat 5
"""

import argparse
import timeit

import numpy as np

from meanlab._kernels import available_backends


def scan_input(n, rng):
    return np.concatenate(([0.0], np.cumsum(rng.exponential(size=n))))


def rows_input(n, kmax, rng):
    return rng.exponential(size=(n, 2 * kmax + 1))


def bench(fn, args, repeat):
    t = timeit.repeat(lambda: fn(*args), number=1, repeat=repeat)
    return min(t)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,256,1024", help="support sizes for the scan kernel")
    ap.add_argument("--rows", type=int, default=1 << 16, help="orbit rows for the window kernel")
    ap.add_argument("--kmax", default="2,4,8", help="window radii for the window kernel")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    backends = available_backends()
    names = sorted(backends)
    if "compiled" not in backends:
        print("compiled kernels not built; timing the numpy fallback only")

    print(f"{'kernel':<22}{'size':>10}" + "".join(f"{n + ' (s)':>16}" for n in names)
          + (f"{'speedup':>10}" if len(names) == 2 else ""))
    cases = [("maximal_scan", n, (scan_input(n, rng),))
             for n in map(int, args.sizes.split(","))]
    cases += [("centered_window_max", f"{args.rows}x{k}", (rows_input(args.rows, k, rng), k))
              for k in map(int, args.kmax.split(","))]
    for kernel, size, inputs in cases:
        times, outs = [], []
        for name in names:
            fn = getattr(backends[name], kernel)
            outs.append(fn(*inputs))
            times.append(bench(fn, inputs, args.repeat))
        same = all(np.array_equal(a, b) for a, b in zip(np.atleast_1d(outs[0]),
                                                       np.atleast_1d(outs[-1])))
        line = f"{kernel:<22}{size!s:>10}" + "".join(f"{t:>16.6f}" for t in times)
        if len(names) == 2:
            line += f"{times[1] / times[0]:>9.1f}x"
        print(line + ("" if same else "  OUTPUTS DIFFER"))


if __name__ == "__main__":
    main()
