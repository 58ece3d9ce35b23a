"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--nodes 120] [--repeat 5]

Reports the best wall time per kernel and backend, the speed-up, and the
largest relative difference between backend outputs.
"""

import argparse
import sys
import time

import numpy as np

from multialign import kernels
from multialign.align_graph import build_graph
from multialign.synth import SynthConfig, generate


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_adamic_adar(impl, g, repeat, weighted):
    n = len(g.nodes)

    def run():
        # full node-by-node block, i.e. every edition pair at once
        return impl.adamic_adar_block(g.indptr, g.indices, g.weights, 0, n, 0, n, weighted)

    return best_of(run, repeat)


def bench_nmf(impl, g, repeat, rank, epochs):
    rows, cols, vals = g.observed()
    rows, cols = rows.astype(np.int64), cols.astype(np.int64)
    n = len(g.nodes)
    rc = np.bincount(rows, minlength=n).astype(float)
    cc = np.bincount(cols, minlength=n).astype(float)

    def run():
        rng = np.random.default_rng(0)
        T = rng.random((n, rank)) + 1e-3
        Vt = rng.random((n, rank)) + 1e-3
        for _ in range(epochs):
            impl.nmf_epoch(rows, cols, vals, T, Vt, rc, cc, 0.06, 1e-12)
        return T @ Vt.T

    return best_of(run, repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--languages", type=int, default=15)
    ap.add_argument("--concepts", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rank", type=int, default=15)
    ap.add_argument("--epochs", type=int, default=50)
    args = ap.parse_args(argv)

    found = kernels.backends()
    if "compiled" not in found:
        print("compiled backend not built; only timing the python fallback", file=sys.stderr)

    inst = generate(SynthConfig(n_languages=args.languages, n_verses=1, concepts=args.concepts,
                                p_drop=0.3, p_aux=0.2, seed=0))
    (sent,) = inst.corpus.values()
    sets = [inst.observed[p][sent.verse_id] for p in inst.pairs]
    g_bin = build_graph(sent, sets, mode="binary")
    g_rated = build_graph(sent, sets, mode="rated", negative_sampling=True, seed=0)
    print(f"graph: {len(g_bin.nodes)} nodes, {len(g_bin.positive)} positive edges, "
          f"{len(g_rated.cells)} rated cells")

    cases = {
        "adamic_adar": lambda impl: bench_adamic_adar(impl, g_bin, args.repeat, False),
        "weighted_adamic_adar": lambda impl: bench_adamic_adar(impl, g_bin, args.repeat, True),
        f"nmf {args.epochs} epochs": lambda impl: bench_nmf(impl, g_rated, args.repeat, args.rank, args.epochs),
    }
    print(f"{'kernel':<24}{'python':>12}{'compiled':>12}{'speed-up':>10}{'max rel diff':>14}")
    for name, case in cases.items():
        results = {b: case(impl) for b, impl in found.items()}
        t_py, out_py = results["python"]
        if "compiled" in results:
            t_c, out_c = results["compiled"]
            scale = np.maximum(np.abs(out_py), 1e-300)
            diff = float(np.max(np.abs(out_c - out_py) / scale))
            print(f"{name:<24}{t_py * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms{t_py / t_c:>9.1f}x{diff:>14.1e}")
        else:
            print(f"{name:<24}{t_py * 1e3:>10.2f}ms{'-':>12}{'-':>10}{'-':>14}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
