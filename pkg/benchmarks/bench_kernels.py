"""Compare the compiled sector kernels with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 16] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from connent import _kernels_py, spin
from connent import graph as G

try:
    from connent import _xxcore
except ImportError:
    _xxcore = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(impl, n, graph, repeat):
    ei, ej, ew = graph.edge_arrays()
    k = n // 2
    states = impl.sector_states(n, k)
    sites = list(range(0, n, 2))
    return {
        "sector_states": best_of(lambda: impl.sector_states(n, k), repeat),
        "xx_sector_coo": best_of(lambda: impl.xx_sector_coo(states, ei, ej, ew), repeat),
        "gather_bits": best_of(lambda: impl.gather_bits(states, sites), repeat),
    }


def bench_ground_state(impl, graph, repeat):
    # swap the kernels the spin module sees, then solve end to end
    saved = spin.kernels.sector_states, spin.kernels.xx_sector_coo, spin.kernels.gather_bits
    spin.kernels.sector_states = impl.sector_states
    spin.kernels.xx_sector_coo = impl.xx_sector_coo
    spin.kernels.gather_bits = impl.gather_bits
    try:
        return best_of(lambda: spin.ground_state(graph), repeat)
    finally:
        spin.kernels.sector_states, spin.kernels.xx_sector_coo, spin.kernels.gather_bits = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--n-solve", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    graph = G.assign_random_weights(G.complete(args.n), rng)
    solve_graph = G.assign_random_weights(G.build_chain(args.n_solve, 3, "closed"), rng)

    backends = [("python", _kernels_py)] + ([("cython", _xxcore)] if _xxcore else [])
    results = {}
    for name, impl in backends:
        r = bench_kernels(impl, args.n, graph, args.repeat)
        r["ground_state"] = bench_ground_state(impl, solve_graph, max(1, args.repeat // 2))
        results[name] = r

    print(f"complete graph n={args.n}, sector k={args.n // 2}, {graph.n_edges} edges; "
          f"ground state on closed chain n={args.n_solve}, n_c=3")
    header = f"{'kernel':<15}" + "".join(f"{name:>12}" for name, _ in backends)
    if _xxcore:
        header += f"{'speedup':>10}"
    print(header)
    for kernel in results["python"]:
        row = f"{kernel:<15}" + "".join(f"{results[name][kernel]:>11.4f}s" for name, _ in backends)
        if _xxcore:
            row += f"{results['python'][kernel] / results['cython'][kernel]:>9.1f}x"
        print(row)
    if not _xxcore:
        print("compiled extension not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
