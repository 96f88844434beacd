"""Numba kernels vs the numpy fallback on 12-16 qubit states.

    python benchmarks/bench_kernels.py [--qubits 12 14 16] [--repeat 20]

Also times one production Trotter evolution (600 steps, 12 qubits) per backend.
"""
import argparse
import time

import numpy as np

from njl_qet import _kernels
from njl_qet.njl.lattice import LatticeParams, build_hamiltonian
from njl_qet.pauli import PauliString
from njl_qet.statevector import H_MATRIX


def _time(fn, repeat):
    fn()  # warm-up (compilation for numba)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_primitives(n, repeat):
    rng = np.random.default_rng(0)
    base = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    base /= np.linalg.norm(base)
    x, z, yph = PauliString("XY" + "Z" * (n - 4) + "YX").masks()
    rows = []
    for name, ks in (("numba", _kernels.numba_kernels), ("numpy", _kernels.numpy_kernels)):
        if ks is None:
            continue
        st = base.copy()
        cases = {
            "pauli_rotation": lambda: ks.pauli_rotation(st, x, z, yph, 0.8, 0.6),
            "pauli_expectation": lambda: ks.pauli_expectation(st, x, z, yph),
            "apply_1q": lambda: ks.apply_1q(st, H_MATRIX, n // 2),
            "apply_cx": lambda: ks.apply_cx(st, 0, n - 1),
        }
        for case, fn in cases.items():
            rows.append((n, case, name, _time(fn, repeat)))
    return rows


def bench_trotter(steps=600):
    model = build_hamiltonian(LatticeParams(), [0.4] * 10)
    sched = []
    for part in model.sub_sums():
        for c, p in part.terms:
            if not p.is_identity:
                x, z, yph = p.masks()
                sched.append((x, z, yph, np.cos(c.real * 0.01), np.sin(c.real * 0.01)))
    out = {}
    for name, ks in (("numba", _kernels.numba_kernels), ("numpy", _kernels.numpy_kernels)):
        if ks is None:
            continue
        st = np.zeros(2**12, complex)
        st[0] = 1

        def run():
            for _ in range(steps):
                for args in sched:
                    ks.pauli_rotation(st, *args)

        out[name] = _time(run, 1)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[12, 14, 16])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--skip-trotter", action="store_true")
    args = ap.parse_args(argv)

    print(f"{'qubits':>6} {'kernel':<18} {'backend':<6} {'time/call':>12}")
    for n in args.qubits:
        rows = bench_primitives(n, args.repeat)
        for q, case, name, t in rows:
            print(f"{q:>6} {case:<18} {name:<6} {t * 1e6:>10.1f}us")
    if not args.skip_trotter:
        t = bench_trotter()
        print("\nproduction Trotter evolution (12 qubits, 600 steps):")
        for name, secs in t.items():
            print(f"  {name:<6} {secs:.3f}s")
        if len(t) == 2:
            print(f"  speedup {t['numpy'] / t['numba']:.1f}x")


if __name__ == "__main__":
    main()
