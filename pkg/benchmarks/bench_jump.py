"""Benchmark the stochastic jump kernel: numba backend vs numpy fallback.

Builds a two-level Rabi evolution, converts it to per-step cumulative
transition matrices, and times ``sample_paths`` on both backends for a few
trajectory counts.  The numba run is warmed up once so JIT compilation is
not charged to the measured time.

Usage:
    python benchmarks/bench_jump.py [--steps 2010] [--walkers 20000 100000]
                                    [--repeat 3] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qpt._kernels import HAS_NUMBA, sample_paths
from qpt.determinate import ObservableSpec
from qpt.dynamics import EvolutionSpec, _transition_cumulatives, evolve_possibility
from qpt.linalg import ComplexVector, Operator


def build_inputs(steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rabi problem: H = sigma_x / 2, observable = z-basis projectors."""
    h = Operator(np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex))
    psi0 = ComplexVector(np.array([1.0, 0.0], dtype=complex))
    obs = ObservableSpec.from_eigenbasis(
        [np.array([1.0, 0.0]), np.array([0.0, 1.0])], labels=["up", "down"]
    )
    spec = EvolutionSpec(hamiltonian=h, dt=2.0 * np.pi / steps, steps=steps)
    traj = evolve_possibility(psi0, obs, spec)
    cum, p0 = _transition_cumulatives(traj)
    sample_idx = np.arange(0, steps + 1, max(1, steps // 10), dtype=np.int64)
    return cum, p0, sample_idx


def time_backend(
    backend: str,
    cum: np.ndarray,
    p0: np.ndarray,
    walkers: int,
    seed: int,
    repeat: int,
    sample_idx: np.ndarray,
) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        sample_paths(cum, p0, walkers, seed, sample_idx, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=2010)
    ap.add_argument("--walkers", type=int, nargs="+", default=[20_000, 100_000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cum, p0, sample_idx = build_inputs(args.steps)
    print(f"steps={args.steps}  labels={cum.shape[1]}  repeat={args.repeat}")

    if HAS_NUMBA:
        # warm up JIT once outside the timed region
        sample_paths(cum, p0, 16, args.seed, sample_idx, backend="numba")
    else:
        print("numba not importable; only the numpy fallback will run")

    header = f"{'walkers':>10}  {'numpy (s)':>10}"
    if HAS_NUMBA:
        header += f"  {'numba (s)':>10}  {'speedup':>8}"
    print(header)
    for n in args.walkers:
        t_np = time_backend("numpy", cum, p0, n, args.seed, args.repeat, sample_idx)
        row = f"{n:>10}  {t_np:>10.4f}"
        if HAS_NUMBA:
            t_nb = time_backend(
                "numba", cum, p0, n, args.seed, args.repeat, sample_idx
            )
            row += f"  {t_nb:>10.4f}  {t_np / t_nb:>7.1f}x"
        print(row)

        a = sample_paths(cum, p0, min(n, 4096), args.seed, sample_idx, backend="numpy")
        if HAS_NUMBA:
            b = sample_paths(
                cum, p0, min(n, 4096), args.seed, sample_idx, backend="numba"
            )
            assert np.array_equal(a, b), "backends disagree on identical streams"
    print("backends emit bit-identical paths on identical streams" if HAS_NUMBA else "")


if __name__ == "__main__":
    main()
