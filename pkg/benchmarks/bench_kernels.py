#!/usr/bin/env python3
"""Benchmark the sweep kernels under both backends.

Builds the depth-k ball permutation of x -> x^n on a sphere at several sweep
sizes and times batch modular powers, the cycle scan, and the valuation table
under the numba backend, the pure-numpy backend, and a plain-Python reference
loop. Run:

    python benchmarks/bench_kernels.py [--sizes small,medium,large] [--repeat 3]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from padicdyn import kernels  # noqa: E402

CASES = {
    # (p, l, k, n): partition of (p-1)p^(k-1) balls mod p^(l+k)
    "small": (97, 1, 2, 5),       # 9,312 balls
    "medium": (101, 1, 3, 7),     # 1,020,100 -> capped below; use l=1 k=2 variant
    "large": (499, 1, 2, 5),      # 248,502 balls
}


def representatives(p: int, l: int, k: int) -> np.ndarray:
    t = np.arange(1, p**k, dtype=np.int64)
    t = t[t % p != 0]
    return 1 + t * p**l


def rank_map(images: np.ndarray, p: int, l: int) -> np.ndarray:
    t = (images - 1) // p**l
    return (t - 1) - (t - 1) // p


def time_call(fn, repeat: int):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def python_power_map(values, exponent, modulus):
    return [pow(int(v), exponent, modulus) for v in values]


def python_cycle_lengths(perm) -> list[int]:
    n = len(perm)
    seen = bytearray(n)
    out = []
    for i in range(n):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = 1
            j = perm[j]
            length += 1
        out.append(length)
    return out


def run_case(name: str, p: int, l: int, k: int, n: int, repeat: int) -> None:
    reps = representatives(p, l, k)
    modulus = p ** (l + k)
    print(f"\n=== {name}: p={p} l={l} k={k} n={n}  ({reps.size} balls, modulus {modulus})")

    pair_base_size = 2000  # pair walk covers size^2 pairs
    rows = []
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        # warm-up pays the JIT cost outside the timed region
        kernels.power_map(reps[:16], n, modulus)
        t_pow, images = time_call(lambda: kernels.power_map(reps, n, modulus), repeat)
        perm = rank_map(images, p, l)
        kernels.cycle_info(np.arange(15, -1, -1, dtype=np.int64))
        t_cyc, (_, lengths) = time_call(lambda: kernels.cycle_info(perm), repeat)
        diffs = (images - reps) % modulus
        kernels.valuation_table(diffs[:16], p, l + k)
        t_val, _ = time_call(lambda: kernels.valuation_table(diffs, p, l + k), repeat)
        pair_base = perm[:pair_base_size] if perm.size >= pair_base_size else perm
        pair_base = np.argsort(pair_base, kind="stable")  # a permutation of its own range
        kernels.pair_cycle_info(np.arange(7, -1, -1, dtype=np.int64))
        t_pair, (_, pair_lengths) = time_call(lambda: kernels.pair_cycle_info(pair_base), repeat)
        rows.append((backend, t_pow, t_cyc, t_val, t_pair, len(lengths), len(pair_lengths)))

    t_pow_py, images_py = time_call(lambda: python_power_map(reps, n, modulus), repeat)
    perm_py = [int(x) for x in rank_map(np.asarray(images_py, dtype=np.int64), p, l)]
    t_cyc_py, lengths_py = time_call(lambda: python_cycle_lengths(perm_py), repeat)
    rows.append(("python", t_pow_py, t_cyc_py, float("nan"), float("nan"), len(lengths_py), -1))

    counts = {r[5] for r in rows}
    pair_counts = {r[6] for r in rows if r[6] >= 0}
    header = f"{'backend':>8}  {'power_map':>12}  {'cycle_info':>12}  {'valuation':>12}  {'pair_cycles':>12}  cycles"
    print(header)
    for backend, t_pow, t_cyc, t_val, t_pair, ncyc, _ in rows:
        val = f"{t_val * 1e3:10.2f}ms" if t_val == t_val else "         --"
        pair = f"{t_pair * 1e3:10.2f}ms" if t_pair == t_pair else "         --"
        print(f"{backend:>8}  {t_pow * 1e3:10.2f}ms  {t_cyc * 1e3:10.2f}ms  {val}  {pair}  {ncyc:6d}")
    if len(counts) != 1 or len(pair_counts) > 1:
        raise SystemExit(f"backends disagree on cycle counts: {counts} / {pair_counts}")
    print("backends agree on the cycle structure")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="small,large", help="comma list from: small, medium, large")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for name in args.sizes.split(","):
        name = name.strip()
        if name not in CASES:
            raise SystemExit(f"unknown size {name!r}; choose from {sorted(CASES)}")
        p, l, k, n = CASES[name]
        if name == "medium":
            p, l, k, n = 101, 1, 2, 7  # 10,100 balls
        run_case(name, p, l, k, n, args.repeat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
