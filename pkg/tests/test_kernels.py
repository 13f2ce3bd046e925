"""Backend equivalence and guards for the int64 sweep kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

from padicdyn import kernels


@pytest.fixture
def restore_backend():
    before = kernels.get_backend()
    yield
    kernels.set_backend(before)


def test_default_backend_is_numba_when_available():
    assert "numpy" in kernels.available_backends()
    if "numba" in kernels.available_backends():
        assert kernels.get_backend() in ("numba", "numpy")


def test_power_map_matches_builtin_pow(restore_backend):
    values = np.arange(1, 2000, dtype=np.int64)
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        out = kernels.power_map(values, 137, 2401)
        assert [int(v) for v in out] == [pow(int(v), 137, 2401) for v in values]


def test_backends_agree_on_all_kernels(restore_backend):
    rng = np.arange(1, 5000, dtype=np.int64)
    modulus = 912673  # 97^3
    results = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        powers = kernels.power_map(rng, 97 * 96 + 1, modulus)
        order = np.argsort(powers, kind="stable").astype(np.int64)
        starts, lengths = kernels.cycle_info(order)
        vals = kernels.valuation_table((powers - 1) % modulus, 97, 3)
        results[backend] = (powers.tolist(), starts.tolist(), lengths.tolist(), vals.tolist())
    first = next(iter(results.values()))
    for got in results.values():
        assert got == first


def test_power_map_rejects_unsafe_modulus():
    with pytest.raises(ValueError):
        kernels.power_map(np.arange(3, dtype=np.int64), 2, kernels.INT64_SAFE_MODULUS + 1)
    with pytest.raises(ValueError):
        kernels.power_map(np.arange(3, dtype=np.int64), -1, 7)


def test_power_map_any_big_modulus_python_path():
    m = 5**30  # far beyond int64
    values = [1 + 5 * t for t in range(1, 12)]
    out = kernels.power_map_any(values, 3, m)
    assert isinstance(out, list)
    assert out == [pow(v, 3, m) for v in values]


def test_cycle_info_canonical_order(restore_backend):
    perm = np.array([1, 0, 3, 2, 4], dtype=np.int64)
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        starts, lengths = kernels.cycle_info(perm)
        assert starts.tolist() == [0, 2, 4]
        assert lengths.tolist() == [2, 2, 1]


def test_cycle_info_rejects_out_of_range():
    with pytest.raises(ValueError):
        kernels.cycle_info(np.array([1, 2, 3], dtype=np.int64))
    with pytest.raises(ValueError):
        kernels.cycle_info(np.array([-1, 0], dtype=np.int64))


def test_valuation_table_caps(restore_backend):
    vals = np.array([0, 1, 3, 9, 27, 81, 243], dtype=np.int64)
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        out = kernels.valuation_table(vals, 3, 4)
        assert out.tolist() == [4, 0, 1, 2, 3, 4, 4]
    with pytest.raises(ValueError):
        kernels.valuation_table(np.array([-3], dtype=np.int64), 3, 4)


def test_pair_cycle_info_matches_materialized_product(restore_backend):
    base = np.array([2, 0, 1, 4, 3, 5], dtype=np.int64)  # cycles (0 2 1), (3 4), (5)
    m = base.size
    product = (base[:, None] * m + base[None, :]).reshape(-1)
    results = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        starts, lengths = kernels.pair_cycle_info(base)
        direct_starts, direct_lengths = kernels.cycle_info(product)
        assert starts.tolist() == direct_starts.tolist()
        assert lengths.tolist() == direct_lengths.tolist()
        results[backend] = (starts.tolist(), lengths.tolist())
    assert len({tuple(map(tuple, v)) for v in results.values()}) == 1
    assert sum(lengths) == m * m


def test_pair_cycle_info_rejects_out_of_range():
    with pytest.raises(ValueError):
        kernels.pair_cycle_info(np.array([1, 2], dtype=np.int64))


def test_set_backend_validates():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_env_flag_selects_numpy_backend():
    code = "from padicdyn import kernels; print(kernels.get_backend())"
    env = dict(os.environ, PADICDYN_BACKEND="numpy")
    env["PYTHONPATH"] = os.pathsep.join(
        [os.path.join(os.path.dirname(__file__), "..", "src"), env.get("PYTHONPATH", "")]
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    assert out.stdout.strip() == "numpy"
