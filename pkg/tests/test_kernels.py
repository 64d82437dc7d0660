import os
import subprocess
import sys

import numpy as np
import pytest

from hornfall import kernels
from hornfall._accel import NUMBA_AVAILABLE, resolve
from hornfall.formula import DensityVector, sample_ensemble
from hornfall.theory import _coeffs

from conftest import random_horn

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")


def _run(f, backend, shuffle=-1):
    return kernels.propagate(f.n, f.heads, f.body_ptr, f.body, backend=backend, shuffle_seed=shuffle)


def test_resolve_rejects_unknown():
    with pytest.raises(ValueError):
        resolve("cuda")


@needs_numba
@pytest.mark.parametrize("seed", range(40))
def test_backends_agree_small(seed):
    rng = np.random.default_rng(seed)
    f = random_horn(rng, int(rng.integers(1, 25)))
    a, b = _run(f, "numba"), _run(f, "numpy")
    assert np.array_equal(a[0], b[0])
    assert a[1:] == b[1:]


@needs_numba
@pytest.mark.parametrize("d", [(0.1, 1.0), (0.1, 0.0, 3.1), (0.05, 0.5, 1.0, 0.7), (0.0, 2.0)])
def test_backends_agree_ensemble(d):
    f = sample_ensemble(5000, DensityVector(d), seed=3).formula
    a, b = _run(f, "numba"), _run(f, "numpy")
    assert np.array_equal(a[0], b[0])
    assert a[1:] == b[1:]


@needs_numba
@pytest.mark.parametrize("seed", range(10))
def test_propagation_order_irrelevant(seed):
    f = sample_ensemble(3000, DensityVector((0.1, 0.5, 1.5)), seed=seed).formula
    base = _run(f, "numba")
    for shuffle in range(5):
        s = _run(f, "numba", shuffle)
        assert np.array_equal(base[0], s[0]) and base[1] == s[1] and base[3] == s[3]


@needs_numba
def test_occurrences_agree():
    f = sample_ensemble(2000, DensityVector((0.1, 1.0, 1.0)), seed=5).formula
    p1, o1 = kernels.occurrences(f.n, f.body_ptr, f.body, backend="numba")
    p2, o2 = kernels.occurrences(f.n, f.body_ptr, f.body, backend="numpy")
    assert np.array_equal(p1, p2) and np.array_equal(o1, o2)


@needs_numba
@pytest.mark.parametrize("d", [(0.1, 0.0, 2.9), (0.1, 0.0, 3.1), (0.1, 1.0), (0.3, 0.2, 0.4, 0.5)])
def test_scan_backends_agree(d):
    dv = DensityVector(d)
    args = (np.log1p(-dv.d1), np.array(_coeffs(dv)), 1e-4, 1e-4)
    assert kernels.scan_first_crossing(*args, backend="numba") == kernels.scan_first_crossing(*args, backend="numpy")


def test_env_flag_selects_numpy():
    env = dict(os.environ, HORNFALL_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import hornfall; print(hornfall.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env = dict(os.environ, HORNFALL_BACKEND="numpy")
    env.pop("HORNFALL_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", "import hornfall; print(hornfall.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
