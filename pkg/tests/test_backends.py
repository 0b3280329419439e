import os
import subprocess
import sys

import numpy as np
import pytest

from dagdepth import AttachmentSpec, StepSpec, exact_depths, generate_depths
from dagdepth._backend import HAVE_NUMBA, kernels, resolve
from dagdepth.brw import sample_minima, tail_indicators

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def test_depths_agree():
    for spec in (AttachmentSpec.uniform(), AttachmentSpec.power_tail(2.0)):
        for k in (1, 2, 5):
            a = generate_depths(20_000, k, spec, k, backend="numba")
            b = generate_depths(20_000, k, spec, k, backend="numpy")
            assert np.array_equal(a.depths, b.depths)


@pytest.mark.parametrize("spec", [StepSpec.exponential(1.0), StepSpec.lattice([0, 1, 2], [0.3, 0.3, 0.4])],
                         ids=lambda s: s.label())
def test_minima_and_tail_events_agree(spec):
    for k, m in ((2, 14), (3, 8)):
        a = sample_minima(spec, k, m, 300, 1, backend="numba")
        b = sample_minima(spec, k, m, 300, 1, backend="numpy")
        assert np.array_equal(a, b)
        t = float(np.median(a))
        for side in ("left", "right"):
            assert np.array_equal(
                tail_indicators(spec, k, m, 300, 1, side, t, backend="numba"),
                tail_indicators(spec, k, m, 300, 1, side, t, backend="numpy"),
            )


def test_enumeration_agrees():
    for n, k in ((5, 2), (4, 3)):
        assert exact_depths(n, k, backend="numba") == exact_depths(n, k, backend="numpy")


def test_resolve():
    assert resolve("numpy") == "numpy"
    assert kernels("numpy").__name__.endswith("_kernels_np")
    with pytest.raises(ValueError):
        resolve("fortran")


def test_env_flag_selects_numpy():
    code = "from dagdepth._backend import default_backend; print(default_backend())"
    for flag, expected in (("1", "numpy"), ("0", "numba")):
        env = dict(os.environ, DAGDEPTH_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == expected
