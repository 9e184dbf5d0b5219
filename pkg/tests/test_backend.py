import subprocess
import sys

import numpy as np
import pytest

from dtl import _backend
from dtl.triangulation import build_delaunay


def test_fallback_selected_when_extension_missing():
    code = ("import sys; sys.modules['dtl._kernels'] = None\n"
            "import dtl; print(dtl.backend, dtl._backend.available())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.set_backend("fortran")


@pytest.mark.skipif(len(_backend.available()) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_locate_kernel_parity(p):
    rng = np.random.default_rng(p)
    tri = build_delaunay(rng.random((80, p)))
    Q = rng.uniform(-0.2, 1.2, (2000, p))
    starts = np.zeros(len(Q), dtype=np.int64)
    args = (tri.transforms, tri.anchors, tri.neighbors, starts, Q, 500, 1e-12)
    res = []
    for b in ("cython", "python"):
        with _backend.use_backend(b):
            res.append([np.asarray(a) for a in _backend.kernels.locate_batch(*args)])
    for a, b in zip(*res):
        assert np.array_equal(a, b)
