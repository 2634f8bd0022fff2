"""The numba-jitted kernels and the pure-numpy fallback are bit-identical."""

import json
import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from radarkat.backend import HAVE_NUMBA, USE_NUMBA, backend_name

_PROBE = textwrap.dedent(
    """
    import json
    import numpy as np
    from radarkat import chain, kernels
    from radarkat.backend import backend_name
    from radarkat.chain import ChainConfig, Window

    rng = np.random.default_rng(20240811)
    out = {"backend": backend_name()}

    cfg = ChainConfig(window=Window.HANN)
    samples = rng.integers(-(2**15), 2**15, size=(48, 64), dtype=np.int64)
    out["rfft"] = chain.rfft_batch(samples, cfg).sum(dtype=np.int64).item()

    series = rng.integers(-(2**23), 2**23, size=(96, 16, 2), dtype=np.int64)
    out["cfft"] = chain.cfft_batch(series, cfg).sum(dtype=np.int64).item()

    x = rng.integers(-(2**23), 2**23, size=50000, dtype=np.int64)
    y = rng.integers(-(2**23), 2**23, size=50000, dtype=np.int64)
    mag, ph = kernels.cordic_vectoring_arr(x, y)
    out["cordic"] = [mag.sum(dtype=np.int64).item(), ph.sum(dtype=np.int64).item()]

    m = rng.integers(0, 2**23, size=(32, 16), dtype=np.int64)
    thr, count = kernels.cfar_thresholds(m, 1, 4, 0x0600)
    out["cfar"] = [thr.sum(dtype=np.int64).item(), count.sum(dtype=np.int64).item()]

    maps = rng.integers(-(2**22), 2**22, size=(3, 32, 16, 2), dtype=np.int64)
    hits = chain.cfar(maps, ChainConfig(window=Window.NONE, cfar_alpha_raw=0x0180))
    out["detections"] = [(t.range_bin, t.doppler_bin, t.magnitude_raw) for t in hits]
    print(json.dumps(out))
    """
)


def _run_with_backend(backend):
    env = dict(os.environ, RADARKAT_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", _PROBE], env=env, capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_bit_identical():
    numba_out = _run_with_backend("numba")
    numpy_out = _run_with_backend("numpy")
    assert numba_out.pop("backend") == "numba"
    assert numpy_out.pop("backend") == "numpy"
    assert numba_out == numpy_out


def test_env_flag_selects_fallback():
    out = _run_with_backend("numpy")
    assert out["backend"] == "numpy"


def test_backend_name_reports_active():
    assert backend_name() == ("numba" if USE_NUMBA else "numpy")


def test_rne_shift_array_matches_scalar():
    from radarkat.fixedpoint import rne_shift
    from radarkat.kernels import rne_shift_arr

    rng = np.random.default_rng(3)
    v = rng.integers(-(2**40), 2**40, size=2000)
    for shift in (1, 4, 11, 23):
        arr = rne_shift_arr(v, shift)
        ref = np.array([rne_shift(int(x), shift) for x in v])
        assert (arr == ref).all()


def test_rne_div_matches_fraction():
    from fractions import Fraction

    from radarkat.kernels import rne_div_nonneg

    rng = np.random.default_rng(4)
    num = rng.integers(0, 2**30, size=1000)
    den = rng.integers(1, 12, size=1000)
    got = rne_div_nonneg(num, den)
    ref = np.array([round(Fraction(int(n), int(d))) for n, d in zip(num, den)])
    assert (got == ref).all()
